// SPDX-License-Identifier: Apache-2.0

//! Positive definite binary quadratic forms `au^2 + buv + cv^2`: reduction,
//! class enumeration and the per-class constants delta_f and w.

use std::fmt;

use serde::Serialize;

use crate::arith::{factorize, gcd};
use crate::error::{Error, Result};

/// A positive definite integral binary quadratic form. Not necessarily
/// primitive or reduced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Form {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl Form {
    pub fn new(a: i64, b: i64, c: i64) -> Result<Self> {
        let disc = b as i128 * b as i128 - 4 * a as i128 * c as i128;
        if a <= 0 || disc >= 0 {
            return Err(Error::NotPositiveDefinite { a, b, c });
        }
        if -disc > i64::MAX as i128 {
            return Err(Error::InvalidArgument(format!("discriminant of ({a},{b},{c}) overflows")));
        }
        Ok(Form { a, b, c })
    }

    /// `b^2 - 4ac`, always negative.
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// `D = 4ac - b^2 > 0`.
    pub fn d(&self) -> u64 {
        (-self.discriminant()) as u64
    }

    #[inline]
    pub fn eval(&self, u: i64, v: i64) -> i128 {
        let (u, v) = (u as i128, v as i128);
        self.a as i128 * u * u + self.b as i128 * u * v + self.c as i128 * v * v
    }

    pub fn is_primitive(&self) -> bool {
        gcd(gcd(self.a, self.b), self.c) == 1
    }

    pub fn is_reduced(&self) -> bool {
        let Form { a, b, c } = *self;
        b.abs() <= a && a <= c && !((b.abs() == a || a == c) && b < 0)
    }

    /// The opposite form `f(u, -v)`.
    pub fn opposite(&self) -> Form {
        Form { a: self.a, b: -self.b, c: self.c }
    }

    /// `f(p u + q v, r u + s v)`. Properly equivalent to `f` when `ps - qr = 1`.
    pub fn transform(&self, p: i64, q: i64, r: i64, s: i64) -> Form {
        let (a, b, c) = (self.a, self.b, self.c);
        Form {
            a: a * p * p + b * p * r + c * r * r,
            b: 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
            c: a * q * q + b * q * s + c * s * s,
        }
    }

    /// The unique reduced form properly equivalent to `self`.
    ///
    /// Gauss reduction: translate `b` into `(-a, a]`, swap `a` and `c` while
    /// `a > c`, then fix the sign of `b` when `a = c`.
    pub fn reduce(&self) -> Form {
        let (mut a, mut b, mut c) = (self.a as i128, self.b as i128, self.c as i128);
        loop {
            if b > a || b <= -a {
                // u -> u - k v sends b to b - 2ka.
                let k = (b + a - 1).div_euclid(2 * a);
                c = c - k * b + k * k * a;
                b -= 2 * k * a;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            break;
        }
        if a == c && b < 0 {
            b = -b;
        }
        Form { a: a as i64, b: b as i64, c: c as i64 }
    }

    /// `f_r(u, w) = f(u, r w)`.
    pub fn scale(&self, r: u64) -> Result<ScaledForm> {
        if r == 0 {
            return Err(Error::InvalidArgument("scale factor r must be >= 1".into()));
        }
        Ok(ScaledForm { base: *self, r })
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

/// `f_r(u, w) = f(u, r w) = au^2 + bruw + cr^2w^2`, of discriminant `-r^2 D`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScaledForm {
    pub base: Form,
    pub r: u64,
}

impl ScaledForm {
    pub fn form(&self) -> Form {
        let r = self.r as i64;
        Form { a: self.base.a, b: self.base.b * r, c: self.base.c * r * r }
    }
}

pub fn discriminant(f: &Form) -> i64 {
    f.discriminant()
}

pub fn reduce(f: &Form) -> Form {
    f.reduce()
}

pub fn is_primitive(f: &Form) -> bool {
    f.is_primitive()
}

pub fn scale_form(f: &Form, r: u64) -> Result<ScaledForm> {
    f.scale(r)
}

/// True when `-D` is the discriminant of a positive definite form.
pub fn is_discriminant(d: u64) -> bool {
    d >= 3 && (d % 4 == 0 || d % 4 == 3)
}

/// Units of the order of discriminant `-D`.
pub fn unit_count(d: u64) -> u32 {
    match d {
        3 => 6,
        4 => 4,
        _ => 2,
    }
}

/// Writes `-D = Delta k^2` with `Delta` a fundamental discriminant; returns
/// `(|Delta|, k)`.
pub fn fundamental_part(d: u64) -> Result<(u64, u64)> {
    if !is_discriminant(d) {
        return Err(Error::NotDiscriminant(d));
    }
    let mut kernel = 1u64;
    let mut square_root = 1u64;
    for (p, e) in factorize(d).factors {
        if e % 2 == 1 {
            kernel *= p;
        }
        square_root *= p.pow(e / 2);
    }
    if kernel % 4 == 3 {
        Ok((kernel, square_root))
    } else {
        Ok((4 * kernel, square_root / 2))
    }
}

pub fn is_fundamental(d: u64) -> bool {
    matches!(fundamental_part(d), Ok((_, 1)))
}

/// The reduced primitive forms of discriminant `-D`, one per proper
/// equivalence class, sorted lexicographically by `(a, b, c)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormClassSet {
    pub d: u64,
    pub forms: Vec<Form>,
    pub h: usize,
    pub w: u32,
}

impl FormClassSet {
    pub fn contains(&self, f: &Form) -> bool {
        self.forms.binary_search(f).is_ok()
    }
}

pub fn enumerate_class_set(d: u64) -> Result<FormClassSet> {
    if !is_discriminant(d) {
        return Err(Error::NotDiscriminant(d));
    }
    let di = d as i64;
    let a_max = crate::arith::isqrt((d / 3) as u128) as i64;
    let mut forms = Vec::new();
    for a in 1..=a_max {
        // b has the parity of D
        let start = if (-a + 1).rem_euclid(2) == di % 2 { -a + 1 } else { -a + 2 };
        let mut b = start;
        while b <= a {
            let num = b * b + di;
            if num % (4 * a) == 0 {
                let c = num / (4 * a);
                let f = Form { a, b, c };
                if c >= a && f.is_reduced() && f.is_primitive() {
                    forms.push(f);
                }
            }
            b += 2;
        }
    }
    forms.sort_unstable();
    let h = forms.len();
    Ok(FormClassSet { d, forms, h, w: unit_count(d) })
}

/// 1 when `f` is properly equivalent to its opposite, 1/2 otherwise.
pub fn delta_f(f: &Form) -> Result<f64> {
    if !f.is_reduced() {
        return Err(Error::NotReduced { a: f.a, b: f.b, c: f.c });
    }
    Ok(if f.b == 0 || f.b == f.a || f.a == f.c { 1.0 } else { 0.5 })
}
