// SPDX-License-Identifier: Apache-2.0

//! Exact lattice point counts inside the ellipse `f(u, v) <= x`, split by
//! congruence conditions, together with the main terms they are compared
//! against.
//!
//! Membership is always decided by the integer inequality
//! `(2au + bv)^2 + Dv^2 <= 4aN` with `N = floor(x)`; floating point only
//! enters when a count is compared with its predicted size.

use std::f64::consts::PI;

use num_rational::Ratio;
use serde::Serialize;

use crate::arith::{factorize, isqrt, kronecker, mult_functions, squarefree_divisors};
use crate::error::{Error, Result};
use crate::forms::Form;

/// The region `A(x, f) = {(u, v) : f(u, v) <= x}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EllipseWindow {
    pub form: Form,
    /// Real threshold as supplied.
    pub x: f64,
    /// `floor(x)`; the only quantity membership depends on.
    pub limit: u64,
}

/// One row `v = const` of the ellipse: `u` ranges over `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Row {
    pub v: i64,
    pub lo: i64,
    pub hi: i64,
}

impl Row {
    pub fn len(&self) -> u64 {
        (self.hi - self.lo + 1) as u64
    }

    pub fn is_empty(&self) -> bool {
        self.hi < self.lo
    }
}

impl EllipseWindow {
    pub fn new(form: Form, x: f64) -> Result<Self> {
        if !x.is_finite() || x < 0.0 {
            return Err(Error::InvalidArgument(format!("threshold x = {x} must be finite and >= 0")));
        }
        if x >= 9.0e15 {
            return Err(Error::InvalidArgument(format!("threshold x = {x} is too large")));
        }
        Ok(EllipseWindow { form, x, limit: x.floor() as u64 })
    }

    pub fn from_limit(form: Form, limit: u64) -> Self {
        EllipseWindow { form, x: limit as f64, limit }
    }

    /// `V = sqrt(4ax / D)`, the half-height of the ellipse in `v`.
    pub fn v(&self) -> f64 {
        (4.0 * self.form.a as f64 * self.x / self.form.d() as f64).sqrt()
    }

    /// Rows of the ellipse in increasing `v`; rows with no lattice points
    /// are skipped.
    pub fn rows(&self) -> impl Iterator<Item = Row> + '_ {
        let a = self.form.a as i128;
        let b = self.form.b as i128;
        let d = self.form.d() as i128;
        let bound = 4 * a * self.limit as i128;
        let v_max = isqrt((bound / d) as u128) as i64;
        (-v_max..=v_max).filter_map(move |v| {
            let vi = v as i128;
            let disc = bound - d * vi * vi;
            let s = isqrt(disc as u128) as i128;
            // |2au + bv| <= s
            let lo = -((bv_floor(b * vi + s, 2 * a)) as i64);
            let hi = bv_floor(s - b * vi, 2 * a) as i64;
            let row = Row { v, lo, hi };
            (!row.is_empty()).then_some(row)
        })
    }

    /// Calls `visit(n)` with `n = f(u, v)` for every lattice point in the window.
    pub fn for_each_value(&self, mut visit: impl FnMut(u64)) {
        let a = self.form.a as i128;
        let b = self.form.b as i128;
        for row in self.rows() {
            let mut value = self.form.eval(row.lo, row.v);
            // f(u+1, v) - f(u, v) = a(2u + 1) + bv
            let mut step = a * (2 * row.lo as i128 + 1) + b * row.v as i128;
            for _ in row.lo..=row.hi {
                visit(value as u64);
                value += step;
                step += 2 * a;
            }
        }
    }

    /// As [`for_each_value`](Self::for_each_value) over the half plane
    /// `v > 0` or `v = 0, u > 0`, so each nonzero value is visited
    /// `r_f(n) / 2` times and the origin is skipped.
    pub fn for_each_value_half(&self, mut visit: impl FnMut(u64)) {
        let a = self.form.a as i128;
        let b = self.form.b as i128;
        for row in self.rows().filter(|r| r.v >= 0) {
            let lo = if row.v == 0 { 1 } else { row.lo };
            if lo > row.hi {
                continue;
            }
            let mut value = self.form.eval(lo, row.v);
            let mut step = a * (2 * lo as i128 + 1) + b * row.v as i128;
            for _ in lo..=row.hi {
                visit(value as u64);
                value += step;
                step += 2 * a;
            }
        }
    }

    /// Bit `n` is set when `1 <= n <= limit` is represented by the form.
    pub fn represented_bitmap(&self) -> Vec<u64> {
        let mut bits = vec![0u64; self.limit as usize / 64 + 1];
        self.for_each_value_half(|n| bits[(n >> 6) as usize] |= 1 << (n & 63));
        bits
    }
}

#[inline]
fn bv_floor(num: i128, den: i128) -> i128 {
    num.div_euclid(den)
}

/// Number of `u` in `lo..=hi` with `u = r (mod m)`.
#[inline]
fn count_residue(lo: i64, hi: i64, r: i64, m: i64) -> u64 {
    if hi < lo {
        return 0;
    }
    ((hi - r).div_euclid(m) - (lo - 1 - r).div_euclid(m)) as u64
}

/// `r_f(n)`: lattice points with `f(u, v) = n`.
pub fn r_f(f: &Form, n: u64) -> u64 {
    let a = f.a as i128;
    let b = f.b as i128;
    let d = f.d() as i128;
    let bound = 4 * a * n as i128;
    let v_max = isqrt((bound / d) as u128) as i64;
    let mut count = 0;
    for v in -v_max..=v_max {
        let vi = v as i128;
        let disc = bound - d * vi * vi;
        let s = isqrt(disc as u128) as i128;
        if s * s != disc {
            continue;
        }
        // 2au + bv = +-s
        let roots: &[i128] = if s == 0 { &[0] } else { &[s, -s] };
        count += roots.iter().filter(|&&t| (t - b * vi).rem_euclid(2 * a) == 0).count() as u64;
    }
    count
}

/// `|A|`, origin included.
pub fn count_a(window: &EllipseWindow) -> u64 {
    window.rows().map(|r| r.len()).sum()
}

fn squarefree_primes(ell: u64) -> Result<Vec<u64>> {
    if ell == 0 {
        return Err(Error::InvalidArgument("modulus must be >= 1".into()));
    }
    let fac = factorize(ell);
    if !fac.is_squarefree() {
        return Err(Error::NotSquarefree(ell));
    }
    Ok(fac.primes().collect())
}

/// Solutions of `a m^2 + b m + c = 0 (mod ell)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RootSet {
    pub form: Form,
    pub ell: u64,
    pub roots: Vec<u64>,
    pub m: usize,
}

/// Chinese remaindering over the primes of a squarefree modulus.
struct Crt {
    primes: Vec<u64>,
    /// Inverse of the product of the earlier primes, modulo each prime.
    inverses: Vec<u64>,
}

impl Crt {
    fn new(primes: Vec<u64>) -> Self {
        let mut modulus = 1u64;
        let mut inverses = Vec::with_capacity(primes.len());
        for &p in &primes {
            inverses.push(inverse_mod(modulus % p, p));
            modulus *= p;
        }
        Crt { primes, inverses }
    }

    /// Glues one residue set per prime into residues modulo the product.
    fn combine(&self, per_prime: &[Vec<u64>], out: &mut Vec<u64>) {
        out.clear();
        out.push(0);
        let mut modulus = 1u64;
        let mut next = Vec::new();
        for (i, &p) in self.primes.iter().enumerate() {
            next.clear();
            for &r in out.iter() {
                for &t in &per_prime[i] {
                    let diff = (t + p - r % p) % p;
                    let k = (diff as u128 * self.inverses[i] as u128 % p as u128) as u64;
                    next.push(r + modulus * k);
                }
            }
            std::mem::swap(out, &mut next);
            modulus *= p;
        }
    }
}

fn inverse_mod(a: u64, p: u64) -> u64 {
    if p == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i128, p as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    debug_assert_eq!(old_r, 1, "{a} is not invertible mod {p}");
    old_s.rem_euclid(p as i128) as u64
}

/// Residues `t mod p` with `alpha t^2 + beta t + gamma = 0 (mod p)`.
fn quadratic_roots_mod_p(alpha: i128, beta: i128, gamma: i128, p: u64, out: &mut Vec<u64>) {
    out.clear();
    let pi = p as i128;
    let (al, be, ga) = (alpha.rem_euclid(pi), beta.rem_euclid(pi), gamma.rem_euclid(pi));
    for t in 0..pi {
        if (al * t % pi * t + be * t + ga) % pi == 0 {
            out.push(t as u64);
        }
    }
}

pub fn root_set(f: &Form, ell: u64) -> Result<RootSet> {
    let primes = squarefree_primes(ell)?;
    let mut per_prime = Vec::with_capacity(primes.len());
    for &p in &primes {
        let mut roots = Vec::new();
        quadratic_roots_mod_p(f.a as i128, f.b as i128, f.c as i128, p, &mut roots);
        per_prime.push(roots);
    }
    let mut roots = Vec::new();
    Crt::new(primes).combine(&per_prime, &mut roots);
    roots.sort_unstable();
    let m = roots.len();
    Ok(RootSet { form: *f, ell, roots, m })
}

/// Exact cardinalities of `A_ell`, `A_ell(d)` for `d | ell`, `B_ell` and
/// `B_ell(m)` for `m` in the root set of `ell`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CongruenceCount {
    pub window: EllipseWindow,
    pub ell: u64,
    pub a_ell: u64,
    /// `(d, |A_ell(d)|)` for every divisor `d` of `ell`, ascending.
    pub a_ell_by_gcd: Vec<(u64, u64)>,
    /// `|B_ell| = |A_ell(1)|`, counted from the congruence `f = 0 (mod ell)`.
    pub b_ell: u64,
    /// `(m, |B_ell(m)|)` for `m` in the root set, counted from the
    /// congruence `u = mv (mod ell)` alone.
    pub b_ell_by_root: Vec<(u64, u64)>,
}

impl CongruenceCount {
    pub fn a_ell_d(&self, d: u64) -> Option<u64> {
        self.a_ell_by_gcd.iter().find(|&&(k, _)| k == d).map(|&(_, n)| n)
    }

    /// Labelled counts in a fixed order, for reporting.
    pub fn labels(&self) -> Vec<(String, u64)> {
        let ell = self.ell;
        let mut out = vec![(format!("A_{ell}"), self.a_ell)];
        out.extend(self.a_ell_by_gcd.iter().map(|&(d, n)| (format!("A_{ell}({d})"), n)));
        out.push((format!("B_{ell}"), self.b_ell));
        out.extend(self.b_ell_by_root.iter().map(|&(m, n)| (format!("B_{ell}({m})"), n)));
        out
    }
}

pub fn count_congruence(window: &EllipseWindow, ell: u64) -> Result<CongruenceCount> {
    let primes = squarefree_primes(ell)?;
    let roots = root_set(&window.form, ell)?.roots;
    let divisors = squarefree_divisors(&primes);
    let mut by_gcd = vec![0u64; divisors.len()];
    let mut by_root = vec![0u64; roots.len()];
    let crt = Crt::new(primes.clone());
    let mut per_prime = vec![Vec::new(); primes.len()];
    let mut residues = Vec::new();
    let (a, b, c) = (window.form.a as i128, window.form.b as i128, window.form.c as i128);
    let ell_i = ell as i64;

    for row in window.rows() {
        let v = row.v as i128;
        for (i, &p) in primes.iter().enumerate() {
            quadratic_roots_mod_p(a, b * v, c * v * v, p, &mut per_prime[i]);
        }
        crt.combine(&per_prime, &mut residues);
        let hits: u64 = residues
            .iter()
            .map(|&r| count_residue(row.lo, row.hi, r as i64, ell_i))
            .sum();
        let g = num_integer::gcd(row.v.unsigned_abs(), ell);
        let slot = divisors.binary_search(&g).expect("gcd divides ell");
        by_gcd[slot] += hits;
        if g == 1 {
            for (k, &m) in roots.iter().enumerate() {
                let r = (m as i128 * v).rem_euclid(ell as i128) as i64;
                by_root[k] += count_residue(row.lo, row.hi, r, ell_i);
            }
        }
    }

    Ok(CongruenceCount {
        window: *window,
        ell,
        a_ell: by_gcd.iter().sum(),
        b_ell: by_gcd[0],
        a_ell_by_gcd: divisors.into_iter().zip(by_gcd).collect(),
        b_ell_by_root: roots.into_iter().zip(by_root).collect(),
    })
}

/// `|B_ell(m)|` for an arbitrary residue `m`: points with `(v, ell) = 1`
/// and `u = mv (mod ell)`.
pub fn count_fibre(window: &EllipseWindow, ell: u64, m: u64) -> Result<u64> {
    squarefree_primes(ell)?;
    let ell_i = ell as i64;
    Ok(window
        .rows()
        .filter(|row| num_integer::gcd(row.v.unsigned_abs(), ell) == 1)
        .map(|row| {
            let r = (m as i128 * row.v as i128).rem_euclid(ell as i128) as i64;
            count_residue(row.lo, row.hi, r, ell_i)
        })
        .sum())
}

/// `|B_{ell/d}((a,d)^2 x / d^2, f_{(a,d)})|`, which equals `|A_ell(x, f; d)|`
/// by the substitution `u = (d/(a,d)) s`, `v = d t`.
pub fn a_ell_d_by_substitution(window: &EllipseWindow, ell: u64, d: u64) -> Result<u64> {
    if d == 0 || ell % d != 0 {
        return Err(Error::InvalidArgument(format!("{d} does not divide {ell}")));
    }
    squarefree_primes(ell)?;
    let g = num_integer::gcd(window.form.a as u64, d);
    let ratio = d / g;
    let scaled = window.form.scale(g)?.form();
    // (d/g)^2 is an integer, so floor(x g^2/d^2) = floor(floor(x) / (d/g)^2).
    let sub = EllipseWindow::from_limit(scaled, window.limit / (ratio * ratio));
    Ok(count_congruence(&sub, ell / d)?.b_ell)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SqrtAverage {
    pub sum: f64,
    pub main_term: f64,
    pub error: f64,
}

/// `sum_{1 <= w <= W} sqrt(W^2 - w^2)` against `pi W^2 / 4 - W / 2`.
pub fn sqrt_average(w: f64) -> Result<SqrtAverage> {
    if !(w >= 1.0) || !w.is_finite() {
        return Err(Error::InvalidArgument(format!("W = {w} must be >= 1")));
    }
    let top = w.floor() as u64;
    let sum: f64 = (1..=top).map(|k| ((w - k as f64) * (w + k as f64)).sqrt()).sum();
    let main_term = PI * w * w / 4.0 - w / 2.0;
    Ok(SqrtAverage { sum, main_term, error: sum - main_term })
}

/// `g(p) = (1/p)(1 + chi(p) - chi(p)/p)` as an exact rational.
pub fn local_density_prime(p: u64, chi: i8) -> Ratio<i128> {
    let p = p as i128;
    let chi = chi as i128;
    Ratio::new(p * (1 + chi) - chi, p * p)
}

/// `g(ell) = prod_{p | ell} g(p)` for squarefree `ell`.
pub fn local_density_g(f: &Form, ell: u64) -> Result<Ratio<i128>> {
    if !f.is_primitive() {
        return Err(Error::NotPrimitive { a: f.a, b: f.b, c: f.c });
    }
    let primes = squarefree_primes(ell)?;
    let disc = f.discriminant();
    let mut g = Ratio::from_integer(1);
    for p in primes {
        g *= local_density_prime(p, kronecker(disc, p as i64)?);
    }
    Ok(g)
}

/// An exact count set against its predicted main term, with the error
/// envelope it is expected to respect up to a constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityReport {
    pub exact: u64,
    pub main: f64,
    pub residual: f64,
    pub envelope: f64,
    /// `|residual| / envelope`
    pub constant: f64,
}

impl DensityReport {
    fn new(exact: u64, main: f64, envelope: f64) -> Self {
        let residual = exact as f64 - main;
        DensityReport { exact, main, residual, envelope, constant: residual.abs() / envelope }
    }
}

/// `|A_ell|` against `g(ell) (pi sqrt(D) / 2a) V^2` with envelope
/// `tau_3(ell) V + sqrt(ell) tau(ell) tau_3(ell) (sqrt(D)/a) sqrt(V) + 1`.
pub fn local_density_report(window: &EllipseWindow, ell: u64) -> Result<DensityReport> {
    let g = local_density_g(&window.form, ell)?;
    let exact = count_congruence(window, ell)?.a_ell;
    let f = &window.form;
    let sqrt_d = (f.d() as f64).sqrt();
    let a = f.a as f64;
    let v = window.v();
    let main = (*g.numer() as f64 / *g.denom() as f64) * PI * sqrt_d / (2.0 * a) * v * v;
    let mf = mult_functions(ell);
    let tau3 = mf.tau3 as f64;
    let envelope =
        tau3 * v + (ell as f64).sqrt() * mf.tau as f64 * tau3 * sqrt_d / a * v.sqrt() + 1.0;
    Ok(DensityReport::new(exact, main, envelope))
}

/// `sum_{1 <= n <= x} r_f(n)` against `2 pi x / sqrt(D)` with envelope
/// `(ax)^{1/2} / D^{1/2} + (Dx)^{1/4} / a^{3/4} + 1`.
pub fn first_moment_report(window: &EllipseWindow) -> DensityReport {
    let f = &window.form;
    let (a, d, x) = (f.a as f64, f.d() as f64, window.x);
    let main = 2.0 * PI * x / d.sqrt();
    let envelope = (a * x).sqrt() / d.sqrt() + (d * x).powf(0.25) / a.powf(0.75) + 1.0;
    DensityReport::new(count_a(window) - 1, main, envelope)
}
