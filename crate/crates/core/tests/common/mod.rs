// SPDX-License-Identifier: Apache-2.0

//! Brute-force reference implementations. Deliberately naive and sharing no
//! code with the library.

#![allow(dead_code)]

pub fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let (mut acc, mut b) = (1 % m, b as u128 % m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Legendre symbol by Euler's criterion, `p` an odd prime.
pub fn legendre(m: i64, p: u64) -> i8 {
    let r = m.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol from the prime factorisation of `n`.
pub fn kronecker(m: i64, n: i64) -> i8 {
    if n == 0 {
        return if m.abs() == 1 { 1 } else { 0 };
    }
    let mut k: i8 = if n < 0 && m < 0 { -1 } else { 1 };
    let mut rest = n.unsigned_abs();
    let mut p = 2u64;
    while rest > 1 {
        while rest % p == 0 {
            rest /= p;
            k *= if p == 2 {
                match m.rem_euclid(8) {
                    1 | 7 => 1,
                    3 | 5 => -1,
                    _ => 0,
                }
            } else {
                legendre(m, p)
            };
        }
        p += 1;
    }
    k
}

pub fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Reduced primitive `(a, b, c)` with `4ac - b^2 = d`, scanning every
/// `|b| <= a <= c` directly.
pub fn reduced_forms(d: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= d {
        for b in -a..=a {
            if (b * b + d) % (4 * a) != 0 {
                continue;
            }
            let c = (b * b + d) / (4 * a);
            if c < a || gcd(gcd(a, b), c) != 1 {
                continue;
            }
            if b < 0 && (-b == a || a == c) {
                continue;
            }
            out.push((a, b, c));
        }
        a += 1;
    }
    out.sort();
    out
}

pub fn eval(f: (i64, i64, i64), u: i64, v: i64) -> i64 {
    f.0 * u * u + f.1 * u * v + f.2 * v * v
}

/// Every `(u, v)` with `f(u, v) <= x`, from a box large enough to contain the
/// ellipse: `|v| <= 2 sqrt(a x / D)`, `|u| <= 2 sqrt(c x / D)`.
pub fn ellipse_points(f: (i64, i64, i64), x: i64) -> Vec<(i64, i64)> {
    let d = (4 * f.0 * f.2 - f.1 * f.1) as f64;
    let vb = (4.0 * f.0 as f64 * x as f64 / d).sqrt() as i64 + 1;
    let ub = (4.0 * f.2 as f64 * x as f64 / d).sqrt() as i64 + 1;
    let mut out = Vec::new();
    for v in -vb..=vb {
        for u in -ub..=ub {
            if eval(f, u, v) <= x {
                out.push((u, v));
            }
        }
    }
    out
}

/// Number of `t mod ell` with `a t^2 + b t + c = 0 (mod ell)`.
pub fn root_count(f: (i64, i64, i64), ell: i64) -> usize {
    (0..ell).filter(|&t| eval(f, t, 1).rem_euclid(ell) == 0).count()
}

/// Primes `p <= x` with `f(u, v) = p` for some `(u, v)`.
pub fn pi_f(f: (i64, i64, i64), x: i64) -> u64 {
    let mut hit = vec![false; x as usize + 1];
    for (u, v) in ellipse_points(f, x) {
        let n = eval(f, u, v);
        if n > 0 {
            hit[n as usize] = true;
        }
    }
    (2..=x).filter(|&n| hit[n as usize] && is_prime(n as u64)).count() as u64
}

pub fn is_squarefree(n: u64) -> bool {
    (2..).take_while(|p| p * p <= n).all(|p| n % (p * p) != 0)
}

pub fn big_omega(mut n: u64) -> u32 {
    let mut k = 0;
    let mut p = 2;
    while p * p <= n {
        while n % p == 0 {
            n /= p;
            k += 1;
        }
        p += 1;
    }
    k + (n > 1) as u32
}
