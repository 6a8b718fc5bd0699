// SPDX-License-Identifier: Apache-2.0

//! The Kronecker character `chi(n) = (-D / n)`: prefix sums, `L(1, chi)`,
//! `L'(1, chi)`, the error functionals `E0` and `E1`, weighted sums of
//! `1 * chi`, and averages over all discriminants up to `Q`.

use serde::Serialize;

use crate::arith::kronecker;
use crate::error::{Error, Result};
use crate::forms::{fundamental_part, is_discriminant, Form};

/// Euler's constant.
pub const EULER_GAMMA: f64 = 0.577215664901533;

/// Number of whole periods summed directly before switching to the
/// Euler-Maclaurin tail in [`l_values`].
const DIRECT_PERIODS: u64 = 16;

/// One period `chi(0), ..., chi(D - 1)` of `(-D / .)`.
pub fn character_period(d: u64) -> Result<Vec<i8>> {
    if !is_discriminant(d) {
        return Err(Error::NotDiscriminant(d));
    }
    let m = -(d as i64);
    (0..d).map(|n| kronecker(m, n as i64)).collect()
}

#[inline]
fn chi_at(period: &[i8], n: u64) -> i8 {
    period[(n % period.len() as u64) as usize]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CharacterProfile {
    pub d: u64,
    /// `chi(n)` for `0 <= n < D`.
    pub period: Vec<i8>,
    /// `S(t)` for `0 <= t <= T`.
    pub prefix: Vec<i64>,
    pub l1: f64,
    pub l1_prime: f64,
    pub tail_bound: f64,
}

impl CharacterProfile {
    pub fn chi(&self, n: u64) -> i8 {
        chi_at(&self.period, n)
    }

    /// `S(t)` for any real `t >= 0`, using periodicity past the table.
    pub fn s(&self, t: f64) -> i64 {
        let n = t.floor() as u64;
        match self.prefix.get(n as usize) {
            Some(&v) => v,
            None => self.prefix[(n % self.d) as usize],
        }
    }
}

pub fn char_prefix_sums(d: u64, t: u64) -> Result<CharacterProfile> {
    if t == 0 {
        return Err(Error::InvalidArgument("T must be >= 1".into()));
    }
    let period = character_period(d)?;
    // one full period is always kept so that `s` can fall back on it
    let len = t.max(d);
    let mut prefix = Vec::with_capacity(len as usize + 1);
    let mut acc = 0i64;
    prefix.push(0);
    for n in 1..=len {
        acc += chi_at(&period, n) as i64;
        prefix.push(acc);
    }
    prefix.truncate(t.max(d) as usize + 1);
    let lv = l_values_from_period(&period);
    Ok(CharacterProfile { d, period, prefix, l1: lv.l1, l1_prime: lv.l1_prime, tail_bound: lv.error_bound })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LValues {
    pub l1: f64,
    pub l1_prime: f64,
    pub error_bound: f64,
}

/// Regularised `sum_{j >= 0} 1 / (z + j)`, i.e. `-psi(z)` up to a constant
/// that cancels against `sum chi(r) = 0`.
fn harmonic_tail(z: f64) -> f64 {
    let z2 = z * z;
    let z4 = z2 * z2;
    -z.ln() + 1.0 / (2.0 * z) + 1.0 / (12.0 * z2) - 1.0 / (120.0 * z4) + 1.0 / (252.0 * z4 * z2)
}

/// Regularised `sum_{j >= 0} F(z + j)` for `F(t) = ln t / t`.
fn log_harmonic_tail(z: f64) -> f64 {
    let l = z.ln();
    let z2 = z * z;
    let f = l / z;
    let f1 = (1.0 - l) / z2;
    let f3 = (11.0 - 6.0 * l) / (z2 * z2);
    let f5 = (274.0 - 120.0 * l) / (z2 * z2 * z2);
    -0.5 * l * l + 0.5 * f - f1 / 12.0 + f3 / 720.0 - f5 / 30240.0
}

/// `L(1, chi)` and `L'(1, chi)` for `chi = (-D / .)`.
///
/// The series is summed directly over the first `16 D` terms. The rest is
/// `sum_r chi(r) sum_{j >= 16} h(jD + r)`, and each inner sum is evaluated by
/// Euler-Maclaurin; the divergent constants cancel because `chi` sums to zero
/// over a period.
pub fn l_values(d: u64) -> Result<LValues> {
    Ok(l_values_from_period(&character_period(d)?))
}

fn l_values_from_period(period: &[i8]) -> LValues {
    let d = period.len() as u64;
    let mut l1 = 0.0;
    let mut l1p = 0.0;
    for n in 1..=DIRECT_PERIODS * d {
        let c = chi_at(period, n);
        if c != 0 {
            let inv = c as f64 / n as f64;
            l1 += inv;
            l1p -= inv * (n as f64).ln();
        }
    }
    let df = d as f64;
    let ln_d = df.ln();
    let k = DIRECT_PERIODS as f64;
    let (mut t1, mut t2) = (0.0, 0.0);
    for r in 1..d {
        let c = period[r as usize];
        if c != 0 {
            let z = k + r as f64 / df;
            let h = harmonic_tail(z);
            t1 += c as f64 * h;
            t2 += c as f64 * (ln_d * h + log_harmonic_tail(z));
        }
    }
    l1 += t1 / df;
    l1p -= t2 / df;
    // First omitted Euler-Maclaurin term, doubled, plus accumulated rounding.
    let truncation = 2.0 * (k.ln() + 3.0 + ln_d) / (120.0 * k.powi(8));
    let rounding = (DIRECT_PERIODS * d) as f64 * f64::EPSILON * (1.0 + ln_d + k.ln());
    LValues { l1, l1_prime: l1p, error_bound: truncation + rounding }
}

/// `L(1, chi)` and `L'(1, chi)` from the truncated series up to `y`, with the
/// tail bounded by partial summation against `max |S|`.
pub fn l_values_truncated(d: u64, y: u64) -> Result<LValues> {
    if y == 0 {
        return Err(Error::InvalidArgument("y must be >= 1".into()));
    }
    let period = character_period(d)?;
    let (mut l1, mut l1p, mut s, mut s_max) = (0.0, 0.0, 0i64, 0i64);
    for n in 1..=y {
        let c = chi_at(&period, n);
        s += c as i64;
        s_max = s_max.max(s.abs());
        if c != 0 {
            let inv = c as f64 / n as f64;
            l1 += inv;
            l1p -= inv * (n as f64).ln();
        }
    }
    let m = s_max as f64;
    let yf = y as f64;
    // |sum_{n > y} chi(n) h(n)| <= |S(y)| h(y) + max|S| int_y^inf |h'|
    let bound_l1 = 2.0 * m / yf;
    let bound_l1p = m * (2.0 * yf.ln() + 1.0) / yf;
    Ok(LValues { l1, l1_prime: l1p, error_bound: bound_l1.max(bound_l1p) })
}

/// `h(-D) = w sqrt(D) L(1, chi) / (2 pi)` before rounding.
pub fn class_number_from_l(d: u64, w: u32, l1: f64) -> f64 {
    w as f64 * (d as f64).sqrt() * l1 / (2.0 * std::f64::consts::PI)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedSums {
    pub sigma0: f64,
    pub sigma1: f64,
    pub main0: f64,
    pub main1: f64,
}

/// `(1 * chi)(n)` for `n <= n_max` by a divisor sieve.
pub fn convolution_table(d: u64, n_max: u64) -> Result<Vec<i64>> {
    let period = character_period(d)?;
    let mut r = vec![0i64; n_max as usize + 1];
    for k in 1..=n_max {
        let c = chi_at(&period, k) as i64;
        if c != 0 {
            let mut m = k;
            while m <= n_max {
                r[m as usize] += c;
                m += k;
            }
        }
    }
    Ok(r)
}

/// `(1 * chi)(n)` for `n <= n_max`, one `n` at a time from its divisors.
pub fn convolution_direct(d: u64, n_max: u64) -> Result<Vec<i64>> {
    let period = character_period(d)?;
    let mut r = vec![0i64; n_max as usize + 1];
    for n in 1..=n_max {
        let mut acc = 0i64;
        let mut k = 1;
        while k * k <= n {
            if n % k == 0 {
                acc += chi_at(&period, k) as i64;
                if k * k != n {
                    acc += chi_at(&period, n / k) as i64;
                }
            }
            k += 1;
        }
        r[n as usize] = acc;
    }
    Ok(r)
}

/// The weighted sums from a table of `(1 * chi)(n)`, `n <= floor(x)`.
pub fn weighted_sums_from_table(table: &[i64], x: f64, lv: &LValues) -> WeightedSums {
    let (mut a, mut b, mut c) = (0i64, 0i128, 0.0f64);
    for (n, &r) in table.iter().enumerate().skip(1) {
        a += r;
        b += n as i128 * r as i128;
        c += r as f64 / n as f64;
    }
    WeightedSums {
        sigma0: a as f64 - b as f64 / x,
        sigma1: c - a as f64 / x,
        main0: 0.5 * x * lv.l1,
        main1: lv.l1 * (x.ln() + EULER_GAMMA - 1.0) + lv.l1_prime,
    }
}

pub fn weighted_dirichlet_sums(d: u64, x: f64) -> Result<WeightedSums> {
    if !(x >= 3.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("x = {x} must be >= 3")));
    }
    let table = convolution_table(d, x.floor() as u64)?;
    Ok(weighted_sums_from_table(&table, x, &l_values(d)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorFunctionals {
    pub x: f64,
    pub e0: f64,
    pub e1: f64,
    pub argmin_y0: f64,
    pub argmin_y1: f64,
}

/// The tail integrals `I0(y) = int_y^inf |S(t)| / t^2` and
/// `I1(y) = int_y^inf |S(t)| ln t / t^2` on a fixed set of points, each an
/// upper bound: exact up to a multiple `T` of `D` and certified beyond.
#[derive(Debug, Clone)]
pub struct TailIntegrals {
    pub d: u64,
    /// Sorted evaluation points.
    pub points: Vec<f64>,
    pub s_abs: Vec<u64>,
    pub i0: Vec<f64>,
    pub i1: Vec<f64>,
    pub cutoff: u64,
}

fn antiderivative_log(t: f64) -> f64 {
    // d/dt [-(ln t + 1) / t] = ln t / t^2
    -(t.ln() + 1.0) / t
}

impl TailIntegrals {
    pub fn new(period: &[i8], mut points: Vec<f64>) -> Self {
        let d = period.len() as u64;
        points.sort_by(f64::total_cmp);
        let y_max = points.last().copied().unwrap_or(1.0).max(1.0);
        let ln_d = (d as f64).ln();
        let floor = d * (ln_d * ln_d).ceil().max(1.0) as u64;
        let reach = (y_max.floor() as u64 + 1).max(floor);
        let cutoff = (reach + 1).div_ceil(d) * d;

        // Forward pass: cumulative integrals from 1, sampled at the points.
        let mut cum0 = vec![0.0; points.len()];
        let mut cum1 = vec![0.0; points.len()];
        let mut s_abs = vec![0u64; points.len()];
        let (mut acc0, mut acc1) = (0.0f64, 0.0f64);
        let mut s = 0i64;
        let mut next = 0usize;
        let mut s_abs_sum = 0u64; // sum of |S(k)| over one period
        for n in 1..cutoff {
            s += chi_at(period, n) as i64;
            let sa = s.unsigned_abs();
            if n < d {
                s_abs_sum += sa;
            }
            let (lo, hi) = (n as f64, (n + 1) as f64);
            while next < points.len() && points[next] < hi {
                let y = points[next].max(lo);
                cum0[next] = acc0 + sa as f64 * (1.0 / lo - 1.0 / y);
                cum1[next] = acc1 + sa as f64 * (antiderivative_log(y) - antiderivative_log(lo));
                s_abs[next] = sa;
                next += 1;
            }
            if sa != 0 {
                acc0 += sa as f64 * (1.0 / lo - 1.0 / hi);
                acc1 += sa as f64 * (antiderivative_log(hi) - antiderivative_log(lo));
            }
        }
        let t = cutoff as f64;
        let p = s_abs_sum as f64;
        let mean = p / d as f64;
        let cert0 = p / (t * t) + mean / t;
        let cert1 = p * ((t + d as f64).ln() + 0.5) / (t * t) + mean * (t.ln() + 1.0) / t;
        let i0 = cum0.iter().map(|c| (acc0 - c).max(0.0) + cert0).collect();
        let i1 = cum1.iter().map(|c| (acc1 - c).max(0.0) + cert1).collect();
        TailIntegrals { d, points, s_abs, i0, i1, cutoff }
    }

    /// `E0(x)` and `E1(x)` minimised over the stored points in `[1, x]`.
    pub fn functionals(&self, x: f64) -> ErrorFunctionals {
        let ln_x = x.ln();
        let mut best = ErrorFunctionals { x, e0: f64::INFINITY, e1: f64::INFINITY, argmin_y0: 1.0, argmin_y1: 1.0 };
        for (k, &y) in self.points.iter().enumerate() {
            if y < 1.0 || y > x {
                continue;
            }
            let e0 = y * y / x + self.s_abs[k] as f64 + x * self.i0[k];
            let e1 = y / x + ln_x * self.i1[k];
            if e0 < best.e0 {
                best.e0 = e0;
                best.argmin_y0 = y;
            }
            if e1 < best.e1 {
                best.e1 = e1;
                best.argmin_y1 = y;
            }
        }
        best
    }
}

/// `exp(k ln(1.1) / refine)` for `k >= 0` up to `x`, then `x` itself.
/// Doubling `refine` yields a superset of the points.
pub fn y_grid(x: f64, refine: u32) -> Vec<f64> {
    let step = 1.1f64.ln() / refine as f64;
    let mut grid = Vec::new();
    let mut k = 0u32;
    loop {
        let y = (k as f64 * step).exp();
        if y > x {
            break;
        }
        grid.push(y);
        k += 1;
    }
    if grid.last() != Some(&x) {
        grid.push(x);
    }
    grid
}

pub fn error_functionals(d: u64, x: f64) -> Result<ErrorFunctionals> {
    error_functionals_refined(d, x, 1)
}

/// As [`error_functionals`] on the grid of ratio `1.1^(1/refine)`.
pub fn error_functionals_refined(d: u64, x: f64, refine: u32) -> Result<ErrorFunctionals> {
    if !(x >= 1.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("x = {x} must be >= 1")));
    }
    if refine == 0 {
        return Err(Error::InvalidArgument("grid refinement must be >= 1".into()));
    }
    let period = character_period(d)?;
    Ok(TailIntegrals::new(&period, y_grid(x, refine)).functionals(x))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalDensitySum {
    pub sum: f64,
    pub main: f64,
    pub residual: f64,
}

/// `g(n)` for `n < n_end`, extended completely multiplicatively from
/// `g(p) = (1/p)(1 + chi(p) - chi(p)/p)`.
pub fn completely_multiplicative_g(period: &[i8], n_end: u64) -> Vec<f64> {
    let n_end = n_end as usize;
    let mut g = vec![0.0f64; n_end.max(2)];
    let mut spf = vec![0u32; n_end.max(2)];
    g[1] = 1.0;
    for n in 2..n_end {
        if spf[n] == 0 {
            let mut m = n;
            while m < n_end {
                if spf[m] == 0 {
                    spf[m] = n as u32;
                }
                m += n;
            }
            let p = n as f64;
            let c = chi_at(period, n as u64) as f64;
            g[n] = (1.0 + c - c / p) / p;
        } else {
            let p = spf[n] as usize;
            g[n] = g[p] * g[n / p];
        }
    }
    g.truncate(n_end);
    g
}

pub fn sum_local_densities(f: &Form, z: f64) -> Result<LocalDensitySum> {
    if !f.is_primitive() {
        return Err(Error::NotPrimitive { a: f.a, b: f.b, c: f.c });
    }
    if !(z >= 1.0) || !z.is_finite() {
        return Err(Error::InvalidArgument(format!("z = {z} must be >= 1")));
    }
    let period = character_period(f.d())?;
    // l < z
    let n_end = z.ceil() as u64;
    let sum: f64 = completely_multiplicative_g(&period, n_end).iter().skip(1).sum();
    let lv = l_values_from_period(&period);
    let main = lv.l1 * z.ln() + lv.l1_prime;
    Ok(LocalDensitySum { sum, main, residual: sum - main })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DiscriminantFamily {
    pub q: u64,
    pub members: Vec<u64>,
}

impl DiscriminantFamily {
    pub fn fundamental(&self) -> Vec<u64> {
        self.members.iter().copied().filter(|&d| matches!(fundamental_part(d), Ok((_, 1)))).collect()
    }
}

pub fn family(q: u64) -> Result<DiscriminantFamily> {
    if q < 3 {
        return Err(Error::InvalidArgument(format!("Q = {q} must be >= 3")));
    }
    Ok(DiscriminantFamily { q, members: (3..=q).filter(|&d| is_discriminant(d)).collect() })
}

/// Knobs for the family sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExceptionalGrid {
    /// Number of logarithmically spaced `x` per discriminant.
    pub points: u32,
    /// Lower end `c D^eps`.
    pub c_low: f64,
    /// Upper end `min(D^(2 + eps), x_cap)`.
    pub x_cap: f64,
}

impl Default for ExceptionalGrid {
    fn default() -> Self {
        ExceptionalGrid { points: 12, c_low: 1.0, x_cap: 1.0e6 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DiscriminantVerdict {
    pub d: u64,
    pub violates_e: bool,
    pub violates_l: bool,
    pub log_derivative: f64,
    /// Largest `E0 / x^(7/8 + eps)` over the grid.
    pub worst_e0: f64,
    /// Largest `E1 / x^(-1/8 + eps)` over the grid.
    pub worst_e1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExceptionalReport {
    pub q: u64,
    pub epsilon: f64,
    pub grid: ExceptionalGrid,
    pub total: usize,
    pub violators_e: usize,
    /// Discriminants failing the `E0` inequality alone.
    pub violators_e0: usize,
    /// Discriminants failing the `E1` inequality alone.
    pub violators_e1: usize,
    pub violators_l: usize,
    pub fraction_e: f64,
    pub fraction_l: f64,
    pub verdicts: Vec<DiscriminantVerdict>,
}

pub fn x_grid(d: u64, epsilon: f64, grid: &ExceptionalGrid) -> Vec<f64> {
    let df = d as f64;
    let lo = (grid.c_low * df.powf(epsilon)).max(1.0);
    let hi = df.powf(2.0 + epsilon).min(grid.x_cap).max(lo);
    let n = grid.points.max(2);
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            (lo.ln() + t * (hi.ln() - lo.ln())).exp()
        })
        .collect()
}

pub fn discriminant_verdict(d: u64, epsilon: f64, grid: &ExceptionalGrid) -> Result<DiscriminantVerdict> {
    let period = character_period(d)?;
    let xs = x_grid(d, epsilon, grid);
    let mut points = y_grid(*xs.last().unwrap(), 1);
    points.extend_from_slice(&xs);
    points.sort_by(f64::total_cmp);
    points.dedup();
    let tails = TailIntegrals::new(&period, points);
    let (mut worst_e0, mut worst_e1) = (0.0f64, 0.0f64);
    for &x in &xs {
        let ef = tails.functionals(x);
        worst_e0 = worst_e0.max(ef.e0 / x.powf(0.875 + epsilon));
        worst_e1 = worst_e1.max(ef.e1 / x.powf(-0.125 + epsilon));
    }
    let lv = l_values_from_period(&period);
    let log_derivative = -lv.l1_prime / lv.l1;
    let ll = (d as f64).ln().ln();
    Ok(DiscriminantVerdict {
        d,
        violates_e: worst_e0 > 1.0 || worst_e1 > 1.0,
        violates_l: log_derivative > 10.0 * ll,
        log_derivative,
        worst_e0,
        worst_e1,
    })
}

pub fn average_exceptional_report(q: u64, epsilon: f64) -> Result<ExceptionalReport> {
    average_exceptional_report_with(q, epsilon, ExceptionalGrid::default())
}

pub fn average_exceptional_report_with(q: u64, epsilon: f64, grid: ExceptionalGrid) -> Result<ExceptionalReport> {
    use rayon::prelude::*;
    if q < 100 {
        return Err(Error::InvalidArgument(format!("Q = {q} must be >= 100")));
    }
    if !(epsilon > 0.0 && epsilon < 0.125) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must lie in (0, 1/8)")));
    }
    let fam = family(q)?;
    let verdicts = fam
        .members
        .par_iter()
        .map(|&d| discriminant_verdict(d, epsilon, &grid))
        .collect::<Result<Vec<_>>>()?;
    let total = verdicts.len();
    let violators_e = verdicts.iter().filter(|v| v.violates_e).count();
    let violators_e0 = verdicts.iter().filter(|v| v.worst_e0 > 1.0).count();
    let violators_e1 = verdicts.iter().filter(|v| v.worst_e1 > 1.0).count();
    let violators_l = verdicts.iter().filter(|v| v.violates_l).count();
    Ok(ExceptionalReport {
        q,
        epsilon,
        grid,
        total,
        violators_e,
        violators_e0,
        violators_e1,
        violators_l,
        fraction_e: violators_e as f64 / total as f64,
        fraction_l: violators_l as f64 / total as f64,
        verdicts,
    })
}
