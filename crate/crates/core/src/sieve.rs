// SPDX-License-Identifier: Apache-2.0

//! Prime counts `pi_f`, the Selberg upper bound sieve on values of a form in
//! a short interval, the explicit theorem bounds it feeds, and almost-prime
//! counts.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::arith::{big_omega_table, is_prime_u64, mult_functions, sieve_primes, PrimeTable};
use crate::character::{character_period, completely_multiplicative_g, l_values};
use crate::error::{Error, Result};
use crate::forms::{delta_f, enumerate_class_set, unit_count, Form};
use crate::lattice::{count_congruence, local_density_g, EllipseWindow};

fn check_x(x: f64) -> Result<()> {
    if !(0.0..9.0e15).contains(&x) {
        return Err(Error::InvalidArgument(format!("x = {x} out of range")));
    }
    Ok(())
}

/// `pi_f(x)` using a prime table that covers `floor(x)`.
pub fn pi_f_with(table: &PrimeTable, f: &Form, x: f64) -> Result<u64> {
    if !f.is_primitive() {
        return Err(Error::NotPrimitive { a: f.a, b: f.b, c: f.c });
    }
    let window = EllipseWindow::new(*f, x)?;
    if window.limit > table.limit() {
        return Err(Error::InvalidArgument(format!(
            "prime table limit {} is below x = {}",
            table.limit(),
            window.limit
        )));
    }
    let rep = window.represented_bitmap();
    Ok(rep.iter().zip(table.bits()).map(|(r, p)| (r & p).count_ones() as u64).sum())
}

/// `pi_f(x)`: primes `p <= x` with `p = f(u, v)` for some `(u, v)`.
pub fn pi_f(f: &Form, x: f64) -> Result<u64> {
    check_x(x)?;
    let limit = (x.floor() as u64).max(2);
    if limit > 50_000_000 {
        return pi_f_miller_rabin(f, x);
    }
    pi_f_with(&sieve_primes(limit)?, f, x)
}

/// `pi_f(x)` testing each represented value by Miller-Rabin; no table.
pub fn pi_f_miller_rabin(f: &Form, x: f64) -> Result<u64> {
    if !f.is_primitive() {
        return Err(Error::NotPrimitive { a: f.a, b: f.b, c: f.c });
    }
    let rep = EllipseWindow::new(*f, x)?.represented_bitmap();
    let mut count = 0;
    for (w, &word) in rep.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let n = (w as u64) << 6 | bits.trailing_zeros() as u64;
            count += is_prime_u64(n) as u64;
            bits &= bits - 1;
        }
    }
    Ok(count)
}

/// `pi_f(x) - pi_f(x - y)`.
pub fn pi_f_interval_with(table: &PrimeTable, f: &Form, x: f64, y: f64) -> Result<u64> {
    if !(y >= 0.0) || y > x {
        return Err(Error::InvalidArgument(format!("need 0 <= y <= x, got y = {y}, x = {x}")));
    }
    Ok(pi_f_with(table, f, x)? - pi_f_with(table, f, x - y)?)
}

/// Bit `n` set iff `n <= limit` has no prime factor `<= z`.
pub fn rough_bitmap(limit: u64, z: f64) -> Vec<u64> {
    let n = limit as usize + 1;
    let mut bits = vec![u64::MAX; n / 64 + 1];
    bits[0] &= !1;
    let z_int = if z >= 2.0 { z.floor() as u64 } else { 1 };
    let primes = if z_int >= 2 { sieve_primes(z_int).expect("z >= 2").primes().to_vec() } else { Vec::new() };
    for p in primes {
        let mut m = p as usize;
        while m < n {
            bits[m >> 6] &= !(1 << (m & 63));
            m += p as usize;
        }
    }
    bits
}

/// Lattice points (with multiplicity) with `x - y < f(u, v) <= x` and
/// `f(u, v)` free of primes `<= z`.
pub fn sifted_interval_count(f: &Form, x: f64, y: f64, z: f64) -> Result<u64> {
    check_x(x)?;
    if !(y >= 0.0) || y > x {
        return Err(Error::InvalidArgument(format!("need 0 <= y <= x, got y = {y}, x = {x}")));
    }
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::InvalidArgument(format!("z = {z} must be positive")));
    }
    let window = EllipseWindow::new(*f, x)?;
    let lower = (x - y).floor() as u64;
    let rough = rough_bitmap(window.limit, z);
    let mut count = 0u64;
    window.for_each_value(|n| {
        if n > lower && rough[(n >> 6) as usize] >> (n & 63) & 1 == 1 {
            count += 1;
        }
    });
    Ok(count)
}

/// `z = (a / (Dx))^(1/4) y^(1/2) (log y)^(-7) + 1`.
pub fn sifting_variable(f: &Form, x: f64, y: f64) -> f64 {
    (f.a as f64 / (f.d() as f64 * x)).powf(0.25) * y.sqrt() * y.ln().powi(-7) + 1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SieveParams {
    pub form: Form,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Level of distribution `z^2`.
    pub level: f64,
    pub phi: f64,
    pub epsilon: f64,
}

impl SieveParams {
    /// Parameters with `z` from [`sifting_variable`].
    pub fn new(form: Form, x: f64, y: f64, phi: f64, epsilon: f64) -> Result<Self> {
        if !(y > 1.0) {
            return Err(Error::InvalidArgument(format!("y = {y} must exceed 1")));
        }
        let z = sifting_variable(&form, x, y);
        Ok(SieveParams { form, x, y, z, level: z * z, phi, epsilon })
    }

    pub fn with_z(mut self, z: f64) -> Self {
        self.z = z;
        self.level = z * z;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TheoremBounds {
    pub theta: f64,
    pub theta_prime: f64,
    pub rhs_11: f64,
    pub rhs_13: f64,
    /// `x >= (D^(1 + 4 phi) / a)^(1 + eps)`
    pub range_ok_11: bool,
    /// `(D^(1 + 4 phi) / a)^(1/2 + eps) x^(1/2 + eps) <= y <= x`
    pub range_ok_13: bool,
}

pub fn check_phi(phi: f64) -> Result<()> {
    if phi == 0.0 || phi == 0.25 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!("phi = {phi} must be 0 or 0.25")))
    }
}

fn check_reduced_primitive(f: &Form) -> Result<()> {
    if !f.is_reduced() {
        return Err(Error::NotReduced { a: f.a, b: f.b, c: f.c });
    }
    if !f.is_primitive() {
        return Err(Error::NotPrimitive { a: f.a, b: f.b, c: f.c });
    }
    Ok(())
}

/// Explicit right-hand sides of the uniform and short-interval bounds.
/// `h` is the class number of the discriminant of `f`.
pub fn theorem_rhs_with_h(f: &Form, h: usize, x: f64, y: f64, phi: f64, epsilon: f64) -> Result<TheoremBounds> {
    check_reduced_primitive(f)?;
    check_phi(phi)?;
    if !(epsilon > 0.0) {
        return Err(Error::InvalidArgument(format!("epsilon = {epsilon} must be positive")));
    }
    if !(x > 1.0 && y > 1.0 && y <= x) {
        return Err(Error::InvalidArgument(format!("need 1 < y <= x, got x = {x}, y = {y}")));
    }
    let (ln_d, ln_a, ln_x, ln_y) = ((f.d() as f64).ln(), (f.a as f64).ln(), x.ln(), y.ln());
    let theta = (1.0 + 2.0 * phi + epsilon / 2.0) * ln_d / ln_x - ln_a / ln_x;
    let theta_prime = ln_x / (2.0 * ln_y) + (0.5 + phi + epsilon / 4.0) * ln_d / ln_y - ln_a / (2.0 * ln_y);
    if theta >= 1.0 || theta_prime >= 1.0 {
        return Err(Error::VacuousBound(format!("theta = {theta}, theta' = {theta_prime}")));
    }
    let delta = delta_f(f)?;
    let h = h as f64;
    let base = ln_d * (1.0 + 4.0 * phi) - ln_a;
    Ok(TheoremBounds {
        theta,
        theta_prime,
        rhs_11: 4.0 / (1.0 - theta) * delta * x / (h * ln_x),
        rhs_13: 2.0 / (1.0 - theta_prime) * delta * y / (h * ln_y),
        range_ok_11: ln_x >= base * (1.0 + epsilon) * (1.0 - 1e-12),
        range_ok_13: y <= x && ln_y >= (0.5 + epsilon) * (base + ln_x) * (1.0 - 1e-12),
    })
}

pub fn theorem_rhs(f: &Form, x: f64, y: f64, phi: f64, epsilon: f64) -> Result<TheoremBounds> {
    let h = enumerate_class_set(f.d())?.h;
    theorem_rhs_with_h(f, h, x, y, phi, epsilon)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SieveReport {
    pub params: SieveParams,
    /// `J = sum_{l | P(z), l < z} h(l)`
    pub j: f64,
    /// Two-branch normalisation of `sum_{l < z} g(l)`.
    pub script_j: f64,
    /// `L(1, chi) < (log y)^(-2)`; never expected at this scale.
    pub script_j_anomaly: bool,
    /// `X / J` with `X = 2 pi y / sqrt(D)`.
    pub main: f64,
    /// `X sum_l lambda_l g(l)`, the same quantity from the weights.
    pub main_from_weights: f64,
    /// `sum_{l | P, l < z^2} |r_l| tau_3(l)`
    pub remainder_majorized: f64,
    /// `sum_l lambda_l r_l` with the computed weights.
    pub remainder_true: f64,
    /// `main + remainder_majorized`, rounded outward
    pub upper_bound: f64,
    /// `sum_l lambda_l |A_l|` over the interval, which is `main_from_weights + remainder_true`.
    pub upper_bound_true: f64,
    /// `max_l |lambda_l| / tau_3(l)`; at most 1.
    pub lambda_ratio: f64,
    pub moduli: usize,
    pub exact_interval_count: u64,
}

fn primes_up_to(z: f64) -> Vec<u64> {
    if z < 2.0 {
        return Vec::new();
    }
    sieve_primes(z.floor() as u64).expect("z >= 2").primes().to_vec()
}

/// Squarefree products of `primes` below `bound`, ascending, with their
/// prime lists.
fn squarefree_below(primes: &[u64], bound: f64) -> Vec<(u64, Vec<u64>)> {
    fn walk(primes: &[u64], start: usize, cur: u64, fac: &mut Vec<u64>, bound: f64, out: &mut Vec<(u64, Vec<u64>)>) {
        out.push((cur, fac.clone()));
        for i in start..primes.len() {
            let next = cur * primes[i];
            if next as f64 >= bound {
                break;
            }
            fac.push(primes[i]);
            walk(primes, i + 1, next, fac, bound, out);
            fac.pop();
        }
    }
    let mut out = Vec::new();
    if bound > 1.0 {
        walk(primes, 0, 1, &mut Vec::new(), bound, &mut out);
    }
    out.sort_unstable();
    out
}

/// Selberg's upper bound sieve for lattice points with `x - y < f <= x`
/// and `f` coprime to `P(z)`, with every remainder computed exactly.
pub fn selberg_upper_bound(params: &SieveParams) -> Result<SieveReport> {
    let SieveParams { form: f, x, y, z, .. } = *params;
    check_reduced_primitive(&f)?;
    check_x(x)?;
    let (a, d) = (f.a as f64, f.d() as f64);
    if x < d / a {
        return Err(Error::InvalidArgument(format!("need x >= D/a = {}", d / a)));
    }
    if !(y <= x && y >= (a * x).sqrt() && y > 1.0) {
        return Err(Error::InvalidArgument(format!("need sqrt(ax) <= y <= x, got y = {y}")));
    }
    if !(z >= 1.0) || !z.is_finite() {
        return Err(Error::InvalidArgument(format!("z = {z} must be >= 1")));
    }

    let primes = primes_up_to(z);
    let g_p: BTreeMap<u64, f64> = primes
        .iter()
        .map(|&p| {
            let g = local_density_g(&f, p)?;
            Ok((p, *g.numer() as f64 / *g.denom() as f64))
        })
        .collect::<Result<_>>()?;
    let g_of = |fac: &[u64]| fac.iter().map(|p| g_p[p]).product::<f64>();
    let h_of = |fac: &[u64]| fac.iter().map(|p| g_p[p] / (1.0 - g_p[p])).product::<f64>();

    let sieve_moduli = squarefree_below(&primes, z);
    let h_vals: Vec<f64> = sieve_moduli.iter().map(|(_, fac)| h_of(fac)).collect();
    let j: f64 = h_vals.iter().sum();
    let rho: Vec<(u64, f64)> = sieve_moduli
        .iter()
        .map(|(dd, fac)| {
            let j_d: f64 = sieve_moduli
                .iter()
                .zip(&h_vals)
                .filter(|((m, _), _)| (*m as f64) < z / *dd as f64 && num_integer::gcd(*m, *dd) == 1)
                .map(|(_, hv)| hv)
                .sum();
            let sign = if fac.len() % 2 == 0 { 1.0 } else { -1.0 };
            let inv: f64 = fac.iter().map(|p| 1.0 / (1.0 - g_p[p])).product();
            (*dd, sign * inv * j_d / j)
        })
        .collect();
    let mut lambda: BTreeMap<u64, f64> = BTreeMap::new();
    for &(d1, r1) in &rho {
        for &(d2, r2) in &rho {
            let l = d1 / num_integer::gcd(d1, d2) * d2;
            *lambda.entry(l).or_insert(0.0) += r1 * r2;
        }
    }

    let big_x = 2.0 * PI * y / d.sqrt();
    let outer = EllipseWindow::new(f, x)?;
    let inner = EllipseWindow::new(f, x - y)?;
    let mut remainder_majorized = 0.0;
    let mut remainder_true = 0.0;
    let mut weighted_density = 0.0;
    let mut weighted_count = 0.0;
    let mut weighted_count_abs = 0.0;
    let mut lambda_ratio = 0.0f64;
    let level_moduli = squarefree_below(&primes, z * z);
    for (l, fac) in &level_moduli {
        let count = count_congruence(&outer, *l)?.a_ell - count_congruence(&inner, *l)?.a_ell;
        let g = g_of(fac);
        let r = count as f64 - g * big_x;
        let tau3 = mult_functions(*l).tau3 as f64;
        remainder_majorized += r.abs() * tau3;
        if let Some(&lam) = lambda.get(l) {
            remainder_true += lam * r;
            weighted_density += lam * g;
            weighted_count += lam * count as f64;
            weighted_count_abs += lam.abs() * count as f64;
            lambda_ratio = lambda_ratio.max(lam.abs() / tau3);
        }
    }

    let main = big_x / j;
    // Both bounds are rounded outward so that cancellation in floating point
    // cannot carry them below an exact count they equal in exact arithmetic.
    let upper_bound = (main + remainder_majorized) * (1.0 + 4.0 * f64::EPSILON);
    let upper_bound_true =
        weighted_count + 16.0 * (level_moduli.len() + rho.len()) as f64 * f64::EPSILON * weighted_count_abs;
    let lv = l_values(f.d())?;
    let ln_y = y.ln();
    let (script_j, script_j_anomaly) = if lv.l1 >= ln_y.powi(-2) {
        let period = character_period(f.d())?;
        let sum_g: f64 = completely_multiplicative_g(&period, z.ceil() as u64).iter().skip(1).sum();
        (sum_g / lv.l1, false)
    } else {
        (ln_y * ln_y, true)
    };

    Ok(SieveReport {
        params: *params,
        j,
        script_j,
        script_j_anomaly,
        main,
        main_from_weights: big_x * weighted_density,
        remainder_majorized,
        remainder_true,
        upper_bound,
        upper_bound_true,
        lambda_ratio,
        moduli: level_moduli.len(),
        exact_interval_count: sifted_interval_count(&f, x, y, z)?,
    })
}

/// Distinct `2 <= n <= x` represented by `f` with `Omega(n) <= k`.
pub fn count_almost_primes(f: &Form, x: f64, k: u32) -> Result<u64> {
    check_x(x)?;
    if k == 0 {
        return Err(Error::InvalidArgument("k must be >= 1".into()));
    }
    let window = EllipseWindow::new(*f, x)?;
    let omega = big_omega_table(window.limit);
    count_almost_primes_with(&window, &omega, k)
}

/// As [`count_almost_primes`] with a precomputed `Omega` table covering `x`.
pub fn count_almost_primes_with(window: &EllipseWindow, omega: &[u8], k: u32) -> Result<u64> {
    if (omega.len() as u64) <= window.limit {
        return Err(Error::InvalidArgument("Omega table too short".into()));
    }
    let rep = window.represented_bitmap();
    let mut count = 0;
    for (w, &word) in rep.iter().enumerate() {
        let mut bits = word;
        while bits != 0 {
            let n = (w << 6) | bits.trailing_zeros() as usize;
            if n >= 2 && omega[n] as u32 <= k {
                count += 1;
            }
            bits &= bits - 1;
        }
    }
    Ok(count)
}

/// `li(2)`
const LI_2: f64 = 1.045_163_780_117_493;

/// `Li(x) = int_2^x dt / log t`, by Ramanujan's series for `li`.
pub fn offset_li(x: f64) -> Result<f64> {
    if !(x >= 2.0) || !x.is_finite() {
        return Err(Error::InvalidArgument(format!("Li(x) needs x >= 2, got {x}")));
    }
    let l = x.ln();
    let mut sum = 0.0;
    let mut term = 1.0; // (-1)^(n-1) l^n / (n! 2^(n-1)), built incrementally
    let mut inner = 0.0; // sum_{k <= (n-1)/2} 1/(2k+1)
    for n in 1..200u32 {
        term *= if n == 1 { l } else { -l / (2.0 * n as f64) };
        if (n - 1) % 2 == 0 {
            inner += 1.0 / n as f64;
        }
        let add = term * inner;
        sum += add;
        if add.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    Ok((crate::character::EULER_GAMMA + l.ln() + x.sqrt() * sum - LI_2).max(0.0))
}

/// `w_{-D}`: every nonzero value is represented a multiple of this many times.
pub fn automorph_count(f: &Form) -> u32 {
    unit_count(f.d())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn form(a: i64, b: i64, c: i64) -> Form {
        Form::new(a, b, c).unwrap()
    }

    #[test]
    fn pi_f_examples() {
        assert_eq!(pi_f(&form(1, 0, 1), 100.0).unwrap(), 12);
        assert_eq!(pi_f(&form(1, 0, 1), 2.0).unwrap(), 1);
        assert_eq!(pi_f(&form(1, 1, 41), 41.0).unwrap(), 1);
        assert_eq!(pi_f_miller_rabin(&form(1, 0, 1), 100.0).unwrap(), 12);
        assert!(pi_f(&form(2, 2, 2), 100.0).is_err());
    }

    #[test]
    fn offset_li_values() {
        assert!((offset_li(100.0).unwrap() - 29.080_977_803_962_1).abs() < 1e-9);
        assert!((offset_li(1e6).unwrap() - (78_627.549_159_462_2 - LI_2)).abs() < 1e-6);
        assert!(offset_li(2.0).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sifted_examples() {
        let f = form(1, 0, 1);
        assert_eq!(sifted_interval_count(&f, 10.0, 10.0, 2.0).unwrap(), 16);
        assert_eq!(sifted_interval_count(&f, 10.0, 0.0, 2.0).unwrap(), 0);
        assert_eq!(sifted_interval_count(&f, 10.0, 10.0, 11.0).unwrap(), 4);
    }

    #[test]
    fn theorem_rhs_examples() {
        let f = form(1, 0, 1);
        // theta = 1/2 reproduces the constant 8
        let d = 4f64;
        let eps = 0.2;
        let x = d.powf((1.0 + 0.5 + eps / 2.0) * 2.0);
        let t = theorem_rhs(&f, x, x, 0.25, eps).unwrap();
        assert!((t.theta - 0.5).abs() < 1e-12);
        assert!((4.0 / (1.0 - t.theta) - 8.0).abs() < 1e-12);
        assert!((t.theta_prime - (1.0 + t.theta) / 2.0).abs() < 1e-12);
        // boundary of the phi = 0 range
        let g = form(2, 1, 3);
        let x = (23.0f64 / 2.0).powf(1.0 + eps);
        assert!(theorem_rhs(&g, x * (1.0 + 1e-12), x, 0.0, eps).unwrap().range_ok_11);
        assert!(matches!(theorem_rhs(&f, 3.0, 3.0, 0.25, eps), Err(Error::VacuousBound(_))));
        assert!(theorem_rhs(&f, 1e6, 1e6, 0.3, eps).is_err());
    }

    #[test]
    fn almost_prime_examples() {
        let f = form(1, 0, 1);
        assert_eq!(count_almost_primes(&f, 10.0, 1).unwrap(), 2);
        let all = EllipseWindow::new(f, 100.0).unwrap().represented_bitmap();
        let represented: u64 = all.iter().map(|w| w.count_ones() as u64).sum();
        // n = 1 is represented but not counted
        assert_eq!(count_almost_primes(&f, 100.0, 7).unwrap(), represented - 1);
        let k2 = count_almost_primes(&f, 100.0, 2).unwrap();
        let brute = (2..=100u64)
            .filter(|&n| crate::lattice::r_f(&f, n) > 0 && crate::arith::factorize(n).big_omega() <= 2)
            .count() as u64;
        assert_eq!(k2, brute);
    }

    #[test]
    fn selberg_degenerate_z() {
        let f = form(1, 0, 1);
        let p = SieveParams::new(f, 1e4, 1e4, 0.25, 0.2).unwrap();
        assert!(p.z < 2.0);
        let r = selberg_upper_bound(&p).unwrap();
        assert_eq!(r.j, 1.0);
        assert!((r.main - 2.0 * PI * 1e4 / 2.0).abs() < 1e-9);
        assert!(r.upper_bound >= r.exact_interval_count as f64);
    }

    #[test]
    fn selberg_with_primes() {
        for (f, z) in [(form(1, 0, 1), 10.0), (form(2, 1, 3), 20.0), (form(1, 1, 6), 7.5)] {
            let p = SieveParams::new(f, 2e4, 1e4, 0.25, 0.2).unwrap().with_z(z);
            let r = selberg_upper_bound(&p).unwrap();
            let sifted = r.exact_interval_count as f64;
            assert!(r.upper_bound_true >= sifted, "{r:?}");
            assert!(r.upper_bound >= r.upper_bound_true - 1e-6);
            assert!(((r.main_from_weights - r.main) / r.main).abs() < 1e-9);
            assert!(r.lambda_ratio <= 1.0 + 1e-12);
            assert!(r.j > 1.0);
        }
    }
}
