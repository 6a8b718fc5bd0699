// SPDX-License-Identifier: Apache-2.0

//! Exact integer primitives: Kronecker symbols, prime tables, factorization
//! and the small multiplicative functions used throughout the crate.

use crate::error::{Error, Result};

/// Largest integer `r` with `r * r <= n`.
pub fn isqrt(n: u128) -> u128 {
    if n < 2 {
        return n;
    }
    let mut r = (n as f64).sqrt() as u128;
    // The float estimate is within a few units; walk it onto the exact root.
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

pub fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

/// (m/2) for odd m, indexed by m mod 8.
const KRONECKER_TWO: [i8; 8] = [0, 1, 0, -1, 0, -1, 0, 1];

/// The Kronecker symbol (m/n), extended to all integers n.
///
/// Uses the binary reciprocity algorithm, with (m/2) read off from m mod 8
/// and (m/-1) = sign(m).
pub fn kronecker(m: i64, n: i64) -> Result<i8> {
    if m == 0 && n == 0 {
        return Err(Error::KroneckerZeroZero);
    }
    let mut a = m as i128;
    let mut b = n as i128;
    if b == 0 {
        return Ok(if a.abs() == 1 { 1 } else { 0 });
    }
    if a % 2 == 0 && b % 2 == 0 {
        return Ok(0);
    }
    let v = b.trailing_zeros();
    b >>= v;
    let mut k: i8 = if v % 2 == 0 { 1 } else { KRONECKER_TWO[(a & 7) as usize] };
    if b < 0 {
        b = -b;
        if a < 0 {
            k = -k;
        }
    }
    loop {
        if a == 0 {
            return Ok(if b > 1 { 0 } else { k });
        }
        let v = a.trailing_zeros();
        a >>= v;
        if v % 2 == 1 {
            k *= KRONECKER_TWO[(b & 7) as usize];
        }
        if a & b & 2 != 0 {
            k = -k;
        }
        let r = a.abs();
        a = b % r;
        b = r;
    }
}

/// Bit-packed primality table for `0..=limit` plus the ascending prime list.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    bits: Vec<u64>,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// Panics if `n` exceeds the table limit.
    #[inline]
    pub fn is_prime(&self, n: u64) -> bool {
        assert!(n <= self.limit, "{n} is beyond the prime table limit {}", self.limit);
        self.bits[(n >> 6) as usize] >> (n & 63) & 1 == 1
    }

    /// Primality bitmap: bit `n & 63` of word `n >> 6` is set iff `n` is prime.
    pub fn bits(&self) -> &[u64] {
        &self.bits
    }

    /// Number of primes `<= n`, for `n` within the table.
    pub fn pi(&self, n: u64) -> usize {
        self.primes.partition_point(|&p| p <= n)
    }

    /// Trial division against the table, continuing past the table limit
    /// with odd candidates when `n` is larger than `limit^2`.
    pub fn factorize(&self, n: u64) -> Factorization {
        assert!(n >= 1, "factorize requires n >= 1");
        let mut rest = n;
        let mut factors = Vec::new();
        let mut push = |p: u64, rest: &mut u64| {
            let mut e = 0;
            while *rest % p == 0 {
                *rest /= p;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
        };
        let mut exhausted = true;
        for &p in &self.primes {
            if p.saturating_mul(p) > rest {
                exhausted = false;
                break;
            }
            push(p, &mut rest);
        }
        if exhausted {
            let mut d = (self.limit + 1) | 1;
            while d.saturating_mul(d) <= rest {
                push(d, &mut rest);
                d += 2;
            }
        }
        if rest > 1 {
            factors.push((rest, 1));
        }
        Factorization { n, factors }
    }
}

/// Sieve of Eratosthenes up to `limit`.
pub fn sieve_primes(limit: u64) -> Result<PrimeTable> {
    if limit < 2 {
        return Err(Error::InvalidArgument(format!("prime table limit {limit} < 2")));
    }
    let words = (limit / 64 + 1) as usize;
    let mut bits = vec![!0u64; words];
    let clear = |bits: &mut [u64], n: u64| bits[(n >> 6) as usize] &= !(1u64 << (n & 63));
    clear(&mut bits, 0);
    clear(&mut bits, 1);
    let mut p = 2u64;
    while p * p <= limit {
        if bits[(p >> 6) as usize] >> (p & 63) & 1 == 1 {
            let step = if p == 2 { 2 } else { 2 * p };
            let mut m = p * p;
            while m <= limit {
                clear(&mut bits, m);
                m += step;
            }
        }
        p += 1;
    }
    // Bits above the limit in the final word stay set; mask them off.
    let tail = (limit + 1) % 64;
    if tail != 0 {
        let last = bits.len() - 1;
        bits[last] &= (1u64 << tail) - 1;
    }
    let mut primes = Vec::with_capacity(estimate_pi(limit));
    for (w, &word) in bits.iter().enumerate() {
        let mut word = word;
        while word != 0 {
            let t = word.trailing_zeros() as u64;
            primes.push(w as u64 * 64 + t);
            word &= word - 1;
        }
    }
    Ok(PrimeTable { limit, bits, primes })
}

fn estimate_pi(x: u64) -> usize {
    let xf = x.max(3) as f64;
    (1.3 * xf / xf.ln()) as usize + 16
}

/// Prime factorization with strictly ascending primes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub n: u64,
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    /// All divisors in ascending order.
    pub fn divisors(&self) -> Vec<u64> {
        let mut divs = vec![1u64];
        for &(p, e) in &self.factors {
            let len = divs.len();
            let mut pk = 1;
            for _ in 0..e {
                pk *= p;
                for i in 0..len {
                    divs.push(divs[i] * pk);
                }
            }
        }
        divs.sort_unstable();
        divs
    }
}

/// Factorization by trial division; builds a table up to `sqrt(n)`.
pub fn factorize(n: u64) -> Factorization {
    let mut rest = n;
    let mut factors = Vec::new();
    let mut d = 2u64;
    while rest > 1 && d.saturating_mul(d) <= rest {
        if rest % d == 0 {
            let mut e = 0;
            while rest % d == 0 {
                rest /= d;
                e += 1;
            }
            factors.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if rest > 1 {
        factors.push((rest, 1));
    }
    Factorization { n, factors }
}

/// Values of the standard multiplicative functions at one argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MultiplicativeValues {
    pub mu: i8,
    pub phi: u64,
    pub tau: u64,
    pub tau3: u64,
    pub omega: u32,
    pub big_omega: u32,
    pub squarefree: bool,
}

impl From<&Factorization> for MultiplicativeValues {
    fn from(f: &Factorization) -> Self {
        let squarefree = f.is_squarefree();
        let omega = f.factors.len() as u32;
        let mu = if !squarefree {
            0
        } else if omega % 2 == 0 {
            1
        } else {
            -1
        };
        let mut phi = 1u64;
        let mut tau = 1u64;
        let mut tau3 = 1u64;
        for &(p, e) in &f.factors {
            phi *= (p - 1) * p.pow(e - 1);
            tau *= e as u64 + 1;
            // tau_3(p^e) = C(e + 2, 2)
            tau3 *= (e as u64 + 1) * (e as u64 + 2) / 2;
        }
        MultiplicativeValues { mu, phi, tau, tau3, omega, big_omega: f.big_omega(), squarefree }
    }
}

pub fn mult_functions(n: u64) -> MultiplicativeValues {
    MultiplicativeValues::from(&factorize(n))
}

/// Squarefree test by trial division.
pub fn is_squarefree(n: u64) -> bool {
    n >= 1 && factorize(n).is_squarefree()
}

/// Divisors of a squarefree integer given its prime list.
pub fn squarefree_divisors(primes: &[u64]) -> Vec<u64> {
    let mut divs = vec![1u64];
    for &p in primes {
        let len = divs.len();
        for i in 0..len {
            divs.push(divs[i] * p);
        }
    }
    divs.sort_unstable();
    divs
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for all 64-bit inputs (first twelve prime bases).
pub fn is_prime_u64(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Omega(n) (prime factors with multiplicity) for every `n <= limit`,
/// via a smallest-prime-factor sieve.
pub fn big_omega_table(limit: u64) -> Vec<u8> {
    let n = limit as usize + 1;
    let mut spf = vec![0u32; n];
    for i in 2..n {
        if spf[i] == 0 {
            let mut j = i;
            while j < n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    let mut table = vec![0u8; n];
    for i in 2..n {
        table[i] = table[i / spf[i] as usize] + 1;
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-4, 3).unwrap(), -1);
        assert_eq!(kronecker(-3, 7).unwrap(), 1);
        assert_eq!(kronecker(-4, 2).unwrap(), 0);
        assert_eq!(kronecker(0, 0), Err(Error::KroneckerZeroZero));
        assert_eq!(kronecker(5, 0).unwrap(), 0);
        assert_eq!(kronecker(-1, 0).unwrap(), 1);
        // (m/2) by m mod 8
        assert_eq!(kronecker(-7, 2).unwrap(), 1);
        assert_eq!(kronecker(-3, 2).unwrap(), -1);
        // (m/-1) sign rule
        assert_eq!(kronecker(-3, -1).unwrap(), -1);
        assert_eq!(kronecker(3, -1).unwrap(), 1);
    }

    #[test]
    fn kronecker_matches_euler_criterion_for_odd_primes() {
        let table = sieve_primes(200).unwrap();
        for &p in table.primes().iter().skip(1) {
            for m in -60i64..60 {
                let r = m.rem_euclid(p as i64) as u64;
                let euler = pow_mod(r, (p - 1) / 2, p);
                let expect = match euler {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                };
                assert_eq!(kronecker(m, p as i64).unwrap(), expect, "m={m} p={p}");
            }
        }
    }

    #[test]
    fn sieve_examples() {
        assert_eq!(sieve_primes(10).unwrap().primes(), &[2, 3, 5, 7]);
        assert_eq!(sieve_primes(2).unwrap().primes(), &[2]);
        assert_eq!(sieve_primes(100).unwrap().primes().len(), 25);
        assert!(sieve_primes(1).is_err());
        let t = sieve_primes(64).unwrap();
        assert!(t.is_prime(61) && !t.is_prime(63) && !t.is_prime(64));
        assert_eq!(t.pi(64), 18);
    }

    #[test]
    fn factorize_examples() {
        assert_eq!(factorize(12).factors, vec![(2, 2), (3, 1)]);
        assert!(factorize(1).factors.is_empty());
        assert_eq!(
            factorize(9699690).factors,
            vec![(2, 1), (3, 1), (5, 1), (7, 1), (11, 1), (13, 1), (17, 1), (19, 1)]
        );
        // prime cofactor beyond the table
        let small = sieve_primes(10).unwrap();
        assert_eq!(small.factorize(2 * 1_000_003).factors, vec![(2, 1), (1_000_003, 1)]);
        assert_eq!(small.factorize(169).factors, vec![(13, 2)]);
    }

    #[test]
    fn multiplicative_examples() {
        let one = mult_functions(1);
        assert_eq!((one.mu, one.phi, one.tau, one.tau3), (1, 1, 1, 1));
        let twelve = mult_functions(12);
        assert_eq!((twelve.mu, twelve.phi, twelve.tau, twelve.tau3), (0, 4, 6, 18));
        let thirty = mult_functions(30);
        assert_eq!(thirty.mu, -1);
        assert!(thirty.squarefree);
        assert_eq!((thirty.omega, thirty.big_omega), (3, 3));
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let t = sieve_primes(100_000).unwrap();
        for n in 0..=100_000u64 {
            assert_eq!(is_prime_u64(n), t.is_prime(n), "n={n}");
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557));
        // strong pseudoprime to bases 2..=37 products; composite
        assert!(!is_prime_u64(3_825_123_056_546_413_051));
    }

    #[test]
    fn omega_table_matches_factorization() {
        let table = big_omega_table(5000);
        for n in 1..=5000u64 {
            assert_eq!(table[n as usize] as u32, factorize(n).big_omega());
        }
    }

    #[test]
    fn isqrt_exact() {
        for n in 0u128..5000 {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
        let big = (1u128 << 100) + 12345;
        let r = isqrt(big);
        assert!(r * r <= big && (r + 1) * (r + 1) > big);
    }
}
