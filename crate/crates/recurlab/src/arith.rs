//! Integer arithmetic kernel: deterministic Miller–Rabin primality,
//! factorization (trial division, then Pollard rho for the hard cofactors),
//! prime-power decompositions, and perfect-square tests.
//!
//! All factorization-shaped results are exact. Inputs are limited to
//! `n < 2^63`; larger inputs are rejected rather than risking overflow in
//! the modular arithmetic.

use num_bigint::BigUint;
use once_cell::sync::Lazy;
use std::collections::HashMap;
use std::sync::Mutex;
use thiserror::Error;

/// Hard input ceiling: factorization and Ω are only offered below 2^63.
pub const MAX_INPUT: u64 = 1 << 63;

/// Trial division handles all prime factors up to this bound; anything left
/// is split by Pollard rho.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

const CACHE_CAPACITY: usize = 1 << 18;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ArithError {
    #[error("input must be a positive integer")]
    ZeroOrNegative,
    #[error("input {0} exceeds the 2^63 factorization ceiling")]
    TooLarge(u64),
    #[error("factorization effort budget exhausted for {0}")]
    FactorizationFailure(u64),
    #[error("{0} is not prime")]
    NotPrime(u64),
}

/// A multiset of prime factors: sorted `(prime, multiplicity)` pairs.
/// The empty factorization is the unit 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    /// Ω: number of prime factors counted with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.pairs.iter().map(|&(_, e)| e).sum()
    }

    /// ω: number of distinct prime factors.
    pub fn small_omega(&self) -> u32 {
        self.pairs.len() as u32
    }

    pub fn product(&self) -> u64 {
        self.pairs
            .iter()
            .map(|&(p, e)| p.pow(e))
            .product()
    }

    /// Largest m with m^l dividing the factored value, together with the
    /// l-free cofactor: value = m^l * rest.
    pub fn power_split(&self, l: u32) -> (u64, u64) {
        assert!(l >= 1);
        let mut root = 1u64;
        let mut rest = 1u64;
        for &(p, e) in &self.pairs {
            root *= p.pow(e / l);
            rest *= p.pow(e % l);
        }
        (root, rest)
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
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

/// Deterministic Miller–Rabin, valid for the full u64 range
/// (seven-witness set of Sinclair).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        s += 1;
    }
    'witness: for &a in &[2u64, 325, 9375, 28178, 450775, 9780504, 1795265022] {
        let a = a % n;
        if a == 0 {
            continue;
        }
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

/// Pollard rho (Brent's cycle variant). Returns a nontrivial factor of the
/// odd composite `n`, or None if the iteration budget runs out.
fn pollard_rho(n: u64) -> Option<u64> {
    debug_assert!(n > 3 && n & 1 == 1 && !is_prime(n));
    for c in 1..64u64 {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let mut x = 2u64;
        let mut y = 2u64;
        let mut d = 1u64;
        let mut count = 0u64;
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = gcd(x.abs_diff(y), n);
            count += 1;
            if count > 1 << 22 {
                break;
            }
        }
        if d != n && d != 1 {
            return Some(d);
        }
    }
    None
}

static FACTOR_CACHE: Lazy<Mutex<HashMap<u64, Factorization>>> =
    Lazy::new(|| Mutex::new(HashMap::new()));

/// Factor `n` exactly. 1 factors into the empty product. Values at or above
/// 2^63 are rejected; a pathological rho failure inside the budget reports
/// `FactorizationFailure`.
pub fn factorize(n: u64) -> Result<Factorization, ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroOrNegative);
    }
    if n >= MAX_INPUT {
        return Err(ArithError::TooLarge(n));
    }
    if n == 1 {
        return Ok(Factorization { pairs: Vec::new() });
    }
    if let Some(hit) = FACTOR_CACHE.lock().unwrap().get(&n) {
        return Ok(hit.clone());
    }
    let mut pairs: Vec<(u64, u32)> = Vec::new();
    let mut m = n;
    for p in std::iter::once(2u64).chain((3..).step_by(2)) {
        if p.saturating_mul(p) > m || p > TRIAL_DIVISION_BOUND {
            break;
        }
        if m % p == 0 {
            let mut e = 0u32;
            while m % p == 0 {
                m /= p;
                e += 1;
            }
            pairs.push((p, e));
        }
    }
    // Whatever survives trial division is 1, a prime, or a product of
    // primes all above the trial bound; split it recursively with rho.
    let mut stack = vec![m];
    let mut hard: Vec<u64> = Vec::new();
    while let Some(v) = stack.pop() {
        if v == 1 {
            continue;
        }
        if is_prime(v) {
            hard.push(v);
            continue;
        }
        let d = pollard_rho(v).ok_or(ArithError::FactorizationFailure(n))?;
        stack.push(d);
        stack.push(v / d);
    }
    hard.sort_unstable();
    for p in hard {
        if let Some(last) = pairs.last_mut() {
            if last.0 == p {
                last.1 += 1;
                continue;
            }
        }
        pairs.push((p, 1));
    }
    pairs.sort_unstable();
    let fact = Factorization { pairs };
    debug_assert_eq!(fact.product(), n);
    let mut cache = FACTOR_CACHE.lock().unwrap();
    if cache.len() < CACHE_CAPACITY {
        cache.insert(n, fact.clone());
    }
    Ok(fact)
}

/// Ω(n): prime factors with multiplicity.
pub fn big_omega(n: u64) -> Result<u32, ArithError> {
    Ok(factorize(n)?.big_omega())
}

/// Split n = p^u · v with p ∤ v; requires p prime.
pub fn p_parts(n: u64, p: u64) -> Result<(u32, u64), ArithError> {
    if n == 0 {
        return Err(ArithError::ZeroOrNegative);
    }
    if !is_prime(p) {
        return Err(ArithError::NotPrime(p));
    }
    let mut u = 0u32;
    let mut v = n;
    while v % p == 0 {
        v /= p;
        u += 1;
    }
    Ok((u, v))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn is_square(n: u64) -> bool {
    let r = n.isqrt();
    r * r == n
}

pub fn is_square_big(n: &BigUint) -> bool {
    let r = n.sqrt();
    &(&r * &r) == n
}

/// Exact integer l-th root, if one exists.
pub fn nth_root_exact(n: u64, l: u32) -> Option<u64> {
    if l == 0 {
        return None;
    }
    if n <= 1 || l == 1 {
        return Some(n);
    }
    let mut r = (n as f64).powf(1.0 / l as f64).round() as u64;
    while r > 1 && r.checked_pow(l).map_or(true, |v| v > n) {
        r -= 1;
    }
    while r.checked_pow(l).map_or(false, |v| v < n) {
        r += 1;
    }
    if r.checked_pow(l) == Some(n) {
        Some(r)
    } else {
        None
    }
}

/// Primes in [lo, hi] by a segmented sieve over odd candidates.
pub fn primes_in_range(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 || hi < lo {
        return Vec::new();
    }
    let lo = lo.max(2);
    let mut out = Vec::new();
    if lo <= 2 {
        out.push(2);
    }
    let mut n = if lo % 2 == 0 { lo + 1 } else { lo };
    while n <= hi {
        if is_prime(n) {
            out.push(n);
        }
        n += 2;
    }
    out
}

/// Smallest prime strictly greater than n.
pub fn next_prime(n: u64) -> u64 {
    let mut m = n + 1;
    loop {
        if is_prime(m) {
            return m;
        }
        m += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: factorization by naive trial division only.
    fn naive_factor(mut n: u64) -> Vec<(u64, u32)> {
        let mut out = Vec::new();
        let mut p = 2u64;
        while p * p <= n {
            if n % p == 0 {
                let mut e = 0;
                while n % p == 0 {
                    n /= p;
                    e += 1;
                }
                out.push((p, e));
            }
            p += 1;
        }
        if n > 1 {
            out.push((n, 1));
        }
        out
    }

    #[test]
    fn factorize_matches_naive_oracle() {
        for n in 1..=2000u64 {
            assert_eq!(factorize(n).unwrap().pairs(), naive_factor(n).as_slice());
        }
        for &n in &[
            2u64 * 3 * 5 * 7 * 11 * 13,
            1_000_003,
            999_999_937,
            2_147_483_647,
            600_851_475_143,
        ] {
            assert_eq!(factorize(n).unwrap().pairs(), naive_factor(n).as_slice());
        }
    }

    #[test]
    fn factorize_rejects_bad_inputs() {
        assert_eq!(factorize(0), Err(ArithError::ZeroOrNegative));
        assert_eq!(factorize(u64::MAX), Err(ArithError::TooLarge(u64::MAX)));
        assert!(factorize(MAX_INPUT - 1).is_ok());
    }

    #[test]
    fn factorize_unit_is_empty() {
        assert!(factorize(1).unwrap().pairs().is_empty());
        assert_eq!(factorize(1).unwrap().big_omega(), 0);
    }

    #[test]
    fn primality_against_sieve() {
        let mut sieve = vec![true; 10_000];
        sieve[0] = false;
        sieve[1] = false;
        for i in 2..10_000usize {
            if sieve[i] {
                for j in (i * i..10_000).step_by(i) {
                    sieve[j] = false;
                }
            }
        }
        for n in 0..10_000u64 {
            assert_eq!(is_prime(n), sieve[n as usize], "n = {n}");
        }
        // Known large primes / composites around word-size boundaries.
        assert!(is_prime(2_147_483_647));
        assert!(is_prime(9_223_372_036_854_775_783));
        assert!(!is_prime(9_223_372_036_854_775_781));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }

    #[test]
    fn big_omega_small_values() {
        // Ω(12) = 3, Ω(1) = 0, Ω(64) = 6.
        assert_eq!(big_omega(12).unwrap(), 3);
        assert_eq!(big_omega(1).unwrap(), 0);
        assert_eq!(big_omega(64).unwrap(), 6);
        let naive = |n: u64| naive_factor(n).iter().map(|&(_, e)| e).sum::<u32>();
        for n in 1..500 {
            assert_eq!(big_omega(n).unwrap(), naive(n));
        }
    }

    #[test]
    fn p_parts_examples() {
        assert_eq!(p_parts(48, 2).unwrap(), (4, 3));
        assert_eq!(p_parts(35, 2).unwrap(), (0, 35));
        assert_eq!(p_parts(35, 4), Err(ArithError::NotPrime(4)));
        assert_eq!(p_parts(0, 2), Err(ArithError::ZeroOrNegative));
    }

    #[test]
    fn square_tests() {
        let squares: Vec<u64> = (0..1000u64).map(|k| k * k).collect();
        for n in 0..100_000u64 {
            assert_eq!(is_square(n), squares.binary_search(&n).is_ok());
        }
        assert!(is_square_big(&BigUint::from(144u32)));
        assert!(!is_square_big(&BigUint::from(145u32)));
    }

    #[test]
    fn nth_roots() {
        assert_eq!(nth_root_exact(27, 3), Some(3));
        assert_eq!(nth_root_exact(28, 3), None);
        assert_eq!(nth_root_exact(1, 7), Some(1));
        assert_eq!(nth_root_exact(1 << 62, 62), Some(2));
        for n in 1..2000u64 {
            for l in 1..5u32 {
                if let Some(r) = nth_root_exact(n, l) {
                    assert_eq!(r.pow(l), n);
                }
            }
        }
    }

    #[test]
    fn prime_ranges() {
        assert_eq!(primes_in_range(10, 20), vec![11, 13, 17, 19]);
        assert_eq!(primes_in_range(2, 2), vec![2]);
        assert_eq!(next_prime(5), 7);
        assert_eq!(next_prime(7), 11);
    }

    #[test]
    fn power_split_examples() {
        // 48 = 2^4 * 3 = (2^2)^2 * 3 under l = 2.
        let f = factorize(48).unwrap();
        assert_eq!(f.power_split(2), (4, 3));
        assert_eq!(f.power_split(3), (2, 6));
        assert_eq!(factorize(1).unwrap().power_split(5), (1, 1));
    }
}
