//! The multiplicative group of positive rationals in factored form: a value
//! is a finite list of (prime, nonzero integer exponent) pairs, sorted by
//! prime, with the empty list denoting 1. Multiplication and integer powers
//! are exponent arithmetic; no rounding anywhere.

use crate::arith::{self, ArithError};
use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Exponents are machine words; anything beyond ±2^62 is rejected to keep
/// headroom for one further multiplication.
pub const MAX_EXPONENT: i64 = 1 << 62;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum QplusError {
    #[error("numerator and denominator must be positive")]
    ZeroOrNegative,
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("malformed rational literal: {0}")]
    Parse(String),
}

/// A positive rational as a sparse prime-exponent vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PosRational {
    factors: Vec<(u64, i64)>,
}

/// A positive rational as a reduced fraction of arbitrary-precision
/// naturals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fraction {
    pub num: BigUint,
    pub den: BigUint,
}

impl Fraction {
    pub fn new(num: BigUint, den: BigUint) -> Result<Self, QplusError> {
        use num_traits::Zero;
        if num.is_zero() || den.is_zero() {
            return Err(QplusError::ZeroOrNegative);
        }
        let g = num_integer::gcd(num.clone(), den.clone());
        Ok(Fraction {
            num: num / &g,
            den: den / &g,
        })
    }

    pub fn from_u64(num: u64, den: u64) -> Result<Self, QplusError> {
        Fraction::new(BigUint::from(num), BigUint::from(den))
    }

    pub fn is_one(&self) -> bool {
        self.num == self.den
    }

    /// Both sides as machine words, when they fit.
    pub fn to_u64_pair(&self) -> Option<(u64, u64)> {
        Some((u64::try_from(&self.num).ok()?, u64::try_from(&self.den).ok()?))
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl PosRational {
    pub fn one() -> Self {
        PosRational { factors: Vec::new() }
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn factors(&self) -> &[(u64, i64)] {
        &self.factors
    }

    /// Build from possibly unsorted, possibly repeated prime-exponent pairs.
    pub fn from_parts(parts: &[(u64, i64)]) -> Result<Self, QplusError> {
        let mut sorted = parts.to_vec();
        sorted.sort_unstable();
        let mut factors: Vec<(u64, i64)> = Vec::with_capacity(sorted.len());
        for (p, e) in sorted {
            if !arith::is_prime(p) {
                return Err(QplusError::NotPrime(p));
            }
            if e.unsigned_abs() > MAX_EXPONENT as u64 {
                panic!("exponent overflow: |{e}| exceeds 2^62");
            }
            if let Some(last) = factors.last_mut() {
                if last.0 == p {
                    last.1 = checked_exp(last.1, e);
                    continue;
                }
            }
            factors.push((p, e));
        }
        factors.retain(|&(_, e)| e != 0);
        Ok(PosRational { factors })
    }

    /// Factor a positive fraction; the inputs must be within the
    /// factorization ceiling.
    pub fn from_fraction(num: u64, den: u64) -> Result<Self, QplusError> {
        if num == 0 || den == 0 {
            return Err(QplusError::ZeroOrNegative);
        }
        let nf = arith::factorize(num)?;
        let df = arith::factorize(den)?;
        let mut factors: Vec<(u64, i64)> = Vec::new();
        let mut i = 0;
        let mut j = 0;
        let np = nf.pairs();
        let dp = df.pairs();
        while i < np.len() || j < dp.len() {
            let take_num = j >= dp.len() || (i < np.len() && np[i].0 < dp[j].0);
            let take_den = i >= np.len() || (j < dp.len() && dp[j].0 < np[i].0);
            if take_num {
                factors.push((np[i].0, np[i].1 as i64));
                i += 1;
            } else if take_den {
                factors.push((dp[j].0, -(dp[j].1 as i64)));
                j += 1;
            } else {
                let e = np[i].1 as i64 - dp[j].1 as i64;
                if e != 0 {
                    factors.push((np[i].0, e));
                }
                i += 1;
                j += 1;
            }
        }
        Ok(PosRational { factors })
    }

    pub fn from_integer(n: u64) -> Result<Self, QplusError> {
        PosRational::from_fraction(n, 1)
    }

    /// Reconstruct the reduced fraction (arbitrary precision, so large
    /// exponents cannot overflow).
    pub fn to_fraction(&self) -> Fraction {
        let mut num = BigUint::one();
        let mut den = BigUint::one();
        for &(p, e) in &self.factors {
            let pw = BigUint::from(p).pow(e.unsigned_abs() as u32);
            if e > 0 {
                num *= pw;
            } else {
                den *= pw;
            }
        }
        Fraction { num, den }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut factors: Vec<(u64, i64)> = Vec::with_capacity(self.factors.len() + other.factors.len());
        let mut i = 0;
        let mut j = 0;
        while i < self.factors.len() || j < other.factors.len() {
            let a = self.factors.get(i);
            let b = other.factors.get(j);
            match (a, b) {
                (Some(&(p, e)), Some(&(q, f))) if p == q => {
                    let s = checked_exp(e, f);
                    if s != 0 {
                        factors.push((p, s));
                    }
                    i += 1;
                    j += 1;
                }
                (Some(&(p, e)), Some(&(q, _))) if p < q => {
                    factors.push((p, e));
                    i += 1;
                }
                (Some(_), Some(&(q, f))) => {
                    factors.push((q, f));
                    j += 1;
                }
                (Some(&(p, e)), None) => {
                    factors.push((p, e));
                    i += 1;
                }
                (None, Some(&(q, f))) => {
                    factors.push((q, f));
                    j += 1;
                }
                (None, None) => unreachable!(),
            }
        }
        PosRational { factors }
    }

    /// Integer power; pow(0) is 1, negative powers invert.
    pub fn pow(&self, k: i64) -> Self {
        if k == 0 {
            return PosRational::one();
        }
        let factors = self
            .factors
            .iter()
            .map(|&(p, e)| {
                let prod = e.checked_mul(k).expect("exponent overflow in pow");
                if prod.unsigned_abs() > MAX_EXPONENT as u64 {
                    panic!("exponent overflow: |{prod}| exceeds 2^62");
                }
                (p, prod)
            })
            .collect();
        PosRational { factors }
    }

    pub fn inverse(&self) -> Self {
        self.pow(-1)
    }

    /// Exact l-th root, if every exponent is divisible by l.
    pub fn nth_root(&self, l: u32) -> Option<Self> {
        if l == 0 {
            return None;
        }
        let l = l as i64;
        let mut factors = Vec::with_capacity(self.factors.len());
        for &(p, e) in &self.factors {
            if e % l != 0 {
                return None;
            }
            factors.push((p, e / l));
        }
        Some(PosRational { factors })
    }

    /// p-adic valuation; requires p prime.
    pub fn valuation(&self, p: u64) -> Result<i64, QplusError> {
        if !arith::is_prime(p) {
            return Err(QplusError::NotPrime(p));
        }
        Ok(self
            .factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map(|&(_, e)| e)
            .unwrap_or(0))
    }

    /// The factored form rendered as `p1^e1 * p2^e2 * ...` (or `1`).
    pub fn factored_string(&self) -> String {
        if self.factors.is_empty() {
            return "1".to_string();
        }
        self.factors
            .iter()
            .map(|&(p, e)| if e == 1 { format!("{p}") } else { format!("{p}^{e}") })
            .collect::<Vec<_>>()
            .join(" * ")
    }
}

fn checked_exp(a: i64, b: i64) -> i64 {
    let s = a.checked_add(b).expect("exponent overflow in mul");
    if s.unsigned_abs() > MAX_EXPONENT as u64 {
        panic!("exponent overflow: |{s}| exceeds 2^62");
    }
    s
}

impl fmt::Display for PosRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_fraction())
    }
}

impl FromStr for PosRational {
    type Err = QplusError;

    /// Parse the `num/den` text form; a bare integer is read as `n/1`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let (num_s, den_s) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: u64 = num_s
            .parse()
            .map_err(|_| QplusError::Parse(format!("bad numerator {num_s:?}")))?;
        let den: u64 = den_s
            .parse()
            .map_err(|_| QplusError::Parse(format!("bad denominator {den_s:?}")))?;
        PosRational::from_fraction(num, den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_is_empty() {
        assert!(PosRational::one().is_one());
        assert_eq!(PosRational::from_fraction(7, 7).unwrap(), PosRational::one());
        assert_eq!(PosRational::one().to_fraction(), Fraction::from_u64(1, 1).unwrap());
    }

    #[test]
    fn six_fourths_reduces() {
        // 6/4 = 2^-1 * 3.
        let r = PosRational::from_fraction(6, 4).unwrap();
        assert_eq!(r.factors(), &[(2, -1), (3, 1)]);
        assert_eq!(r.to_fraction(), Fraction::from_u64(3, 2).unwrap());
        assert_eq!(r.factored_string(), "2^-1 * 3");
    }

    #[test]
    fn rejects_zero() {
        assert_eq!(
            PosRational::from_fraction(0, 3),
            Err(QplusError::ZeroOrNegative)
        );
        assert_eq!(
            PosRational::from_fraction(3, 0),
            Err(QplusError::ZeroOrNegative)
        );
    }

    #[test]
    fn mul_and_pow_examples() {
        let a = PosRational::from_fraction(3, 2).unwrap();
        let b = PosRational::from_fraction(2, 3).unwrap();
        assert!(a.mul(&b).is_one());
        let sq = a.pow(2);
        assert_eq!(sq.to_fraction(), Fraction::from_u64(9, 4).unwrap());
        assert_eq!(a.pow(-1), b);
        assert_eq!(a.pow(0), PosRational::one());
    }

    #[test]
    fn nth_root_examples() {
        let r = PosRational::from_fraction(27, 8).unwrap();
        assert_eq!(
            r.nth_root(3),
            Some(PosRational::from_fraction(3, 2).unwrap())
        );
        assert_eq!(r.nth_root(2), None);
        assert_eq!(r.nth_root(0), None);
        assert_eq!(PosRational::one().nth_root(5), Some(PosRational::one()));
    }

    #[test]
    fn valuations() {
        let r = PosRational::from_fraction(12, 35).unwrap();
        assert_eq!(r.valuation(2), Ok(2));
        assert_eq!(r.valuation(3), Ok(1));
        assert_eq!(r.valuation(5), Ok(-1));
        assert_eq!(r.valuation(11), Ok(0));
        assert_eq!(r.valuation(6), Err(QplusError::NotPrime(6)));
    }

    #[test]
    fn parse_round_trip() {
        let r: PosRational = "25/16".parse().unwrap();
        assert_eq!(r, PosRational::from_fraction(25, 16).unwrap());
        assert_eq!(r.to_string(), "25/16");
        let n: PosRational = "42".parse().unwrap();
        assert_eq!(n, PosRational::from_fraction(42, 1).unwrap());
        assert!("0/3".parse::<PosRational>().is_err());
        assert!("x/3".parse::<PosRational>().is_err());
        assert!("3/".parse::<PosRational>().is_err());
        assert!("99999999999999999999999/2".parse::<PosRational>().is_err());
    }

    #[test]
    fn from_parts_validates() {
        let r = PosRational::from_parts(&[(3, 1), (2, -1)]).unwrap();
        assert_eq!(r, PosRational::from_fraction(3, 2).unwrap());
        let collapsed = PosRational::from_parts(&[(2, 3), (2, -3)]).unwrap();
        assert!(collapsed.is_one());
        assert_eq!(
            PosRational::from_parts(&[(4, 1)]),
            Err(QplusError::NotPrime(4))
        );
    }

    fn small_rational() -> impl Strategy<Value = (u64, u64)> {
        (1u64..50_000, 1u64..50_000)
    }

    proptest! {
        #[test]
        fn round_trip_matches_reduction((n, d) in small_rational()) {
            let r = PosRational::from_fraction(n, d).unwrap();
            let f = r.to_fraction();
            let g = num_integer::gcd(n, d);
            prop_assert_eq!(f.to_u64_pair().unwrap(), (n / g, d / g));
        }

        #[test]
        fn mul_agrees_with_fractions((a, b) in small_rational(), (c, d) in small_rational()) {
            let x = PosRational::from_fraction(a, b).unwrap();
            let y = PosRational::from_fraction(c, d).unwrap();
            let prod = x.mul(&y).to_fraction();
            let direct = Fraction::new(
                BigUint::from(a) * BigUint::from(c),
                BigUint::from(b) * BigUint::from(d),
            ).unwrap();
            prop_assert_eq!(prod, direct);
        }

        #[test]
        fn pow_and_root_invert((a, b) in small_rational(), l in 1u32..5) {
            let x = PosRational::from_fraction(a, b).unwrap();
            let p = x.pow(l as i64);
            prop_assert_eq!(p.nth_root(l), Some(x.clone()));
            prop_assert!(x.mul(&x.inverse()).is_one());
        }

        #[test]
        fn valuation_is_additive((a, b) in small_rational(), (c, d) in small_rational()) {
            let x = PosRational::from_fraction(a, b).unwrap();
            let y = PosRational::from_fraction(c, d).unwrap();
            let xy = x.mul(&y);
            for p in [2u64, 3, 5, 7] {
                prop_assert_eq!(
                    xy.valuation(p).unwrap(),
                    x.valuation(p).unwrap() + y.valuation(p).unwrap()
                );
            }
        }
    }
}
