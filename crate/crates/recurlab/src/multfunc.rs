//! Completely multiplicative functions with unimodular values: archimedean
//! characters n ↦ n^{it}, roots of unity driven by Ω(n), and finite prime
//! tables. Provides the shift-dilation gap search |f(an+k) − f(an)|, the
//! Ω-congruence witness scan, oscillating character averages, and the
//! quadratic avoidance-set construction.
//!
//! Angles are kept as exact rational turns whenever the kind permits, so a
//! vanishing gap is detected exactly rather than within a tolerance.

use crate::arith::{self, ArithError};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum MultfuncError {
    #[error("prime {0} is not listed in the table")]
    UnlistedPrime(u64),
    #[error(transparent)]
    Arith(#[from] ArithError),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// An angle measured in turns, as a reduced fraction in [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RationalAngle {
    num: u64,
    den: u64,
}

impl RationalAngle {
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "angle denominator must be positive");
        let m = num.rem_euclid(den as i64) as u64;
        let g = arith::gcd(m, den);
        if m == 0 {
            RationalAngle { num: 0, den: 1 }
        } else {
            RationalAngle { num: m / g, den: den / g }
        }
    }

    pub fn zero() -> Self {
        RationalAngle { num: 0, den: 1 }
    }

    pub fn num(&self) -> u64 {
        self.num
    }

    pub fn den(&self) -> u64 {
        self.den
    }

    /// Sum of two rational turns, reduced mod 1.
    pub fn add(&self, other: &RationalAngle) -> RationalAngle {
        let den = (self.den as u128) * (other.den as u128);
        let num = (self.num as u128) * (other.den as u128)
            + (other.num as u128) * (self.den as u128);
        let num = num % den;
        let g = num_integer::gcd(num, den);
        if num == 0 {
            RationalAngle::zero()
        } else {
            RationalAngle {
                num: (num / g) as u64,
                den: (den / g) as u64,
            }
        }
    }

    /// Integer multiple of the angle, reduced mod 1.
    pub fn scale(&self, k: u64) -> RationalAngle {
        let num = ((self.num as u128) * (k as u128)) % (self.den as u128);
        let g = num_integer::gcd(num, self.den as u128);
        if num == 0 {
            RationalAngle::zero()
        } else {
            RationalAngle {
                num: (num / g) as u64,
                den: (self.den as u128 / g) as u64,
            }
        }
    }

    pub fn turns(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

/// A point on the unit circle: exact rational turns when the generating
/// kind permits, floating turns otherwise. Always normalized to [0, 1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum CircleValue {
    Exact(RationalAngle),
    Float(f64),
}

impl CircleValue {
    pub fn one() -> Self {
        CircleValue::Exact(RationalAngle::zero())
    }

    pub fn turns(&self) -> f64 {
        match self {
            CircleValue::Exact(a) => a.turns(),
            CircleValue::Float(t) => *t,
        }
    }

    pub fn complex(&self) -> Complex64 {
        Complex64::from_polar(1.0, TAU * self.turns())
    }
}

/// Chord distance |z − w| between two circle points; exactly 0 when both
/// angles are exact and equal.
pub fn chord_distance(x: &CircleValue, y: &CircleValue) -> f64 {
    if let (CircleValue::Exact(a), CircleValue::Exact(b)) = (x, y) {
        if a == b {
            return 0.0;
        }
        // Exact difference of rational turns, then one sine evaluation.
        let den = (a.den as u128) * (b.den as u128);
        let num = (a.num as u128) * (b.den as u128) + den - (b.num as u128) * (a.den as u128);
        let diff = (num % den) as f64 / den as f64;
        return 2.0 * (PI * diff).sin().abs();
    }
    let diff = (x.turns() - y.turns()).rem_euclid(1.0);
    2.0 * (PI * diff).sin().abs()
}

/// A completely multiplicative function into the unit circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Cmf {
    /// n ↦ n^{it} = e^{it log n}
    ArchimedeanCharacter { t: f64 },
    /// n ↦ e^{2πi·a·Ω(n)/q}; (1, 2) is the Liouville function.
    OmegaRoot { a: i64, q: u64 },
    /// f given on finitely many primes, extended multiplicatively.
    PrimeTable { table: BTreeMap<u64, RationalAngle> },
}

impl Cmf {
    pub fn liouville() -> Self {
        Cmf::OmegaRoot { a: 1, q: 2 }
    }

    /// The constant-one function as a prime table covering primes below
    /// `bound`, all at angle 0.
    pub fn one_on_primes_below(bound: u64) -> Self {
        let table = arith::primes_in_range(2, bound)
            .into_iter()
            .map(|p| (p, RationalAngle::zero()))
            .collect();
        Cmf::PrimeTable { table }
    }
}

pub fn eval(f: &Cmf, n: u64) -> Result<CircleValue, MultfuncError> {
    if n == 0 {
        return Err(MultfuncError::Arith(ArithError::ZeroOrNegative));
    }
    match f {
        Cmf::ArchimedeanCharacter { t } => {
            let turns = (t * (n as f64).ln() / TAU).rem_euclid(1.0);
            Ok(CircleValue::Float(turns))
        }
        Cmf::OmegaRoot { a, q } => {
            if *q == 0 {
                return Err(MultfuncError::InvalidParameter("q must be positive".into()));
            }
            let omega = arith::big_omega(n)?;
            let num = (*a as i128 * omega as i128).rem_euclid(*q as i128) as i64;
            Ok(CircleValue::Exact(RationalAngle::new(num, *q)))
        }
        Cmf::PrimeTable { table } => {
            let fact = arith::factorize(n)?;
            let mut angle = RationalAngle::zero();
            for &(p, e) in fact.pairs() {
                let base = table.get(&p).ok_or(MultfuncError::UnlistedPrime(p))?;
                angle = angle.add(&base.scale(e as u64));
            }
            Ok(CircleValue::Exact(angle))
        }
    }
}

/// One improvement step of the running minimum in a gap search.
#[derive(Debug, Clone, Serialize)]
pub struct GapSample {
    pub n: u64,
    pub lhs_turns: f64,
    pub rhs_turns: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GapReport {
    pub a: u64,
    pub k: u64,
    pub n_bound: u64,
    pub min_gap: f64,
    pub argmin: u64,
    /// Strict improvements of the running minimum, in scan order.
    pub envelope: Vec<GapSample>,
}

/// Minimum of |f(an+k) − f(an)| over 1 ≤ n ≤ N with the first minimizer;
/// stops early once the gap is exactly 0.
pub fn shift_dilation_gap(
    f: &Cmf,
    a: u64,
    k: u64,
    n_bound: u64,
) -> Result<GapReport, MultfuncError> {
    if a == 0 || k == 0 || n_bound == 0 {
        return Err(MultfuncError::InvalidParameter(
            "a, k, N must all be at least 1".into(),
        ));
    }
    let mut min_gap = f64::INFINITY;
    let mut argmin = 0u64;
    let mut envelope = Vec::new();
    for n in 1..=n_bound {
        let lhs = eval(f, a * n + k)?;
        let rhs = eval(f, a * n)?;
        let gap = chord_distance(&lhs, &rhs);
        if gap < min_gap {
            min_gap = gap;
            argmin = n;
            envelope.push(GapSample {
                n,
                lhs_turns: lhs.turns(),
                rhs_turns: rhs.turns(),
                gap,
            });
            if gap == 0.0 {
                break;
            }
        }
    }
    Ok(GapReport {
        a,
        k,
        n_bound,
        min_gap,
        argmin,
        envelope,
    })
}

/// All n ≤ N with Ω(an+k) ≡ Ω(an) (mod q), ascending.
pub fn omega_witnesses(
    a: u64,
    k: u64,
    q: u64,
    n_bound: u64,
) -> Result<Vec<u64>, MultfuncError> {
    if a == 0 || k == 0 || q == 0 {
        return Err(MultfuncError::InvalidParameter(
            "a, k, q must all be at least 1".into(),
        ));
    }
    let mut out = Vec::new();
    for n in 1..=n_bound {
        let lhs = arith::big_omega(a * n + k)?;
        let rhs = arith::big_omega(a * n)?;
        if (lhs % q as u32) == (rhs % q as u32) {
            out.push(n);
        }
    }
    Ok(out)
}

/// (1/N) Σ_{n ≤ N} e^{it log n}. For t ≠ 0 the average oscillates with N
/// instead of converging.
pub fn cesaro_character_average(t: f64, n_bound: u64) -> Complex64 {
    assert!(n_bound >= 1);
    let mut acc = Complex64::new(0.0, 0.0);
    for n in 1..=n_bound {
        acc += Complex64::from_polar(1.0, t * (n as f64).ln());
    }
    acc / n_bound as f64
}

/// A real carried as an unevaluated double-double sum, enough precision for
/// frac(n²·x) decisions up to n ~ 10⁶.
#[derive(Debug, Clone, Copy)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub fn from_f64(x: f64) -> Self {
        DoubleDouble { hi: x, lo: 0.0 }
    }

    /// √m to roughly 2×53 bits via one Newton correction.
    pub fn sqrt_of(m: u64) -> Self {
        let hi = (m as f64).sqrt();
        let residual = f64::mul_add(hi, hi, -(m as f64));
        DoubleDouble { hi, lo: -residual / (2.0 * hi) }
    }

    /// frac(n² · x), accurate to a few 10⁻¹⁶ for n ≤ 10⁶.
    pub fn frac_of_square_multiple(&self, n: u64) -> f64 {
        let n2 = (n as f64) * (n as f64); // exact: n² < 2^53
        let s = n2 * self.hi;
        let err = f64::mul_add(n2, self.hi, -s); // n2·hi = s + err exactly
        let tail = n2 * self.lo;
        (s.fract() + err + tail).rem_euclid(1.0)
    }
}

/// E = {n ≤ N : frac(n² x0) ∈ [1/2 − δ, 1/2 + δ]}, ascending.
pub fn avoidance_set(x0: &DoubleDouble, delta: f64, n_bound: u64) -> Vec<u64> {
    assert!(delta > 0.0 && delta < 0.25, "need 0 < δ < 1/4");
    let lo = 0.5 - delta;
    let hi = 0.5 + delta;
    (1..=n_bound)
        .filter(|&n| {
            let f = x0.frac_of_square_multiple(n);
            f >= lo && f <= hi
        })
        .collect()
}

/// First (x, y, z) in lexicographic order with x² + y² = z², all members of
/// the given set, if any.
pub fn contains_pythagorean_triple(set: &[u64]) -> Option<(u64, u64, u64)> {
    let members: std::collections::HashSet<u64> = set.iter().copied().collect();
    let mut sorted = set.to_vec();
    sorted.sort_unstable();
    for (i, &x) in sorted.iter().enumerate() {
        for &y in &sorted[i..] {
            let Some(x2) = x.checked_mul(x) else { continue };
            let Some(y2) = y.checked_mul(y) else { continue };
            let Some(s) = x2.checked_add(y2) else { continue };
            let z = s.isqrt();
            if z * z == s && members.contains(&z) {
                return Some((x, y, z));
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eval_liouville_and_unit() {
        // Ω(12) = 3 odd → angle 1/2 (value −1).
        let f = Cmf::liouville();
        assert_eq!(
            eval(&f, 12).unwrap(),
            CircleValue::Exact(RationalAngle::new(1, 2))
        );
        assert_eq!(eval(&f, 1).unwrap(), CircleValue::one());
        let arch = Cmf::ArchimedeanCharacter { t: 0.37 };
        assert_eq!(eval(&arch, 1).unwrap().turns(), 0.0);
    }

    #[test]
    fn eval_archimedean_angle() {
        let f = Cmf::ArchimedeanCharacter { t: 1.0 };
        let got = eval(&f, 2).unwrap().turns();
        assert!((got - 2f64.ln() / TAU).abs() < 1e-15);
        assert!((got - 0.110318).abs() < 1e-6);
    }

    #[test]
    fn prime_table_needs_all_primes() {
        let mut table = BTreeMap::new();
        table.insert(2, RationalAngle::new(1, 3));
        table.insert(3, RationalAngle::new(1, 4));
        let f = Cmf::PrimeTable { table };
        // f(12) = f(2)²·f(3): 2/3 + 1/4 = 11/12 turns.
        assert_eq!(
            eval(&f, 12).unwrap(),
            CircleValue::Exact(RationalAngle::new(11, 12))
        );
        assert_eq!(eval(&f, 10), Err(MultfuncError::UnlistedPrime(5)));
    }

    #[test]
    fn complete_multiplicativity() {
        let kinds = [
            Cmf::liouville(),
            Cmf::OmegaRoot { a: 3, q: 7 },
            Cmf::ArchimedeanCharacter { t: 1.7 },
            Cmf::one_on_primes_below(600),
        ];
        for f in &kinds {
            for m in 1..=500u64 {
                // Sampled n to keep the product range within the table.
                for n in [1u64, 2, 3, 5, 12, 490] {
                    if m * n > 250_000 {
                        continue;
                    }
                    let lhs = eval(f, m * n).unwrap();
                    let prod = match (eval(f, m).unwrap(), eval(f, n).unwrap()) {
                        (CircleValue::Exact(x), CircleValue::Exact(y)) => {
                            CircleValue::Exact(x.add(&y))
                        }
                        (x, y) => {
                            CircleValue::Float((x.turns() + y.turns()).rem_euclid(1.0))
                        }
                    };
                    match (&lhs, &prod) {
                        (CircleValue::Exact(x), CircleValue::Exact(y)) => {
                            assert_eq!(x, y, "f = {f:?}, m = {m}, n = {n}")
                        }
                        _ => assert!(
                            chord_distance(&lhs, &prod) < 1e-12,
                            "f = {f:?}, m = {m}, n = {n}"
                        ),
                    }
                }
            }
        }
    }

    #[test]
    fn gap_hits_zero_for_liouville() {
        // Ω(2) = Ω(3) = 1 → exact zero at n = 2.
        let report = shift_dilation_gap(&Cmf::liouville(), 1, 1, 10).unwrap();
        assert_eq!(report.min_gap, 0.0);
        assert_eq!(report.argmin, 2);
    }

    #[test]
    fn gap_of_constant_function_is_zero_at_one() {
        let f = Cmf::one_on_primes_below(100);
        let report = shift_dilation_gap(&f, 1, 1, 50).unwrap();
        assert_eq!(report.min_gap, 0.0);
        assert_eq!(report.argmin, 1);
    }

    #[test]
    fn gap_archimedean_monotone() {
        // |f(n+1) − f(n)| = 2 sin(log(1 + 1/n)/2) decreases in n, so the
        // minimum sits at the right endpoint.
        let f = Cmf::ArchimedeanCharacter { t: 1.0 };
        let report = shift_dilation_gap(&f, 1, 1, 1000).unwrap();
        assert_eq!(report.argmin, 1000);
        let expect = 2.0 * ((1001f64 / 1000.0).ln() / 2.0).sin();
        assert!((report.min_gap - expect).abs() < 1e-12);
        assert!((report.min_gap - 9.995e-4).abs() < 1e-6);
        // Envelope is strictly decreasing.
        for w in report.envelope.windows(2) {
            assert!(w[1].gap < w[0].gap);
        }
    }

    #[test]
    fn omega_witnesses_small_range() {
        // Independent brute force over the same range.
        let brute: Vec<u64> = (1..=15u64)
            .filter(|&n| {
                (arith::big_omega(n + 1).unwrap() % 2) == (arith::big_omega(n).unwrap() % 2)
            })
            .collect();
        let got = omega_witnesses(1, 1, 2, 15).unwrap();
        assert_eq!(got, brute);
        for n in [2u64, 9, 14] {
            assert!(got.contains(&n));
        }
        assert_eq!(
            omega_witnesses(1, 1, 1, 9).unwrap(),
            (1..=9u64).collect::<Vec<_>>()
        );
    }

    #[test]
    fn omega_witnesses_recompute() {
        for &n in omega_witnesses(2, 1, 5, 400).unwrap().iter() {
            let lhs = arith::big_omega(2 * n + 1).unwrap();
            let rhs = arith::big_omega(2 * n).unwrap();
            assert_eq!(lhs % 5, rhs % 5);
        }
    }

    #[test]
    fn gap_zero_iff_omega_witness() {
        for q in 2..=5u64 {
            let f = Cmf::OmegaRoot { a: 1, q };
            for (a, k) in [(1u64, 1u64), (2, 1), (3, 2)] {
                let witnesses = omega_witnesses(a, k, q, 200).unwrap();
                let report = shift_dilation_gap(&f, a, k, 200).unwrap();
                if witnesses.is_empty() {
                    assert!(report.min_gap > 0.0);
                } else {
                    assert_eq!(report.min_gap, 0.0);
                    assert_eq!(report.argmin, witnesses[0]);
                }
            }
        }
    }

    #[test]
    fn cesaro_constant_character() {
        let avg = cesaro_character_average(0.0, 1000);
        assert!((avg - Complex64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn cesaro_modulus_near_inverse_sqrt_two() {
        // Comparison with ∫₀¹ x^{it} dx = 1/(1+it): modulus 1/√2 at t = 1.
        let avg = cesaro_character_average(1.0, 10_000);
        assert!((avg.norm() - std::f64::consts::FRAC_1_SQRT_2).abs() < 0.01);
    }

    #[test]
    fn cesaro_argument_oscillates_with_period_e_two_pi() {
        // N ↦ average(N) ≈ N^i/(1+i); scaling N by e^{2π} rotates a full
        // turn, so the normalized arguments nearly agree.
        let n0 = 10_000u64;
        let n1 = ((n0 as f64) * TAU.exp()).round() as u64;
        let a0 = cesaro_character_average(1.0, n0);
        let a1 = cesaro_character_average(1.0, n1);
        let diff = (a0.arg() - a1.arg()).rem_euclid(TAU);
        let diff = diff.min(TAU - diff);
        assert!(diff < 0.05, "arg drift {diff}");
    }

    #[test]
    fn double_double_sqrt2_accuracy() {
        let x = DoubleDouble::sqrt_of(2);
        // hi + lo should square to 2 much more tightly than hi alone.
        let err = (x.hi as f64).mul_add(x.hi, -2.0) + 2.0 * x.hi * x.lo;
        assert!(err.abs() < 1e-30, "residual {err}");
    }

    #[test]
    fn avoidance_density_near_two_delta() {
        let x0 = DoubleDouble::sqrt_of(2);
        let e = avoidance_set(&x0, 0.1, 2000);
        let density = e.len() as f64 / 2000.0;
        assert!((0.15..=0.25).contains(&density), "density {density}");
    }

    #[test]
    fn avoidance_wide_delta_captures_most() {
        let x0 = DoubleDouble::sqrt_of(2);
        let e = avoidance_set(&x0, 0.2499, 500);
        assert!(e.len() as f64 / 500.0 > 0.4);
    }

    #[test]
    fn avoidance_interval_arithmetic_on_pairs() {
        let x0 = DoubleDouble::sqrt_of(2);
        let delta = 0.1;
        let e = avoidance_set(&x0, delta, 1200);
        for (i, &n) in e.iter().enumerate().step_by(7) {
            for &m in e[i..].iter().step_by(11) {
                let f = x0.frac_of_square_multiple(n) + x0.frac_of_square_multiple(m);
                let f = f.rem_euclid(1.0);
                assert!(
                    f <= 2.0 * delta + 1e-9 || f >= 1.0 - 2.0 * delta - 1e-9,
                    "pair ({n}, {m}) lands at {f}"
                );
            }
        }
    }

    #[test]
    fn avoidance_set_has_no_pythagorean_triple() {
        let x0 = DoubleDouble::sqrt_of(2);
        let e = avoidance_set(&x0, 0.1, 2000);
        assert_eq!(contains_pythagorean_triple(&e), None);
        // Sanity: the detector does find a planted triple.
        assert_eq!(
            contains_pythagorean_triple(&[5, 3, 4, 7]),
            Some((3, 4, 5))
        );
    }

    #[test]
    fn chord_metric_landmarks() {
        let zero = CircleValue::Exact(RationalAngle::zero());
        let half = CircleValue::Exact(RationalAngle::new(1, 2));
        let quarter = CircleValue::Exact(RationalAngle::new(1, 4));
        assert!((chord_distance(&zero, &half) - 2.0).abs() < 1e-15);
        assert!((chord_distance(&zero, &quarter) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(chord_distance(&half, &half), 0.0);
    }
}
