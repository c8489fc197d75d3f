//! Semigroup-containment machinery: the (ax+b)^d polynomial classifier,
//! geometric-progression searches inside rational families, closure-violation
//! finders, and the exact vanishing-power-sum oracle.

use crate::poly::IntPoly;
use crate::qplus::PosRational;
use crate::recsets::{self, Containment, RatFamily};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum SemigroupsError {
    #[error("bases {i} and {j} share an absolute value")]
    DuplicateAbsoluteValue { i: usize, j: usize },
    #[error("base {i} is zero")]
    ZeroBase { i: usize },
    #[error("{coeffs} coefficients vs {bases} bases")]
    LengthMismatch { coeffs: usize, bases: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("family has no integer enumeration: {0}")]
    NotIntegerFamily(String),
}

/// P = (ax+b)^d together with the closure criterion a | b(b−1).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SemigroupDecomposition {
    pub a: u64,
    pub b: i64,
    pub d: u32,
    pub criterion_holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DoesNotReason {
    Constant,
    NonPositiveLead,
    /// No exact decomposition P = (ax+b)^d exists.
    NotPowerOfLinear,
    /// The decomposition exists but a ∤ b(b−1).
    CriterionFails(SemigroupDecomposition),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PolyClassification {
    ContainsSemigroup(SemigroupDecomposition),
    DoesNot(DoesNotReason),
}

fn criterion(a: u64, b: i64) -> bool {
    let prod = b as i128 * (b as i128 - 1);
    prod.rem_euclid(a as i128) == 0
}

/// Does the image of P contain an infinite multiplicative semigroup?
/// Positive exactly when P = (ax+b)^d with a | b(b−1), found by coefficient
/// reconstruction: d = deg P, a = exact d-th root of the leading
/// coefficient, b = c_{d−1}/(d·a^{d−1}), then a full expansion check.
pub fn poly_semigroup_classifier(p: &IntPoly) -> PolyClassification {
    if p.is_constant() {
        return PolyClassification::DoesNot(DoesNotReason::Constant);
    }
    let lead = p.leading();
    if lead <= 0 {
        return PolyClassification::DoesNot(DoesNotReason::NonPositiveLead);
    }
    let d = p.degree() as u32;
    let Some(a) = crate::arith::nth_root_exact(lead as u64, d) else {
        return PolyClassification::DoesNot(DoesNotReason::NotPowerOfLinear);
    };
    let c_next = p.coeffs()[d as usize - 1];
    let denom = BigInt::from(d) * BigInt::from(a).pow(d - 1);
    let c_big = BigInt::from(c_next);
    if !(&c_big % &denom).is_zero() {
        return PolyClassification::DoesNot(DoesNotReason::NotPowerOfLinear);
    }
    let b_big = c_big / denom;
    let Ok(b) = i64::try_from(&b_big) else {
        return PolyClassification::DoesNot(DoesNotReason::NotPowerOfLinear);
    };
    // Verify (ax+b)^d coefficient by coefficient.
    let mut expansion: Vec<BigInt> = vec![BigInt::one()];
    for _ in 0..d {
        let mut next = vec![BigInt::zero(); expansion.len() + 1];
        for (i, c) in expansion.iter().enumerate() {
            next[i] += c * BigInt::from(b);
            next[i + 1] += c * BigInt::from(a);
        }
        expansion = next;
    }
    let matches = expansion.len() == p.coeffs().len()
        && expansion
            .iter()
            .zip(p.coeffs())
            .all(|(e, &c)| *e == BigInt::from(c));
    if !matches {
        return PolyClassification::DoesNot(DoesNotReason::NotPowerOfLinear);
    }
    let decomposition = SemigroupDecomposition { a, b, d, criterion_holds: criterion(a, b) };
    if decomposition.criterion_holds {
        PolyClassification::ContainsSemigroup(decomposition)
    } else {
        PolyClassification::DoesNot(DoesNotReason::CriterionFails(decomposition))
    }
}

/// Lemma-4.2 normalization: P(x) = Q(ax+b) with the y^{d−1} coefficient of
/// Q vanishing, via a = d·(lead of P) and b = c_{d−1}. Q has rational
/// coefficients; P is a power of a linear form over ℚ exactly when all of
/// Q's coefficients below y^d vanish.
#[derive(Debug, Clone, PartialEq)]
pub struct DepressedShift {
    pub a: i64,
    pub b: i64,
    pub coeffs: Vec<BigRational>,
}

pub fn shift_to_depressed(p: &IntPoly) -> Result<DepressedShift, SemigroupsError> {
    if p.is_constant() {
        return Err(SemigroupsError::InvalidParameter("P must be nonconstant".into()));
    }
    let d = p.degree();
    let a = (d as i64)
        .checked_mul(p.leading())
        .ok_or_else(|| SemigroupsError::InvalidParameter("d·lead overflows".into()))?;
    let b = p.coeffs()[d - 1];
    // Q(y) = P((y − b)/a) as a polynomial in y.
    let y_shift = [
        BigRational::new(BigInt::from(-b), BigInt::from(a)),
        BigRational::new(BigInt::one(), BigInt::from(a)),
    ];
    let mut q = vec![BigRational::zero(); d + 1];
    let mut power = vec![BigRational::one()]; // ((y − b)/a)^i
    for (i, &c) in p.coeffs().iter().enumerate() {
        let c = BigRational::from(BigInt::from(c));
        for (j, pc) in power.iter().enumerate() {
            q[j] += pc * &c;
        }
        if i < d {
            let mut next = vec![BigRational::zero(); power.len() + 1];
            for (j, pc) in power.iter().enumerate() {
                next[j] += pc * &y_shift[0];
                next[j + 1] += pc * &y_shift[1];
            }
            power = next;
        }
    }
    Ok(DepressedShift { a, b, coeffs: q })
}

/// A coprime pair (p, q) whose powers (p/q)^k all sit in the family for
/// k = 1..=K, with the membership witnesses per power.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProgressionSurvivor {
    pub p: u64,
    pub q: u64,
    /// (k, family parameters) for each confirmed power.
    pub witnesses: Vec<(u32, Vec<i128>)>,
    /// Powers whose membership test ran out of budget (never confirmed or
    /// refuted); empty for families with exact closed-form tests.
    pub inconclusive: Vec<u32>,
}

/// All ordered coprime pairs p ≠ q ≤ B with (p/q)^k ∈ family for every
/// k ≤ K (powers with budget-limited tests are flagged, not dropped).
pub fn geometric_progression_search(
    family: &RatFamily,
    base_bound: u64,
    power_bound: u32,
) -> Result<Vec<ProgressionSurvivor>, SemigroupsError> {
    if base_bound < 2 || power_bound < 2 {
        return Err(SemigroupsError::InvalidParameter("need B ≥ 2 and K ≥ 2".into()));
    }
    let mut survivors = Vec::new();
    for p in 1..=base_bound {
        for q in 1..=base_bound {
            if p == q || crate::arith::gcd(p, q) != 1 {
                continue;
            }
            let base = PosRational::from_fraction(p, q).expect("p, q ≥ 1");
            let mut witnesses = Vec::new();
            let mut inconclusive = Vec::new();
            let mut refuted = false;
            for k in 1..=power_bound {
                let r = base.pow(k as i64);
                match recsets::contains(family, &r, 2048) {
                    Containment::Yes(params) => witnesses.push((k, params)),
                    Containment::No => {
                        refuted = true;
                        break;
                    }
                    Containment::Inconclusive(_) => inconclusive.push(k),
                }
            }
            if !refuted {
                survivors.push(ProgressionSurvivor { p, q, witnesses, inconclusive });
            }
        }
    }
    Ok(survivors)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ClosureViolation {
    pub x: u64,
    pub y: u64,
    pub product: u64,
}

/// The members of an integer-valued family up to `n_max`, ascending.
fn integer_members(family: &RatFamily, n_max: u64) -> Result<Vec<u64>, SemigroupsError> {
    match family {
        RatFamily::LinearImage { a, b } => {
            Ok((1..).map(|n| a * n + b).take_while(|&v| v <= n_max).collect())
        }
        RatFamily::PolyImage { poly } => {
            let mut out = Vec::new();
            match poly.increasing_from() {
                Some(n0) => {
                    let mut n = 1u64;
                    loop {
                        let v = poly.eval_u64(n);
                        if n >= n0 && v > BigInt::from(n_max) {
                            break;
                        }
                        if v.is_positive() && v <= BigInt::from(n_max) {
                            out.push(u64::try_from(&v).expect("bounded by n_max"));
                        }
                        n += 1;
                    }
                }
                None => {
                    return Err(SemigroupsError::NotIntegerFamily(
                        "polynomial image is not an increasing integer sequence".into(),
                    ))
                }
            }
            out.sort_unstable();
            out.dedup();
            Ok(out)
        }
        RatFamily::GeometricPowers { p, q } if *q == 1 => {
            let mut out = Vec::new();
            let mut v = *p as u128;
            while v <= n_max as u128 {
                out.push(v as u64);
                if *p == 1 {
                    break;
                }
                v *= *p as u128;
            }
            Ok(out)
        }
        RatFamily::ExplicitList { items } => {
            let mut out = Vec::new();
            for r in items {
                if let Some((v, 1)) = r.to_fraction().to_u64_pair() {
                    if v <= n_max {
                        out.push(v);
                    }
                }
            }
            out.sort_unstable();
            out.dedup();
            Ok(out)
        }
        other => Err(SemigroupsError::NotIntegerFamily(format!("{other:?}"))),
    }
}

/// Least pair x ≤ y in S ∩ [N] (ordered by (x, y)) whose product xy ∉ S.
/// None means "closed up to the budget" — brute force refutes closure, it
/// never confirms it outright.
pub fn closure_violation_search(
    family: &RatFamily,
    n_max: u64,
) -> Result<Option<ClosureViolation>, SemigroupsError> {
    let members = integer_members(family, n_max)?;
    let in_family = |v: u64| -> bool {
        match family {
            RatFamily::LinearImage { a, b } => v > *b && (v - b) % a == 0,
            _ => {
                let r = PosRational::from_integer(v).expect("v ≥ 1");
                recsets::contains(family, &r, 2048).is_yes()
            }
        }
    };
    for (i, &x) in members.iter().enumerate() {
        for &y in &members[i..] {
            let product = match x.checked_mul(y) {
                Some(p) => p,
                None => break,
            };
            if !in_family(product) {
                return Ok(Some(ClosureViolation { x, y, product }));
            }
        }
    }
    Ok(None)
}

/// Exact k ↦ Σ aᵢ·qᵢ^k over ℚ: all k ≤ K where the sum vanishes. With some
/// aᵢ ≠ 0 and pairwise-distinct |qᵢ|, at most ℓ−1 such k exist.
pub fn vanishing_power_sum(
    coeffs: &[BigRational],
    bases: &[BigRational],
    k_max: u32,
) -> Result<Vec<u32>, SemigroupsError> {
    if coeffs.len() != bases.len() {
        return Err(SemigroupsError::LengthMismatch {
            coeffs: coeffs.len(),
            bases: bases.len(),
        });
    }
    for (i, b) in bases.iter().enumerate() {
        if b.is_zero() {
            return Err(SemigroupsError::ZeroBase { i });
        }
    }
    for i in 0..bases.len() {
        for j in i + 1..bases.len() {
            if bases[i].abs() == bases[j].abs() {
                return Err(SemigroupsError::DuplicateAbsoluteValue { i, j });
            }
        }
    }
    let mut zeros = Vec::new();
    let mut powers: Vec<BigRational> = bases.to_vec();
    for k in 1..=k_max {
        let sum: BigRational = coeffs
            .iter()
            .zip(&powers)
            .map(|(a, qk)| a * qk)
            .fold(BigRational::zero(), |acc, t| acc + t);
        if sum.is_zero() {
            zeros.push(k);
        }
        for (pw, b) in powers.iter_mut().zip(bases) {
            *pw *= b;
        }
    }
    Ok(zeros)
}

/// Geometric-progression search specialized to four-forms families: one
/// sweep over (m, n) ≤ M marks every attained target (p/q)^k, then pairs
/// with all powers k ≤ K attained survive. Witnesses are the first (m, n)
/// in lexicographic sweep order.
pub fn fourforms_progression_check(
    l: [i64; 4],
    base_bound: u64,
    power_bound: u32,
    param_bound: u64,
) -> Result<Vec<ProgressionSurvivor>, SemigroupsError> {
    RatFamily::four_forms(l).map_err(|e| SemigroupsError::InvalidParameter(e.to_string()))?;
    if base_bound < 2 || power_bound < 1 {
        return Err(SemigroupsError::InvalidParameter("need B ≥ 2 and K ≥ 1".into()));
    }
    // Targets: reduced (p^k, q^k) → list of (pair index, k).
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    for p in 1..=base_bound {
        for q in 1..=base_bound {
            if p != q && crate::arith::gcd(p, q) == 1 {
                pairs.push((p, q));
            }
        }
    }
    let mut targets: BTreeMap<(u128, u128), Vec<(usize, u32)>> = BTreeMap::new();
    for (idx, &(p, q)) in pairs.iter().enumerate() {
        for k in 1..=power_bound {
            if let (Some(pk), Some(qk)) =
                ((p as u128).checked_pow(k), (q as u128).checked_pow(k))
            {
                targets.entry((pk, qk)).or_default().push((idx, k));
            }
        }
    }
    let mut found: BTreeMap<(usize, u32), (u64, u64)> = BTreeMap::new();
    for m in 1..=param_bound {
        for n in 1..=param_bound {
            let f: [i128; 4] = [
                m as i128 + l[0] as i128 * n as i128,
                m as i128 + l[1] as i128 * n as i128,
                m as i128 + l[2] as i128 * n as i128,
                m as i128 + l[3] as i128 * n as i128,
            ];
            let num = f[0] * f[1];
            let den = f[2] * f[3];
            if den == 0 || num == 0 || (num > 0) != (den > 0) {
                continue;
            }
            let (num, den) = (num.unsigned_abs(), den.unsigned_abs());
            let g = num_integer::gcd(num, den);
            if let Some(hits) = targets.get(&(num / g, den / g)) {
                for &(idx, k) in hits {
                    found.entry((idx, k)).or_insert((m, n));
                }
            }
        }
    }
    let mut survivors = Vec::new();
    for (idx, &(p, q)) in pairs.iter().enumerate() {
        let witnesses: Vec<(u32, Vec<i128>)> = (1..=power_bound)
            .filter_map(|k| {
                found.get(&(idx, k)).map(|&(m, n)| (k, vec![m as i128, n as i128]))
            })
            .collect();
        if witnesses.len() == power_bound as usize {
            survivors.push(ProgressionSurvivor { p, q, witnesses, inconclusive: vec![] });
        }
    }
    Ok(survivors)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rational(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn classifier_worked_examples() {
        // (2x+3)²: contains, 2 | 3·2.
        let p = IntPoly::new(vec![9, 12, 4]);
        assert_eq!(
            poly_semigroup_classifier(&p),
            PolyClassification::ContainsSemigroup(SemigroupDecomposition {
                a: 2,
                b: 3,
                d: 2,
                criterion_holds: true
            })
        );
        // x²+1: not a power of a linear form.
        let p = IntPoly::new(vec![1, 0, 1]);
        assert_eq!(
            poly_semigroup_classifier(&p),
            PolyClassification::DoesNot(DoesNotReason::NotPowerOfLinear)
        );
        // (4x+3)²: decomposition exists but 4 ∤ 6.
        let p = IntPoly::new(vec![9, 24, 16]);
        assert_eq!(
            poly_semigroup_classifier(&p),
            PolyClassification::DoesNot(DoesNotReason::CriterionFails(
                SemigroupDecomposition { a: 4, b: 3, d: 2, criterion_holds: false }
            ))
        );
    }

    #[test]
    fn classifier_more_cases() {
        // (3x+1)³ = 27x³ + 27x² + 9x + 1: 3 | 1·0.
        let p = IntPoly::new(vec![1, 9, 27, 27]);
        assert!(matches!(
            poly_semigroup_classifier(&p),
            PolyClassification::ContainsSemigroup(SemigroupDecomposition {
                a: 3,
                b: 1,
                d: 3,
                ..
            })
        ));
        // (2x−3)² = 4x² − 12x + 9: 2 | (−3)(−4) = 12.
        let p = IntPoly::new(vec![9, -12, 4]);
        assert!(matches!(
            poly_semigroup_classifier(&p),
            PolyClassification::ContainsSemigroup(SemigroupDecomposition {
                a: 2,
                b: -3,
                ..
            })
        ));
        // x (identity): a=1 divides everything.
        let p = IntPoly::new(vec![0, 1]);
        assert!(matches!(
            poly_semigroup_classifier(&p),
            PolyClassification::ContainsSemigroup(_)
        ));
        assert_eq!(
            poly_semigroup_classifier(&IntPoly::new(vec![5])),
            PolyClassification::DoesNot(DoesNotReason::Constant)
        );
        assert_eq!(
            poly_semigroup_classifier(&IntPoly::new(vec![1, 0, -1])),
            PolyClassification::DoesNot(DoesNotReason::NonPositiveLead)
        );
        // 2x²: leading coefficient is not a square.
        assert_eq!(
            poly_semigroup_classifier(&IntPoly::new(vec![0, 0, 2])),
            PolyClassification::DoesNot(DoesNotReason::NotPowerOfLinear)
        );
    }

    #[test]
    fn classifier_positive_implies_sampled_closure() {
        // Every positive classification passes exact closure sampling:
        // P(m)P(n) = P(z) at z = ((am+b)(an+b) − b)/a.
        for a in 1..=5u64 {
            for b in -5..=5i64 {
                for d in 1..=3u32 {
                    if !criterion(a, b) {
                        continue;
                    }
                    let mut coeffs = vec![BigInt::one()];
                    for _ in 0..d {
                        let mut next = vec![BigInt::zero(); coeffs.len() + 1];
                        for (i, c) in coeffs.iter().enumerate() {
                            next[i] += c * BigInt::from(b);
                            next[i + 1] += c * BigInt::from(a);
                        }
                        coeffs = next;
                    }
                    let p = IntPoly::new(
                        coeffs.iter().map(|c| i64::try_from(c).unwrap()).collect(),
                    );
                    assert!(matches!(
                        poly_semigroup_classifier(&p),
                        PolyClassification::ContainsSemigroup(_)
                    ));
                    for m in 1..=50u64 {
                        for n in m..=50u64 {
                            let lin_m = a as i64 * m as i64 + b;
                            let lin_n = a as i64 * n as i64 + b;
                            // The semigroup lives where the linear part is
                            // positive; e.g. (3·1−5)²·(3·3−5)² = 64 has no
                            // preimage under (3x−5)² even though both
                            // factors are positive squares.
                            if lin_m < 1 || lin_n < 1 {
                                continue;
                            }
                            let pm = p.eval_u64(m);
                            let pn = p.eval_u64(n);
                            let z_num = lin_m as i128 * lin_n as i128 - b as i128;
                            assert_eq!(z_num % a as i128, 0, "a={a} b={b} d={d}");
                            let z = z_num / a as i128;
                            assert!(z >= 1, "a={a} b={b} d={d} m={m} n={n}");
                            assert_eq!(p.eval_u64(z as u64), pm * pn);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn depressed_shift_examples() {
        // (2x+3)² shifts to the pure power y²/16.
        let q = shift_to_depressed(&IntPoly::new(vec![9, 12, 4])).unwrap();
        assert_eq!(q.a, 8);
        assert_eq!(q.b, 12);
        assert_eq!(q.coeffs[2], rational(1, 16));
        assert!(q.coeffs[0].is_zero());
        assert!(q.coeffs[1].is_zero());
        // x² + 1 keeps a nonzero constant.
        let q = shift_to_depressed(&IntPoly::new(vec![1, 0, 1])).unwrap();
        assert!(q.coeffs[1].is_zero()); // the y^{d−1} coefficient always dies
        assert_eq!(q.coeffs[0], rational(1, 1));
    }

    #[test]
    fn depressed_shift_kills_subleading_always() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let d = rng.gen_range(2..=4usize);
            let mut coeffs: Vec<i64> = (0..d).map(|_| rng.gen_range(-9..=9)).collect();
            coeffs.push(rng.gen_range(1..=9));
            let p = IntPoly::new(coeffs);
            if p.degree() < 2 {
                continue;
            }
            let q = shift_to_depressed(&p).unwrap();
            assert!(q.coeffs[p.degree() - 1].is_zero(), "{p}");
        }
    }

    #[test]
    fn classifier_sound_against_depressed_nonpowers() {
        // Random polynomials that are provably not powers of linear forms
        // (some depressed coefficient below y^{d−1} is nonzero) must be
        // classified DoesNot.
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        let mut tested = 0;
        while tested < 100 {
            let d = rng.gen_range(2..=4usize);
            let mut coeffs: Vec<i64> = (0..d).map(|_| rng.gen_range(-4..=4)).collect();
            coeffs.push(rng.gen_range(1..=4));
            let p = IntPoly::new(coeffs);
            if p.degree() != d {
                continue;
            }
            let q = shift_to_depressed(&p).unwrap();
            if q.coeffs[..d - 1].iter().all(|c| c.is_zero()) {
                continue; // a genuine power of a linear form over ℚ
            }
            tested += 1;
            assert!(
                matches!(poly_semigroup_classifier(&p), PolyClassification::DoesNot(_)),
                "{p}"
            );
        }
    }

    #[test]
    fn geometric_search_naturals() {
        let fam = RatFamily::linear(1, 0).unwrap();
        let survivors = geometric_progression_search(&fam, 3, 5).unwrap();
        let pairs: Vec<(u64, u64)> = survivors.iter().map(|s| (s.p, s.q)).collect();
        assert_eq!(pairs, vec![(2, 1), (3, 1)]);
        for s in &survivors {
            assert!(s.inconclusive.is_empty());
            assert_eq!(s.witnesses.len(), 5);
            // (p^k − b)/a = p^k for a=1, b=0.
            for &(k, ref params) in &s.witnesses {
                assert_eq!(params[0], (s.p as i128).pow(k));
            }
        }
    }

    #[test]
    fn geometric_search_squares() {
        let fam = RatFamily::PolyImage { poly: IntPoly::new(vec![0, 0, 1]) };
        let survivors = geometric_progression_search(&fam, 4, 5).unwrap();
        let pairs: Vec<(u64, u64)> = survivors.iter().map(|s| (s.p, s.q)).collect();
        assert_eq!(pairs, vec![(4, 1)]);
        for &(k, ref params) in &survivors[0].witnesses {
            assert_eq!(params[0], 2i128.pow(k)); // 4^k = (2^k)²
        }
    }

    #[test]
    fn geometric_search_pythagorean_families_empty() {
        assert!(geometric_progression_search(&RatFamily::PythagHyp, 12, 6)
            .unwrap()
            .is_empty());
        assert!(geometric_progression_search(&RatFamily::PythagLeg, 12, 6)
            .unwrap()
            .is_empty());
    }

    #[test]
    fn geometric_search_validates_bounds() {
        let fam = RatFamily::linear(1, 0).unwrap();
        assert!(geometric_progression_search(&fam, 1, 5).is_err());
        assert!(geometric_progression_search(&fam, 3, 1).is_err());
    }

    #[test]
    fn closure_violation_examples() {
        // {4n+3 : n ≥ 1} = {7, 11, ...}: 7·7 = 49 ≡ 1 (mod 4).
        let fam = RatFamily::linear(4, 3).unwrap();
        assert_eq!(
            closure_violation_search(&fam, 100).unwrap(),
            Some(ClosureViolation { x: 7, y: 7, product: 49 })
        );
        // Squares are closed.
        let squares = RatFamily::PolyImage { poly: IntPoly::new(vec![0, 0, 1]) };
        assert_eq!(closure_violation_search(&squares, 100).unwrap(), None);
        // 2n²: members {2, 8, 18, ...}; 2·2 = 4 needs n² = 2.
        let twice = RatFamily::PolyImage { poly: IntPoly::new(vec![0, 0, 2]) };
        assert_eq!(
            closure_violation_search(&twice, 100).unwrap(),
            Some(ClosureViolation { x: 2, y: 2, product: 4 })
        );
        // (4x+3)²: members are squares of 7, 11, 15, ...; 49·49 = 2401 =
        // (4z+3)² needs 4z+3 = 49, z = 11.5 — the first violation is the
        // least member pair anyway.
        let fam = RatFamily::PolyImage { poly: IntPoly::new(vec![9, 24, 16]) };
        let v = closure_violation_search(&fam, 3000).unwrap().unwrap();
        assert_eq!((v.x, v.y), (49, 49));
        // Geometric powers of 2 are closed.
        let geo = RatFamily::geometric(2, 1).unwrap();
        assert_eq!(closure_violation_search(&geo, 4096).unwrap(), None);
        // Full ℕ is closed.
        let nat = RatFamily::linear(1, 0).unwrap();
        assert_eq!(closure_violation_search(&nat, 300).unwrap(), None);
    }

    #[test]
    fn closure_violation_rejects_ratio_families() {
        assert!(closure_violation_search(&RatFamily::PythagHyp, 100).is_err());
    }

    #[test]
    fn vanishing_sum_examples() {
        let zeros = vanishing_power_sum(
            &[rational(0, 1), rational(0, 1)],
            &[rational(3, 1), rational(2, 1)],
            10,
        )
        .unwrap();
        assert_eq!(zeros, (1..=10).collect::<Vec<u32>>());

        let zeros = vanishing_power_sum(
            &[rational(1, 1), rational(-1, 1)],
            &[rational(3, 1), rational(2, 1)],
            50,
        )
        .unwrap();
        assert!(zeros.is_empty());

        assert_eq!(
            vanishing_power_sum(
                &[rational(1, 1), rational(-1, 1)],
                &[rational(2, 1), rational(2, 1)],
                10,
            ),
            Err(SemigroupsError::DuplicateAbsoluteValue { i: 0, j: 1 })
        );
        assert_eq!(
            vanishing_power_sum(
                &[rational(1, 1), rational(-1, 1)],
                &[rational(2, 1), rational(-2, 1)],
                10,
            ),
            Err(SemigroupsError::DuplicateAbsoluteValue { i: 0, j: 1 })
        );
        // 3·2^k − 2·3^k vanishes exactly at k = 1.
        let zeros = vanishing_power_sum(
            &[rational(3, 1), rational(-2, 1)],
            &[rational(2, 1), rational(3, 1)],
            40,
        )
        .unwrap();
        assert_eq!(zeros, vec![1]);
    }

    #[test]
    fn vanishing_sum_vandermonde_bound() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        for _ in 0..50 {
            let l = rng.gen_range(2..=4usize);
            let coeffs: Vec<BigRational> =
                (0..l).map(|_| rational(rng.gen_range(-6..=6), rng.gen_range(1..=4))).collect();
            if coeffs.iter().all(|c| c.is_zero()) {
                continue;
            }
            let mut abs_seen = Vec::new();
            let mut bases = Vec::new();
            while bases.len() < l {
                let b = rational(rng.gen_range(-8..=8), rng.gen_range(1..=4));
                if b.is_zero() || abs_seen.contains(&b.abs()) {
                    continue;
                }
                abs_seen.push(b.abs());
                bases.push(b);
            }
            let zeros = vanishing_power_sum(&coeffs, &bases, 30).unwrap();
            assert!(
                zeros.len() <= l - 1,
                "coeffs {coeffs:?} bases {bases:?} zeros {zeros:?}"
            );
        }
    }

    #[test]
    fn fourforms_progressions_empty() {
        assert!(fourforms_progression_check([0, 1, 2, 3], 8, 4, 500).unwrap().is_empty());
        assert!(fourforms_progression_check([0, 1, -1, 2], 6, 4, 500).unwrap().is_empty());
    }

    #[test]
    fn fourforms_single_power_is_easy() {
        // K = 1 is not a progression: single-member hits survive, e.g.
        // (m,n) = (1,1) gives 1·2/(3·4) = 1/6.
        let survivors = fourforms_progression_check([0, 1, 2, 3], 8, 1, 500).unwrap();
        assert!(!survivors.is_empty());
        assert!(survivors.iter().any(|s| (s.p, s.q) == (1, 6)));
        for s in &survivors {
            for &(k, ref params) in &s.witnesses {
                let r = PosRational::from_fraction(s.p, s.q).unwrap().pow(k as i64);
                let (m, n) = (params[0] as u64, params[1] as u64);
                // Re-evaluate the four forms at the witness.
                let f: Vec<i128> = [0i64, 1, 2, 3]
                    .iter()
                    .map(|&li| m as i128 + li as i128 * n as i128)
                    .collect();
                let val = PosRational::from_fraction(
                    (f[0] * f[1]) as u64,
                    (f[2] * f[3]) as u64,
                )
                .unwrap();
                assert_eq!(val, r);
            }
        }
    }
}
