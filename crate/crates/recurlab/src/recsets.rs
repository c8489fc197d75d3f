//! Parametrized families of positive rationals (Möbius-quotient powers,
//! Pythagorean hypotenuse/leg ratios, polynomial and linear images, four
//! linear forms, geometric powers, explicit lists), exact membership tests,
//! and the recurrence classification verdicts with their certificates.

use crate::poly::IntPoly;
use crate::qplus::PosRational;
use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use serde::Serialize;
use std::collections::BTreeSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum RecsetsError {
    #[error("invalid family: {0}")]
    InvalidFamily(String),
    #[error("unsupported for this family: {0}")]
    Unsupported(String),
}

/// A symbolic family R ⊂ ℚ^{>0}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum RatFamily {
    /// {((an+b)/(cn+d))^l : n ∈ ℕ}
    MoebiusPower { a: u64, b: i64, c: u64, d: i64, l: u32 },
    /// {(m²+n²)/(2mn) : m, n ∈ ℕ}
    PythagHyp,
    /// {2mn/(m²−n²) : m > n ≥ 1}
    PythagLeg,
    /// {P(n) : n ∈ ℕ} ∩ ℚ^{>0}
    PolyImage { poly: IntPoly },
    /// {an+b : n ∈ ℕ}
    LinearImage { a: u64, b: u64 },
    /// {(m+l1·n)(m+l2·n) / ((m+l3·n)(m+l4·n)) : m, n ∈ ℕ}, positive values
    FourLinearForms { l: [i64; 4] },
    /// {(p/q)^k : k ∈ ℕ}
    GeometricPowers { p: u64, q: u64 },
    ExplicitList { items: Vec<PosRational> },
}

impl RatFamily {
    pub fn moebius(a: u64, b: i64, c: u64, d: i64, l: u32) -> Result<Self, RecsetsError> {
        if a == 0 || c == 0 || l == 0 {
            return Err(RecsetsError::InvalidFamily(
                "need a ≥ 1, c ≥ 1, l ≥ 1".into(),
            ));
        }
        // Positivity for all n ≥ 1 reduces to positivity at n = 1 because
        // the linear forms are increasing in n.
        if a as i64 + b <= 0 || c as i64 + d <= 0 {
            return Err(RecsetsError::InvalidFamily(format!(
                "linear forms must be positive on ℕ: a+b = {}, c+d = {}",
                a as i64 + b,
                c as i64 + d
            )));
        }
        Ok(RatFamily::MoebiusPower { a, b, c, d, l })
    }

    pub fn linear(a: u64, b: u64) -> Result<Self, RecsetsError> {
        if a == 0 {
            return Err(RecsetsError::InvalidFamily("need a ≥ 1".into()));
        }
        Ok(RatFamily::LinearImage { a, b })
    }

    pub fn four_forms(l: [i64; 4]) -> Result<Self, RecsetsError> {
        for i in 0..4 {
            for j in i + 1..4 {
                if l[i] == l[j] {
                    return Err(RecsetsError::InvalidFamily(
                        "the four coefficients must be pairwise distinct".into(),
                    ));
                }
            }
        }
        Ok(RatFamily::FourLinearForms { l })
    }

    pub fn geometric(p: u64, q: u64) -> Result<Self, RecsetsError> {
        if p == 0 || q == 0 || crate::arith::gcd(p, q) != 1 {
            return Err(RecsetsError::InvalidFamily(
                "need p, q ≥ 1 coprime".into(),
            ));
        }
        Ok(RatFamily::GeometricPowers { p, q })
    }
}

/// Outcome of a membership test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Containment {
    /// Member, with the witnessing parameters (n, (m,n), k, index, ...).
    Yes(Vec<i128>),
    No,
    /// Search budget exhausted without a decision.
    Inconclusive(u64),
}

impl Containment {
    pub fn is_yes(&self) -> bool {
        matches!(self, Containment::Yes(_))
    }
}

fn big(x: i64) -> BigInt {
    BigInt::from(x)
}

/// Witness parameters as i128, omitted entirely if any value overflows
/// (membership itself is still certain).
fn params_of(values: &[BigInt]) -> Vec<i128> {
    let converted: Option<Vec<i128>> = values.iter().map(|v| v.try_into().ok()).collect();
    converted.unwrap_or_default()
}

/// Exact membership of r in the family. `bound` is a search budget for the
/// family kinds without a closed form (four linear forms, deep polynomial
/// scans); closed-form kinds ignore it.
pub fn contains(family: &RatFamily, r: &PosRational, bound: u64) -> Containment {
    let frac = r.to_fraction();
    let s = &frac.num;
    let t = &frac.den;
    match family {
        RatFamily::MoebiusPower { a, b, c, d, l } => {
            let Some(root) = r.nth_root(*l) else {
                return Containment::No;
            };
            let rf = root.to_fraction();
            let (u, v) = (BigInt::from(rf.num), BigInt::from(rf.den));
            let den = big(*a as i64) * &v - big(*c as i64) * &u;
            let num = big(*d) * &u - big(*b) * &v;
            if den.is_zero() {
                // ρ equals the limit a/c; a member only if the family is constant.
                return if num.is_zero() {
                    Containment::Yes(vec![1])
                } else {
                    Containment::No
                };
            }
            if (&num % &den).is_zero() {
                let n = num / den;
                if n.is_positive() {
                    return Containment::Yes(params_of(&[n]));
                }
            }
            Containment::No
        }
        RatFamily::PythagHyp => {
            // r = s/t reduced is (m²+n²)/(2mn) iff s ≥ t and s²−t² is a
            // perfect square w²; then m/n = (s+w)/t.
            if s < t {
                return Containment::No;
            }
            let disc = s * s - t * t;
            let w = disc.sqrt();
            if &w * &w != disc {
                return Containment::No;
            }
            let mm = s + &w;
            let g = num_integer::gcd(mm.clone(), t.clone());
            let m = BigInt::from(&mm / &g);
            let n = BigInt::from(t / &g);
            Containment::Yes(params_of(&[m, n]))
        }
        RatFamily::PythagLeg => {
            // r = s/t reduced is 2mn/(m²−n²) iff s²+t² is a perfect square
            // w²; then m/n = (t+w)/s and m > n holds automatically.
            let disc = s * s + t * t;
            let w = disc.sqrt();
            if &w * &w != disc {
                return Containment::No;
            }
            let mm = t + &w;
            let g = num_integer::gcd(mm.clone(), s.clone());
            let m = BigInt::from(&mm / &g);
            let n = BigInt::from(s / &g);
            Containment::Yes(params_of(&[m, n]))
        }
        RatFamily::LinearImage { a, b } => {
            use num_traits::One;
            if !t.is_one() {
                return Containment::No;
            }
            let w = BigInt::from(s.clone());
            let num = &w - big(*b as i64);
            let den = big(*a as i64);
            if (&num % &den).is_zero() {
                let n = num / den;
                if n.is_positive() {
                    return Containment::Yes(params_of(&[n]));
                }
            }
            Containment::No
        }
        RatFamily::PolyImage { poly } => {
            use num_traits::One;
            if !t.is_one() {
                return Containment::No;
            }
            let w = BigInt::from(s.clone());
            poly_attains(poly, &w, bound)
        }
        RatFamily::FourLinearForms { l } => {
            let sb = BigInt::from(s.clone());
            let tb = BigInt::from(t.clone());
            for m in 1..=bound {
                for n in 1..=bound {
                    let f: Vec<BigInt> = l
                        .iter()
                        .map(|&li| big(m as i64) + big(li) * big(n as i64))
                        .collect();
                    let num = &f[0] * &f[1];
                    let den = &f[2] * &f[3];
                    if den.is_zero() || (num.sign() != den.sign()) || num.is_zero() {
                        continue;
                    }
                    if &num * &tb == &den * &sb {
                        return Containment::Yes(vec![m as i128, n as i128]);
                    }
                }
            }
            Containment::Inconclusive(bound)
        }
        RatFamily::GeometricPowers { p, q } => {
            if p == q {
                // Coprimality forces p = q = 1: the constant family {1}.
                return if r.is_one() {
                    Containment::Yes(vec![1])
                } else {
                    Containment::No
                };
            }
            let (pb, qb) = (BigUint::from(*p), BigUint::from(*q));
            let mut ph = pb.clone();
            let mut qh = qb.clone();
            let mut k: i128 = 1;
            loop {
                if &ph == s && &qh == t {
                    return Containment::Yes(vec![k]);
                }
                if &ph > s || &qh > t {
                    return Containment::No;
                }
                ph *= &pb;
                qh *= &qb;
                k += 1;
            }
        }
        RatFamily::ExplicitList { items } => {
            match items.iter().position(|x| x == r) {
                Some(i) => Containment::Yes(vec![i as i128]),
                None => Containment::No,
            }
        }
    }
}

/// Does P attain the value w at some n ≥ 1? Exact for polynomials whose
/// increasing tail starts within the budget; Inconclusive otherwise.
fn poly_attains(poly: &IntPoly, w: &BigInt, bound: u64) -> Containment {
    if poly.is_constant() {
        return if &poly.eval_u64(1) == w {
            Containment::Yes(vec![1])
        } else {
            Containment::No
        };
    }
    match poly.increasing_from() {
        Some(n0) => {
            let scan_to = n0.min(bound.max(1));
            for n in 1..=scan_to {
                if &poly.eval_u64(n) == w {
                    return Containment::Yes(vec![n as i128]);
                }
            }
            if n0 > bound.max(1) {
                return Containment::Inconclusive(bound);
            }
            // Strictly increasing beyond n0 with integer steps ≥ 1.
            let base = poly.eval_u64(n0);
            if &base > w {
                return Containment::No;
            }
            let span: u64 = (w - &base).try_into().unwrap_or(u64::MAX);
            let mut lo = n0;
            let mut hi = n0.saturating_add(span).max(n0);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if &poly.eval_u64(mid) < w {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            if &poly.eval_u64(lo) == w {
                Containment::Yes(vec![lo as i128])
            } else {
                Containment::No
            }
        }
        None => {
            // Non-positive leading coefficient: only finitely many positive
            // values, all below the Cauchy root bound of P − w.
            let lead = poly.leading();
            if lead == 0 {
                return Containment::No;
            }
            let max_low = poly.coeffs()[..poly.coeffs().len() - 1]
                .iter()
                .map(|c| c.unsigned_abs() as u128)
                .max()
                .unwrap_or(0)
                .max(w.abs().try_into().unwrap_or(u128::MAX));
            let root_bound = 2 + max_low / lead.unsigned_abs() as u128;
            let cap = u64::try_from(root_bound).unwrap_or(u64::MAX);
            if cap > bound.max(1) {
                return Containment::Inconclusive(bound);
            }
            for n in 1..=cap {
                if &poly.eval_u64(n) == w {
                    return Containment::Yes(vec![n as i128]);
                }
            }
            Containment::No
        }
    }
}

/// Enumerate members with parameters up to `param_bound`, as reduced
/// positive rationals (deduplicated, sorted by (num, den) of the reduced
/// fraction). Values that do not fit in u64 are skipped.
pub fn enumerate_members(family: &RatFamily, param_bound: u64) -> Vec<PosRational> {
    let mut out: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut push = |num: u128, den: u128| {
        if num == 0 || den == 0 {
            return;
        }
        let g = num_integer::gcd(num, den);
        let (n, d) = (num / g, den / g);
        if let (Ok(n), Ok(d)) = (u64::try_from(n), u64::try_from(d)) {
            out.insert((n, d));
        }
    };
    match family {
        RatFamily::MoebiusPower { a, b, c, d, l } => {
            for n in 1..=param_bound {
                let num = *a as i128 * n as i128 + *b as i128;
                let den = *c as i128 * n as i128 + *d as i128;
                if num <= 0 || den <= 0 {
                    continue;
                }
                let g = num_integer::gcd(num as u128, den as u128);
                let (p, q) = (num as u128 / g, den as u128 / g);
                if let (Some(ph), Some(qh)) =
                    (p.checked_pow(*l), q.checked_pow(*l))
                {
                    push(ph, qh);
                }
            }
        }
        RatFamily::PythagHyp => {
            for m in 1..=param_bound {
                for n in 1..=param_bound {
                    push((m as u128) * m as u128 + (n as u128) * n as u128, 2 * m as u128 * n as u128);
                }
            }
        }
        RatFamily::PythagLeg => {
            for m in 2..=param_bound {
                for n in 1..m {
                    push(2 * m as u128 * n as u128, (m as u128) * m as u128 - (n as u128) * n as u128);
                }
            }
        }
        RatFamily::PolyImage { poly } => {
            for n in 1..=param_bound {
                let v = poly.eval_u64(n);
                if v.is_positive() {
                    if let Ok(v) = u128::try_from(&v) {
                        push(v, 1);
                    }
                }
            }
        }
        RatFamily::LinearImage { a, b } => {
            for n in 1..=param_bound {
                push(*a as u128 * n as u128 + *b as u128, 1);
            }
        }
        RatFamily::FourLinearForms { l } => {
            for m in 1..=param_bound {
                for n in 1..=param_bound {
                    let f: Vec<i128> = l.iter().map(|&li| m as i128 + li as i128 * n as i128).collect();
                    let num = f[0] * f[1];
                    let den = f[2] * f[3];
                    if den != 0 && num != 0 && (num > 0) == (den > 0) {
                        push(num.unsigned_abs(), den.unsigned_abs());
                    }
                }
            }
        }
        RatFamily::GeometricPowers { p, q } => {
            for k in 1..=param_bound.min(127) {
                if let (Some(ph), Some(qh)) = (
                    (*p as u128).checked_pow(k as u32),
                    (*q as u128).checked_pow(k as u32),
                ) {
                    push(ph, qh);
                } else {
                    break;
                }
            }
        }
        RatFamily::ExplicitList { items } => {
            for r in items {
                if let Some((n, d)) = r.to_fraction().to_u64_pair() {
                    push(n as u128, d as u128);
                }
            }
        }
    }
    out.into_iter()
        .map(|(n, d)| PosRational::from_fraction(n, d).expect("reduced pair is valid"))
        .collect()
}

/// The family's reduced ratios oriented as (hi, lo) with hi > lo, capped at
/// hi ≤ max_hi. Used by the monochromatic-pair search: every candidate pair
/// is (t·lo, t·hi).
#[derive(Debug, Clone)]
pub struct RatioSet {
    pub ratios: Vec<(u64, u64)>,
    /// 1 ∈ R (pairs degenerate to x = y).
    pub contains_one: bool,
    /// False when an open-ended sweep was truncated by an internal cap, so
    /// absence of a pair is not conclusive for this family kind.
    pub complete: bool,
}

pub fn oriented_ratios(family: &RatFamily, max_hi: u64) -> RatioSet {
    let mut ratios: BTreeSet<(u64, u64)> = BTreeSet::new();
    let mut contains_one = false;
    let mut complete = true;
    let mut push = |p: u128, q: u128, one: &mut bool| {
        if p == q {
            *one = true;
            return;
        }
        let (hi, lo) = if p > q { (p, q) } else { (q, p) };
        if let (Ok(hi), Ok(lo)) = (u64::try_from(hi), u64::try_from(lo)) {
            ratios.insert((hi, lo));
        }
    };
    let max_hi = max_hi.max(1);
    match family {
        RatFamily::MoebiusPower { a, b, c, d, l } => {
            // Reduced side bound: gcd(an+b, cn+d) divides |ad − cb|.
            let delta = (*a as i128 * *d as i128 - *c as i128 * *b as i128).unsigned_abs();
            if delta == 0 {
                // Constant family.
                let num = *a as i128 + *b as i128;
                let den = *c as i128 + *d as i128;
                let g = num_integer::gcd(num as u128, den as u128);
                let (p, q) = (num as u128 / g, den as u128 / g);
                if let (Some(ph), Some(qh)) = (p.checked_pow(*l), q.checked_pow(*l)) {
                    push(ph, qh, &mut contains_one);
                }
            } else {
                // Root-side cap: hi = side^l ≤ max_hi.
                let mut side_cap = max_hi;
                if *l > 1 {
                    side_cap = (2..=max_hi)
                        .find(|s| s.checked_pow(*l).map_or(true, |v| v > max_hi))
                        .map(|s| s - 1)
                        .unwrap_or(1);
                }
                for n in 1.. {
                    let num = *a as i128 * n + *b as i128;
                    let den = *c as i128 * n + *d as i128;
                    if num <= 0 || den <= 0 {
                        continue;
                    }
                    // Both reduced sides exceed the cap from here on out.
                    if num.min(den) as u128 > (side_cap as u128) * delta {
                        break;
                    }
                    let g = num_integer::gcd(num as u128, den as u128);
                    let (p, q) = (num as u128 / g, den as u128 / g);
                    if p.max(q) <= side_cap as u128 {
                        if let (Some(ph), Some(qh)) = (p.checked_pow(*l), q.checked_pow(*l)) {
                            push(ph, qh, &mut contains_one);
                        }
                    }
                }
            }
        }
        RatFamily::LinearImage { a, b } => {
            let mut n = 1u64;
            loop {
                let Some(v) = a.checked_mul(n).and_then(|x| x.checked_add(*b)) else {
                    break;
                };
                if v > max_hi {
                    break;
                }
                push(v as u128, 1, &mut contains_one);
                n += 1;
            }
        }
        RatFamily::GeometricPowers { p, q } => {
            if p == q {
                contains_one = true;
            } else {
                let mut ph = *p as u128;
                let mut qh = *q as u128;
                while ph.max(qh) <= max_hi as u128 {
                    push(ph, qh, &mut contains_one);
                    match (ph.checked_mul(*p as u128), qh.checked_mul(*q as u128)) {
                        (Some(a), Some(b)) => {
                            ph = a;
                            qh = b;
                        }
                        _ => break,
                    }
                }
            }
        }
        RatFamily::PolyImage { poly } => {
            match poly.increasing_from() {
                Some(n0) => {
                    let mut n = 1u64;
                    loop {
                        let v = poly.eval_u64(n);
                        if n >= n0 && v > BigInt::from(max_hi) {
                            break;
                        }
                        if v.is_positive() {
                            if let Ok(v) = u128::try_from(&v) {
                                if v <= max_hi as u128 {
                                    push(v, 1, &mut contains_one);
                                }
                            }
                        }
                        n += 1;
                    }
                }
                None => {
                    // Finitely many positive values; sweep to the root bound.
                    let cap = 4 + poly
                        .coeffs()
                        .iter()
                        .map(|c| c.unsigned_abs())
                        .max()
                        .unwrap_or(0);
                    for n in 1..=cap.min(1 << 22) {
                        let v = poly.eval_u64(n);
                        if v.is_positive() {
                            if let Ok(v) = u128::try_from(&v) {
                                if v <= max_hi as u128 {
                                    push(v, 1, &mut contains_one);
                                }
                            }
                        }
                    }
                    if cap > 1 << 22 {
                        complete = false;
                    }
                }
            }
        }
        RatFamily::PythagHyp => {
            // Reduced hi is (m²+n²)/gcd ≥ (m²+n²)/2 over coprime (m, n).
            let m_cap = (2 * max_hi as u128).isqrt() as u64 + 1;
            for m in 1..=m_cap {
                for n in 1..=m {
                    if crate::arith::gcd(m, n) != 1 {
                        continue;
                    }
                    let num = m as u128 * m as u128 + n as u128 * n as u128;
                    let den = 2 * m as u128 * n as u128;
                    let g = num_integer::gcd(num, den);
                    if num / g <= max_hi as u128 {
                        push(num / g, den / g, &mut contains_one);
                    }
                }
            }
        }
        RatFamily::PythagLeg => {
            // max(2mn, m²−n²) ≥ 3m²/4 and gcd ≤ 2, so reduced hi ≥ 3m²/8.
            let m_cap = ((8 * max_hi as u128 / 3).isqrt() as u64) + 2;
            for m in 2..=m_cap {
                for n in 1..m {
                    if crate::arith::gcd(m, n) != 1 {
                        continue;
                    }
                    let num = 2 * m as u128 * n as u128;
                    let den = m as u128 * m as u128 - n as u128 * n as u128;
                    let g = num_integer::gcd(num, den);
                    if (num / g).max(den / g) <= max_hi as u128 {
                        push(num / g, den / g, &mut contains_one);
                    }
                }
            }
        }
        RatFamily::FourLinearForms { l } => {
            // No simple closed-form cap; sweep a fixed window and mark the
            // enumeration incomplete so no-pair results stay inconclusive.
            const CAP: u64 = 2000;
            complete = false;
            for m in 1..=CAP {
                for n in 1..=CAP {
                    let f: Vec<i128> =
                        l.iter().map(|&li| m as i128 + li as i128 * n as i128).collect();
                    let num = f[0] * f[1];
                    let den = f[2] * f[3];
                    if den == 0 || num == 0 || (num > 0) != (den > 0) {
                        continue;
                    }
                    let (num, den) = (num.unsigned_abs(), den.unsigned_abs());
                    let g = num_integer::gcd(num, den);
                    if (num / g).max(den / g) <= max_hi as u128 {
                        push(num / g, den / g, &mut contains_one);
                    }
                }
            }
        }
        RatFamily::ExplicitList { items } => {
            for r in items {
                if r.is_one() {
                    contains_one = true;
                    continue;
                }
                match r.to_fraction().to_u64_pair() {
                    Some((n, d)) if n.max(d) <= max_hi => {
                        push(n as u128, d as u128, &mut contains_one)
                    }
                    _ => complete = false,
                }
            }
        }
    }
    RatioSet {
        ratios: ratios.into_iter().collect(),
        contains_one,
        complete,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    RecurrentProved,
    NotRecurrentProved,
    Unknown,
}

/// Machine-checkable data backing a verdict.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Certificate {
    /// Family accumulates only at (a/c)^l ∉ {0, 1, ∞}: an open window
    /// around the limit separates the family from every dilation class.
    LimitWindow { limit_num: u128, limit_den: u128 },
    /// The p-adic residue coloring (p, u), lifted through l-th powers when
    /// l > 1, admits no monochromatic ratio pair from the family.
    PadicColoring { p: u64, u: u32, l: u32 },
    /// A finite multiplicative system in which T_n fixes no state for any
    /// n ≡ b (mod a).
    ObstructionSystem { a: u64, b: u64 },
    /// The family contains a dilation-shift subfamily {(am+s)/am} (after
    /// inversion when `inverted`); recurrence transfers through containment.
    Containment {
        sign: i8,
        inverted: bool,
        divisor_side: char,
    },
    /// The family is the constant {1}.
    ConstantFamily,
    /// aℕ+b is multiplicatively closed because a | b(b−1).
    SemigroupClosure { a: u64, b: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub status: Status,
    pub reason: String,
    pub certificate: Option<Certificate>,
}

/// Classification of {((an+b)/(cn+d))^l}.
pub fn classify_moebius(
    a: u64,
    b: i64,
    c: u64,
    d: i64,
    l: u32,
) -> Result<Verdict, RecsetsError> {
    RatFamily::moebius(a, b, c, d, l)?;
    if a != c {
        let (ln, ld) = {
            let g = crate::arith::gcd(a, c);
            ((a / g) as u128, (c / g) as u128)
        };
        return Ok(Verdict {
            status: Status::NotRecurrentProved,
            reason: "limit-accumulation".into(),
            certificate: Some(Certificate::LimitWindow {
                limit_num: ln.pow(l),
                limit_den: ld.pow(l),
            }),
        });
    }
    if b == d {
        return Ok(Verdict {
            status: Status::RecurrentProved,
            reason: "constant-family".into(),
            certificate: Some(Certificate::ConstantFamily),
        });
    }
    if let Some(p) = crate::arith::factorize(a)
        .expect("a ≥ 1 fits the factorization ceiling")
        .pairs()
        .iter()
        .map(|&(p, _)| p)
        .find(|&p| (b % p as i64 != 0) && (d % p as i64 != 0))
    {
        // p | a but p ∤ bd: the residue coloring mod p^u with p^u ∤ (b−d).
        let vp = {
            let mut v = 0u32;
            let mut m = (b - d).unsigned_abs();
            while m % p == 0 {
                m /= p;
                v += 1;
            }
            v
        };
        return Ok(Verdict {
            status: Status::NotRecurrentProved,
            reason: "padic-obstruction".into(),
            certificate: Some(Certificate::PadicColoring { p, u: vp + 1, l }),
        });
    }
    let a_div = |x: i64| x.rem_euclid(a as i64) == 0;
    if a_div(b) || a_div(d) {
        let reduction = containment_reduction(a, b, d).expect("divisibility just checked");
        return Ok(Verdict {
            status: Status::RecurrentProved,
            reason: "divisor-containment".into(),
            certificate: Some(Certificate::Containment {
                sign: reduction.sign,
                inverted: reduction.inverted,
                divisor_side: reduction.divisor_side,
            }),
        });
    }
    Ok(Verdict {
        status: Status::Unknown,
        reason: "unknown-boundary".into(),
        certificate: None,
    })
}

/// The dilation-shift subfamily witnessing part (3): with a | d the family
/// {(an+b)/(an+d)} contains {(am+s)/am} (s = sgn(b−d)) along the residue
/// class n ≡ −d/a (mod |b−d|); with a | b the transposed family does, and
/// membership transfers through inversion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContainmentReduction {
    pub sign: i8,
    pub inverted: bool,
    pub divisor_side: char,
    /// n(m) = modulus·m − offset lands the reduced member inside the family.
    pub modulus: u64,
    pub offset: i64,
}

pub fn containment_reduction(a: u64, b: i64, d: i64) -> Option<ContainmentReduction> {
    if b == d {
        return None;
    }
    let ai = a as i64;
    if d.rem_euclid(ai) == 0 {
        let d1 = d / ai;
        Some(ContainmentReduction {
            sign: if b > d { 1 } else { -1 },
            inverted: false,
            divisor_side: 'd',
            modulus: (b - d).unsigned_abs(),
            offset: d1,
        })
    } else if b.rem_euclid(ai) == 0 {
        let b1 = b / ai;
        Some(ContainmentReduction {
            sign: if d > b { 1 } else { -1 },
            inverted: true,
            divisor_side: 'b',
            modulus: (d - b).unsigned_abs(),
            offset: b1,
        })
    } else {
        None
    }
}

impl ContainmentReduction {
    /// The m-th member of {(am+s)/am}, mapped back into the original family
    /// (raised to the l-th power, inverted when needed). Returns the member
    /// together with the original-family parameter n.
    pub fn embedded_member(&self, a: u64, l: u32, m: u64) -> Option<(PosRational, i64)> {
        let n = self.modulus as i64 * m as i64 - self.offset;
        if n < 1 {
            return None;
        }
        let am = a as i64 * m as i64;
        let num = am + self.sign as i64;
        if num < 1 {
            return None;
        }
        let base = PosRational::from_fraction(num as u64, am as u64).ok()?;
        let mut r = base.pow(l as i64);
        if self.inverted {
            r = r.inverse();
        }
        Some((r, n))
    }
}

/// Does the family accumulate at 0, 1, or ∞ (a necessary condition for
/// recurrence)?
pub fn accumulation_check(family: &RatFamily) -> Result<bool, RecsetsError> {
    match family {
        RatFamily::MoebiusPower { a, c, .. } => Ok(a == c),
        RatFamily::GeometricPowers { .. } => Ok(true),
        RatFamily::LinearImage { .. } => Ok(true),
        RatFamily::PolyImage { poly } => {
            if poly.is_constant() {
                Ok(poly.coeffs()[0] == 1)
            } else {
                Ok(poly.leading() > 0)
            }
        }
        other => Err(RecsetsError::Unsupported(format!(
            "no computed limit set for {other:?}"
        ))),
    }
}

/// Classification of {an+b}: recurrent iff a | b(b−1).
pub fn classify_linear(a: u64, b: u64) -> Result<Verdict, RecsetsError> {
    if a == 0 {
        return Err(RecsetsError::InvalidFamily("need a ≥ 1".into()));
    }
    let crit = (b as u128 * (b as u128 + a as u128 - 1)) % a as u128 == 0;
    // b(b−1) mod a, written to stay in unsigned arithmetic for b = 0.
    if crit {
        Ok(Verdict {
            status: Status::RecurrentProved,
            reason: "closure-criterion".into(),
            certificate: Some(Certificate::SemigroupClosure { a, b }),
        })
    } else {
        Ok(Verdict {
            status: Status::NotRecurrentProved,
            reason: "residue-system".into(),
            certificate: Some(Certificate::ObstructionSystem { a, b: b % a }),
        })
    }
}

/// Residue-sweep divisibility report for P.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Divisibility {
    /// Every q ≤ q_bound divides some value of P.
    Divisible { q_bound: u64 },
    /// The least q with no root of P mod q, plus the full residue table
    /// P(0), ..., P(q−1) mod q.
    NotDivisible { q: u64, residues: Vec<u64> },
}

pub fn is_divisible_poly(poly: &IntPoly, q_bound: u64) -> Divisibility {
    for q in 2..=q_bound {
        let residues: Vec<u64> = (0..q).map(|n| horner_mod(poly, n, q)).collect();
        if !residues.contains(&0) {
            return Divisibility::NotDivisible { q, residues };
        }
    }
    Divisibility::Divisible { q_bound }
}

fn horner_mod(poly: &IntPoly, n: u64, q: u64) -> u64 {
    let n = n % q;
    let mut acc: u64 = 0;
    for &c in poly.coeffs().iter().rev() {
        let c = (c.rem_euclid(q as i64)) as u64;
        acc = ((acc as u128 * n as u128 + c as u128) % q as u128) as u64;
    }
    acc
}
