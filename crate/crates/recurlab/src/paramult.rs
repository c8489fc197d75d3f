//! Matrix-embedded star semigroups on lattice points and their determinant
//! value functions.
//!
//! A semigroup structure on k-tuples of positive integers is described by k
//! linearly independent integer d×d generator matrices M₁..M_k through the
//! linear embedding ψ(n) = Σ nᵢMᵢ; the partial product is
//! n ∗ m = ψ⁻¹(ψ(n)·ψ(m)) whenever the matrix product lands back on a lattice
//! point of the embedded cone. The value function is |det ψ(n)|, its exact
//! integer square root, or a signed integer power of it.
//!
//! All definedness, integrality, and equality decisions are exact: matrix
//! arithmetic is checked i128, the preimage solve uses a precomputed integer
//! left inverse with a single positive denominator, and values are big
//! rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Deserialize;
use std::fmt;
use thiserror::Error;

/// Largest supported arity k of the lattice domain.
pub const MAX_ARITY: usize = 6;
/// Largest supported matrix dimension d.
pub const MAX_DIM: usize = 6;
/// Cap on the total work items (points or point pairs) a sweep may enumerate.
pub const MAX_TOTAL: u64 = 1 << 28;

#[derive(Debug, Error)]
pub enum ParamultError {
    #[error("point coordinates must all be at least 1 (and arity at least 1)")]
    InvalidPoint,
    #[error("arity must be 1..=6 and matrix size 1..=6")]
    DimensionOutOfRange,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("generators are linearly dependent; the embedding is not injective")]
    NotInjective,
    #[error("the determinant vanishes at every probe point; the value function is degenerate")]
    DegenerateDeterminant,
    #[error("determinant {det} is not a perfect square")]
    NonSquareDeterminant { det: i128 },
    #[error("integer overflow in exact matrix arithmetic")]
    ArithmeticOverflow,
    #[error("bound must be at least 1 and keep the enumeration within budget")]
    InvalidBound,
    #[error("semigroup description is invalid: {0}")]
    Parse(String),
}

fn overflow() -> ParamultError {
    ParamultError::ArithmeticOverflow
}

// ---------------------------------------------------------------------------
// Integer matrices
// ---------------------------------------------------------------------------

/// Dense square integer matrix with checked arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntMatrix {
    d: usize,
    entries: Vec<i128>,
}

impl IntMatrix {
    pub fn zero(d: usize) -> Self {
        IntMatrix { d, entries: vec![0; d * d] }
    }

    pub fn identity(d: usize) -> Self {
        let mut m = IntMatrix::zero(d);
        for i in 0..d {
            m.entries[i * d + i] = 1;
        }
        m
    }

    /// Builds a d×d matrix from rows, rejecting ragged or non-square input.
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, ParamultError> {
        let d = rows.len();
        let mut entries = Vec::with_capacity(d * d);
        for row in rows {
            if row.len() != d {
                return Err(ParamultError::DimensionMismatch { expected: d, found: row.len() });
            }
            entries.extend(row.iter().map(|&e| e as i128));
        }
        Ok(IntMatrix { d, entries })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn entry(&self, r: usize, c: usize) -> i128 {
        self.entries[r * self.d + c]
    }

    fn set(&mut self, r: usize, c: usize, v: i128) {
        self.entries[r * self.d + c] = v;
    }

    /// Row-major flattening; the lattice embedding treats this as a vector in
    /// d²-space.
    pub fn flat(&self) -> &[i128] {
        &self.entries
    }

    pub fn checked_mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, ParamultError> {
        if self.d != rhs.d {
            return Err(ParamultError::DimensionMismatch { expected: self.d, found: rhs.d });
        }
        let d = self.d;
        let mut out = IntMatrix::zero(d);
        for r in 0..d {
            for c in 0..d {
                let mut acc: i128 = 0;
                for t in 0..d {
                    let term = self.entry(r, t).checked_mul(rhs.entry(t, c)).ok_or_else(overflow)?;
                    acc = acc.checked_add(term).ok_or_else(overflow)?;
                }
                out.set(r, c, acc);
            }
        }
        Ok(out)
    }

    /// Exact determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> Result<i128, ParamultError> {
        let d = self.d;
        if d == 0 {
            return Ok(1);
        }
        let mut a = self.entries.clone();
        let mut sign: i128 = 1;
        let mut prev: i128 = 1;
        for k in 0..d.saturating_sub(1) {
            if a[k * d + k] == 0 {
                let Some(swap) = (k + 1..d).find(|&r| a[r * d + k] != 0) else {
                    return Ok(0);
                };
                for c in 0..d {
                    a.swap(k * d + c, swap * d + c);
                }
                sign = -sign;
            }
            for i in k + 1..d {
                for j in k + 1..d {
                    let t1 = a[i * d + j].checked_mul(a[k * d + k]).ok_or_else(overflow)?;
                    let t2 = a[i * d + k].checked_mul(a[k * d + j]).ok_or_else(overflow)?;
                    let num = t1.checked_sub(t2).ok_or_else(overflow)?;
                    a[i * d + j] = num / prev;
                }
                a[i * d + k] = 0;
            }
            prev = a[k * d + k];
        }
        a[d * d - 1].checked_mul(sign).ok_or_else(overflow)
    }

    fn minor(&self, skip_r: usize, skip_c: usize) -> IntMatrix {
        let d = self.d;
        let mut m = IntMatrix::zero(d - 1);
        let mut rr = 0;
        for r in 0..d {
            if r == skip_r {
                continue;
            }
            let mut cc = 0;
            for c in 0..d {
                if c == skip_c {
                    continue;
                }
                m.set(rr, cc, self.entry(r, c));
                cc += 1;
            }
            rr += 1;
        }
        m
    }

    /// Adjugate matrix: adj(A)·A = det(A)·I, computed by exact cofactors.
    pub fn adjugate(&self) -> Result<IntMatrix, ParamultError> {
        let d = self.d;
        let mut adj = IntMatrix::zero(d);
        for r in 0..d {
            for c in 0..d {
                let dm = self.minor(r, c).determinant()?;
                let signed = if (r + c) % 2 == 0 { dm } else { dm.checked_neg().ok_or_else(overflow)? };
                adj.set(c, r, signed);
            }
        }
        Ok(adj)
    }
}

// ---------------------------------------------------------------------------
// Domain types
// ---------------------------------------------------------------------------

/// How the value function is read off the determinant of the embedding.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    /// |det ψ(n)|.
    AbsDet,
    /// Exact integer square root of det ψ(n); errors when det is negative or
    /// not a perfect square.
    SqrtDet,
    /// |det ψ(n)|^ℓ as an exact rational (zero stays zero for every ℓ).
    DetPower(i32),
}

/// A point of the lattice domain: k coordinates, each at least 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StarPoint(Vec<u64>);

impl StarPoint {
    pub fn new(coords: Vec<u64>) -> Result<Self, ParamultError> {
        if coords.is_empty() || coords.iter().any(|&c| c == 0) {
            return Err(ParamultError::InvalidPoint);
        }
        Ok(StarPoint(coords))
    }

    pub fn coords(&self) -> &[u64] {
        &self.0
    }

    /// Squared Euclidean norm, exact.
    pub fn norm_sq(&self) -> BigInt {
        self.0.iter().map(|&c| BigInt::from(c) * BigInt::from(c)).sum()
    }
}

impl fmt::Display for StarPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Outcome of the partial star product.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StarOutcome {
    /// The matrix product is the embedding of this lattice point.
    Defined(StarPoint),
    /// The unique preimage exists in the generator span but has a coordinate
    /// below 1 or a non-integer coordinate; the exact raw coordinates are
    /// reported.
    OutsideCone(Vec<BigRational>),
    /// The matrix product is not in the linear span of the generators.
    NotInImage,
}

impl fmt::Display for StarOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StarOutcome::Defined(p) => write!(f, "defined {p}"),
            StarOutcome::OutsideCone(raw) => {
                write!(f, "outside-cone (")?;
                for (i, r) in raw.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{r}")?;
                }
                write!(f, ")")
            }
            StarOutcome::NotInImage => write!(f, "not-in-image"),
        }
    }
}

/// A matrix-embedded semigroup structure on k-tuples of positive integers.
#[derive(Debug, Clone)]
pub struct StarSemigroup {
    name: String,
    k: usize,
    d: usize,
    generators: Vec<IntMatrix>,
    value_kind: ValueKind,
    /// Integer left inverse: preimage coordinates are (left_inv · flat)/den.
    left_inv: Vec<Vec<i128>>,
    /// Positive common denominator of the left inverse.
    den: i128,
}

impl StarSemigroup {
    /// Validates the generators (square d×d, linearly independent, determinant
    /// not identically zero) and precomputes the exact preimage solver.
    pub fn new(
        name: impl Into<String>,
        d: usize,
        generators: Vec<IntMatrix>,
        value_kind: ValueKind,
    ) -> Result<Self, ParamultError> {
        let k = generators.len();
        if !(1..=MAX_ARITY).contains(&k) || !(1..=MAX_DIM).contains(&d) {
            return Err(ParamultError::DimensionOutOfRange);
        }
        for g in &generators {
            if g.dim() != d {
                return Err(ParamultError::DimensionMismatch { expected: d, found: g.dim() });
            }
        }
        // Gram matrix of the generators viewed as vectors in d²-space.
        let mut gram = IntMatrix::zero(k);
        for i in 0..k {
            for j in 0..k {
                let mut acc: i128 = 0;
                for c in 0..d * d {
                    let term = generators[i].flat()[c]
                        .checked_mul(generators[j].flat()[c])
                        .ok_or_else(overflow)?;
                    acc = acc.checked_add(term).ok_or_else(overflow)?;
                }
                gram.set(i, j, acc);
            }
        }
        let den = gram.determinant()?;
        if den == 0 {
            return Err(ParamultError::NotInjective);
        }
        debug_assert!(den > 0, "Gram determinant of independent vectors is positive");
        let adj = gram.adjugate()?;
        // left_inv = adj(Gram) · Nᵀ where the columns of N are the flattened
        // generators; then left_inv · N = den · I.
        let mut left_inv = vec![vec![0i128; d * d]; k];
        for i in 0..k {
            for c in 0..d * d {
                let mut acc: i128 = 0;
                for j in 0..k {
                    let term =
                        adj.entry(i, j).checked_mul(generators[j].flat()[c]).ok_or_else(overflow)?;
                    acc = acc.checked_add(term).ok_or_else(overflow)?;
                }
                left_inv[i][c] = acc;
            }
        }
        let sg = StarSemigroup { name: name.into(), k, d, generators, value_kind, left_inv, den };
        // The value function must not vanish identically: probe a small box.
        let mut degenerate = true;
        'probe: for p in lattice_points(k, 3.min(u64::MAX)) {
            if sg.embed(&p)?.determinant()? != 0 {
                degenerate = false;
                break 'probe;
            }
        }
        if degenerate {
            return Err(ParamultError::DegenerateDeterminant);
        }
        Ok(sg)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn value_kind(&self) -> ValueKind {
        self.value_kind
    }

    pub fn generators(&self) -> &[IntMatrix] {
        &self.generators
    }

    /// ψ(n) = Σ nᵢ·Mᵢ.
    pub fn embed(&self, n: &StarPoint) -> Result<IntMatrix, ParamultError> {
        if n.coords().len() != self.k {
            return Err(ParamultError::DimensionMismatch { expected: self.k, found: n.coords().len() });
        }
        let d = self.d;
        let mut out = IntMatrix::zero(d);
        for (coord, gen) in n.coords().iter().zip(&self.generators) {
            let c = i128::from(*coord);
            for idx in 0..d * d {
                let term = gen.flat()[idx].checked_mul(c).ok_or_else(overflow)?;
                out.entries[idx] = out.entries[idx].checked_add(term).ok_or_else(overflow)?;
            }
        }
        Ok(out)
    }

    /// The value function at n, per the semigroup's value kind.
    pub fn eval_f(&self, n: &StarPoint) -> Result<BigRational, ParamultError> {
        let det = self.embed(n)?.determinant()?;
        self.value_of_det(det)
    }

    fn value_of_det(&self, det: i128) -> Result<BigRational, ParamultError> {
        match self.value_kind {
            ValueKind::AbsDet => Ok(BigRational::from(BigInt::from(det.unsigned_abs()))),
            ValueKind::SqrtDet => {
                let root = exact_sqrt_i128(det)
                    .ok_or(ParamultError::NonSquareDeterminant { det })?;
                Ok(BigRational::from(BigInt::from(root)))
            }
            ValueKind::DetPower(l) => {
                if det == 0 {
                    return Ok(BigRational::zero());
                }
                let base = BigInt::from(det.unsigned_abs());
                if l >= 0 {
                    Ok(BigRational::from(base.pow(l as u32)))
                } else {
                    Ok(BigRational::new(BigInt::one(), base.pow(l.unsigned_abs())))
                }
            }
        }
    }

    /// The partial star product n ∗ m = ψ⁻¹(ψ(n)·ψ(m)).
    pub fn star(&self, n: &StarPoint, m: &StarPoint) -> Result<StarOutcome, ParamultError> {
        let pn = self.embed(n)?;
        let pm = self.embed(m)?;
        self.star_embedded(&pn, &pm)
    }

    /// Star product on already-embedded operands (used by the bulk sweeps).
    pub fn star_embedded(
        &self,
        pn: &IntMatrix,
        pm: &IntMatrix,
    ) -> Result<StarOutcome, ParamultError> {
        let prod = pn.checked_mul(pm)?;
        let y = prod.flat();
        let k = self.k;
        // Candidate coordinates, scaled by the positive denominator.
        let mut t = vec![0i128; k];
        for i in 0..k {
            let mut acc: i128 = 0;
            for (c, &yc) in y.iter().enumerate() {
                let term = self.left_inv[i][c].checked_mul(yc).ok_or_else(overflow)?;
                acc = acc.checked_add(term).ok_or_else(overflow)?;
            }
            t[i] = acc;
        }
        // Consistency: the candidate must reproduce the product exactly,
        // otherwise the product lies outside the generator span.
        for (c, &yc) in y.iter().enumerate() {
            let mut lhs: i128 = 0;
            for i in 0..k {
                let term = self.generators[i].flat()[c].checked_mul(t[i]).ok_or_else(overflow)?;
                lhs = lhs.checked_add(term).ok_or_else(overflow)?;
            }
            let rhs = self.den.checked_mul(yc).ok_or_else(overflow)?;
            if lhs != rhs {
                return Ok(StarOutcome::NotInImage);
            }
        }
        let integral = t.iter().all(|&ti| ti.rem_euclid(self.den) == 0);
        let positive = t.iter().all(|&ti| ti >= self.den);
        if integral && positive {
            let mut coords = Vec::with_capacity(k);
            for &ti in &t {
                let q = ti / self.den;
                let c = u64::try_from(q).map_err(|_| overflow())?;
                coords.push(c);
            }
            Ok(StarOutcome::Defined(StarPoint(coords)))
        } else {
            let raw = t
                .iter()
                .map(|&ti| BigRational::new(BigInt::from(ti), BigInt::from(self.den)))
                .collect();
            Ok(StarOutcome::OutsideCone(raw))
        }
    }

    /// Squared Frobenius bound ‖M‖²·(‖N‖²)² for the norm-subordination
    /// constant, computed exactly from the embedding and its left inverse.
    pub fn analytic_bound_sq(&self) -> BigRational {
        let mut n_sq = BigInt::zero();
        for g in &self.generators {
            for &e in g.flat() {
                n_sq += BigInt::from(e) * BigInt::from(e);
            }
        }
        let mut m_sq_num = BigInt::zero();
        for row in &self.left_inv {
            for &e in row {
                m_sq_num += BigInt::from(e) * BigInt::from(e);
            }
        }
        let den_sq = BigInt::from(self.den) * BigInt::from(self.den);
        let m_sq = BigRational::new(m_sq_num, den_sq);
        m_sq * BigRational::from(n_sq.clone() * n_sq)
    }
}

// ---------------------------------------------------------------------------
// Built-in semigroups
// ---------------------------------------------------------------------------

fn must(sg: Result<StarSemigroup, ParamultError>) -> StarSemigroup {
    sg.expect("built-in semigroup is valid by construction")
}

/// Rotation-form 2×2 embedding; value n₁² + n₂².
pub fn gaussian() -> StarSemigroup {
    let m1 = IntMatrix::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap();
    let m2 = IntMatrix::from_rows(&[vec![0, -1], vec![1, 0]]).unwrap();
    must(StarSemigroup::new("gaussian", 2, vec![m1, m2], ValueKind::AbsDet))
}

/// Twisted rotation form; value |n₁² + D·n₂²|.
pub fn dsum(d_coef: i64) -> StarSemigroup {
    let m1 = IntMatrix::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap();
    let m2 = IntMatrix::from_rows(&[vec![0, -d_coef], vec![1, 0]]).unwrap();
    must(StarSemigroup::new(format!("dsum({d_coef})"), 2, vec![m1, m2], ValueKind::AbsDet))
}

/// Circulant 3×3 embedding; value |a₀³ + a₁³ + a₂³ − 3a₀a₁a₂|.
pub fn eisenstein() -> StarSemigroup {
    let m1 = IntMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
    let m2 = IntMatrix::from_rows(&[vec![0, 1, 0], vec![0, 0, 1], vec![1, 0, 0]]).unwrap();
    let m3 = IntMatrix::from_rows(&[vec![0, 0, 1], vec![1, 0, 0], vec![0, 1, 0]]).unwrap();
    must(StarSemigroup::new("eisenstein", 3, vec![m1, m2, m3], ValueKind::AbsDet))
}

/// nI + mA for the 2×2 matrix A = [[1,1],[1,0]]; value |n² + nm − m²|.
pub fn fibonacci() -> StarSemigroup {
    must(general2x2(1, 1, 1, 0).map(|sg| StarSemigroup { name: "fibonacci".into(), ..sg }))
}

/// nI + mA for A = [[a,b],[c,d]]; value |n² + (a+d)mn + (ad−bc)m²|.
/// Errors when A is a multiple of the identity (the embedding degenerates).
pub fn general2x2(a: i64, b: i64, c: i64, d: i64) -> Result<StarSemigroup, ParamultError> {
    let m1 = IntMatrix::from_rows(&[vec![1, 0], vec![0, 1]]).unwrap();
    let m2 = IntMatrix::from_rows(&[vec![a, b], vec![c, d]]).unwrap();
    StarSemigroup::new(format!("general2x2({a},{b},{c},{d})"), 2, vec![m1, m2], ValueKind::AbsDet)
}

fn quaternion_generators() -> Vec<IntMatrix> {
    vec![
        IntMatrix::identity(4),
        IntMatrix::from_rows(&[
            vec![0, -1, 0, 0],
            vec![1, 0, 0, 0],
            vec![0, 0, 0, -1],
            vec![0, 0, 1, 0],
        ])
        .unwrap(),
        IntMatrix::from_rows(&[
            vec![0, 0, -1, 0],
            vec![0, 0, 0, 1],
            vec![1, 0, 0, 0],
            vec![0, -1, 0, 0],
        ])
        .unwrap(),
        IntMatrix::from_rows(&[
            vec![0, 0, 0, -1],
            vec![0, 0, -1, 0],
            vec![0, 1, 0, 0],
            vec![1, 0, 0, 0],
        ])
        .unwrap(),
    ]
}

/// 4×4 quaternion embedding; value (n₁²+n₂²+n₃²+n₄²)².
pub fn quaternion() -> StarSemigroup {
    must(StarSemigroup::new("quaternion", 4, quaternion_generators(), ValueKind::AbsDet))
}

/// Square-root variant of the quaternion value: n₁²+n₂²+n₃²+n₄².
pub fn quaternion_sqrt() -> StarSemigroup {
    must(StarSemigroup::new("quaternion-sqrt", 4, quaternion_generators(), ValueKind::SqrtDet))
}

/// Parses a built-in descriptor: `gaussian`, `dsum:D`, `eisenstein`,
/// `fibonacci`, `general2x2:a,b,c,d`, `quaternion`, `quaternion-sqrt`.
pub fn builtin_by_name(spec: &str) -> Result<StarSemigroup, ParamultError> {
    let (head, args) = match spec.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (spec, None),
    };
    let parse_ints = |s: &str, n: usize| -> Result<Vec<i64>, ParamultError> {
        let vals: Result<Vec<i64>, _> = s.split(',').map(|t| t.trim().parse::<i64>()).collect();
        let vals = vals.map_err(|e| ParamultError::Parse(format!("bad integer list: {e}")))?;
        if vals.len() != n {
            return Err(ParamultError::Parse(format!("expected {n} integers, found {}", vals.len())));
        }
        Ok(vals)
    };
    match (head, args) {
        ("gaussian", None) => Ok(gaussian()),
        ("eisenstein", None) => Ok(eisenstein()),
        ("fibonacci", None) => Ok(fibonacci()),
        ("quaternion", None) => Ok(quaternion()),
        ("quaternion-sqrt", None) => Ok(quaternion_sqrt()),
        ("dsum", Some(a)) => {
            let v = parse_ints(a, 1)?;
            Ok(dsum(v[0]))
        }
        ("general2x2", Some(a)) => {
            let v = parse_ints(a, 4)?;
            general2x2(v[0], v[1], v[2], v[3])
        }
        _ => Err(ParamultError::Parse(format!("unknown semigroup descriptor `{spec}`"))),
    }
}

// ---------------------------------------------------------------------------
// JSON loader
// ---------------------------------------------------------------------------

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSemigroup {
    name: String,
    k: usize,
    d: usize,
    generators: Vec<Vec<Vec<i64>>>,
    value_kind: RawValueKind,
}

#[derive(Deserialize)]
#[serde(rename_all = "kebab-case")]
enum RawValueKind {
    AbsDet,
    SqrtDet,
    DetPower(i32),
}

/// Loads a custom star semigroup from its JSON description:
/// `{"name": "...", "k": 2, "d": 2, "generators": [[[1,0],[0,1]], ...],
///   "value_kind": "abs-det" | "sqrt-det" | {"det-power": -1}}`.
pub fn load_star_semigroup_json(text: &str) -> Result<StarSemigroup, ParamultError> {
    let raw: RawSemigroup =
        serde_json::from_str(text).map_err(|e| ParamultError::Parse(e.to_string()))?;
    if raw.generators.len() != raw.k {
        return Err(ParamultError::DimensionMismatch { expected: raw.k, found: raw.generators.len() });
    }
    if !(1..=MAX_ARITY).contains(&raw.k) || !(1..=MAX_DIM).contains(&raw.d) {
        return Err(ParamultError::DimensionOutOfRange);
    }
    let value_kind = match raw.value_kind {
        RawValueKind::AbsDet => ValueKind::AbsDet,
        RawValueKind::SqrtDet => ValueKind::SqrtDet,
        RawValueKind::DetPower(l) => {
            if l.unsigned_abs() > 16 {
                return Err(ParamultError::Parse("det-power exponent out of range (|l| <= 16)".into()));
            }
            ValueKind::DetPower(l)
        }
    };
    let mut gens = Vec::with_capacity(raw.k);
    for g in &raw.generators {
        if g.len() != raw.d {
            return Err(ParamultError::DimensionMismatch { expected: raw.d, found: g.len() });
        }
        gens.push(IntMatrix::from_rows(g)?);
    }
    StarSemigroup::new(raw.name, raw.d, gens, value_kind)
}

// ---------------------------------------------------------------------------
// Bulk verification sweeps
// ---------------------------------------------------------------------------

/// All lattice points of [1, bound]^k in lexicographic order.
pub fn lattice_points(k: usize, bound: u64) -> Vec<StarPoint> {
    let mut out = Vec::new();
    if k == 0 || bound == 0 {
        return out;
    }
    let mut cur = vec![1u64; k];
    loop {
        out.push(StarPoint(cur.clone()));
        let mut idx = k;
        loop {
            if idx == 0 {
                return out;
            }
            idx -= 1;
            if cur[idx] < bound {
                cur[idx] += 1;
                for c in cur.iter_mut().skip(idx + 1) {
                    *c = 1;
                }
                break;
            }
        }
    }
}

fn checked_point_count(k: usize, bound: u64, squared: bool) -> Result<u64, ParamultError> {
    if bound == 0 {
        return Err(ParamultError::InvalidBound);
    }
    let exp = if squared { 2 * k as u32 } else { k as u32 };
    let total = bound.checked_pow(exp).ok_or(ParamultError::InvalidBound)?;
    if total > MAX_TOTAL {
        return Err(ParamultError::InvalidBound);
    }
    Ok(total)
}

/// One exact multiplicativity failure: f(n∗m) ≠ f(n)·f(m).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultViolation {
    pub n: StarPoint,
    pub m: StarPoint,
    pub product: StarPoint,
    pub f_product: BigRational,
    pub f_n_times_f_m: BigRational,
}

/// Exhaustive multiplicativity report over a box of point pairs.
#[derive(Debug, Clone)]
pub struct MultReport {
    /// Total ordered pairs examined.
    pub checked: u64,
    /// Pairs whose star product is defined.
    pub defined: u64,
    pub violations: Vec<MultViolation>,
}

/// Checks f(n∗m) = f(n)·f(m) exactly over all ordered pairs from
/// [1, bound]^k whose star product is defined.
pub fn verify_multiplicativity(
    sg: &StarSemigroup,
    bound: u64,
) -> Result<MultReport, ParamultError> {
    let checked = checked_point_count(sg.arity(), bound, true)?;
    let pts = lattice_points(sg.arity(), bound);
    let embeds: Vec<IntMatrix> = pts.iter().map(|p| sg.embed(p)).collect::<Result<_, _>>()?;
    let fvals: Vec<BigRational> = pts.iter().map(|p| sg.eval_f(p)).collect::<Result<_, _>>()?;
    let per_left: Vec<(u64, Vec<MultViolation>)> = pts
        .par_iter()
        .enumerate()
        .map(|(i, n)| -> Result<(u64, Vec<MultViolation>), ParamultError> {
            let mut defined = 0u64;
            let mut violations = Vec::new();
            for (j, m) in pts.iter().enumerate() {
                if let StarOutcome::Defined(prod) = sg.star_embedded(&embeds[i], &embeds[j])? {
                    defined += 1;
                    let lhs = sg.eval_f(&prod)?;
                    let rhs = &fvals[i] * &fvals[j];
                    if lhs != rhs {
                        violations.push(MultViolation {
                            n: n.clone(),
                            m: m.clone(),
                            product: prod,
                            f_product: lhs,
                            f_n_times_f_m: rhs,
                        });
                    }
                }
            }
            Ok((defined, violations))
        })
        .collect::<Result<_, _>>()?;
    let mut defined = 0u64;
    let mut violations = Vec::new();
    for (d, mut v) in per_left {
        defined += d;
        violations.append(&mut v);
    }
    Ok(MultReport { checked, defined, violations })
}

/// Empirical versus analytic norm-subordination constants (both squared, so
/// every quantity stays an exact rational).
#[derive(Debug, Clone)]
pub struct SubordinationReport {
    /// max ‖n∗m‖²/(‖n‖²‖m‖²) over defined pairs (0 when none are defined).
    pub empirical_sup_sq: BigRational,
    /// Squared Frobenius bound ‖M‖²(‖N‖²)² — always ≥ the empirical value.
    pub analytic_bound_sq: BigRational,
    pub defined_pairs: u64,
}

/// Measures the norm growth of the star product over [1, bound]^{2k} and
/// compares it with the exact Frobenius bound.
pub fn empirical_subordination(
    sg: &StarSemigroup,
    bound: u64,
) -> Result<SubordinationReport, ParamultError> {
    checked_point_count(sg.arity(), bound, true)?;
    let pts = lattice_points(sg.arity(), bound);
    let embeds: Vec<IntMatrix> = pts.iter().map(|p| sg.embed(p)).collect::<Result<_, _>>()?;
    let norms: Vec<BigInt> = pts.iter().map(StarPoint::norm_sq).collect();
    let per_left: Vec<(BigRational, u64)> = pts
        .par_iter()
        .enumerate()
        .map(|(i, _)| -> Result<(BigRational, u64), ParamultError> {
            let mut local_max = BigRational::zero();
            let mut defined = 0u64;
            for j in 0..pts.len() {
                if let StarOutcome::Defined(prod) = sg.star_embedded(&embeds[i], &embeds[j])? {
                    defined += 1;
                    let ratio = BigRational::new(prod.norm_sq(), &norms[i] * &norms[j]);
                    if ratio > local_max {
                        local_max = ratio;
                    }
                }
            }
            Ok((local_max, defined))
        })
        .collect::<Result<_, _>>()?;
    let mut empirical_sup_sq = BigRational::zero();
    let mut defined_pairs = 0u64;
    for (m, d) in per_left {
        if m > empirical_sup_sq {
            empirical_sup_sq = m;
        }
        defined_pairs += d;
    }
    let analytic_bound_sq = sg.analytic_bound_sq();
    assert!(
        empirical_sup_sq <= analytic_bound_sq,
        "Frobenius subordination bound must dominate the empirical supremum"
    );
    Ok(SubordinationReport { empirical_sup_sq, analytic_bound_sq, defined_pairs })
}

/// |{n ∈ [1, N]^k : f(n) = 0}| / N^k as an exact rational.
pub fn zero_density(sg: &StarSemigroup, n_bound: u64) -> Result<BigRational, ParamultError> {
    let total = checked_point_count(sg.arity(), n_bound, false)?;
    let pts = lattice_points(sg.arity(), n_bound);
    let zeros: u64 = pts
        .par_iter()
        .map(|p| -> Result<u64, ParamultError> {
            Ok(u64::from(sg.embed(p)?.determinant()? == 0))
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(BigRational::new(BigInt::from(zeros), BigInt::from(total)))
}

/// Exact integer square root when v is a perfect square (v ≥ 0).
fn exact_sqrt_i128(v: i128) -> Option<i128> {
    if v < 0 {
        return None;
    }
    let u = v as u128;
    let r = u.isqrt();
    (r * r == u).then_some(r as i128)
}
