//! Quadratic residues in prime fields: exact square tables, shifted-square
//! intersection counts, Pythagorean-pair search in dense subsets, and the
//! explicit constructor of solution-avoiding sets for ax² + by² + cz² = 0
//! when a + b + c ≠ 0.
//!
//! Everything is brute-forced over machine-word primes with flat tables, so
//! every reported count and certificate is exact and independently
//! re-checkable.

use crate::arith;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

/// Largest supported field size (the square table is a flat array).
pub const MAX_PRIME: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FfieldError {
    #[error("{0} is not an odd prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported maximum {MAX_PRIME}")]
    TooLarge(u64),
    #[error("shifts must be pairwise distinct mod p (duplicate {0})")]
    DuplicateShift(u64),
    #[error("subset element {0} is not a residue mod {1}")]
    InvalidElement(u64, u64),
    #[error("a + b + c = 0: every dense subset contains solutions, no avoiding set exists")]
    SumIsZero,
    #[error(
        "no good pair is large enough: best good |A| = {achieved}, bound requires {required}; \
         raise p"
    )]
    SizeShortfall { achieved: u64, required: u64 },
    #[error("avoiding-set verification found a solution ({x},{y},{z}) — this contradicts the construction and must be investigated")]
    VerificationFailure { x: u64, y: u64, z: u64 },
    #[error("coefficient c must be invertible mod p")]
    NonInvertibleCoefficient,
}

fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn validate_prime(p: u64) -> Result<(), FfieldError> {
    if p > MAX_PRIME {
        return Err(FfieldError::TooLarge(p));
    }
    if p < 3 || !arith::is_prime(p) {
        return Err(FfieldError::NotPrime(p));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Prime fields with square tables
// ---------------------------------------------------------------------------

/// An odd prime field with a precomputed quadratic-residue table.
#[derive(Debug, Clone)]
pub struct PrimeField {
    p: u64,
    is_square: Vec<bool>,
}

impl PrimeField {
    pub fn new(p: u64) -> Result<Self, FfieldError> {
        validate_prime(p)?;
        let mut is_square = vec![false; p as usize];
        // x² and (p−x)² coincide, so half the range suffices.
        for x in 0..=(p / 2) {
            is_square[mulmod(x, x, p) as usize] = true;
        }
        Ok(PrimeField { p, is_square })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Is the residue x (0 ≤ x < p) a square (0 included)?
    pub fn is_square(&self, x: u64) -> bool {
        self.is_square[(x % self.p) as usize]
    }

    /// The sorted set {x² : x ∈ F_p}, 0 included.
    pub fn squares(&self) -> Vec<u64> {
        (0..self.p).filter(|&x| self.is_square[x as usize]).collect()
    }
}

/// The sorted residue set {x² : x ∈ F_p}.
pub fn squares(p: u64) -> Result<Vec<u64>, FfieldError> {
    Ok(PrimeField::new(p)?.squares())
}

/// |(Q − a₁) ∩ ⋯ ∩ (Q − a_k)| by a direct sweep of the field.
pub fn shifted_squares_intersection(p: u64, shifts: &[u64]) -> Result<u64, FfieldError> {
    let field = PrimeField::new(p)?;
    let mut seen = vec![false; p as usize];
    for &a in shifts {
        let r = a % p;
        if seen[r as usize] {
            return Err(FfieldError::DuplicateShift(r));
        }
        seen[r as usize] = true;
    }
    let count = (0..p)
        .into_par_iter()
        .filter(|&x| shifts.iter().all(|&a| field.is_square((x + a % p) % p)))
        .count();
    Ok(count as u64)
}

fn validated_sorted_subset(p: u64, a_set: &[u64]) -> Result<Vec<u64>, FfieldError> {
    for &x in a_set {
        if x >= p {
            return Err(FfieldError::InvalidElement(x, p));
        }
    }
    let mut sorted = a_set.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    Ok(sorted)
}

/// Least (x, y) ∈ A² in lexicographic order with x² + y² a square mod p.
pub fn find_pythagorean_pair(
    p: u64,
    a_set: &[u64],
) -> Result<Option<(u64, u64)>, FfieldError> {
    let field = PrimeField::new(p)?;
    let sorted = validated_sorted_subset(p, a_set)?;
    let hit = sorted.par_iter().find_map_first(|&x| {
        let xx = mulmod(x, x, p);
        sorted
            .iter()
            .find(|&&y| field.is_square((xx + mulmod(y, y, p)) % p))
            .map(|&y| (x, y))
    });
    Ok(hit)
}

/// Least (x, y, z) ∈ A³ in lexicographic order with ax² + by² + cz² ≡ 0
/// (mod p); c must be invertible mod p.
pub fn find_quadratic_solution(
    a: i64,
    b: i64,
    c: i64,
    p: u64,
    a_set: &[u64],
) -> Result<Option<(u64, u64, u64)>, FfieldError> {
    validate_prime(p)?;
    let sorted = validated_sorted_subset(p, a_set)?;
    let ar = a.rem_euclid(p as i64) as u64;
    let br = b.rem_euclid(p as i64) as u64;
    let cr = c.rem_euclid(p as i64) as u64;
    if cr == 0 {
        return Err(FfieldError::NonInvertibleCoefficient);
    }
    // Map each residue c·z² to its least preimage z in A.
    let mut least_z: Vec<Option<u64>> = vec![None; p as usize];
    for &z in sorted.iter().rev() {
        let r = mulmod(cr, mulmod(z, z, p), p);
        least_z[r as usize] = Some(z);
    }
    let hit = sorted.par_iter().find_map_first(|&x| {
        let ax = mulmod(ar, mulmod(x, x, p), p);
        sorted
            .iter()
            .find_map(|&y| {
                let t = (ax + mulmod(br, mulmod(y, y, p), p)) % p;
                // Need c·z² ≡ −t.
                least_z[((p - t) % p) as usize].map(|z| (y, z))
            })
            .map(|(y, z)| (x, y, z))
    });
    Ok(hit)
}

// ---------------------------------------------------------------------------
// Avoiding-set construction
// ---------------------------------------------------------------------------

/// Constructive witness that a positive-density subset of F_p avoids
/// ax² + by² + cz² = 0 when a + b + c ≠ 0.
#[derive(Debug, Clone, Serialize)]
pub struct AvoidingSetCertificate {
    pub a: i64,
    pub b: i64,
    pub c: i64,
    pub p: u64,
    /// m = |a + b + c|.
    pub m: u64,
    /// Smallest prime exceeding max(m, 5).
    pub q: u64,
    /// The selected good pair (m·j ≢ i·p mod q).
    pub i: u64,
    pub j: u64,
    /// The avoiding set, sorted.
    pub a_set: Vec<u64>,
    /// Number of (x, y) pairs swept during verification.
    pub solutions_checked: u64,
}

/// Builds the box sets B_{i,j} (nonzero quadratic residues in the i-th
/// m-interval congruent to j mod q), selects the largest *good* pair, and
/// verifies exhaustively that its preimage A = {y : y² ∈ B_{i,j}} admits no
/// solution of ax² + by² + cz² = 0.
///
/// Why a good box avoids solutions: normalize signs so s = a + b + c = m > 0
/// and split the coefficient mass into P = Σ max(coeff, 0) and
/// N = −Σ min(coeff, 0), so P − N = m. For u, v, w ∈ B_{i,j} the shifted
/// integers u′ = mu − ip, v′, w′ lie in [0, p), so au′ + bv′ + cw′ lies in
/// [−N(p−1), P(p−1)]; if au + bv + cw ≡ 0 (mod p) this combination equals
/// t·m·p for an integer t with lo ≤ tm ≤ P − 1 (lo = 0 when N = 0, else
/// −N + 1). Reducing mod q (where u ≡ v ≡ w ≡ j) forces
/// (t + i)·p ≡ m·j (mod q). A pair (i, j) is good when that congruence fails
/// for every admissible t; a good box therefore cannot contain a solution.
/// When all coefficients share a sign the window is t = 0 alone and goodness
/// is the single condition m·j ≢ i·p (mod q).
///
/// Interval membership uses the exact rational boundaries ip/m ≤ x <
/// (i+1)p/m, i.e. i = ⌊x·m/p⌋, which is what the shifted-integer argument
/// needs; flooring the endpoints themselves would misplace boundary points.
pub fn construct_avoiding_set(
    a: i64,
    b: i64,
    c: i64,
    p: u64,
) -> Result<AvoidingSetCertificate, FfieldError> {
    validate_prime(p)?;
    let sum = a as i128 + b as i128 + c as i128;
    if sum.rem_euclid(p as i128) == 0 {
        // Covers both a+b+c = 0 and a+b+c ≡ 0 (mod p): either way x = y = z
        // solves the equation for every x, so no set of size ≥ 1 avoids it.
        return Err(FfieldError::SumIsZero);
    }
    if sum.unsigned_abs() >= p as u128 {
        // Intervals of length p/m < 1 cannot hold enough residues.
        return Err(FfieldError::SizeShortfall { achieved: 0, required: 1 });
    }
    let m = sum.unsigned_abs() as u64;
    let mut q = m.max(5) + 1;
    while !arith::is_prime(q) {
        q += 1;
    }

    // Sign-normalized coefficient masses and the admissible t-window.
    let (fa, fb, fc) = if sum > 0 {
        (a as i128, b as i128, c as i128)
    } else {
        (-(a as i128), -(b as i128), -(c as i128))
    };
    let p_mass: i128 = [fa, fb, fc].iter().filter(|&&v| v > 0).sum();
    let n_mass: i128 = -[fa, fb, fc].iter().filter(|&&v| v < 0).sum::<i128>();
    let lo = if n_mass == 0 { 0 } else { -n_mass + 1 };
    let hi = p_mass - 1;
    let t_window: Vec<i128> = (lo.div_euclid(m as i128) - 1..=hi.div_euclid(m as i128) + 1)
        .filter(|&t| lo <= t * m as i128 && t * m as i128 <= hi)
        .collect();
    debug_assert!(t_window.contains(&0));

    // Bucket every y ∈ F_p* by the box of x = y²: i = ⌊x·m/p⌋, j = x mod q.
    let interval_of = |x: u64| -> u64 { ((x as u128 * m as u128) / p as u128) as u64 };
    let good = |i: u64, j: u64| -> bool {
        t_window.iter().all(|&t| {
            let lhs = ((t + i as i128) * p as i128).rem_euclid(q as i128) as u64;
            lhs != mulmod(m % q, j % q, q)
        })
    };
    use std::collections::HashMap;
    let mut counts: HashMap<(u64, u64), u64> = HashMap::new();
    for y in 1..p {
        let x = mulmod(y, y, p);
        *counts.entry((interval_of(x), x % q)).or_insert(0) += 1;
    }
    // Largest good pair; ties go to the smallest (i, j) for determinism.
    let mut best: Option<((u64, u64), u64)> = None;
    for (&key, &count) in &counts {
        if !good(key.0, key.1) {
            continue;
        }
        let better = match best {
            None => true,
            Some((bk, bc)) => count > bc || (count == bc && key < bk),
        };
        if better {
            best = Some((key, count));
        }
    }
    let required = {
        // ⌈(q−5)·p / (m·q²)⌉ from the pigeonhole bound (1 − 5/q)·p/(m·q).
        let num = (q - 5) as u128 * p as u128;
        let den = m as u128 * q as u128 * q as u128;
        num.div_ceil(den) as u64
    };
    let ((bi, bj), achieved) = best.unwrap_or(((0, 0), 0));
    if achieved < required.max(1) {
        return Err(FfieldError::SizeShortfall { achieved, required: required.max(1) });
    }

    let a_set: Vec<u64> = (1..p)
        .filter(|&y| {
            let x = mulmod(y, y, p);
            interval_of(x) == bi && x % q == bj
        })
        .collect();
    debug_assert_eq!(a_set.len() as u64, achieved);

    // Exhaustive verification: no (x, y, z) ∈ A³ solves the equation.
    let ar = a.rem_euclid(p as i64) as u64;
    let br = b.rem_euclid(p as i64) as u64;
    let cr = c.rem_euclid(p as i64) as u64;
    let mut cz_table = vec![false; p as usize];
    for &z in &a_set {
        cz_table[mulmod(cr, mulmod(z, z, p), p) as usize] = true;
    }
    let violation = a_set.par_iter().find_map_first(|&x| {
        let ax = mulmod(ar, mulmod(x, x, p), p);
        a_set.iter().find_map(|&y| {
            let t = (ax + mulmod(br, mulmod(y, y, p), p)) % p;
            if cz_table[((p - t) % p) as usize] {
                let z = a_set
                    .iter()
                    .copied()
                    .find(|&z| mulmod(cr, mulmod(z, z, p), p) == (p - t) % p)
                    .expect("table hit has a witness");
                Some((x, y, z))
            } else {
                None
            }
        })
    });
    if let Some((x, y, z)) = violation {
        return Err(FfieldError::VerificationFailure { x, y, z });
    }
    let solutions_checked = (a_set.len() as u64) * (a_set.len() as u64);
    Ok(AvoidingSetCertificate { a, b, c, p, m, q, i: bi, j: bj, a_set, solutions_checked })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn square_sets_match_direct_squaring() {
        assert_eq!(squares(3).unwrap(), vec![0, 1]);
        assert_eq!(squares(7).unwrap(), vec![0, 1, 2, 4]);
        assert_eq!(squares(13).unwrap(), vec![0, 1, 3, 4, 9, 10, 12]);
        for p in [3u64, 5, 7, 13, 101, 499, 997, 1009] {
            let q = squares(p).unwrap();
            assert_eq!(q.len() as u64, (p + 1) / 2, "p={p}");
            let direct: std::collections::BTreeSet<u64> =
                (0..p).map(|x| mulmod(x, x, p)).collect();
            assert_eq!(q, direct.into_iter().collect::<Vec<_>>());
        }
        assert!(matches!(squares(2), Err(FfieldError::NotPrime(2))));
        assert!(matches!(squares(15), Err(FfieldError::NotPrime(15))));
    }

    #[test]
    fn shifted_intersections_single_and_small() {
        for p in [101u64, 499, 997] {
            for a in [0u64, 1, 17] {
                assert_eq!(shifted_squares_intersection(p, &[a]).unwrap(), (p + 1) / 2);
            }
        }
        let c = shifted_squares_intersection(101, &[0, 1]).unwrap();
        let frac = c as f64 / 101.0;
        assert!((frac - 0.25).abs() <= 0.2, "fraction {frac}");
        let c = shifted_squares_intersection(997, &[0, 1, 2]).unwrap();
        let frac = c as f64 / 997.0;
        assert!((frac - 0.125).abs() <= 0.1, "fraction {frac}");
        assert!(matches!(
            shifted_squares_intersection(13, &[1, 14]),
            Err(FfieldError::DuplicateShift(1))
        ));
    }

    #[test]
    fn shifted_intersections_track_random_model() {
        // Counts stay within the square-root fluctuation band of p/2^k.
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_1234);
        for p in [101u64, 499, 997] {
            for k in 1..=3usize {
                for _ in 0..50 {
                    let mut shifts = Vec::new();
                    while shifts.len() < k {
                        let s = rng.gen_range(0..p);
                        if !shifts.contains(&s) {
                            shifts.push(s);
                        }
                    }
                    let count = shifted_squares_intersection(p, &shifts).unwrap() as f64;
                    let expected = p as f64 / 2f64.powi(k as i32);
                    let band = 4.0 * k as f64 * (p as f64).sqrt();
                    assert!(
                        (count - expected).abs() <= band,
                        "p={p} k={k} shifts={shifts:?} count={count} expected={expected}"
                    );
                }
            }
        }
    }

    #[test]
    fn pythagorean_pair_examples() {
        let all: Vec<u64> = (0..997).collect();
        assert_eq!(find_pythagorean_pair(997, &all).unwrap(), Some((0, 0)));
        // 1² + 3² = 10 ≡ 6² (mod 13) is the least hit in lexicographic order.
        assert_eq!(find_pythagorean_pair(13, &[1, 2, 3, 4, 5]).unwrap(), Some((1, 3)));
        assert_eq!(find_pythagorean_pair(13, &[]).unwrap(), None);
        assert!(matches!(
            find_pythagorean_pair(13, &[13]),
            Err(FfieldError::InvalidElement(13, 13))
        ));
    }

    #[test]
    fn dense_subsets_always_contain_pythagorean_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xf00d);
        for p in [101u64, 499, 997] {
            let size = (p as f64 * 0.2).ceil() as usize;
            for trial in 0..100 {
                let a_set =
                    rand::seq::index::sample(&mut rng, p as usize, size)
                        .into_iter()
                        .map(|x| x as u64)
                        .collect::<Vec<_>>();
                assert!(
                    find_pythagorean_pair(p, &a_set).unwrap().is_some(),
                    "p={p} trial={trial}"
                );
            }
            // Structured adversaries.
            let field = PrimeField::new(p).unwrap();
            let nonresidues: Vec<u64> = (0..p).filter(|&x| !field.is_square(x)).collect();
            assert!(find_pythagorean_pair(p, &nonresidues).unwrap().is_some(), "p={p}");
            let start = p / 3;
            let interval: Vec<u64> = (start..start + size as u64).collect();
            assert!(find_pythagorean_pair(p, &interval).unwrap().is_some(), "p={p}");
            let shifted_nonres: Vec<u64> =
                (0..p).filter(|&x| !field.is_square((mulmod(x, x, p) + 1) % p)).collect();
            assert!(find_pythagorean_pair(p, &shifted_nonres).unwrap().is_some(), "p={p}");
        }
    }

    #[test]
    fn quadratic_solution_examples() {
        // a + b + c = 0 makes (1,1,1) a solution.
        assert_eq!(find_quadratic_solution(1, 2, -3, 13, &[1]).unwrap(), Some((1, 1, 1)));
        // The worked 3-element subset admits no Pythagorean triple mod 13.
        assert_eq!(find_quadratic_solution(1, 1, -1, 13, &[2, 3, 6]).unwrap(), None);
        assert_eq!(find_quadratic_solution(1, 1, -1, 13, &[]).unwrap(), None);
        assert!(matches!(
            find_quadratic_solution(1, 1, 13, 13, &[1]),
            Err(FfieldError::NonInvertibleCoefficient)
        ));
        // Least-lex: prefer smaller x, then y, then z.
        let sol = find_quadratic_solution(1, 1, -1, 13, &(0..13).collect::<Vec<_>>()).unwrap();
        assert_eq!(sol, Some((0, 0, 0)));
    }

    #[test]
    fn avoiding_set_worked_examples() {
        let cert = construct_avoiding_set(1, 1, 1, 997).unwrap();
        assert_eq!((cert.m, cert.q), (3, 7));
        assert_eq!((cert.i, cert.j), (0, 2));
        assert_eq!(cert.a_set.len(), 58);
        assert!(cert.a_set.len() >= 14, "|A| = {}", cert.a_set.len());
        assert_eq!(cert.solutions_checked, (cert.a_set.len() as u64).pow(2));
        // The selected pair is good and the set is a sorted subset of F_p*.
        assert!((cert.m * cert.j) % cert.q != (cert.i * cert.p) % cert.q);
        assert!(cert.a_set.windows(2).all(|w| w[0] < w[1]));
        assert!(cert.a_set.iter().all(|&y| y >= 1 && y < 997));

        assert!(matches!(construct_avoiding_set(1, 1, -2, 997), Err(FfieldError::SumIsZero)));

        let cert = construct_avoiding_set(2, -1, -3, 1009).unwrap();
        assert_eq!((cert.m, cert.q), (2, 7));
        assert_eq!((cert.i, cert.j), (0, 1));
        assert_eq!(cert.a_set.len(), 70);
        assert!(cert.a_set.len() as u64 >= 21);
    }

    #[test]
    fn avoiding_sets_verify_across_small_coefficients() {
        for p in [503u64, 997] {
            for a in -3i64..=3 {
                for b in -3i64..=3 {
                    for c in -3i64..=3 {
                        if a + b + c == 0 || c == 0 {
                            continue;
                        }
                        let cert = construct_avoiding_set(a, b, c, p)
                            .unwrap_or_else(|e| panic!("({a},{b},{c}) p={p}: {e}"));
                        let m = (a + b + c).unsigned_abs();
                        let required =
                            ((cert.q - 5) as u128 * p as u128)
                                .div_ceil(m as u128 * cert.q as u128 * cert.q as u128)
                                as u64;
                        assert!(
                            cert.a_set.len() as u64 >= required,
                            "({a},{b},{c}) p={p}: |A|={} < {required}",
                            cert.a_set.len()
                        );
                        // Independent re-verification of the certificate.
                        assert_eq!(
                            find_quadratic_solution(a, b, c, p, &cert.a_set).unwrap(),
                            None,
                            "({a},{b},{c}) p={p}"
                        );
                    }
                }
            }
        }
    }
}
