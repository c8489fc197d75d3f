//! Multiplicative Følner densities, additive prefix densities, finite-scale
//! syndeticity, sparse-semigroup ratio experiments, and empirical recurrence
//! averages on finite multiplicative systems.
//!
//! The multiplicative Følner sets are Φ_N = {x : x divides N!}, enumerated
//! exactly from the prime-exponent box of N!. Sparse multiplicative closures
//! are generated smallest-first with a bounded priority queue so that every
//! count below the cutoff is exact. Densities and averages are reported as
//! floating-point diagnostics over user-supplied finite grids; the tooling
//! never claims a limit.

use crate::arith;
use crate::colorings::FiniteMultSystem;
use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use std::cmp::Reverse;
use std::collections::BinaryHeap;
use thiserror::Error;

/// Hard cap on enumerated member lists (Følner sets, closures).
pub const MAX_MEMBERS: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DensityError {
    #[error("enumeration exceeds the configured budget of {0} members")]
    BudgetExceeded(u64),
    #[error("the prefix contains no members of the ambient set")]
    EmptyPrefix,
    #[error("schedule starts must be nonempty and strictly increasing")]
    InvalidSchedule,
    #[error("evaluation points must be at least 1 and within the schedule's final interval")]
    InvalidEvalPoint,
    #[error("bound must be at least 1")]
    InvalidBound,
    #[error("finite-system evaluation failed: {0}")]
    System(String),
}

// ---------------------------------------------------------------------------
// Multiplicative Følner sets Φ_N
// ---------------------------------------------------------------------------

/// One multiplicative Følner set: the divisors of N!, enumerated exactly.
#[derive(Debug, Clone)]
pub struct FolnerIndex {
    n: u32,
    /// Sorted, distinct divisors of N!.
    members: Vec<u64>,
}

/// Multiplicity of the prime p in N! (Legendre's formula).
pub fn factorial_multiplicity(n: u32, p: u64) -> u32 {
    let mut total = 0u32;
    let mut q = p;
    loop {
        let term = u64::from(n) / q;
        if term == 0 {
            return total;
        }
        total += term as u32;
        match q.checked_mul(p) {
            Some(next) => q = next,
            None => return total,
        }
    }
}

impl FolnerIndex {
    /// Builds Φ_N from the prime-exponent box of N!.
    pub fn divisors_of_factorial(n: u32) -> Result<Self, DensityError> {
        if n == 0 {
            return Err(DensityError::InvalidBound);
        }
        let primes: Vec<u64> = (2..=u64::from(n)).filter(|&p| arith::is_prime(p)).collect();
        let mut count: u64 = 1;
        let mut mults = Vec::with_capacity(primes.len());
        for &p in &primes {
            let m = factorial_multiplicity(n, p);
            mults.push(m);
            count = count
                .checked_mul(u64::from(m) + 1)
                .filter(|&c| c <= MAX_MEMBERS)
                .ok_or(DensityError::BudgetExceeded(MAX_MEMBERS))?;
        }
        let mut members: Vec<u64> = vec![1];
        for (&p, &m) in primes.iter().zip(&mults) {
            let mut extended = Vec::with_capacity(members.len() * (m as usize + 1));
            for &base in &members {
                let mut v = base;
                extended.push(v);
                for _ in 0..m {
                    match v.checked_mul(p) {
                        Some(next) => {
                            v = next;
                            extended.push(v);
                        }
                        None => return Err(DensityError::BudgetExceeded(MAX_MEMBERS)),
                    }
                }
            }
            members = extended;
        }
        members.sort_unstable();
        debug_assert_eq!(members.len() as u64, count);
        Ok(FolnerIndex { n, members })
    }

    pub fn factorial_of(&self) -> u32 {
        self.n
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Fraction of members satisfying the predicate, exact.
    pub fn member_fraction(&self, pred: impl Fn(u64) -> bool + Sync) -> BigRational {
        let hits = self.members.par_iter().filter(|&&x| pred(x)).count();
        BigRational::new(BigInt::from(hits), BigInt::from(self.members.len()))
    }

    /// Multiplicative invariance diagnostic |gΦ_N ∩ Φ_N| / |Φ_N|, exact.
    pub fn invariance_ratio(&self, g: u64) -> BigRational {
        let hits = self
            .members
            .iter()
            .filter(|&&x| {
                x.checked_mul(g).is_some_and(|gx| self.members.binary_search(&gx).is_ok())
            })
            .count();
        BigRational::new(BigInt::from(hits), BigInt::from(self.members.len()))
    }
}

/// max over the given factorial indices of |A ∩ Φ_N| / |Φ_N|.
pub fn upper_mult_density(
    pred: impl Fn(u64) -> bool + Sync,
    factorial_indices: &[u32],
) -> Result<f64, DensityError> {
    if factorial_indices.is_empty() {
        return Err(DensityError::InvalidBound);
    }
    let mut best = 0.0f64;
    for &n in factorial_indices {
        let phi = FolnerIndex::divisors_of_factorial(n)?;
        let frac = rational_to_f64(&phi.member_fraction(&pred));
        if frac > best {
            best = frac;
        }
    }
    Ok(best)
}

fn rational_to_f64(r: &BigRational) -> f64 {
    let numer = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
    let denom = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
    numer / denom
}

// ---------------------------------------------------------------------------
// Additive prefix densities
// ---------------------------------------------------------------------------

/// |A ∩ [N]| / N.
pub fn additive_prefix_density(
    pred: impl Fn(u64) -> bool + Sync,
    n: u64,
) -> Result<f64, DensityError> {
    if n == 0 {
        return Err(DensityError::InvalidBound);
    }
    let count = (1..=n).into_par_iter().filter(|&x| pred(x)).count();
    Ok(count as f64 / n as f64)
}

/// Prefix densities over a grid, supporting empirical liminf/limsup readings
/// as the min/max of the returned values.
pub fn prefix_envelope(
    pred: impl Fn(u64) -> bool + Sync,
    n_list: &[u64],
) -> Result<Vec<(u64, f64)>, DensityError> {
    n_list
        .par_iter()
        .map(|&n| Ok((n, additive_prefix_density(&pred, n)?)))
        .collect()
}

// ---------------------------------------------------------------------------
// Finite-scale syndeticity
// ---------------------------------------------------------------------------

/// Greedy finite cover: the smallest set F ⊆ G ∩ [f_bound] (by scanning x
/// upward and keeping covering elements) with ∪_{x∈F} S/x ⊇ G ∩ [n], where
/// S/x = {m : xm ∈ S}. Returns None when no such F exists within the bound.
pub fn syndetic_check(
    s_pred: impl Fn(u64) -> bool,
    g_pred: impl Fn(u64) -> bool,
    f_bound: u64,
    n: u64,
) -> Result<Option<Vec<u64>>, DensityError> {
    if f_bound == 0 || n == 0 {
        return Err(DensityError::InvalidBound);
    }
    let targets: Vec<u64> = (1..=n).filter(|&m| g_pred(m)).collect();
    let mut covered = vec![false; targets.len()];
    let mut uncovered = targets.len();
    let mut f = Vec::new();
    for x in 1..=f_bound {
        if uncovered == 0 {
            break;
        }
        if !g_pred(x) {
            continue;
        }
        let mut newly = 0usize;
        for (idx, &m) in targets.iter().enumerate() {
            if !covered[idx] && x.checked_mul(m).is_some_and(&s_pred) {
                covered[idx] = true;
                newly += 1;
            }
        }
        if newly > 0 {
            f.push(x);
            uncovered -= newly;
        }
    }
    Ok((uncovered == 0).then_some(f))
}

// ---------------------------------------------------------------------------
// Sparse multiplicative closures and the ratio experiment
// ---------------------------------------------------------------------------

/// Interval starts N₁ < N₂ < ⋯ ; the generated set is the multiplicative
/// closure of the primes in ∪ᵢ [Nᵢ, 2Nᵢ].
#[derive(Debug, Clone)]
pub struct SparseSemigroupSchedule {
    starts: Vec<u64>,
}

impl SparseSemigroupSchedule {
    pub fn new(starts: Vec<u64>) -> Result<Self, DensityError> {
        if starts.is_empty() || starts[0] == 0 || starts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(DensityError::InvalidSchedule);
        }
        Ok(SparseSemigroupSchedule { starts })
    }

    pub fn starts(&self) -> &[u64] {
        &self.starts
    }

    pub fn last_interval_end(&self) -> u64 {
        self.starts.last().expect("schedule is nonempty").saturating_mul(2)
    }
}

/// Generator description for the multiplicative-closure ratio experiment.
#[derive(Debug, Clone)]
pub enum ClosureGenerators {
    /// Primes in the schedule's intervals [Nᵢ, 2Nᵢ].
    PrimeIntervals(SparseSemigroupSchedule),
    /// Squares of all primes: the closure is every perfect square ≥ 4.
    AllPrimesSquared,
    /// The degenerate full semigroup of all positive integers.
    AllNaturals,
}

/// One evaluation point of the ratio experiment.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatioPoint {
    pub n: u64,
    pub count_n: u64,
    pub count_2n: u64,
}

impl RatioPoint {
    /// |G ∩ [N]| / |G ∩ [2N]|, or NaN when the closure is empty below 2N.
    pub fn ratio(&self) -> f64 {
        self.count_n as f64 / self.count_2n as f64
    }
}

/// Multiplicative closure (products of one or more generators) enumerated
/// smallest-first up to the cutoff. Generators must be distinct primes or
/// prime powers so that products are generated once per factor multiset.
fn enumerate_closure(generators: &[u64], cutoff: u64) -> Result<Vec<u64>, DensityError> {
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> = generators
        .iter()
        .enumerate()
        .filter(|&(_, &g)| g <= cutoff)
        .map(|(i, &g)| Reverse((g, i)))
        .collect();
    let mut members: Vec<u64> = Vec::new();
    while let Some(Reverse((value, idx))) = heap.pop() {
        if members.last() != Some(&value) {
            members.push(value);
            if members.len() as u64 > MAX_MEMBERS {
                return Err(DensityError::BudgetExceeded(MAX_MEMBERS));
            }
        }
        for (j, &g) in generators.iter().enumerate().skip(idx) {
            match value.checked_mul(g) {
                Some(next) if next <= cutoff => heap.push(Reverse((next, j))),
                _ => {}
            }
        }
    }
    Ok(members)
}

fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo.max(2)..=hi).filter(|&p| arith::is_prime(p)).collect()
}

/// Exact counts |G ∩ [N]| and |G ∩ [2N]| at each evaluation point.
pub fn ratio_experiment(
    generators: &ClosureGenerators,
    eval_points: &[u64],
) -> Result<Vec<RatioPoint>, DensityError> {
    if eval_points.is_empty() || eval_points.iter().any(|&n| n == 0) {
        return Err(DensityError::InvalidEvalPoint);
    }
    let max_eval = *eval_points.iter().max().expect("nonempty");
    let cutoff = max_eval.checked_mul(2).ok_or(DensityError::InvalidEvalPoint)?;
    let members: Option<Vec<u64>> = match generators {
        ClosureGenerators::AllNaturals => None,
        ClosureGenerators::AllPrimesSquared => {
            let root = cutoff.isqrt();
            let gens: Vec<u64> = primes_in(2, root)
                .into_iter()
                .map(|p| p * p)
                .filter(|&q| q <= cutoff)
                .collect();
            Some(enumerate_closure(&gens, cutoff)?)
        }
        ClosureGenerators::PrimeIntervals(schedule) => {
            if eval_points.iter().any(|&n| n > schedule.last_interval_end()) {
                return Err(DensityError::InvalidEvalPoint);
            }
            let mut gens: Vec<u64> = Vec::new();
            for &start in schedule.starts() {
                let end = start.checked_mul(2).ok_or(DensityError::InvalidSchedule)?;
                gens.extend(primes_in(start, end));
            }
            gens.sort_unstable();
            gens.dedup();
            Some(enumerate_closure(&gens, cutoff)?)
        }
    };
    let count_up_to = |bound: u64| -> u64 {
        match &members {
            None => bound,
            Some(list) => list.partition_point(|&x| x <= bound) as u64,
        }
    };
    Ok(eval_points
        .iter()
        .map(|&n| RatioPoint { n, count_n: count_up_to(n), count_2n: count_up_to(2 * n) })
        .collect())
}

// ---------------------------------------------------------------------------
// Syndetic additive averages and finite-system recurrence averages
// ---------------------------------------------------------------------------

/// E_{n ∈ G ∩ [N]} 1_S(n); S is intersected with G so the value is the
/// conditional density of S inside G's prefix.
pub fn syndetic_additive_average(
    s_pred: impl Fn(u64) -> bool + Sync,
    g_pred: impl Fn(u64) -> bool + Sync,
    n: u64,
) -> Result<f64, DensityError> {
    if n == 0 {
        return Err(DensityError::InvalidBound);
    }
    let (g_count, s_count) = (1..=n)
        .into_par_iter()
        .map(|x| {
            if g_pred(x) {
                (1u64, u64::from(s_pred(x)))
            } else {
                (0, 0)
            }
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    if g_count == 0 {
        return Err(DensityError::EmptyPrefix);
    }
    Ok(s_count as f64 / g_count as f64)
}

/// E_{n ∈ G ∩ [N]} μ(A ∩ T_n⁻¹ A) on a finite multiplicative system under the
/// uniform measure on states. A must be a nonempty set of valid states.
pub fn finite_system_recurrence_average(
    sys: &FiniteMultSystem,
    a_states: &[usize],
    g_pred: impl Fn(u64) -> bool + Sync,
    n: u64,
) -> Result<f64, DensityError> {
    if n == 0 {
        return Err(DensityError::InvalidBound);
    }
    let s = sys.num_states();
    if a_states.is_empty() || a_states.iter().any(|&x| x >= s) {
        return Err(DensityError::System("state subset must be nonempty and in range".into()));
    }
    let mut in_a = vec![false; s];
    for &x in a_states {
        in_a[x] = true;
    }
    let (g_count, mass) = (1..=n)
        .into_par_iter()
        .map(|x| -> Result<(u64, u64), DensityError> {
            if !g_pred(x) {
                return Ok((0, 0));
            }
            // |A ∩ T_x⁻¹A| counted through the forward permutation.
            let mut hits = 0u64;
            for &state in a_states {
                let image = sys.apply(x, state).map_err(|e| DensityError::System(e.to_string()))?;
                if in_a[image] {
                    hits += 1;
                }
            }
            Ok((1, hits))
        })
        .try_reduce(|| (0, 0), |a, b| Ok((a.0 + b.0, a.1 + b.1)))?;
    if g_count == 0 {
        return Err(DensityError::EmptyPrefix);
    }
    Ok(mass as f64 / (g_count as f64 * s as f64))
}
