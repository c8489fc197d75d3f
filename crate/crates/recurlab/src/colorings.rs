//! Obstruction colorings of ℕ, finite multiplicative systems, and the
//! monochromatic-ratio-pair search that operationalizes topological
//! multiplicative recurrence.

use crate::arith;
use crate::qplus::PosRational;
use crate::recsets::{self, Containment, RatFamily};
use serde::{Serialize, Serializer};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum ColoringsError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("a | b(b−1) for (a, b) = ({a}, {b}): the closure criterion holds and no fixed-point-free system exists")]
    CriterionHolds { a: u64, b: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Arith(#[from] crate::arith::ArithError),
}

/// A finite coloring of ℕ. Values lie in [0, num_colors); the palette may be
/// sparse (e.g. only residues coprime to p occur for the p-adic coloring) —
/// the pair search only ever compares values for equality.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Coloring {
    /// Single color 0.
    Constant,
    /// χ(n) = (n / p^{v_p(n)}) mod p^u: the residue of the p-free part.
    PadicResidue { p: u64, u: u32, modulus: u64 },
    /// Write m = 3^k q with 3 ∤ q; color 1 if q ≡ 1 (mod 3), else 2.
    Rado3,
    /// Parity of the p-adic valuation: 0 even, 1 odd.
    ValuationParity { p: u64 },
    /// χ(n) = T_n(base) in a finite multiplicative system.
    SystemOrbit { system: FiniteMultSystem, base: usize },
    /// Write x = y^l z with z free of l-th powers; χ̃(x) = χ(y).
    PowerLift { inner: Box<Coloring>, l: u32 },
}

pub fn padic_residue_coloring(p: u64, u: u32) -> Result<Coloring, ColoringsError> {
    if !arith::is_prime(p) {
        return Err(ColoringsError::NotPrime(p));
    }
    if u == 0 {
        return Err(ColoringsError::InvalidParameter("need u ≥ 1".into()));
    }
    let modulus = p
        .checked_pow(u)
        .filter(|&m| m < (1 << 62))
        .ok_or_else(|| ColoringsError::InvalidParameter(format!("p^u overflows: {p}^{u}")))?;
    Ok(Coloring::PadicResidue { p, u, modulus })
}

pub fn rado3_coloring() -> Coloring {
    Coloring::Rado3
}

pub fn valuation_parity_coloring(p: u64) -> Result<Coloring, ColoringsError> {
    if !arith::is_prime(p) {
        return Err(ColoringsError::NotPrime(p));
    }
    Ok(Coloring::ValuationParity { p })
}

pub fn system_orbit_coloring(
    sys: FiniteMultSystem,
    base: usize,
) -> Result<Coloring, ColoringsError> {
    if base >= sys.num_states() {
        return Err(ColoringsError::InvalidParameter(format!(
            "base state {base} out of range for {} states",
            sys.num_states()
        )));
    }
    Ok(Coloring::SystemOrbit { system: sys, base })
}

pub fn power_lift_coloring(inner: Coloring, l: u32) -> Result<Coloring, ColoringsError> {
    if l == 0 {
        return Err(ColoringsError::InvalidParameter("need l ≥ 1".into()));
    }
    if l == 1 {
        return Ok(inner);
    }
    Ok(Coloring::PowerLift { inner: Box::new(inner), l })
}

/// The residue-coloring obstruction for a power family: the (p, u) coloring
/// lifted through l-th powers.
pub fn padic_power_coloring(p: u64, u: u32, l: u32) -> Result<Coloring, ColoringsError> {
    power_lift_coloring(padic_residue_coloring(p, u)?, l)
}

impl Coloring {
    pub fn eval(&self, n: u64) -> Result<u64, ColoringsError> {
        if n == 0 {
            return Err(ColoringsError::InvalidParameter("colorings are defined on n ≥ 1".into()));
        }
        match self {
            Coloring::Constant => Ok(0),
            Coloring::PadicResidue { p, modulus, .. } => {
                let mut m = n;
                while m % p == 0 {
                    m /= p;
                }
                Ok(m % modulus)
            }
            Coloring::Rado3 => {
                let mut q = n;
                while q % 3 == 0 {
                    q /= 3;
                }
                Ok(if q % 3 == 1 { 1 } else { 2 })
            }
            Coloring::ValuationParity { p } => {
                let mut m = n;
                let mut v = 0u64;
                while m % p == 0 {
                    m /= p;
                    v += 1;
                }
                Ok(v % 2)
            }
            Coloring::SystemOrbit { system, base } => {
                Ok(system.apply(n, *base)? as u64)
            }
            Coloring::PowerLift { inner, l } => {
                let f = arith::factorize(n)?;
                let (y, _) = f.power_split(*l);
                inner.eval(y)
            }
        }
    }

    /// Exclusive upper bound on the values eval can take.
    pub fn num_colors(&self) -> u64 {
        match self {
            Coloring::Constant => 1,
            Coloring::PadicResidue { modulus, .. } => *modulus,
            Coloring::Rado3 => 3,
            Coloring::ValuationParity { .. } => 2,
            Coloring::SystemOrbit { system, .. } => system.num_states() as u64,
            Coloring::PowerLift { inner, .. } => inner.num_colors(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Coloring::Constant => "constant".into(),
            Coloring::PadicResidue { p, u, .. } => format!("padic-{p}-{u}"),
            Coloring::Rado3 => "rado3".into(),
            Coloring::ValuationParity { p } => format!("valuation-parity-{p}"),
            Coloring::SystemOrbit { system, base } => {
                format!("orbit-{}-from-{base}", system.name())
            }
            Coloring::PowerLift { inner, l } => format!("lift-{l}-{}", inner.name()),
        }
    }

    pub fn params(&self) -> Vec<i64> {
        match self {
            Coloring::Constant | Coloring::Rado3 => vec![],
            Coloring::PadicResidue { p, u, .. } => vec![*p as i64, *u as i64],
            Coloring::ValuationParity { p } => vec![*p as i64],
            Coloring::SystemOrbit { system, base } => {
                vec![system.num_states() as i64, *base as i64]
            }
            Coloring::PowerLift { inner, l } => {
                let mut v = inner.params();
                v.push(*l as i64);
                v
            }
        }
    }
}

/// A finite multiplicative system: states [s] acted on by commuting
/// permutations T_n with T_{mn} = T_m ∘ T_n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteMultSystem {
    name: String,
    num_states: usize,
    kind: SystemKind,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
enum SystemKind {
    /// Explicit permutation per listed prime; unlisted primes act as the
    /// identity. The listed permutations must pairwise commute so that the
    /// extension over factorizations is well defined.
    PrimeTable { actions: BTreeMap<u64, Vec<usize>> },
    /// States are the units mod `modulus`; T_n multiplies by n with every
    /// prime dividing `modulus` stripped first.
    UnitsMul { modulus: u64, units: Vec<u64>, strip: Vec<u64> },
    /// States are Z_k; T_n adds the p-adic valuation of n.
    ValuationShift { p: u64, k: u32 },
}

impl FiniteMultSystem {
    /// Identity-action system on `s` states.
    pub fn identity(s: usize) -> Result<Self, ColoringsError> {
        Self::from_prime_table("identity".into(), s, BTreeMap::new())
    }

    /// System defined by a table of per-prime permutations (unlisted primes
    /// act as the identity). Each permutation is validated and the table is
    /// checked for pairwise commutation.
    pub fn from_prime_table(
        name: String,
        s: usize,
        actions: BTreeMap<u64, Vec<usize>>,
    ) -> Result<Self, ColoringsError> {
        if s == 0 {
            return Err(ColoringsError::InvalidParameter("need at least one state".into()));
        }
        for (&p, perm) in &actions {
            if !arith::is_prime(p) {
                return Err(ColoringsError::NotPrime(p));
            }
            let mut seen = vec![false; s];
            if perm.len() != s {
                return Err(ColoringsError::InvalidParameter(format!(
                    "action for prime {p} has length {} ≠ {s}",
                    perm.len()
                )));
            }
            for &img in perm {
                if img >= s || seen[img] {
                    return Err(ColoringsError::InvalidParameter(format!(
                        "action for prime {p} is not a permutation"
                    )));
                }
                seen[img] = true;
            }
        }
        let perms: Vec<&Vec<usize>> = actions.values().collect();
        for i in 0..perms.len() {
            for j in i + 1..perms.len() {
                let ab: Vec<usize> = (0..s).map(|x| perms[i][perms[j][x]]).collect();
                let ba: Vec<usize> = (0..s).map(|x| perms[j][perms[i][x]]).collect();
                if ab != ba {
                    return Err(ColoringsError::InvalidParameter(
                        "prime actions do not commute; T_{mn} = T_m ∘ T_n would fail".into(),
                    ));
                }
            }
        }
        Ok(FiniteMultSystem { name, num_states: s, kind: SystemKind::PrimeTable { actions } })
    }

    pub fn units_mul(modulus: u64) -> Result<Self, ColoringsError> {
        if modulus < 2 {
            return Err(ColoringsError::InvalidParameter("need modulus ≥ 2".into()));
        }
        let units: Vec<u64> = (1..modulus).filter(|&x| arith::gcd(x, modulus) == 1).collect();
        let strip: Vec<u64> = arith::factorize(modulus)
            .map_err(ColoringsError::Arith)?
            .pairs()
            .iter()
            .map(|&(p, _)| p)
            .collect();
        Ok(FiniteMultSystem {
            name: format!("units-mod-{modulus}"),
            num_states: units.len(),
            kind: SystemKind::UnitsMul { modulus, units, strip },
        })
    }

    pub fn valuation_shift(p: u64, k: u32) -> Result<Self, ColoringsError> {
        if !arith::is_prime(p) {
            return Err(ColoringsError::NotPrime(p));
        }
        if k == 0 {
            return Err(ColoringsError::InvalidParameter("need k ≥ 1".into()));
        }
        Ok(FiniteMultSystem {
            name: format!("valuation-{p}-mod-{k}"),
            num_states: k as usize,
            kind: SystemKind::ValuationShift { p, k },
        })
    }

    pub fn num_states(&self) -> usize {
        self.num_states
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// T_n applied to one state.
    pub fn apply(&self, n: u64, x: usize) -> Result<usize, ColoringsError> {
        if n == 0 {
            return Err(ColoringsError::InvalidParameter("T_n needs n ≥ 1".into()));
        }
        if x >= self.num_states {
            return Err(ColoringsError::InvalidParameter(format!("state {x} out of range")));
        }
        match &self.kind {
            SystemKind::PrimeTable { actions } => {
                let f = arith::factorize(n)?;
                let mut state = x;
                for &(p, e) in f.pairs() {
                    if let Some(perm) = actions.get(&p) {
                        for _ in 0..e {
                            state = perm[state];
                        }
                    }
                }
                Ok(state)
            }
            SystemKind::UnitsMul { modulus, units, strip } => {
                let mut v = n;
                for &p in strip {
                    while v % p == 0 {
                        v /= p;
                    }
                }
                let target = (units[x] as u128 * (v % modulus) as u128 % *modulus as u128) as u64;
                Ok(units.binary_search(&target).expect("product of units is a unit"))
            }
            SystemKind::ValuationShift { p, k } => {
                let mut v = 0u32;
                let mut m = n;
                while m % p == 0 {
                    m /= p;
                    v += 1;
                }
                Ok(((x as u64 + v as u64) % *k as u64) as usize)
            }
        }
    }

    /// T_n as a full permutation of the states.
    pub fn permutation(&self, n: u64) -> Result<Vec<usize>, ColoringsError> {
        (0..self.num_states).map(|x| self.apply(n, x)).collect()
    }

    /// Check T_{mn} = T_m ∘ T_n for all m, n ≤ bound.
    pub fn verify_homomorphism(&self, bound: u64) -> Result<bool, ColoringsError> {
        let perms: Vec<Vec<usize>> =
            (1..=bound).map(|n| self.permutation(n)).collect::<Result<_, _>>()?;
        for m in 1..=bound {
            for n in m..=bound {
                let composed: Vec<usize> = (0..self.num_states)
                    .map(|x| perms[(m - 1) as usize][perms[(n - 1) as usize][x]])
                    .collect();
                if composed != self.permutation(m * n)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Does T_n move every state?
    pub fn fixed_point_free_for(&self, n: u64) -> Result<bool, ColoringsError> {
        for x in 0..self.num_states {
            if self.apply(n, x)? == x {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Which construction produced an obstruction system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum ObstructionCase {
    /// gcd(a′, b) = 1: multiplication on the units mod a′.
    CoprimeUnits { modulus: u64 },
    /// A prime p | gcd(a′, b): valuation shift on Z_k with k = v_p(b) + 1.
    PrimeValuation { p: u64, k: u32 },
}

#[derive(Debug, Clone, Serialize)]
pub struct ObstructionReport {
    pub a: u64,
    /// Canonical residue b mod a.
    pub b: u64,
    pub case: ObstructionCase,
    pub system: FiniteMultSystem,
}

/// The fixed-point-free finite system for the progression aℕ + b, which
/// exists precisely when a ∤ b(b−1). Every T_n with n ≡ b (mod a) moves
/// every state, so no finite coloring argument can be defeated along the
/// progression: χ(x) ≠ χ(nx) for the induced orbit coloring.
pub fn moebius_obstruction_system(a: u64, b: i64) -> Result<ObstructionReport, ColoringsError> {
    if a == 0 {
        return Err(ColoringsError::InvalidParameter("need a ≥ 1".into()));
    }
    let b = b.rem_euclid(a as i64) as u64;
    if (b as u128 * (b as u128 + a as u128 - 1)) % a as u128 == 0 {
        return Err(ColoringsError::CriterionHolds { a, b });
    }
    let g = arith::gcd(a, b);
    let a1 = a / g;
    if arith::gcd(a1, b) == 1 {
        let system = FiniteMultSystem::units_mul(a1)?;
        Ok(ObstructionReport {
            a,
            b,
            case: ObstructionCase::CoprimeUnits { modulus: a1 },
            system,
        })
    } else {
        let p = arith::factorize(arith::gcd(a1, b))
            .map_err(ColoringsError::Arith)?
            .pairs()[0]
            .0;
        let mut k = 1u32;
        let mut m = b;
        while m % p == 0 {
            m /= p;
            k += 1;
        }
        let system = FiniteMultSystem::valuation_shift(p, k)?;
        Ok(ObstructionReport {
            a,
            b,
            case: ObstructionCase::PrimeValuation { p, k },
            system,
        })
    }
}

fn ser_ratio<S: Serializer>(r: &Option<PosRational>, s: S) -> Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_some(&r.to_fraction().to_string()),
        None => s.serialize_none(),
    }
}

/// Outcome of the monochromatic-ratio-pair search.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    pub found: bool,
    /// (x, y) with x < y, χ(x) = χ(y), and y/x or x/y in the family — or
    /// the degenerate (1, 1) exactly when 1 is itself a member (recurrence
    /// is then automatic through the identity).
    pub pair: Option<(u64, u64)>,
    #[serde(serialize_with = "ser_ratio")]
    pub ratio: Option<PosRational>,
    pub family_params: Option<Vec<i128>>,
    pub search_bound: u64,
    /// True when found=false really means "no pair with y ≤ search_bound":
    /// the family's ratio enumeration was provably complete. Families
    /// without a closed-form parameter bound report false here.
    pub exhaustive: bool,
}

/// Lexicographically least (by y, then x) monochromatic pair x < y ≤ N with
/// y/x ∈ R ∪ R⁻¹, or a no-pair report. The ratio of a found pair is
/// re-verified through the family's exact membership test.
pub fn find_monochromatic_ratio_pair(
    coloring: &Coloring,
    family: &RatFamily,
    n_bound: u64,
) -> Result<WitnessReport, ColoringsError> {
    let n_bound = n_bound.max(2);
    // Degenerate identity member: recurrence is automatic.
    if let Containment::Yes(params) = recsets::contains(family, &PosRational::one(), 64) {
        return Ok(WitnessReport {
            found: true,
            pair: Some((1, 1)),
            ratio: Some(PosRational::one()),
            family_params: Some(params),
            search_bound: n_bound,
            exhaustive: true,
        });
    }
    let mut prev_cap = 1u64;
    let mut cap = 64u64.min(n_bound);
    let exhaustive;
    loop {
        let set = recsets::oriented_ratios(family, cap);
        let round_complete = set.complete;
        let mut candidates: Vec<(u64, u64)> = Vec::new();
        for &(hi, lo) in &set.ratios {
            // y = t·hi ∈ (prev_cap, cap]; earlier rounds covered y ≤ prev_cap.
            let t0 = prev_cap / hi + 1;
            for t in t0..=cap / hi {
                candidates.push((t * hi, t * lo));
            }
        }
        candidates.sort_unstable();
        for (y, x) in candidates {
            if coloring.eval(x)? == coloring.eval(y)? {
                let up = PosRational::from_fraction(y, x)
                    .expect("y, x ≥ 1");
                let (ratio, params) = match recsets::contains(family, &up, 2048) {
                    Containment::Yes(p) => (up, p),
                    _ => match recsets::contains(family, &up.inverse(), 2048) {
                        Containment::Yes(p) => (up.inverse(), p),
                        _ => {
                            debug_assert!(false, "enumerated ratio failed re-verification");
                            continue;
                        }
                    },
                };
                return Ok(WitnessReport {
                    found: true,
                    pair: Some((x, y)),
                    ratio: Some(ratio),
                    family_params: Some(params),
                    search_bound: n_bound,
                    exhaustive: true,
                });
            }
        }
        if cap >= n_bound {
            exhaustive = round_complete;
            break;
        }
        prev_cap = cap;
        cap = cap.saturating_mul(8).min(n_bound);
    }
    Ok(WitnessReport {
        found: false,
        pair: None,
        ratio: None,
        family_params: None,
        search_bound: n_bound,
        exhaustive,
    })
}
