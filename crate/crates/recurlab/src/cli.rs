//! Command-line front end: experiment orchestration and machine-readable
//! output (JSON lines by default, CSV for tabular sweeps) over every module.
//!
//! Determinism contract: a fixed invocation (including `--seed`) produces
//! byte-identical output at any `--workers` setting. Exit codes: 0 success,
//! 1 verdict-level finding (e.g. a verification failure), 2 usage errors.

use crate::colorings::{self, FiniteMultSystem};
use crate::density::{self, ClosureGenerators, SparseSemigroupSchedule};
use crate::descriptor;
use crate::ffield;
use crate::multfunc::{self, Cmf};
use crate::paramult::{self, StarSemigroup};
use crate::qplus::PosRational;
use crate::recsets::{self, RatFamily};
use crate::semigroups;
use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashSet;
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "recurlab",
    version,
    about = "Exact experiments on multiplicative recurrence, colorings, and finite fields"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Worker threads (default: RECURLAB_WORKERS or all cores). Output bytes
    /// never depend on this.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output format: json (JSON lines) or csv (tabular sweeps only).
    #[arg(long, global = true, value_enum, default_value = "json")]
    output: OutputFormat,
    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<std::path::PathBuf>,
    /// RNG seed for random-subset trials.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Primary search/verification bound (meaning fixed per subcommand).
    #[arg(long, global = true)]
    bound: Option<u64>,
    /// Scan limit N (meaning fixed per subcommand).
    #[arg(long = "max-n", global = true)]
    max_n: Option<u64>,
    /// Number of randomized trials where applicable.
    #[arg(long, global = true)]
    trials: Option<u64>,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Classify a family descriptor as recurrent / not recurrent.
    Classify {
        #[arg(long)]
        family: String,
    },
    /// Search for a monochromatic pair x, y with y/x in the family.
    Witness {
        #[arg(long)]
        coloring: String,
        #[arg(long)]
        family: String,
    },
    /// Build and check the fixed-point-free system for {(an+b)/(an)}-type
    /// families.
    VerifyObstruction {
        #[arg(long)]
        a: u64,
        #[arg(long)]
        b: i64,
    },
    /// Decreasing envelope of |f(an+k) − f(an)| for a circle-valued f.
    Gap {
        #[arg(long, default_value = "omega-root")]
        kind: String,
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, default_value_t = 2)]
        q: u64,
        /// Root-of-unity index for omega-root.
        #[arg(long = "char-a", default_value_t = 1)]
        char_a: i64,
        /// Character exponent t for the archimedean kind.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// All n ≤ N with Ω(an+k) ≡ Ω(an) (mod q).
    OmegaWitness {
        #[arg(long, default_value_t = 1)]
        a: u64,
        #[arg(long, default_value_t = 1)]
        k: u64,
        #[arg(long, default_value_t = 2)]
        q: u64,
    },
    /// Polynomial/linear semigroup classification and searches.
    Semigroup {
        #[arg(long)]
        family: String,
        /// classify | progressions | closure
        #[arg(long)]
        op: String,
        /// Progression length K for --op progressions.
        #[arg(long, default_value_t = 6)]
        terms: u32,
    },
    /// Matrix-embedded star semigroups: multiplicativity, subordination,
    /// zero density.
    Paramult {
        /// Builtin name: gaussian | dsum:D | eisenstein | fibonacci |
        /// general2x2:a,b,c,d | quaternion | quaternion-sqrt.
        #[arg(long, conflicts_with = "file")]
        example: Option<String>,
        /// JSON file holding a custom semigroup definition.
        #[arg(long)]
        file: Option<std::path::PathBuf>,
        /// verify | subordination | zeros
        #[arg(long)]
        op: String,
    },
    /// Følner, prefix, ratio, syndetic, and system-average densities.
    Density {
        /// folner | prefix | ratio | syndetic | system-average
        #[arg(long)]
        op: String,
        #[arg(long)]
        family: Option<String>,
        /// Dilation generator for --op folner.
        #[arg(long, default_value_t = 2)]
        g: u64,
        /// Closure generators for --op ratio: naturals | primes-squared |
        /// s1,s2,.. (sparse prime-interval schedule starts).
        #[arg(long)]
        gen: Option<String>,
        /// Evaluation points n1,n2,.. for --op ratio / prefix.
        #[arg(long)]
        points: Option<String>,
        /// Finite system for --op system-average: units:m=M |
        /// valshift:p=P,k=K | identity:s=S.
        #[arg(long)]
        system: Option<String>,
        /// Return states (comma list) for --op system-average.
        #[arg(long, default_value = "0")]
        states: String,
    },
    /// Prime-field experiments: squares, shifted intersections, pair
    /// density trials, avoiding-set certificates.
    Ff {
        #[arg(long)]
        p: u64,
        /// squares | schmidt:a1,a2,.. | pair:density=D,trials=T | avoid:a,b,c
        #[arg(long)]
        op: String,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Io(String),
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn usage<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Usage(msg.into()))
}

/// Buffered output: rows accumulate and are written once, so bytes are
/// identical whatever the worker count.
struct Emitter {
    format: OutputFormat,
    lines: Vec<String>,
    csv_header: Option<&'static str>,
}

impl Emitter {
    fn new(format: OutputFormat) -> Self {
        Emitter { format, lines: Vec::new(), csv_header: None }
    }

    fn json<T: Serialize>(&mut self, record: &T) -> Result<(), CliError> {
        let line = serde_json::to_string(record)
            .map_err(|e| CliError::Io(format!("serialization failed: {e}")))?;
        self.lines.push(line);
        Ok(())
    }

    /// A record that exists in both formats; `csv_row` must match `header`.
    fn row<T: Serialize>(
        &mut self,
        record: &T,
        header: &'static str,
        csv_row: String,
    ) -> Result<(), CliError> {
        match self.format {
            OutputFormat::Json => self.json(record),
            OutputFormat::Csv => {
                if self.csv_header != Some(header) {
                    if self.csv_header.is_some() {
                        return usage("mixed CSV schemas in one run");
                    }
                    self.csv_header = Some(header);
                    self.lines.push(header.to_string());
                }
                self.lines.push(csv_row);
                Ok(())
            }
        }
    }

    /// JSON-only summary records are skipped in CSV mode.
    fn summary<T: Serialize>(&mut self, record: &T) -> Result<(), CliError> {
        match self.format {
            OutputFormat::Json => self.json(record),
            OutputFormat::Csv => Ok(()),
        }
    }

    fn finish(self, out: Option<&std::path::Path>) -> Result<(), CliError> {
        let mut text = self.lines.join("\n");
        if !text.is_empty() {
            text.push('\n');
        }
        match out {
            Some(path) => std::fs::write(path, text)?,
            None => std::io::stdout().write_all(text.as_bytes())?,
        }
        Ok(())
    }
}

fn require_json(format: OutputFormat, what: &str) -> Result<(), CliError> {
    if format == OutputFormat::Csv {
        return usage(format!("{what} has no tabular form; use --output json"));
    }
    Ok(())
}

fn rational_str(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

fn parse_u64_list(text: &str, what: &str) -> Result<Vec<u64>, CliError> {
    text.split(',')
        .map(|piece| {
            piece
                .parse::<u64>()
                .map_err(|_| CliError::Usage(format!("{what}: bad integer {piece:?}")))
        })
        .collect()
}

/// Entry point used by the binary: parses, runs, exits.
pub fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        // Clap prints help/version (exit 0) and usage errors (exit 2).
        Err(e) => e.exit(),
    };
    if let Some(workers) = effective_workers(&cli) {
        // Ignore the error if a pool already exists (e.g. under tests).
        let _ = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global();
    }
    let mut emitter = Emitter::new(cli.output);
    let code = match run(&cli, &mut emitter) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
    };
    if let Err(CliError::Io(msg) | CliError::Usage(msg)) = emitter.finish(cli.out.as_deref()) {
        eprintln!("error: {msg}");
        std::process::exit(1);
    }
    std::process::exit(code);
}

fn effective_workers(cli: &Cli) -> Option<usize> {
    cli.workers.or_else(|| {
        std::env::var("RECURLAB_WORKERS").ok().and_then(|v| v.parse::<usize>().ok())
    })
}

fn run(cli: &Cli, em: &mut Emitter) -> Result<i32, CliError> {
    match &cli.cmd {
        Cmd::Classify { family } => cmd_classify(family, em),
        Cmd::Witness { coloring, family } => {
            cmd_witness(coloring, family, cli.max_n.unwrap_or(1_000_000), em)
        }
        Cmd::VerifyObstruction { a, b } => {
            cmd_verify_obstruction(*a, *b, cli.max_n.unwrap_or(10_000), em)
        }
        Cmd::Gap { kind, a, k, q, char_a, t } => {
            cmd_gap(kind, *a, *k, *q, *char_a, *t, cli.max_n.unwrap_or(1_000_000), em)
        }
        Cmd::OmegaWitness { a, k, q } => {
            cmd_omega_witness(*a, *k, *q, cli.max_n.unwrap_or(10_000), em)
        }
        Cmd::Semigroup { family, op, terms } => cmd_semigroup(
            family,
            op,
            cli.bound.unwrap_or(12),
            *terms,
            cli.max_n.unwrap_or(10_000),
            em,
        ),
        Cmd::Paramult { example, file, op } => {
            cmd_paramult(example.as_deref(), file.as_deref(), op, cli.bound, em)
        }
        Cmd::Density { op, family, g, gen, points, system, states } => cmd_density(
            op,
            family.as_deref(),
            *g,
            gen.as_deref(),
            points.as_deref(),
            system.as_deref(),
            states,
            cli.max_n,
            cli.bound,
            em,
        ),
        Cmd::Ff { p, op } => cmd_ff(*p, op, cli.seed, cli.trials, em),
    }
}

// ---------------------------------------------------------------------------
// classify / witness / verify-obstruction
// ---------------------------------------------------------------------------

fn cmd_classify(family_text: &str, em: &mut Emitter) -> Result<i32, CliError> {
    require_json(em.format, "classify")?;
    let family = descriptor::parse_family(family_text).map_err(|e| CliError::Usage(e.to_string()))?;
    let verdict = match family {
        RatFamily::MoebiusPower { a, b, c, d, l } => recsets::classify_moebius(a, b, c, d, l),
        RatFamily::LinearImage { a, b } => recsets::classify_linear(a, b),
        _ => return usage("classify supports moebius:... and linear:... descriptors"),
    }
    .map_err(|e| CliError::Usage(e.to_string()))?;
    em.json(&verdict)?;
    Ok(0)
}

fn cmd_witness(
    coloring_text: &str,
    family_text: &str,
    max_n: u64,
    em: &mut Emitter,
) -> Result<i32, CliError> {
    require_json(em.format, "witness")?;
    let coloring =
        descriptor::parse_coloring(coloring_text).map_err(|e| CliError::Usage(e.to_string()))?;
    let family = descriptor::parse_family(family_text).map_err(|e| CliError::Usage(e.to_string()))?;
    let report = colorings::find_monochromatic_ratio_pair(&coloring, &family, max_n)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    em.json(&report)?;
    Ok(0)
}

#[derive(Serialize)]
struct ObstructionRecord {
    a: u64,
    b: i64,
    criterion_holds: bool,
    report: Option<colorings::ObstructionReport>,
    homomorphism_ok: Option<bool>,
    fixed_point_free_checked: u64,
    all_fixed_point_free: Option<bool>,
}

fn cmd_verify_obstruction(a: u64, b: i64, max_n: u64, em: &mut Emitter) -> Result<i32, CliError> {
    require_json(em.format, "verify-obstruction")?;
    if a == 0 {
        return usage("need a ≥ 1");
    }
    match colorings::moebius_obstruction_system(a, b) {
        Err(colorings::ColoringsError::CriterionHolds { .. }) => {
            em.json(&ObstructionRecord {
                a,
                b,
                criterion_holds: true,
                report: None,
                homomorphism_ok: None,
                fixed_point_free_checked: 0,
                all_fixed_point_free: None,
            })?;
            Ok(0)
        }
        Err(e) => usage(e.to_string()),
        Ok(report) => {
            let hom_ok = report
                .system
                .verify_homomorphism(max_n.min(300))
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let r = b.rem_euclid(a as i64) as u64;
            let mut checked = 0u64;
            let mut all_free = true;
            let mut n = if r == 0 { a } else { r };
            while n <= max_n && checked < 100 {
                let free = report
                    .system
                    .fixed_point_free_for(n)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                all_free &= free;
                checked += 1;
                n += a;
            }
            let ok = hom_ok && all_free;
            em.json(&ObstructionRecord {
                a,
                b,
                criterion_holds: false,
                report: Some(report),
                homomorphism_ok: Some(hom_ok),
                fixed_point_free_checked: checked,
                all_fixed_point_free: Some(all_free),
            })?;
            Ok(if ok { 0 } else { 1 })
        }
    }
}

// ---------------------------------------------------------------------------
// gap / omega-witness
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct GapRow {
    n: u64,
    lhs: f64,
    rhs: f64,
    gap: f64,
}

#[derive(Serialize)]
struct GapSummary {
    a: u64,
    k: u64,
    n_bound: u64,
    min_gap: f64,
    argmin: u64,
}

fn cmd_gap(
    kind: &str,
    a: u64,
    k: u64,
    q: u64,
    char_a: i64,
    t: f64,
    max_n: u64,
    em: &mut Emitter,
) -> Result<i32, CliError> {
    let f = match kind {
        "omega-root" => Cmf::OmegaRoot { a: char_a, q },
        "archimedean" => Cmf::ArchimedeanCharacter { t },
        other => return usage(format!("unknown --kind {other:?} (omega-root, archimedean)")),
    };
    let report =
        multfunc::shift_dilation_gap(&f, a, k, max_n).map_err(|e| CliError::Usage(e.to_string()))?;
    for s in &report.envelope {
        let row = GapRow { n: s.n, lhs: s.lhs_turns, rhs: s.rhs_turns, gap: s.gap };
        em.row(&row, "n,lhs,rhs,gap", format!("{},{},{},{}", s.n, s.lhs_turns, s.rhs_turns, s.gap))?;
    }
    em.summary(&GapSummary {
        a: report.a,
        k: report.k,
        n_bound: report.n_bound,
        min_gap: report.min_gap,
        argmin: report.argmin,
    })?;
    Ok(0)
}

fn cmd_omega_witness(
    a: u64,
    k: u64,
    q: u64,
    max_n: u64,
    em: &mut Emitter,
) -> Result<i32, CliError> {
    let witnesses =
        multfunc::omega_witnesses(a, k, q, max_n).map_err(|e| CliError::Usage(e.to_string()))?;
    for n in witnesses {
        let lhs = crate::arith::big_omega(a * n + k).map_err(|e| CliError::Usage(e.to_string()))?;
        let rhs = crate::arith::big_omega(a * n).map_err(|e| CliError::Usage(e.to_string()))?;
        let gap = (lhs % q as u32).abs_diff(rhs % q as u32);
        let row = GapRow { n, lhs: lhs as f64, rhs: rhs as f64, gap: gap as f64 };
        em.row(&row, "n,lhs,rhs,gap", format!("{n},{lhs},{rhs},{gap}"))?;
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// semigroup
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ProgressionSummary {
    base_bound: u64,
    power_bound: u32,
    survivors: usize,
}

#[derive(Serialize)]
struct ClosureRecord {
    family: String,
    search_bound: u64,
    violation: Option<semigroups::ClosureViolation>,
}

fn cmd_semigroup(
    family_text: &str,
    op: &str,
    bound: u64,
    terms: u32,
    max_n: u64,
    em: &mut Emitter,
) -> Result<i32, CliError> {
    require_json(em.format, "semigroup")?;
    let family = descriptor::parse_family(family_text).map_err(|e| CliError::Usage(e.to_string()))?;
    match op {
        "classify" => {
            let poly = match &family {
                RatFamily::PolyImage { poly } => poly.clone(),
                RatFamily::LinearImage { a, b } => {
                    let (Ok(b_i), Ok(a_i)) = (i64::try_from(*b), i64::try_from(*a)) else {
                        return usage("linear coefficients too large to classify");
                    };
                    crate::poly::IntPoly::new(vec![b_i, a_i])
                }
                _ => return usage("semigroup classify needs a poly:... or linear:... family"),
            };
            em.json(&semigroups::poly_semigroup_classifier(&poly))?;
            Ok(0)
        }
        "progressions" => {
            let survivors = semigroups::geometric_progression_search(&family, bound, terms)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            for s in &survivors {
                em.json(s)?;
            }
            em.summary(&ProgressionSummary {
                base_bound: bound,
                power_bound: terms,
                survivors: survivors.len(),
            })?;
            Ok(0)
        }
        "closure" => {
            let violation = semigroups::closure_violation_search(&family, max_n)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            em.json(&ClosureRecord {
                family: family_text.to_string(),
                search_bound: max_n,
                violation,
            })?;
            Ok(0)
        }
        other => usage(format!("unknown --op {other:?} (classify, progressions, closure)")),
    }
}

// ---------------------------------------------------------------------------
// paramult
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct ViolationRow {
    n: Vec<u64>,
    m: Vec<u64>,
    product: Vec<u64>,
    f_product: String,
    f_n_times_f_m: String,
}

#[derive(Serialize)]
struct MultRecord {
    name: String,
    bound: u64,
    checked: u64,
    defined: u64,
    violations: Vec<ViolationRow>,
}

#[derive(Serialize)]
struct SubordinationRecord {
    name: String,
    bound: u64,
    empirical_sup_sq: String,
    analytic_bound_sq: String,
    defined_pairs: u64,
    within_bound: bool,
}

#[derive(Serialize)]
struct ZeroDensityRecord {
    name: String,
    bound: u64,
    zero_density: String,
    zero_density_float: f64,
}

fn cmd_paramult(
    example: Option<&str>,
    file: Option<&std::path::Path>,
    op: &str,
    bound: Option<u64>,
    em: &mut Emitter,
) -> Result<i32, CliError> {
    require_json(em.format, "paramult")?;
    let sg: StarSemigroup = match (example, file) {
        (Some(spec), None) => {
            paramult::builtin_by_name(spec).map_err(|e| CliError::Usage(e.to_string()))?
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            paramult::load_star_semigroup_json(&text).map_err(|e| CliError::Usage(e.to_string()))?
        }
        _ => return usage("pass exactly one of --example or --file"),
    };
    match op {
        "verify" => {
            let bound = bound.unwrap_or(6);
            let report = paramult::verify_multiplicativity(&sg, bound)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let has_violations = !report.violations.is_empty();
            em.json(&MultRecord {
                name: sg.name().to_string(),
                bound,
                checked: report.checked,
                defined: report.defined,
                violations: report
                    .violations
                    .iter()
                    .map(|v| ViolationRow {
                        n: v.n.coords().to_vec(),
                        m: v.m.coords().to_vec(),
                        product: v.product.coords().to_vec(),
                        f_product: rational_str(&v.f_product),
                        f_n_times_f_m: rational_str(&v.f_n_times_f_m),
                    })
                    .collect(),
            })?;
            Ok(if has_violations { 1 } else { 0 })
        }
        "subordination" => {
            let bound = bound.unwrap_or(4);
            let report = paramult::empirical_subordination(&sg, bound)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let within = report.empirical_sup_sq <= report.analytic_bound_sq;
            em.json(&SubordinationRecord {
                name: sg.name().to_string(),
                bound,
                empirical_sup_sq: rational_str(&report.empirical_sup_sq),
                analytic_bound_sq: rational_str(&report.analytic_bound_sq),
                defined_pairs: report.defined_pairs,
                within_bound: within,
            })?;
            Ok(if within { 0 } else { 1 })
        }
        "zeros" => {
            let bound = bound.unwrap_or(20);
            let dens =
                paramult::zero_density(&sg, bound).map_err(|e| CliError::Usage(e.to_string()))?;
            let float = {
                use num_traits::ToPrimitive;
                dens.to_f64().unwrap_or(f64::NAN)
            };
            em.json(&ZeroDensityRecord {
                name: sg.name().to_string(),
                bound,
                zero_density: rational_str(&dens),
                zero_density_float: float,
            })?;
            Ok(0)
        }
        other => usage(format!("unknown --op {other:?} (verify, subordination, zeros)")),
    }
}

// ---------------------------------------------------------------------------
// density
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct DensityRow {
    n: u64,
    count: u64,
    total: u64,
    value: f64,
}

#[derive(Serialize)]
struct SyndeticRecord {
    family: String,
    prefix_bound: u64,
    dilate_bound: u64,
    cover: Option<Vec<u64>>,
}

fn parse_system(text: &str) -> Result<FiniteMultSystem, CliError> {
    let (head, tail) = match text.split_once(':') {
        Some((h, t)) => (h, t),
        None => (text, ""),
    };
    let field = |key: &str| -> Result<u64, CliError> {
        for piece in tail.split(',') {
            if let Some((k, v)) = piece.split_once('=') {
                if k == key {
                    return v
                        .parse::<u64>()
                        .map_err(|_| CliError::Usage(format!("system: bad {key}={v:?}")));
                }
            }
        }
        usage(format!("system {head:?} needs field {key}"))
    };
    match head {
        "units" => FiniteMultSystem::units_mul(field("m")?)
            .map_err(|e| CliError::Usage(e.to_string())),
        "valshift" => {
            let p = field("p")?;
            let k = u32::try_from(field("k")?)
                .map_err(|_| CliError::Usage("system: k too large".into()))?;
            FiniteMultSystem::valuation_shift(p, k).map_err(|e| CliError::Usage(e.to_string()))
        }
        "identity" => {
            let s = usize::try_from(field("s")?)
                .map_err(|_| CliError::Usage("system: s too large".into()))?;
            FiniteMultSystem::identity(s).map_err(|e| CliError::Usage(e.to_string()))
        }
        other => usage(format!("unknown system {other:?} (units, valshift, identity)")),
    }
}

fn family_member(family: &RatFamily, n: u64) -> bool {
    PosRational::from_integer(n)
        .map(|r| recsets::contains(family, &r, 64).is_yes())
        .unwrap_or(false)
}

#[allow(clippy::too_many_arguments)]
fn cmd_density(
    op: &str,
    family_text: Option<&str>,
    g: u64,
    gen: Option<&str>,
    points: Option<&str>,
    system_text: Option<&str>,
    states_text: &str,
    max_n: Option<u64>,
    bound: Option<u64>,
    em: &mut Emitter,
) -> Result<i32, CliError> {
    let need_family = |text: Option<&str>| -> Result<RatFamily, CliError> {
        let text = text.ok_or_else(|| CliError::Usage("this op needs --family".into()))?;
        descriptor::parse_family(text).map_err(|e| CliError::Usage(e.to_string()))
    };
    match op {
        "folner" => {
            let hi = max_n.unwrap_or(8);
            let hi = u32::try_from(hi).map_err(|_| CliError::Usage("--max-n too large".into()))?;
            if g == 0 {
                return usage("--g must be positive");
            }
            for n in 1..=hi {
                let phi = density::FolnerIndex::divisors_of_factorial(n)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                let members: HashSet<u64> = phi.members().iter().copied().collect();
                let count = phi
                    .members()
                    .iter()
                    .filter(|&&m| m.checked_mul(g).is_some_and(|gm| members.contains(&gm)))
                    .count() as u64;
                let total = phi.len() as u64;
                let row = DensityRow {
                    n: n as u64,
                    count,
                    total,
                    value: count as f64 / total as f64,
                };
                em.row(
                    &row,
                    "N,count,total,value",
                    format!("{},{},{},{}", row.n, count, total, row.value),
                )?;
            }
            Ok(0)
        }
        "prefix" => {
            let family = need_family(family_text)?;
            let hi = max_n.unwrap_or(10_000);
            let checkpoints: Vec<u64> = match points {
                Some(text) => parse_u64_list(text, "--points")?,
                None => {
                    let mut pts = Vec::new();
                    let mut p = 10u64;
                    while p < hi {
                        pts.push(p);
                        p = p.saturating_mul(10);
                    }
                    pts.push(hi);
                    pts
                }
            };
            if checkpoints.is_empty() || checkpoints.iter().any(|&p| p == 0) {
                return usage("--points must be positive");
            }
            let hi = *checkpoints.iter().max().expect("nonempty");
            let mut count = 0u64;
            let mut next = checkpoints.clone();
            next.sort_unstable();
            next.dedup();
            let mut idx = 0usize;
            for n in 1..=hi {
                if family_member(&family, n) {
                    count += 1;
                }
                if idx < next.len() && n == next[idx] {
                    let row =
                        DensityRow { n, count, total: n, value: count as f64 / n as f64 };
                    em.row(
                        &row,
                        "N,count,total,value",
                        format!("{n},{count},{n},{}", row.value),
                    )?;
                    idx += 1;
                }
            }
            Ok(0)
        }
        "ratio" => {
            let gen_text = gen.ok_or_else(|| {
                CliError::Usage("--op ratio needs --gen naturals|primes-squared|s1,s2,..".into())
            })?;
            let generators = match gen_text {
                "naturals" => ClosureGenerators::AllNaturals,
                "primes-squared" => ClosureGenerators::AllPrimesSquared,
                list => {
                    let starts = parse_u64_list(list, "--gen")?;
                    let schedule = SparseSemigroupSchedule::new(starts)
                        .map_err(|e| CliError::Usage(e.to_string()))?;
                    ClosureGenerators::PrimeIntervals(schedule)
                }
            };
            let eval_points: Vec<u64> = match points {
                Some(text) => parse_u64_list(text, "--points")?,
                None => vec![max_n.ok_or_else(|| {
                    CliError::Usage("--op ratio needs --points or --max-n".into())
                })?],
            };
            let rows = density::ratio_experiment(&generators, &eval_points)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            for r in rows {
                let row = DensityRow {
                    n: r.n,
                    count: r.count_n,
                    total: r.count_2n,
                    value: r.ratio(),
                };
                em.row(
                    &row,
                    "N,count,total,value",
                    format!("{},{},{},{}", r.n, r.count_n, r.count_2n, row.value),
                )?;
            }
            Ok(0)
        }
        "syndetic" => {
            require_json(em.format, "density --op syndetic")?;
            let family = need_family(family_text)?;
            let hi = max_n.unwrap_or(1_000);
            let f_bound = bound.unwrap_or(30);
            let cover = density::syndetic_check(
                |n| family_member(&family, n),
                |_| true,
                f_bound,
                hi,
            )
            .map_err(|e| CliError::Usage(e.to_string()))?;
            em.json(&SyndeticRecord {
                family: family_text.unwrap_or_default().to_string(),
                prefix_bound: hi,
                dilate_bound: f_bound,
                cover,
            })?;
            Ok(0)
        }
        "system-average" => {
            let system_text = system_text
                .ok_or_else(|| CliError::Usage("--op system-average needs --system".into()))?;
            let sys = parse_system(system_text)?;
            let states: Vec<usize> = states_text
                .split(',')
                .map(|piece| {
                    piece
                        .parse::<usize>()
                        .map_err(|_| CliError::Usage(format!("--states: bad index {piece:?}")))
                })
                .collect::<Result<_, _>>()?;
            let n = max_n.unwrap_or(100_000);
            let avg = density::finite_system_recurrence_average(&sys, &states, |_| true, n)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            let row = DensityRow {
                n,
                count: states.len() as u64,
                total: sys.num_states() as u64,
                value: avg,
            };
            em.row(
                &row,
                "N,count,total,value",
                format!("{n},{},{},{avg}", states.len(), sys.num_states()),
            )?;
            Ok(0)
        }
        other => usage(format!(
            "unknown --op {other:?} (folner, prefix, ratio, syndetic, system-average)"
        )),
    }
}

// ---------------------------------------------------------------------------
// ff
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct SquaresRecord {
    p: u64,
    count: usize,
    squares: Vec<u64>,
}

#[derive(Serialize)]
struct SchmidtRecord {
    p: u64,
    shifts: Vec<u64>,
    count: u64,
    fraction: f64,
}

#[derive(Serialize)]
struct PairTrialRow {
    trial: u64,
    found: bool,
    x: Option<u64>,
    y: Option<u64>,
}

#[derive(Serialize)]
struct PairSummary {
    p: u64,
    subset_size: usize,
    trials: u64,
    successes: u64,
}

#[derive(Serialize)]
struct FfErrorRecord {
    error: String,
}

fn cmd_ff(
    p: u64,
    op: &str,
    seed: u64,
    trials_flag: Option<u64>,
    em: &mut Emitter,
) -> Result<i32, CliError> {
    require_json(em.format, "ff")?;
    let (head, tail) = match op.split_once(':') {
        Some((h, t)) => (h, t),
        None => (op, ""),
    };
    match head {
        "squares" => {
            let squares = ffield::squares(p).map_err(|e| CliError::Usage(e.to_string()))?;
            em.json(&SquaresRecord { p, count: squares.len(), squares })?;
            Ok(0)
        }
        "schmidt" => {
            let shifts = parse_u64_list(tail, "schmidt shifts")?;
            let count = ffield::shifted_squares_intersection(p, &shifts)
                .map_err(|e| CliError::Usage(e.to_string()))?;
            em.json(&SchmidtRecord { p, shifts, count, fraction: count as f64 / p as f64 })?;
            Ok(0)
        }
        "pair" => {
            let mut dens: Option<f64> = None;
            let mut trials: u64 = trials_flag.unwrap_or(100);
            for piece in tail.split(',') {
                match piece.split_once('=') {
                    Some(("density", v)) => {
                        dens = Some(v.parse::<f64>().map_err(|_| {
                            CliError::Usage(format!("pair: bad density {v:?}"))
                        })?);
                    }
                    Some(("trials", v)) => {
                        trials = v.parse::<u64>().map_err(|_| {
                            CliError::Usage(format!("pair: bad trials {v:?}"))
                        })?;
                    }
                    _ => return usage(format!("pair: expected density=D,trials=T, got {piece:?}")),
                }
            }
            let dens = dens.ok_or_else(|| CliError::Usage("pair: missing density=D".into()))?;
            if !(0.0..=1.0).contains(&dens) {
                return usage("pair: density must be in [0, 1]");
            }
            ffield::squares(p).map_err(|e| CliError::Usage(e.to_string()))?;
            let size = ((p as f64 * dens).ceil() as usize).clamp(1, p as usize);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut successes = 0u64;
            for trial in 0..trials {
                let subset: Vec<u64> = rand::seq::index::sample(&mut rng, p as usize, size)
                    .into_iter()
                    .map(|x| x as u64)
                    .collect();
                let hit = ffield::find_pythagorean_pair(p, &subset)
                    .map_err(|e| CliError::Usage(e.to_string()))?;
                successes += u64::from(hit.is_some());
                em.json(&PairTrialRow {
                    trial,
                    found: hit.is_some(),
                    x: hit.map(|(x, _)| x),
                    y: hit.map(|(_, y)| y),
                })?;
            }
            em.summary(&PairSummary { p, subset_size: size, trials, successes })?;
            Ok(0)
        }
        "avoid" => {
            let coeffs: Vec<i64> = tail
                .split(',')
                .map(|piece| {
                    piece
                        .parse::<i64>()
                        .map_err(|_| CliError::Usage(format!("avoid: bad integer {piece:?}")))
                })
                .collect::<Result<_, _>>()?;
            let [a, b, c] = coeffs[..] else {
                return usage("avoid: expected exactly a,b,c");
            };
            match ffield::construct_avoiding_set(a, b, c, p) {
                Ok(cert) => {
                    em.json(&cert)?;
                    Ok(0)
                }
                Err(e @ ffield::FfieldError::VerificationFailure { .. }) => {
                    em.json(&FfErrorRecord { error: e.to_string() })?;
                    Ok(1)
                }
                Err(e) => usage(e.to_string()),
            }
        }
        other => usage(format!("unknown ff op {other:?} (squares, schmidt, pair, avoid)")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn system_descriptors_parse() {
        assert_eq!(parse_system("units:m=5").unwrap().num_states(), 4);
        assert_eq!(parse_system("valshift:p=2,k=2").unwrap().num_states(), 2);
        assert_eq!(parse_system("identity:s=3").unwrap().num_states(), 3);
        assert!(parse_system("units:m=0").is_err());
        assert!(parse_system("wat:x=1").is_err());
        assert!(parse_system("units").is_err());
    }

    #[test]
    fn family_membership_helper_matches_contains() {
        let family = RatFamily::LinearImage { a: 4, b: 3 };
        assert!(family_member(&family, 7));
        assert!(family_member(&family, 11));
        assert!(!family_member(&family, 8));
        assert!(!family_member(&family, 3)); // n ≥ 1 convention
    }

    #[test]
    fn emitter_formats_rows() {
        let mut em = Emitter::new(OutputFormat::Csv);
        let row = DensityRow { n: 10, count: 3, total: 10, value: 0.3 };
        em.row(&row, "N,count,total,value", "10,3,10,0.3".into()).unwrap();
        em.summary(&row).unwrap(); // skipped in CSV
        assert_eq!(em.lines, vec!["N,count,total,value".to_string(), "10,3,10,0.3".to_string()]);

        let mut em = Emitter::new(OutputFormat::Json);
        em.row(&row, "N,count,total,value", "10,3,10,0.3".into()).unwrap();
        assert_eq!(em.lines, vec![r#"{"n":10,"count":3,"total":10,"value":0.3}"#.to_string()]);
    }
}
