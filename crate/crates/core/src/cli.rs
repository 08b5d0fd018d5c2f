//! Command-line front end: TOML ensemble spec files, the four subcommands
//! (`bound`, `simulate`, `compare`, `oracle`), and deterministic CSV
//! rendering.
//!
//! CSV layout: `#`-prefixed metadata lines, one header row, then data rows,
//! all `\n`-terminated. Exact rational columns are rendered to
//! [`CSV_SIG_DIGITS`] significant digits from the exact values, so output
//! bytes depend only on the inputs and the seed — never on worker count or
//! floating-point accumulation order.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::bound::{
    expected_cut_count, expected_cut_count_regular, expected_cutset_count_upper, tail_lower_bound,
    BoundCurve,
};
use crate::cuts::{
    brute_force_cut_distribution, constraint_map, cut_weight, exhaustive_ensemble_expectations,
    exhaustive_global_min_cut, exhaustive_min_st_cut, global_min_cut, min_st_cut,
};
use crate::ensemble::{
    DegreeDistribution, SamplingMode, WeightDistribution, WeightedMultigraph,
};
use crate::experiment::{
    compare, compare_paired, run_paired_experiment, run_st_experiment, ComparisonRow,
    EmpiricalTail, ExperimentPlan, PairedRow, PairedTails,
};
use crate::genpoly::{
    binomial, binomial_half, decimal_string, degree_product_table, parse_rational,
};
use crate::{Error, Result};

/// Significant digits used for exact rational CSV columns.
pub const CSV_SIG_DIGITS: usize = 15;

/// Default Monte Carlo sample count when neither the spec file nor the
/// command line sets one.
pub const DEFAULT_SAMPLES: u64 = 10_000;

/// Exit code for comparison violations and oracle failures (usage and
/// runtime errors exit 1).
pub const EXIT_VIOLATION: u8 = 2;

// ---------------------------------------------------------------------------
// Ensemble spec files
// ---------------------------------------------------------------------------

/// On-disk description of an ensemble: a degree distribution, a weight
/// distribution, and optional experiment defaults. Fractions are exact
/// rational strings ("a" or "a/b"); map keys are the degree / weight values
/// as strings (TOML requires string keys).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleSpec {
    /// Number of vertices.
    pub n: usize,
    /// Degree → fraction of vertices with that degree.
    pub degree_fractions: BTreeMap<String, String>,
    /// Edge weight → probability mass.
    pub weights: BTreeMap<String, String>,
    /// Largest δ of bound curves and empirical tails.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_max: Option<u32>,
    /// Sampling mode, "simple" or "multigraph" (default "simple").
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    /// Monte Carlo sample count.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<u64>,
    /// RNG seed; required (here or on the command line) for simulation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Cap on simple-mode rejection attempts per sample.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rejection_cap: Option<u64>,
}

fn config_field(field: String, err: Error) -> Error {
    Error::ConfigField {
        field,
        detail: err.to_string(),
    }
}

impl EnsembleSpec {
    pub fn from_toml_str(text: &str) -> Result<EnsembleSpec> {
        toml::from_str(text).map_err(|e| Error::ConfigParse(e.to_string()))
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<EnsembleSpec> {
        Self::from_toml_str(&fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("ensemble spec serializes to TOML")
    }

    pub fn degree_distribution(&self) -> Result<DegreeDistribution> {
        let mut pairs = Vec::with_capacity(self.degree_fractions.len());
        for (key, value) in &self.degree_fractions {
            let field = format!("degree_fractions.{key}");
            let degree: usize = key.trim().parse().map_err(|_| Error::ConfigField {
                field: field.clone(),
                detail: format!("key {key:?} is not a degree"),
            })?;
            let frac = parse_rational(value).map_err(|e| config_field(field, e))?;
            pairs.push((degree, frac));
        }
        DegreeDistribution::new(self.n, pairs)
    }

    pub fn weight_distribution(&self) -> Result<WeightDistribution> {
        let mut pairs = Vec::with_capacity(self.weights.len());
        for (key, value) in &self.weights {
            let field = format!("weights.{key}");
            let weight: u32 = key.trim().parse().map_err(|_| Error::ConfigField {
                field: field.clone(),
                detail: format!("key {key:?} is not a weight"),
            })?;
            let mass = parse_rational(value).map_err(|e| config_field(field, e))?;
            pairs.push((weight, mass));
        }
        // The declared range ends at the largest weight that carries mass.
        let q = pairs.iter().map(|&(w, _)| w).max().unwrap_or(0);
        WeightDistribution::new(q, pairs)
    }

    pub fn sampling_mode(&self) -> Result<SamplingMode> {
        match &self.mode {
            None => Ok(SamplingMode::Simple),
            Some(s) => s.parse(),
        }
    }
}

// ---------------------------------------------------------------------------
// Argument surface
// ---------------------------------------------------------------------------

/// Analytic lower bounds and Monte Carlo estimates for minimum-cut weights
/// of random weighted graphs with prescribed degree fractions.
#[derive(Debug, Parser)]
#[command(name = "cutbound", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the analytic lower bound on Pr[λ ≥ δ] and emit a CSV curve.
    Bound(CommonArgs),
    /// Estimate the min-cut tail by Monte Carlo and emit a CSV table.
    Simulate(SimulateArgs),
    /// Bound vs simulation on one ensemble; exits 2 on dominance violations.
    Compare(SimulateArgs),
    /// Exhaustive small-instance verification suites.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Ensemble spec file (TOML).
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// Write CSV here instead of stdout.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Largest δ (overrides the spec file).
    #[arg(long, value_name = "D")]
    pub delta_max: Option<u32>,
    /// Worker threads (never affects results, only wall time).
    #[arg(long, value_name = "K", default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Monte Carlo sample count (overrides the spec file).
    #[arg(long, value_name = "N")]
    pub samples: Option<u64>,
    /// RNG seed (overrides the spec file).
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Sampling mode, "simple" or "multigraph" (overrides the spec file).
    #[arg(long, value_name = "MODE")]
    pub mode: Option<String>,
    /// Track the global minimum cut instead of (simulate) or alongside
    /// (compare) the s-t minimum cut.
    #[arg(long)]
    pub global: bool,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    /// Largest instance size for randomized suites (hard limit 20).
    #[arg(long, value_name = "N", default_value_t = 8)]
    pub max_n: usize,
    /// Comma-separated suites to run; default all
    /// (identities,constraint,cutdist,flow,expectation).
    #[arg(long, value_name = "LIST")]
    pub suites: Option<String>,
}

/// Dispatches a parsed command line; the returned value is the process
/// exit code for non-error outcomes.
pub fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Bound(args) => cmd_bound(&args),
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Compare(args) => cmd_compare(&args),
        Command::Oracle(args) => cmd_oracle(&args),
    }
}

// ---------------------------------------------------------------------------
// Resolution of spec file + flags
// ---------------------------------------------------------------------------

struct Resolved {
    spec: EnsembleSpec,
    dd: DegreeDistribution,
    mu: WeightDistribution,
    delta_max: u32,
}

fn resolve(common: &CommonArgs) -> Result<Resolved> {
    let spec = EnsembleSpec::from_path(&common.config)?;
    let dd = spec.degree_distribution()?;
    let mu = spec.weight_distribution()?;
    let delta_max = common
        .delta_max
        .or(spec.delta_max)
        .ok_or_else(|| Error::ConfigField {
            field: "delta_max".to_string(),
            detail: "missing (set it in the spec file or pass --delta-max)".to_string(),
        })?;
    Ok(Resolved {
        spec,
        dd,
        mu,
        delta_max,
    })
}

fn resolve_plan(args: &SimulateArgs, r: &Resolved) -> Result<ExperimentPlan> {
    let samples = args
        .samples
        .or(r.spec.samples)
        .unwrap_or(DEFAULT_SAMPLES);
    let seed = args.seed.or(r.spec.seed).ok_or(Error::MissingSeed)?;
    let mode = match &args.mode {
        Some(s) => s.parse()?,
        None => r.spec.sampling_mode()?,
    };
    let mut plan = ExperimentPlan::new(samples, seed, mode, r.delta_max);
    if let Some(cap) = r.spec.rejection_cap {
        plan.rejection_cap = cap;
    }
    Ok(plan)
}

fn with_pool<T: Send>(workers: usize, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::WorkerPool(e.to_string()))?;
    pool.install(f)
}

fn emit(out: &Option<PathBuf>, body: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, body)?,
        None => print!("{body}"),
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// CSV rendering
// ---------------------------------------------------------------------------

fn metadata_header(dd: &DegreeDistribution, extra: &[(&str, String)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# n={}", dd.n());
    let _ = writeln!(s, "# m={}", dd.num_edges());
    for (key, value) in extra {
        let _ = writeln!(s, "# {key}={value}");
    }
    let _ = writeln!(s, "# version={}", env!("CARGO_PKG_VERSION"));
    s
}

/// `bound` CSV: delta,raw_bound,clamped_bound.
pub fn render_bound_csv(dd: &DegreeDistribution, curve: &BoundCurve) -> String {
    let mut s = metadata_header(dd, &[]);
    s.push_str("delta,raw_bound,clamped_bound\n");
    for e in curve.entries() {
        let _ = writeln!(
            s,
            "{},{},{}",
            e.delta,
            decimal_string(&e.raw, CSV_SIG_DIGITS),
            decimal_string(&e.clamped, CSV_SIG_DIGITS)
        );
    }
    s
}

/// `simulate` CSV: delta,count_geq,estimate,stderr,num_samples,seed,mode.
pub fn render_simulate_csv(
    dd: &DegreeDistribution,
    tail: &EmpiricalTail,
    statistic: &str,
) -> String {
    let mut s = metadata_header(
        dd,
        &[
            ("seed", tail.seed().to_string()),
            ("mode", tail.mode().to_string()),
            ("statistic", statistic.to_string()),
        ],
    );
    s.push_str("delta,count_geq,estimate,stderr,num_samples,seed,mode\n");
    for e in tail.entries() {
        let est = tail.estimate_rational(e.delta).expect("delta in range");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            e.delta,
            e.count_geq,
            decimal_string(&est, CSV_SIG_DIGITS),
            format_f64(e.stderr),
            tail.num_samples(),
            tail.seed(),
            tail.mode()
        );
    }
    s
}

/// `compare` CSV: delta,raw_bound,clamped_bound,estimate,stderr,
/// bound_minus_estimate,violation.
pub fn render_compare_csv(
    dd: &DegreeDistribution,
    tail: &EmpiricalTail,
    rows: &[ComparisonRow],
) -> String {
    let mut s = metadata_header(
        dd,
        &[
            ("seed", tail.seed().to_string()),
            ("mode", tail.mode().to_string()),
            ("statistic", "st".to_string()),
        ],
    );
    s.push_str("delta,raw_bound,clamped_bound,estimate,stderr,bound_minus_estimate,violation\n");
    for row in rows {
        let est = tail.estimate_rational(row.delta).expect("delta in range");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            row.delta,
            decimal_string(&row.raw_bound, CSV_SIG_DIGITS),
            decimal_string(&row.clamped_bound, CSV_SIG_DIGITS),
            decimal_string(&est, CSV_SIG_DIGITS),
            format_f64(row.stderr),
            format_f64(row.bound_minus_estimate),
            u8::from(row.violation)
        );
    }
    s
}

/// `compare --global` CSV: delta,st_estimate,st_stderr,global_estimate,
/// global_stderr,global_minus_st,violation.
pub fn render_paired_csv(
    dd: &DegreeDistribution,
    paired: &PairedTails,
    rows: &[PairedRow],
) -> String {
    let mut s = metadata_header(
        dd,
        &[
            ("seed", paired.st.seed().to_string()),
            ("mode", paired.st.mode().to_string()),
            ("statistic", "paired".to_string()),
        ],
    );
    s.push_str("delta,st_estimate,st_stderr,global_estimate,global_stderr,global_minus_st,violation\n");
    for row in rows {
        let st = paired.st.estimate_rational(row.delta).expect("delta in range");
        let gl = paired
            .global
            .estimate_rational(row.delta)
            .expect("delta in range");
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            row.delta,
            decimal_string(&st, CSV_SIG_DIGITS),
            format_f64(row.st_stderr),
            decimal_string(&gl, CSV_SIG_DIGITS),
            format_f64(row.global_stderr),
            decimal_string(&(gl - st), CSV_SIG_DIGITS),
            u8::from(row.violation)
        );
    }
    s
}

/// Floating-point columns (standard errors, differences of estimates):
/// fixed scientific form so the byte layout is stable.
fn format_f64(x: f64) -> String {
    format!("{x:.14e}")
}

// ---------------------------------------------------------------------------
// Subcommands
// ---------------------------------------------------------------------------

pub fn cmd_bound(args: &CommonArgs) -> Result<u8> {
    let r = resolve(args)?;
    let curve = with_pool(args.workers, || {
        let table = degree_product_table(&r.dd);
        tail_lower_bound(&r.dd, &r.mu, &table, r.delta_max)
    })?;
    emit(&args.out, &render_bound_csv(&r.dd, &curve))?;
    Ok(0)
}

pub fn cmd_simulate(args: &SimulateArgs) -> Result<u8> {
    let r = resolve(&args.common)?;
    let plan = resolve_plan(args, &r)?;
    let (tail, statistic) = with_pool(args.common.workers, || {
        if args.global {
            Ok((crate::experiment::run_global_experiment(&r.dd, &r.mu, &plan)?, "global"))
        } else {
            Ok((run_st_experiment(&r.dd, &r.mu, &plan)?, "st"))
        }
    })?;
    emit(&args.common.out, &render_simulate_csv(&r.dd, &tail, statistic))?;
    Ok(0)
}

pub fn cmd_compare(args: &SimulateArgs) -> Result<u8> {
    let r = resolve(&args.common)?;
    let plan = resolve_plan(args, &r)?;
    if args.global {
        let paired = with_pool(args.common.workers, || {
            run_paired_experiment(&r.dd, &r.mu, &plan)
        })?;
        let rows = compare_paired(&paired)?;
        emit(&args.common.out, &render_paired_csv(&r.dd, &paired, &rows))?;
        let violations = rows.iter().filter(|row| row.violation).count();
        if violations > 0 {
            eprintln!(
                "comparison failed: the global min-cut tail exceeds the s-t min-cut tail \
                 at {violations} value(s) of delta, which is impossible on a shared \
                 sample stream"
            );
            return Ok(EXIT_VIOLATION);
        }
        return Ok(0);
    }
    let (curve, tail) = with_pool(args.common.workers, || {
        let table = degree_product_table(&r.dd);
        let curve = tail_lower_bound(&r.dd, &r.mu, &table, r.delta_max)?;
        let tail = run_st_experiment(&r.dd, &r.mu, &plan)?;
        Ok((curve, tail))
    })?;
    let rows = compare(&curve, &tail)?;
    emit(&args.common.out, &render_compare_csv(&r.dd, &tail, &rows))?;
    let violations = rows.iter().filter(|row| row.violation).count();
    if violations > 0 {
        eprintln!(
            "comparison failed: the clamped lower bound exceeds the empirical estimate \
             by more than three standard errors at {violations} value(s) of delta"
        );
        return Ok(EXIT_VIOLATION);
    }
    Ok(0)
}

pub fn cmd_oracle(args: &OracleArgs) -> Result<u8> {
    let suites = parse_suites(args.suites.as_deref())?;
    let report = run_oracle(args.max_n, &suites)?;
    print!("{}", report.render());
    Ok(if report.all_passed() { 0 } else { EXIT_VIOLATION })
}

// ---------------------------------------------------------------------------
// Oracle suites
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleSuite {
    /// Stub-pairing identities and coefficient-table invariants.
    Identities,
    /// GF(2) constraint map vs direct edge-endpoint indicators.
    Constraint,
    /// Brute-force cut distributions: counting and dedup invariants.
    CutDistribution,
    /// Max-flow and global min-cut vs exhaustive bipartition search.
    Flow,
    /// Closed-form expectations vs full ensemble enumeration.
    Expectation,
}

const SUITE_TABLE: &[(&str, OracleSuite)] = &[
    ("identities", OracleSuite::Identities),
    ("constraint", OracleSuite::Constraint),
    ("cutdist", OracleSuite::CutDistribution),
    ("flow", OracleSuite::Flow),
    ("expectation", OracleSuite::Expectation),
];

const SUITE_NAMES: &str = "identities, constraint, cutdist, flow, expectation";

/// All suites run independently of instance size limits with this seed, so
/// oracle output is reproducible.
const ORACLE_SEED: u64 = 0x5eed_cafe;

impl FromStr for OracleSuite {
    type Err = Error;

    fn from_str(s: &str) -> Result<OracleSuite> {
        SUITE_TABLE
            .iter()
            .find(|&&(name, _)| name == s)
            .map(|&(_, suite)| suite)
            .ok_or_else(|| Error::UnknownSuite {
                suite: s.to_string(),
                known: SUITE_NAMES,
            })
    }
}

/// Parses a `--suites` list; `None` selects every suite.
pub fn parse_suites(list: Option<&str>) -> Result<Vec<OracleSuite>> {
    match list {
        None => Ok(SUITE_TABLE.iter().map(|&(_, suite)| suite).collect()),
        Some(text) => {
            let mut out = Vec::new();
            for part in text.split(',') {
                let part = part.trim();
                if part.is_empty() {
                    continue;
                }
                let suite: OracleSuite = part.parse()?;
                if !out.contains(&suite) {
                    out.push(suite);
                }
            }
            if out.is_empty() {
                return Err(Error::EmptySuiteSelection);
            }
            Ok(out)
        }
    }
}

/// One named check with a pass/fail verdict and a short detail string.
#[derive(Clone, Debug)]
pub struct OracleCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default)]
pub struct OracleReport {
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    fn push(&mut self, name: &str, passed: bool, detail: String) {
        self.checks.push(OracleCheck {
            name: name.to_string(),
            passed,
            detail,
        });
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for c in &self.checks {
            let verdict = if c.passed { "ok  " } else { "FAIL" };
            let _ = writeln!(s, "{verdict} {} — {}", c.name, c.detail);
        }
        let passed = self.checks.iter().filter(|c| c.passed).count();
        let _ = writeln!(
            s,
            "{} of {} checks passed",
            passed,
            self.checks.len()
        );
        s
    }
}

/// Runs the selected verification suites with instances of at most `max_n`
/// vertices (exhaustive enumerations cap the limit at 20).
pub fn run_oracle(max_n: usize, suites: &[OracleSuite]) -> Result<OracleReport> {
    if suites.is_empty() {
        return Err(Error::EmptySuiteSelection);
    }
    if max_n > 20 {
        return Err(Error::EnumerationGuard {
            what: "oracle max_n",
            got: max_n,
            limit: 20,
        });
    }
    if max_n < 4 {
        return Err(Error::IndexOutOfRange {
            what: "oracle max_n",
            got: max_n as i64,
            lo: 4,
            hi: 20,
        });
    }
    let mut report = OracleReport::default();
    for &suite in suites {
        match suite {
            OracleSuite::Identities => suite_identities(&mut report),
            OracleSuite::Constraint => suite_constraint(max_n, &mut report)?,
            OracleSuite::CutDistribution => suite_cutdist(max_n, &mut report)?,
            OracleSuite::Flow => suite_flow(max_n, &mut report)?,
            OracleSuite::Expectation => suite_expectation(&mut report)?,
        }
    }
    Ok(report)
}

fn oracle_rng(salt: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(ORACLE_SEED);
    rng.set_stream(salt);
    rng
}

/// Random multigraph (loops and parallel edges allowed) with unit-or-more
/// integer capacities — deliberately broader than ensemble samples.
fn random_graph(rng: &mut ChaCha12Rng, n_range: std::ops::RangeInclusive<usize>, max_cap: u32) -> WeightedMultigraph {
    let n = rng.random_range(n_range);
    let m = rng.random_range(1..=2 * n);
    let edges: Vec<(usize, usize, u32)> = (0..m)
        .map(|_| {
            (
                rng.random_range(0..n),
                rng.random_range(0..n),
                rng.random_range(1..=max_cap),
            )
        })
        .collect();
    WeightedMultigraph::from_edges(n, edges).expect("generated edges are in range")
}

fn distinct_pair(rng: &mut ChaCha12Rng, n: usize) -> (usize, usize) {
    let s = rng.random_range(0..n);
    let x = rng.random_range(0..n - 1);
    (s, if x >= s { x + 1 } else { x })
}

fn suite_identities(report: &mut OracleReport) {
    // Σ_v C(m,v)·2^v·C_half(m−v, h−v) = C(2m, h): the number of ways h
    // stubs interact under a perfect matching, split by how many of the m
    // pairs are cut.
    let mut checked = 0u64;
    let mut ok = true;
    'outer: for m in 0..=20u64 {
        for h in 0..=2 * m {
            let lhs: num_bigint::BigUint = (0..=m)
                .map(|v| {
                    binomial(m, v as i64)
                        * num_bigint::BigUint::from(2u32).pow(v as u32)
                        * binomial_half(m - v, h as i64 - v as i64)
                })
                .sum();
            if lhs != binomial(2 * m, h as i64) {
                ok = false;
                break 'outer;
            }
            checked += 1;
        }
    }
    report.push(
        "pairing identity",
        ok,
        format!("{checked} (m, h) cells for m ≤ 20"),
    );

    // Coefficient tables: total mass 2^n and the (h, u) ↔ (2m−h, n−u)
    // symmetry from complementing the vertex side.
    let configs: Vec<(&str, DegreeDistribution)> = vec![
        ("3-regular n=6", DegreeDistribution::regular(6, 3).unwrap()),
        (
            "mixed degrees n=5",
            DegreeDistribution::from_counts(&[(1, 2), (2, 1), (3, 2)]).unwrap(),
        ),
        ("4-regular n=7", DegreeDistribution::regular(7, 4).unwrap()),
    ];
    let mut ok = true;
    for (_, dd) in &configs {
        let table = degree_product_table(dd);
        let n = table.n();
        let m2 = 2 * table.m();
        if table.total() != num_bigint::BigUint::from(2u32).pow(n as u32) {
            ok = false;
        }
        for h in 0..=m2 {
            for u in 0..=n {
                if table.get(h, u) != table.get(m2 - h, n - u) {
                    ok = false;
                }
            }
        }
    }
    report.push(
        "coefficient tables",
        ok,
        format!("mass and symmetry on {} degree profiles", configs.len()),
    );
}

fn suite_constraint(max_n: usize, report: &mut OracleReport) -> Result<()> {
    let mut rng = oracle_rng(1);
    let hi = max_n.min(8);
    let mut graphs = 0u64;
    let mut vectors = 0u64;
    let mut ok = true;
    for _ in 0..50 {
        let g = random_graph(&mut rng, 2..=hi, 5);
        let n = g.n();
        graphs += 1;
        for bits in 0u32..1 << n {
            let a: Vec<bool> = (0..n).map(|v| bits >> v & 1 == 1).collect();
            let mapped = constraint_map(&g, &a)?;
            let mut weight = 0u64;
            for (i, e) in g.edges().iter().enumerate() {
                // Direct indicator: edge i is cut iff its endpoints take
                // different sides (loops never are).
                let direct = a[e.a] != a[e.b];
                if mapped[i] != direct {
                    ok = false;
                }
                if direct {
                    weight += e.cap as u64;
                }
            }
            if cut_weight(&g, &a)? != weight {
                ok = false;
            }
            vectors += 1;
        }
    }
    report.push(
        "constraint map",
        ok,
        format!("{vectors} cut vectors over {graphs} random graphs, n ≤ {hi}"),
    );
    Ok(())
}

fn connected(g: &WeightedMultigraph) -> bool {
    let n = g.n();
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for e in g.edges() {
            for (x, y) in [(e.a, e.b), (e.b, e.a)] {
                if x == v && !seen[y] {
                    seen[y] = true;
                    stack.push(y);
                }
            }
        }
    }
    seen.into_iter().all(|b| b)
}

fn suite_cutdist(max_n: usize, report: &mut OracleReport) -> Result<()> {
    let mut rng = oracle_rng(2);
    let hi = max_n.min(7);
    let mut ok = true;
    let mut connected_seen = 0u64;
    for _ in 0..25 {
        let g = random_graph(&mut rng, 3..=hi, 4);
        let n = g.n();
        let (s, t) = distinct_pair(&mut rng, n);
        let dist = brute_force_cut_distribution(&g, s, t)?;
        // Both orientations of every bipartition are tallied.
        let total: u64 = dist.cut_counts.values().sum();
        if total != 1 << (n - 1) {
            ok = false;
        }
        if dist.min_cut != min_st_cut(&g, s, t)? {
            ok = false;
        }
        // Distinct cut-sets never outnumber bipartitions; on a connected
        // graph the cut-set determines the bipartition up to complement,
        // so the counts agree.
        let distinct: u64 = dist.cutset_counts.values().sum();
        if distinct > 1 << (n - 2) {
            ok = false;
        }
        if connected(&g) {
            connected_seen += 1;
            if distinct != 1 << (n - 2) {
                ok = false;
            }
        }
    }
    report.push(
        "cut distributions",
        ok,
        format!("25 random graphs, n ≤ {hi} ({connected_seen} connected)"),
    );
    Ok(())
}

fn suite_flow(max_n: usize, report: &mut OracleReport) -> Result<()> {
    let mut rng = oracle_rng(3);
    let hi = max_n.min(10);
    let mut ok = true;
    for _ in 0..100 {
        let g = random_graph(&mut rng, 2..=hi, 5);
        let n = g.n();
        let (s, t) = distinct_pair(&mut rng, n);
        if min_st_cut(&g, s, t)? != exhaustive_min_st_cut(&g, s, t)? {
            ok = false;
        }
        if global_min_cut(&g)? != exhaustive_global_min_cut(&g)? {
            ok = false;
        }
    }
    report.push(
        "min-cut solvers",
        ok,
        format!("100 random graphs vs exhaustive bipartitions, n ≤ {hi}"),
    );
    Ok(())
}

fn suite_expectation(report: &mut OracleReport) -> Result<()> {
    // Cut-vector expectations: closed form vs full enumeration over
    // matchings, weight assignments, and source/sink pairs.
    let half = || parse_rational("1/2").expect("valid rational");
    let cases: Vec<(&str, DegreeDistribution, WeightDistribution)> = vec![
        (
            "single edge",
            DegreeDistribution::regular(2, 1).unwrap(),
            WeightDistribution::unit(),
        ),
        (
            "mixed n=3, two-point weights",
            DegreeDistribution::from_counts(&[(1, 2), (2, 1)]).unwrap(),
            WeightDistribution::new(2, [(1, half()), (2, half())]).unwrap(),
        ),
        (
            "3-regular n=4",
            DegreeDistribution::regular(4, 3).unwrap(),
            WeightDistribution::unit(),
        ),
    ];
    for (label, dd, mu) in &cases {
        let n = dd.n();
        let m = dd.num_edges();
        let q = mu.q() as usize;
        let delta_max = (m * q + 1) as u32;
        let exact = exhaustive_ensemble_expectations(dd, mu, delta_max)?;
        let table = degree_product_table(dd);
        let mut ok = true;
        let mut cells = 0u64;
        for u in 1..n {
            for v in 0..=m {
                for w in 0..=m * q {
                    let formula = expected_cut_count(dd, mu, &table, u, v, w)?;
                    let enumerated = exact
                        .cut_counts
                        .get(&(u, v, w as u64))
                        .cloned()
                        .unwrap_or_else(BigRational::zero);
                    if formula != enumerated {
                        ok = false;
                    }
                    cells += 1;
                }
            }
        }
        // E[B(w)] never exceeds its closed-form upper bound, and the tail
        // never drops below the clamped lower bound.
        for w in 0..=m * q {
            let upper = expected_cutset_count_upper(dd, mu, &table, w)?;
            let enumerated = exact
                .cutset_counts
                .get(&(w as u64))
                .cloned()
                .unwrap_or_else(BigRational::zero);
            if enumerated > upper {
                ok = false;
            }
        }
        let curve = tail_lower_bound(dd, mu, &table, delta_max)?;
        for (delta, prob) in &exact.tail {
            let entry = curve.get(*delta).expect("delta in range");
            if *prob < entry.clamped {
                ok = false;
            }
        }
        report.push(
            "expectations",
            ok,
            format!("{label}: {cells} (u,v,w) cells exact, bound directions hold"),
        );
    }

    // The specialized regular-ensemble form agrees with the general one.
    let mu = WeightDistribution::unit();
    let dd = DegreeDistribution::regular(6, 3).unwrap();
    let table = degree_product_table(&dd);
    let mut ok = true;
    for u in 1..6 {
        for v in 0..=9 {
            for w in 0..=9 {
                if expected_cut_count_regular(6, 3, &mu, u, v, w)?
                    != expected_cut_count(&dd, &mu, &table, u, v, w)?
                {
                    ok = false;
                }
            }
        }
    }
    report.push(
        "expectations",
        ok,
        "3-regular n=6: specialized form matches the general formula".to_string(),
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::BigRational;

    const SPEC_TEXT: &str = r#"
n = 6
delta_max = 3
mode = "multigraph"
samples = 40
seed = 11

[degree_fractions]
2 = "1/2"
4 = "1/2"

[weights]
1 = "2/3"
2 = "1/3"
"#;

    #[test]
    fn spec_round_trips_through_toml() {
        let spec = EnsembleSpec::from_toml_str(SPEC_TEXT).unwrap();
        assert_eq!(spec.n, 6);
        assert_eq!(spec.delta_max, Some(3));
        assert_eq!(spec.samples, Some(40));
        assert_eq!(spec.seed, Some(11));
        let text = spec.to_toml_string();
        let reparsed = EnsembleSpec::from_toml_str(&text).unwrap();
        assert_eq!(spec, reparsed);
        // Serialization is stable: a second round trip yields identical bytes.
        assert_eq!(text, reparsed.to_toml_string());
    }

    #[test]
    fn spec_builds_distributions() {
        let spec = EnsembleSpec::from_toml_str(SPEC_TEXT).unwrap();
        let dd = spec.degree_distribution().unwrap();
        assert_eq!(dd.degree_counts(), &[(2, 3), (4, 3)]);
        assert_eq!(dd.num_edges(), 9);
        let mu = spec.weight_distribution().unwrap();
        assert_eq!(mu.q(), 2);
        assert_eq!(mu.mass()[&1], BigRational::new(2.into(), 3.into()));
        assert_eq!(spec.sampling_mode().unwrap(), SamplingMode::Multigraph);
    }

    #[test]
    fn spec_rejects_unknown_fields_and_bad_rationals() {
        let unknown = SPEC_TEXT.replace("samples = 40", "sample_count = 40");
        assert!(matches!(
            EnsembleSpec::from_toml_str(&unknown),
            Err(Error::ConfigParse(_))
        ));

        let zero_denom = SPEC_TEXT.replace("\"2/3\"", "\"2/0\"");
        let spec = EnsembleSpec::from_toml_str(&zero_denom).unwrap();
        match spec.weight_distribution() {
            Err(Error::ConfigField { field, detail }) => {
                assert_eq!(field, "weights.1");
                assert!(detail.contains("zero denominator"), "{detail}");
            }
            other => panic!("expected ConfigField error, got {other:?}"),
        }

        let float = SPEC_TEXT.replace("\"1/2\"", "\"0.5\"");
        let spec = EnsembleSpec::from_toml_str(&float).unwrap();
        assert!(matches!(
            spec.degree_distribution(),
            Err(Error::ConfigField { .. })
        ));

        let bad_key = SPEC_TEXT.replace("[weights]\n1 =", "[weights]\nheavy =");
        let spec = EnsembleSpec::from_toml_str(&bad_key).unwrap();
        assert!(matches!(
            spec.weight_distribution(),
            Err(Error::ConfigField { .. })
        ));
    }

    #[test]
    fn spec_mode_and_defaults() {
        let mut spec = EnsembleSpec::from_toml_str(SPEC_TEXT).unwrap();
        spec.mode = None;
        assert_eq!(spec.sampling_mode().unwrap(), SamplingMode::Simple);
        spec.mode = Some("neither".to_string());
        assert!(matches!(
            spec.sampling_mode(),
            Err(Error::UnknownMode { .. })
        ));
    }

    #[test]
    fn cli_parses_flag_surface() {
        let cli = Cli::try_parse_from([
            "cutbound", "compare", "--config", "e.toml", "--out", "o.csv", "--delta-max", "9",
            "--workers", "4", "--samples", "500", "--seed", "3", "--mode", "multigraph",
            "--global",
        ])
        .unwrap();
        match cli.command {
            Command::Compare(args) => {
                assert_eq!(args.common.config, PathBuf::from("e.toml"));
                assert_eq!(args.common.out, Some(PathBuf::from("o.csv")));
                assert_eq!(args.common.delta_max, Some(9));
                assert_eq!(args.common.workers, 4);
                assert_eq!(args.samples, Some(500));
                assert_eq!(args.seed, Some(3));
                assert_eq!(args.mode.as_deref(), Some("multigraph"));
                assert!(args.global);
            }
            other => panic!("parsed into {other:?}"),
        }
        assert!(Cli::try_parse_from(["cutbound", "bound"]).is_err());
        let oracle = Cli::try_parse_from(["cutbound", "oracle"]).unwrap();
        match oracle.command {
            Command::Oracle(args) => {
                assert_eq!(args.max_n, 8);
                assert_eq!(args.suites, None);
            }
            other => panic!("parsed into {other:?}"),
        }
    }

    #[test]
    fn suite_parsing() {
        assert_eq!(parse_suites(None).unwrap().len(), 5);
        assert_eq!(
            parse_suites(Some("flow, identities")).unwrap(),
            vec![OracleSuite::Flow, OracleSuite::Identities]
        );
        // Duplicates collapse.
        assert_eq!(
            parse_suites(Some("flow,flow")).unwrap(),
            vec![OracleSuite::Flow]
        );
        assert!(matches!(
            parse_suites(Some("")),
            Err(Error::EmptySuiteSelection)
        ));
        assert!(matches!(
            parse_suites(Some(" , ,")),
            Err(Error::EmptySuiteSelection)
        ));
        assert!(matches!(
            parse_suites(Some("bogus")),
            Err(Error::UnknownSuite { .. })
        ));
    }

    #[test]
    fn oracle_guards() {
        assert!(matches!(
            run_oracle(21, &[OracleSuite::Flow]),
            Err(Error::EnumerationGuard { .. })
        ));
        assert!(matches!(run_oracle(8, &[]), Err(Error::EmptySuiteSelection)));
        assert!(matches!(
            run_oracle(2, &[OracleSuite::Flow]),
            Err(Error::IndexOutOfRange { .. })
        ));
    }

    #[test]
    fn oracle_identity_and_constraint_suites_pass() {
        let report = run_oracle(
            6,
            &[OracleSuite::Identities, OracleSuite::Constraint],
        )
        .unwrap();
        assert!(report.all_passed(), "{}", report.render());
        let rendered = report.render();
        assert!(rendered.contains("ok   pairing identity"));
        assert!(rendered.lines().last().unwrap().contains("checks passed"));
    }

    #[test]
    fn bound_csv_shape() {
        let dd = DegreeDistribution::regular(4, 3).unwrap();
        let mu = WeightDistribution::unit();
        let table = degree_product_table(&dd);
        let curve = tail_lower_bound(&dd, &mu, &table, 3).unwrap();
        let text = render_bound_csv(&dd, &curve);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# n=4");
        assert_eq!(lines[1], "# m=6");
        assert!(lines[2].starts_with("# version="));
        assert_eq!(lines[3], "delta,raw_bound,clamped_bound");
        assert_eq!(lines.len(), 4 + 3);
        assert!(lines[4].starts_with("1,"));
        assert!(text.ends_with('\n'));
        // Rendering is a pure function of the curve.
        assert_eq!(text, render_bound_csv(&dd, &curve));
    }

    #[test]
    fn simulate_and_compare_csv_shapes() {
        let dd = DegreeDistribution::regular(6, 3).unwrap();
        let mu = WeightDistribution::unit();
        let plan = ExperimentPlan::new(80, 5, SamplingMode::Multigraph, 3);
        let tail = run_st_experiment(&dd, &mu, &plan).unwrap();
        let text = render_simulate_csv(&dd, &tail, "st");
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# n=6");
        assert_eq!(lines[1], "# m=9");
        assert_eq!(lines[2], "# seed=5");
        assert_eq!(lines[3], "# mode=multigraph");
        assert_eq!(lines[4], "# statistic=st");
        assert!(lines[5].starts_with("# version="));
        assert_eq!(
            lines[6],
            "delta,count_geq,estimate,stderr,num_samples,seed,mode"
        );
        assert_eq!(lines.len(), 7 + 3);
        let first: Vec<&str> = lines[7].split(',').collect();
        assert_eq!(first.len(), 7);
        assert_eq!(first[0], "1");
        assert_eq!(first[4], "80");
        assert_eq!(first[5], "5");
        assert_eq!(first[6], "multigraph");

        let table = degree_product_table(&dd);
        let curve = tail_lower_bound(&dd, &mu, &table, 3).unwrap();
        let rows = compare(&curve, &tail).unwrap();
        let text = render_compare_csv(&dd, &tail, &rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(
            lines[6],
            "delta,raw_bound,clamped_bound,estimate,stderr,bound_minus_estimate,violation"
        );
        for line in &lines[7..] {
            let fields: Vec<&str> = line.split(',').collect();
            assert_eq!(fields.len(), 7);
            assert!(fields[6] == "0" || fields[6] == "1");
        }
    }

    #[test]
    fn paired_csv_shape() {
        let dd = DegreeDistribution::regular(6, 3).unwrap();
        let mu = WeightDistribution::unit();
        let plan = ExperimentPlan::new(60, 9, SamplingMode::Multigraph, 3);
        let paired = run_paired_experiment(&dd, &mu, &plan).unwrap();
        let rows = compare_paired(&paired).unwrap();
        let text = render_paired_csv(&dd, &paired, &rows);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[4], "# statistic=paired");
        assert_eq!(
            lines[6],
            "delta,st_estimate,st_stderr,global_estimate,global_stderr,global_minus_st,violation"
        );
        for line in &lines[7..] {
            assert_eq!(line.split(',').count(), 7);
        }
    }

    #[test]
    fn f64_column_format_is_fixed_width_scientific() {
        assert_eq!(format_f64(0.0), "0.00000000000000e0");
        assert_eq!(format_f64(0.015), "1.50000000000000e-2");
    }
}
