//! Analytical lower bounds on the minimum s-t cut capacity of weighted
//! random graphs with a specified degree distribution, together with a
//! Monte Carlo harness that validates the bounds against exact min-cut
//! computations.
//!
//! The crate is organized as six modules:
//!
//! * [`genpoly`] — exact big-integer/rational combinatorics: binomials,
//!   truncated polynomial powers, and the bivariate coefficient table that
//!   drives the expectation formulas.
//! * [`ensemble`] — the random-graph ensemble: degree distributions, weight
//!   measures, and configuration-model (stub-matching) sampling in simple
//!   and multigraph modes.
//! * [`cuts`] — cut-space machinery and exact cut algorithms: the GF(2)
//!   constraint map, cut weights, Dinic max-flow min s-t cut, Stoer–Wagner
//!   global min cut, and exhaustive small-instance oracles.
//! * [`bound`] — exact evaluation of the expected cut counts, the upper
//!   bound on the expected cut-set weight distribution, and the resulting
//!   lower bound on the tail Pr[λ ≥ δ].
//! * [`experiment`] — reproducible Monte Carlo estimation of the tail and
//!   bound-vs-simulation comparison tables.
//! * [`cli`] — config parsing, CSV emission, and the command entry points
//!   used by the `cutbound` binary.

pub mod bound;
pub mod cli;
pub mod cuts;
pub mod ensemble;
pub mod experiment;
pub mod genpoly;

use thiserror::Error;

/// Crate-wide error type. Variants name the violated constraint so CLI
/// diagnostics can point at the offending part of a spec file or argument.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degree fractions must sum to 1 exactly, got {got}")]
    DegreeFractionSum { got: String },
    #[error("degree fraction for degree {degree} is negative: {value}")]
    NegativeDegreeFraction { degree: usize, value: String },
    #[error("n·d_{degree} = {value} is not a non-negative integer")]
    NonIntegerVertexCount { degree: usize, value: String },
    #[error("total stub count Σ i·n·d_i = {total} is odd; no graph realizes it")]
    OddStubTotal { total: u64 },
    #[error("degree 0 is not allowed in the degree distribution")]
    ZeroDegree,
    #[error("weight masses must sum to 1 exactly, got {got}")]
    WeightMassSum { got: String },
    #[error("weight mass for weight {weight} is negative: {value}")]
    NegativeWeightMass { weight: u32, value: String },
    #[error("weight {weight} lies outside the declared range [1, {q}]")]
    WeightOutOfRange { weight: u32, q: u32 },
    #[error("weight distribution has empty support")]
    EmptyWeightSupport,
    #[error("rational string {input:?} has a zero denominator")]
    ZeroDenominator { input: String },
    #[error("cannot parse {input:?} as an exact rational (expected \"a\" or \"a/b\")")]
    MalformedRational { input: String },
    #[error(
        "simple-mode rejection sampling exceeded the cap of {cap} attempts \
         (degree sequence admits too few simple realizations; use multigraph mode)"
    )]
    RejectionCapExceeded { cap: u64 },
    #[error("vertex id {vertex} out of range for a graph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("source and sink must differ, both were {vertex}")]
    SourceEqualsSink { vertex: usize },
    #[error("graph must have at least 2 vertices, got {n}")]
    TooFewVertices { n: usize },
    #[error("cut vector length {got} does not match vertex count {expected}")]
    CutVectorLength { got: usize, expected: usize },
    #[error("exhaustive enumeration guard: {what} = {got} exceeds the limit {limit}")]
    EnumerationGuard {
        what: &'static str,
        got: usize,
        limit: usize,
    },
    #[error("index out of range: {what} = {got} not in [{lo}, {hi}]")]
    IndexOutOfRange {
        what: &'static str,
        got: i64,
        lo: i64,
        hi: i64,
    },
    #[error(
        "coefficient table built for n={table_n}, m={table_m} does not match \
         the distribution (n={n}, m={m})"
    )]
    TableMismatch {
        table_n: usize,
        table_m: usize,
        n: usize,
        m: usize,
    },
    #[error("num_samples must be ≥ 1")]
    NoSamples,
    #[error("delta ranges do not overlap or do not match: {detail}")]
    DeltaRangeMismatch { detail: String },
    #[error("a seed is required (set `seed` in the config file or pass --seed)")]
    MissingSeed,
    #[error("unknown sampling mode {mode:?} (expected \"simple\" or \"multigraph\")")]
    UnknownMode { mode: String },
    #[error("unknown oracle suite {suite:?} (expected one of {known})")]
    UnknownSuite { suite: String, known: &'static str },
    #[error("empty oracle suite selection")]
    EmptySuiteSelection,
    #[error("config field {field}: {detail}")]
    ConfigField { field: String, detail: String },
    #[error("failed to build the worker thread pool: {0}")]
    WorkerPool(String),
    #[error("failed to parse config: {0}")]
    ConfigParse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
