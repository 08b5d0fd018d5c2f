//! Monte Carlo harness: sample ensemble graphs, compute exact min-cut
//! statistics, aggregate empirical tail estimates, and assemble
//! bound-vs-simulation comparison tables.
//!
//! Reproducibility contract: sample i draws from its own RNG stream
//! (`seed` selects the key, i the stream), and aggregation merges per-chunk
//! count vectors by addition — so results are bit-identical for a fixed
//! seed regardless of how many workers run the samples or how the scheduler
//! partitions them.

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::bound::BoundCurve;
use crate::cuts::{global_min_cut, min_st_cut};
use crate::ensemble::{
    sample_graph_with_cap, DegreeDistribution, SamplingMode, WeightDistribution,
    DEFAULT_REJECTION_CAP,
};
use crate::genpoly::rational_to_f64;
use crate::{Error, Result};

/// Parameters of one Monte Carlo run. Worker count is deliberately absent:
/// results do not depend on it (see module docs); callers control
/// parallelism through the ambient rayon pool.
#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub num_samples: u64,
    pub seed: u64,
    pub mode: SamplingMode,
    pub delta_max: u32,
    pub rejection_cap: u64,
}

impl ExperimentPlan {
    pub fn new(num_samples: u64, seed: u64, mode: SamplingMode, delta_max: u32) -> Self {
        ExperimentPlan {
            num_samples,
            seed,
            mode,
            delta_max,
            rejection_cap: DEFAULT_REJECTION_CAP,
        }
    }
}

/// Empirical estimate of the tail Pr[λ ≥ δ] for δ = 1..=delta_max.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EmpiricalTail {
    num_samples: u64,
    seed: u64,
    mode: SamplingMode,
    /// counts[i] = number of samples with λ ≥ i+1.
    counts: Vec<u64>,
}

/// One row of an empirical tail.
#[derive(Clone, Copy, Debug)]
pub struct TailEntry {
    pub delta: u32,
    pub count_geq: u64,
    pub estimate: f64,
    pub stderr: f64,
}

impl EmpiricalTail {
    pub fn num_samples(&self) -> u64 {
        self.num_samples
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn mode(&self) -> SamplingMode {
        self.mode
    }

    pub fn delta_max(&self) -> u32 {
        self.counts.len() as u32
    }

    pub fn count_geq(&self, delta: u32) -> Option<u64> {
        if delta == 0 {
            return None;
        }
        self.counts.get(delta as usize - 1).copied()
    }

    /// count_geq / num_samples as an exact rational.
    pub fn estimate_rational(&self, delta: u32) -> Option<BigRational> {
        self.count_geq(delta)
            .map(|c| BigRational::new(c.into(), self.num_samples.into()))
    }

    pub fn estimate(&self, delta: u32) -> Option<f64> {
        self.count_geq(delta)
            .map(|c| c as f64 / self.num_samples as f64)
    }

    /// Normal-approximation standard error sqrt(p(1−p)/N).
    pub fn stderr(&self, delta: u32) -> Option<f64> {
        self.estimate(delta)
            .map(|p| (p * (1.0 - p) / self.num_samples as f64).sqrt())
    }

    pub fn entries(&self) -> impl Iterator<Item = TailEntry> + '_ {
        (1..=self.delta_max()).map(|delta| TailEntry {
            delta,
            count_geq: self.count_geq(delta).expect("delta in range"),
            estimate: self.estimate(delta).expect("delta in range"),
            stderr: self.stderr(delta).expect("delta in range"),
        })
    }
}

/// s-t and global tails computed on the same graph stream.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairedTails {
    pub st: EmpiricalTail,
    pub global: EmpiricalTail,
}

#[derive(Clone, Copy)]
enum Statistic {
    StOnly,
    GlobalOnly,
    Paired,
}

/// λ histogram accumulation: each sample lands at index min(λ, delta_max);
/// suffix sums produce the tail counts.
fn run(
    dd: &DegreeDistribution,
    mu: &WeightDistribution,
    plan: &ExperimentPlan,
    stat: Statistic,
) -> Result<(Option<Vec<u64>>, Option<Vec<u64>>)> {
    if plan.num_samples == 0 {
        return Err(Error::NoSamples);
    }
    if plan.delta_max < 1 {
        return Err(Error::IndexOutOfRange {
            what: "delta_max",
            got: plan.delta_max as i64,
            lo: 1,
            hi: i64::MAX,
        });
    }
    let n = dd.n();
    if n < 2 {
        return Err(Error::TooFewVertices { n });
    }
    let seq = dd.degree_sequence();
    let dmax = plan.delta_max as usize;
    let (want_st, want_global) = match stat {
        Statistic::StOnly => (true, false),
        Statistic::GlobalOnly => (false, true),
        Statistic::Paired => (true, true),
    };
    let hists = (0..plan.num_samples)
        .into_par_iter()
        .map(|i| -> Result<(u64, u64)> {
            // Per-sample RNG stream: identical draws no matter which worker
            // runs the sample.
            let mut rng = ChaCha12Rng::seed_from_u64(plan.seed);
            rng.set_stream(i);
            let g = sample_graph_with_cap(&seq, mu, &mut rng, plan.mode, plan.rejection_cap)?;
            // (s, t) uniform over ordered distinct pairs; drawn even when
            // only the global statistic is requested, to keep the stream
            // layout identical across statistics.
            let s = rng.random_range(0..n);
            let t = {
                let x = rng.random_range(0..n - 1);
                if x >= s {
                    x + 1
                } else {
                    x
                }
            };
            let lambda_st = if want_st { min_st_cut(&g, s, t)? } else { 0 };
            let lambda_g = if want_global { global_min_cut(&g)? } else { 0 };
            Ok((lambda_st, lambda_g))
        })
        .try_fold(
            || (vec![0u64; dmax + 1], vec![0u64; dmax + 1]),
            |mut acc, r| -> Result<_> {
                let (st, gl) = r?;
                acc.0[(st as usize).min(dmax)] += 1;
                acc.1[(gl as usize).min(dmax)] += 1;
                Ok(acc)
            },
        )
        .try_reduce(
            || (vec![0u64; dmax + 1], vec![0u64; dmax + 1]),
            |a, b| {
                Ok((
                    a.0.iter().zip(&b.0).map(|(x, y)| x + y).collect(),
                    a.1.iter().zip(&b.1).map(|(x, y)| x + y).collect(),
                ))
            },
        )?;
    let to_counts = |hist: &[u64]| -> Vec<u64> {
        let mut counts = vec![0u64; dmax];
        let mut geq = 0u64;
        for d in (1..=dmax).rev() {
            geq += hist[d];
            counts[d - 1] = geq;
        }
        counts
    };
    Ok((
        want_st.then(|| to_counts(&hists.0)),
        want_global.then(|| to_counts(&hists.1)),
    ))
}

fn tail(plan: &ExperimentPlan, counts: Vec<u64>) -> EmpiricalTail {
    EmpiricalTail {
        num_samples: plan.num_samples,
        seed: plan.seed,
        mode: plan.mode,
        counts,
    }
}

/// Empirical tail of the minimum s-t cut weight: per sample, draw a graph
/// and a uniform ordered (s, t) pair, record λ = min s-t cut.
pub fn run_st_experiment(
    dd: &DegreeDistribution,
    mu: &WeightDistribution,
    plan: &ExperimentPlan,
) -> Result<EmpiricalTail> {
    let (st, _) = run(dd, mu, plan, Statistic::StOnly)?;
    Ok(tail(plan, st.expect("requested statistic")))
}

/// Empirical tail of the global minimum cut weight over the same graph
/// stream [`run_st_experiment`] would use.
pub fn run_global_experiment(
    dd: &DegreeDistribution,
    mu: &WeightDistribution,
    plan: &ExperimentPlan,
) -> Result<EmpiricalTail> {
    let (_, gl) = run(dd, mu, plan, Statistic::GlobalOnly)?;
    Ok(tail(plan, gl.expect("requested statistic")))
}

/// Both statistics per sample on one shared graph stream, so the
/// per-sample inequality λ_global ≤ λ_st transfers deterministically to
/// the tails.
pub fn run_paired_experiment(
    dd: &DegreeDistribution,
    mu: &WeightDistribution,
    plan: &ExperimentPlan,
) -> Result<PairedTails> {
    let (st, gl) = run(dd, mu, plan, Statistic::Paired)?;
    Ok(PairedTails {
        st: tail(plan, st.expect("requested statistic")),
        global: tail(plan, gl.expect("requested statistic")),
    })
}

/// One row of a bound-vs-simulation comparison.
#[derive(Clone, Debug)]
pub struct ComparisonRow {
    pub delta: u32,
    pub raw_bound: BigRational,
    pub clamped_bound: BigRational,
    pub count_geq: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub bound_minus_estimate: f64,
    /// True when the clamped bound exceeds the estimate by more than three
    /// standard errors — statistically incompatible with a valid lower
    /// bound.
    pub violation: bool,
}

/// Merges an analytic curve with an empirical tail over identical δ
/// ranges, flagging dominance violations.
pub fn compare(curve: &BoundCurve, tail: &EmpiricalTail) -> Result<Vec<ComparisonRow>> {
    if curve.delta_max() != tail.delta_max() || curve.delta_max() == 0 {
        return Err(Error::DeltaRangeMismatch {
            detail: format!(
                "bound curve covers δ ≤ {}, empirical tail δ ≤ {}",
                curve.delta_max(),
                tail.delta_max()
            ),
        });
    }
    Ok(curve
        .entries()
        .iter()
        .map(|b| {
            let delta = b.delta;
            let count_geq = tail.count_geq(delta).expect("equal ranges");
            let estimate = tail.estimate(delta).expect("equal ranges");
            let stderr = tail.stderr(delta).expect("equal ranges");
            let clamped = rational_to_f64(&b.clamped);
            ComparisonRow {
                delta,
                raw_bound: b.raw.clone(),
                clamped_bound: b.clamped.clone(),
                count_geq,
                estimate,
                stderr,
                bound_minus_estimate: clamped - estimate,
                violation: clamped > estimate + 3.0 * stderr,
            }
        })
        .collect())
}

/// One row of an s-t vs global empirical comparison.
#[derive(Clone, Debug)]
pub struct PairedRow {
    pub delta: u32,
    pub st_count_geq: u64,
    pub st_estimate: f64,
    pub st_stderr: f64,
    pub global_count_geq: u64,
    pub global_estimate: f64,
    pub global_stderr: f64,
    pub global_minus_st: f64,
    /// True when the global tail exceeds the s-t tail — impossible on a
    /// shared sample stream, so any flag indicates a defect.
    pub violation: bool,
}

/// Merges the two tails of a paired run.
pub fn compare_paired(paired: &PairedTails) -> Result<Vec<PairedRow>> {
    let (st, gl) = (&paired.st, &paired.global);
    if st.delta_max() != gl.delta_max() || st.delta_max() == 0 {
        return Err(Error::DeltaRangeMismatch {
            detail: format!(
                "s-t tail covers δ ≤ {}, global tail δ ≤ {}",
                st.delta_max(),
                gl.delta_max()
            ),
        });
    }
    Ok((1..=st.delta_max())
        .map(|delta| {
            let st_count = st.count_geq(delta).expect("equal ranges");
            let gl_count = gl.count_geq(delta).expect("equal ranges");
            PairedRow {
                delta,
                st_count_geq: st_count,
                st_estimate: st.estimate(delta).expect("equal ranges"),
                st_stderr: st.stderr(delta).expect("equal ranges"),
                global_count_geq: gl_count,
                global_estimate: gl.estimate(delta).expect("equal ranges"),
                global_stderr: gl.stderr(delta).expect("equal ranges"),
                global_minus_st: gl.estimate(delta).expect("equal ranges")
                    - st.estimate(delta).expect("equal ranges"),
                violation: gl_count > st_count,
            }
        })
        .collect())
}
