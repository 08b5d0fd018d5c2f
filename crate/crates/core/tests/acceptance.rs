//! Acceptance gate: nine end-to-end checks covering the combinatorial
//! identities, exact small-ensemble oracles, solver cross-validation,
//! benchmark-scale bound/simulation dominance, and byte-level output
//! determinism. Each check prints a single `acceptance k (<name>): PASS`
//! line on success and carries an explicit wall-clock budget where the
//! contract imposes one.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::LazyLock;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use cutbound::bound::{expected_cut_count, expected_cutset_count_upper, tail_lower_bound};
use cutbound::cli::EnsembleSpec;
use cutbound::cuts::{
    constraint_map, cut_weight, exhaustive_ensemble_expectations, exhaustive_global_min_cut,
    exhaustive_min_st_cut, global_min_cut, min_st_cut,
};
use cutbound::ensemble::{DegreeDistribution, WeightDistribution, WeightedMultigraph};
use cutbound::experiment::{compare, run_paired_experiment, run_st_experiment, ExperimentPlan};
use cutbound::genpoly::{
    binomial, binomial_half, degree_product_table, parse_rational, BivariateCoeffTable,
};

fn config_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

struct Fixture {
    spec: EnsembleSpec,
    dd: DegreeDistribution,
    mu: WeightDistribution,
    table: BivariateCoeffTable,
}

fn load(name: &str) -> Fixture {
    let spec = EnsembleSpec::from_path(config_path(name)).expect("config parses");
    let dd = spec.degree_distribution().expect("valid degree fractions");
    let mu = spec.weight_distribution().expect("valid weights");
    let table = degree_product_table(&dd);
    Fixture {
        spec,
        dd,
        mu,
        table,
    }
}

static SPARSE: LazyLock<Fixture> = LazyLock::new(|| load("sparse.toml"));
static DENSE: LazyLock<Fixture> = LazyLock::new(|| load("dense.toml"));
static WIDE: LazyLock<Fixture> = LazyLock::new(|| load("global600.toml"));

fn plan_from(f: &Fixture) -> ExperimentPlan {
    ExperimentPlan::new(
        f.spec.samples.expect("samples set"),
        f.spec.seed.expect("seed set"),
        f.spec.sampling_mode().expect("valid mode"),
        f.spec.delta_max.expect("delta_max set"),
    )
}

fn random_graph(rng: &mut ChaCha12Rng, max_n: usize, max_cap: u32) -> WeightedMultigraph {
    let n = rng.random_range(2..=max_n);
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

/// The two exactly enumerable ensembles used by the expectation checks:
/// a 3-regular graph on 4 vertices with unit weights (10395 matchings)
/// and a mixed-degree graph on 5 vertices with two-point weights
/// (945 matchings, 32 weight assignments).
fn exact_cases() -> Vec<(DegreeDistribution, WeightDistribution)> {
    let half = parse_rational("1/2").expect("valid rational");
    vec![
        (
            DegreeDistribution::regular(4, 3).expect("valid profile"),
            WeightDistribution::unit(),
        ),
        (
            DegreeDistribution::from_counts(&[(1, 2), (2, 1), (3, 2)]).expect("valid profile"),
            WeightDistribution::new(2, [(1, half.clone()), (2, half)]).expect("valid weights"),
        ),
    ]
}

#[test]
fn a1_pairing_identity_and_table_invariants() {
    let t0 = Instant::now();
    // Σ_v C(m,v)·2^v·C_half(m−v, h−v) = C(2m, h) for every m ≤ 20 and
    // every h: splitting the h chosen stubs by how many matched pairs
    // they fully cover.
    for m in 0..=20u64 {
        for h in 0..=2 * m {
            let lhs: BigUint = (0..=m)
                .map(|v| {
                    binomial(m, v as i64)
                        * BigUint::from(2u32).pow(v as u32)
                        * binomial_half(m - v, h as i64 - v as i64)
                })
                .sum();
            assert_eq!(lhs, binomial(2 * m, h as i64), "m={m} h={h}");
        }
    }
    // Every benchmark degree profile: the coefficient table carries total
    // mass 2^n and the complement symmetry T[h][u] = T[2m−h][n−u].
    for name in ["sparse.toml", "dense.toml", "global600.toml"] {
        let spec = EnsembleSpec::from_path(config_path(name)).expect("config parses");
        let dd = spec.degree_distribution().expect("valid degree fractions");
        let table = degree_product_table(&dd);
        let n = table.n();
        let m2 = 2 * table.m();
        assert_eq!(
            table.total(),
            BigUint::from(2u32).pow(n as u32),
            "{name}: table mass"
        );
        for h in 0..=m2 {
            for u in 0..=n {
                assert_eq!(
                    table.get(h, u),
                    table.get(m2 - h, n - u),
                    "{name}: symmetry at h={h} u={u}"
                );
            }
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!("acceptance 1 (pairing identity and table invariants): PASS");
}

#[test]
fn a2_constraint_map_matches_direct_indicators() {
    let t0 = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(2);
    for _ in 0..50 {
        let g = random_graph(&mut rng, 8, 5);
        let n = g.n();
        for bits in 0u32..1 << n {
            let a: Vec<bool> = (0..n).map(|v| bits >> v & 1 == 1).collect();
            let mapped = constraint_map(&g, &a).expect("vector length matches");
            let mut weight = 0u64;
            for (i, e) in g.edges().iter().enumerate() {
                let direct = a[e.a] != a[e.b];
                assert_eq!(mapped[i], direct, "edge {i} of {g:?} under {a:?}");
                if direct {
                    weight += e.cap as u64;
                }
            }
            assert_eq!(cut_weight(&g, &a).expect("vector length matches"), weight);
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!("acceptance 2 (constraint map vs direct indicators): PASS");
}

#[test]
fn a3_expected_cut_counts_match_full_enumeration() {
    let t0 = Instant::now();
    for (dd, mu) in &exact_cases() {
        let n = dd.n();
        let m = dd.num_edges();
        let q = mu.q() as usize;
        let exact = exhaustive_ensemble_expectations(dd, mu, (m * q + 1) as u32)
            .expect("within enumeration guards");
        let table = degree_product_table(dd);
        let mut nonzero = 0u64;
        for u in 1..n {
            for v in 0..=m {
                for w in 0..=m * q {
                    let formula = expected_cut_count(dd, mu, &table, u, v, w)
                        .expect("indices in range");
                    let enumerated = exact
                        .cut_counts
                        .get(&(u, v, w as u64))
                        .cloned()
                        .unwrap_or_else(num_rational::BigRational::zero);
                    assert_eq!(
                        formula, enumerated,
                        "n={n} u={u} v={v} w={w}: formula vs enumeration"
                    );
                    if !formula.is_zero() {
                        nonzero += 1;
                    }
                }
            }
        }
        // Unit weights collapse the support to w = v, leaving 8 nonzero
        // cells on the 3-regular case; anything below that signals a
        // degenerate grid rather than a real comparison.
        assert!(nonzero >= 8, "only {nonzero} nonzero cells compared");
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!("acceptance 3 (expected cut counts vs full enumeration): PASS");
}

#[test]
fn a4_bound_directions_hold_exactly_on_enumerable_ensembles() {
    for (dd, mu) in &exact_cases() {
        let m = dd.num_edges();
        let q = mu.q() as usize;
        let delta_max = (m * q + 1) as u32;
        let exact = exhaustive_ensemble_expectations(dd, mu, delta_max)
            .expect("within enumeration guards");
        let table = degree_product_table(dd);
        // E[B(w)] ≤ its closed-form upper bound, exactly.
        for w in 0..=m * q {
            let upper = expected_cutset_count_upper(dd, mu, &table, w).expect("w in range");
            let enumerated = exact
                .cutset_counts
                .get(&(w as u64))
                .cloned()
                .unwrap_or_else(num_rational::BigRational::zero);
            assert!(
                enumerated <= upper,
                "w={w}: E[B] = {enumerated} exceeds upper bound {upper}"
            );
        }
        // Pr[λ ≥ δ] ≥ the clamped lower bound, exactly.
        let curve = tail_lower_bound(dd, mu, &table, delta_max).expect("delta_max ≥ 1");
        for (delta, prob) in &exact.tail {
            let entry = curve.get(*delta).expect("delta in range");
            assert!(
                *prob >= entry.clamped,
                "δ={delta}: tail {prob} below clamped bound {}",
                entry.clamped
            );
        }
    }
    println!("acceptance 4 (bound directions exact on enumerable ensembles): PASS");
}

#[test]
fn a5_cut_solvers_match_exhaustive_search() {
    let t0 = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(5);
    for i in 0..100 {
        let g = random_graph(&mut rng, 10, 5);
        let n = g.n();
        let s = rng.random_range(0..n);
        let t = {
            let x = rng.random_range(0..n - 1);
            if x >= s {
                x + 1
            } else {
                x
            }
        };
        assert_eq!(
            min_st_cut(&g, s, t).expect("valid pair"),
            exhaustive_min_st_cut(&g, s, t).expect("valid pair"),
            "graph {i}: s-t flow vs exhaustive"
        );
        assert_eq!(
            global_min_cut(&g).expect("n ≥ 2"),
            exhaustive_global_min_cut(&g).expect("n ≥ 2"),
            "graph {i}: global cut vs exhaustive"
        );
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(30), "took {elapsed:?}");
    println!("acceptance 5 (cut solvers vs exhaustive search): PASS");
}

/// Shared body of the two benchmark dominance checks: evaluate the bound
/// curve and an independent Monte Carlo tail, then require the clamped
/// bound to sit at or below estimate + 3·stderr at every δ.
fn dominance_check(f: &Fixture, label: &str) {
    let delta_max = f.spec.delta_max.expect("delta_max set");
    let t0 = Instant::now();
    let curve = tail_lower_bound(&f.dd, &f.mu, &f.table, delta_max).expect("delta_max ≥ 1");
    let bound_time = t0.elapsed();
    assert!(
        bound_time < Duration::from_secs(300),
        "bound took {bound_time:?}"
    );
    // A vacuous all-zero curve would pass dominance trivially; require the
    // certain-connectivity regime to carry real mass.
    let first = curve.get(1).expect("δ = 1 present");
    assert!(
        first.clamped > parse_rational("1/2").expect("valid rational"),
        "{label}: clamped bound at δ = 1 is {}, too weak to be useful",
        first.clamped
    );
    for pair in curve.entries().windows(2) {
        assert!(
            pair[1].clamped <= pair[0].clamped,
            "{label}: clamped bound increases at δ = {}",
            pair[1].delta
        );
    }
    let t1 = Instant::now();
    let tail = run_st_experiment(&f.dd, &f.mu, &plan_from(f)).expect("sampling succeeds");
    let sim_time = t1.elapsed();
    assert!(
        sim_time < Duration::from_secs(300),
        "simulation took {sim_time:?}"
    );
    let rows = compare(&curve, &tail).expect("matching delta ranges");
    assert_eq!(rows.len(), delta_max as usize);
    for row in &rows {
        assert!(
            !row.violation,
            "{label}: δ = {}: clamped bound {} vs estimate {} (stderr {})",
            row.delta,
            row.clamped_bound,
            row.estimate,
            row.stderr
        );
    }
}

#[test]
fn a6_sparse_benchmark_bound_below_simulation() {
    dominance_check(&SPARSE, "sparse ensemble");
    println!("acceptance 6 (sparse benchmark dominance): PASS");
}

#[test]
fn a7_dense_benchmark_bound_below_simulation() {
    dominance_check(&DENSE, "dense ensemble");
    println!("acceptance 7 (dense benchmark dominance): PASS");
}

#[test]
fn a8_global_tail_never_exceeds_st_tail() {
    let f = &*WIDE;
    let t0 = Instant::now();
    let paired = run_paired_experiment(&f.dd, &f.mu, &plan_from(f)).expect("sampling succeeds");
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(300), "took {elapsed:?}");
    let delta_max = f.spec.delta_max.expect("delta_max set");
    for delta in 1..=delta_max {
        let st = paired.st.count_geq(delta).expect("delta in range");
        let gl = paired.global.count_geq(delta).expect("delta in range");
        assert!(
            gl <= st,
            "δ = {delta}: global tail count {gl} exceeds s-t tail count {st}"
        );
    }
    // The comparison is nontrivial only if both statistics vary over the
    // range: the tails must not be identically zero past δ = 1.
    assert!(paired.st.count_geq(2).expect("delta in range") > 0);
    println!("acceptance 8 (global tail dominated by s-t tail): PASS");
}

#[test]
fn a9_csv_bytes_identical_across_worker_counts() {
    let bin = env!("CARGO_BIN_EXE_cutbound");
    let dir = tempfile::tempdir().expect("temp dir");
    let config = config_path("sparse.toml");
    let run = |args: &[&str], out: &Path| {
        let status = Command::new(bin)
            .args(args)
            .arg("--out")
            .arg(out)
            .status()
            .expect("binary runs");
        assert!(status.success(), "{args:?} exited with {status}");
        std::fs::read(out).expect("output written")
    };
    let cfg = config.to_str().expect("utf-8 path");

    let sim = |workers: &str, out: &Path| {
        run(
            &[
                "simulate", "--config", cfg, "--samples", "1500", "--seed", "424242",
                "--delta-max", "8", "--workers", workers,
            ],
            out,
        )
    };
    let sim1 = sim("1", &dir.path().join("sim-w1.csv"));
    let sim4 = sim("4", &dir.path().join("sim-w4.csv"));
    assert_eq!(sim1, sim4, "simulate output must not depend on --workers");

    let bound = |workers: &str, out: &Path| {
        run(
            &[
                "bound", "--config", cfg, "--delta-max", "6", "--workers", workers,
            ],
            out,
        )
    };
    let b1 = bound("1", &dir.path().join("bound-w1.csv"));
    let b3 = bound("3", &dir.path().join("bound-w3.csv"));
    assert_eq!(b1, b3, "bound output must not depend on --workers");
    println!("acceptance 9 (byte-identical output across worker counts): PASS");
}
