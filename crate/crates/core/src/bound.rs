//! Exact evaluation of the ensemble-average cut statistics and the
//! resulting lower bound on the min-cut tail.
//!
//! For a degree distribution on n vertices with m edges and weight measure
//! μ, the expected number of s-t cut vectors with vertex-side weight u,
//! cut-set size v and cut weight w is
//!
//! ```text
//! E[A(u,v,w)] = 2^{v+1}·u(n−u)·C(m,v)·[x^w]f^v / (n(n−1))
//!               · Σ_h C((m−v), (h−v)/2)·T[h][u] / C(2m, h)
//! ```
//!
//! with T the bivariate coefficient table and f the weight generator; odd
//! or negative half-indices contribute 0. Summing (1/2)·E[A] over u and v
//! upper-bounds the expected number of distinct cut-sets per weight, and a
//! Markov step turns the partial sums into a lower bound on Pr[λ ≥ δ].
//! Every intermediate value is an exact big integer or rational; the h-sums
//! are assembled over the common denominator (2m)! so no per-term rational
//! normalization occurs.

use std::collections::BTreeMap;
use std::sync::Mutex;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::ensemble::{DegreeDistribution, WeightDistribution};
use crate::genpoly::{binomial, binomial_half, weight_coef, BivariateCoeffTable, Factorials};
use crate::{Error, Result};

/// One point of the analytic tail bound.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundEntry {
    pub delta: u32,
    /// 1 − Σ_{w<δ} (cut-set count upper bound); may be negative where the
    /// bound is vacuous.
    pub raw: BigRational,
    /// raw clamped into [0, 1].
    pub clamped: BigRational,
}

/// The analytic lower bound on Pr[λ ≥ δ] for δ = 1..=delta_max.
/// `raw` is non-increasing in δ by construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundCurve {
    entries: Vec<BoundEntry>,
}

impl BoundCurve {
    pub fn entries(&self) -> &[BoundEntry] {
        &self.entries
    }

    pub fn delta_max(&self) -> u32 {
        self.entries.len() as u32
    }

    pub fn get(&self, delta: u32) -> Option<&BoundEntry> {
        if delta == 0 {
            return None;
        }
        self.entries.get(delta as usize - 1)
    }
}

/// Evaluator bundling the distribution, the weight measure and the
/// coefficient table with the factorial table and the h-sum cache they
/// share. Everything (2m)!-denominated is computed once and reused across
/// all (u, v, w) queries.
pub struct BoundEngine<'a> {
    dd: &'a DegreeDistribution,
    mu: &'a WeightDistribution,
    table: &'a BivariateCoeffTable,
    facts: Factorials,
    /// n(n−1)·(2m)!, the common denominator of every expectation term.
    denom: BigUint,
    /// v → Σ_u u(n−u)·h_sum(u, v), shared by all weights w.
    weighted_cache: Mutex<BTreeMap<usize, BigUint>>,
}

impl<'a> BoundEngine<'a> {
    pub fn new(
        dd: &'a DegreeDistribution,
        mu: &'a WeightDistribution,
        table: &'a BivariateCoeffTable,
    ) -> Result<Self> {
        let (n, m) = (dd.n(), dd.num_edges());
        if table.n() != n || table.m() != m {
            return Err(Error::TableMismatch {
                table_n: table.n(),
                table_m: table.m(),
                n,
                m,
            });
        }
        let facts = Factorials::new(2 * m);
        let denom = BigUint::from(n) * BigUint::from(n - 1) * facts.get(2 * m);
        Ok(BoundEngine {
            dd,
            mu,
            table,
            facts,
            denom,
            weighted_cache: Mutex::new(BTreeMap::new()),
        })
    }

    /// Σ_h C_half(m−v, h−v)·T[h][u]·h!·(2m−h)! over the given h order —
    /// the h-sum numerator over the common denominator (2m)!.
    fn h_sum_over(&self, u: usize, v: usize, hs: impl Iterator<Item = usize>) -> BigUint {
        let m = self.table.m();
        let mut s = BigUint::zero();
        for h in hs {
            let t = self.table.get(h, u);
            if t.is_zero() {
                continue;
            }
            let bh = binomial_half((m - v) as u64, h as i64 - v as i64);
            if bh.is_zero() {
                continue;
            }
            s += t * bh * self.facts.get(h) * self.facts.get(2 * m - h);
        }
        s
    }

    fn h_sum(&self, u: usize, v: usize) -> BigUint {
        self.h_sum_over(u, v, v..=2 * self.table.m())
    }

    /// Σ_u u(n−u)·h_sum(u, v), cached per v; the u-partition parallelizes
    /// and merges exactly (big-integer addition is associative), so the
    /// value is schedule-independent.
    fn weighted_h_sum(&self, v: usize) -> BigUint {
        if let Some(x) = self.weighted_cache.lock().expect("cache lock").get(&v) {
            return x.clone();
        }
        let n = self.table.n();
        let val = (1..n)
            .into_par_iter()
            .map(|u| BigUint::from(u * (n - u)) * self.h_sum(u, v))
            .reduce(BigUint::zero, |a, b| a + b);
        self.weighted_cache
            .lock()
            .expect("cache lock")
            .insert(v, val.clone());
        val
    }

    fn check_uv(&self, u: usize, v: usize) -> Result<()> {
        let (n, m) = (self.table.n(), self.table.m());
        if u < 1 || u > n - 1 {
            return Err(Error::IndexOutOfRange {
                what: "cut vector weight u",
                got: u as i64,
                lo: 1,
                hi: (n - 1) as i64,
            });
        }
        if v > m {
            return Err(Error::IndexOutOfRange {
                what: "cut-set weight v",
                got: v as i64,
                lo: 0,
                hi: m as i64,
            });
        }
        Ok(())
    }

    /// E[A(u,v,w)], exact.
    pub fn expected_cut_count(&self, u: usize, v: usize, w: usize) -> Result<BigRational> {
        self.check_uv(u, v)?;
        let (n, m) = (self.table.n(), self.table.m());
        let wc = weight_coef(self.mu, v, w);
        if wc.is_zero() {
            return Ok(BigRational::zero());
        }
        let numer = (BigUint::one() << (v + 1))
            * BigUint::from(u * (n - u))
            * binomial(m as u64, v as i64)
            * self.h_sum(u, v);
        Ok(BigRational::new(numer.into(), self.denom.clone().into()) * wc)
    }

    /// Upper bound on E[B(w)], the expected number of distinct s-t
    /// cut-sets of weight w: (1/2)·Σ_{u,v} E[A(u,v,w)], with v restricted
    /// to the support window of [x^w]f^v (an exact pruning) and the 1/2
    /// absorbed into 2^{v+1} → 2^v. The v = 0 term carries the mass of
    /// empty cut-sets (disconnected s-t pairs) and survives only at w = 0.
    pub fn expected_cutset_count_upper(&self, w: usize) -> BigRational {
        let m = self.table.m();
        let q = self.mu.q() as usize;
        let window: Vec<usize> = if w == 0 {
            vec![0]
        } else {
            (w.div_ceil(q)..=w.min(m)).collect()
        };
        let mut acc = BigRational::zero();
        for v in window {
            let wc = weight_coef(self.mu, v, w);
            if wc.is_zero() {
                continue;
            }
            let numer =
                (BigUint::one() << v) * binomial(m as u64, v as i64) * self.weighted_h_sum(v);
            acc += BigRational::new(numer.into(), self.denom.clone().into()) * wc;
        }
        acc
    }

    /// The lower bound curve: raw(δ) = 1 − Σ_{w=0}^{δ−1} cut-set upper
    /// bound, computed incrementally (one new w term per δ), with the
    /// clamped companion value.
    pub fn tail_lower_bound(&self, delta_max: u32) -> Result<BoundCurve> {
        if delta_max < 1 {
            return Err(Error::IndexOutOfRange {
                what: "delta_max",
                got: delta_max as i64,
                lo: 1,
                hi: i64::MAX,
            });
        }
        let mut cum = BigRational::zero();
        let mut entries = Vec::with_capacity(delta_max as usize);
        for delta in 1..=delta_max {
            cum += self.expected_cutset_count_upper(delta as usize - 1);
            let raw = BigRational::one() - &cum;
            let clamped = raw
                .clone()
                .max(BigRational::zero())
                .min(BigRational::one());
            entries.push(BoundEntry {
                delta,
                raw,
                clamped,
            });
        }
        Ok(BoundCurve { entries })
    }

    pub fn degree_distribution(&self) -> &DegreeDistribution {
        self.dd
    }

    pub fn weight_distribution(&self) -> &WeightDistribution {
        self.mu
    }
}

/// E[A(u,v,w)] (free-function form; builds a throwaway engine).
pub fn expected_cut_count(
    dd: &DegreeDistribution,
    mu: &WeightDistribution,
    table: &BivariateCoeffTable,
    u: usize,
    v: usize,
    w: usize,
) -> Result<BigRational> {
    BoundEngine::new(dd, mu, table)?.expected_cut_count(u, v, w)
}

/// E[A(u,v,w)] for the c-regular distribution d(x) = x^c in closed form:
/// 2^{v+1}·C(n−2,u−1)·C(m,v)·C_half(m−v, cu−v)·[x^w]f^v / C(cn, cu).
pub fn expected_cut_count_regular(
    n: usize,
    c: usize,
    mu: &WeightDistribution,
    u: usize,
    v: usize,
    w: usize,
) -> Result<BigRational> {
    if n < 2 {
        return Err(Error::TooFewVertices { n });
    }
    let stubs = n * c;
    if stubs % 2 != 0 {
        return Err(Error::OddStubTotal {
            total: stubs as u64,
        });
    }
    let m = stubs / 2;
    if u < 1 || u > n - 1 {
        return Err(Error::IndexOutOfRange {
            what: "cut vector weight u",
            got: u as i64,
            lo: 1,
            hi: (n - 1) as i64,
        });
    }
    if v > m {
        return Err(Error::IndexOutOfRange {
            what: "cut-set weight v",
            got: v as i64,
            lo: 0,
            hi: m as i64,
        });
    }
    let wc = weight_coef(mu, v, w);
    if wc.is_zero() {
        return Ok(BigRational::zero());
    }
    let numer = (BigUint::one() << (v + 1))
        * binomial((n - 2) as u64, u as i64 - 1)
        * binomial(m as u64, v as i64)
        * binomial_half((m - v) as u64, (c * u) as i64 - v as i64);
    let denom = binomial((c * n) as u64, (c * u) as i64);
    Ok(BigRational::new(numer.into(), denom.into()) * wc)
}

/// Upper bound on E[B(w)] (free-function form).
pub fn expected_cutset_count_upper(
    dd: &DegreeDistribution,
    mu: &WeightDistribution,
    table: &BivariateCoeffTable,
    w: usize,
) -> Result<BigRational> {
    Ok(BoundEngine::new(dd, mu, table)?.expected_cutset_count_upper(w))
}

/// The analytic lower bound on Pr[λ ≥ δ] (free-function form).
pub fn tail_lower_bound(
    dd: &DegreeDistribution,
    mu: &WeightDistribution,
    table: &BivariateCoeffTable,
    delta_max: u32,
) -> Result<BoundCurve> {
    BoundEngine::new(dd, mu, table)?.tail_lower_bound(delta_max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cuts::exhaustive_ensemble_expectations;
    use crate::genpoly::degree_product_table;
    use num_bigint::BigInt;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn half_half() -> WeightDistribution {
        WeightDistribution::new(2, [(1, rat(1, 2)), (2, rat(1, 2))]).unwrap()
    }

    #[test]
    fn single_edge_regular_case() {
        // n=2, c=1, q=1: the lone matching is one s-t edge; its single
        // cut-set is counted in both orientations, so E[A(1,1,1)] = 2.
        let mu = WeightDistribution::unit();
        let got = expected_cut_count_regular(2, 1, &mu, 1, 1, 1).unwrap();
        assert_eq!(got, rat(2, 1));
        let dd = DegreeDistribution::regular(2, 1).unwrap();
        let oracle = exhaustive_ensemble_expectations(&dd, &mu, 2).unwrap();
        assert_eq!(oracle.cut_counts.get(&(1, 1, 1)), Some(&rat(2, 1)));
        assert_eq!(oracle.tail[0], (1, rat(1, 1)));
        assert_eq!(oracle.tail[1], (2, rat(0, 1)));
    }

    #[test]
    fn regular_closed_form_parity_zero() {
        // c·u − v odd → the half-binomial kills the term.
        let mu = WeightDistribution::unit();
        let got = expected_cut_count_regular(4, 3, &mu, 1, 2, 2).unwrap();
        assert_eq!(got, BigRational::zero());
    }

    #[test]
    fn general_formula_matches_regular_closed_form() {
        let unit = WeightDistribution::unit();
        let hh = half_half();
        let cases: &[(usize, usize, &WeightDistribution)] = &[
            (4, 3, &unit),
            (8, 3, &unit),
            (12, 3, &unit),
            (5, 4, &unit),
            (12, 4, &unit),
            (4, 3, &hh),
        ];
        for &(n, c, mu) in cases {
            let dd = DegreeDistribution::regular(n, c).unwrap();
            let table = degree_product_table(&dd);
            let engine = BoundEngine::new(&dd, mu, &table).unwrap();
            let m = dd.num_edges();
            let q = mu.q() as usize;
            for u in 1..n {
                for v in 0..=m {
                    for w in 0..=v * q + 1 {
                        let general = engine.expected_cut_count(u, v, w).unwrap();
                        let regular = expected_cut_count_regular(n, c, mu, u, v, w).unwrap();
                        assert_eq!(general, regular, "n={n} c={c} u={u} v={v} w={w}");
                    }
                }
            }
        }
    }

    #[test]
    fn h_sum_is_order_independent() {
        let dd = DegreeDistribution::regular(8, 3).unwrap();
        let mu = WeightDistribution::unit();
        let table = degree_product_table(&dd);
        let engine = BoundEngine::new(&dd, &mu, &table).unwrap();
        let m = dd.num_edges();
        for u in 1..8 {
            for v in 0..=m {
                let fwd = engine.h_sum_over(u, v, v..=2 * m);
                let rev = engine.h_sum_over(u, v, (v..=2 * m).rev());
                assert_eq!(fwd, rev, "u={u} v={v}");
            }
        }
    }

    #[test]
    fn cutset_upper_equals_half_cut_count_sum() {
        // Two code paths (per-u queries vs. the cached weighted sum) must
        // agree: B_upper(w) = (1/2)·Σ_{u,v} E[A(u,v,w)].
        let dd = DegreeDistribution::from_counts(&[(2, 2), (3, 2), (4, 1)]).unwrap();
        let mu = half_half();
        let table = degree_product_table(&dd);
        let engine = BoundEngine::new(&dd, &mu, &table).unwrap();
        let (n, m) = (dd.n(), dd.num_edges());
        for w in 0..=6usize {
            let direct = engine.expected_cutset_count_upper(w);
            let mut acc = BigRational::zero();
            for u in 1..n {
                for v in 0..=m {
                    acc += engine.expected_cut_count(u, v, w).unwrap();
                }
            }
            assert_eq!(direct, acc / rat(2, 1), "w={w}");
        }
    }

    #[test]
    fn unit_measure_prunes_to_diagonal() {
        // q=1: [x^w]f^v = [v=w], so off-diagonal expectations vanish.
        let dd = DegreeDistribution::regular(6, 3).unwrap();
        let mu = WeightDistribution::unit();
        let table = degree_product_table(&dd);
        let engine = BoundEngine::new(&dd, &mu, &table).unwrap();
        assert_eq!(engine.expected_cut_count(2, 2, 3).unwrap(), BigRational::zero());
        assert_eq!(engine.expected_cut_count(2, 3, 2).unwrap(), BigRational::zero());
        assert!(engine.expected_cut_count(2, 2, 2).unwrap() > BigRational::zero());
    }

    #[test]
    fn micro_ensemble_exact_equality_and_directions() {
        // n=3, degrees (1,1,2): 3 matchings; mixed degrees exercise the
        // pair-averaging. Exact equality for E[A]; inequality directions
        // for the cut-set bound and the tail.
        let dd = DegreeDistribution::from_counts(&[(1, 2), (2, 1)]).unwrap();
        let mu = half_half();
        let table = degree_product_table(&dd);
        let engine = BoundEngine::new(&dd, &mu, &table).unwrap();
        let (n, m, q) = (dd.n(), dd.num_edges(), mu.q() as usize);
        let delta_max = (m * q + 1) as u32;
        let oracle = exhaustive_ensemble_expectations(&dd, &mu, delta_max).unwrap();
        for u in 1..n {
            for v in 0..=m {
                for w in 0..=m * q {
                    let formula = engine.expected_cut_count(u, v, w).unwrap();
                    let exact = oracle
                        .cut_counts
                        .get(&(u, v, w as u64))
                        .cloned()
                        .unwrap_or_else(BigRational::zero);
                    assert_eq!(formula, exact, "u={u} v={v} w={w}");
                }
            }
        }
        for w in 0..=m * q {
            let upper = engine.expected_cutset_count_upper(w);
            let exact = oracle
                .cutset_counts
                .get(&(w as u64))
                .cloned()
                .unwrap_or_else(BigRational::zero);
            assert!(exact <= upper, "w={w}: {exact} > {upper}");
        }
        let curve = engine.tail_lower_bound(delta_max).unwrap();
        for (delta, prob) in &oracle.tail {
            let entry = curve.get(*delta).unwrap();
            assert!(
                &entry.clamped <= prob,
                "δ={delta}: clamped bound {} exceeds exact tail {prob}",
                entry.clamped
            );
        }
    }

    #[test]
    fn tail_curve_shape() {
        let dd = DegreeDistribution::regular(10, 3).unwrap();
        let mu = WeightDistribution::unit();
        let table = degree_product_table(&dd);
        let engine = BoundEngine::new(&dd, &mu, &table).unwrap();
        let curve = engine.tail_lower_bound(6).unwrap();
        assert_eq!(curve.delta_max(), 6);
        let entries = curve.entries();
        for pair in entries.windows(2) {
            assert!(pair[1].raw <= pair[0].raw, "raw bound must be non-increasing");
        }
        for e in entries {
            assert!(e.clamped >= BigRational::zero() && e.clamped <= BigRational::one());
            assert_eq!(
                e.clamped,
                e.raw.clone().max(BigRational::zero()).min(BigRational::one())
            );
        }
        // raw(1) = 1 − B_upper(0) ≤ 1.
        let b0 = engine.expected_cutset_count_upper(0);
        assert_eq!(entries[0].raw, BigRational::one() - b0);
        assert!(entries[0].raw <= BigRational::one());
        assert!(curve.get(0).is_none());
        assert!(curve.get(7).is_none());
    }

    #[test]
    fn argument_validation() {
        let dd = DegreeDistribution::regular(4, 3).unwrap();
        let mu = WeightDistribution::unit();
        let table = degree_product_table(&dd);
        let engine = BoundEngine::new(&dd, &mu, &table).unwrap();
        assert!(matches!(
            engine.expected_cut_count(0, 1, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            engine.expected_cut_count(4, 1, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            engine.expected_cut_count(1, 7, 1),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            engine.tail_lower_bound(0),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(matches!(
            expected_cut_count_regular(3, 3, &mu, 1, 1, 1),
            Err(Error::OddStubTotal { total: 9 })
        ));
        // Mismatched table.
        let other = DegreeDistribution::regular(6, 3).unwrap();
        let other_table = degree_product_table(&other);
        assert!(matches!(
            BoundEngine::new(&dd, &mu, &other_table),
            Err(Error::TableMismatch { .. })
        ));
    }
}
