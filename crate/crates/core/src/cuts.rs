//! Cut-space machinery and exact cut algorithms.
//!
//! The GF(2) view: subdividing every edge with a degree-2 parity node makes
//! the map from a vertex-side indicator (cut vector) to the edge indicator
//! of the crossing edges (cut-set vector) linear over GF(2); a self-loop is
//! a parity node attached twice to one vertex and always evaluates to 0.
//! On top of that sit exact algorithms — Dinic max-flow for minimum s-t
//! cuts, Stoer–Wagner for the global minimum cut — and exhaustive oracles
//! for small instances that everything else is tested against.

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::ensemble::{
    enumerate_matchings, matching_to_edges, DegreeDistribution, WeightDistribution,
    WeightedMultigraph,
};
use crate::{Error, Result};

/// Vertex-side indicator of a bipartition (X, V∖X).
pub type CutVector = Vec<bool>;
/// Edge indicator of a cut-set ∂(X); component i refers to edge i of the
/// associated graph, parallel edges kept distinct.
pub type CutSetVector = Vec<bool>;

/// Applies the constraint-graph linear map: bit i of the result is the XOR
/// of the cut vector at the two endpoints of edge i (0 for self-loops).
pub fn constraint_map(g: &WeightedMultigraph, a: &[bool]) -> Result<CutSetVector> {
    if a.len() != g.n() {
        return Err(Error::CutVectorLength {
            got: a.len(),
            expected: g.n(),
        });
    }
    Ok(g.edges().iter().map(|e| a[e.a] ^ a[e.b]).collect())
}

/// Total capacity crossing the bipartition indicated by `a`:
/// Σ_{i : b_i = 1} c(e_i) where b = constraint_map(g, a).
pub fn cut_weight(g: &WeightedMultigraph, a: &[bool]) -> Result<u64> {
    if a.len() != g.n() {
        return Err(Error::CutVectorLength {
            got: a.len(),
            expected: g.n(),
        });
    }
    Ok(g
        .edges()
        .iter()
        .filter(|e| a[e.a] ^ a[e.b])
        .map(|e| e.cap as u64)
        .sum())
}

fn check_vertex(v: usize, n: usize) -> Result<()> {
    if v >= n {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    Ok(())
}

/// Minimum s-t cut weight, equal to the s-t max-flow. Computed by Dinic's
/// blocking-flow algorithm on the bidirected network (each undirected edge
/// becomes an antiparallel arc pair, each with the full capacity).
/// Returns 0 when s and t are disconnected.
pub fn min_st_cut(g: &WeightedMultigraph, s: usize, t: usize) -> Result<u64> {
    check_vertex(s, g.n())?;
    check_vertex(t, g.n())?;
    if s == t {
        return Err(Error::SourceEqualsSink { vertex: s });
    }
    let mut dinic = Dinic::new(g.n());
    for e in g.edges() {
        if e.a != e.b {
            dinic.add_undirected(e.a, e.b, e.cap as u64);
        }
    }
    Ok(dinic.max_flow(s, t))
}

/// Minimum cut weight over all proper bipartitions (Stoer–Wagner).
/// Returns 0 for disconnected graphs. Requires n ≥ 2.
pub fn global_min_cut(g: &WeightedMultigraph) -> Result<u64> {
    let n = g.n();
    if n < 2 {
        return Err(Error::TooFewVertices { n });
    }
    // Dense capacity matrix; parallel edges merge, self-loops vanish.
    let mut w = vec![vec![0u64; n]; n];
    for e in g.edges() {
        if e.a != e.b {
            w[e.a][e.b] += e.cap as u64;
            w[e.b][e.a] += e.cap as u64;
        }
    }
    let mut active: Vec<usize> = (0..n).collect();
    let mut best = u64::MAX;
    while active.len() > 1 {
        // Maximum-adjacency order over the active (merged) vertices.
        let k = active.len();
        let mut added = vec![false; k];
        let mut key = vec![0u64; k];
        let mut order = Vec::with_capacity(k);
        for _ in 0..k {
            let next = (0..k)
                .filter(|&i| !added[i])
                .max_by_key(|&i| key[i])
                .expect("an unadded vertex remains");
            added[next] = true;
            order.push(next);
            for i in 0..k {
                if !added[i] {
                    key[i] += w[active[next]][active[i]];
                }
            }
        }
        let last = order[k - 1];
        let prev = order[k - 2];
        // Cut of the phase: the last vertex against everything else.
        best = best.min(key[last]);
        // Merge `last` into `prev`.
        let (vl, vp) = (active[last], active[prev]);
        for i in 0..k {
            let vi = active[i];
            if vi != vl && vi != vp {
                w[vp][vi] += w[vl][vi];
                w[vi][vp] = w[vp][vi];
            }
        }
        active.remove(last);
    }
    Ok(best)
}

/// Exhaustive counts from all 2^{n−2} s-t bipartitions of a small graph.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CutDistribution {
    /// (u, v, w) → number of s-t cut vectors of vertex-side weight u whose
    /// cut-set vector has weight v and cut weight w; both orientations of
    /// each bipartition are counted.
    pub cut_counts: BTreeMap<(usize, usize, u64), u64>,
    /// w → number of *distinct* s-t cut-sets of weight w (bipartitions
    /// sharing a cut-set deduplicated).
    pub cutset_counts: BTreeMap<u64, u64>,
    /// Minimum s-t cut weight over the enumeration (0 when some
    /// bipartition has an empty cut-set, i.e. s, t disconnected).
    pub min_cut: u64,
}

/// Enumerates every s-t bipartition of a small graph (n ≤ 20, m ≤ 64) and
/// tallies the exact cut-vector counts by (u, v, w), the distinct-cut-set
/// counts by w, and the minimum s-t cut weight.
pub fn brute_force_cut_distribution(
    g: &WeightedMultigraph,
    s: usize,
    t: usize,
) -> Result<CutDistribution> {
    let n = g.n();
    check_vertex(s, n)?;
    check_vertex(t, n)?;
    if s == t {
        return Err(Error::SourceEqualsSink { vertex: s });
    }
    if n > 20 {
        return Err(Error::EnumerationGuard {
            what: "vertex count",
            got: n,
            limit: 20,
        });
    }
    let m = g.num_edges();
    if m > 64 {
        return Err(Error::EnumerationGuard {
            what: "edge count",
            got: m,
            limit: 64,
        });
    }
    let free: Vec<usize> = (0..n).filter(|&v| v != s && v != t).collect();
    let mut dist = CutDistribution {
        min_cut: u64::MAX,
        ..Default::default()
    };
    let mut seen_cutsets: HashSet<u64> = HashSet::new();
    for bits in 0u32..(1u32 << free.len()) {
        // X contains s, excludes t; the complement covers the opposite
        // orientation.
        let mut side = vec![false; n];
        side[s] = true;
        for (i, &v) in free.iter().enumerate() {
            side[v] = bits >> i & 1 == 1;
        }
        let u = side.iter().filter(|&&b| b).count();
        let mut cutset_mask = 0u64;
        let mut v_weight = 0usize;
        let mut w = 0u64;
        for (i, e) in g.edges().iter().enumerate() {
            if side[e.a] ^ side[e.b] {
                cutset_mask |= 1 << i;
                v_weight += 1;
                w += e.cap as u64;
            }
        }
        // Both orientations of the bipartition share (v, w) but have
        // complementary vertex-side weights.
        *dist.cut_counts.entry((u, v_weight, w)).or_insert(0) += 1;
        *dist.cut_counts.entry((n - u, v_weight, w)).or_insert(0) += 1;
        if seen_cutsets.insert(cutset_mask) {
            *dist.cutset_counts.entry(w).or_insert(0) += 1;
        }
        dist.min_cut = dist.min_cut.min(w);
    }
    Ok(dist)
}

/// Oracle: minimum s-t cut by direct enumeration of all bipartitions.
pub fn exhaustive_min_st_cut(g: &WeightedMultigraph, s: usize, t: usize) -> Result<u64> {
    Ok(brute_force_cut_distribution(g, s, t)?.min_cut)
}

/// Oracle: global minimum cut by direct enumeration of all proper
/// bipartitions (n ≤ 20).
pub fn exhaustive_global_min_cut(g: &WeightedMultigraph) -> Result<u64> {
    let n = g.n();
    if n < 2 {
        return Err(Error::TooFewVertices { n });
    }
    if n > 20 {
        return Err(Error::EnumerationGuard {
            what: "vertex count",
            got: n,
            limit: 20,
        });
    }
    let mut best = u64::MAX;
    // Fix vertex n−1 outside X to enumerate each bipartition once.
    for bits in 1u32..(1u32 << (n - 1)) {
        let side: Vec<bool> = (0..n).map(|v| v < n - 1 && bits >> v & 1 == 1).collect();
        let w = cut_weight(g, &side)?;
        best = best.min(w);
    }
    Ok(best)
}

/// Exact ensemble expectations obtained by full enumeration — the ground
/// truth the closed-form expectation formulas are tested against.
///
/// All quantities are averaged over every stub matching of the canonical
/// degree sequence (uniformly), every i.i.d. weight assignment (by exact
/// mass), and every source/sink pair (uniformly), as exact rationals.
#[derive(Clone, Debug)]
pub struct EnsembleExpectations {
    /// (u, v, w) → E[A(u,v,w)], the expected number of s-t cut vectors of
    /// vertex-side weight u with cut-set-vector weight v and cut weight w.
    pub cut_counts: BTreeMap<(usize, usize, u64), BigRational>,
    /// w → E[B(w)], the expected number of distinct s-t cut-sets of weight w.
    pub cutset_counts: BTreeMap<u64, BigRational>,
    /// (δ, Pr[λ ≥ δ]) for δ = 1..=delta_max — the exact accumulate
    /// distribution of the minimum s-t cut weight.
    pub tail: Vec<(u32, BigRational)>,
}

/// Enumerates the whole ensemble of a small degree distribution.
///
/// The matching enumeration is guarded at 14 stubs; the weight-assignment
/// space (needed only for the min-cut tail — cut-vector and cut-set counts
/// fold the assignment sum into integer polynomial coefficients) is guarded
/// at 200 000 assignments.
pub fn exhaustive_ensemble_expectations(
    dd: &DegreeDistribution,
    mu: &WeightDistribution,
    delta_max: u32,
) -> Result<EnsembleExpectations> {
    let n = dd.n();
    let m = dd.num_edges();
    let seq = dd.degree_sequence();
    let matchings = enumerate_matchings(&seq)?;
    let atoms = mu.atoms();
    let denom = mu.common_denominator();
    let q = mu.q() as usize;
    let num_assignments = (atoms.len() as u128).pow(m as u32);
    if num_assignments > 200_000 {
        return Err(Error::EnumerationGuard {
            what: "weight assignments",
            got: num_assignments as usize,
            limit: 200_000,
        });
    }
    // Numerator polynomials of f(x)^v over the common denominator D:
    // wpoly[v][w] = D^v · [x^w] f(x)^v, an integer.
    let mut wpoly: Vec<Vec<BigUint>> = vec![vec![BigUint::one()]];
    for v in 1..=m {
        let prev = &wpoly[v - 1];
        let mut next = vec![BigUint::zero(); v * q + 1];
        for (w0, c) in prev.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (aw, anum) in atoms {
                next[w0 + *aw as usize] += c * anum;
            }
        }
        wpoly.push(next);
    }
    let mut dpow = vec![BigUint::one()];
    for k in 1..=m {
        dpow.push(&dpow[k - 1] * denom);
    }
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|s| (s + 1..n).map(move |t| (s, t)))
        .collect();

    // Pass 1 — pure counting over (matching, pair, bipartition):
    //   count_uv[u][v] = #(cut vectors with vertex weight u, cut-set size v)
    //   count_bv[v]    = #(distinct cut-sets of size v)
    // The weight dimension is restored afterwards through wpoly: a cut-set
    // of v edges has weight w with assignment mass wpoly[v][w]·D^{m−v}/D^m.
    let mut count_uv = vec![vec![0u64; m + 1]; n + 1];
    let mut count_bv = vec![0u64; m + 1];
    // Per-matching data reused by the min-cut pass.
    struct TailData {
        distinct: Vec<u16>,
        pair_idx: Vec<Vec<u8>>,
    }
    let mut tail_data = Vec::with_capacity(matchings.len());
    for matching in &matchings {
        let edges = matching_to_edges(&seq, matching);
        let mask_cut: Vec<u16> = (0..1usize << n)
            .map(|mask| {
                let mut cm = 0u16;
                for (i, &(a, b)) in edges.iter().enumerate() {
                    if (mask >> a ^ mask >> b) & 1 == 1 {
                        cm |= 1 << i;
                    }
                }
                cm
            })
            .collect();
        let mut distinct: Vec<u16> = Vec::new();
        let mut pair_idx: Vec<Vec<u8>> = Vec::with_capacity(pairs.len());
        for &(s, t) in &pairs {
            let mut seen: Vec<u16> = Vec::new();
            for (mask, &cm) in mask_cut.iter().enumerate() {
                if (mask >> s ^ mask >> t) & 1 == 0 {
                    continue;
                }
                let u = mask.count_ones() as usize;
                count_uv[u][cm.count_ones() as usize] += 1;
                if !seen.contains(&cm) {
                    seen.push(cm);
                }
            }
            let mut idx = Vec::with_capacity(seen.len());
            for cm in seen {
                count_bv[cm.count_ones() as usize] += 1;
                let pos = match distinct.iter().position(|&d| d == cm) {
                    Some(p) => p,
                    None => {
                        distinct.push(cm);
                        distinct.len() - 1
                    }
                };
                idx.push(pos as u8);
            }
            pair_idx.push(idx);
        }
        tail_data.push(TailData { distinct, pair_idx });
    }

    // Pass 2 — exact min-cut tail, enumerating weight assignments since the
    // minimum couples edge weights across cut-sets.
    let dmax = delta_max as usize;
    let mut hist: Vec<BigUint> = vec![BigUint::zero(); dmax + 1];
    let mut digits = vec![0usize; m];
    let mut weights = vec![0u64; m];
    let mut cut_vals: Vec<u64> = Vec::new();
    loop {
        let mut wnum = BigUint::one();
        for (i, &d) in digits.iter().enumerate() {
            weights[i] = atoms[d].0 as u64;
            wnum *= &atoms[d].1;
        }
        for td in &tail_data {
            cut_vals.clear();
            cut_vals.extend(td.distinct.iter().map(|&cm| {
                let mut w = 0u64;
                let mut bits = cm;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    w += weights[i];
                    bits &= bits - 1;
                }
                w
            }));
            for idx in &td.pair_idx {
                let lambda = idx
                    .iter()
                    .map(|&i| cut_vals[i as usize])
                    .min()
                    .expect("every pair has at least one bipartition");
                hist[(lambda as usize).min(dmax)] += &wnum;
            }
        }
        // Odometer over assignments.
        let mut pos = 0;
        loop {
            if pos == m {
                break;
            }
            digits[pos] += 1;
            if digits[pos] < atoms.len() {
                break;
            }
            digits[pos] = 0;
            pos += 1;
        }
        if pos == m {
            break;
        }
    }

    // Normalize: total mass = #matchings · #pairs · D^m.
    let total = BigUint::from(matchings.len()) * BigUint::from(pairs.len()) * &dpow[m];
    let to_mean = |num: BigUint| BigRational::new(num.into(), total.clone().into());
    let mut cut_counts = BTreeMap::new();
    for (u, row) in count_uv.iter().enumerate() {
        for (v, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (w, coef) in wpoly[v].iter().enumerate() {
                if coef.is_zero() {
                    continue;
                }
                cut_counts.insert(
                    (u, v, w as u64),
                    to_mean(BigUint::from(c) * coef * &dpow[m - v]),
                );
            }
        }
    }
    let mut cutset_num: BTreeMap<u64, BigUint> = BTreeMap::new();
    for (v, &c) in count_bv.iter().enumerate() {
        if c == 0 {
            continue;
        }
        for (w, coef) in wpoly[v].iter().enumerate() {
            if coef.is_zero() {
                continue;
            }
            *cutset_num.entry(w as u64).or_insert_with(BigUint::zero) +=
                BigUint::from(c) * coef * &dpow[m - v];
        }
    }
    let cutset_counts = cutset_num
        .into_iter()
        .map(|(w, num)| (w, to_mean(num)))
        .collect();
    let mut tail = Vec::with_capacity(dmax);
    let mut geq = BigUint::zero();
    let mut suffix: Vec<BigUint> = Vec::with_capacity(dmax);
    for d in (1..=dmax).rev() {
        geq += std::mem::take(&mut hist[d]);
        suffix.push(geq.clone());
    }
    for (i, num) in suffix.into_iter().rev().enumerate() {
        tail.push((i as u32 + 1, to_mean(num)));
    }
    Ok(EnsembleExpectations {
        cut_counts,
        cutset_counts,
        tail,
    })
}

/// Dinic max-flow on a bidirected arc list. Arc 2k and its reverse 2k+1 are
/// stored adjacently, so `id ^ 1` is the reverse arc.
struct Dinic {
    n: usize,
    adj: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u64>,
}

impl Dinic {
    fn new(n: usize) -> Self {
        Dinic {
            n,
            adj: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
        }
    }

    /// An undirected edge of capacity c: both arcs carry c.
    fn add_undirected(&mut self, a: usize, b: usize, c: u64) {
        let id = self.to.len();
        self.to.push(b);
        self.cap.push(c);
        self.to.push(a);
        self.cap.push(c);
        self.adj[a].push(id);
        self.adj[b].push(id + 1);
    }

    fn bfs(&self, s: usize, t: usize, level: &mut [u32]) -> bool {
        level.fill(u32::MAX);
        level[s] = 0;
        let mut queue = std::collections::VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            for &id in &self.adj[v] {
                let u = self.to[id];
                if self.cap[id] > 0 && level[u] == u32::MAX {
                    level[u] = level[v] + 1;
                    queue.push_back(u);
                }
            }
        }
        level[t] != u32::MAX
    }

    fn dfs(&mut self, v: usize, t: usize, pushed: u64, level: &[u32], iter: &mut [usize]) -> u64 {
        if v == t {
            return pushed;
        }
        while iter[v] < self.adj[v].len() {
            let id = self.adj[v][iter[v]];
            let u = self.to[id];
            if self.cap[id] > 0 && level[u] == level[v] + 1 {
                let d = self.dfs(u, t, pushed.min(self.cap[id]), level, iter);
                if d > 0 {
                    self.cap[id] -= d;
                    self.cap[id ^ 1] += d;
                    return d;
                }
            }
            iter[v] += 1;
        }
        0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> u64 {
        let mut flow = 0;
        let mut level = vec![u32::MAX; self.n];
        while self.bfs(s, t, &mut level) {
            let mut iter = vec![0usize; self.n];
            loop {
                let pushed = self.dfs(s, t, u64::MAX, &level, &mut iter);
                if pushed == 0 {
                    break;
                }
                flow += pushed;
            }
        }
        flow
    }
}
