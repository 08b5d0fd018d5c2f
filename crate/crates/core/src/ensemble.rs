//! The random-graph ensemble: degree distributions with exact rational
//! fractions, weight measures on integer capacities, and configuration-model
//! sampling by uniform stub matching, in multigraph or rejection-to-simple
//! mode.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use crate::genpoly::{rational_to_string, BigRationalPoly};
use crate::{Error, Result};

/// Default cap on whole-matching rejection attempts in simple mode.
pub const DEFAULT_REJECTION_CAP: u64 = 1_000_000;

/// Graph sampling semantics: `Multigraph` keeps whatever the uniform stub
/// matching produces (self-loops and parallel edges included); `Simple`
/// rejection-samples whole matchings until the realization is a simple
/// graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SamplingMode {
    Simple,
    Multigraph,
}

impl fmt::Display for SamplingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SamplingMode::Simple => write!(f, "simple"),
            SamplingMode::Multigraph => write!(f, "multigraph"),
        }
    }
}

impl FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "simple" => Ok(SamplingMode::Simple),
            "multigraph" => Ok(SamplingMode::Multigraph),
            other => Err(Error::UnknownMode {
                mode: other.to_string(),
            }),
        }
    }
}

/// A degree distribution: vertex count n and exact fractions d_i of vertices
/// having degree i ≥ 1. Valid only when the fractions sum to 1, every n·d_i
/// is an integer, and the total stub count Σ i·n·d_i is even.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DegreeDistribution {
    n: usize,
    fractions: BTreeMap<usize, BigRational>,
    counts: Vec<(usize, usize)>,
}

impl DegreeDistribution {
    pub fn new(n: usize, fractions: impl IntoIterator<Item = (usize, BigRational)>) -> Result<Self> {
        let mut map: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (d, f) in fractions {
            *map.entry(d).or_insert_with(BigRational::zero) += f;
        }
        map.retain(|_, f| !f.is_zero());
        let mut sum = BigRational::zero();
        let mut counts = Vec::new();
        let mut stubs: u64 = 0;
        for (&d, f) in &map {
            if d == 0 {
                return Err(Error::ZeroDegree);
            }
            if f.is_negative() {
                return Err(Error::NegativeDegreeFraction {
                    degree: d,
                    value: rational_to_string(f),
                });
            }
            let scaled = f * BigRational::from_integer(n.into());
            if !scaled.is_integer() {
                return Err(Error::NonIntegerVertexCount {
                    degree: d,
                    value: rational_to_string(&scaled),
                });
            }
            let k = scaled
                .to_integer()
                .to_usize()
                .expect("vertex count fits usize");
            counts.push((d, k));
            stubs += (d * k) as u64;
            sum += f;
        }
        if sum != BigRational::one() {
            return Err(Error::DegreeFractionSum {
                got: rational_to_string(&sum),
            });
        }
        if stubs % 2 != 0 {
            return Err(Error::OddStubTotal { total: stubs });
        }
        Ok(DegreeDistribution {
            n,
            fractions: map,
            counts,
        })
    }

    /// The c-regular distribution d(x) = x^c on n vertices.
    pub fn regular(n: usize, c: usize) -> Result<Self> {
        Self::new(n, [(c, BigRational::one())])
    }

    /// Builds the distribution from explicit (degree, vertex-count) pairs;
    /// n is the total count.
    pub fn from_counts(counts: &[(usize, usize)]) -> Result<Self> {
        let n: usize = counts.iter().map(|&(_, k)| k).sum();
        Self::new(
            n,
            counts.iter().map(|&(d, k)| {
                (
                    d,
                    BigRational::new(k.into(), n.into()),
                )
            }),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn fractions(&self) -> &BTreeMap<usize, BigRational> {
        &self.fractions
    }

    /// (degree, number of vertices with that degree), ascending by degree.
    pub fn degree_counts(&self) -> &[(usize, usize)] {
        &self.counts
    }

    pub fn max_degree(&self) -> usize {
        self.counts.last().map_or(0, |&(d, _)| d)
    }

    /// Edge count m = (1/2) Σ_i i·n·d_i.
    pub fn num_edges(&self) -> usize {
        self.counts.iter().map(|&(d, k)| d * k).sum::<usize>() / 2
    }

    /// Canonical degree sequence: n·d_i vertices of degree i, ascending,
    /// assigned to vertex ids in order.
    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut seq = Vec::with_capacity(self.n);
        for &(d, k) in &self.counts {
            seq.extend(std::iter::repeat(d).take(k));
        }
        seq
    }

    /// The generating function d(x) = Σ d_i x^i.
    pub fn generator(&self) -> BigRationalPoly {
        BigRationalPoly::from_coeffs(self.fractions.iter().map(|(&d, f)| (d, f.clone())))
    }
}

/// Canonical degree sequence of a distribution (free-function form of
/// [`DegreeDistribution::degree_sequence`]).
pub fn degree_sequence(dd: &DegreeDistribution) -> Vec<usize> {
    dd.degree_sequence()
}

/// Edge count of a distribution (free-function form of
/// [`DegreeDistribution::num_edges`]).
pub fn num_edges(dd: &DegreeDistribution) -> usize {
    dd.num_edges()
}

/// A probability measure μ on integer edge capacities [1, q], with exact
/// rational masses summing to 1. Sampling is exact: a uniform integer below
/// the common denominator selects an atom.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightDistribution {
    q: u32,
    mass: BTreeMap<u32, BigRational>,
    /// Nonzero atoms as (weight, numerator over `denom`); numerators sum to
    /// `denom`.
    atoms: Vec<(u32, BigUint)>,
    denom: BigUint,
    denom_u64: Option<u64>,
}

impl WeightDistribution {
    pub fn new(q: u32, mass: impl IntoIterator<Item = (u32, BigRational)>) -> Result<Self> {
        let mut map: BTreeMap<u32, BigRational> = BTreeMap::new();
        for (w, p) in mass {
            *map.entry(w).or_insert_with(BigRational::zero) += p;
        }
        map.retain(|_, p| !p.is_zero());
        let mut sum = BigRational::zero();
        for (&w, p) in &map {
            if w < 1 || w > q {
                return Err(Error::WeightOutOfRange { weight: w, q });
            }
            if p.is_negative() {
                return Err(Error::NegativeWeightMass {
                    weight: w,
                    value: rational_to_string(p),
                });
            }
            sum += p;
        }
        if sum != BigRational::one() {
            return Err(Error::WeightMassSum {
                got: rational_to_string(&sum),
            });
        }
        if map.is_empty() {
            return Err(Error::EmptyWeightSupport);
        }
        let mut denom = BigUint::one();
        for p in map.values() {
            denom = denom.lcm(&p.denom().to_biguint().expect("positive denominator"));
        }
        let atoms: Vec<(u32, BigUint)> = map
            .iter()
            .map(|(&w, p)| {
                let scale = &denom / p.denom().to_biguint().expect("positive denominator");
                (w, p.numer().to_biguint().expect("non-negative mass") * scale)
            })
            .collect();
        debug_assert_eq!(
            atoms.iter().map(|(_, a)| a).sum::<BigUint>(),
            denom,
            "atom numerators must sum to the common denominator"
        );
        let denom_u64 = denom.to_u64();
        Ok(WeightDistribution {
            q,
            mass: map,
            atoms,
            denom,
            denom_u64,
        })
    }

    /// The point mass μ(w) = 1 with q = w.
    pub fn singleton(w: u32) -> Result<Self> {
        Self::new(w, [(w, BigRational::one())])
    }

    /// The unit-capacity measure q = 1, μ(1) = 1.
    pub fn unit() -> Self {
        Self::singleton(1).expect("unit measure is valid")
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn mass(&self) -> &BTreeMap<u32, BigRational> {
        &self.mass
    }

    /// Smallest weight with positive mass.
    pub fn min_weight(&self) -> u32 {
        self.atoms[0].0
    }

    /// Nonzero atoms as (weight, integer numerator over
    /// [`common_denominator`](Self::common_denominator)); numerators sum to
    /// the common denominator. Lets exhaustive oracles enumerate weight
    /// assignments with integer masses.
    pub fn atoms(&self) -> &[(u32, BigUint)] {
        &self.atoms
    }

    /// Common denominator of all masses (their least common multiple).
    pub fn common_denominator(&self) -> &BigUint {
        &self.denom
    }

    /// The generating function f(x) = Σ μ(i) x^i.
    pub fn generator(&self) -> BigRationalPoly {
        BigRationalPoly::from_coeffs(self.mass.iter().map(|(&w, p)| (w as usize, p.clone())))
    }

    /// Draws one capacity exactly according to μ. Point masses consume no
    /// randomness.
    pub fn sample(&self, rng: &mut impl Rng) -> u32 {
        if self.atoms.len() == 1 {
            return self.atoms[0].0;
        }
        if let Some(d) = self.denom_u64 {
            let mut x = rng.random_range(0..d);
            for (w, a) in &self.atoms {
                let a = a.to_u64().expect("atom below a u64 denominator");
                if x < a {
                    return *w;
                }
                x -= a;
            }
            unreachable!("atom numerators sum to the denominator");
        }
        let mut x = uniform_biguint_below(rng, &self.denom);
        for (w, a) in &self.atoms {
            if &x < a {
                return *w;
            }
            x -= a;
        }
        unreachable!("atom numerators sum to the denominator");
    }
}

/// Uniform big integer in [0, d) by top-byte masking and rejection.
fn uniform_biguint_below(rng: &mut impl Rng, d: &BigUint) -> BigUint {
    assert!(!d.is_zero(), "empty range");
    if d.is_one() {
        return BigUint::zero();
    }
    let bytes = d.to_bytes_be();
    let mask = 0xffu8 >> bytes[0].leading_zeros();
    let mut buf = vec![0u8; bytes.len()];
    loop {
        rng.fill_bytes(&mut buf);
        buf[0] &= mask;
        let x = BigUint::from_bytes_be(&buf);
        if &x < d {
            return x;
        }
    }
}

/// A labeled undirected multigraph with positive integer edge capacities.
/// Vertex ids are 0-based; self-loops and parallel edges are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedMultigraph {
    n: usize,
    edges: Vec<Edge>,
}

/// One undirected edge with its capacity.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: usize,
    pub b: usize,
    pub cap: u32,
}

impl WeightedMultigraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, u32)>) -> Result<Self> {
        let edges: Vec<Edge> = edges
            .into_iter()
            .map(|(a, b, cap)| {
                for v in [a, b] {
                    if v >= n {
                        return Err(Error::VertexOutOfRange { vertex: v, n });
                    }
                }
                if cap == 0 {
                    return Err(Error::IndexOutOfRange {
                        what: "edge capacity",
                        got: 0,
                        lo: 1,
                        hi: u32::MAX as i64,
                    });
                }
                Ok(Edge { a, b, cap })
            })
            .collect::<Result<_>>()?;
        Ok(WeightedMultigraph { n, edges })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Realized degree of each vertex; a self-loop contributes 2 to its
    /// vertex.
    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0usize; self.n];
        for e in &self.edges {
            deg[e.a] += 1;
            deg[e.b] += 1;
        }
        deg
    }

    /// True when the graph has no self-loops and no parallel edges.
    pub fn is_simple(&self) -> bool {
        let mut seen: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|e| (e.a.min(e.b), e.a.max(e.b)))
            .collect();
        seen.sort_unstable();
        seen.iter().all(|&(a, b)| a != b) && seen.windows(2).all(|w| w[0] != w[1])
    }

    pub fn total_capacity(&self) -> u64 {
        self.edges.iter().map(|e| e.cap as u64).sum()
    }
}

/// Draws a uniform perfect matching on the stubs of a degree sequence.
///
/// Stub i·th of vertex v gets a global index; the returned pairs are stub
/// index pairs (lo, hi) sorted by lo — the same canonical form
/// [`enumerate_matchings`] produces, so sampled matchings can be compared
/// against the enumeration directly.
pub fn sample_matching(seq: &[usize], rng: &mut impl Rng) -> Vec<(usize, usize)> {
    let s: usize = seq.iter().sum();
    assert!(s % 2 == 0, "total stub count must be even");
    let mut ids: Vec<usize> = (0..s).collect();
    let mut pairs = Vec::with_capacity(s / 2);
    let mut i = 0;
    while i < s {
        let j = rng.random_range(i + 1..s);
        ids.swap(i + 1, j);
        let (a, b) = (ids[i], ids[i + 1]);
        pairs.push((a.min(b), a.max(b)));
        i += 2;
    }
    pairs.sort_unstable();
    pairs
}

/// Enumerates every perfect matching on the stubs of a degree sequence, in
/// canonical form (each pair (lo, hi), pairs sorted by lo). There are
/// (2m−1)!! of them; guarded at 14 stubs (135135 matchings).
pub fn enumerate_matchings(seq: &[usize]) -> Result<Vec<Vec<(usize, usize)>>> {
    let s: usize = seq.iter().sum();
    assert!(s % 2 == 0, "total stub count must be even");
    if s > 14 {
        return Err(Error::EnumerationGuard {
            what: "stub count",
            got: s,
            limit: 14,
        });
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(s / 2);
    let mut used = vec![false; s];
    fn recurse(
        s: usize,
        used: &mut [bool],
        current: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        let Some(first) = (0..s).find(|&i| !used[i]) else {
            out.push(current.clone());
            return;
        };
        used[first] = true;
        for j in first + 1..s {
            if used[j] {
                continue;
            }
            used[j] = true;
            current.push((first, j));
            recurse(s, used, current, out);
            current.pop();
            used[j] = false;
        }
        used[first] = false;
    }
    recurse(s, &mut used, &mut current, &mut out);
    Ok(out)
}

/// Maps stub-index pairs to vertex-id edge endpoints under the canonical
/// stub layout of `seq` (vertex v owns a contiguous block of deg(v) stubs).
pub fn matching_to_edges(seq: &[usize], matching: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut owner = Vec::with_capacity(seq.iter().sum());
    for (v, &d) in seq.iter().enumerate() {
        owner.extend(std::iter::repeat(v).take(d));
    }
    matching.iter().map(|&(a, b)| (owner[a], owner[b])).collect()
}

/// Samples one graph from the ensemble: uniform stub matching, then i.i.d.
/// capacities from μ. Simple mode rejects whole matchings (up to
/// [`DEFAULT_REJECTION_CAP`] attempts) until the realization has no
/// self-loops and no parallel edges.
pub fn sample_graph(
    seq: &[usize],
    mu: &WeightDistribution,
    rng: &mut impl Rng,
    mode: SamplingMode,
) -> Result<WeightedMultigraph> {
    sample_graph_with_cap(seq, mu, rng, mode, DEFAULT_REJECTION_CAP)
}

/// [`sample_graph`] with an explicit rejection cap for simple mode.
pub fn sample_graph_with_cap(
    seq: &[usize],
    mu: &WeightDistribution,
    rng: &mut impl Rng,
    mode: SamplingMode,
    rejection_cap: u64,
) -> Result<WeightedMultigraph> {
    let n = seq.len();
    let mut attempts = 0u64;
    let endpoints = loop {
        attempts += 1;
        if attempts > rejection_cap {
            return Err(Error::RejectionCapExceeded { cap: rejection_cap });
        }
        let matching = sample_matching(seq, rng);
        let endpoints = matching_to_edges(seq, &matching);
        match mode {
            SamplingMode::Multigraph => break endpoints,
            SamplingMode::Simple => {
                let mut norm: Vec<(usize, usize)> = endpoints
                    .iter()
                    .map(|&(a, b)| (a.min(b), a.max(b)))
                    .collect();
                norm.sort_unstable();
                let simple = norm.iter().all(|&(a, b)| a != b)
                    && norm.windows(2).all(|w| w[0] != w[1]);
                if simple {
                    break endpoints;
                }
            }
        }
    };
    let edges = endpoints
        .into_iter()
        .map(|(a, b)| Edge {
            a,
            b,
            cap: mu.sample(rng),
        })
        .collect();
    Ok(WeightedMultigraph { n, edges })
}
