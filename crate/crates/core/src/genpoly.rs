//! Exact arbitrary-precision combinatorial arithmetic.
//!
//! Everything downstream of this module (expected cut counts, tail bounds)
//! is assembled from big-integer binomials, truncated polynomial powers and
//! the bivariate coefficient table built here. All arithmetic is exact; the
//! only lossy step in the whole pipeline is the final decimal rendering,
//! which carries at least 12 significant digits.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::ensemble::{DegreeDistribution, WeightDistribution};
use crate::{Error, Result};

/// Binomial coefficient C(a, b) as a big integer.
///
/// Total function: out-of-range `b` (negative or above `a`) yields 0, which
/// is the convention every summation in this crate relies on.
pub fn binomial(a: u64, b: i64) -> BigUint {
    if b < 0 || b as u64 > a {
        return BigUint::zero();
    }
    let b = (b as u64).min(a - b as u64);
    let mut r = BigUint::one();
    for i in 0..b {
        r = r * BigUint::from(a - i) / BigUint::from(i + 1);
    }
    r
}

/// C(a, numer/2) with the half-integer convention: zero whenever `numer` is
/// negative or odd. Summations over cut-set sizes step through indices of
/// both parities and rely on the odd ones vanishing.
pub fn binomial_half(a: u64, numer: i64) -> BigUint {
    if numer < 0 || numer % 2 != 0 {
        return BigUint::zero();
    }
    binomial(a, numer / 2)
}

/// Precomputed factorial table `0! ..= max!`.
///
/// Used to turn sums of binomial ratios Σ x_h / C(2m, h) into a single
/// integer fraction Σ x_h·h!·(2m−h)! / (2m)!, avoiding a rational
/// normalization per term.
pub struct Factorials {
    table: Vec<BigUint>,
}

impl Factorials {
    pub fn new(max: usize) -> Self {
        let mut table = Vec::with_capacity(max + 1);
        table.push(BigUint::one());
        for i in 1..=max {
            let next = &table[i - 1] * BigUint::from(i);
            table.push(next);
        }
        Factorials { table }
    }

    pub fn get(&self, i: usize) -> &BigUint {
        &self.table[i]
    }

    pub fn max(&self) -> usize {
        self.table.len() - 1
    }
}

/// Sparse univariate polynomial with exact rational coefficients.
///
/// Invariants: no stored zero coefficients; exponents are non-negative by
/// construction (usize keys).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BigRationalPoly {
    coeffs: BTreeMap<usize, BigRational>,
}

impl BigRationalPoly {
    pub fn zero() -> Self {
        BigRationalPoly {
            coeffs: BTreeMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::monomial(0, BigRational::one())
    }

    pub fn monomial(exp: usize, coeff: BigRational) -> Self {
        let mut coeffs = BTreeMap::new();
        if !coeff.is_zero() {
            coeffs.insert(exp, coeff);
        }
        BigRationalPoly { coeffs }
    }

    /// Builds a polynomial from (exponent, coefficient) pairs, summing
    /// duplicates and pruning zeros.
    pub fn from_coeffs(pairs: impl IntoIterator<Item = (usize, BigRational)>) -> Self {
        let mut coeffs: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (e, c) in pairs {
            let entry = coeffs.entry(e).or_insert_with(BigRational::zero);
            *entry += c;
        }
        coeffs.retain(|_, c| !c.is_zero());
        BigRationalPoly { coeffs }
    }

    /// Coefficient of x^exp (zero if absent).
    pub fn coeff(&self, exp: usize) -> BigRational {
        self.coeffs.get(&exp).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn coeffs(&self) -> &BTreeMap<usize, BigRational> {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.keys().next_back().copied()
    }

    /// Product, discarding terms above `max_deg` when given.
    pub fn mul_trunc(&self, other: &Self, max_deg: Option<usize>) -> Self {
        let mut acc: BTreeMap<usize, BigRational> = BTreeMap::new();
        for (&ea, ca) in &self.coeffs {
            for (&eb, cb) in &other.coeffs {
                let e = ea + eb;
                if max_deg.is_some_and(|d| e > d) {
                    continue;
                }
                let entry = acc.entry(e).or_insert_with(BigRational::zero);
                *entry += ca * cb;
            }
        }
        acc.retain(|_, c| !c.is_zero());
        BigRationalPoly { coeffs: acc }
    }

    /// k-th power by binary exponentiation, truncated at `max_deg`.
    pub fn pow_trunc(&self, k: usize, max_deg: Option<usize>) -> Self {
        let mut result = Self::one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_trunc(&base, max_deg);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_trunc(&base, max_deg);
            }
        }
        result
    }

    /// Value at x = 1, i.e. the sum of all coefficients.
    pub fn sum_coeffs(&self) -> BigRational {
        let mut s = BigRational::zero();
        for c in self.coeffs.values() {
            s += c;
        }
        s
    }
}

/// Coefficient of x^w in f(x)^v, where f is the weight generator
/// Σ_i μ(i)·x^i of `mu`. Exact rational; zero outside the support window
/// v·(min weight) ≤ w ≤ v·q, and 1 at (v, w) = (0, 0).
pub fn weight_coef(mu: &WeightDistribution, v: usize, w: usize) -> BigRational {
    mu.generator().pow_trunc(v, Some(w)).coeff(w)
}

/// Dense table of the coefficients T[h][u] = [x^h y^u] ∏_i (1 + x^i y)^{k_i},
/// where k_i is the number of vertices of degree i. Row index h runs over
/// total degrees 0..=2m, column index u over vertex-subset sizes 0..=n.
///
/// T[h][u] counts the u-element vertex subsets of total degree h; the table
/// evaluates to 2^n at (x, y) = (1, 1) and is symmetric under complementing
/// the subset: T[h][u] = T[2m−h][n−u].
pub struct BivariateCoeffTable {
    n: usize,
    m: usize,
    t: Vec<Vec<BigUint>>,
}

impl BivariateCoeffTable {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Edge count m; the x-degree of the table is 2m.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn max_h(&self) -> usize {
        2 * self.m
    }

    /// T[h][u]; panics on out-of-range indices.
    pub fn get(&self, h: usize, u: usize) -> &BigUint {
        &self.t[h][u]
    }

    /// Σ_{h,u} T[h][u], which must equal 2^n.
    pub fn total(&self) -> BigUint {
        let mut s = BigUint::zero();
        for row in &self.t {
            for x in row {
                s += x;
            }
        }
        s
    }
}

/// Builds the full coefficient table for a degree distribution.
///
/// Each factor (1 + x^d y)^k is expanded in closed form (binomial theorem)
/// and the per-degree-class expansions are multiplied together, tracking the
/// growing degree bounds so early passes touch only the populated corner.
pub fn degree_product_table(dd: &DegreeDistribution) -> BivariateCoeffTable {
    let n = dd.n();
    let m = dd.num_edges();
    let (hmax, umax) = (2 * m, n);
    let mut t = vec![vec![BigUint::zero(); umax + 1]; hmax + 1];
    t[0][0] = BigUint::one();
    let (mut cur_h, mut cur_u) = (0usize, 0usize);
    for &(d, k) in dd.degree_counts() {
        let class: Vec<(usize, usize, BigUint)> = (0..=k)
            .map(|j| (d * j, j, binomial(k as u64, j as i64)))
            .collect();
        let mut nt = vec![vec![BigUint::zero(); umax + 1]; hmax + 1];
        for (h, row) in t.iter().enumerate().take(cur_h + 1) {
            for (u, x) in row.iter().enumerate().take(cur_u + 1) {
                if x.is_zero() {
                    continue;
                }
                for (dh, du, c) in &class {
                    nt[h + dh][u + du] += x * c;
                }
            }
        }
        t = nt;
        cur_h += d * k;
        cur_u += k;
    }
    debug_assert_eq!(cur_h, hmax);
    debug_assert_eq!(cur_u, umax);
    BivariateCoeffTable { n, m, t }
}

fn pow10(e: u32) -> BigUint {
    BigUint::from(10u32).pow(e)
}

/// Renders an exact rational as a decimal string with exactly `sig`
/// significant digits (round-half-up), in plain notation when the decimal
/// exponent lies in [−4, sig) and scientific notation (`d.ddd…eE`)
/// otherwise. Exact zero renders as "0". Deterministic, hence byte-stable.
pub fn decimal_string(r: &BigRational, sig: usize) -> String {
    assert!(sig >= 1, "need at least one significant digit");
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let num = r.numer().abs().to_biguint().expect("abs is non-negative");
    let den = r.denom().abs().to_biguint().expect("abs is non-negative");
    // Decimal exponent e with 10^e ≤ num/den < 10^{e+1}.
    let cmp_pow = |e: i64| -> std::cmp::Ordering {
        if e >= 0 {
            num.cmp(&(&den * pow10(e as u32)))
        } else {
            (&num * pow10((-e) as u32)).cmp(&den)
        }
    };
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    while cmp_pow(e) == std::cmp::Ordering::Less {
        e -= 1;
    }
    while cmp_pow(e + 1) != std::cmp::Ordering::Less {
        e += 1;
    }
    // digits = round-half-up of (num/den)·10^{sig−1−e}, a sig-digit integer.
    let shift = sig as i64 - 1 - e;
    let (sn, sd) = if shift >= 0 {
        (&num * pow10(shift as u32), den.clone())
    } else {
        (num.clone(), &den * pow10((-shift) as u32))
    };
    let two = BigUint::from(2u32);
    let mut digits = (&two * sn + &sd) / (two * sd);
    if digits == pow10(sig as u32) {
        // 999…9 rounded up to the next power of ten.
        digits = pow10(sig as u32 - 1);
        e += 1;
    }
    let ds = digits.to_string();
    debug_assert_eq!(ds.len(), sig);
    let body = if e >= 0 && (e as usize) < sig {
        let k = e as usize + 1;
        if k == sig {
            ds
        } else {
            format!("{}.{}", &ds[..k], &ds[k..])
        }
    } else if (-4..0).contains(&e) {
        format!("0.{}{}", "0".repeat((-e - 1) as usize), ds)
    } else if sig == 1 {
        format!("{ds}e{e}")
    } else {
        format!("{}.{}e{}", &ds[..1], &ds[1..], e)
    };
    if neg {
        format!("-{body}")
    } else {
        body
    }
}

/// Parses an exact rational from "a" or "a/b" (optional sign on either
/// part). Rejects zero denominators and anything else that is not an
/// integer pair — float syntax is deliberately not accepted, since decimal
/// literals could silently violate exactness requirements.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let malformed = || Error::MalformedRational { input: s.to_string() };
    match t.split_once('/') {
        None => {
            let num: BigInt = t.parse().map_err(|_| malformed())?;
            Ok(BigRational::from_integer(num))
        }
        Some((a, b)) => {
            let num: BigInt = a.trim().parse().map_err(|_| malformed())?;
            let den: BigInt = b.trim().parse().map_err(|_| malformed())?;
            if den.is_zero() {
                return Err(Error::ZeroDenominator {
                    input: s.to_string(),
                });
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// Canonical string form of a rational: "a" when the denominator is 1,
/// otherwise "a/b" in lowest terms. Inverse of [`parse_rational`] on its
/// output.
pub fn rational_to_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Nearest f64 to an exact rational, via a 17-significant-digit decimal
/// rendering (enough to determine the correctly rounded double).
pub fn rational_to_f64(r: &BigRational) -> f64 {
    decimal_string(r, 17).parse().expect("valid decimal literal")
}
