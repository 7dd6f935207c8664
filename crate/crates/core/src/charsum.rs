//! Exact character sums over boolean edge variables.
//!
//! A copy polynomial has one monomial per pattern copy in a host, living in
//! Z_q with variables indexed by host edges. Its character sum under the
//! product Bernoulli(p) measure is evaluated exhaustively over all 2^m
//! assignments, which caps the variable count at 24. A system of disjoint
//! top-degree blocks with the right overlap structure forces the sum to be
//! exponentially small in the number of blocks; the checker here verifies
//! those structural conditions and reports each one separately.

use num::complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphFamily, HostGraph};
use crate::packing::{enumerate_copies, greedy_disjoint_packing, PackingError, DEFAULT_COPY_CAP};

/// Exhaustive evaluation budget: at most 2^24 assignments.
pub const MAX_VARIABLES: usize = 24;

/// Cell budget for distributions handed to the TV bound.
pub const MAX_CELLS: usize = 1 << 20;

#[derive(Debug, Error, PartialEq)]
pub enum CharSumError {
    #[error("modulus must be at least 2, got {0}")]
    InvalidModulus(u32),
    #[error("{0} variables exceed the exhaustive budget of {MAX_VARIABLES}")]
    TooManyVariables(usize),
    #[error("coefficient {0} outside [1, q)")]
    CoefficientOutOfRange(u32),
    #[error("monomial {0:#x} repeated")]
    DuplicateMonomial(u32),
    #[error("monomial {0:#x} uses variables beyond m={1}")]
    MonomialOutOfRange(u32, usize),
    #[error("coefficient vector has length {got}, family has {expected} members")]
    CoefficientLengthMismatch { expected: usize, got: usize },
    #[error("coefficient vector is zero mod q")]
    AllZeroCoefficients,
    #[error("block {0} is not a monomial of the polynomial")]
    BlockNotMonomial(usize),
    #[error("{0} cells exceed the budget of {MAX_CELLS}")]
    CellBudgetExceeded(usize),
    #[error("probability weight must lie in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error(transparent)]
    Packing(#[from] PackingError),
}

/// A polynomial over Z_q in boolean variables, stored as (coefficient,
/// monomial-bitmask) terms with distinct monomials and nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "CharPolynomialWire", try_from = "CharPolynomialWire")]
pub struct CharPolynomial {
    q: u32,
    variables: usize,
    /// Sorted by monomial mask.
    terms: Vec<(u32, u32)>,
}

/// JSON shape: `{q, m, terms: [[coef, [var indices]], ...]}`.
#[derive(Clone, Serialize, Deserialize)]
struct CharPolynomialWire {
    q: u32,
    m: usize,
    terms: Vec<(u32, Vec<u32>)>,
}

impl From<CharPolynomial> for CharPolynomialWire {
    fn from(p: CharPolynomial) -> Self {
        CharPolynomialWire {
            q: p.q,
            m: p.variables,
            terms: p
                .terms
                .iter()
                .map(|&(c, mask)| (c, (0..32).filter(|i| mask >> i & 1 != 0).collect()))
                .collect(),
        }
    }
}

impl TryFrom<CharPolynomialWire> for CharPolynomial {
    type Error = CharSumError;
    fn try_from(w: CharPolynomialWire) -> Result<Self, Self::Error> {
        let terms = w
            .terms
            .into_iter()
            .map(|(c, vars)| (c, vars.iter().map(|&i| 1u32 << i).sum()))
            .collect();
        CharPolynomial::new(w.q, w.m, terms)
    }
}

impl CharPolynomial {
    pub fn new(q: u32, variables: usize, mut terms: Vec<(u32, u32)>) -> Result<Self, CharSumError> {
        if q < 2 {
            return Err(CharSumError::InvalidModulus(q));
        }
        if variables > MAX_VARIABLES {
            return Err(CharSumError::TooManyVariables(variables));
        }
        terms.sort_unstable_by_key(|&(_, mask)| mask);
        for window in terms.windows(2) {
            if window[0].1 == window[1].1 {
                return Err(CharSumError::DuplicateMonomial(window[0].1));
            }
        }
        for &(c, mask) in &terms {
            if c == 0 || c >= q {
                return Err(CharSumError::CoefficientOutOfRange(c));
            }
            if variables < 32 && mask >> variables != 0 {
                return Err(CharSumError::MonomialOutOfRange(mask, variables));
            }
        }
        Ok(CharPolynomial {
            q,
            variables,
            terms,
        })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn variable_count(&self) -> usize {
        self.variables
    }

    pub fn terms(&self) -> &[(u32, u32)] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest monomial size (0 for the zero polynomial).
    pub fn max_monomial_size(&self) -> usize {
        self.terms
            .iter()
            .map(|&(_, mask)| mask.count_ones() as usize)
            .max()
            .unwrap_or(0)
    }

    fn coefficient_of(&self, mask: u32) -> Option<u32> {
        self.terms
            .binary_search_by_key(&mask, |&(_, m)| m)
            .ok()
            .map(|i| self.terms[i].0)
    }

    /// Evaluates the polynomial mod q at the assignment bitmask.
    pub fn evaluate(&self, assignment: u32) -> u32 {
        let mut acc = 0u64;
        for &(c, mask) in &self.terms {
            if assignment & mask == mask {
                acc += c as u64;
            }
        }
        (acc % self.q as u64) as u32
    }
}

/// The copy polynomial of a weighted family in a host, plus the variable
/// bookkeeping needed to interpret its monomials.
#[derive(Clone, Debug)]
pub struct CopyPolynomial {
    pub polynomial: CharPolynomial,
    /// `edge_pairs[i]` is the host edge behind variable `i`.
    pub edge_pairs: Vec<(usize, usize)>,
    /// Copy monomials per family member (empty where the coefficient is 0).
    pub member_monomials: Vec<Vec<u32>>,
}

/// Builds the polynomial whose value at the indicator assignment of a
/// subgraph is the weighted sum of the family's copy counts mod q: one
/// monomial per copy of each member with a nonzero weight, merging
/// coefficients when distinct members produce the same edge set.
pub fn build_polynomial(
    gprime: &HostGraph,
    family: &GraphFamily,
    c: &[u32],
    q: u32,
) -> Result<CopyPolynomial, CharSumError> {
    if q < 2 {
        return Err(CharSumError::InvalidModulus(q));
    }
    if c.len() != family.len() {
        return Err(CharSumError::CoefficientLengthMismatch {
            expected: family.len(),
            got: c.len(),
        });
    }
    let reduced: Vec<u32> = c.iter().map(|&ci| ci % q).collect();
    if reduced.iter().all(|&ci| ci == 0) {
        return Err(CharSumError::AllZeroCoefficients);
    }
    let m = gprime.edge_count();
    if m > MAX_VARIABLES {
        return Err(CharSumError::TooManyVariables(m));
    }
    let edge_pairs = gprime.edge_pairs();
    let index_of = |edge: (usize, usize)| -> u32 {
        edge_pairs
            .binary_search(&edge)
            .expect("copy edge is a host edge") as u32
    };

    let mut coeff_by_mask: std::collections::BTreeMap<u32, u64> = std::collections::BTreeMap::new();
    let mut member_monomials = vec![Vec::new(); family.len()];
    for (i, pattern) in family.iter().enumerate() {
        if reduced[i] == 0 {
            continue;
        }
        let list = enumerate_copies(gprime, pattern, DEFAULT_COPY_CAP)?;
        if list.truncated {
            return Err(CharSumError::Packing(PackingError::TruncatedInput));
        }
        for copy in &list.copies {
            let mask: u32 = copy.edges.iter().map(|&e| 1u32 << index_of(e)).sum();
            *coeff_by_mask.entry(mask).or_insert(0) += reduced[i] as u64;
            member_monomials[i].push(mask);
        }
    }
    let terms: Vec<(u32, u32)> = coeff_by_mask
        .into_iter()
        .filter_map(|(mask, total)| {
            let coeff = (total % q as u64) as u32;
            (coeff != 0).then_some((coeff, mask))
        })
        .collect();
    Ok(CopyPolynomial {
        polynomial: CharPolynomial::new(q, m, terms)?,
        edge_pairs,
        member_monomials,
    })
}

/// A candidate system of blocks for the structural conditions: monomials
/// intended to be top-degree, nonzero, pairwise disjoint, and overlap-free
/// from the outside. Carried unvalidated; [`verify_disjoint_system`] is the
/// validator.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DisjointSystem {
    /// Variable bitmasks of the blocks.
    pub blocks: Vec<u32>,
    /// Intended common block size.
    pub d: usize,
}

impl DisjointSystem {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }
}

/// Greedy system for a copy polynomial: vertex-disjoint copies of the member
/// with the most edges among those with nonzero weight. Vertex-disjoint
/// copies have disjoint edge sets, and connectivity of the members keeps
/// every outside monomial's overlap below the block size.
pub fn greedy_block_system(
    gprime: &HostGraph,
    family: &GraphFamily,
    c: &[u32],
    q: u32,
) -> Result<DisjointSystem, CharSumError> {
    if c.len() != family.len() {
        return Err(CharSumError::CoefficientLengthMismatch {
            expected: family.len(),
            got: c.len(),
        });
    }
    let heaviest = (0..family.len())
        .filter(|&i| !c[i].is_multiple_of(q))
        .max_by_key(|&i| family.member(i).edge_count())
        .ok_or(CharSumError::AllZeroCoefficients)?;
    let pattern = family.member(heaviest);
    let edge_pairs = gprime.edge_pairs();
    let list = enumerate_copies(gprime, pattern, DEFAULT_COPY_CAP)?;
    let blocks = greedy_disjoint_packing(&list)
        .iter()
        .map(|copy| {
            copy.edges
                .iter()
                .map(|e| 1u32 << edge_pairs.binary_search(e).expect("host edge") as u32)
                .sum()
        })
        .collect();
    Ok(DisjointSystem {
        blocks,
        d: pattern.edge_count(),
    })
}

/// Outcome of the structural check, one flag per condition.
#[derive(Clone, Debug, Serialize)]
pub struct SystemCheck {
    /// Every block has size equal to the polynomial's maximum monomial size.
    pub block_sizes_ok: bool,
    /// Every block carries a nonzero coefficient.
    pub coefficients_ok: bool,
    /// Blocks are pairwise disjoint as variable sets.
    pub pairwise_disjoint: bool,
    /// Every non-block monomial meets the union of blocks in fewer than
    /// max-size variables.
    pub outside_overlap_ok: bool,
    /// Human-readable descriptions of each violation found.
    pub failures: Vec<String>,
}

impl SystemCheck {
    pub fn holds(&self) -> bool {
        self.block_sizes_ok
            && self.coefficients_ok
            && self.pairwise_disjoint
            && self.outside_overlap_ok
    }
}

/// Checks the four structural conditions of `system` against `poly`. Blocks
/// must be monomials of the polynomial; every condition is evaluated even
/// after one fails, so the report is complete.
pub fn verify_disjoint_system(
    poly: &CharPolynomial,
    system: &DisjointSystem,
) -> Result<SystemCheck, CharSumError> {
    for (i, &block) in system.blocks.iter().enumerate() {
        if poly.coefficient_of(block).is_none() {
            return Err(CharSumError::BlockNotMonomial(i));
        }
    }
    let d = poly.max_monomial_size();
    let mut failures = Vec::new();

    let mut block_sizes_ok = true;
    for (i, &block) in system.blocks.iter().enumerate() {
        let size = block.count_ones() as usize;
        if size != d {
            block_sizes_ok = false;
            failures.push(format!("block {i} has size {size}, max monomial size is {d}"));
        }
    }

    // Nonzero coefficients hold by the polynomial's own invariant; recheck.
    let coefficients_ok = system
        .blocks
        .iter()
        .all(|&b| poly.coefficient_of(b).is_some_and(|c| c % poly.q() != 0));

    let mut pairwise_disjoint = true;
    for i in 0..system.blocks.len() {
        for j in i + 1..system.blocks.len() {
            if system.blocks[i] & system.blocks[j] != 0 {
                pairwise_disjoint = false;
                failures.push(format!("blocks {i} and {j} share a variable"));
            }
        }
    }

    let union: u32 = system.blocks.iter().fold(0, |acc, &b| acc | b);
    let mut outside_overlap_ok = true;
    for &(_, mask) in poly.terms() {
        if system.blocks.contains(&mask) {
            continue;
        }
        let overlap = (mask & union).count_ones() as usize;
        if overlap >= d && d > 0 {
            outside_overlap_ok = false;
            failures.push(format!(
                "monomial {mask:#x} meets the block union in {overlap} >= {d} variables"
            ));
        }
    }

    Ok(SystemCheck {
        block_sizes_ok,
        coefficients_ok,
        pairwise_disjoint,
        outside_overlap_ok,
        failures,
    })
}

/// Compensated (Kahan) accumulator for complex sums.
#[derive(Clone, Copy, Debug, Default)]
struct KahanComplex {
    sum_re: f64,
    sum_im: f64,
    c_re: f64,
    c_im: f64,
}

impl KahanComplex {
    #[inline]
    fn add(&mut self, re: f64, im: f64) {
        let y = re - self.c_re;
        let t = self.sum_re + y;
        self.c_re = (t - self.sum_re) - y;
        self.sum_re = t;
        let y = im - self.c_im;
        let t = self.sum_im + y;
        self.c_im = (t - self.sum_im) - y;
        self.sum_im = t;
    }

    fn value(&self) -> Complex64 {
        Complex64::new(self.sum_re, self.sum_im)
    }
}

/// The exact character sum of a polynomial under independent Bernoulli(p)
/// variables.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct CharSumValue {
    pub re: f64,
    pub im: f64,
    pub modulus: f64,
}

/// Sums `p^|z| (1-p)^(m-|z|) * omega^(Q(z))` over all 2^m assignments `z`,
/// with `omega = exp(2 pi i / q)` the canonical primitive root. Double
/// precision with compensated accumulation; with m <= 24 the worst-case
/// accumulated error stays below 1e-8 and is far smaller in practice.
pub fn exact_char_sum(poly: &CharPolynomial, p: f64) -> Result<CharSumValue, CharSumError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(CharSumError::InvalidProbability(p));
    }
    let m = poly.variable_count();
    let q = poly.q();
    // Roots of unity table.
    let roots: Vec<Complex64> = (0..q)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / q as f64))
        .collect();
    // Weight by popcount: p^k (1-p)^(m-k).
    let mut weights = vec![0.0f64; m + 1];
    for (k, w) in weights.iter_mut().enumerate() {
        *w = p.powi(k as i32) * (1.0 - p).powi((m - k) as i32);
    }
    let mut acc = KahanComplex::default();
    for z in 0u32..(1u32 << m) {
        let weight = weights[z.count_ones() as usize];
        if weight == 0.0 {
            continue;
        }
        let root = roots[poly.evaluate(z) as usize];
        acc.add(weight * root.re, weight * root.im);
    }
    let value = acc.value();
    Ok(CharSumValue {
        re: value.re,
        im: value.im,
        modulus: value.norm(),
    })
}

/// The TV-versus-characters report for a distribution on Z_q^k.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct XorBound {
    /// Largest character magnitude over nonzero weight vectors.
    pub epsilon: f64,
    /// `q^k * epsilon`.
    pub bound: f64,
    /// Total variation distance to uniform.
    pub actual_tv: f64,
}

/// Computes the maximum nonzero-character magnitude of a distribution on
/// Z_q^k, the implied closeness bound `q^k * epsilon`, and the actual total
/// variation distance to uniform. The distance never exceeds the bound.
///
/// `probs` holds the cell probabilities indexed little-endian: component i
/// of cell `a` is digit i of `a` base q.
pub fn xor_tv_bound(q: u32, k: usize, probs: &[f64]) -> Result<XorBound, CharSumError> {
    if q < 2 {
        return Err(CharSumError::InvalidModulus(q));
    }
    let cells = (q as u128).checked_pow(k as u32).unwrap_or(u128::MAX);
    if cells > MAX_CELLS as u128 {
        return Err(CharSumError::CellBudgetExceeded(usize::MAX));
    }
    let cells = cells as usize;
    assert_eq!(probs.len(), cells, "probability table has wrong size");

    // Digit decomposition of every cell, reused across characters.
    let digits: Vec<Vec<u32>> = (0..cells)
        .map(|a| {
            let mut a = a as u64;
            (0..k)
                .map(|_| {
                    let d = (a % q as u64) as u32;
                    a /= q as u64;
                    d
                })
                .collect()
        })
        .collect();
    let roots: Vec<Complex64> = (0..q)
        .map(|j| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * j as f64 / q as f64))
        .collect();

    let mut epsilon = 0.0f64;
    for c_index in 1..cells {
        let c = &digits[c_index];
        let mut acc = KahanComplex::default();
        for (a, &p_a) in probs.iter().enumerate() {
            let phase: u64 = c
                .iter()
                .zip(&digits[a])
                .map(|(&ci, &ai)| ci as u64 * ai as u64)
                .sum();
            let root = roots[(phase % q as u64) as usize];
            acc.add(p_a * root.re, p_a * root.im);
        }
        epsilon = epsilon.max(acc.value().norm());
    }
    let uniform = 1.0 / cells as f64;
    let actual_tv = 0.5 * probs.iter().map(|p| (p - uniform).abs()).sum::<f64>();
    let bound = cells as f64 * epsilon;
    assert!(
        actual_tv <= bound + 1e-9,
        "character bound violated: tv={actual_tv} bound={bound}"
    );
    Ok(XorBound {
        epsilon,
        bound,
        actual_tv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{catalog, GraphFamily, PatternGraph};

    fn fam(names: &[&str]) -> GraphFamily {
        GraphFamily::new(names.iter().map(|n| catalog(n).unwrap()).collect()).unwrap()
    }

    fn k4_host() -> HostGraph {
        HostGraph::from_pattern(&catalog("K4").unwrap())
    }

    fn two_triangle_host() -> HostGraph {
        HostGraph::new(6, &[(0, 1), (0, 2), (1, 2), (3, 4), (3, 5), (4, 5)]).unwrap()
    }

    /// r pairwise disjoint blocks of size d, unit coefficients.
    fn disjoint_blocks(q: u32, r: usize, d: usize) -> CharPolynomial {
        let terms: Vec<(u32, u32)> = (0..r)
            .map(|j| (1u32, ((1u32 << d) - 1) << (j * d)))
            .collect();
        CharPolynomial::new(q, r * d, terms).unwrap()
    }

    #[test]
    fn build_on_k4_triangles() {
        let built = build_polynomial(&k4_host(), &fam(&["K3"]), &[1], 2).unwrap();
        let poly = &built.polynomial;
        assert_eq!(poly.variable_count(), 6);
        assert_eq!(poly.terms().len(), 4);
        assert!(poly
            .terms()
            .iter()
            .all(|&(c, mask)| c == 1 && mask.count_ones() == 3));
        assert_eq!(poly.max_monomial_size(), 3);
    }

    #[test]
    fn build_rejects_zero_weights() {
        let family = fam(&["K3"]);
        assert_eq!(
            build_polynomial(&k4_host(), &family, &[0], 2).unwrap_err(),
            CharSumError::AllZeroCoefficients
        );
        // Weights that vanish after reduction count as zero.
        assert_eq!(
            build_polynomial(&k4_host(), &family, &[2], 2).unwrap_err(),
            CharSumError::AllZeroCoefficients
        );
        assert_eq!(
            build_polynomial(&k4_host(), &family, &[1, 1], 2).unwrap_err(),
            CharSumError::CoefficientLengthMismatch {
                expected: 1,
                got: 2
            }
        );
    }

    #[test]
    fn build_empty_when_no_copies() {
        let host = HostGraph::from_pattern(&catalog("C5").unwrap());
        let built = build_polynomial(&host, &fam(&["K3"]), &[1], 2).unwrap();
        assert!(built.polynomial.is_zero());
    }

    #[test]
    fn polynomial_validation() {
        assert_eq!(
            CharPolynomial::new(1, 3, vec![]).unwrap_err(),
            CharSumError::InvalidModulus(1)
        );
        assert_eq!(
            CharPolynomial::new(2, 25, vec![]).unwrap_err(),
            CharSumError::TooManyVariables(25)
        );
        assert_eq!(
            CharPolynomial::new(2, 3, vec![(2, 0b1)]).unwrap_err(),
            CharSumError::CoefficientOutOfRange(2)
        );
        assert_eq!(
            CharPolynomial::new(2, 3, vec![(1, 0b1), (1, 0b1)]).unwrap_err(),
            CharSumError::DuplicateMonomial(0b1)
        );
        assert_eq!(
            CharPolynomial::new(2, 2, vec![(1, 0b100)]).unwrap_err(),
            CharSumError::MonomialOutOfRange(0b100, 2)
        );
    }

    #[test]
    fn polynomial_json_roundtrip() {
        let poly = disjoint_blocks(3, 2, 2);
        let json = serde_json::to_string(&poly).unwrap();
        assert!(json.contains("\"terms\""));
        let back: CharPolynomial = serde_json::from_str(&json).unwrap();
        assert_eq!(poly, back);
    }

    #[test]
    fn char_sum_degree_one_vanishes() {
        let poly = CharPolynomial::new(2, 1, vec![(1, 0b1)]).unwrap();
        let s = exact_char_sum(&poly, 0.5).unwrap();
        assert!(s.modulus < 1e-15, "modulus {}", s.modulus);
    }

    #[test]
    fn char_sum_single_and_repeated_blocks() {
        let one_block = disjoint_blocks(2, 1, 2);
        let s = exact_char_sum(&one_block, 0.5).unwrap();
        assert!((s.modulus - 0.5).abs() < 1e-12);

        let three_blocks = disjoint_blocks(2, 3, 2);
        let s = exact_char_sum(&three_blocks, 0.5).unwrap();
        assert!((s.modulus - 0.125).abs() < 1e-12);
    }

    #[test]
    fn char_sum_factorizes_over_disjoint_supports() {
        // Analytic per-block sum: (1 - p^d) + p^d * omega^a.
        let cases = [
            (2u32, vec![(1u32, 1usize), (1, 3)], 0.3f64),
            (3, vec![(1, 2), (2, 2), (1, 1)], 0.5),
            (5, vec![(4, 3), (2, 1), (3, 2)], 0.77),
        ];
        for (q, blocks, p) in cases {
            let mut terms = Vec::new();
            let mut offset = 0usize;
            for &(coeff, d) in &blocks {
                terms.push((coeff, ((1u32 << d) - 1) << offset));
                offset += d;
            }
            let poly = CharPolynomial::new(q, offset, terms).unwrap();
            let got = exact_char_sum(&poly, p).unwrap();
            let mut expected = Complex64::new(1.0, 0.0);
            for &(coeff, d) in &blocks {
                let omega_a = Complex64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * coeff as f64 / q as f64,
                );
                let pd = p.powi(d as i32);
                expected *= Complex64::new(1.0 - pd, 0.0) + pd * omega_a;
            }
            assert!(
                (Complex64::new(got.re, got.im) - expected).norm() < 1e-12,
                "q={q} blocks={blocks:?} p={p}"
            );
        }
    }

    #[test]
    fn disjoint_block_decay_formula() {
        for d in 1..=4usize {
            for r in 1..=5usize {
                let poly = disjoint_blocks(2, r, d);
                let s = exact_char_sum(&poly, 0.5).unwrap();
                let expected = (1.0 - 2.0f64.powi(1 - d as i32)).powi(r as i32);
                assert!(
                    (s.modulus - expected.abs()).abs() < 1e-12,
                    "r={r} d={d}: {} vs {}",
                    s.modulus,
                    expected
                );
            }
        }
    }

    #[test]
    fn verify_disjoint_triangles_pass() {
        let host = two_triangle_host();
        let family = fam(&["K3"]);
        let built = build_polynomial(&host, &family, &[1], 2).unwrap();
        let system = greedy_block_system(&host, &family, &[1], 2).unwrap();
        assert_eq!(system.len(), 2);
        let check = verify_disjoint_system(&built.polynomial, &system).unwrap();
        assert!(check.holds(), "{:?}", check.failures);
    }

    #[test]
    fn verify_k4_two_triangles_fail_disjointness() {
        let built = build_polynomial(&k4_host(), &fam(&["K3"]), &[1], 2).unwrap();
        let blocks: Vec<u32> = built.polynomial.terms()[..2]
            .iter()
            .map(|&(_, m)| m)
            .collect();
        let system = DisjointSystem { blocks, d: 3 };
        let check = verify_disjoint_system(&built.polynomial, &system).unwrap();
        assert!(!check.holds());
        assert!(!check.pairwise_disjoint);
        assert!(check.block_sizes_ok);
    }

    #[test]
    fn verify_outside_overlap_violation() {
        // Blocks {0,1,2} and {3,4,5}; the extra top-degree monomial
        // {0,1,3} sits inside the block union.
        let terms = vec![(1u32, 0b000111u32), (1, 0b111000), (1, 0b001011)];
        let poly = CharPolynomial::new(2, 6, terms).unwrap();
        let system = DisjointSystem {
            blocks: vec![0b000111, 0b111000],
            d: 3,
        };
        let check = verify_disjoint_system(&poly, &system).unwrap();
        assert!(!check.holds());
        assert!(!check.outside_overlap_ok);
        assert!(check.pairwise_disjoint && check.block_sizes_ok);
    }

    #[test]
    fn verify_rejects_foreign_block() {
        let built = build_polynomial(&k4_host(), &fam(&["K3"]), &[1], 2).unwrap();
        let system = DisjointSystem {
            blocks: vec![0b11],
            d: 3,
        };
        assert_eq!(
            verify_disjoint_system(&built.polynomial, &system).unwrap_err(),
            CharSumError::BlockNotMonomial(0)
        );
    }

    #[test]
    fn greedy_system_on_k4_keeps_one_triangle() {
        let host = k4_host();
        let family = fam(&["K3"]);
        let system = greedy_block_system(&host, &family, &[1], 2).unwrap();
        assert_eq!(system.len(), 1);
        let built = build_polynomial(&host, &family, &[1], 2).unwrap();
        // A single triangle block satisfies all conditions: any other
        // triangle of K4 shares exactly one edge with it.
        let check = verify_disjoint_system(&built.polynomial, &system).unwrap();
        assert!(check.holds(), "{:?}", check.failures);
    }

    #[test]
    fn xor_bound_cases() {
        let uniform = xor_tv_bound(2, 1, &[0.5, 0.5]).unwrap();
        assert!(uniform.epsilon < 1e-15 && uniform.actual_tv < 1e-15);

        let point = xor_tv_bound(2, 1, &[1.0, 0.0]).unwrap();
        assert!((point.epsilon - 1.0).abs() < 1e-12);
        assert!((point.bound - 2.0).abs() < 1e-12);
        assert!((point.actual_tv - 0.5).abs() < 1e-12);

        let skewed = xor_tv_bound(2, 1, &[0.75, 0.25]).unwrap();
        assert!((skewed.epsilon - 0.5).abs() < 1e-12);
        assert!((skewed.bound - 1.0).abs() < 1e-12);
        assert!((skewed.actual_tv - 0.25).abs() < 1e-12);
    }

    #[test]
    fn epsilon_zero_iff_uniform() {
        let u = xor_tv_bound(3, 2, &[1.0 / 9.0; 9]).unwrap();
        assert!(u.epsilon < 1e-14);
        let mut probs = [1.0 / 9.0; 9];
        probs[0] += 0.01;
        probs[8] -= 0.01;
        let nu = xor_tv_bound(3, 2, &probs).unwrap();
        assert!(nu.epsilon > 1e-4);
    }

    #[test]
    fn build_polynomial_rejects_wide_hosts() {
        // C12 as a host is fine (12 edges); K8 has 28 edges > 24.
        let host = HostGraph::from_pattern(&catalog("K8").unwrap());
        assert_eq!(
            build_polynomial(&host, &fam(&["K3"]), &[1], 2).unwrap_err(),
            CharSumError::TooManyVariables(28)
        );
    }

    #[test]
    fn pattern_shares_vertex_but_not_edges() {
        // Two triangles glued at a vertex: vertex-disjointness fails but
        // edge sets stay disjoint, so the greedy system keeps only one and
        // the manual two-block system still passes the edge-level check.
        let host = HostGraph::new(5, &[(0, 1), (0, 2), (1, 2), (0, 3), (0, 4), (3, 4)]).unwrap();
        let family = fam(&["K3"]);
        let built = build_polynomial(&host, &family, &[1], 2).unwrap();
        assert_eq!(built.polynomial.terms().len(), 2);
        let greedy = greedy_block_system(&host, &family, &[1], 2).unwrap();
        assert_eq!(greedy.len(), 1);
        let both = DisjointSystem {
            blocks: built.polynomial.terms().iter().map(|&(_, m)| m).collect(),
            d: 3,
        };
        let check = verify_disjoint_system(&built.polynomial, &both).unwrap();
        assert!(check.pairwise_disjoint);
        assert!(check.holds());
        let _ = PatternGraph::new(3, &[(0, 1), (1, 2), (0, 2)]).unwrap();
    }
}
