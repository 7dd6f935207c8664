//! Exact density invariants of patterns and families, threshold exponents,
//! and the exponent functional that governs distance-to-uniform decay.
//!
//! All density comparisons use exact integer rationals; floating point only
//! enters when the exponent functional is evaluated in the log domain.

use std::fmt;
use std::str::FromStr;

use num::rational::Ratio;
use num::Signed;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{GraphFamily, PatternGraph};

#[derive(Debug, Error, PartialEq)]
pub enum InvariantError {
    #[error("alpha must be positive, got {0}")]
    NonpositiveAlpha(Rational),
    #[error("1/alpha equals m(G_{0}) exactly; the strict split is undefined at this boundary")]
    BoundaryAlpha(usize),
    #[error("p must lie in (0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("cannot parse {0:?} as a rational")]
    ParseRational(String),
}

/// An exact rational with `i64` parts, stored reduced.
///
/// Comparisons go through integer cross-multiplication, so ordering is exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rational(Ratio<i64>);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rational(Ratio::new(numer, denom))
    }

    pub fn from_integer(n: i64) -> Self {
        Rational(Ratio::from_integer(n))
    }

    pub fn numer(&self) -> i64 {
        *self.0.numer()
    }

    pub fn denom(&self) -> i64 {
        *self.0.denom()
    }

    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }

    pub fn neg(&self) -> Self {
        Rational(-self.0)
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn to_f64(&self) -> f64 {
        self.numer() as f64 / self.denom() as f64
    }

    /// Parses `"a/b"`, a decimal such as `"0.8"` (kept exact: 4/5), or an
    /// integer. A leading `-` is accepted.
    pub fn parse(text: &str) -> Result<Self, InvariantError> {
        let s = text.trim();
        let err = || InvariantError::ParseRational(text.to_string());
        if let Some((n, d)) = s.split_once('/') {
            let n: i64 = n.trim().parse().map_err(|_| err())?;
            let d: i64 = d.trim().parse().map_err(|_| err())?;
            if d == 0 {
                return Err(err());
            }
            return Ok(Rational::new(n, d));
        }
        if let Some((int, frac)) = s.split_once('.') {
            let negative = int.trim_start().starts_with('-');
            let int_part: i64 = if int.is_empty() || int == "-" {
                0
            } else {
                int.parse().map_err(|_| err())?
            };
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(err());
            }
            let frac_num: i64 = frac.parse().map_err(|_| err())?;
            let scale = 10i64
                .checked_pow(frac.len() as u32)
                .ok_or_else(err)?;
            let magnitude = Ratio::from_integer(int_part.abs())
                + Ratio::new(frac_num, scale);
            let signed = if negative { -magnitude } else { magnitude };
            return Ok(Rational(signed));
        }
        let n: i64 = s.parse().map_err(|_| err())?;
        Ok(Rational::from_integer(n))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.numer(), self.denom())
    }
}

impl FromStr for Rational {
    type Err = InvariantError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Rational::parse(s)
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Rational::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Edge-to-vertex ratio of a pattern, exact and reduced.
pub fn density(h: &PatternGraph) -> Rational {
    Rational::new(h.edge_count() as i64, h.vertex_count() as i64)
}

/// The density profile of a pattern: its own ratio, the maximum ratio over
/// nonempty induced subgraphs, and a witness subset achieving that maximum.
#[derive(Clone, Debug, Serialize)]
pub struct DensityProfile {
    pub rho: Rational,
    pub m: Rational,
    /// Vertices of a densest induced subgraph (first one found in mask order).
    pub witness: Vec<usize>,
}

/// Maximizes edge/vertex ratio over all nonempty vertex subsets with their
/// induced edges. For a fixed vertex set, taking every available edge
/// maximizes the ratio, so induced subgraphs suffice.
pub fn max_density(h: &PatternGraph) -> Result<DensityProfile, crate::graph::GraphError> {
    h.check_size_cap()?;
    let v = h.vertex_count();
    let mut best = Rational::new(0, 1);
    let mut best_mask: u16 = 1;
    for mask in 1u32..(1u32 << v) {
        let mask = mask as u16;
        let e = h.induced_edge_count(mask) as i64;
        let s = mask.count_ones() as i64;
        let ratio = Rational::new(e, s);
        if ratio > best {
            best = ratio;
            best_mask = mask;
        }
    }
    let witness: Vec<usize> = (0..v).filter(|&i| best_mask >> i & 1 != 0).collect();
    Ok(DensityProfile {
        rho: density(h),
        m: best,
        witness,
    })
}

/// Containment threshold data for a family: the family maximum density, the
/// exact threshold exponent `-1/m`, and its value at a concrete `n`.
#[derive(Clone, Debug, Serialize)]
pub struct ThresholdReport {
    pub m_family: Rational,
    /// Index of a member achieving the family maximum density.
    pub argmax_member: usize,
    /// Exact exponent `-1/m`; the threshold is `n` to this power.
    pub exponent: Rational,
    pub n: usize,
    /// `n^(-1/m)` as a float.
    pub p_threshold: f64,
}

/// Maximum density over the family, exact.
pub fn family_max_density(family: &GraphFamily) -> Result<(Rational, usize), crate::graph::GraphError> {
    let mut best: Option<(Rational, usize)> = None;
    for (i, g) in family.iter().enumerate() {
        let m = max_density(g)?.m;
        if best.is_none_or(|(b, _)| m > b) {
            best = Some((m, i));
        }
    }
    Ok(best.expect("family is nonempty"))
}

/// Threshold function for joint containment of every family member:
/// `p(n) = n^(-1/m)` with `m` the family maximum density.
pub fn family_threshold(
    family: &GraphFamily,
    n: usize,
) -> Result<ThresholdReport, crate::graph::GraphError> {
    let (m_family, argmax_member) = family_max_density(family)?;
    let exponent = m_family.recip().neg();
    let p_threshold = (n as f64).powf(exponent.to_f64());
    Ok(ThresholdReport {
        m_family,
        argmax_member,
        exponent,
        n,
        p_threshold,
    })
}

/// The exponent functional in log domain, with its minimizer.
#[derive(Clone, Debug, Serialize)]
pub struct PhiReport {
    /// `min` over members G and nonempty S ⊆ V(G) of `|S| ln n + e(S) ln p`.
    pub log_phi: f64,
    /// Member index achieving the minimum.
    pub member: usize,
    /// Vertex subset of that member achieving the minimum.
    pub subset: Vec<usize>,
    /// Induced edge count of the minimizing subset.
    pub subset_edges: usize,
    /// `exp(log_phi)` when the magnitude is representable.
    pub phi: Option<f64>,
}

/// Evaluates the exponent functional: the minimum over family members and
/// their nonempty vertex subsets of `n^v p^e` (induced edges), in log domain.
///
/// For fixed vertices, taking all induced edges minimizes the product since
/// `p <= 1`.
pub fn phi(family: &GraphFamily, n: usize, p: f64) -> Result<PhiReport, InvariantError> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(InvariantError::InvalidProbability(p));
    }
    let ln_n = (n as f64).ln();
    let ln_p = p.ln();
    let mut best = f64::INFINITY;
    let mut best_member = 0usize;
    let mut best_mask: u16 = 1;
    let mut best_edges = 0usize;
    for (i, g) in family.iter().enumerate() {
        let v = g.vertex_count();
        for mask in 1u32..(1u32 << v) {
            let mask = mask as u16;
            let e = g.induced_edge_count(mask);
            let value = mask.count_ones() as f64 * ln_n + e as f64 * ln_p;
            if value < best {
                best = value;
                best_member = i;
                best_mask = mask;
                best_edges = e;
            }
        }
    }
    let subset: Vec<usize> = (0..family.member(best_member).vertex_count())
        .filter(|&i| best_mask >> i & 1 != 0)
        .collect();
    Ok(PhiReport {
        log_phi: best,
        member: best_member,
        subset,
        subset_edges: best_edges,
        phi: if best.abs() < 500.0 {
            Some(best.exp())
        } else {
            None
        },
    })
}

/// Index split of a family at exponent `alpha`: members with maximum density
/// strictly below `1/alpha` land in `sparse_side` (their counts go uniform),
/// the rest in `dense_side` (their counts vanish at `p = n^-alpha`).
#[derive(Clone, Debug, Serialize)]
pub struct CorollarySplit {
    pub alpha: Rational,
    /// Indices i with m(G_i) < 1/alpha (named I in the classification).
    pub sparse_side: Vec<usize>,
    /// The complement J: indices with m(G_i) > 1/alpha.
    pub dense_side: Vec<usize>,
}

/// Classifies each member by exact comparison of its maximum density against
/// `1/alpha`. Equality is rejected: the split is only defined away from the
/// boundary.
pub fn classify_corollary(
    family: &GraphFamily,
    alpha: Rational,
) -> Result<CorollarySplit, InvariantError> {
    if !alpha.is_positive() {
        return Err(InvariantError::NonpositiveAlpha(alpha));
    }
    let threshold = alpha.recip();
    let mut sparse_side = Vec::new();
    let mut dense_side = Vec::new();
    for (i, g) in family.iter().enumerate() {
        let m = max_density(g)
            .map_err(|_| InvariantError::BoundaryAlpha(i))?
            .m;
        match m.cmp(&threshold) {
            std::cmp::Ordering::Less => sparse_side.push(i),
            std::cmp::Ordering::Greater => dense_side.push(i),
            std::cmp::Ordering::Equal => return Err(InvariantError::BoundaryAlpha(i)),
        }
    }
    Ok(CorollarySplit {
        alpha,
        sparse_side,
        dense_side,
    })
}
