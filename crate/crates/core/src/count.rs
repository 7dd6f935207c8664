//! Exact and modular counting of pattern copies in a host graph.
//!
//! An *embedding* is an injective map from pattern vertices to host vertices
//! carrying every pattern edge to a host edge (host-only edges are fine; a
//! copy is a subgraph, not an induced subgraph). The unlabeled copy count is
//! the embedding count divided by the pattern's automorphism count, and the
//! division is always exact.
//!
//! The walker places pattern vertices in a fixed order chosen to maximize
//! back-degree, intersecting host adjacency rows to prune candidates. The
//! final level is resolved by popcount instead of iteration.

use num::BigUint;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::graph::{automorphism_count, GraphError, GraphFamily, HostGraph, PatternGraph};

/// Largest supported modulus for per-pattern residues.
pub const MAX_MODULUS: u32 = 1 << 16;

#[derive(Debug, Error, PartialEq)]
pub enum CountError {
    #[error("modulus must lie in [2, 65536], got {0}")]
    ModulusOutOfRange(u32),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Exact copy counts of one pattern in one host.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CopyCount {
    /// Injective edge-preserving maps, full precision.
    pub embeddings: BigUint,
    /// Unlabeled copies: `embeddings / |Aut|`.
    pub copies: BigUint,
    /// |Aut| of the pattern, for the record.
    pub automorphisms: u64,
}

/// Per-pattern copy counts reduced modulo `q`, in family order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModVector {
    pub q: u32,
    pub values: Vec<u32>,
}

impl ModVector {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Placement order and per-level back-neighbors of a pattern.
struct WalkPlan {
    /// order[level] = pattern vertex placed at that level.
    order: Vec<usize>,
    /// back[level] = earlier levels whose pattern vertex is adjacent.
    back: Vec<Vec<usize>>,
}

impl WalkPlan {
    fn new(pattern: &PatternGraph) -> Self {
        let v = pattern.vertex_count();
        let mut order = Vec::with_capacity(v);
        let mut placed: u16 = 0;
        for _ in 0..v {
            let mut best: Option<(usize, (usize, usize))> = None;
            for cand in 0..v {
                if placed >> cand & 1 != 0 {
                    continue;
                }
                let back_degree = (pattern.row(cand) & placed).count_ones() as usize;
                let key = (back_degree, pattern.degree(cand));
                match best {
                    Some((_, best_key)) if key <= best_key => {}
                    _ => best = Some((cand, key)),
                }
            }
            let (chosen, _) = best.expect("some vertex remains");
            order.push(chosen);
            placed |= 1 << chosen;
        }
        let back = (0..v)
            .map(|level| {
                (0..level)
                    .filter(|&earlier| pattern.has_edge(order[level], order[earlier]))
                    .collect()
            })
            .collect();
        WalkPlan { order, back }
    }
}

struct Walker<'a> {
    host: &'a HostGraph,
    plan: WalkPlan,
    depth: usize,
    /// image[level] = host vertex placed at that level.
    image: Vec<usize>,
    used: BitSet,
    /// All host vertices, for levels with no placed neighbor.
    full: BitSet,
    /// Scratch candidate words per level.
    cand: Vec<Vec<u64>>,
    words: usize,
}

impl<'a> Walker<'a> {
    fn new(host: &'a HostGraph, pattern: &PatternGraph) -> Self {
        let n = host.vertex_count();
        let words = n.div_ceil(64);
        let mut full = BitSet::new(n);
        for v in 0..n {
            full.insert(v);
        }
        let depth = pattern.vertex_count();
        Walker {
            host,
            plan: WalkPlan::new(pattern),
            depth,
            image: vec![usize::MAX; depth],
            used: BitSet::new(n),
            full,
            cand: vec![vec![0u64; words]; depth],
            words,
        }
    }

    /// Fills `cand[level]` with host vertices that extend the current
    /// partial embedding at `level`.
    fn fill_candidates(&mut self, level: usize) {
        let mut buf = std::mem::take(&mut self.cand[level]);
        let back = &self.plan.back[level];
        if back.is_empty() {
            buf.copy_from_slice(self.full.words());
        } else {
            buf.copy_from_slice(self.host.row(self.image[back[0]]).words());
            for &earlier in &back[1..] {
                for (b, r) in buf.iter_mut().zip(self.host.row(self.image[earlier]).words()) {
                    *b &= r;
                }
            }
        }
        for (b, u) in buf.iter_mut().zip(self.used.words()) {
            *b &= !u;
        }
        self.cand[level] = buf;
    }

    fn count_rec(&mut self, level: usize, modulus: Option<u64>, acc: &mut Accumulator) {
        self.fill_candidates(level);
        if level + 1 == self.depth {
            let ones: u64 = self.cand[level].iter().map(|w| w.count_ones() as u64).sum();
            acc.add(ones, modulus);
            return;
        }
        for wi in 0..self.words {
            let mut w = self.cand[level][wi];
            while w != 0 {
                let v = wi * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                self.image[level] = v;
                self.used.insert(v);
                self.count_rec(level + 1, modulus, acc);
                self.used.remove(v);
            }
        }
    }

    /// Visits every embedding; `visit` receives the pattern-vertex-indexed
    /// image and returns false to stop the walk.
    fn enumerate_rec(
        &mut self,
        level: usize,
        assignment: &mut [usize],
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        self.fill_candidates(level);
        for wi in 0..self.words {
            let mut w = self.cand[level][wi];
            while w != 0 {
                let v = wi * 64 + w.trailing_zeros() as usize;
                w &= w - 1;
                assignment[self.plan.order[level]] = v;
                if level + 1 == self.depth {
                    if !visit(assignment) {
                        return false;
                    }
                } else {
                    self.image[level] = v;
                    self.used.insert(v);
                    let keep_going = self.enumerate_rec(level + 1, assignment, visit);
                    self.used.remove(v);
                    if !keep_going {
                        return false;
                    }
                }
            }
        }
        true
    }
}

/// Embedding tally that stays in machine words under a modulus and spills
/// into a big integer otherwise.
struct Accumulator {
    partial: u128,
    total: BigUint,
}

impl Accumulator {
    fn new() -> Self {
        Accumulator {
            partial: 0,
            total: BigUint::ZERO,
        }
    }

    #[inline]
    fn add(&mut self, x: u64, modulus: Option<u64>) {
        match modulus {
            Some(m) => self.partial = (self.partial + x as u128) % m as u128,
            None => {
                self.partial += x as u128;
                if self.partial > u128::MAX / 2 {
                    self.total += self.partial;
                    self.partial = 0;
                }
            }
        }
    }

    fn into_big(mut self) -> BigUint {
        self.total += self.partial;
        self.total
    }

    fn residue(&self) -> u64 {
        self.partial as u64
    }
}

/// Number of injective edge-preserving maps from `pattern` into `host`,
/// full precision.
pub fn count_embeddings(host: &HostGraph, pattern: &PatternGraph) -> Result<BigUint, CountError> {
    pattern.check_size_cap()?;
    if pattern.vertex_count() > host.vertex_count() {
        return Ok(BigUint::ZERO);
    }
    let mut acc = Accumulator::new();
    Walker::new(host, pattern).count_rec(0, None, &mut acc);
    Ok(acc.into_big())
}

/// Embedding count modulo `modulus`, never leaving 64-bit arithmetic.
fn count_embeddings_mod(
    host: &HostGraph,
    pattern: &PatternGraph,
    modulus: u64,
) -> Result<u64, CountError> {
    pattern.check_size_cap()?;
    if pattern.vertex_count() > host.vertex_count() {
        return Ok(0);
    }
    let mut acc = Accumulator::new();
    Walker::new(host, pattern).count_rec(0, Some(modulus), &mut acc);
    Ok(acc.residue())
}

/// Unlabeled copy count: embeddings divided by the automorphism count.
pub fn count_copies(host: &HostGraph, pattern: &PatternGraph) -> Result<CopyCount, CountError> {
    let embeddings = count_embeddings(host, pattern)?;
    let automorphisms = automorphism_count(pattern)?;
    let aut = BigUint::from(automorphisms);
    debug_assert!((&embeddings % &aut) == BigUint::ZERO);
    let copies = &embeddings / &aut;
    Ok(CopyCount {
        embeddings,
        copies,
        automorphisms,
    })
}

/// Copy count modulo `q` without big integers: embeddings are accumulated
/// modulo `q * |Aut|`; the residue is divisible by |Aut| because the true
/// embedding count is, so dividing it recovers the copy count mod q.
pub fn count_copies_mod(
    host: &HostGraph,
    pattern: &PatternGraph,
    q: u32,
) -> Result<u32, CountError> {
    if !(2..=MAX_MODULUS).contains(&q) {
        return Err(CountError::ModulusOutOfRange(q));
    }
    let automorphisms = automorphism_count(pattern)?;
    let modulus = q as u64 * automorphisms;
    let residue = count_embeddings_mod(host, pattern, modulus)?;
    debug_assert_eq!(residue % automorphisms, 0);
    Ok((residue / automorphisms) as u32)
}

/// The vector of family copy counts mod `q`, in family order.
pub fn xi_vector(host: &HostGraph, family: &GraphFamily, q: u32) -> Result<ModVector, CountError> {
    let values = family
        .iter()
        .map(|pattern| count_copies_mod(host, pattern, q))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ModVector { q, values })
}

/// Visits every embedding of `pattern` in `host`. The callback receives the
/// image indexed by pattern vertex and returns false to stop early.
pub fn for_each_embedding(
    host: &HostGraph,
    pattern: &PatternGraph,
    mut visit: impl FnMut(&[usize]) -> bool,
) -> Result<(), CountError> {
    pattern.check_size_cap()?;
    if pattern.vertex_count() > host.vertex_count() {
        return Ok(());
    }
    let mut assignment = vec![usize::MAX; pattern.vertex_count()];
    Walker::new(host, pattern).enumerate_rec(0, &mut assignment, &mut visit);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::catalog;
    use crate::sample::{sample_gnp, SeedSpec};

    fn pat(name: &str) -> PatternGraph {
        catalog(name).unwrap()
    }

    fn host(name: &str) -> HostGraph {
        HostGraph::from_pattern(&pat(name))
    }

    fn petersen() -> HostGraph {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        let edges: Vec<(usize, usize)> = edges
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        HostGraph::new(10, &edges).unwrap()
    }

    #[test]
    fn embeddings_small_cases() {
        assert_eq!(
            count_embeddings(&host("K4"), &pat("K3")).unwrap(),
            BigUint::from(24u32)
        );
        assert_eq!(
            count_embeddings(&host("C5"), &pat("K3")).unwrap(),
            BigUint::ZERO
        );
        for n in [2usize, 3, 7] {
            assert_eq!(
                count_embeddings(&HostGraph::complete(n), &pat("K2")).unwrap(),
                BigUint::from(n * (n - 1))
            );
        }
    }

    #[test]
    fn copies_small_cases() {
        let c = count_copies(&host("K4"), &pat("K3")).unwrap();
        assert_eq!(c.copies, BigUint::from(4u32));
        assert_eq!(c.embeddings, BigUint::from(24u32));
        assert_eq!(c.automorphisms, 6);

        assert_eq!(
            count_copies(&HostGraph::complete(5), &pat("K3")).unwrap().copies,
            BigUint::from(10u32)
        );
        assert_eq!(
            count_copies(&petersen(), &pat("K3")).unwrap().copies,
            BigUint::ZERO
        );
        // Petersen is vertex-transitive with girth 5: 12 five-cycles.
        assert_eq!(
            count_copies(&petersen(), &pat("C5")).unwrap().copies,
            BigUint::from(12u32)
        );
    }

    #[test]
    fn copies_times_aut_equals_embeddings() {
        let hosts = [host("K4"), petersen(), HostGraph::complete(6)];
        for h in &hosts {
            for name in ["K2", "K3", "P3", "P4", "C4", "S3"] {
                let c = count_copies(h, &pat(name)).unwrap();
                assert_eq!(&c.copies * BigUint::from(c.automorphisms), c.embeddings);
            }
        }
    }

    #[test]
    fn modular_counts() {
        assert_eq!(count_copies_mod(&host("K4"), &pat("K3"), 2).unwrap(), 0);
        assert_eq!(count_copies_mod(&host("K4"), &pat("K3"), 3).unwrap(), 1);
        assert_eq!(
            count_copies_mod(&host("K4"), &pat("K3"), 1).unwrap_err(),
            CountError::ModulusOutOfRange(1)
        );
    }

    #[test]
    fn modular_matches_exact_on_random_hosts() {
        for trial in 0..60u64 {
            let n = 4 + (trial % 5) as usize;
            let p = [0.2, 0.5, 0.8][(trial % 3) as usize];
            let g = sample_gnp(n, p, SeedSpec::new(0xBEEF, trial)).unwrap();
            for name in ["K2", "K3", "P3", "P4", "C4"] {
                let pattern = pat(name);
                let exact = count_copies(&g, &pattern).unwrap().copies;
                for q in [2u32, 3, 5, 7] {
                    let expect = (&exact % BigUint::from(q)).to_u32_digits();
                    let expect = expect.first().copied().unwrap_or(0);
                    assert_eq!(
                        count_copies_mod(&g, &pattern, q).unwrap(),
                        expect,
                        "n={n} p={p} pattern={name} q={q}"
                    );
                }
            }
        }
    }

    #[test]
    fn relabeling_preserves_counts() {
        let g = sample_gnp(9, 0.5, SeedSpec::new(0xA11CE, 0)).unwrap();
        let perm: Vec<usize> = (0..9).map(|i| (i * 4 + 2) % 9).collect();
        let relabeled = g.relabel(&perm);
        for name in ["K3", "P4", "C4", "S3"] {
            let pattern = pat(name);
            assert_eq!(
                count_copies(&g, &pattern).unwrap().copies,
                count_copies(&relabeled, &pattern).unwrap().copies,
                "{name}"
            );
        }
    }

    #[test]
    fn additivity_over_disjoint_components() {
        let a = sample_gnp(6, 0.6, SeedSpec::new(5, 1)).unwrap();
        let b = sample_gnp(5, 0.7, SeedSpec::new(5, 2)).unwrap();
        let mut edges = a.edge_pairs();
        edges.extend(b.edge_pairs().into_iter().map(|(u, w)| (u + 6, w + 6)));
        let union = HostGraph::new(11, &edges).unwrap();
        for name in ["K3", "P3", "C4"] {
            let pattern = pat(name);
            let total = count_copies(&union, &pattern).unwrap().copies;
            let split = count_copies(&a, &pattern).unwrap().copies
                + count_copies(&b, &pattern).unwrap().copies;
            assert_eq!(total, split, "{name}");
        }
    }

    #[test]
    fn xi_vector_cases() {
        let family = GraphFamily::new(vec![pat("K3"), pat("K4")]).unwrap();
        let xi = xi_vector(&host("K4"), &family, 2).unwrap();
        assert_eq!(xi.values, vec![0, 1]);

        let xi = xi_vector(&HostGraph::empty(8), &family, 7).unwrap();
        assert_eq!(xi.values, vec![0, 0]);

        let xi = xi_vector(&host("C5"), &family, 5).unwrap();
        assert_eq!(xi.values, vec![0, 0]);
    }

    #[test]
    fn enumeration_matches_count() {
        let g = sample_gnp(8, 0.5, SeedSpec::new(77, 3)).unwrap();
        for name in ["K3", "P4", "C4"] {
            let pattern = pat(name);
            let mut seen = 0u64;
            for_each_embedding(&g, &pattern, |img| {
                // Image must be injective and edge-preserving.
                for (u, w) in pattern.edges() {
                    assert!(g.has_edge(img[*u], img[*w]));
                }
                seen += 1;
                true
            })
            .unwrap();
            let expected = count_embeddings(&g, &pattern).unwrap();
            assert_eq!(BigUint::from(seen), expected, "{name}");
        }
    }

    #[test]
    fn single_vertex_pattern() {
        let single = PatternGraph::new(1, &[]).unwrap();
        let g = HostGraph::empty(6);
        assert_eq!(
            count_copies(&g, &single).unwrap().copies,
            BigUint::from(6u32)
        );
    }

    #[test]
    fn disconnected_pattern_counts() {
        // Two disjoint edges in K4: embeddings 4*3*2*1 = 24, |Aut| = 8.
        let two_edges = PatternGraph::new(4, &[(0, 1), (2, 3)]).unwrap();
        let c = count_copies(&host("K4"), &two_edges).unwrap();
        assert_eq!(c.embeddings, BigUint::from(24u32));
        assert_eq!(c.copies, BigUint::from(3u32));
    }
}
