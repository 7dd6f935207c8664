//! Small-graph representation: patterns, sampled hosts, ordered families.
//!
//! Patterns are the graphs whose copies get counted; they stay tiny (the
//! combinatorial operations cap them at [`MAX_PATTERN_VERTICES`] vertices).
//! Hosts are the graphs copies are counted *in*; they can be large and are
//! immutable after construction.

use std::fmt;

use thiserror::Error;

use crate::bitset::BitSet;

/// Hard cap for isomorphism, automorphism, density and counting operations.
/// Exhaustive permutation search stays cheap below this.
pub const MAX_PATTERN_VERTICES: usize = 10;

/// Widest pattern the u16 adjacency rows can represent.
const MAX_STORABLE_VERTICES: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(usize, usize),
    #[error("vertex {vertex} out of range for {vertex_count} vertices")]
    VertexOutOfRange { vertex: usize, vertex_count: usize },
    #[error("edge {0}-{1} must be written with the smaller endpoint first")]
    BadEdgeOrder(usize, usize),
    #[error("malformed header line {0:?} (expected \"v e\")")]
    MalformedHeader(String),
    #[error("malformed edge line {0:?} (expected \"u w\")")]
    MalformedEdgeLine(String),
    #[error("header announces {expected} edges but {found} were given")]
    WrongEdgeCount { expected: usize, found: usize },
    #[error("unknown catalog name {0:?}")]
    UnknownCatalogName(String),
    #[error("graph has no vertices")]
    Empty,
    #[error("{vertices} vertices exceed the pattern storage limit of 16")]
    TooManyVertices { vertices: usize },
    #[error("operation limited to 10 pattern vertices, got {vertices}")]
    SizeCapExceeded { vertices: usize },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FamilyError {
    #[error("family member {0} is disconnected")]
    DisconnectedMember(usize),
    #[error("family member {0} has fewer than two vertices")]
    TooSmallMember(usize),
    #[error("family members {0} and {1} are isomorphic")]
    IsomorphicPair(usize, usize),
    #[error("family is empty")]
    EmptyFamily,
}

/// A small pattern graph with per-vertex adjacency bitrows.
///
/// Vertices are dense `0..v`. No self-loops, no duplicate edges, symmetric
/// adjacency. Edges are kept sorted with the smaller endpoint first.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PatternGraph {
    vertex_count: usize,
    edges: Vec<(usize, usize)>,
    rows: Vec<u16>,
}

impl PatternGraph {
    pub fn new(vertex_count: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if vertex_count == 0 {
            return Err(GraphError::Empty);
        }
        if vertex_count > MAX_STORABLE_VERTICES {
            return Err(GraphError::TooManyVertices {
                vertices: vertex_count,
            });
        }
        let mut rows = vec![0u16; vertex_count];
        let mut sorted: Vec<(usize, usize)> = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let (u, w) = if a < b { (a, b) } else { (b, a) };
            if w >= vertex_count {
                return Err(GraphError::VertexOutOfRange {
                    vertex: w,
                    vertex_count,
                });
            }
            if rows[u] >> w & 1 != 0 {
                return Err(GraphError::DuplicateEdge(u, w));
            }
            rows[u] |= 1 << w;
            rows[w] |= 1 << u;
            sorted.push((u, w));
        }
        sorted.sort_unstable();
        Ok(PatternGraph {
            vertex_count,
            edges: sorted,
            rows,
        })
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges as sorted `(u, w)` pairs with `u < w`.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Adjacency bitrow of `v` (bit `w` set iff `v ~ w`).
    #[inline]
    pub fn row(&self, v: usize) -> u16 {
        self.rows[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        self.rows[u] >> w & 1 != 0
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count_ones() as usize
    }

    /// Number of edges with both endpoints inside `subset` (a vertex bitmask).
    pub fn induced_edge_count(&self, subset: u16) -> usize {
        let mut twice = 0usize;
        let mut rest = subset;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            twice += (self.rows[v] & subset).count_ones() as usize;
        }
        twice / 2
    }

    /// Relabels vertices by `perm` (vertex `v` becomes `perm[v]`).
    pub fn relabel(&self, perm: &[usize]) -> PatternGraph {
        assert_eq!(perm.len(), self.vertex_count);
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .map(|&(u, w)| (perm[u], perm[w]))
            .collect();
        PatternGraph::new(self.vertex_count, &edges).expect("relabeling preserves validity")
    }

    pub(crate) fn check_size_cap(&self) -> Result<(), GraphError> {
        if self.vertex_count > MAX_PATTERN_VERTICES {
            Err(GraphError::SizeCapExceeded {
                vertices: self.vertex_count,
            })
        } else {
            Ok(())
        }
    }

    /// Parses the plain text format or a catalog name such as `K3` or `P4`.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let trimmed = text.trim();
        if !trimmed.contains('\n') && !trimmed.contains(' ') {
            return catalog(trimmed);
        }
        parse_text(trimmed)
    }

    /// Serializes to the text format: `"v e"` header then one `"u w"` line
    /// per edge, lexicographic, newline-terminated.
    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count, self.edges.len());
        for &(u, w) in &self.edges {
            out.push_str(&format!("{} {}\n", u, w));
        }
        out
    }

    /// True iff the graph has a single connected component. A one-vertex
    /// graph counts as connected.
    pub fn is_connected(&self) -> bool {
        let mut seen: u16 = 1;
        let mut frontier: u16 = 1;
        while frontier != 0 {
            let mut next: u16 = 0;
            let mut rest = frontier;
            while rest != 0 {
                let v = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                next |= self.rows[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen.count_ones() as usize >= self.vertex_count
    }
}

impl fmt::Display for PatternGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}v/{}e", self.vertex_count, self.edges.len())
    }
}

fn parse_text(text: &str) -> Result<PatternGraph, GraphError> {
    let (v, edges) = parse_header_and_edges(text)?;
    if v > MAX_STORABLE_VERTICES {
        return Err(GraphError::TooManyVertices { vertices: v });
    }
    PatternGraph::new(v, &edges)
}

fn parse_header_and_edges(text: &str) -> Result<(usize, Vec<(usize, usize)>), GraphError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("");
    let mut parts = header.split_whitespace();
    let (v, e) = match (parts.next(), parts.next(), parts.next()) {
        (Some(v), Some(e), None) => {
            let v: usize = v
                .parse()
                .map_err(|_| GraphError::MalformedHeader(header.to_string()))?;
            let e: usize = e
                .parse()
                .map_err(|_| GraphError::MalformedHeader(header.to_string()))?;
            (v, e)
        }
        _ => return Err(GraphError::MalformedHeader(header.to_string())),
    };
    if v == 0 {
        return Err(GraphError::Empty);
    }
    let mut edges = Vec::with_capacity(e);
    for line in lines {
        if line.trim().is_empty() {
            continue;
        }
        let mut parts = line.split_whitespace();
        let (u, w) = match (parts.next(), parts.next(), parts.next()) {
            (Some(u), Some(w), None) => {
                let u: usize = u
                    .parse()
                    .map_err(|_| GraphError::MalformedEdgeLine(line.to_string()))?;
                let w: usize = w
                    .parse()
                    .map_err(|_| GraphError::MalformedEdgeLine(line.to_string()))?;
                (u, w)
            }
            _ => return Err(GraphError::MalformedEdgeLine(line.to_string())),
        };
        if u == w {
            return Err(GraphError::SelfLoop(u));
        }
        if u > w {
            return Err(GraphError::BadEdgeOrder(u, w));
        }
        edges.push((u, w));
    }
    if edges.len() != e {
        return Err(GraphError::WrongEdgeCount {
            expected: e,
            found: edges.len(),
        });
    }
    Ok((v, edges))
}

/// Looks up a named catalog graph: `K2`..`K8` cliques, `C3`..`C12` cycles,
/// `P2`..`P10` paths (`Pk` has k vertices), `S3`..`S8` stars (`Sk` has k
/// leaves).
pub fn catalog(name: &str) -> Result<PatternGraph, GraphError> {
    let err = || GraphError::UnknownCatalogName(name.to_string());
    if name.len() < 2 || !name.is_ascii() {
        return Err(err());
    }
    let (kind, num) = name.split_at(1);
    let k: usize = num.parse().map_err(|_| err())?;
    match kind {
        "K" if (2..=8).contains(&k) => {
            let mut edges = Vec::new();
            for u in 0..k {
                for w in u + 1..k {
                    edges.push((u, w));
                }
            }
            PatternGraph::new(k, &edges)
        }
        "C" if (3..=12).contains(&k) => {
            let edges: Vec<_> = (0..k).map(|i| (i.min((i + 1) % k), i.max((i + 1) % k))).collect();
            PatternGraph::new(k, &edges)
        }
        "P" if (2..=10).contains(&k) => {
            let edges: Vec<_> = (0..k - 1).map(|i| (i, i + 1)).collect();
            PatternGraph::new(k, &edges)
        }
        "S" if (3..=8).contains(&k) => {
            let edges: Vec<_> = (1..=k).map(|i| (0, i)).collect();
            PatternGraph::new(k + 1, &edges)
        }
        _ => Err(err()),
    }
}

/// Every catalog name, for exhaustive tests.
pub fn catalog_names() -> Vec<String> {
    let mut names = Vec::new();
    for k in 2..=8 {
        names.push(format!("K{k}"));
    }
    for k in 3..=12 {
        names.push(format!("C{k}"));
    }
    for k in 2..=10 {
        names.push(format!("P{k}"));
    }
    for k in 3..=8 {
        names.push(format!("S{k}"));
    }
    names
}

/// True iff an edge-preserving vertex bijection `a` -> `b` exists.
///
/// Backtracking over vertex maps with degree-sequence pruning; both inputs
/// must respect the pattern size cap.
pub fn is_isomorphic(a: &PatternGraph, b: &PatternGraph) -> Result<bool, GraphError> {
    a.check_size_cap()?;
    b.check_size_cap()?;
    if a.vertex_count != b.vertex_count || a.edges.len() != b.edges.len() {
        return Ok(false);
    }
    let mut deg_a: Vec<usize> = (0..a.vertex_count).map(|v| a.degree(v)).collect();
    let mut deg_b: Vec<usize> = (0..b.vertex_count).map(|v| b.degree(v)).collect();
    deg_a.sort_unstable();
    deg_b.sort_unstable();
    if deg_a != deg_b {
        return Ok(false);
    }
    let mut image = vec![usize::MAX; a.vertex_count];
    let mut used: u16 = 0;
    Ok(extend_isomorphism(a, b, 0, &mut image, &mut used))
}

fn extend_isomorphism(
    a: &PatternGraph,
    b: &PatternGraph,
    next: usize,
    image: &mut [usize],
    used: &mut u16,
) -> bool {
    if next == a.vertex_count() {
        return true;
    }
    for cand in 0..b.vertex_count() {
        if *used >> cand & 1 != 0 || a.degree(next) != b.degree(cand) {
            continue;
        }
        let consistent =
            (0..next).all(|prev| a.has_edge(next, prev) == b.has_edge(cand, image[prev]));
        if !consistent {
            continue;
        }
        image[next] = cand;
        *used |= 1 << cand;
        if extend_isomorphism(a, b, next + 1, image, used) {
            return true;
        }
        *used &= !(1 << cand);
        image[next] = usize::MAX;
    }
    false
}

/// |Aut(H)|: the number of adjacency-preserving vertex permutations,
/// found by exhaustive search with degree pruning.
pub fn automorphism_count(h: &PatternGraph) -> Result<u64, GraphError> {
    h.check_size_cap()?;
    let mut image = vec![usize::MAX; h.vertex_count()];
    let mut used: u16 = 0;
    let mut count = 0u64;
    count_automorphisms(h, 0, &mut image, &mut used, &mut count);
    Ok(count)
}

fn count_automorphisms(
    h: &PatternGraph,
    next: usize,
    image: &mut [usize],
    used: &mut u16,
    count: &mut u64,
) {
    if next == h.vertex_count() {
        *count += 1;
        return;
    }
    for cand in 0..h.vertex_count() {
        if *used >> cand & 1 != 0 || h.degree(next) != h.degree(cand) {
            continue;
        }
        if !(0..next).all(|prev| h.has_edge(next, prev) == h.has_edge(cand, image[prev])) {
            continue;
        }
        image[next] = cand;
        *used |= 1 << cand;
        count_automorphisms(h, next + 1, image, used, count);
        *used &= !(1 << cand);
        image[next] = usize::MAX;
    }
}

/// An ordered list of pairwise nonisomorphic connected patterns, each with
/// at least two vertices.
#[derive(Clone, Debug)]
pub struct GraphFamily {
    patterns: Vec<PatternGraph>,
}

impl GraphFamily {
    /// Validates the three family invariants, preserving order.
    pub fn new(patterns: Vec<PatternGraph>) -> Result<Self, FamilyError> {
        if patterns.is_empty() {
            return Err(FamilyError::EmptyFamily);
        }
        for (i, p) in patterns.iter().enumerate() {
            if p.vertex_count() < 2 {
                return Err(FamilyError::TooSmallMember(i));
            }
            if !p.is_connected() {
                return Err(FamilyError::DisconnectedMember(i));
            }
        }
        for i in 0..patterns.len() {
            for j in i + 1..patterns.len() {
                if is_isomorphic(&patterns[i], &patterns[j]).unwrap_or(false) {
                    return Err(FamilyError::IsomorphicPair(i, j));
                }
            }
        }
        Ok(GraphFamily { patterns })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }

    pub fn members(&self) -> &[PatternGraph] {
        &self.patterns
    }

    pub fn member(&self, i: usize) -> &PatternGraph {
        &self.patterns[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, PatternGraph> {
        self.patterns.iter()
    }
}

/// An immutable host graph on `n` vertices with bitset adjacency rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HostGraph {
    n: usize,
    rows: Vec<BitSet>,
    edge_count: usize,
}

impl HostGraph {
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::Empty);
        }
        let mut rows = vec![BitSet::new(n); n];
        let mut edge_count = 0usize;
        for &(a, b) in edges {
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let (u, w) = if a < b { (a, b) } else { (b, a) };
            if w >= n {
                return Err(GraphError::VertexOutOfRange {
                    vertex: w,
                    vertex_count: n,
                });
            }
            if rows[u].contains(w) {
                return Err(GraphError::DuplicateEdge(u, w));
            }
            rows[u].insert(w);
            rows[w].insert(u);
            edge_count += 1;
        }
        Ok(HostGraph {
            n,
            rows,
            edge_count,
        })
    }

    pub fn empty(n: usize) -> Self {
        HostGraph {
            n,
            rows: vec![BitSet::new(n); n],
            edge_count: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut rows = vec![BitSet::new(n); n];
        for (v, row) in rows.iter_mut().enumerate() {
            for w in 0..n {
                if w != v {
                    row.insert(w);
                }
            }
        }
        HostGraph {
            n,
            rows,
            edge_count: n * n.saturating_sub(1) / 2,
        }
    }

    /// Converts a pattern into a host on the same vertex set.
    pub fn from_pattern(p: &PatternGraph) -> Self {
        HostGraph::new(p.vertex_count(), p.edges())
            .expect("pattern invariants imply host invariants")
    }

    /// Parses the same text format as patterns (or a catalog name), without
    /// the pattern storage limit.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let trimmed = text.trim();
        if !trimmed.contains('\n') && !trimmed.contains(' ') {
            return Ok(HostGraph::from_pattern(&catalog(trimmed)?));
        }
        let (n, edges) = parse_header_and_edges(trimmed)?;
        HostGraph::new(n, &edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{} {}\n", self.n, self.edge_count);
        for (u, w) in self.edge_pairs() {
            out.push_str(&format!("{} {}\n", u, w));
        }
        out
    }

    #[inline]
    pub fn vertex_count(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    #[inline]
    pub fn row(&self, v: usize) -> &BitSet {
        &self.rows[v]
    }

    #[inline]
    pub fn has_edge(&self, u: usize, w: usize) -> bool {
        self.rows[u].contains(w)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.rows[v].count()
    }

    /// Edges as `(u, w)` pairs with `u < w`, lexicographic.
    pub fn edge_pairs(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for u in 0..self.n {
            for w in self.rows[u].iter_ones() {
                if w > u {
                    out.push((u, w));
                }
            }
        }
        out
    }

    /// Relabels vertices by `perm` (vertex `v` becomes `perm[v]`).
    pub fn relabel(&self, perm: &[usize]) -> HostGraph {
        assert_eq!(perm.len(), self.n);
        let edges: Vec<(usize, usize)> = self
            .edge_pairs()
            .into_iter()
            .map(|(u, w)| (perm[u], perm[w]))
            .collect();
        HostGraph::new(self.n, &edges).expect("relabeling preserves validity")
    }
}
