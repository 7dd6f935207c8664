//! Brute-force oracles, independent of the library's counting and packing
//! paths: subset enumeration plus isomorphism checks only.
#![allow(dead_code)] // each test binary uses its own subset

use gnpmod::graph::{is_isomorphic, HostGraph, PatternGraph};

/// Calls `f` with every k-subset of 0..n (as a sorted index slice).
pub fn for_each_combination(n: usize, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // Advance to the next combination.
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Unlabeled copy count by exhaustive enumeration: every v-subset of host
/// vertices, every e-subset of its induced edges, one isomorphism check
/// each. Quadratic-exponential and proud of it.
pub fn oracle_count_copies(host: &HostGraph, pattern: &PatternGraph) -> u64 {
    let n = host.vertex_count();
    let v = pattern.vertex_count();
    let e = pattern.edge_count();
    if v > n {
        return 0;
    }
    let mut count = 0u64;
    for_each_combination(n, v, &mut |subset| {
        let mut induced: Vec<(usize, usize)> = Vec::new();
        for (a, &u) in subset.iter().enumerate() {
            for &w in &subset[a + 1..] {
                if host.has_edge(u, w) {
                    induced.push((u, w));
                }
            }
        }
        if induced.len() < e {
            return;
        }
        let position = |x: usize| subset.iter().position(|&s| s == x).unwrap();
        for_each_combination(induced.len(), e, &mut |edge_subset| {
            let edges: Vec<(usize, usize)> = edge_subset
                .iter()
                .map(|&i| {
                    let (u, w) = induced[i];
                    (position(u), position(w))
                })
                .collect();
            let candidate = PatternGraph::new(v, &edges).expect("valid sub-edges");
            if is_isomorphic(&candidate, pattern).expect("small graphs") {
                count += 1;
            }
        });
    });
    count
}

/// Maximum number of pairwise vertex-disjoint sets, by plain bitmask
/// enumeration over all subsets of the copy list (at most 2^20 here).
pub fn oracle_max_disjoint(copy_vertex_sets: &[Vec<usize>]) -> u32 {
    let x = copy_vertex_sets.len();
    assert!(x <= 20, "oracle is exponential in the copy count");
    let masks: Vec<u64> = copy_vertex_sets
        .iter()
        .map(|vs| vs.iter().map(|&v| 1u64 << v).sum())
        .collect();
    let mut best = 0u32;
    for pick in 0u32..(1u32 << x) {
        let mut union = 0u64;
        let mut ok = true;
        let mut total = 0u32;
        for (i, &m) in masks.iter().enumerate() {
            if pick >> i & 1 == 0 {
                continue;
            }
            if union & m != 0 {
                ok = false;
                break;
            }
            union |= m;
            total += 1;
        }
        if ok {
            best = best.max(total);
        }
    }
    best
}
