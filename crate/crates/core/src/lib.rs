//! Exact and statistical machinery for studying pattern-copy counts modulo q
//! in sparse random graphs: density invariants and thresholds, seeded
//! sampling, bitset subgraph counting, vertex-disjoint packing, exact
//! character sums, and Monte Carlo distance-to-uniform experiments.

pub mod bitset;
pub mod charsum;
pub mod count;
pub mod graph;
pub mod invariants;
pub mod montecarlo;
pub mod packing;
pub mod sample;
pub mod stats;
