//! Seeded sampling of G(n,p) and the two-step exposure that factors it
//! through G(n,2p) plus a fair coin per retained edge.
//!
//! Reproducibility contract: the generator state for a trial is a pure
//! function of `(master_seed, trial_index)`, so trials can run in any order
//! and on any number of threads without changing a single bit of output.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::HostGraph;

/// Generator identifier recorded in every result file. The per-trial stream
/// is ChaCha8 seeded from the master seed with the trial index as stream id.
pub const GENERATOR_ID: &str = "chacha8/rand_chacha-0.3";

#[derive(Debug, Error, PartialEq)]
pub enum SampleError {
    #[error("edge probability must lie in [0, 1], got {0}")]
    ProbabilityOutOfRange(f64),
    #[error("two-step exposure needs p <= 1/2, got {0}")]
    ThinningProbabilityTooLarge(f64),
}

/// Addresses one trial's generator: `(master_seed, trial_index)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master_seed: u64,
    pub trial_index: u64,
}

impl SeedSpec {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        SeedSpec {
            master_seed,
            trial_index,
        }
    }

    /// The trial's generator. ChaCha8 keyed by the master seed; the trial
    /// index selects an independent stream, so no trial reads another
    /// trial's draws.
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master_seed);
        rng.set_stream(self.trial_index);
        rng
    }
}

/// Sampler provenance embedded in result files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SamplerMeta {
    pub generator: String,
    pub master_seed: u64,
    /// How per-trial state is derived from the master seed.
    pub stream_derivation: String,
    /// How pair draws map to edges.
    pub draw_scheme: String,
}

impl SamplerMeta {
    pub fn direct(master_seed: u64) -> Self {
        SamplerMeta {
            generator: GENERATOR_ID.to_string(),
            master_seed,
            stream_derivation: "seed_from_u64(master_seed), stream = trial_index".to_string(),
            draw_scheme: "one f64 per vertex pair, lexicographic order".to_string(),
        }
    }

    pub fn two_step(master_seed: u64) -> Self {
        SamplerMeta {
            generator: GENERATOR_ID.to_string(),
            master_seed,
            stream_derivation: "seed_from_u64(master_seed), stream = trial_index".to_string(),
            draw_scheme:
                "one f64 per vertex pair (membership at 2p), one more per retained pair (coin)"
                    .to_string(),
        }
    }
}

/// Samples G(n,p): each of the `C(n,2)` vertex pairs becomes an edge
/// independently with probability `p`. One uniform draw per pair, pairs in
/// lexicographic order, so identical seeds give identical graphs.
pub fn sample_gnp(n: usize, p: f64, seed: SeedSpec) -> Result<HostGraph, SampleError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SampleError::ProbabilityOutOfRange(p));
    }
    let mut rng = seed.rng();
    let mut edges = Vec::new();
    for u in 0..n {
        for w in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, w));
            }
        }
    }
    Ok(HostGraph::new(n, &edges).expect("generated pairs are valid"))
}

/// Two-step exposure: samples `gprime ~ G(n, 2p)`, then keeps each of its
/// edges independently with probability 1/2. The kept graph is marginally
/// G(n,p) and is a subgraph of `gprime` by construction.
///
/// The coin uses a separate draw from the membership test, so the kept graph
/// is *not* the same sample `sample_gnp` would produce at this seed.
pub fn sample_two_step(
    n: usize,
    p: f64,
    seed: SeedSpec,
) -> Result<(HostGraph, HostGraph), SampleError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SampleError::ProbabilityOutOfRange(p));
    }
    if p > 0.5 {
        return Err(SampleError::ThinningProbabilityTooLarge(p));
    }
    let mut rng = seed.rng();
    let two_p = 2.0 * p;
    let mut prime_edges = Vec::new();
    let mut kept_edges = Vec::new();
    for u in 0..n {
        for w in u + 1..n {
            if rng.gen::<f64>() < two_p {
                prime_edges.push((u, w));
                if rng.gen::<f64>() < 0.5 {
                    kept_edges.push((u, w));
                }
            }
        }
    }
    let gprime = HostGraph::new(n, &prime_edges).expect("generated pairs are valid");
    let g = HostGraph::new(n, &kept_edges).expect("generated pairs are valid");
    Ok((gprime, g))
}
