//! Seeded trial orchestration: empirical and exact distributions of the
//! modular copy-count vector, distance-to-uniform measurements, and the
//! regime experiments built on them.
//!
//! Trials are independent tasks keyed by trial index; the histogram
//! reduction is integer addition, so results do not depend on the number of
//! worker threads.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::count::{xi_vector, CountError, ModVector, MAX_MODULUS};
use crate::graph::{GraphFamily, HostGraph};
use crate::invariants::{self, InvariantError, Rational};
use crate::sample::{sample_gnp, sample_two_step, SampleError, SamplerMeta, SeedSpec};

/// Histogram cell budget: q^k may not exceed this.
pub const MAX_CELLS: usize = 1 << 20;

#[derive(Debug, Error, PartialEq)]
pub enum ExperimentError {
    #[error("at least one trial required")]
    NoTrials,
    #[error("q^k = {0} exceeds the cell budget of {MAX_CELLS}")]
    TooManyCells(u128),
    #[error("p-specification evaluates to {0}, outside (0, 1]")]
    PspecOutOfRange(f64),
    #[error("exact law needs C(n,2) <= 24 edge slots, got n = {0}")]
    ExactHostTooLarge(usize),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
}

/// How the edge probability depends on n.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PSpec {
    /// Fixed p.
    Constant { p: f64 },
    /// `p = scale * n^exponent` with an exact rational exponent.
    Power { scale: f64, exponent: Rational },
}

impl PSpec {
    pub fn constant(p: f64) -> Self {
        PSpec::Constant { p }
    }

    pub fn power(scale: f64, exponent: Rational) -> Self {
        PSpec::Power { scale, exponent }
    }

    pub fn evaluate(&self, n: usize) -> f64 {
        match self {
            PSpec::Constant { p } => *p,
            PSpec::Power { scale, exponent } => scale * (n as f64).powf(exponent.to_f64()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PSpec::Constant { p } => format!("p = {p}"),
            PSpec::Power { scale, exponent } => format!("p = {scale} * n^({exponent})"),
        }
    }
}

/// Whether trials draw the graph directly or through the two-step exposure
/// (sampling at 2p, then thinning by a fair coin).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Exposure {
    Direct,
    TwoStep,
}

/// A complete experiment description. Everything downstream is a pure
/// function of this struct plus the family.
#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub n: usize,
    pub q: u32,
    pub trials: u64,
    pub pspec: PSpec,
    pub master_seed: u64,
    /// Offset added to trial indices; lets several runs share a master seed
    /// with disjoint generator streams.
    pub trial_offset: u64,
    pub exposure: Exposure,
}

impl ExperimentConfig {
    pub fn new(n: usize, q: u32, trials: u64, pspec: PSpec, master_seed: u64) -> Self {
        ExperimentConfig {
            n,
            q,
            trials,
            pspec,
            master_seed,
            trial_offset: 0,
            exposure: Exposure::Direct,
        }
    }

    fn validate(&self, family: &GraphFamily) -> Result<(f64, usize), ExperimentError> {
        if self.trials == 0 {
            return Err(ExperimentError::NoTrials);
        }
        if !(2..=MAX_MODULUS).contains(&self.q) {
            return Err(ExperimentError::Count(CountError::ModulusOutOfRange(
                self.q,
            )));
        }
        let cells = (self.q as u128)
            .checked_pow(family.len() as u32)
            .unwrap_or(u128::MAX);
        if cells > MAX_CELLS as u128 {
            return Err(ExperimentError::TooManyCells(cells));
        }
        for member in family.iter() {
            member.check_size_cap().map_err(CountError::from)?;
        }
        let p = self.pspec.evaluate(self.n);
        if !(p > 0.0 && p <= 1.0) {
            return Err(ExperimentError::PspecOutOfRange(p));
        }
        if self.exposure == Exposure::TwoStep && p > 0.5 {
            return Err(ExperimentError::Sample(
                SampleError::ThinningProbabilityTooLarge(p),
            ));
        }
        Ok((p, cells as usize))
    }

    fn sampler_meta(&self) -> SamplerMeta {
        match self.exposure {
            Exposure::Direct => SamplerMeta::direct(self.master_seed),
            Exposure::TwoStep => SamplerMeta::two_step(self.master_seed),
        }
    }
}

/// Empirical distribution of the modular count vector over q^k cells.
///
/// Cells are indexed little-endian: component i of cell `a` is digit i of
/// `a` in base q.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmpiricalDist {
    pub q: u32,
    pub k: usize,
    pub counts: Vec<u64>,
    pub trials: u64,
}

impl EmpiricalDist {
    pub fn cell_index(&self, xi: &ModVector) -> usize {
        cell_index(self.q, &xi.values)
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.trials as f64)
            .collect()
    }

    /// Half L1 distance to the uniform distribution.
    pub fn tv_to_uniform(&self) -> f64 {
        let uniform = 1.0 / self.counts.len() as f64;
        0.5 * self
            .counts
            .iter()
            .map(|&c| (c as f64 / self.trials as f64 - uniform).abs())
            .sum::<f64>()
    }

    /// Plug-in bias scale of the empirical TV: sqrt((q^k - 1) / (4T)).
    /// An empirical TV below this is indistinguishable from zero.
    pub fn bias_scale(&self) -> f64 {
        ((self.counts.len() as f64 - 1.0) / (4.0 * self.trials as f64)).sqrt()
    }

    /// Marginal histogram over the given components, in their listed order.
    pub fn marginal(&self, components: &[usize]) -> EmpiricalDist {
        let cells = (self.q as u64).pow(components.len() as u32) as usize;
        let mut counts = vec![0u64; cells];
        for (idx, &count) in self.counts.iter().enumerate() {
            let digits = cell_digits(self.q, self.k, idx);
            let sub: Vec<u32> = components.iter().map(|&i| digits[i]).collect();
            counts[cell_index(self.q, &sub)] += count;
        }
        EmpiricalDist {
            q: self.q,
            k: components.len(),
            counts,
            trials: self.trials,
        }
    }
}

/// Exact distribution of the modular count vector, from enumerating every
/// labeled graph on n vertices.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExactDist {
    pub q: u32,
    pub k: usize,
    pub probs: Vec<f64>,
}

impl ExactDist {
    pub fn tv_to_uniform(&self) -> f64 {
        let uniform = 1.0 / self.probs.len() as f64;
        0.5 * self.probs.iter().map(|p| (p - uniform).abs()).sum::<f64>()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

pub fn cell_index(q: u32, digits: &[u32]) -> usize {
    let mut idx = 0u64;
    for &d in digits.iter().rev() {
        idx = idx * q as u64 + d as u64;
    }
    idx as usize
}

pub fn cell_digits(q: u32, k: usize, mut idx: usize) -> Vec<u32> {
    (0..k)
        .map(|_| {
            let d = (idx % q as usize) as u32;
            idx /= q as usize;
            d
        })
        .collect()
}

fn sample_host(cfg: &ExperimentConfig, p: f64, trial: u64) -> HostGraph {
    let seed = SeedSpec::new(cfg.master_seed, cfg.trial_offset + trial);
    match cfg.exposure {
        Exposure::Direct => sample_gnp(cfg.n, p, seed).expect("validated p"),
        Exposure::TwoStep => sample_two_step(cfg.n, p, seed).expect("validated p").1,
    }
}

/// Runs the trials and histograms the modular count vector. Fully
/// determined by the config; trials run in parallel.
pub fn run_trials(
    cfg: &ExperimentConfig,
    family: &GraphFamily,
) -> Result<EmpiricalDist, ExperimentError> {
    let (p, cells) = cfg.validate(family)?;
    let q = cfg.q;
    let counts = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let host = sample_host(cfg, p, trial);
            let xi = xi_vector(&host, family, q).expect("validated parameters");
            cell_index(q, &xi.values)
        })
        .fold(
            || vec![0u64; cells],
            |mut hist, idx| {
                hist[idx] += 1;
                hist
            },
        )
        .reduce(
            || vec![0u64; cells],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    Ok(EmpiricalDist {
        q,
        k: family.len(),
        counts,
        trials: cfg.trials,
    })
}

/// Config echo embedded in result files.
#[derive(Clone, Debug, Serialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub q: u32,
    pub trials: u64,
    pub trial_offset: u64,
    pub exposure: Exposure,
    pub p_spec: PSpec,
    pub p: f64,
    pub k: usize,
    /// Members in the text format, family order.
    pub family: Vec<String>,
}

impl ConfigEcho {
    fn new(cfg: &ExperimentConfig, family: &GraphFamily, p: f64) -> Self {
        ConfigEcho {
            n: cfg.n,
            q: cfg.q,
            trials: cfg.trials,
            trial_offset: cfg.trial_offset,
            exposure: cfg.exposure,
            p_spec: cfg.pspec.clone(),
            p,
            k: family.len(),
            family: family.iter().map(|g| g.to_text()).collect(),
        }
    }
}

/// One simulation result: config echo, sampler provenance, histogram, and
/// the distance measurements.
#[derive(Clone, Debug, Serialize)]
pub struct TrialReport {
    pub config: ConfigEcho,
    pub sampler: SamplerMeta,
    pub histogram: Vec<u64>,
    pub tv_to_uniform: f64,
    pub bias_scale: f64,
}

/// Runs the trials and assembles the full report.
pub fn simulate(
    cfg: &ExperimentConfig,
    family: &GraphFamily,
) -> Result<TrialReport, ExperimentError> {
    let (p, _) = cfg.validate(family)?;
    let dist = run_trials(cfg, family)?;
    Ok(TrialReport {
        config: ConfigEcho::new(cfg, family, p),
        sampler: cfg.sampler_meta(),
        tv_to_uniform: dist.tv_to_uniform(),
        bias_scale: dist.bias_scale(),
        histogram: dist.counts,
    })
}

/// Exact law of the modular count vector at small n: enumerates all
/// 2^C(n,2) labeled graphs, weighting each by its edge count.
pub fn exact_xi_distribution(
    n: usize,
    p: f64,
    family: &GraphFamily,
    q: u32,
) -> Result<ExactDist, ExperimentError> {
    let pair_count = n * n.saturating_sub(1) / 2;
    if pair_count > 24 {
        return Err(ExperimentError::ExactHostTooLarge(n));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(ExperimentError::PspecOutOfRange(p));
    }
    if !(2..=MAX_MODULUS).contains(&q) {
        return Err(ExperimentError::Count(CountError::ModulusOutOfRange(q)));
    }
    let cells = (q as u128)
        .checked_pow(family.len() as u32)
        .unwrap_or(u128::MAX);
    if cells > MAX_CELLS as u128 {
        return Err(ExperimentError::TooManyCells(cells));
    }
    let cells = cells as usize;

    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| (u + 1..n).map(move |w| (u, w)))
        .collect();
    let mut weight_by_edges = vec![0.0f64; pair_count + 1];
    for (e, w) in weight_by_edges.iter_mut().enumerate() {
        *w = p.powi(e as i32) * (1.0 - p).powi((pair_count - e) as i32);
    }

    // Kahan accumulation per cell; 2^24 tiny weights must sum to 1 within
    // 1e-12.
    let mut sums = vec![0.0f64; cells];
    let mut comps = vec![0.0f64; cells];
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(pair_count);
    for mask in 0u32..(1u32 << pair_count) {
        edges.clear();
        let mut bits = mask;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            edges.push(pairs[i]);
        }
        let host = HostGraph::new(n, &edges).expect("pairs are valid");
        let xi = xi_vector(&host, family, q)?;
        let idx = cell_index(q, &xi.values);
        let w = weight_by_edges[mask.count_ones() as usize];
        let y = w - comps[idx];
        let t = sums[idx] + y;
        comps[idx] = (t - sums[idx]) - y;
        sums[idx] = t;
    }
    let dist = ExactDist {
        q,
        k: family.len(),
        probs: sums,
    };
    debug_assert!((dist.total() - 1.0).abs() < 1e-12);
    Ok(dist)
}

/// One row of a decay study.
#[derive(Clone, Debug, Serialize)]
pub struct DecayRow {
    pub n: usize,
    pub p: f64,
    pub log_phi: f64,
    pub tv: f64,
    pub bias_scale: f64,
}

/// A decay study: TV to uniform along a grid of n, with the exponent
/// functional evaluated at each point.
#[derive(Clone, Debug, Serialize)]
pub struct DecayStudy {
    pub p_spec: PSpec,
    pub q: u32,
    pub trials: u64,
    pub master_seed: u64,
    pub sampler: SamplerMeta,
    /// Set when the p-specification does not outgrow the containment
    /// threshold (or does not depend on n at all).
    pub regime_warning: Option<String>,
    pub rows: Vec<DecayRow>,
}

impl DecayStudy {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,p,log_phi,tv,bias_scale\n");
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.n, r.p, r.log_phi, r.tv, r.bias_scale
            ));
        }
        out
    }
}

fn regime_warning(family: &GraphFamily, pspec: &PSpec) -> Option<String> {
    match pspec {
        PSpec::Constant { .. } => {
            Some("p-specification is constant; the decay trend needs p to vary with n".to_string())
        }
        PSpec::Power { exponent, .. } => {
            let (m_family, _) = invariants::family_max_density(family).ok()?;
            let threshold_exp = m_family.recip().neg();
            match exponent.cmp(&threshold_exp) {
                std::cmp::Ordering::Greater => None,
                std::cmp::Ordering::Equal => Some(format!(
                    "p tracks the containment threshold n^({threshold_exp}) exactly; \
                     it does not outgrow it"
                )),
                std::cmp::Ordering::Less => Some(format!(
                    "p falls below the containment threshold n^({threshold_exp})"
                )),
            }
        }
    }
}

/// Runs one simulation per grid point and tabulates TV against the exponent
/// functional. Grid points share the master seed but use disjoint trial
/// banks, so their samples are independent.
pub fn decay_study(
    family: &GraphFamily,
    pspec: &PSpec,
    q: u32,
    trials: u64,
    master_seed: u64,
    n_grid: &[usize],
) -> Result<DecayStudy, ExperimentError> {
    let mut rows = Vec::with_capacity(n_grid.len());
    for (slot, &n) in n_grid.iter().enumerate() {
        let cfg = ExperimentConfig {
            n,
            q,
            trials,
            pspec: pspec.clone(),
            master_seed,
            trial_offset: slot as u64 * trials,
            exposure: Exposure::Direct,
        };
        let (p, _) = cfg.validate(family)?;
        let dist = run_trials(&cfg, family)?;
        rows.push(DecayRow {
            n,
            p,
            log_phi: invariants::phi(family, n, p)?.log_phi,
            tv: dist.tv_to_uniform(),
            bias_scale: dist.bias_scale(),
        });
    }
    Ok(DecayStudy {
        p_spec: pspec.clone(),
        q,
        trials,
        master_seed,
        sampler: SamplerMeta::direct(master_seed),
        regime_warning: regime_warning(family, pspec),
        rows,
    })
}

/// Result of the split-regime experiment at `p = n^(-alpha)`.
#[derive(Clone, Debug, Serialize)]
pub struct CorollaryReport {
    pub config: ConfigEcho,
    pub sampler: SamplerMeta,
    pub alpha: Rational,
    /// Indices whose maximum density is below 1/alpha (counts go uniform).
    pub sparse_side: Vec<usize>,
    /// Indices whose maximum density is above 1/alpha (counts vanish).
    pub dense_side: Vec<usize>,
    /// Fraction of trials in which every dense-side component was 0.
    pub frac_dense_zero: f64,
    /// TV of the sparse-side marginal to uniform on its cells.
    pub sparse_marginal_tv: f64,
    pub sparse_marginal_bias_scale: f64,
    /// frac_dense_zero >= 0.9 at desk scale.
    pub dense_zero_ok: bool,
    /// sparse_marginal_tv <= 0.1 at desk scale.
    pub sparse_uniform_ok: bool,
    pub histogram: Vec<u64>,
}

/// Runs trials at `p = n^(-alpha)` and measures both halves of the split
/// prediction: dense-side counts all zero, sparse-side marginal uniform.
pub fn corollary_experiment(
    family: &GraphFamily,
    alpha: Rational,
    n: usize,
    q: u32,
    trials: u64,
    master_seed: u64,
) -> Result<CorollaryReport, ExperimentError> {
    let split = invariants::classify_corollary(family, alpha)?;
    let pspec = PSpec::power(1.0, alpha.neg());
    let cfg = ExperimentConfig::new(n, q, trials, pspec, master_seed);
    let (p, _) = cfg.validate(family)?;
    let dist = run_trials(&cfg, family)?;

    let dense_zero_count: u64 = dist
        .counts
        .iter()
        .enumerate()
        .filter(|&(idx, _)| {
            let digits = cell_digits(q, family.len(), idx);
            split.dense_side.iter().all(|&j| digits[j] == 0)
        })
        .map(|(_, &c)| c)
        .sum();
    let frac_dense_zero = dense_zero_count as f64 / trials as f64;

    let marginal = dist.marginal(&split.sparse_side);
    let sparse_marginal_tv = marginal.tv_to_uniform();
    let sparse_marginal_bias_scale = marginal.bias_scale();

    Ok(CorollaryReport {
        config: ConfigEcho::new(&cfg, family, p),
        sampler: cfg.sampler_meta(),
        alpha,
        sparse_side: split.sparse_side,
        dense_side: split.dense_side,
        frac_dense_zero,
        sparse_marginal_tv,
        sparse_marginal_bias_scale,
        dense_zero_ok: frac_dense_zero >= 0.9,
        sparse_uniform_ok: sparse_marginal_tv <= 0.1,
        histogram: dist.counts,
    })
}
