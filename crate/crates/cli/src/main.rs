//! Command-line front end: invariants, counting, seeded experiments, packing
//! and character sums, with JSON/CSV/text output.

mod output;
mod resolve;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use gnpmod::charsum::{
    build_polynomial, exact_char_sum, greedy_block_system, verify_disjoint_system,
};
use gnpmod::count::count_copies;
use gnpmod::invariants::{
    classify_corollary, density, family_threshold, max_density, phi, Rational,
};
use gnpmod::montecarlo::{
    corollary_experiment, decay_study, exact_xi_distribution, simulate, ExperimentConfig,
    Exposure, PSpec,
};
use gnpmod::packing::{packing_report, DEFAULT_COPY_CAP};

use output::{emit, Format, OutputOpts};
use resolve::{CliError, ConfigFile};

#[derive(Parser)]
#[command(
    name = "gnpmod",
    version,
    about = "Subgraph counts modulo q in random graphs: invariants, seeded experiments, character sums"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by every subcommand.
#[derive(Args, Clone)]
struct Common {
    /// JSON config file whose keys mirror the long flags; flags win.
    #[arg(long, global = true)]
    config: Option<String>,
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    out: Option<String>,
    /// Output format: json, csv or text.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Omit the metadata block (timestamps), making output byte-stable.
    #[arg(long, global = true)]
    no_meta: bool,
    /// Worker thread count (env GNPMOD_THREADS). Output does not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Density invariants, thresholds and the exponent functional of a family.
    Invariants(InvariantsArgs),
    /// Copy counts of one pattern in one host graph.
    Count(CountArgs),
    /// Seeded Monte Carlo histogram of the modular count vector.
    Simulate(SimulateArgs),
    /// Exact law of the modular count vector at small n.
    Exact(ExactArgs),
    /// TV-to-uniform decay along a grid of n.
    Decay(DecayArgs),
    /// Split-regime experiment at p = n^(-alpha).
    Corollary(CorollaryArgs),
    /// Copy packing quantities X, Z, greedy/exact packing and the bound.
    Packing(PackingArgs),
    /// Copy polynomial and its exact character sum on a small host.
    Charsum(CharsumArgs),
}

#[derive(Args)]
struct InvariantsArgs {
    /// Comma-separated members (catalog names or graph files).
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Constant edge probability.
    #[arg(long)]
    p: Option<f64>,
    /// Exact rational exponent e for p = n^e.
    #[arg(long, allow_hyphen_values = true)]
    p_exp: Option<String>,
    /// Scale c for p = c * n^e.
    #[arg(long)]
    p_scale: Option<f64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CountArgs {
    /// Host graph file in the text format.
    #[arg(long)]
    host_file: Option<String>,
    /// Pattern: catalog name or graph file.
    #[arg(long)]
    pattern: Option<String>,
    /// Also report the copy count modulo q.
    #[arg(long)]
    q: Option<u32>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    p_exp: Option<String>,
    #[arg(long)]
    p_scale: Option<f64>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Draw graphs through the two-step exposure instead of directly.
    #[arg(long)]
    two_step: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ExactArgs {
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<u32>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct DecayArgs {
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated grid of n values.
    #[arg(long)]
    n_grid: Option<String>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    p_exp: Option<String>,
    #[arg(long)]
    p_scale: Option<f64>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CorollaryArgs {
    #[arg(long)]
    family: Option<String>,
    /// Exact rational exponent alpha for p = n^(-alpha).
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    q: Option<u32>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PackingArgs {
    /// Host graph file; alternatively sample one with --n/--p/--seed.
    #[arg(long)]
    host_file: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    pattern: Option<String>,
    /// Copy enumeration cap.
    #[arg(long)]
    cap: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct CharsumArgs {
    /// Host graph file; alternatively sample one with --n/--p/--seed.
    #[arg(long)]
    host_file: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    family: Option<String>,
    /// Comma-separated weight vector over the family, in Z_q.
    #[arg(long)]
    c: Option<String>,
    #[arg(long)]
    q: Option<u32>,
    /// Bernoulli weight for the character sum (the thinning coin is 1/2).
    #[arg(long)]
    eval_p: Option<f64>,
    /// Also build the greedy disjoint block system and check its conditions.
    #[arg(long)]
    verify: bool,
    #[command(flatten)]
    common: Common,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{}", err.to_stderr_json());
            ExitCode::from(err.exit_code())
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = match &cli.command {
        Command::Invariants(a) => a.common.clone(),
        Command::Count(a) => a.common.clone(),
        Command::Simulate(a) => a.common.clone(),
        Command::Exact(a) => a.common.clone(),
        Command::Decay(a) => a.common.clone(),
        Command::Corollary(a) => a.common.clone(),
        Command::Packing(a) => a.common.clone(),
        Command::Charsum(a) => a.common.clone(),
    };
    let cfg = ConfigFile::load(common.config.as_deref())?;
    let opts = OutputOpts {
        format: Format::parse(&common.format)?,
        out: common.out.clone(),
        no_meta: common.no_meta,
    };
    init_threads(common.threads, &cfg)?;

    match cli.command {
        Command::Invariants(args) => cmd_invariants(args, &cfg, &opts),
        Command::Count(args) => cmd_count(args, &cfg, &opts),
        Command::Simulate(args) => cmd_simulate(args, &cfg, &opts),
        Command::Exact(args) => cmd_exact(args, &cfg, &opts),
        Command::Decay(args) => cmd_decay(args, &cfg, &opts),
        Command::Corollary(args) => cmd_corollary(args, &cfg, &opts),
        Command::Packing(args) => cmd_packing(args, &cfg, &opts),
        Command::Charsum(args) => cmd_charsum(args, &cfg, &opts),
    }
}

fn init_threads(flag: Option<usize>, cfg: &ConfigFile) -> Result<(), CliError> {
    let from_env = std::env::var("GNPMOD_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok());
    let threads = flag.or_else(|| cfg.get_usize("threads")).or(from_env);
    if let Some(t) = threads {
        if t == 0 {
            return Err(CliError::validation(
                "bad_threads",
                "thread count must be positive",
            ));
        }
        // Results do not depend on the pool size, so a pre-existing global
        // pool is fine.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    Ok(())
}

/// Builds the probability specification from --p / --p-exp / --p-scale.
fn resolve_pspec(
    p: Option<f64>,
    p_exp: Option<String>,
    p_scale: Option<f64>,
    cfg: &ConfigFile,
) -> Result<Option<PSpec>, CliError> {
    let p = p.or_else(|| cfg.get_f64("p"));
    let p_exp = p_exp.or_else(|| cfg.get_string("p_exp"));
    let p_scale = p_scale.or_else(|| cfg.get_f64("p_scale"));
    match (p, p_exp) {
        (Some(_), Some(_)) => Err(CliError::validation(
            "conflicting_p",
            "--p and --p-exp are mutually exclusive",
        )),
        (Some(p), None) => {
            if p_scale.is_some() {
                return Err(CliError::validation(
                    "conflicting_p",
                    "--p-scale requires --p-exp",
                ));
            }
            Ok(Some(PSpec::constant(p)))
        }
        (None, Some(exp)) => {
            let exponent = Rational::parse(&exp)
                .map_err(|e| CliError::validation("bad_rational", e.to_string()))?;
            Ok(Some(PSpec::power(p_scale.unwrap_or(1.0), exponent)))
        }
        (None, None) => Ok(None),
    }
}

fn cmd_invariants(
    args: InvariantsArgs,
    cfg: &ConfigFile,
    opts: &OutputOpts,
) -> Result<(), CliError> {
    let family = resolve::family(args.family, cfg)?;
    let n = args.n.or_else(|| cfg.get_usize("n"));
    let pspec = resolve_pspec(args.p, args.p_exp, args.p_scale, cfg)?;

    let mut members = Vec::new();
    for (i, g) in family.iter().enumerate() {
        let profile = max_density(g).map_err(CliError::runtime_from)?;
        members.push(serde_json::json!({
            "index": i,
            "vertices": g.vertex_count(),
            "edges": g.edge_count(),
            "rho": density(g).to_string(),
            "m": profile.m.to_string(),
            "witness": profile.witness,
        }));
    }
    let threshold = family_threshold(&family, n.unwrap_or(2)).map_err(CliError::runtime_from)?;
    let mut result = serde_json::json!({
        "members": members,
        "m_family": threshold.m_family.to_string(),
        "threshold_exponent": threshold.exponent.to_string(),
    });
    if let Some(n) = n {
        result["n"] = serde_json::json!(n);
        result["p_threshold"] = serde_json::json!(threshold.p_threshold);
        if let Some(ref pspec) = pspec {
            let p = pspec.evaluate(n);
            let report = phi(&family, n, p).map_err(CliError::validation_from)?;
            result["p"] = serde_json::json!(p);
            result["log_phi"] = serde_json::json!(report.log_phi);
            result["phi"] = serde_json::json!(report.phi);
            result["phi_minimizer"] = serde_json::json!({
                "member": report.member,
                "subset": report.subset,
                "subset_edges": report.subset_edges,
            });
        }
    }

    let text = render_invariants_text(&result);
    emit(opts, "invariants", result, None, text)
}

fn render_invariants_text(v: &serde_json::Value) -> String {
    let mut out = String::new();
    for m in v["members"].as_array().unwrap() {
        out.push_str(&format!(
            "member {}: v={} e={} rho={} m={}\n",
            m["index"], m["vertices"], m["edges"], m["rho"], m["m"]
        ));
    }
    out.push_str(&format!(
        "m(family) = {}, threshold exponent = {}\n",
        v["m_family"], v["threshold_exponent"]
    ));
    if let Some(lp) = v.get("log_phi") {
        out.push_str(&format!("p = {}, log_phi = {}\n", v["p"], lp));
    }
    out
}

fn cmd_count(args: CountArgs, cfg: &ConfigFile, opts: &OutputOpts) -> Result<(), CliError> {
    let host = resolve::host_from_file(args.host_file, cfg)?;
    let pattern = resolve::pattern(args.pattern, cfg)?;
    let q = args.q.or_else(|| cfg.get_u32("q"));
    let counts = count_copies(&host, &pattern).map_err(CliError::runtime_from)?;
    let mut result = serde_json::json!({
        "host_vertices": host.vertex_count(),
        "host_edges": host.edge_count(),
        "pattern_vertices": pattern.vertex_count(),
        "pattern_edges": pattern.edge_count(),
        "embeddings": counts.embeddings.to_string(),
        "copies": counts.copies.to_string(),
        "automorphisms": counts.automorphisms,
    });
    let mut text = format!(
        "copies = {}, embeddings = {} (|Aut| = {})\n",
        counts.copies, counts.embeddings, counts.automorphisms
    );
    if let Some(q) = q {
        let modular =
            gnpmod::count::count_copies_mod(&host, &pattern, q).map_err(CliError::runtime_from)?;
        result["q"] = serde_json::json!(q);
        result["copies_mod_q"] = serde_json::json!(modular);
        text.push_str(&format!("copies mod {q} = {modular}\n"));
    }
    emit(opts, "count", result, None, text)
}

fn cmd_simulate(args: SimulateArgs, cfg: &ConfigFile, opts: &OutputOpts) -> Result<(), CliError> {
    let family = resolve::family(args.family, cfg)?;
    let pspec = resolve_pspec(args.p, args.p_exp, args.p_scale, cfg)?
        .ok_or_else(|| CliError::validation("missing_p", "one of --p or --p-exp is required"))?;
    let config = ExperimentConfig {
        n: resolve::required_usize(args.n, "n", cfg)?,
        q: resolve::required_u32(args.q, "q", cfg)?,
        trials: resolve::required_u64(args.trials, "trials", cfg)?,
        pspec,
        master_seed: resolve::required_u64(args.seed, "seed", cfg)?,
        trial_offset: 0,
        exposure: if args.two_step || cfg.get_bool("two_step") {
            Exposure::TwoStep
        } else {
            Exposure::Direct
        },
    };
    let report = simulate(&config, &family).map_err(CliError::from_experiment)?;
    let text = format!(
        "n={} q={} trials={} p={:.6}\ntv_to_uniform = {:.6} (bias scale {:.6})\nhistogram = {:?}\n",
        report.config.n,
        report.config.q,
        report.config.trials,
        report.config.p,
        report.tv_to_uniform,
        report.bias_scale,
        report.histogram
    );
    let csv = histogram_csv(&report.histogram);
    let result = serde_json::to_value(&report).expect("serializable report");
    emit(opts, "simulate", result, Some(csv), text)
}

fn histogram_csv(hist: &[u64]) -> String {
    let mut out = String::from("cell,count\n");
    for (i, c) in hist.iter().enumerate() {
        out.push_str(&format!("{i},{c}\n"));
    }
    out
}

fn cmd_exact(args: ExactArgs, cfg: &ConfigFile, opts: &OutputOpts) -> Result<(), CliError> {
    let family = resolve::family(args.family, cfg)?;
    let n = resolve::required_usize(args.n, "n", cfg)?;
    let p = resolve::required_f64(args.p, "p", cfg)?;
    let q = resolve::required_u32(args.q, "q", cfg)?;
    let dist = exact_xi_distribution(n, p, &family, q).map_err(CliError::from_experiment)?;
    let bound = gnpmod::charsum::xor_tv_bound(q, family.len(), &dist.probs)
        .map_err(CliError::runtime_from)?;
    let result = serde_json::json!({
        "n": n,
        "p": p,
        "q": q,
        "k": family.len(),
        "probabilities": dist.probs,
        "tv_to_uniform": dist.tv_to_uniform(),
        "character_epsilon": bound.epsilon,
        "character_bound": bound.bound,
    });
    let mut csv = String::from("cell,probability\n");
    for (i, pr) in dist.probs.iter().enumerate() {
        csv.push_str(&format!("{i},{pr}\n"));
    }
    let text = format!(
        "exact law over {} cells\ntv_to_uniform = {:.6}\ncharacter epsilon = {:.6}, bound = {:.6}\n",
        dist.probs.len(),
        dist.tv_to_uniform(),
        bound.epsilon,
        bound.bound
    );
    emit(opts, "exact", result, Some(csv), text)
}

fn cmd_decay(args: DecayArgs, cfg: &ConfigFile, opts: &OutputOpts) -> Result<(), CliError> {
    let family = resolve::family(args.family, cfg)?;
    let n_grid = resolve::usize_list(args.n_grid, "n_grid", cfg)?;
    let pspec = resolve_pspec(args.p, args.p_exp, args.p_scale, cfg)?
        .ok_or_else(|| CliError::validation("missing_p", "one of --p or --p-exp is required"))?;
    let q = resolve::required_u32(args.q, "q", cfg)?;
    let trials = resolve::required_u64(args.trials, "trials", cfg)?;
    let seed = resolve::required_u64(args.seed, "seed", cfg)?;
    let study = decay_study(&family, &pspec, q, trials, seed, &n_grid)
        .map_err(CliError::from_experiment)?;
    let csv = study.to_csv();
    let mut text = String::new();
    if let Some(w) = &study.regime_warning {
        text.push_str(&format!("warning: {w}\n"));
    }
    text.push_str("     n          p      log_phi        tv     bias\n");
    for r in &study.rows {
        text.push_str(&format!(
            "{:6} {:10.6} {:12.4} {:9.4} {:8.4}\n",
            r.n, r.p, r.log_phi, r.tv, r.bias_scale
        ));
    }
    let result = serde_json::to_value(&study).expect("serializable study");
    emit(opts, "decay", result, Some(csv), text)
}

fn cmd_corollary(args: CorollaryArgs, cfg: &ConfigFile, opts: &OutputOpts) -> Result<(), CliError> {
    let family = resolve::family(args.family, cfg)?;
    let alpha_text = args
        .alpha
        .or_else(|| cfg.get_string("alpha"))
        .ok_or_else(|| CliError::validation("missing_flag", "--alpha is required"))?;
    let alpha = Rational::parse(&alpha_text)
        .map_err(|e| CliError::validation("bad_rational", e.to_string()))?;
    // Surface a boundary alpha as a validation failure before sampling.
    classify_corollary(&family, alpha).map_err(CliError::validation_from)?;
    let n = resolve::required_usize(args.n, "n", cfg)?;
    let q = resolve::required_u32(args.q, "q", cfg)?;
    let trials = resolve::required_u64(args.trials, "trials", cfg)?;
    let seed = resolve::required_u64(args.seed, "seed", cfg)?;
    let report = corollary_experiment(&family, alpha, n, q, trials, seed)
        .map_err(CliError::from_experiment)?;
    let text = format!(
        "alpha = {}, p = {:.6}\nsparse side {:?}, dense side {:?}\n\
         dense-zero fraction = {:.4} (ok: {})\nsparse marginal tv = {:.4} (ok: {})\n",
        report.alpha,
        report.config.p,
        report.sparse_side,
        report.dense_side,
        report.frac_dense_zero,
        report.dense_zero_ok,
        report.sparse_marginal_tv,
        report.sparse_uniform_ok
    );
    let result = serde_json::to_value(&report).expect("serializable report");
    emit(opts, "corollary", result, None, text)
}

fn cmd_packing(args: PackingArgs, cfg: &ConfigFile, opts: &OutputOpts) -> Result<(), CliError> {
    let (host, provenance) =
        resolve::host_or_sampled(args.host_file, args.n, args.p, args.seed, cfg)?;
    let pattern = resolve::pattern(args.pattern, cfg)?;
    let cap = args
        .cap
        .or_else(|| cfg.get_usize("cap"))
        .unwrap_or(DEFAULT_COPY_CAP);
    let report = packing_report(&host, &pattern, cap).map_err(CliError::runtime_from)?;
    let mut result = serde_json::to_value(&report).expect("serializable report");
    result["host"] = provenance;
    let text = format!(
        "X = {}, Z = {}, Y_greedy = {}, Y_exact = {:?}, bound = {:.4}\n",
        report.x, report.z, report.y_greedy, report.y_exact, report.turan_bound
    );
    emit(opts, "packing", result, None, text)
}

fn cmd_charsum(args: CharsumArgs, cfg: &ConfigFile, opts: &OutputOpts) -> Result<(), CliError> {
    let (host, provenance) =
        resolve::host_or_sampled(args.host_file, args.n, args.p, args.seed, cfg)?;
    let family = resolve::family(args.family, cfg)?;
    let q = resolve::required_u32(args.q, "q", cfg)?;
    let weights = resolve::u32_list(args.c, "c", cfg)?;
    let eval_p = args.eval_p.or_else(|| cfg.get_f64("eval_p")).unwrap_or(0.5);

    let built = build_polynomial(&host, &family, &weights, q).map_err(CliError::runtime_from)?;
    let sum = exact_char_sum(&built.polynomial, eval_p).map_err(CliError::runtime_from)?;
    let mut result = serde_json::json!({
        "host": provenance,
        "q": q,
        "weights": weights,
        "eval_p": eval_p,
        "polynomial": serde_json::to_value(&built.polynomial).expect("serializable"),
        "edge_variables": built.edge_pairs,
        "char_sum": { "re": sum.re, "im": sum.im, "modulus": sum.modulus },
    });
    let mut text = format!(
        "polynomial: {} terms over {} edge variables\n|char sum| = {:.8} at p = {}\n",
        built.polynomial.terms().len(),
        built.polynomial.variable_count(),
        sum.modulus,
        eval_p
    );
    if args.verify || cfg.get_bool("verify") {
        let system =
            greedy_block_system(&host, &family, &weights, q).map_err(CliError::runtime_from)?;
        let check = verify_disjoint_system(&built.polynomial, &system)
            .map_err(CliError::runtime_from)?;
        text.push_str(&format!(
            "disjoint blocks: r = {}, conditions hold: {}\n",
            system.len(),
            check.holds()
        ));
        result["block_system"] = serde_json::json!({
            "r": system.len(),
            "d": system.d,
            "blocks": system.blocks,
            "holds": check.holds(),
            "check": serde_json::to_value(&check).expect("serializable"),
        });
    }
    emit(opts, "charsum", result, None, text)
}
