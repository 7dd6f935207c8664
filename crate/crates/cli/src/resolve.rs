//! Flag/config-file merging, input resolution, and the error taxonomy
//! behind the exit codes (1 = validation, 2 = runtime).

use std::fmt::Display;
use std::fs;
use std::path::Path;

use gnpmod::graph::{GraphFamily, HostGraph, PatternGraph};
use gnpmod::invariants::InvariantError;
use gnpmod::montecarlo::ExperimentError;
use gnpmod::sample::{sample_gnp, SamplerMeta, SeedSpec};

#[derive(Debug)]
pub enum CliError {
    Validation { code: String, message: String },
    Runtime { code: String, message: String },
}

impl CliError {
    pub fn validation(code: &str, message: impl Display) -> Self {
        CliError::Validation {
            code: code.to_string(),
            message: message.to_string(),
        }
    }

    pub fn runtime(code: &str, message: impl Display) -> Self {
        CliError::Runtime {
            code: code.to_string(),
            message: message.to_string(),
        }
    }

    /// Library errors raised while checking inputs.
    pub fn validation_from(err: impl std::error::Error) -> Self {
        CliError::validation("invalid_input", err)
    }

    /// Library errors raised while computing.
    pub fn runtime_from(err: impl std::error::Error) -> Self {
        CliError::runtime("computation_failed", err)
    }

    /// Experiment errors: configuration problems are validation failures,
    /// everything else is a runtime failure.
    pub fn from_experiment(err: ExperimentError) -> Self {
        match err {
            ExperimentError::NoTrials
            | ExperimentError::TooManyCells(_)
            | ExperimentError::PspecOutOfRange(_)
            | ExperimentError::ExactHostTooLarge(_)
            | ExperimentError::Sample(_)
            | ExperimentError::Invariant(InvariantError::BoundaryAlpha(_)) => {
                CliError::validation("invalid_config", err)
            }
            other => CliError::runtime("experiment_failed", other),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation { .. } => 1,
            CliError::Runtime { .. } => 2,
        }
    }

    pub fn to_stderr_json(&self) -> String {
        let (code, message) = match self {
            CliError::Validation { code, message } | CliError::Runtime { code, message } => {
                (code, message)
            }
        };
        serde_json::json!({ "error": { "code": code, "message": message } }).to_string()
    }
}

/// Optional JSON config whose keys mirror the long flags (dashes become
/// underscores). Flags always win; the config only fills gaps.
pub struct ConfigFile {
    values: serde_json::Map<String, serde_json::Value>,
}

impl ConfigFile {
    pub fn load(path: Option<&str>) -> Result<Self, CliError> {
        let values = match path {
            None => serde_json::Map::new(),
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    CliError::validation("config_unreadable", format!("{path}: {e}"))
                })?;
                let parsed: serde_json::Value = serde_json::from_str(&text).map_err(|e| {
                    CliError::validation("config_malformed", format!("{path}: {e}"))
                })?;
                match parsed {
                    serde_json::Value::Object(map) => map,
                    _ => {
                        return Err(CliError::validation(
                            "config_malformed",
                            "config file must hold a JSON object",
                        ))
                    }
                }
            }
        };
        Ok(ConfigFile { values })
    }

    pub fn get_string(&self, key: &str) -> Option<String> {
        match self.values.get(key)? {
            serde_json::Value::String(s) => Some(s.clone()),
            other => Some(other.to_string()),
        }
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        self.values.get(key)?.as_f64()
    }

    pub fn get_u64(&self, key: &str) -> Option<u64> {
        self.values.get(key)?.as_u64()
    }

    pub fn get_u32(&self, key: &str) -> Option<u32> {
        self.get_u64(key).map(|v| v as u32)
    }

    pub fn get_usize(&self, key: &str) -> Option<usize> {
        self.get_u64(key).map(|v| v as usize)
    }

    pub fn get_bool(&self, key: &str) -> bool {
        self.values
            .get(key)
            .and_then(|v| v.as_bool())
            .unwrap_or(false)
    }
}

pub fn required_usize(
    flag: Option<usize>,
    key: &str,
    cfg: &ConfigFile,
) -> Result<usize, CliError> {
    flag.or_else(|| cfg.get_usize(key))
        .ok_or_else(|| missing(key))
}

pub fn required_u64(flag: Option<u64>, key: &str, cfg: &ConfigFile) -> Result<u64, CliError> {
    flag.or_else(|| cfg.get_u64(key)).ok_or_else(|| missing(key))
}

pub fn required_u32(flag: Option<u32>, key: &str, cfg: &ConfigFile) -> Result<u32, CliError> {
    flag.or_else(|| cfg.get_u32(key)).ok_or_else(|| missing(key))
}

pub fn required_f64(flag: Option<f64>, key: &str, cfg: &ConfigFile) -> Result<f64, CliError> {
    flag.or_else(|| cfg.get_f64(key)).ok_or_else(|| missing(key))
}

fn missing(key: &str) -> CliError {
    CliError::validation("missing_flag", format!("--{} is required", key.replace('_', "-")))
}

/// One pattern: a catalog name, or a path to a graph file.
pub fn pattern(flag: Option<String>, cfg: &ConfigFile) -> Result<PatternGraph, CliError> {
    let spec = flag
        .or_else(|| cfg.get_string("pattern"))
        .ok_or_else(|| missing("pattern"))?;
    parse_pattern_spec(&spec)
}

fn parse_pattern_spec(spec: &str) -> Result<PatternGraph, CliError> {
    if Path::new(spec).is_file() {
        let text = fs::read_to_string(spec)
            .map_err(|e| CliError::validation("file_unreadable", format!("{spec}: {e}")))?;
        return PatternGraph::parse(&text)
            .map_err(|e| CliError::validation("bad_graph", format!("{spec}: {e}")));
    }
    PatternGraph::parse(spec).map_err(|e| CliError::validation("bad_graph", e))
}

/// A validated family from a comma-separated member list.
pub fn family(flag: Option<String>, cfg: &ConfigFile) -> Result<GraphFamily, CliError> {
    let spec = flag
        .or_else(|| cfg.get_string("family"))
        .ok_or_else(|| missing("family"))?;
    let members = spec
        .split(',')
        .map(|item| parse_pattern_spec(item.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    GraphFamily::new(members).map_err(|e| CliError::validation("bad_family", e))
}

pub fn host_from_file(flag: Option<String>, cfg: &ConfigFile) -> Result<HostGraph, CliError> {
    let path = flag
        .or_else(|| cfg.get_string("host_file"))
        .ok_or_else(|| missing("host_file"))?;
    let text = fs::read_to_string(&path)
        .map_err(|e| CliError::validation("file_unreadable", format!("{path}: {e}")))?;
    HostGraph::parse(&text).map_err(|e| CliError::validation("bad_graph", format!("{path}: {e}")))
}

/// A host from a file, or a seeded sample when --n/--p/--seed are given.
/// Returns the host plus a provenance record for the result file.
pub fn host_or_sampled(
    host_file: Option<String>,
    n: Option<usize>,
    p: Option<f64>,
    seed: Option<u64>,
    cfg: &ConfigFile,
) -> Result<(HostGraph, serde_json::Value), CliError> {
    let host_file = host_file.or_else(|| cfg.get_string("host_file"));
    if let Some(path) = host_file {
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::validation("file_unreadable", format!("{path}: {e}")))?;
        let host = HostGraph::parse(&text)
            .map_err(|e| CliError::validation("bad_graph", format!("{path}: {e}")))?;
        let provenance = serde_json::json!({
            "source": "file",
            "path": path,
            "n": host.vertex_count(),
            "edges": host.edge_count(),
        });
        return Ok((host, provenance));
    }
    let n = required_usize(n, "n", cfg)?;
    let p = required_f64(p, "p", cfg)?;
    let seed = required_u64(seed, "seed", cfg)?;
    let host = sample_gnp(n, p, SeedSpec::new(seed, 0)).map_err(CliError::validation_from)?;
    let provenance = serde_json::json!({
        "source": "sampled",
        "n": n,
        "p": p,
        "edges": host.edge_count(),
        "sampler": SamplerMeta::direct(seed),
    });
    Ok((host, provenance))
}

pub fn usize_list(flag: Option<String>, key: &str, cfg: &ConfigFile) -> Result<Vec<usize>, CliError> {
    let spec = flag
        .or_else(|| cfg.get_string(key))
        .ok_or_else(|| missing(key))?;
    spec.trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .map(|item| {
            item.trim()
                .parse::<usize>()
                .map_err(|_| CliError::validation("bad_list", format!("cannot parse {item:?}")))
        })
        .collect()
}

pub fn u32_list(flag: Option<String>, key: &str, cfg: &ConfigFile) -> Result<Vec<u32>, CliError> {
    let spec = flag
        .or_else(|| cfg.get_string(key))
        .ok_or_else(|| missing(key))?;
    spec.trim_matches(|c| c == '[' || c == ']')
        .split(',')
        .map(|item| {
            item.trim()
                .parse::<u32>()
                .map_err(|_| CliError::validation("bad_list", format!("cannot parse {item:?}")))
        })
        .collect()
}
