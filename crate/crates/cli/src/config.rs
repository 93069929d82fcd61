//! Flat key-value run configuration.
//!
//! A configuration source is plain text with one `key=value` pair per
//! line; `#` starts a comment and blank lines are ignored. Command-line
//! flags carry the same key names and override file values. Validation
//! is collected: a bad source reports every violation at once instead of
//! stopping at the first one.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use serde::Serialize;

/// Uniform shifts per unit of `grid_oversample`; the Gibbs grid has
/// `BASE_GRID * grid_oversample` points.
pub const BASE_GRID: usize = 256;

/// Which experiment the binary runs. Selected by subcommand; a config
/// file may also carry an `experiment` key as a default.
#[derive(Clone, Copy, Debug, Eq, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Theory,
    Overlap,
    FreeEnergy,
    HighPoints,
    Validate,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Theory => "theory",
            Experiment::Overlap => "overlap",
            Experiment::FreeEnergy => "free-energy",
            Experiment::HighPoints => "high-points",
            Experiment::Validate => "validate",
        }
    }

    fn parse(value: &str) -> Option<Self> {
        match value {
            "theory" => Some(Experiment::Theory),
            "overlap" => Some(Experiment::Overlap),
            "free-energy" => Some(Experiment::FreeEnergy),
            "high-points" => Some(Experiment::HighPoints),
            "validate" => Some(Experiment::Validate),
            _ => None,
        }
    }
}

/// Fully validated run configuration. Field names match config keys.
#[derive(Clone, Debug, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Strictly increasing ladder of window sizes, each entry a `log T`.
    #[serde(rename = "logT")]
    pub log_t: Vec<f64>,
    pub beta: Vec<f64>,
    pub alpha: f64,
    pub u: Vec<f64>,
    pub replicas: u64,
    pub pairs_per_replica: u64,
    pub grid_oversample: usize,
    pub seed: u64,
    pub output_dir: PathBuf,
    pub workers: usize,
}

impl ExperimentConfig {
    /// Number of uniform shifts in the Gibbs grid.
    pub fn grid_points(&self) -> usize {
        BASE_GRID * self.grid_oversample
    }
}

/// Every violation found in a configuration source, each naming the
/// offending key and the accepted range.
#[derive(Clone, Debug)]
pub struct ConfigError {
    violations: Vec<String>,
}

impl ConfigError {
    /// A single out-of-band violation, e.g. an unreadable config file.
    pub fn single(message: impl Into<String>) -> Self {
        ConfigError {
            violations: vec![message.into()],
        }
    }

    pub fn violations(&self) -> &[String] {
        &self.violations
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.violations.join("; "))
    }
}

impl std::error::Error for ConfigError {}

const KNOWN_KEYS: [&str; 11] = [
    "experiment",
    "logT",
    "beta",
    "alpha",
    "u",
    "replicas",
    "pairs_per_replica",
    "grid_oversample",
    "seed",
    "output_dir",
    "workers",
];

const REQUIRED_KEYS: [(&str, &str); 4] = [
    ("logT", "comma-separated reals > 1, strictly increasing"),
    ("beta", "comma-separated reals > 0"),
    ("alpha", "a real strictly between 0 and 1"),
    ("u", "comma-separated reals, each in (-1, 1)"),
];

/// Parses a configuration source, reporting all violations at once.
pub fn parse_config(source: &str) -> Result<ExperimentConfig, ConfigError> {
    parse_config_with_overrides(source, &[])
}

/// Parses `source`, then overlays `overrides` (same key names; an
/// override wins over the file). This is the single validation path for
/// both config files and command-line flags.
pub fn parse_config_with_overrides(
    source: &str,
    overrides: &[(String, String)],
) -> Result<ExperimentConfig, ConfigError> {
    let mut violations = Vec::new();
    let mut map: BTreeMap<String, String> = BTreeMap::new();

    for (index, raw) in source.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match line.split_once('=') {
            Some((key, value)) => {
                map.insert(key.trim().to_string(), value.trim().to_string());
            }
            None => violations.push(format!(
                "line {}: expected `key=value`, got `{line}`",
                index + 1
            )),
        }
    }
    for (key, value) in overrides {
        map.insert(key.clone(), value.clone());
    }

    for key in map.keys() {
        if !KNOWN_KEYS.contains(&key.as_str()) {
            violations.push(format!(
                "unknown key `{key}` (known keys: {})",
                KNOWN_KEYS.join(", ")
            ));
        }
    }
    for (key, accepted) in REQUIRED_KEYS {
        if !map.contains_key(key) {
            violations.push(format!("missing required key `{key}` ({accepted})"));
        }
    }

    let experiment = match map.get("experiment") {
        None => Experiment::Theory,
        Some(value) => Experiment::parse(value).unwrap_or_else(|| {
            violations.push(format!(
                "experiment: must be one of theory, overlap, free-energy, \
                 high-points, validate; got `{value}`"
            ));
            Experiment::Theory
        }),
    };

    let log_t = real_list(&map, "logT", &mut violations, |x| x > 1.0, "> 1");
    if let Some(ladder) = &log_t {
        if ladder.windows(2).any(|w| w[0] >= w[1]) {
            violations.push("logT: ladder must be strictly increasing".to_string());
        }
    }
    let beta = real_list(&map, "beta", &mut violations, |x| x > 0.0, "> 0");
    let alpha = real_scalar(&map, "alpha", &mut violations, |x| {
        x > 0.0 && x < 1.0
    });
    let u = real_list(
        &map,
        "u",
        &mut violations,
        |x| x > -1.0 && x < 1.0,
        "in (-1, 1)",
    );

    let replicas = integer(&map, "replicas", 200, 2, &mut violations);
    let pairs_per_replica = integer(&map, "pairs_per_replica", 100, 1, &mut violations);
    let grid_oversample = integer(&map, "grid_oversample", 2, 1, &mut violations) as usize;
    let seed = integer(&map, "seed", 1, 0, &mut violations);
    let workers = integer(&map, "workers", 4, 1, &mut violations) as usize;
    if workers > 256 {
        violations.push(format!("workers: must be at most 256, got {workers}"));
    }
    let output_dir = PathBuf::from(map.get("output_dir").map_or("out", String::as_str));

    if !violations.is_empty() {
        return Err(ConfigError { violations });
    }
    Ok(ExperimentConfig {
        experiment,
        log_t: log_t.expect("validated"),
        beta: beta.expect("validated"),
        alpha: alpha.expect("validated"),
        u: u.expect("validated"),
        replicas,
        pairs_per_replica,
        grid_oversample,
        seed,
        output_dir,
        workers,
    })
}

fn real_list(
    map: &BTreeMap<String, String>,
    key: &str,
    violations: &mut Vec<String>,
    accept: impl Fn(f64) -> bool,
    range: &str,
) -> Option<Vec<f64>> {
    let raw = map.get(key)?;
    let mut values = Vec::new();
    for item in raw.split(',') {
        match item.trim().parse::<f64>() {
            Ok(x) if x.is_finite() && accept(x) => values.push(x),
            Ok(x) => {
                violations.push(format!("{key}: every value must be {range}, got {x}"));
                return None;
            }
            Err(_) => {
                violations.push(format!(
                    "{key}: expected comma-separated reals, got `{raw}`"
                ));
                return None;
            }
        }
    }
    if values.is_empty() {
        violations.push(format!("{key}: at least one value is required"));
        return None;
    }
    Some(values)
}

fn real_scalar(
    map: &BTreeMap<String, String>,
    key: &str,
    violations: &mut Vec<String>,
    accept: impl Fn(f64) -> bool,
) -> Option<f64> {
    let raw = map.get(key)?;
    match raw.parse::<f64>() {
        Ok(x) if x.is_finite() && accept(x) => Some(x),
        Ok(x) => {
            violations.push(format!(
                "{key}: must lie strictly between 0 and 1, got {x}"
            ));
            None
        }
        Err(_) => {
            violations.push(format!("{key}: expected a real number, got `{raw}`"));
            None
        }
    }
}

fn integer(
    map: &BTreeMap<String, String>,
    key: &str,
    default: u64,
    minimum: u64,
    violations: &mut Vec<String>,
) -> u64 {
    let Some(raw) = map.get(key) else {
        return default;
    };
    match raw.parse::<u64>() {
        Ok(x) if x >= minimum => x,
        Ok(x) => {
            violations.push(format!("{key}: must be an integer >= {minimum}, got {x}"));
            default
        }
        Err(_) => {
            violations.push(format!(
                "{key}: expected an integer >= {minimum}, got `{raw}`"
            ));
            default
        }
    }
}
