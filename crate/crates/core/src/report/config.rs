//! Run configuration: defaults, then a `key=value` config file, then command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::Serialize;

use super::CliError;
use crate::energy::{default_beta_grid, log_beta_grid};

/// Environment variable naming a config file when `--config` is absent.
pub const CONFIG_ENV: &str = "YAMABE_CRIT_CONFIG";

pub const DEFAULT_RESOLUTION: usize = 12;
pub const DEFAULT_MC_SAMPLES: usize = 100_000;
pub const DEFAULT_SEED: u64 = 20_260_101;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim().to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(CliError::Usage(format!("unknown format `{other}` (expected csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// Everything a command needs; `None` lists fall back to per-command defaults.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n: Option<Vec<usize>>,
    pub m: Option<Vec<usize>>,
    pub beta_grid: Vec<f64>,
    pub resolution: usize,
    pub mc_samples: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub format: Format,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n: None,
            m: None,
            beta_grid: default_beta_grid(),
            resolution: DEFAULT_RESOLUTION,
            mc_samples: DEFAULT_MC_SAMPLES,
            seed: DEFAULT_SEED,
            out: None,
            format: Format::Csv,
        }
    }
}

/// Parses `3..8` (inclusive), `3..=8`, `3,4,7` or `5`.
pub fn parse_int_list(s: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("invalid integer range or list `{s}`"));
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let b = b.strip_prefix('=').unwrap_or(b);
        let lo: usize = a.trim().parse().map_err(|_| bad())?;
        let hi: usize = b.trim().parse().map_err(|_| bad())?;
        if lo > hi {
            return Err(CliError::Usage(format!("empty range `{s}`")));
        }
        return Ok((lo..=hi).collect());
    }
    let v: Vec<usize> = s
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| bad()))
        .collect::<Result<_, _>>()?;
    if v.is_empty() {
        return Err(bad());
    }
    Ok(v)
}

/// Parses `default`, `log:LO:HI:COUNT` (log-spaced β − 1) or a comma list of β values.
pub fn parse_beta_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let s = s.trim();
    let bad = || CliError::Usage(format!("invalid beta grid `{s}`"));
    if s == "default" {
        return Ok(default_beta_grid());
    }
    let grid: Vec<f64> = if let Some(rest) = s.strip_prefix("log:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad());
        }
        let lo: f64 = parts[0].parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].parse().map_err(|_| bad())?;
        let count: usize = parts[2].parse().map_err(|_| bad())?;
        if !(lo > 0.0 && hi >= lo && count >= 1) {
            return Err(bad());
        }
        log_beta_grid(lo, hi, count)
    } else {
        s.split(',')
            .map(|t| t.trim().parse::<f64>().map_err(|_| bad()))
            .collect::<Result<_, _>>()?
    };
    if grid.is_empty() || grid.iter().any(|b| !(*b > 1.0) || !b.is_finite()) {
        return Err(CliError::Usage(format!("beta values must be finite and > 1 in `{s}`")));
    }
    Ok(grid)
}

/// Reads `key=value` lines; `#` starts a comment.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>, CliError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("config line {}: expected key=value, got `{raw}`", i + 1)))?;
        out.push((k.trim().replace('_', "-"), v.trim().to_string()));
    }
    Ok(out)
}

impl RunConfig {
    /// Applies one setting by its flag name (without dashes; `_` and `-` are interchangeable).
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let num = |what: &str| CliError::Usage(format!("invalid value `{value}` for {what}"));
        match key.replace('_', "-").as_str() {
            "n" => self.n = Some(parse_int_list(value)?),
            "m" => self.m = Some(parse_int_list(value)?),
            "beta-grid" => self.beta_grid = parse_beta_grid(value)?,
            "resolution" => {
                let r: usize = value.trim().parse().map_err(|_| num("resolution"))?;
                if r < 8 {
                    return Err(CliError::Usage(format!("resolution must be at least 8, got {r}")));
                }
                self.resolution = r;
            }
            "mc-samples" => {
                let s: usize = value.trim().parse().map_err(|_| num("mc-samples"))?;
                if s < 10_000 {
                    return Err(CliError::Usage(format!("mc-samples must be at least 10000, got {s}")));
                }
                self.mc_samples = s;
            }
            "seed" => self.seed = value.trim().parse().map_err(|_| num("seed"))?,
            "out" => self.out = Some(PathBuf::from(value.trim())),
            "format" => self.format = value.parse()?,
            other => return Err(CliError::Usage(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn apply(&mut self, pairs: &[(String, String)]) -> Result<(), CliError> {
        pairs.iter().try_for_each(|(k, v)| self.set(k, v))
    }

    /// Config echo for output headers, in a fixed key order.
    pub fn echo(&self) -> BTreeMap<&'static str, String> {
        let list = |v: &Option<Vec<usize>>| {
            v.as_ref()
                .map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
                .unwrap_or_else(|| "default".into())
        };
        let mut m = BTreeMap::new();
        m.insert("n", list(&self.n));
        m.insert("m", list(&self.m));
        m.insert(
            "beta-grid",
            self.beta_grid.iter().map(|b| format!("{b}")).collect::<Vec<_>>().join(","),
        );
        m.insert("resolution", self.resolution.to_string());
        m.insert("mc-samples", self.mc_samples.to_string());
        m.insert("seed", self.seed.to_string());
        m.insert("format", self.format.to_string());
        m
    }
}
