//! Command implementations behind the `yamabe-crit` binary and their CSV/JSON/SVG output.
//!
//! Every document starts with the tool version, the config echo, the seed and the
//! quadrature resolutions: `# key=value` lines in CSV, top-level fields in JSON.

mod claims;
mod config;
mod figure;

pub use claims::{check_claims, ClaimOptions, ClaimRow, ClaimsReport};
pub use config::{
    parse_beta_grid, parse_config_text, parse_int_list, Format, RunConfig, CONFIG_ENV, DEFAULT_MC_SAMPLES,
    DEFAULT_RESOLUTION, DEFAULT_SEED,
};
pub use figure::{figure1_samples, figure1_svg, FigureSample};

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::criterion::{minimal_m, tabulated_m_n, CriterionResult};
use crate::energy::{sweep, EnergyReport, SweepSummary};
use crate::error::Error;
use crate::quadrature::QuadratureRule;

pub const TOOL: &str = "yamabe-crit";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("numerical failure: {0}")]
    Numerical(Error),
    #[error("i/o: {0}")]
    Io(String),
    #[error("claims failed: {}", .0.join(", "))]
    ClaimsFailed(Vec<String>),
}

impl CliError {
    /// 1 claim failure, 2 usage, 3 numerical, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ClaimsFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument { .. }
            | Error::InvalidDimension { .. }
            | Error::DimensionMismatch { .. }
            | Error::DegenerateBubble { .. }
            | Error::BubbleTooConcentrated { .. } => CliError::Usage(e.to_string()),
            other => CliError::Numerical(other),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

/// Header block shared by all documents.
#[derive(Debug, Clone, Serialize)]
pub struct Meta {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: BTreeMap<&'static str, String>,
    pub seed: u64,
    pub resolution: usize,
    pub mc_samples: usize,
}

impl Meta {
    pub fn new(command: &str, cfg: &RunConfig) -> Self {
        Self {
            tool: TOOL,
            version: VERSION,
            command: command.to_string(),
            config: cfg.echo(),
            seed: cfg.seed,
            resolution: cfg.resolution,
            mc_samples: cfg.mc_samples,
        }
    }

    fn comment_lines(&self) -> Vec<String> {
        let config = self
            .config
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        vec![
            format!("# tool={}", self.tool),
            format!("# version={}", self.version),
            format!("# command={}", self.command),
            format!("# config={config}"),
            format!("# seed={}", self.seed),
            format!("# resolution={}", self.resolution),
            format!("# mc_samples={}", self.mc_samples),
        ]
    }
}

#[derive(Serialize)]
struct JsonDocument<'a, R: Serialize, S: Serialize> {
    #[serde(flatten)]
    meta: &'a Meta,
    #[serde(skip_serializing_if = "Option::is_none")]
    summary: Option<&'a S>,
    rows: &'a [R],
}

fn flatten_json(prefix: &str, v: &serde_json::Value, out: &mut Vec<String>) {
    match v {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten_json(&key, v, out);
            }
        }
        serde_json::Value::Array(items) => {
            for (i, v) in items.iter().enumerate() {
                flatten_json(&format!("{prefix}.{i}"), v, out);
            }
        }
        other => out.push(format!("# {prefix}={other}")),
    }
}

/// Renders rows (and an optional summary) as CSV with a `#` header block, or as one JSON object.
pub fn render<R: Serialize, S: Serialize>(
    format: Format,
    meta: &Meta,
    rows: &[R],
    summary: Option<&S>,
) -> Result<String, CliError> {
    match format {
        Format::Json => {
            let doc = JsonDocument { meta, summary, rows };
            let mut s = serde_json::to_string_pretty(&doc).map_err(|e| CliError::Io(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
        Format::Csv => {
            let mut lines = meta.comment_lines();
            if let Some(s) = summary {
                let v = serde_json::to_value(s).map_err(|e| CliError::Io(e.to_string()))?;
                flatten_json("summary", &v, &mut lines);
            }
            let mut out = lines.join("\n");
            out.push('\n');
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in rows {
                w.serialize(r).map_err(|e| CliError::Io(e.to_string()))?;
            }
            let body = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
            out.push_str(&String::from_utf8(body).map_err(|e| CliError::Io(e.to_string()))?);
            Ok(out)
        }
    }
}

fn no_summary() -> Option<&'static ()> {
    None
}

/// `criterion`: one row per (n, m).
pub fn cmd_criterion(cfg: &RunConfig) -> Result<String, CliError> {
    let ns = cfg.n.clone().unwrap_or_else(|| (3..=8).collect());
    let ms = cfg.m.clone().unwrap_or_else(|| (2..=12).collect());
    let mut rows = Vec::new();
    for &n in &ns {
        for &m in &ms {
            rows.push(CriterionResult::evaluate(n, m)?);
        }
    }
    render(cfg.format, &Meta::new("criterion", cfg), &rows, no_summary())
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MnRow {
    pub n: usize,
    pub m_n: Option<usize>,
    pub tabulated: Option<usize>,
    pub matches: bool,
}

/// Largest m searched when locating m_n.
pub const MN_SEARCH_LIMIT: usize = 64;

pub fn mn_table(ns: &[usize]) -> Result<Vec<MnRow>, CliError> {
    ns.iter()
        .map(|&n| {
            let m_n = minimal_m(n, MN_SEARCH_LIMIT)?;
            let tabulated = tabulated_m_n(n);
            Ok(MnRow { n, m_n, tabulated, matches: m_n == tabulated })
        })
        .collect()
}

/// `mn-table`: `--n N` means n = 3..N; a range or list is used as given.
pub fn cmd_mn_table(cfg: &RunConfig) -> Result<String, CliError> {
    let ns = match cfg.n.as_deref() {
        None => (3..=30).collect(),
        Some([n_max]) => {
            if *n_max < 3 {
                return Err(CliError::Usage(format!("n_max must be at least 3, got {n_max}")));
            }
            (3..=*n_max).collect()
        }
        Some(list) => list.to_vec(),
    };
    let rows = mn_table(&ns)?;
    render(cfg.format, &Meta::new("mn-table", cfg), &rows, no_summary())
}

/// Result of `energy`: all reports plus one summary per (n, m).
pub struct EnergyRun {
    pub reports: Vec<EnergyReport>,
    pub summaries: Vec<SweepSummary>,
    pub document: String,
}

pub fn energy_rule(cfg: &RunConfig) -> Result<QuadratureRule, CliError> {
    Ok(QuadratureRule::product_grid(cfg.resolution)?)
}

/// `energy`: β sweeps for every (n, m) pair; defaults to n = 3, m = 9.
pub fn cmd_energy(cfg: &RunConfig) -> Result<EnergyRun, CliError> {
    let ns = cfg.n.clone().unwrap_or_else(|| vec![3]);
    let ms = cfg.m.clone().unwrap_or_else(|| vec![9]);
    let rule = energy_rule(cfg)?;
    let mut reports = Vec::new();
    let mut summaries = Vec::new();
    for &n in &ns {
        for &m in &ms {
            let (r, s) = sweep(n, m, &cfg.beta_grid, &rule)?;
            reports.extend(r);
            summaries.push(s);
        }
    }
    let document = render(cfg.format, &Meta::new("energy", cfg), &reports, Some(&summaries))?;
    Ok(EnergyRun { reports, summaries, document })
}

/// One human-readable line per sweep, in the normalization `∫|u|^{2*} < 2m ω_n`.
pub fn summary_line(s: &SweepSummary) -> String {
    format!(
        "n={} m={} certified: {} best_beta={:.6} margin={:.6e} nehari_mass={:.9} bound_2m_omega_n={:.9}",
        s.n, s.m, s.certified, s.best_beta, s.best_margin, s.best_nehari_mass, s.mass_bound
    )
}

/// `check-claims`: the document and the report; fails with the names of failed claims.
pub fn cmd_check_claims(cfg: &RunConfig, opts: &ClaimOptions) -> Result<(String, ClaimsReport), CliError> {
    let report = check_claims(cfg, opts)?;
    let doc = render(cfg.format, &Meta::new("check-claims", cfg), &report.claims, no_summary())?;
    Ok((doc, report))
}

/// `figure1`: SVG plus CSV of the samples.
pub fn cmd_figure1(cfg: &RunConfig) -> Result<(String, String), CliError> {
    let samples = figure1_samples()?;
    let meta = Meta::new("figure1", cfg);
    let svg = figure1_svg(&samples, &meta);
    let csv = render(Format::Csv, &meta, &samples, no_summary())?;
    Ok((svg, csv))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_has_header_block_then_columns() {
        let cfg = RunConfig { n: Some(vec![4]), m: Some(vec![7]), ..Default::default() };
        let out = cmd_criterion(&cfg).unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert!(lines[0].starts_with("# tool=yamabe-crit"));
        assert!(lines.iter().any(|l| l.starts_with("# seed=")));
        let header = lines.iter().find(|l| !l.starts_with('#')).unwrap();
        assert_eq!(*header, "n,m,mu,mu_hat,a_nm,positive");
        assert!(lines.last().unwrap().ends_with("true"));
    }

    #[test]
    fn json_mirrors_rows() {
        let cfg = RunConfig { n: Some(vec![3]), m: Some(vec![1, 2]), format: Format::Json, ..Default::default() };
        let out = cmd_criterion(&cfg).unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["tool"], "yamabe-crit");
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
        assert_eq!(v["rows"][0]["mu"], 0.0);
        assert_eq!(v["rows"][0]["positive"], false);
        assert!(out.starts_with("{\n  \"tool\": \"yamabe-crit\""));
    }

    #[test]
    fn mn_table_defaults() {
        let cfg = RunConfig { n: Some(vec![7]), ..Default::default() };
        let out = cmd_mn_table(&cfg).unwrap();
        let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
        let m: Vec<&str> = rows.iter().map(|r| r.split(',').nth(1).unwrap()).collect();
        assert_eq!(m, vec!["9", "7", "6", "6", "5"]);
        let cfg = RunConfig { n: Some(vec![2]), ..Default::default() };
        assert_eq!(cmd_mn_table(&cfg).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn error_classes() {
        assert_eq!(CliError::from(Error::DegenerateBubble { beta: 1.0 }).exit_code(), 2);
        assert_eq!(CliError::from(Error::NonFiniteIntegrand { value: f64::NAN, node: vec![] }).exit_code(), 3);
        assert_eq!(CliError::ClaimsFailed(vec!["x".into()]).exit_code(), 1);
        assert_eq!(CliError::from(std::io::Error::other("disk")).exit_code(), 4);
    }
}
