use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use yamabe_crit::report::{
    cmd_check_claims, cmd_criterion, cmd_energy, cmd_figure1, cmd_mn_table, parse_config_text, summary_line,
    ClaimOptions, CliError, RunConfig, CONFIG_ENV,
};

/// Symmetry criterion tables and energy certificates for nodal Yamabe solutions on Sⁿ.
#[derive(Parser)]
#[command(name = "yamabe-crit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// μ, μ̂ and a_{n,m} for each (n, m).
    Criterion(Flags),
    /// Smallest m with a positive criterion, per dimension.
    MnTable(Flags),
    /// β sweeps of the Nehari-scaled energy against 2m c_n.
    Energy(Flags),
    /// SVG and CSV of f₃, f₄, f₅ on [0, 1/4].
    Figure1(Flags),
    /// Run the reference-claims suite; exit 1 if any claim fails.
    CheckClaims(Flags),
}

#[derive(Args, Default)]
struct Flags {
    /// Dimension(s): `4`, `3..8` (inclusive) or `3,5,7`.
    #[arg(long)]
    n: Option<String>,
    /// Orbit parameter(s), same syntax as --n.
    #[arg(long)]
    m: Option<String>,
    /// `default`, `log:LO:HI:COUNT` in β − 1, or a comma list of β values.
    #[arg(long)]
    beta_grid: Option<String>,
    /// Gauss–Legendre nodes per panel.
    #[arg(long)]
    resolution: Option<String>,
    #[arg(long)]
    mc_samples: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// Output file (tables) or directory (figure1). Tables go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    format: Option<String>,
    /// key=value config file; flags take precedence. Falls back to $YAMABE_CRIT_CONFIG.
    #[arg(long)]
    config: Option<PathBuf>,
}

fn resolve(flags: &Flags) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    let path = flags
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    if let Some(p) = path {
        let text = fs::read_to_string(&p).map_err(|e| CliError::Io(format!("{}: {e}", p.display())))?;
        cfg.apply(&parse_config_text(&text)?)?;
    }
    let pairs = [
        ("n", &flags.n),
        ("m", &flags.m),
        ("beta-grid", &flags.beta_grid),
        ("resolution", &flags.resolution),
        ("mc-samples", &flags.mc_samples),
        ("seed", &flags.seed),
        ("format", &flags.format),
    ];
    for (k, v) in pairs {
        if let Some(v) = v {
            cfg.set(k, v)?;
        }
    }
    if let Some(out) = &flags.out {
        cfg.out = Some(out.clone());
    }
    Ok(cfg)
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn emit(cfg: &RunConfig, doc: &str) -> Result<(), CliError> {
    match &cfg.out {
        Some(p) => write_file(p, doc),
        None => {
            print!("{doc}");
            Ok(())
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Criterion(f) => {
            let cfg = resolve(&f)?;
            emit(&cfg, &cmd_criterion(&cfg)?)
        }
        Command::MnTable(f) => {
            let cfg = resolve(&f)?;
            emit(&cfg, &cmd_mn_table(&cfg)?)
        }
        Command::Energy(f) => {
            let cfg = resolve(&f)?;
            let run = cmd_energy(&cfg)?;
            emit(&cfg, &run.document)?;
            for s in &run.summaries {
                eprintln!("{}", summary_line(s));
            }
            Ok(())
        }
        Command::Figure1(f) => {
            let cfg = resolve(&f)?;
            let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("."));
            let (svg, csv) = cmd_figure1(&cfg)?;
            write_file(&dir.join("figure1.svg"), &svg)?;
            write_file(&dir.join("figure1.csv"), &csv)?;
            eprintln!("wrote {} and {}", dir.join("figure1.svg").display(), dir.join("figure1.csv").display());
            Ok(())
        }
        Command::CheckClaims(f) => {
            let cfg = resolve(&f)?;
            let (doc, report) = cmd_check_claims(&cfg, &ClaimOptions::default())?;
            emit(&cfg, &doc)?;
            for c in &report.claims {
                eprintln!(
                    "{} {}: expected {} ({} {:e}) computed {}",
                    if c.passed { "PASS" } else { "FAIL" },
                    c.claim,
                    c.expected,
                    c.relation,
                    c.tolerance,
                    c.computed
                );
            }
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::ClaimsFailed(report.failed()))
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
