use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;
use sp4moment::verify::{build_tables, run_suite_with_sweep, VerifyConfig, VerifyError};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("reading {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("config file {path}: {source}")]
    Config { path: PathBuf, source: toml::de::Error },
    #[error(transparent)]
    Verify(#[from] VerifyError),
}

#[derive(Parser)]
#[command(name = "sp4moment", version, about = "Numerical verification suites for degree-two Siegel cusp forms")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and emit a JSON report; exits nonzero on any failed check.
    Verify(VerifyArgs),
    /// Write the Jacobi and Siegel coefficient tables with content hashes.
    BuildTables(BuildArgs),
}

/// Settings shared by the flags and the optional TOML config file.
#[derive(Args, Deserialize, Default, Debug, Clone)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct Settings {
    #[arg(long)]
    precision_bits: Option<u32>,
    #[arg(long)]
    c_max: Option<u64>,
    #[arg(long)]
    s_max: Option<u64>,
    #[arg(long)]
    cnorm_max: Option<f64>,
    #[arg(long)]
    delta_max: Option<u64>,
    #[arg(long)]
    dmax: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

impl Settings {
    /// Fields set in `self` take precedence over `fallback`.
    fn or(self, fallback: Settings) -> Settings {
        Settings {
            precision_bits: self.precision_bits.or(fallback.precision_bits),
            c_max: self.c_max.or(fallback.c_max),
            s_max: self.s_max.or(fallback.s_max),
            cnorm_max: self.cnorm_max.or(fallback.cnorm_max),
            delta_max: self.delta_max.or(fallback.delta_max),
            dmax: self.dmax.or(fallback.dmax),
            seed: self.seed.or(fallback.seed),
            cache_dir: self.cache_dir.or(fallback.cache_dir),
        }
    }

    fn into_config(self) -> VerifyConfig {
        let mut cfg = VerifyConfig::default();
        if let Some(v) = self.precision_bits {
            cfg.precision_bits = v;
        }
        if let Some(v) = self.c_max {
            cfg.cutoffs.c_max = v;
        }
        if let Some(v) = self.s_max {
            cfg.cutoffs.s_max = v;
        }
        if let Some(v) = self.cnorm_max {
            cfg.cutoffs.c_norm_max = v;
        }
        if let Some(v) = self.delta_max {
            cfg.delta_max = v;
        }
        if let Some(v) = self.dmax {
            cfg.d_max = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        cfg.cache_dir = self.cache_dir;
        cfg
    }
}

#[derive(Args)]
struct VerifyArgs {
    /// One of expsums, special, siegel, lfunc, kitaoka, moment, all.
    #[arg(long, default_value = "all")]
    suite: String,
    #[command(flatten)]
    settings: Settings,
    /// TOML file with the same keys as the flags; flags win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSON report destination (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// CSV destination for the moment sweep; defaults to the report path with a `.csv` extension.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Fail instead of building a table that is missing from the cache directory.
    #[arg(long)]
    no_build: bool,
}

#[derive(Args)]
struct BuildArgs {
    /// Weights to build, 10 and/or 12.
    #[arg(long = "k", value_delimiter = ',', default_values_t = [10u32, 12])]
    weights: Vec<u32>,
    #[arg(long, default_value_t = 200)]
    dmax: u64,
    #[arg(long)]
    cache_dir: PathBuf,
}

fn read_settings(path: &Path) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io { path: path.to_owned(), source })?;
    toml::from_str(&text).map_err(|source| CliError::Config { path: path.to_owned(), source })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn verify(args: VerifyArgs) -> Result<bool, CliError> {
    let file = match &args.config {
        Some(p) => read_settings(p)?,
        None => Settings::default(),
    };
    let mut cfg = args.settings.or(file).into_config();
    cfg.build_missing = !args.no_build;
    let (mut report, sweep) = run_suite_with_sweep(&args.suite, &cfg)?;
    report.versions.insert("sp4moment-cli".into(), env!("CARGO_PKG_VERSION").into());
    for c in &report.checks {
        eprintln!("{}", c.line());
    }
    let json = report.to_json();
    match &args.out {
        Some(p) => write(p, &json)?,
        None => println!("{json}"),
    }
    let csv_path = args.csv.clone().or_else(|| args.out.as_ref().map(|p| p.with_extension("csv")));
    if let (Some(s), Some(p)) = (sweep, csv_path) {
        write(&p, &s.to_csv())?;
    }
    Ok(report.all_pass())
}

fn build(args: BuildArgs) -> Result<(), CliError> {
    for k in args.weights {
        for (path, hash) in build_tables(&args.cache_dir, k, args.dmax)? {
            println!("{hash}  {}", path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Verify(a) => verify(a).map(|ok| if ok { ExitCode::SUCCESS } else { ExitCode::from(1) }),
        Command::BuildTables(a) => build(a).map(|()| ExitCode::SUCCESS),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(2)
    })
}
