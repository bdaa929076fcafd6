//! Argument parsing and output routing for the `nppt` binary.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::commands;
use crate::config::{parse_symmetry, ConfigFile, RunConfig};
use crate::error::{CliError, Result};
use crate::formats::TOOL_VERSION;

#[derive(Parser, Debug)]
#[command(name = "nppt", version, about = "Distillability of Werner-like bipartite states: thresholds, bounds and witness searches")]
pub struct Cli {
    /// Plain `key = value` file; flags given on the command line win.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Convergence tolerance on the search gradient norm.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn label(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Family member from one of alpha, beta or lambda.
    State(StateArgs),
    /// Certified bounds and thresholds for N = 1..copies.
    Thresholds(ThresholdArgs),
    /// Witness search at one beta, reported as a certificate.
    Search(SearchArgs),
    /// Region and search evidence over a beta grid.
    Sweep(SweepArgs),
    /// Finite mixing protocol against the projector formula and a Haar average.
    TwirlCheck(TwirlArgs),
    /// Certificate from the analytic bounds, optionally with searches.
    Certify(CertifyArgs),
    /// Sampled operator relations behind the d = 3 bounds.
    RelationsCheck(RelationsArgs),
}

#[derive(Args, Debug)]
pub struct StateArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Include the density matrix and its partial transpose.
    #[arg(long)]
    pub operators: bool,
}

#[derive(Args, Debug)]
pub struct ThresholdArgs {
    #[arg(long)]
    pub d: Option<usize>,
    /// Largest copy count in the table.
    #[arg(long = "n-max", alias = "copies")]
    pub n_max: Option<usize>,
}

#[derive(Args, Debug, Default)]
pub struct SearchOptions {
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// `off` or `diagonal` (two copies only).
    #[arg(long)]
    pub symmetry: Option<String>,
    /// Allow three-copy searches.
    #[arg(long)]
    pub long_run: bool,
}

#[derive(Args, Debug)]
pub struct SearchArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub copies: Option<usize>,
    #[command(flatten)]
    pub search: SearchOptions,
    /// Append finished restarts to `<path>.N<copies>` and resume from it.
    #[arg(long)]
    pub checkpoint: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub copies: Option<usize>,
    #[command(flatten)]
    pub search: SearchOptions,
    /// Skip the witness searches and report the analytic columns only.
    #[arg(long)]
    pub no_search: bool,
}

#[derive(Args, Debug)]
pub struct TwirlArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub trials: Option<usize>,
    /// Haar samples per state (0 skips the Monte-Carlo comparison).
    #[arg(long)]
    pub samples: Option<usize>,
    /// Include the protocol's event list in the report.
    #[arg(long)]
    pub dump_protocol: bool,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long = "n-max", alias = "copies")]
    pub n_max: Option<usize>,
    /// Search every copy count not covered by a certified bound.
    #[arg(long)]
    pub search: bool,
    #[command(flatten)]
    pub options: SearchOptions,
}

#[derive(Args, Debug)]
pub struct RelationsArgs {
    #[arg(long)]
    pub copies: Option<usize>,
    #[arg(long)]
    pub k: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    /// Also check the large-N inequality at this beta.
    #[arg(long)]
    pub beta: Option<f64>,
}

fn apply_search_options(cfg: &mut RunConfig, file: &ConfigFile, opts: &SearchOptions) -> Result<()> {
    cfg.restarts = file.resolve(opts.restarts, "restarts")?;
    cfg.max_iters = file.resolve(opts.max_iters, "max_iters")?;
    cfg.symmetry = file.resolve(opts.symmetry.clone(), "symmetry")?;
    if let Some(s) = &cfg.symmetry {
        parse_symmetry(s)?;
    }
    cfg.long_run = Some(file.switch(opts.long_run, "long_run")?);
    Ok(())
}

/// Effective configuration: flags first, then the config file.
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let file = match &cli.config {
        Some(path) => ConfigFile::read(path)?,
        None => ConfigFile::default(),
    };
    let name = match &cli.command {
        Command::State(_) => "state",
        Command::Thresholds(_) => "thresholds",
        Command::Search(_) => "search",
        Command::Sweep(_) => "sweep",
        Command::TwirlCheck(_) => "twirl-check",
        Command::Certify(_) => "certify",
        Command::RelationsCheck(_) => "relations-check",
    };
    let mut cfg = RunConfig::new(name);
    cfg.seed = file.resolve(cli.seed, "seed")?;
    cfg.tol = file.resolve(cli.tol, "tol")?;
    let format: Option<String> = file.resolve(cli.format.map(|f| f.label().to_string()), "format")?;
    if let Some(f) = &format {
        if f != "json" && f != "csv" {
            return Err(CliError::invalid(format!("unknown format {f:?} (expected json or csv)")));
        }
    }
    cfg.format = format;
    match &cli.command {
        Command::State(a) => {
            cfg.d = file.resolve(a.d, "d")?;
            cfg.alpha = file.resolve(a.alpha, "alpha")?;
            cfg.beta = file.resolve(a.beta, "beta")?;
            cfg.lambda = file.resolve(a.lambda, "lambda")?;
        }
        Command::Thresholds(a) => {
            cfg.d = file.resolve(a.d, "d")?;
            cfg.copies = file.resolve(a.n_max, "n_max")?.or(file.resolve(None, "copies")?);
        }
        Command::Search(a) => {
            cfg.d = file.resolve(a.d, "d")?;
            cfg.beta = file.resolve(a.beta, "beta")?;
            cfg.copies = file.resolve(a.copies, "copies")?;
            apply_search_options(&mut cfg, &file, &a.search)?;
        }
        Command::Sweep(a) => {
            cfg.d = file.resolve(a.d, "d")?;
            cfg.beta_min = file.resolve(a.beta_min, "beta_min")?;
            cfg.beta_max = file.resolve(a.beta_max, "beta_max")?;
            cfg.steps = file.resolve(a.steps, "steps")?;
            cfg.copies = file.resolve(a.copies, "copies")?;
            cfg.search = Some(!file.switch(a.no_search, "no_search")?);
            apply_search_options(&mut cfg, &file, &a.search)?;
        }
        Command::TwirlCheck(a) => {
            cfg.d = file.resolve(a.d, "d")?;
            cfg.trials = file.resolve(a.trials, "trials")?;
            cfg.samples = file.resolve(a.samples, "samples")?;
        }
        Command::Certify(a) => {
            cfg.d = file.resolve(a.d, "d")?;
            cfg.beta = file.resolve(a.beta, "beta")?;
            cfg.copies = file.resolve(a.n_max, "n_max")?.or(file.resolve(None, "copies")?);
            cfg.search = Some(file.switch(a.search, "search")?);
            apply_search_options(&mut cfg, &file, &a.options)?;
        }
        Command::RelationsCheck(a) => {
            cfg.copies = file.resolve(a.copies, "copies")?;
            cfg.k = file.resolve(a.k, "k")?;
            cfg.samples = file.resolve(a.samples, "samples")?;
            cfg.beta = file.resolve(a.beta, "beta")?;
        }
    }
    Ok(cfg.with_defaults())
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

#[derive(Serialize)]
struct CsvSidecar<'a> {
    config: &'a RunConfig,
    tool_version: &'a str,
}

/// Runs the parsed command and returns the text it produced. CSV written
/// to a file gets a `<out>.meta.json` companion carrying the configuration.
pub fn execute(cli: &Cli) -> Result<String> {
    let cfg = resolve(cli)?;
    let csv_default = matches!(cli.command, Command::Thresholds(_) | Command::Sweep(_));
    let wants_csv = match cfg.format.as_deref() {
        Some("csv") => true,
        Some(_) => false,
        None => csv_default,
    };
    let unsupported = || CliError::invalid(format!("{} has no CSV output", cfg.command));
    let text = match &cli.command {
        Command::State(a) => {
            if wants_csv {
                return Err(unsupported());
            }
            json(&commands::state(&cfg, a.operators)?)?
        }
        Command::Thresholds(_) => {
            let t = commands::thresholds(&cfg)?;
            if wants_csv { t.to_csv()? } else { json(&t)? }
        }
        Command::Search(a) => {
            if wants_csv {
                return Err(unsupported());
            }
            json(&commands::search(&cfg, a.checkpoint.as_deref())?)?
        }
        Command::Sweep(_) => {
            let t = commands::sweep(&cfg)?;
            if wants_csv { t.to_csv()? } else { json(&t)? }
        }
        Command::TwirlCheck(a) => {
            if wants_csv {
                return Err(unsupported());
            }
            json(&commands::twirl_check(&cfg, a.dump_protocol)?)?
        }
        Command::Certify(_) => {
            if wants_csv {
                return Err(unsupported());
            }
            json(&commands::certify(&cfg)?)?
        }
        Command::RelationsCheck(_) => {
            let r = commands::relations_check(&cfg)?;
            if wants_csv { r.to_csv()? } else { json(&r)? }
        }
    };
    if let Some(path) = &cli.out {
        std::fs::write(path, &text)?;
        if wants_csv {
            let sidecar = json(&CsvSidecar { config: &cfg, tool_version: TOOL_VERSION })?;
            std::fs::write(meta_path(path), sidecar)?;
        }
    }
    Ok(text)
}

pub fn meta_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}
