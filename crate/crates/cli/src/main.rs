use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, ValueEnum};

use crucb_cli::presets::preset;
use crucb_cli::{run_and_write, RawConfig, RegretKind};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum RegretArg {
    Pseudo,
    Realized,
    Both,
}

impl From<RegretArg> for RegretKind {
    fn from(r: RegretArg) -> Self {
        match r {
            RegretArg::Pseudo => RegretKind::Pseudo,
            RegretArg::Realized => RegretKind::Realized,
            RegretArg::Both => RegretKind::Both,
        }
    }
}

/// Simulate stochastic bandits with contaminated rewards.
#[derive(Debug, Parser)]
#[command(name = "crucb", version)]
struct Args {
    /// TOML config, or a metadata.json from an earlier run
    #[arg(long, conflicts_with = "figure")]
    config: Option<PathBuf>,
    /// Preset id: 1a 1b 1c 2a 2b 2c 3 4 6
    #[arg(long)]
    figure: Option<String>,
    /// Master seed
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for trials
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    regret: Option<RegretArg>,
    /// Also write the observed-reward regret diagnostic
    #[arg(long)]
    diagnostic_eq2: bool,
}

fn load(args: &Args) -> anyhow::Result<RawConfig> {
    let mut raw = if let Some(path) = &args.config {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        RawConfig::from_document(&text).with_context(|| format!("in {}", path.display()))?
    } else if let Some(id) = &args.figure {
        preset(id)?
    } else {
        RawConfig::default()
    };
    if let Some(seed) = args.seed {
        raw.master_seed = Some(seed);
    }
    if let Some(out) = &args.out {
        raw.output = Some(out.to_string_lossy().into_owned());
    }
    if let Some(threads) = args.threads {
        raw.threads = Some(threads);
    }
    if let Some(regret) = args.regret {
        raw.regret = Some(regret.into());
    }
    if args.diagnostic_eq2 {
        raw.diagnostic_eq2 = Some(true);
    }
    Ok(raw)
}

fn run(args: &Args) -> anyhow::Result<()> {
    let cfg = load(args)?.resolve()?;
    let dir = cfg.output.clone();
    let run = run_and_write(&cfg, &dir)?;
    let rows: usize = run.algorithms.iter().map(|a| a.trials.len() * cfg.horizon()).sum();
    println!(
        "{} algorithms x {} trials x {} rounds ({rows} rows) written to {}",
        cfg.algorithms.len(),
        cfg.trials,
        cfg.horizon(),
        dir.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
