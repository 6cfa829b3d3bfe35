use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use cacm::compressor::partition_library;
use cacm::harness::demo::demo_report;
use cacm::harness::{bounds_table, plot_svg, run_experiment_with_workers, ExperimentConfig, RateMemoryTable};
use clap::{Args, Parser, Subcommand};

/// Correlation-aware cache-aided coded multicast simulator.
#[derive(Parser)]
#[command(name = "cacm", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the resolved configuration and the compressed-library manifest.
    Gen(RunArgs),
    /// Monte-Carlo rate-memory sweep to CSV.
    Simulate {
        #[command(flatten)]
        run: RunArgs,
        /// Worker threads (default: CACM_WORKERS, else all cores).
        #[arg(long)]
        workers: Option<usize>,
        /// Also render the table as SVG.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Analytic lower and upper bounds to CSV.
    Bounds(RunArgs),
    /// Render a rate-memory CSV as SVG.
    Plot {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Walk through the four-file, two-receiver example.
    Demo,
}

#[derive(Args)]
struct RunArgs {
    /// key = value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (default: the config's csv key, else stdout).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// start:step:stop or a comma-separated list.
    #[arg(long)]
    sweep: Option<String>,
}

impl RunArgs {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).with_context(|| format!("{}", path.display()))?;
                ExperimentConfig::parse(&text).with_context(|| format!("{}", path.display()))?
            }
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.seed = seed;
        }
        if let Some(trials) = self.trials {
            cfg.trials = trials;
        }
        if let Some(sweep) = &self.sweep {
            cfg.set("sweep", sweep)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn target(&self, cfg: &ExperimentConfig) -> Option<PathBuf> {
        self.out.clone().or_else(|| cfg.csv.clone())
    }
}

fn write_out(target: Option<&Path>, text: &str) -> Result<()> {
    match target {
        Some(path) => fs::write(path, text).with_context(|| format!("{}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn gen(run: &RunArgs) -> Result<()> {
    let cfg = run.config()?;
    let lib = cfg.library()?;
    let clib = partition_library(&lib, cfg.n, lib.delta())?;
    let mut text = cfg.to_text();
    text.push_str("# compressed library: id role ref units\n");
    for line in clib.manifest().lines() {
        text.push_str("# ");
        text.push_str(line);
        text.push('\n');
    }
    write_out(run.out.as_deref(), &text)
}

fn simulate(run: &RunArgs, workers: Option<usize>, svg: Option<&Path>) -> Result<()> {
    let cfg = run.config()?;
    let table = run_experiment_with_workers(&cfg, workers)?;
    write_out(run.target(&cfg).as_deref(), &table.to_csv()?)?;
    if let Some(path) = svg.map(Path::to_path_buf).or_else(|| cfg.svg.clone()) {
        plot_svg(&table, &path)?;
    }
    Ok(())
}

fn bounds(run: &RunArgs) -> Result<()> {
    let mut cfg = run.config()?;
    if !cfg.lower_bound && !cfg.upper_bound {
        cfg.lower_bound = true;
        cfg.upper_bound = true;
    }
    let table = bounds_table(&cfg)?;
    write_out(run.target(&cfg).as_deref(), &table.to_csv()?)
}

fn plot(input: &Path, out: &Path) -> Result<()> {
    let table = RateMemoryTable::read_csv(input)?;
    plot_svg(&table, out)?;
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(run) => gen(&run),
        Command::Simulate { run, workers, svg } => simulate(&run, workers, svg.as_deref()),
        Command::Bounds(run) => bounds(&run),
        Command::Plot { input, out } => plot(&input, &out),
        Command::Demo => {
            print!("{}", demo_report()?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
