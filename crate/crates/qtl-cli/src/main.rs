use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};

use qtl_cli::config::{ExperimentKind, ScenarioConfig};
use qtl_cli::{experiments, output};

/// Equilibration experiments on closed bipartite quantum systems: exact
/// Schrödinger dynamics under random weak couplings, constrained-region
/// sampling, and closed-form equilibrium predictions.
#[derive(Parser)]
#[command(name = "qtl", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form predictions for a scenario (no dynamics).
    Predict(RunArgs),
    /// Entropy histogram of states sampled uniformly from the accessible
    /// region.
    Histogram(RunArgs),
    /// Exact Schrödinger trajectories of the local observables, one per seed.
    Evolve(RunArgs),
    /// Occupation-fluctuation scaling against container size.
    Sweep(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Scenario config file (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Replace the config's seed list with this single seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Histogram sample count override.
    #[arg(long)]
    samples: Option<usize>,
    /// Output directory (default: the config's output_dir, or ./out).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(command: Command) -> anyhow::Result<()> {
    let (kind, args) = match &command {
        Command::Predict(a) => (ExperimentKind::Predict, a),
        Command::Histogram(a) => (ExperimentKind::Histogram, a),
        Command::Evolve(a) => (ExperimentKind::Evolve, a),
        Command::Sweep(a) => (ExperimentKind::FluctuationSweep, a),
    };

    let text = std::fs::read_to_string(&args.config)
        .with_context(|| format!("cannot read config {}", args.config.display()))?;
    let mut config = ScenarioConfig::from_json(&text)?;

    // The subcommand decides the experiment; overrides become part of the
    // resolved config so output headers describe exactly what ran.
    config.experiment = kind;
    if let Some(seed) = args.seed {
        config.seeds = vec![seed];
    }
    if let Some(samples) = args.samples {
        if kind != ExperimentKind::Histogram {
            anyhow::bail!("--samples only applies to the histogram experiment");
        }
        let mut h = config.histogram.unwrap_or_default();
        h.samples = samples;
        config.histogram = Some(h);
    }
    if let Some(out) = &args.out {
        config.output_dir = Some(out.clone());
    }
    let out_dir = config
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("out"));

    let scenario = config.validate()?;
    let files = match kind {
        ExperimentKind::Predict => {
            let report = experiments::run_predict(&scenario)?;
            output::render_predict(&scenario.config, &report)
        }
        ExperimentKind::Histogram => {
            let hist = experiments::run_histogram(&scenario)?;
            println!(
                "histogram: {} samples, s_max = {:.4}, fraction S > 0.4 = {:.4}",
                hist.samples,
                hist.s_max,
                hist.fraction_above(0.4)
            );
            output::render_histogram(&scenario.config, &hist)
        }
        ExperimentKind::Evolve => {
            let evolved = experiments::run_evolve(&scenario)?;
            for run in &evolved.runs {
                let last = run
                    .trajectory
                    .points()
                    .last()
                    .expect("non-empty trajectory");
                println!(
                    "evolve seed {}: final W^g_0 = {:.4}, S^g = {:.4} (predicted {:.4}, S_max {:.4})",
                    run.seed,
                    last.gas_occupations[0],
                    last.entropy,
                    evolved.predicted.weight(0),
                    evolved.s_max
                );
            }
            output::render_evolve(&scenario.config, &evolved)
        }
        ExperimentKind::FluctuationSweep => {
            let sweep = experiments::run_sweep(&scenario)?;
            println!(
                "sweep: exponent p = {:.3}, coefficient c = {:.4} (constrained c = {:.4})",
                sweep.fit.exponent, sweep.fit.coefficient, sweep.fit.constrained_coefficient
            );
            output::render_sweep(&scenario.config, &sweep)
        }
    };

    for path in output::write_files(&out_dir, &files)? {
        println!("wrote {}", path.display());
    }
    Ok(())
}
