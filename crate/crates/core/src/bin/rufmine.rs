use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rufmine::pipeline::{run_phase, run_pipeline, ModelKind, Phase, PipelineConfig};
use rufmine::synth::make_synthetic;

#[derive(Parser)]
#[command(name = "rufmine", version, about = "Mine weighted prediction rules from daily price series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct RunArgs {
    /// Flat key/value TOML configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory for artifacts.
    #[arg(long)]
    out: Option<PathBuf>,
    /// S (modular evolution), F (dense backprop) or R (rule-seeded backprop).
    #[arg(long)]
    model: Option<ModelKind>,
    /// Price CSV or decision-table CSV, overriding the config.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run every phase and write all artifacts plus a manifest.
    Pipeline(RunArgs),
    /// Write a Gaussian-blob decision table as CSV.
    Synth {
        #[arg(long, default_value_t = 6)]
        classes: usize,
        #[arg(long, default_value_t = 100)]
        per_class: usize,
        #[arg(long, default_value_t = 2.0)]
        sep: f64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Destination file; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Read the source and write the completed decision table.
    Ingest(RunArgs),
    /// Select cut points on the training split.
    Discretize(RunArgs),
    /// Build the fuzzy front end and dependency rules.
    Rules(RunArgs),
    /// Train the selected network.
    Train(RunArgs),
    /// Extract weighted rules from the trained network.
    Extract(RunArgs),
    /// Score the rules and network on the test split.
    Evaluate(RunArgs),
}

fn config(args: &RunArgs) -> rufmine::Result<PipelineConfig> {
    let mut cfg = match &args.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &args.out {
        cfg.out = out.clone();
    }
    if let Some(model) = args.model {
        cfg.model = model;
    }
    if let Some(input) = &args.input {
        cfg.input = Some(input.clone());
        if cfg.source == rufmine::pipeline::Source::Synthetic {
            cfg.source = rufmine::pipeline::Source::Prices;
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> rufmine::Result<()> {
    let (args, phase) = match cli.command {
        Command::Pipeline(args) => {
            let cfg = config(&args)?;
            let run = run_pipeline(&cfg)?;
            let m = &run.metrics;
            println!(
                "model {}: {} rules, accuracy {}, fidelity {:.2}%, uncovered {:.2}%, {} links; artifacts in {}",
                m.model,
                m.rules,
                m.accuracy.map_or("n/a".to_string(), |a| format!("{a:.2}%")),
                m.fidelity,
                m.uncovered,
                m.present_links,
                cfg.out.display()
            );
            return Ok(());
        }
        Command::Synth {
            classes,
            per_class,
            sep,
            seed,
            out,
        } => {
            let table = make_synthetic(per_class, classes, sep, seed)?;
            return match out {
                Some(path) => table.save(path),
                None => table.write_csv(std::io::stdout().lock()),
            };
        }
        Command::Ingest(a) => (a, Phase::Ingest),
        Command::Discretize(a) => (a, Phase::Discretize),
        Command::Rules(a) => (a, Phase::Rules),
        Command::Train(a) => (a, Phase::Train),
        Command::Extract(a) => (a, Phase::Extract),
        Command::Evaluate(a) => (a, Phase::Evaluate),
    };
    let cfg = config(&args)?;
    run_phase(&cfg, phase)?;
    log::info!("{} done; artifacts in {}", phase.name(), cfg.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("rufmine: {e}");
            ExitCode::FAILURE
        }
    }
}
