use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use selprop::format;
use selprop::harness::{emit_csv, run_experiment, ExperimentConfig, ExperimentId, Task};
use selprop::{alpha_true, Error, Result};

#[derive(Parser)]
#[command(name = "selprop", version, about = "Selective uncertainty propagation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Interval experiment; writes one CSV row per (seed, lambda, method).
    Ci(RunArgs),
    /// Policy-learning experiment; writes one CSV row per (seed, episodes, method).
    Learn(RunArgs),
    /// Exact per-step effect of the evaluation policy `lambda` on the configured environment.
    Alpha {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        lambda: f64,
        /// Step; defaults to the configured step.
        #[arg(long)]
        step: Option<usize>,
    },
    /// Environment utilities.
    Env {
        #[command(subcommand)]
        command: EnvCommand,
    },
}

#[derive(Subcommand)]
enum EnvCommand {
    /// Write the configured environment as a JSON document.
    Dump {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// TOML config file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Preset experiment (ci-chainbandit, learn-chainbandit, ci-gridworld, learn-gridworld).
    #[arg(long)]
    experiment: Option<String>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Master seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Dataset size; for learning runs this replaces the episode grid.
    #[arg(long)]
    episodes: Option<usize>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn load_config(common: &CommonArgs, default: ExperimentId) -> Result<ExperimentConfig> {
    let config = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => {
            let id = match &common.experiment {
                Some(name) => name.parse()?,
                None => default,
            };
            ExperimentConfig::preset(id)?
        }
    };
    if let (Some(_), Some(name)) = (&common.config, &common.experiment) {
        let id: ExperimentId = name.parse()?;
        if id != config.experiment {
            return Err(Error::Config(format!(
                "--experiment {id} conflicts with config experiment {}",
                config.experiment
            )));
        }
    }
    config.validate()?;
    Ok(config)
}

fn run(args: RunArgs, task: Task) -> Result<()> {
    let default = match task {
        Task::Ci => ExperimentId::CiChainbandit,
        Task::Learn => ExperimentId::LearnChainbandit,
    };
    let mut config = load_config(&args.common, default)?;
    if config.task != task {
        return Err(Error::Config(format!("experiment {} is not a {task:?} experiment", config.experiment)));
    }
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(episodes) = args.episodes {
        match task {
            Task::Ci => config.episodes = episodes,
            Task::Learn => config.episode_grid = vec![episodes],
        }
    }
    if let Some(delta) = args.delta {
        config.delta = delta;
    }
    if let Some(beta) = args.beta {
        config.beta = beta;
    }
    if args.out.is_some() {
        config.out = args.out;
    }
    config.validate()?;
    let out = config.out.clone().unwrap_or_else(|| PathBuf::from(format!("results/{}.csv", config.experiment)));

    let start = Instant::now();
    let rows = run_experiment(&config)?;
    emit_csv(&rows, &out)?;
    eprintln!(
        "{}: {} rows written to {} in {:.2}s",
        config.experiment,
        rows.len(),
        out.display(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Ci(args) => run(args, Task::Ci),
        Command::Learn(args) => run(args, Task::Learn),
        Command::Alpha { common, lambda, step } => (|| {
            let config = load_config(&common, ExperimentId::CiChainbandit)?;
            let mdp = config.environment.build()?.mdp;
            let pi = config.environment.eval_policy(lambda)?;
            let pi_b = config.behavior_policy()?;
            let step = step.unwrap_or(config.step);
            println!("{:.9e}", alpha_true(&mdp, &pi, &pi_b, step)?);
            Ok(())
        })(),
        Command::Env { command: EnvCommand::Dump { common, out } } => (|| {
            let config = load_config(&common, ExperimentId::CiChainbandit)?;
            let mdp = config.environment.build()?.mdp;
            match out {
                Some(path) => format::save(&mdp, path),
                None => {
                    println!("{}", format::to_json(&mdp)?);
                    Ok(())
                }
            }
        })(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Config(_) | Error::Environment(_) | Error::InvalidParameter(_) => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
