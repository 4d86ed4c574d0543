//! Command-line driver around the `drlnav` library.
//!
//! Exit codes: 0 success, 1 configuration error, 2 I/O or file-format error,
//! 3 runtime failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use drlnav::error::Result;
use drlnav::harness::{
    compare, evaluate, plot_rewards, train, Algo, PlotView, RunConfig, WorldSource,
};
use drlnav::world::generate_world;

#[derive(Parser)]
#[command(name = "drlnav", version, about = "Deep-RL goal navigation trainer")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Train one agent and write metrics + checkpoints.
    Train(TrainArgs),
    /// Evaluate a checkpoint greedily over random goals.
    Eval(EvalArgs),
    /// Train and evaluate several algorithms across seeds.
    Compare(CompareArgs),
    /// Render reward curves from metrics CSVs into an SVG.
    Plot(PlotArgs),
    /// Generate a world file.
    GenWorld(GenWorldArgs),
}

#[derive(Args)]
struct TrainArgs {
    /// Algorithm: ddpg | dqn | ddqn (overrides the config file).
    #[arg(long)]
    algo: Option<Algo>,
    /// TOML run configuration; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (overrides the config file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Episode count (overrides the config file).
    #[arg(long)]
    episodes: Option<usize>,
}

#[derive(Args)]
struct EvalArgs {
    /// Checkpoint file to load.
    #[arg(long)]
    checkpoint: PathBuf,
    /// World file path or generation spec `gen:<W>x<H>:<rects>:<circles>:<seed>`.
    #[arg(long)]
    world: WorldSource,
    /// Number of greedy evaluation episodes.
    #[arg(long, default_value_t = 100)]
    episodes: usize,
    /// Seed for the evaluation goal sequence.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct CompareArgs {
    /// TOML run configuration shared by all sub-runs.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Comma-separated seeds, e.g. `1,2,3`.
    #[arg(long, value_delimiter = ',', required = true)]
    seeds: Vec<u64>,
    /// Output directory for sub-runs and comparison.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    /// Comma-separated metrics CSV paths.
    #[arg(long, value_delimiter = ',', required = true)]
    metrics: Vec<PathBuf>,
    /// Moving-average window in episodes.
    #[arg(long, default_value_t = 20)]
    window: usize,
    /// Output SVG path.
    #[arg(long)]
    out: PathBuf,
    /// Y quantity: per-episode | cumsum.
    #[arg(long, default_value = "per-episode")]
    view: String,
}

#[derive(Args)]
struct GenWorldArgs {
    #[arg(long, default_value_t = 20.0)]
    width: f64,
    #[arg(long, default_value_t = 20.0)]
    height: f64,
    #[arg(long, default_value_t = 3)]
    rects: usize,
    #[arg(long, default_value_t = 5)]
    circles: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output world file path.
    #[arg(long)]
    out: PathBuf,
}

fn load_config(path: &Option<PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => {
            let mut config = load_config(&args.config)?;
            if let Some(algo) = args.algo {
                config.algo = algo;
            }
            if let Some(seed) = args.seed {
                config.seed = seed;
            }
            if let Some(out) = args.out {
                config.out_dir = out;
            }
            if let Some(episodes) = args.episodes {
                config.episodes = episodes;
            }
            let artifacts = train(&config, true)?;
            let successes = artifacts
                .records
                .iter()
                .filter(|r| r.outcome == drlnav::env::Outcome::ReachedGoal)
                .count();
            println!(
                "trained {} for {} episodes in {:.1}s ({} successes); metrics: {}, checkpoint: {}",
                config.algo,
                config.episodes,
                artifacts.train_wall_s,
                successes,
                artifacts.metrics_path.display(),
                artifacts.checkpoint_path.display()
            );
        }
        Command::Eval(args) => {
            let report = evaluate(&args.checkpoint, &args.world, args.episodes, args.seed)?;
            println!(
                "episodes: {}\nsuccess_rate: {:.1}%\nmean_episode_time_s: {:.2}\nmean_steps: {:.1}",
                report.n_episodes,
                report.success_rate,
                report.mean_episode_time_s,
                report.mean_steps
            );
        }
        Command::Compare(args) => {
            let mut config = load_config(&args.config)?;
            if let Some(out) = args.out {
                config.out_dir = out;
            }
            let report = compare(&config, &args.seeds, false)?;
            println!("{}", drlnav::harness::COMPARISON_HEADER);
            for row in &report.rows {
                println!(
                    "{},{},{:.1},{:.2},{:.1},{:.1}",
                    row.algo,
                    row.seed,
                    row.report.success_rate,
                    row.report.mean_episode_time_s,
                    row.report.mean_steps,
                    row.train_wall_s
                );
            }
            for m in &report.medians {
                println!(
                    "{},median,{:.1},{:.2},{:.1},{:.1}",
                    m.algo, m.success_rate, m.mean_sim_time_s, m.mean_steps, m.train_wall_s
                );
            }
            println!("written: {}", report.csv_path.display());
        }
        Command::Plot(args) => {
            let view = match args.view.as_str() {
                "per-episode" => PlotView::PerEpisode,
                "cumsum" => PlotView::CumulativeSum,
                other => {
                    return Err(drlnav::error::Error::config(format!(
                        "view must be per-episode or cumsum, got `{other}`"
                    )))
                }
            };
            plot_rewards(&args.metrics, &args.out, args.window, view)?;
            println!("written: {}", args.out.display());
        }
        Command::GenWorld(args) => {
            let map = generate_world(args.width, args.height, args.rects, args.circles, args.seed)?;
            map.save(&args.out)?;
            println!(
                "world {}x{} with {} obstacles written to {}",
                map.width,
                map.height,
                map.obstacles.len(),
                args.out.display()
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
