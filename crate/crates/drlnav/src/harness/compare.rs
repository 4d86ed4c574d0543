//! Multi-algorithm, multi-seed comparison runs.
//!
//! Trains and greedily evaluates every (algo, seed) pair over the same world
//! family (per-seed worlds and evaluation goal sequences are shared across
//! algorithms, so each seed is a fair head-to-head), then writes a CSV of
//! per-run rows plus per-algorithm medians.

use std::io::Write;
use std::path::PathBuf;

use crate::error::{Error, Result};
use crate::harness::config::{Algo, RunConfig};
use crate::harness::eval::{evaluate_checkpoint, EvalReport, WorldSource};
use crate::harness::seed::SeedTree;
use crate::harness::train::train;

pub const COMPARISON_HEADER: &str =
    "algo,seed,success_rate,mean_sim_time_s,mean_steps,train_wall_s";

/// One trained-and-evaluated (algo, seed) pair.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub algo: Algo,
    pub seed: u64,
    pub report: EvalReport,
    pub train_wall_s: f64,
}

/// Per-algorithm medians over seeds.
#[derive(Debug, Clone)]
pub struct CompareMedians {
    pub algo: Algo,
    pub success_rate: f64,
    pub mean_sim_time_s: f64,
    pub mean_steps: f64,
    pub train_wall_s: f64,
}

pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub medians: Vec<CompareMedians>,
    pub csv_path: PathBuf,
}

/// Median of an unsorted slice (mean of the middle two for even lengths).
fn median(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    }
}

/// Train and evaluate every (algo, seed) pair of `base`, in parallel, and
/// write `comparison.csv` under `base.out_dir`.
///
/// Sub-runs write their own artifacts to `out_dir/<algo>-seed<seed>/`. Any
/// sub-run failure aborts the comparison naming the failing pair.
pub fn compare(base: &RunConfig, seeds: &[u64], progress: bool) -> Result<CompareReport> {
    base.validate()?;
    if seeds.is_empty() {
        return Err(Error::config("compare needs at least one seed"));
    }
    let mut unique = seeds.to_vec();
    unique.sort_unstable();
    unique.dedup();
    if unique.len() != seeds.len() {
        return Err(Error::config("duplicate seed entries"));
    }
    std::fs::create_dir_all(&base.out_dir)?;

    let pairs: Vec<(Algo, u64)> = base
        .algos
        .iter()
        .flat_map(|&algo| seeds.iter().map(move |&seed| (algo, seed)))
        .collect();

    let results: Vec<Result<CompareRow>> = std::thread::scope(|scope| {
        let handles: Vec<_> = pairs
            .iter()
            .map(|&(algo, seed)| {
                let config = RunConfig {
                    algo,
                    seed,
                    out_dir: base.out_dir.join(format!("{algo}-seed{seed}")),
                    ..base.clone()
                };
                scope.spawn(move || run_pair(config, progress))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("sub-run panicked")).collect()
    });

    let mut rows = Vec::with_capacity(results.len());
    for ((algo, seed), result) in pairs.into_iter().zip(results) {
        match result {
            Ok(row) => rows.push(row),
            Err(e) => {
                return Err(Error::config(format!(
                    "sub-run ({algo}, seed {seed}) failed: {e}"
                )))
            }
        }
    }

    let medians: Vec<CompareMedians> = base
        .algos
        .iter()
        .map(|&algo| {
            let of = |f: &dyn Fn(&CompareRow) -> f64| {
                median(
                    &rows
                        .iter()
                        .filter(|r| r.algo == algo)
                        .map(f)
                        .collect::<Vec<_>>(),
                )
            };
            CompareMedians {
                algo,
                success_rate: of(&|r| r.report.success_rate),
                mean_sim_time_s: of(&|r| r.report.mean_episode_time_s),
                mean_steps: of(&|r| r.report.mean_steps),
                train_wall_s: of(&|r| r.train_wall_s),
            }
        })
        .collect();

    let csv_path = base.out_dir.join("comparison.csv");
    let mut file = std::io::BufWriter::new(std::fs::File::create(&csv_path)?);
    writeln!(file, "{COMPARISON_HEADER}")?;
    for r in &rows {
        writeln!(
            file,
            "{},{},{},{},{},{:.3}",
            r.algo,
            r.seed,
            r.report.success_rate,
            r.report.mean_episode_time_s,
            r.report.mean_steps,
            r.train_wall_s
        )?;
    }
    for m in &medians {
        writeln!(
            file,
            "{},median,{},{},{},{:.3}",
            m.algo, m.success_rate, m.mean_sim_time_s, m.mean_steps, m.train_wall_s
        )?;
    }
    file.flush()?;

    Ok(CompareReport { rows, medians, csv_path })
}

fn run_pair(config: RunConfig, progress: bool) -> Result<CompareRow> {
    let artifacts = train(&config, progress)?;
    // Evaluate on this seed's world with a goal sequence shared across algos.
    let world = match &config.world.file {
        Some(path) => WorldSource::File(path.clone()),
        None => WorldSource::Generate {
            width: config.world.width,
            height: config.world.height,
            rects: config.world.rects,
            circles: config.world.circles,
            seed: SeedTree::new(config.seed).child_seed("world"),
        },
    };
    let checkpoint = crate::harness::checkpoint::Checkpoint::load(&artifacts.checkpoint_path)?;
    let eval_seed = SeedTree::new(config.seed).child_seed("eval");
    let report = evaluate_checkpoint(&checkpoint, &world, config.eval_episodes, eval_seed)?;
    Ok(CompareRow {
        algo: config.algo,
        seed: config.seed,
        report,
        train_wall_s: artifacts.train_wall_s,
    })
}
