//! Training, evaluation, comparison, and plotting driver.
//!
//! All entry points are plain library functions so they can be scripted (see
//! the crate examples) as well as driven from the `drlnav` CLI binary.

pub mod checkpoint;
pub mod compare;
pub mod config;
pub mod eval;
pub mod metrics;
pub mod plot;
pub mod seed;
pub mod train;

pub use checkpoint::Checkpoint;
pub use compare::{compare, CompareReport, CompareRow, COMPARISON_HEADER};
pub use config::{Algo, RunConfig, WorldSpec};
pub use eval::{evaluate, evaluate_checkpoint, EvalReport, WorldSource};
pub use metrics::{read_metrics_csv, EpisodeRecord, MetricsWriter, METRICS_HEADER};
pub use plot::{plot_rewards, PlotView};
pub use seed::SeedTree;
pub use train::{train, TrainArtifacts};
