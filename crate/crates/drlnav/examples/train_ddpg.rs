//! End-to-end DDPG training at desk scale.
//!
//! Trains on the default 20×20 m world, evaluates the final checkpoint
//! greedily over 100 random goals, and leaves metrics + checkpoints in the
//! output directory.
//!
//! ```bash
//! cargo run --release --example train_ddpg [episodes] [seed] [out_dir]
//! ```

use drlnav::harness::{evaluate, train, RunConfig, SeedTree, WorldSource};

fn main() {
    let mut args = std::env::args().skip(1);
    let episodes: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(400);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let out_dir = args
        .next()
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("drlnav_ddpg"));

    let config = RunConfig {
        episodes,
        seed,
        out_dir,
        ..RunConfig::default()
    };
    println!(
        "training ddpg for {episodes} episodes (seed {seed}) into {}",
        config.out_dir.display()
    );
    let artifacts = train(&config, true).expect("training");
    println!("training took {:.1}s", artifacts.train_wall_s);

    // evaluate on the same world the run trained on
    let world = WorldSource::Generate {
        width: config.world.width,
        height: config.world.height,
        rects: config.world.rects,
        circles: config.world.circles,
        seed: SeedTree::new(seed).child_seed("world"),
    };
    let report = evaluate(
        &artifacts.checkpoint_path,
        &world,
        100,
        SeedTree::new(seed).child_seed("eval"),
    )
    .expect("evaluation");
    println!(
        "greedy evaluation: {:.1}% success over {} episodes, mean time {:.1}s, mean steps {:.1}",
        report.success_rate, report.n_episodes, report.mean_episode_time_s, report.mean_steps
    );
}
