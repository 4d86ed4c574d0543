//! Scratch hyperparameter probe (not a deliverable).
//! Usage: diag <episodes> <actor_alpha> <alpha> <tau> <seed> [sigma_decay]

use drlnav::harness::{evaluate, train, RunConfig, SeedTree, WorldSource};

fn main() {
    let mut args = std::env::args().skip(1);
    let episodes: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(400);
    let actor_alpha: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.0003);
    let alpha: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.001);
    let tau: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.99);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let sigma_decay: f64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.995);
    let update_every: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);

    let mut config = RunConfig::default();
    config.episodes = episodes;
    config.seed = seed;
    config.agent.actor_alpha = actor_alpha;
    config.agent.alpha = alpha;
    config.agent.tau = tau;
    config.agent.ou_sigma_decay = sigma_decay;
    config.agent.update_every = update_every;
    config.out_dir = std::env::temp_dir().join(format!(
        "diag-{actor_alpha}-{alpha}-{tau}-{seed}-{sigma_decay}-{update_every}"
    ));
    let artifacts = train(&config, false).expect("train");

    let world = WorldSource::Generate {
        width: 20.0,
        height: 20.0,
        rects: 3,
        circles: 5,
        seed: SeedTree::new(seed).child_seed("world"),
    };
    // trajectory of greedy skill across the periodic checkpoints
    let mut curve = Vec::new();
    let mut ep = 50;
    while ep <= episodes {
        let p = config.out_dir.join(format!("checkpoint-ep{ep:04}.ckpt"));
        if p.exists() {
            let r = evaluate(&p, &world, 50, SeedTree::new(seed).child_seed("eval")).unwrap();
            curve.push(format!("{ep}:{:.0}%", r.success_rate));
        }
        ep += 50;
    }
    let final_report = evaluate(
        &artifacts.checkpoint_path,
        &world,
        100,
        SeedTree::new(seed).child_seed("eval"),
    )
    .unwrap();
    println!(
        "a={actor_alpha} c={alpha} tau={tau} seed={seed} dec={sigma_decay} ue={update_every} | {} | final {:.0}% (wall {:.0}s)",
        curve.join(" "),
        final_report.success_rate,
        artifacts.train_wall_s
    );
}
