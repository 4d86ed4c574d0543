//! Scratch eval-outcome breakdown (not a deliverable).

use drlnav::agents::map_normalized_action;
use drlnav::env::NavEnv;
use drlnav::harness::{Checkpoint, SeedTree, WorldSource};
use ndarray::Array2;

fn main() {
    let mut args = std::env::args().skip(1);
    let ckpt_path = args.next().unwrap_or("/tmp/probe3/checkpoint-final.ckpt".into());
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let ckpt = Checkpoint::load(&ckpt_path).unwrap();
    let world = WorldSource::Generate {
        width: 20.0,
        height: 20.0,
        rects: 3,
        circles: 5,
        seed: SeedTree::new(seed).child_seed("world"),
    };
    let map = world.build().unwrap();
    let mut env = NavEnv::new(map, *ckpt.env()).unwrap();
    let mut goal_rng = SeedTree::new(SeedTree::new(seed).child_seed("eval")).stream("eval-goals");
    let vehicle = ckpt.env().vehicle;
    let mut outcomes = std::collections::BTreeMap::new();
    for _ in 0..100 {
        let mut obs = env.reset(&mut goal_rng).unwrap().to_vector();
        let goal = env.goal();
        let (outcome, steps) = loop {
            let control = match &ckpt {
                Checkpoint::Ddpg { agent, .. } => {
                    let input = Array2::from_shape_vec((1, obs.len()), obs.clone()).unwrap();
                    let out = agent.actor.predict(&input).unwrap();
                    map_normalized_action([out[[0, 0]], out[[0, 1]]], &vehicle)
                }
                _ => unreachable!(),
            };
            let step = env.step(control).unwrap();
            obs = step.observation.to_vector();
            if step.done {
                break (step.outcome, env.steps_taken());
            }
        };
        *outcomes.entry(format!("{outcome:?}")).or_insert(0usize) += 1;
        if outcome != drlnav::env::Outcome::ReachedGoal {
            let d = env.pose().distance_to(goal);
            println!(
                "{outcome:?} after {steps} steps, goal ({:.1},{:.1}), final dist {d:.2}",
                goal.0, goal.1
            );
        }
    }
    println!("{outcomes:?}");
}
