//! Procedural worlds and the lidar model.
//!
//! Generates the desk-scale obstacle world, prints its layout and a range
//! scan from the start pose, and saves the map as a world TOML file.
//!
//! ```bash
//! cargo run --release --example world_sensing [seed]
//! ```

use drlnav::world::{generate_world, Obstacle};

fn main() {
    let seed: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let map = generate_world(20.0, 20.0, 3, 5, seed).expect("world generation");

    println!("world {}x{} m (seed {seed})", map.width, map.height);
    println!(
        "start ({:.2}, {:.2}, {:.2} rad), initial goal ({:.2}, {:.2}), goal radius {:.2} m",
        map.start.x, map.start.y, map.start.theta, map.goal.x, map.goal.y, map.goal_radius
    );
    for obs in &map.obstacles {
        match obs {
            Obstacle::Rect { xmin, ymin, xmax, ymax } => {
                println!("  house: ({xmin:.2}, {ymin:.2}) .. ({xmax:.2}, {ymax:.2})")
            }
            Obstacle::Circle { cx, cy, r } => {
                println!("  tree:  ({cx:.2}, {cy:.2}) r={r:.2}")
            }
        }
    }

    let pose = map.start_pose();
    let scan = map.lidar_scan(&pose, 16, std::f64::consts::PI, 10.0);
    println!("\n16-beam lidar from the start pose (fov π, max range 10 m):");
    let bars: Vec<String> = scan.ranges.iter().map(|r| format!("{r:.2}")).collect();
    println!("  [{}]", bars.join(", "));

    let out = std::env::temp_dir().join("drlnav_world.toml");
    map.save(&out).expect("save world");
    println!("\nworld file written to {}", out.display());
}
