//! Rectangular obstacle worlds with exact geometric queries.
//!
//! A [`WorldMap`] is a `[0,width] × [0,height]` arena holding axis-aligned
//! rectangles ("houses") and circles ("trees"), a fixed start pose, and a
//! goal point. Collision tests and the ray casts behind the lidar model are
//! analytic (disc–shape distances, slab-method ray–rect, quadratic
//! ray–circle); there is no occupancy grid anywhere, so sensing introduces
//! no discretization error.
//!
//! Worlds round-trip through a TOML file format, see [`WorldMap::load`].

use std::path::Path;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vehicle::{wrap_angle, Pose};

/// A static obstacle: a tree-like disc or a house-like axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum Obstacle {
    Circle { cx: f64, cy: f64, r: f64 },
    Rect { xmin: f64, ymin: f64, xmax: f64, ymax: f64 },
}

impl Obstacle {
    /// Distance from a point to this obstacle's boundary (0 inside).
    pub fn distance_to_point(&self, p: (f64, f64)) -> f64 {
        match *self {
            Obstacle::Circle { cx, cy, r } => ((p.0 - cx).hypot(p.1 - cy) - r).max(0.0),
            Obstacle::Rect { xmin, ymin, xmax, ymax } => {
                let dx = (xmin - p.0).max(0.0).max(p.0 - xmax);
                let dy = (ymin - p.1).max(0.0).max(p.1 - ymax);
                dx.hypot(dy)
            }
        }
    }

    fn validate(&self, width: f64, height: f64) -> Result<()> {
        match *self {
            Obstacle::Circle { cx, cy, r } => {
                if r <= 0.0 || !r.is_finite() {
                    return Err(Error::config(format!("circle radius must be > 0, got {r}")));
                }
                if cx - r < 0.0 || cx + r > width || cy - r < 0.0 || cy + r > height {
                    return Err(Error::config(format!(
                        "circle at ({cx}, {cy}) r={r} extends outside the map bounds"
                    )));
                }
            }
            Obstacle::Rect { xmin, ymin, xmax, ymax } => {
                if !(xmin < xmax && ymin < ymax) {
                    return Err(Error::config(format!(
                        "rect min corner must be strictly below max corner, got ({xmin},{ymin})..({xmax},{ymax})"
                    )));
                }
                if xmin < 0.0 || ymin < 0.0 || xmax > width || ymax > height {
                    return Err(Error::config("rect extends outside the map bounds"));
                }
            }
        }
        Ok(())
    }

    /// Nearest intersection distance of the ray `origin + t·dir` (t > 0) with
    /// this obstacle, if any. For an origin inside the obstacle this is the
    /// distance to the exit point, which keeps ranges strictly positive.
    fn ray_hit(&self, origin: (f64, f64), dir: (f64, f64)) -> Option<f64> {
        match *self {
            Obstacle::Circle { cx, cy, r } => {
                // |o + t d - c|² = r², with |d| = 1.
                let ox = origin.0 - cx;
                let oy = origin.1 - cy;
                let b = ox * dir.0 + oy * dir.1;
                let c = ox * ox + oy * oy - r * r;
                let disc = b * b - c;
                if disc < 0.0 {
                    return None;
                }
                let sqrt_disc = disc.sqrt();
                let t_near = -b - sqrt_disc;
                if t_near > 0.0 {
                    Some(t_near)
                } else {
                    let t_far = -b + sqrt_disc;
                    (t_far > 0.0).then_some(t_far)
                }
            }
            Obstacle::Rect { xmin, ymin, xmax, ymax } => {
                // Slab method; infinities from a zero direction component
                // behave correctly in the min/max lattice.
                let inv_x = 1.0 / dir.0;
                let inv_y = 1.0 / dir.1;
                let (tx1, tx2) = ((xmin - origin.0) * inv_x, (xmax - origin.0) * inv_x);
                let (ty1, ty2) = ((ymin - origin.1) * inv_y, (ymax - origin.1) * inv_y);
                let t_enter = tx1.min(tx2).max(ty1.min(ty2));
                let t_exit = tx1.max(tx2).min(ty1.max(ty2));
                if t_exit < t_enter || t_exit <= 0.0 {
                    return None;
                }
                Some(if t_enter > 0.0 { t_enter } else { t_exit })
            }
        }
    }
}

/// One full sweep of simulated range readings.
#[derive(Debug, Clone, PartialEq)]
pub struct LidarScan {
    /// Beam ranges in meters, each in `(0, max_range]`, ordered from
    /// `-fov/2` to `+fov/2` relative to the vehicle heading.
    pub ranges: Vec<f64>,
    pub fov: f64,
    pub max_range: f64,
}

/// Immutable world description. Queries never mutate, so a map can be shared
/// freely across threads.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WorldMap {
    pub width: f64,
    pub height: f64,
    pub start: StartPose,
    pub goal: GoalPoint,
    pub goal_radius: f64,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StartPose {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalPoint {
    pub x: f64,
    pub y: f64,
}

/// Clearance used when validating that the start and goal are collision-free;
/// matches the default vehicle footprint radius.
pub const DEFAULT_CLEARANCE: f64 = 0.3;

/// Attempt budget for each rejection-sampled placement before giving up.
const MAX_PLACEMENT_ATTEMPTS: usize = 1000;

impl WorldMap {
    pub fn start_pose(&self) -> Pose {
        Pose::new(self.start.x, self.start.y, self.start.theta)
    }

    pub fn goal_point(&self) -> (f64, f64) {
        (self.goal.x, self.goal.y)
    }

    pub fn diagonal(&self) -> f64 {
        self.width.hypot(self.height)
    }

    /// True iff a disc of radius `clearance` centered at `position` overlaps
    /// any obstacle or pokes outside the map bounds.
    pub fn collides(&self, position: (f64, f64), clearance: f64) -> bool {
        let (x, y) = position;
        if x - clearance < 0.0
            || y - clearance < 0.0
            || x + clearance > self.width
            || y + clearance > self.height
        {
            return true;
        }
        self.obstacles
            .iter()
            .any(|obs| obs.distance_to_point(position) <= clearance)
    }

    /// Distance along a ray to the nearest obstacle or map boundary, capped
    /// at `max_range`.
    pub fn raycast(&self, origin: (f64, f64), bearing: f64, max_range: f64) -> f64 {
        let dir = (bearing.cos(), bearing.sin());
        // Boundary exit distance; from an interior origin at least one wall
        // lies ahead in any direction.
        let mut nearest = boundary_exit(origin, dir, self.width, self.height);
        for obs in &self.obstacles {
            if let Some(t) = obs.ray_hit(origin, dir) {
                nearest = nearest.min(t);
            }
        }
        nearest.min(max_range)
    }

    /// Sweep `n_beams` rays evenly across `fov`, centered on the heading.
    pub fn lidar_scan(&self, pose: &Pose, n_beams: usize, fov: f64, max_range: f64) -> LidarScan {
        let ranges = (0..n_beams)
            .map(|i| {
                let offset = if n_beams == 1 {
                    0.0
                } else {
                    -fov / 2.0 + fov * i as f64 / (n_beams - 1) as f64
                };
                self.raycast((pose.x, pose.y), pose.theta + offset, max_range)
            })
            .collect();
        LidarScan { ranges, fov, max_range }
    }

    /// Rejection-sample a free point with the given clearance, at least
    /// `min_start_distance` from the start pose. Deterministic per RNG state.
    pub fn sample_goal(
        &self,
        rng: &mut impl Rng,
        min_clearance: f64,
        min_start_distance: f64,
    ) -> Result<(f64, f64)> {
        let start = (self.start.x, self.start.y);
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let p = (
                rng.random_range(0.0..self.width),
                rng.random_range(0.0..self.height),
            );
            if !self.collides(p, min_clearance)
                && (p.0 - start.0).hypot(p.1 - start.1) >= min_start_distance
            {
                return Ok(p);
            }
        }
        Err(Error::Sampling(format!(
            "no free goal found in {MAX_PLACEMENT_ATTEMPTS} attempts \
             (clearance {min_clearance}, min start distance {min_start_distance})"
        )))
    }

    /// Check every structural invariant; `clearance` is the vehicle footprint
    /// the start and goal must be free for.
    pub fn validate(&self, clearance: f64) -> Result<()> {
        if !(self.width > 0.0 && self.height > 0.0) {
            return Err(Error::config("world width/height must be > 0"));
        }
        if self.goal_radius <= 0.0 {
            return Err(Error::config("goal_radius must be > 0"));
        }
        for obs in &self.obstacles {
            obs.validate(self.width, self.height)?;
        }
        let start = (self.start.x, self.start.y);
        if self.collides(start, clearance) {
            return Err(Error::config("start pose is not collision-free"));
        }
        if self.collides(self.goal_point(), clearance) {
            return Err(Error::config("goal point is not collision-free"));
        }
        let start_goal_dist = (start.0 - self.goal.x).hypot(start.1 - self.goal.y);
        if start_goal_dist <= self.goal_radius {
            return Err(Error::config(format!(
                "goal lies within goal_radius of the start ({start_goal_dist} <= {})",
                self.goal_radius
            )));
        }
        Ok(())
    }

    /// Parse and validate a world TOML file.
    pub fn load(path: impl AsRef<Path>) -> Result<WorldMap> {
        let text = std::fs::read_to_string(path.as_ref())?;
        let map: WorldMap = toml::from_str(&text).map_err(|e| Error::Parse {
            line: e.span().map(|s| text[..s.start].lines().count()),
            message: format!("world file: {}", e.message()),
        })?;
        map.validate(DEFAULT_CLEARANCE)?;
        Ok(map)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let text = toml::to_string_pretty(self)
            .map_err(|e| Error::Parse { line: None, message: e.to_string() })?;
        std::fs::write(path, text)?;
        Ok(())
    }
}

/// Distance to the first map wall along a unit direction from an interior point.
fn boundary_exit(origin: (f64, f64), dir: (f64, f64), width: f64, height: f64) -> f64 {
    let mut t = f64::INFINITY;
    if dir.0 > 0.0 {
        t = t.min((width - origin.0) / dir.0);
    } else if dir.0 < 0.0 {
        t = t.min(-origin.0 / dir.0);
    }
    if dir.1 > 0.0 {
        t = t.min((height - origin.1) / dir.1);
    } else if dir.1 < 0.0 {
        t = t.min(-origin.1 / dir.1);
    }
    t.max(0.0)
}

/// Gap kept between placed obstacles (and around the start) so corridors wide
/// enough for the default vehicle always exist, as a fraction of the shorter
/// map side.
const SEPARATION_FRACTION: f64 = 0.06;
/// Obstacles stay this far from the walls, as a fraction of the shorter side.
const EDGE_MARGIN_FRACTION: f64 = 0.05;

/// Procedurally generate a world: `n_rects` houses and `n_circles` trees
/// scattered without overlap, a fixed start near the lower-left corner facing
/// the map center, and an initial goal sampled in free space.
///
/// Deterministic for a given seed: equal seeds yield identical maps.
pub fn generate_world(
    width: f64,
    height: f64,
    n_rects: usize,
    n_circles: usize,
    seed: u64,
) -> Result<WorldMap> {
    if !(width > 0.0 && height > 0.0) {
        return Err(Error::config("world width/height must be > 0"));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let side = width.min(height);
    let separation = SEPARATION_FRACTION * side;
    let edge_margin = EDGE_MARGIN_FRACTION * side;
    // Fixed spawn at the map center: maximal wall clearance and no direction
    // is systematically harder than another for the random goals.
    let start = StartPose {
        x: 0.5 * width,
        y: 0.5 * height,
        theta: 0.0,
    };
    // Free bubble around the spawn so the vehicle is never boxed in.
    let start_clear = 0.1 * side;

    let mut obstacles: Vec<Obstacle> = Vec::with_capacity(n_rects + n_circles);
    let mut place = |make: &mut dyn FnMut(&mut ChaCha12Rng) -> Obstacle,
                     obstacles: &mut Vec<Obstacle>|
     -> Result<()> {
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let candidate = make(&mut rng);
            let ok = candidate.validate(width, height).is_ok()
                && candidate.distance_to_point((start.x, start.y)) > start_clear
                && in_margins(&candidate, width, height, edge_margin)
                && obstacles
                    .iter()
                    .all(|o| obstacle_gap(o, &candidate) >= separation);
            if ok {
                obstacles.push(candidate);
                return Ok(());
            }
        }
        Err(Error::WorldGen(format!(
            "could not place obstacle {} of {} after {MAX_PLACEMENT_ATTEMPTS} attempts",
            obstacles.len() + 1,
            n_rects + n_circles
        )))
    };

    // Houses: rectangles with sides 10-20% of the shorter map dimension.
    for _ in 0..n_rects {
        place(
            &mut |rng| {
                let w = rng.random_range(0.10 * side..0.20 * side);
                let h = rng.random_range(0.10 * side..0.20 * side);
                let x = rng.random_range(0.0..width - w);
                let y = rng.random_range(0.0..height - h);
                Obstacle::Rect { xmin: x, ymin: y, xmax: x + w, ymax: y + h }
            },
            &mut obstacles,
        )?;
    }
    // Trees: discs with radii 2-4% of the shorter map dimension.
    for _ in 0..n_circles {
        place(
            &mut |rng| {
                let r = rng.random_range(0.02 * side..0.04 * side);
                Obstacle::Circle {
                    cx: rng.random_range(r..width - r),
                    cy: rng.random_range(r..height - r),
                    r,
                }
            },
            &mut obstacles,
        )?;
    }

    let goal_radius = 0.025 * side;
    let mut map = WorldMap {
        width,
        height,
        start,
        goal: GoalPoint { x: 0.0, y: 0.0 },
        goal_radius,
        obstacles,
    };
    let goal = map.sample_goal(&mut rng, DEFAULT_CLEARANCE, 2.0 * goal_radius)?;
    map.goal = GoalPoint { x: goal.0, y: goal.1 };
    map.validate(DEFAULT_CLEARANCE)?;
    Ok(map)
}

fn in_margins(obs: &Obstacle, width: f64, height: f64, margin: f64) -> bool {
    match *obs {
        Obstacle::Circle { cx, cy, r } => {
            cx - r >= margin && cy - r >= margin && cx + r <= width - margin && cy + r <= height - margin
        }
        Obstacle::Rect { xmin, ymin, xmax, ymax } => {
            xmin >= margin && ymin >= margin && xmax <= width - margin && ymax <= height - margin
        }
    }
}

/// Minimum distance between two obstacle boundaries (0 when they touch or
/// overlap).
fn obstacle_gap(a: &Obstacle, b: &Obstacle) -> f64 {
    match (*a, *b) {
        (Obstacle::Circle { cx, cy, r }, Obstacle::Circle { cx: cx2, cy: cy2, r: r2 }) => {
            ((cx - cx2).hypot(cy - cy2) - r - r2).max(0.0)
        }
        (Obstacle::Circle { cx, cy, r }, rect @ Obstacle::Rect { .. })
        | (rect @ Obstacle::Rect { .. }, Obstacle::Circle { cx, cy, r }) => {
            (rect.distance_to_point((cx, cy)) - r).max(0.0)
        }
        (
            Obstacle::Rect { xmin, ymin, xmax, ymax },
            Obstacle::Rect { xmin: x2min, ymin: y2min, xmax: x2max, ymax: y2max },
        ) => {
            let dx = (x2min - xmax).max(xmin - x2max).max(0.0);
            let dy = (y2min - ymax).max(ymin - y2max).max(0.0);
            dx.hypot(dy)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn empty_map(width: f64, height: f64) -> WorldMap {
        WorldMap {
            width,
            height,
            start: StartPose { x: width * 0.1, y: height * 0.1, theta: 0.0 },
            goal: GoalPoint { x: width * 0.8, y: height * 0.8 },
            goal_radius: 0.5,
            obstacles: vec![],
        }
    }

    #[test]
    fn collides_empty_map_interior_is_free() {
        assert!(!empty_map(20.0, 20.0).collides((10.0, 10.0), 0.3));
    }

    #[test]
    fn collides_out_of_bounds() {
        assert!(empty_map(20.0, 20.0).collides((-1.0, 10.0), 0.3));
        assert!(empty_map(20.0, 20.0).collides((10.0, 19.9), 0.3));
    }

    #[test]
    fn collides_disc_circle_boundary() {
        // circle r=1 at (5,5); disc clearance 0.3 touches at distance 1.3
        let mut map = empty_map(20.0, 20.0);
        map.obstacles.push(Obstacle::Circle { cx: 5.0, cy: 5.0, r: 1.0 });
        assert!(!map.collides((5.0, 6.5), 0.3));
        assert!(map.collides((5.0, 6.2), 0.3));
    }

    #[test]
    fn collides_disc_rect_corner() {
        let mut map = empty_map(20.0, 20.0);
        map.obstacles.push(Obstacle::Rect { xmin: 4.0, ymin: 4.0, xmax: 6.0, ymax: 6.0 });
        // corner at (6,6); diagonal distance to (6.5, 6.5) is ~0.707
        assert!(!map.collides((6.5, 6.5), 0.5));
        assert!(map.collides((6.5, 6.5), 0.8));
        assert!(map.collides((5.0, 5.0), 0.0)); // inside
    }

    #[test]
    fn raycast_caps_at_max_range() {
        let map = empty_map(20.0, 20.0);
        assert_eq!(map.raycast((10.0, 10.0), 0.0, 5.0), 5.0);
    }

    #[test]
    fn raycast_hits_east_wall() {
        let map = empty_map(20.0, 20.0);
        assert_abs_diff_eq!(map.raycast((10.0, 10.0), 0.0, 50.0), 10.0, epsilon = 1e-12);
    }

    #[test]
    fn raycast_hits_circle_front() {
        let mut map = empty_map(20.0, 20.0);
        map.obstacles.push(Obstacle::Circle { cx: 15.0, cy: 10.0, r: 2.0 });
        assert_abs_diff_eq!(map.raycast((10.0, 10.0), 0.0, 50.0), 3.0, epsilon = 1e-12);
    }

    #[test]
    fn raycast_rect_axis_aligned_and_diagonal() {
        let mut map = empty_map(20.0, 20.0);
        map.obstacles.push(Obstacle::Rect { xmin: 12.0, ymin: 8.0, xmax: 14.0, ymax: 12.0 });
        assert_abs_diff_eq!(map.raycast((10.0, 10.0), 0.0, 50.0), 2.0, epsilon = 1e-12);
        // 45° ray from (10,6) hits the rect's bottom edge y=8 at (12,8)
        let t = map.raycast((10.0, 6.0), PI / 4.0, 50.0);
        assert_abs_diff_eq!(t, 2.0 * 2.0_f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn raycast_parallel_ray_misses_rect() {
        let mut map = empty_map(20.0, 20.0);
        map.obstacles.push(Obstacle::Rect { xmin: 12.0, ymin: 8.0, xmax: 14.0, ymax: 12.0 });
        // dir.y = 0 exactly, origin above the slab
        assert_abs_diff_eq!(map.raycast((0.5, 15.0), 0.0, 50.0), 19.5, epsilon = 1e-12);
    }

    #[test]
    fn raycast_from_inside_obstacle_is_positive() {
        let mut map = empty_map(20.0, 20.0);
        map.obstacles.push(Obstacle::Circle { cx: 5.0, cy: 5.0, r: 1.0 });
        map.obstacles.push(Obstacle::Rect { xmin: 8.0, ymin: 8.0, xmax: 10.0, ymax: 10.0 });
        let inside_circle = map.raycast((5.0, 5.0), 0.3, 50.0);
        let inside_rect = map.raycast((9.0, 9.0), 1.1, 50.0);
        assert!(inside_circle > 0.0 && inside_circle <= 1.0 + 1e-12);
        assert!(inside_rect > 0.0);
    }

    #[test]
    fn lidar_open_map_all_max_range() {
        let map = empty_map(1000.0, 1000.0);
        let scan = map.lidar_scan(&Pose::new(500.0, 500.0, 1.2), 16, PI, 10.0);
        assert_eq!(scan.ranges.len(), 16);
        assert!(scan.ranges.iter().all(|&r| r == 10.0));
    }

    #[test]
    fn lidar_center_beam_faces_wall() {
        // heading 0 toward east wall 4 m away; fov π, 3 beams → center beam
        // index 1 looks straight ahead
        let map = empty_map(20.0, 20.0);
        let scan = map.lidar_scan(&Pose::new(16.0, 10.0, 0.0), 3, PI, 50.0);
        assert_abs_diff_eq!(scan.ranges[1], 4.0, epsilon = 1e-12);
    }

    #[test]
    fn lidar_single_beam_points_forward() {
        let map = empty_map(20.0, 20.0);
        let scan = map.lidar_scan(&Pose::new(10.0, 10.0, PI / 2.0), 1, PI, 50.0);
        assert_abs_diff_eq!(scan.ranges[0], 10.0, epsilon = 1e-12);
    }

    #[test]
    fn lidar_rotationally_equivariant() {
        // Rotate circle obstacles and the pose together about the map center;
        // ranges must be unchanged (bounds are out of reach at max_range 10).
        let center = (100.0, 100.0);
        let rotate = |p: (f64, f64), phi: f64| {
            let (dx, dy) = (p.0 - center.0, p.1 - center.1);
            (
                center.0 + dx * phi.cos() - dy * phi.sin(),
                center.1 + dx * phi.sin() + dy * phi.cos(),
            )
        };
        let obstacles = [(104.0, 98.0, 1.5), (96.0, 103.0, 2.0), (100.0, 93.0, 0.8)];
        let phi = 1.234;
        let mut base = empty_map(200.0, 200.0);
        let mut rotated = empty_map(200.0, 200.0);
        for &(cx, cy, r) in &obstacles {
            base.obstacles.push(Obstacle::Circle { cx, cy, r });
            let (rx, ry) = rotate((cx, cy), phi);
            rotated.obstacles.push(Obstacle::Circle { cx: rx, cy: ry, r });
        }
        let pose = Pose::new(99.0, 99.0, 0.4);
        let (px, py) = rotate((pose.x, pose.y), phi);
        let pose_rot = Pose::new(px, py, pose.theta + phi);
        let scan_a = base.lidar_scan(&pose, 16, PI, 10.0);
        let scan_b = rotated.lidar_scan(&pose_rot, 16, PI, 10.0);
        for (a, b) in scan_a.ranges.iter().zip(&scan_b.ranges) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-9);
        }
    }

    #[test]
    fn generate_world_counts_and_determinism() {
        let a = generate_world(150.0, 150.0, 3, 8, 7).unwrap();
        let rects = a.obstacles.iter().filter(|o| matches!(o, Obstacle::Rect { .. })).count();
        let circles = a.obstacles.iter().filter(|o| matches!(o, Obstacle::Circle { .. })).count();
        assert_eq!((rects, circles), (3, 8));
        let b = generate_world(150.0, 150.0, 3, 8, 7).unwrap();
        assert_eq!(a, b);
        a.validate(DEFAULT_CLEARANCE).unwrap();
    }

    #[test]
    fn generate_world_empty() {
        let map = generate_world(20.0, 20.0, 0, 0, 42).unwrap();
        assert!(map.obstacles.is_empty());
        map.validate(DEFAULT_CLEARANCE).unwrap();
    }

    #[test]
    fn generate_world_desk_default_is_valid() {
        let map = generate_world(20.0, 20.0, 3, 5, 1).unwrap();
        assert_eq!(map.obstacles.len(), 8);
        map.validate(DEFAULT_CLEARANCE).unwrap();
    }

    #[test]
    fn sample_goal_respects_constraints() {
        let map = generate_world(20.0, 20.0, 3, 5, 3).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        for _ in 0..200 {
            let g = map.sample_goal(&mut rng, 0.3, 2.0).unwrap();
            assert!(!map.collides(g, 0.3));
            assert!((g.0 - map.start.x).hypot(g.1 - map.start.y) >= 2.0);
        }
    }

    #[test]
    fn sample_goal_fully_blocked_errors() {
        let mut map = empty_map(10.0, 10.0);
        map.obstacles.push(Obstacle::Rect { xmin: 0.0, ymin: 0.0, xmax: 10.0, ymax: 10.0 });
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        assert!(matches!(
            map.sample_goal(&mut rng, 0.3, 1.0),
            Err(Error::Sampling(_))
        ));
    }

    #[test]
    fn sample_goal_uniform_over_free_area() {
        // On an empty map with clearance c the free region is the inset
        // rectangle [c, w-c]²; bin 1000 samples into a 4×4 grid over it and
        // chi-square against the uniform expectation. 15 dof, p > 0.01 ⇔
        // statistic < 30.578.
        let map = empty_map(20.0, 20.0);
        let c = 0.3;
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        let n = 1000;
        let mut counts = [0usize; 16];
        for _ in 0..n {
            let g = map.sample_goal(&mut rng, c, 0.0).unwrap();
            let col = (((g.0 - c) / (20.0 - 2.0 * c) * 4.0) as usize).min(3);
            let row = (((g.1 - c) / (20.0 - 2.0 * c) * 4.0) as usize).min(3);
            counts[row * 4 + col] += 1;
        }
        let expected = n as f64 / 16.0;
        let stat: f64 = counts
            .iter()
            .map(|&k| (k as f64 - expected).powi(2) / expected)
            .sum();
        let critical = {
            use statrs::distribution::{ChiSquared, ContinuousCDF};
            ChiSquared::new(15.0).unwrap().inverse_cdf(0.99)
        };
        assert!(stat < critical, "chi-square {stat} >= {critical}");
    }

    #[test]
    fn raycast_positive_from_free_origin() {
        let map = generate_world(20.0, 20.0, 3, 5, 5).unwrap();
        let origin = (map.start.x, map.start.y);
        assert!(!map.collides(origin, 0.0));
        for i in 0..64 {
            let bearing = i as f64 / 64.0 * 2.0 * PI;
            assert!(map.raycast(origin, bearing, 10.0) > 0.0);
        }
    }

    #[test]
    fn world_file_round_trip() {
        let map = generate_world(20.0, 20.0, 2, 3, 13).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("world.toml");
        map.save(&path).unwrap();
        let loaded = WorldMap::load(&path).unwrap();
        assert_eq!(map, loaded);
    }

    #[test]
    fn world_file_rejects_invariant_violations() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.toml");
        // goal inside goal_radius of start
        std::fs::write(
            &path,
            r#"
width = 20.0
height = 20.0
goal_radius = 5.0

[start]
x = 2.0
y = 2.0
theta = 0.0

[goal]
x = 3.0
y = 2.0
"#,
        )
        .unwrap();
        assert!(matches!(WorldMap::load(&path), Err(Error::Config(_))));

        // malformed TOML reports a parse error
        std::fs::write(&path, "width = [not toml").unwrap();
        assert!(matches!(WorldMap::load(&path), Err(Error::Parse { .. })));

        // rect with inverted corners
        std::fs::write(
            &path,
            r#"
width = 20.0
height = 20.0
goal_radius = 0.5

[start]
x = 2.0
y = 2.0
theta = 0.0

[goal]
x = 15.0
y = 15.0

[[obstacles]]
type = "rect"
xmin = 8.0
ymin = 8.0
xmax = 6.0
ymax = 9.0
"#,
        )
        .unwrap();
        assert!(matches!(WorldMap::load(&path), Err(Error::Config(_))));
    }
}
