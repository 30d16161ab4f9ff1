//! Uniform-sampling RRT* baseline and random shortcut smoothing.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::collision::{CollisionChecker, CollisionMode};
use crate::error::PlanError;
use crate::geometry::Point2;
use crate::planner_core::{path_length, Path, PlanResult, SearchTree};
use crate::scalar::Scalar;
use crate::scene::{OccupancyGrid, Scene};

pub const DEFAULT_SMOOTHING_ITERS: usize = 100;

/// Seed offset for the smoothing stream, so smoothing never perturbs the
/// sampling sequence.
pub(crate) const SMOOTHING_STREAM: u64 = 0x5eed_5e0f;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UniformConfig<T> {
    pub seed: u64,
    pub max_iters: usize,
    /// Maximum edge length, also the rewiring radius.
    pub step: T,
    pub goal_bias: f64,
    pub goal_tol: T,
    /// Use the `gamma (ln n / n)^(1/2)` radius, capped at `step`.
    pub shrinking_ball: bool,
    pub collision: CollisionMode,
    pub smoothing_iters: usize,
    /// Stop as soon as the smoothed best path is no longer than this.
    pub target_length: Option<T>,
}

impl<T: Scalar> UniformConfig<T> {
    pub fn new(seed: u64) -> Self {
        Self {
            seed,
            max_iters: 20_000,
            step: T::lit(5.0),
            goal_bias: 0.05,
            goal_tol: T::lit(0.5),
            shrinking_ball: false,
            collision: CollisionMode::Open,
            smoothing_iters: DEFAULT_SMOOTHING_ITERS,
            target_length: None,
        }
    }
}

/// Point at arc length `s` and the index of the segment holding it.
fn point_at<T: Scalar>(path: &Path<T>, s: T) -> (Point2<T>, usize) {
    let mut acc = T::zero();
    let last = path.waypoints.len() - 2;
    for (k, (a, b)) in path.segments().enumerate() {
        let len = a.distance(b);
        if s <= acc + len || k == last {
            let t = if len > T::zero() { ((s - acc) / len).min(T::one()).max(T::zero()) } else { T::zero() };
            return (a.lerp(b, t), k);
        }
        acc = acc + len;
    }
    (*path.start(), 0)
}

/// Random shortcutting: pick two arc-length positions, and splice in the
/// direct segment between them when it is collision free and shorter.
pub fn shortcut_smooth<T: Scalar>(
    checker: &CollisionChecker<'_, T>,
    path: &Path<T>,
    rng: &mut impl Rng,
    iterations: usize,
) -> Path<T> {
    let tol = T::tolerance();
    let mut current = path.clone();
    for _ in 0..iterations {
        if current.waypoints.len() < 3 {
            break;
        }
        let total = path_length(&current);
        let u = T::lit(rng.gen::<f64>()) * total;
        let v = T::lit(rng.gen::<f64>()) * total;
        let (s1, s2) = if u <= v { (u, v) } else { (v, u) };
        let (q1, k1) = point_at(&current, s1);
        let (q2, k2) = point_at(&current, s2);
        if k1 == k2 || !checker.is_clear(&q1, &q2) {
            continue;
        }
        let mut waypoints = current.waypoints[..=k1].to_vec();
        waypoints.push(q1);
        waypoints.push(q2);
        waypoints.extend_from_slice(&current.waypoints[k2 + 1..]);
        let candidate = Path::new(waypoints);
        if path_length(&candidate) < total - tol {
            current = candidate;
        }
    }
    current
}

fn neighbor_radius<T: Scalar>(config: &UniformConfig<T>, scene: &Scene<T>, n: usize) -> T {
    if !config.shrinking_ball || n < 2 {
        return config.step;
    }
    let area = scene.width * scene.height;
    let gamma = T::lit(3.0f64.sqrt()) * (area / T::lit(std::f64::consts::PI)).sqrt();
    let n = T::from_usize_lossy(n);
    (gamma * (n.ln() / n).sqrt()).min(config.step)
}

/// Best goal-path cost after each improvement, as `(iteration, cost)`.
pub type CostTrace<T> = Vec<(usize, T)>;

/// Classic RRT* with uniform sampling over the workspace.
pub fn plan_uniform<T: Scalar>(
    scene: &Scene<T>,
    grid: &OccupancyGrid<T>,
    config: &UniformConfig<T>,
) -> Result<PlanResult<T>, PlanError> {
    plan_uniform_traced(scene, grid, config).map(|(result, _)| result)
}

pub fn plan_uniform_traced<T: Scalar>(
    scene: &Scene<T>,
    grid: &OccupancyGrid<T>,
    config: &UniformConfig<T>,
) -> Result<(PlanResult<T>, CostTrace<T>), PlanError> {
    let started = Instant::now();
    let checker = CollisionChecker::new(grid, config.collision);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut smooth_rng = ChaCha8Rng::seed_from_u64(config.seed ^ SMOOTHING_STREAM);
    let goal = scene.goal;
    let tol = T::tolerance();

    let mut tree = SearchTree::new(scene.start);
    let mut goal_nodes: Vec<usize> = Vec::new();
    if scene.start.distance(&goal) <= config.goal_tol && checker.is_clear(&scene.start, &goal) {
        goal_nodes.push(0);
    }
    let best_of = |tree: &SearchTree<T>, goal_nodes: &[usize]| {
        goal_nodes
            .iter()
            .map(|&k| (k, tree.node(k).cost_from_start + tree.node(k).position.distance(&goal)))
            .fold(None, |acc: Option<(usize, T)>, (k, c)| match acc {
                Some((_, b)) if b <= c => acc,
                _ => Some((k, c)),
            })
    };
    let goal_path = |tree: &SearchTree<T>, k: usize| {
        let mut waypoints = tree.path_to(k).waypoints;
        waypoints.push(goal);
        Path::new(waypoints)
    };

    let mut trace: CostTrace<T> = Vec::new();
    let mut best_cost = best_of(&tree, &goal_nodes).map(|(_, c)| c);
    if let Some(c) = best_cost {
        trace.push((0, c));
    }
    let mut reached_target: Option<Path<T>> = None;
    let mut iterations = 0;

    while iterations < config.max_iters && reached_target.is_none() {
        iterations += 1;
        let sample = if rng.gen::<f64>() < config.goal_bias {
            goal
        } else {
            Point2::new(
                T::lit(rng.gen::<f64>()) * scene.width,
                T::lit(rng.gen::<f64>()) * scene.height,
            )
        };
        let nearest = tree.nearest(&sample);
        let from = tree.node(nearest).position;
        let d = from.distance(&sample);
        if d <= tol {
            continue;
        }
        let new = if d > config.step { from.lerp(&sample, config.step / d) } else { sample };
        if checker.collides(&from, &new) {
            continue;
        }
        let radius = neighbor_radius(config, scene, tree.len());
        let mut candidates = tree.within(&new, radius);
        if !candidates.contains(&nearest) {
            candidates.push(nearest);
        }
        let id = tree.choose_parent_and_rewire(new, &candidates, |a, b| checker.is_clear(a, b))?;
        if new.distance(&goal) <= config.goal_tol && checker.is_clear(&new, &goal) {
            goal_nodes.push(id);
        }

        let Some((k, cost)) = best_of(&tree, &goal_nodes) else {
            continue;
        };
        if best_cost.is_none_or(|b| cost < b - tol) {
            best_cost = Some(cost);
            trace.push((iterations, cost));
            if let Some(target) = config.target_length {
                let smoothed =
                    shortcut_smooth(&checker, &goal_path(&tree, k), &mut smooth_rng, config.smoothing_iters);
                if path_length(&smoothed) <= target {
                    reached_target = Some(smoothed);
                }
            }
        }
    }

    let (best, _) = best_of(&tree, &goal_nodes).ok_or(PlanError::NoPathWithinBudget(config.max_iters))?;
    let feasible = goal_path(&tree, best);
    let smoothed = match reached_target {
        Some(p) => p,
        None => shortcut_smooth(&checker, &feasible, &mut smooth_rng, config.smoothing_iters),
    };
    let elapsed = started.elapsed();
    Ok((
        PlanResult {
            feasible_length: path_length(&feasible),
            smoothed_length: Some(path_length(&smoothed)),
            feasible_path: feasible,
            smoothed_path: Some(smoothed),
            tree_size: tree.len(),
            tree,
            iterations,
            collision_checks: checker.calls(),
            elapsed,
            n_regions: 0,
        },
        trace,
    ))
}
