//! RRT* restricted to critical regions.
//!
//! Exploration places at most one sample per region, at its midpoint, and only
//! on regions adjoining a group the tree already touches. Every edge it creates
//! joins two points in the closure of one rectangular group, so no collision
//! check is needed. Exploitation then searches a layered graph over the
//! endpoints of the regions crossed by the feasible path.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::collision::{CollisionChecker, CollisionMode};
use crate::error::PlanError;
use crate::geometry::Point2;
use crate::partition::{
    extract_regions, merge_cells, region_center, region_endpoints, Partition, RegionGraph,
};
use crate::planner_core::{path_length, Path, PlanResult, SearchTree};
use crate::scalar::Scalar;
use crate::scene::{rasterize, OccupancyGrid, Scene};
use crate::uniform_baseline::{shortcut_smooth, DEFAULT_SMOOTHING_ITERS, SMOOTHING_STREAM};

/// Where a tree node sits relative to the partition.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeSite {
    /// Sampled on a critical region.
    Region(usize),
    /// Start or goal, inside (the closure of) a group.
    Group(usize),
}

#[derive(Clone, Debug)]
pub struct ExplorationState<T> {
    pub tree: SearchTree<T>,
    pub explored_regions: BTreeSet<usize>,
    /// Indexed by node id.
    pub node_site: Vec<NodeSite>,
    pub rng_seed: u64,
    rng: ChaCha8Rng,
}

impl<T: Scalar> ExplorationState<T> {
    /// Tree holding only `start`, which lies in group `start_group`.
    pub fn new(start: Point2<T>, start_group: usize, seed: u64) -> Self {
        Self {
            tree: SearchTree::new(start),
            explored_regions: BTreeSet::new(),
            node_site: vec![NodeSite::Group(start_group)],
            rng_seed: seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn node_region(&self, id: usize) -> Option<usize> {
        match self.node_site[id] {
            NodeSite::Region(r) => Some(r),
            NodeSite::Group(_) => None,
        }
    }

    /// Adds a node without rewiring. Meant for building states by hand.
    pub fn attach(&mut self, parent: usize, position: Point2<T>, site: NodeSite) -> usize {
        let id = self.tree.attach(parent, position);
        self.node_site.push(site);
        if let NodeSite::Region(r) = site {
            self.explored_regions.insert(r);
        }
        id
    }
}

/// Groups a node's site touches.
fn site_groups<T: Scalar>(graph: &RegionGraph<T>, site: NodeSite) -> [Option<usize>; 2] {
    match site {
        NodeSite::Region(r) => [Some(graph.regions[r].group_a), Some(graph.regions[r].group_b)],
        NodeSite::Group(g) => [Some(g), None],
    }
}

/// Unexplored regions incident to a group that some tree node touches.
pub fn nearby_regions<T: Scalar>(state: &ExplorationState<T>, graph: &RegionGraph<T>) -> BTreeSet<usize> {
    let mut touched = BTreeSet::new();
    for &site in &state.node_site {
        touched.extend(site_groups(graph, site).into_iter().flatten());
    }
    touched
        .into_iter()
        .flat_map(|g| graph.regions_of_group[g].iter().copied())
        .filter(|r| !state.explored_regions.contains(r))
        .collect()
}

/// Nodes that share a group with a point at `site`: nodes on regions incident
/// to the site's groups (other than the site's own region) and start/goal
/// nodes inside those groups.
pub fn vertices_near_site<T: Scalar>(
    state: &ExplorationState<T>,
    graph: &RegionGraph<T>,
    site: NodeSite,
) -> Vec<usize> {
    let groups = site_groups(graph, site);
    let in_groups = |g: usize| groups.contains(&Some(g));
    state
        .node_site
        .iter()
        .enumerate()
        .filter(|(_, &s)| match s {
            NodeSite::Region(r) => {
                let region = &graph.regions[r];
                site != NodeSite::Region(r) && (in_groups(region.group_a) || in_groups(region.group_b))
            }
            NodeSite::Group(g) => in_groups(g),
        })
        .map(|(id, _)| id)
        .collect()
}

/// Locates `p` on a region (lowest id) or else inside a group, and returns the
/// nodes that may connect to it.
pub fn nearby_vertices<T: Scalar>(
    state: &ExplorationState<T>,
    partition: &Partition<T>,
    graph: &RegionGraph<T>,
    p: &Point2<T>,
) -> Result<Vec<usize>, PlanError> {
    let site = if let Some(r) = graph.region_at(p) {
        NodeSite::Region(r)
    } else if let Some(g) = partition.group_containing(p) {
        NodeSite::Group(g)
    } else {
        return Err(PlanError::InvalidPosition { x: p.x.as_f64(), y: p.y.as_f64() });
    };
    Ok(vertices_near_site(state, graph, site))
}

/// Uniform draw from a sorted, non-empty candidate list.
pub fn pick_region(rng: &mut impl Rng, nearby: &[usize]) -> usize {
    nearby[rng.gen_range(0..nearby.len())]
}

/// Samples one nearby region at its center and inserts the new node.
pub fn sample_step<T: Scalar>(
    state: &mut ExplorationState<T>,
    graph: &RegionGraph<T>,
) -> Result<usize, PlanError> {
    let nearby: Vec<usize> = nearby_regions(state, graph).into_iter().collect();
    if nearby.is_empty() {
        return Err(PlanError::ExplorationExhausted);
    }
    let r = pick_region(&mut state.rng, &nearby);
    let p = region_center(&graph.regions[r]);
    let site = NodeSite::Region(r);
    let candidates = vertices_near_site(state, graph, site);
    let id = state.tree.choose_parent_and_rewire(p, &candidates, |_, _| true)?;
    state.node_site.push(site);
    state.explored_regions.insert(r);
    Ok(id)
}

#[derive(Clone, Debug)]
pub struct Exploration<T> {
    pub state: ExplorationState<T>,
    pub goal_node: usize,
    pub path: Path<T>,
    /// Region of each waypoint of `path`; `None` for start and goal.
    pub path_regions: Vec<Option<usize>>,
    pub samples: usize,
}

/// Grows the region-restricted tree until the goal's group is reached.
pub fn explore<T: Scalar>(
    scene: &Scene<T>,
    partition: &Partition<T>,
    graph: &RegionGraph<T>,
    seed: u64,
) -> Result<Exploration<T>, PlanError> {
    let locate = |name: &str, p: &Point2<T>| {
        partition.group_containing(p).ok_or_else(|| {
            PlanError::NoPath(format!(
                "{name} ({}, {}) falls in an obstacle cell at cell size {}; try a smaller cell size",
                p.x,
                p.y,
                partition.grid.cell_size()
            ))
        })
    };
    let start_group = locate("start", &scene.start)?;
    let goal_group = locate("goal", &scene.goal)?;

    let mut state = ExplorationState::new(scene.start, start_group, seed);
    let mut samples = 0;
    if start_group != goal_group {
        loop {
            let id = match sample_step(&mut state, graph) {
                Ok(id) => id,
                Err(PlanError::ExplorationExhausted) => {
                    return Err(PlanError::NoPath(
                        "free space between start and goal is disconnected at this grid resolution"
                            .into(),
                    ))
                }
                Err(e) => return Err(e),
            };
            samples += 1;
            let region = state.node_region(id).expect("sampled node lies on a region");
            if graph.regions[region].touches_group(goal_group) {
                break;
            }
        }
    }
    let site = NodeSite::Group(goal_group);
    let candidates = vertices_near_site(&state, graph, site);
    let goal_node = state.tree.choose_parent_and_rewire(scene.goal, &candidates, |_, _| true)?;
    state.node_site.push(site);

    let lineage = state.tree.lineage(goal_node);
    let path = Path::new(lineage.iter().map(|&k| state.tree.node(k).position).collect());
    let mut path_regions: Vec<Option<usize>> = lineage.iter().map(|&k| state.node_region(k)).collect();
    if path.waypoints.len() < lineage.len() {
        // start == goal collapsed
        path_regions.truncate(path.waypoints.len());
    }
    Ok(Exploration { state, goal_node, path, path_regions, samples })
}

/// Points of the exploitation graph with their layer index.
pub fn exploitation_layers<T: Scalar>(
    graph: &RegionGraph<T>,
    feasible: &Path<T>,
    path_regions: &[Option<usize>],
) -> Vec<(usize, Point2<T>)> {
    let last = feasible.waypoints.len() - 1;
    let mut points = Vec::new();
    for (k, (w, region)) in feasible.waypoints.iter().zip(path_regions).enumerate() {
        match region {
            Some(r) if k != 0 && k != last => {
                let (a, b) = region_endpoints(&graph.regions[*r]);
                points.push((k, a));
                points.push((k, b));
            }
            _ => points.push((k, *w)),
        }
    }
    points
}

#[derive(Clone, Copy, PartialEq)]
struct Frontier<T> {
    cost: T,
    node: usize,
}

impl<T: Scalar> Eq for Frontier<T> {}

impl<T: Scalar> Ord for Frontier<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .cost
            .partial_cmp(&self.cost)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.node.cmp(&self.node))
    }
}

impl<T: Scalar> PartialOrd for Frontier<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Uniform-cost search over the layered endpoint graph; edges run from every
/// point to every point of a later layer whose segment is collision free.
pub fn shortest_layered_path<T: Scalar>(
    points: &[(usize, Point2<T>)],
    checker: &CollisionChecker<'_, T>,
) -> Option<Path<T>> {
    let n = points.len();
    let target = n - 1;
    let mut dist = vec![T::infinity(); n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[0] = T::zero();
    heap.push(Frontier { cost: T::zero(), node: 0 });
    while let Some(Frontier { cost, node }) = heap.pop() {
        if done[node] {
            continue;
        }
        done[node] = true;
        if node == target {
            break;
        }
        let (layer, from) = points[node];
        for (v, (other_layer, to)) in points.iter().enumerate() {
            if *other_layer <= layer || done[v] {
                continue;
            }
            let via = cost + from.distance(to);
            if via < dist[v] && checker.is_clear(&from, to) {
                dist[v] = via;
                prev[v] = node;
                heap.push(Frontier { cost: via, node: v });
            }
        }
    }
    if !done[target] {
        return None;
    }
    let mut waypoints = vec![points[target].1];
    let mut cur = target;
    while cur != 0 {
        cur = prev[cur];
        waypoints.push(points[cur].1);
    }
    waypoints.reverse();
    Some(Path::new(waypoints))
}

/// Shortens the feasible path through the endpoints of the regions it
/// crosses. Returns `None` when the endpoint graph has no start-goal path.
/// The result is never longer than `feasible`.
pub fn exploit<T: Scalar>(
    graph: &RegionGraph<T>,
    feasible: &Path<T>,
    path_regions: &[Option<usize>],
    checker: &CollisionChecker<'_, T>,
) -> Option<Path<T>> {
    if feasible.waypoints.len() < 2 {
        return Some(feasible.clone());
    }
    let points = exploitation_layers(graph, feasible, path_regions);
    let best = shortest_layered_path(&points, checker)?;
    if path_length(&best) <= path_length(feasible) {
        Some(best)
    } else {
        Some(feasible.clone())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NonUniformConfig<T> {
    pub cell_size: T,
    pub seed: u64,
    pub collision: CollisionMode,
}

/// Grid, partition and region graph for a scene.
pub fn prepare<T: Scalar>(
    scene: &Scene<T>,
    cell_size: T,
) -> Result<(OccupancyGrid<T>, Partition<T>, RegionGraph<T>), PlanError> {
    let grid = rasterize(scene, cell_size).map_err(|e| PlanError::Setup(e.to_string()))?;
    let partition = merge_cells(&grid);
    let graph = extract_regions(&partition);
    Ok((grid, partition, graph))
}

/// Full pipeline: rasterize, merge, extract regions, explore, exploit, then
/// the same shortcut smoothing the uniform baseline uses.
pub fn plan<T: Scalar>(scene: &Scene<T>, config: &NonUniformConfig<T>) -> Result<PlanResult<T>, PlanError> {
    let started = Instant::now();
    let (grid, partition, graph) = prepare(scene, config.cell_size)?;
    let exploration = explore(scene, &partition, &graph, config.seed)?;
    let checker = CollisionChecker::new(&grid, config.collision);
    let mut smooth_rng = ChaCha8Rng::seed_from_u64(config.seed ^ SMOOTHING_STREAM);
    let smoothed = exploit(&graph, &exploration.path, &exploration.path_regions, &checker)
        .map(|path| shortcut_smooth(&checker, &path, &mut smooth_rng, DEFAULT_SMOOTHING_ITERS));
    let elapsed = started.elapsed();

    let feasible_length = path_length(&exploration.path);
    Ok(PlanResult {
        smoothed_length: smoothed.as_ref().map(path_length),
        smoothed_path: smoothed,
        feasible_length,
        feasible_path: exploration.path,
        tree_size: exploration.state.tree.len(),
        tree: exploration.state.tree,
        iterations: exploration.samples,
        collision_checks: checker.calls(),
        elapsed,
        n_regions: graph.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::segment_collides;
    use crate::scene::Obstacle;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    fn parts(grid: &OccupancyGrid<f64>) -> (Partition<f64>, RegionGraph<f64>) {
        let partition = merge_cells(grid);
        let graph = extract_regions(&partition);
        (partition, graph)
    }

    /// 3x3 with the center blocked: groups 0 bottom row, 1 left column,
    /// 2 right column, 3 top middle. Regions 0:(0,1) 1:(0,2) 2:(1,3) 3:(2,3).
    fn ring() -> (Partition<f64>, RegionGraph<f64>) {
        parts(&OccupancyGrid::from_fn(3, 1.0, |i, j| (i, j) == (1, 1)))
    }

    #[test]
    fn frontier_from_start_is_its_group() {
        let (_, graph) = ring();
        let state = ExplorationState::new(p(1.5, 0.5), 0, 1);
        assert_eq!(nearby_regions(&state, &graph), BTreeSet::from([0, 1]));
    }

    #[test]
    fn frontier_advances_after_sampling() {
        let (_, graph) = ring();
        let mut state = ExplorationState::new(p(1.5, 0.5), 0, 1);
        state.attach(0, region_center(&graph.regions[0]), NodeSite::Region(0));
        assert_eq!(nearby_regions(&state, &graph), BTreeSet::from([1, 2]));
    }

    #[test]
    fn nearby_vertices_on_region_and_in_group() {
        let (partition, graph) = ring();
        let mut state = ExplorationState::new(p(1.5, 0.5), 0, 1);
        let a = state.attach(0, region_center(&graph.regions[0]), NodeSite::Region(0));
        let b = state.attach(0, region_center(&graph.regions[1]), NodeSite::Region(1));
        // point on region 2 (groups 1, 3): region 0 touches group 1
        let got = nearby_vertices(&state, &partition, &graph, &region_center(&graph.regions[2])).unwrap();
        assert_eq!(got, vec![a]);
        // point on region 0 (groups 0, 1): start in group 0 and region 1 via group 0
        let got = nearby_vertices(&state, &partition, &graph, &region_center(&graph.regions[0])).unwrap();
        assert_eq!(got, vec![0, b]);
        // interior of group 3
        let got = nearby_vertices(&state, &partition, &graph, &p(1.5, 2.5)).unwrap();
        assert!(got.is_empty());
        let err = nearby_vertices(&state, &partition, &graph, &p(1.5, 1.5)).unwrap_err();
        assert!(matches!(err, PlanError::InvalidPosition { .. }));
    }

    #[test]
    fn single_nearby_region_is_always_chosen() {
        let (_, graph) = parts(&OccupancyGrid::from_fn(2, 1.0, |i, j| (i, j) == (1, 1)));
        for seed in 0..20 {
            let mut state = ExplorationState::new(p(0.5, 0.5), 0, seed);
            let id = sample_step(&mut state, &graph).unwrap();
            assert_eq!(state.node_region(id), Some(0));
            assert_eq!(state.tree.node(id).position, region_center(&graph.regions[0]));
        }
    }

    #[test]
    fn exhausted_frontier() {
        let (_, graph) = parts(&OccupancyGrid::from_fn(2, 1.0, |_, _| false));
        let mut state = ExplorationState::new(p(0.5, 0.5), 0, 0);
        assert_eq!(sample_step(&mut state, &graph), Err(PlanError::ExplorationExhausted));
    }

    #[test]
    fn region_draw_is_uniform() {
        // chi-square with 3 degrees of freedom; 11.34 is the 99% quantile
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let nearby = [3, 5, 8, 13];
        let mut counts = [0usize; 4];
        for _ in 0..10_000 {
            let r = pick_region(&mut rng, &nearby);
            counts[nearby.iter().position(|&x| x == r).unwrap()] += 1;
        }
        let expected = 2500.0;
        let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        assert!(chi2 < 11.34, "chi2 = {chi2}, counts = {counts:?}");
    }

    #[test]
    fn same_group_is_one_edge() {
        let scene = Scene::new(10.0, 10.0, vec![], p(1.0, 1.0), p(9.0, 9.0)).unwrap();
        let (_, partition, graph) = prepare(&scene, 2.0).unwrap();
        let ex = explore(&scene, &partition, &graph, 3).unwrap();
        assert_eq!(ex.path.waypoints, vec![p(1.0, 1.0), p(9.0, 9.0)]);
        assert_eq!(ex.samples, 0);
    }

    #[test]
    fn corridor_visits_every_region_center() {
        // staircase of k horizontal dominoes (m, m)-(m+1, m); each domino is
        // one group and touches only its predecessor and successor
        let k = 6;
        let n = k + 1;
        let grid = OccupancyGrid::from_fn(n, 1.0, |i, j| !(j < k && (i == j || i == j + 1)));
        let (partition, graph) = parts(&grid);
        assert_eq!(partition.len(), k);
        assert_eq!(graph.len(), k - 1);
        let goal = p(k as f64 + 0.5, k as f64 - 0.5);
        let scene = Scene::new(n as f64, n as f64, vec![], p(0.5, 0.5), goal).unwrap();
        for seed in 0..5 {
            let ex = explore(&scene, &partition, &graph, seed).unwrap();
            assert_eq!(ex.path.waypoints.len(), k + 1);
            assert_eq!(ex.state.tree.len(), k + 1);
            for (w, r) in ex.path.waypoints[1..k].iter().zip(&ex.path_regions[1..k]) {
                assert_eq!(*w, region_center(&graph.regions[r.unwrap()]));
            }
        }
    }

    #[test]
    fn taut_around_single_box() {
        // 10x10, cell 1; box cells i=4..5, j=0..5; start (1,1), goal (9,1)
        let scene = Scene::new(
            10.0,
            10.0,
            vec![Obstacle::Rect { min: p(4.0, 0.0), max: p(6.0, 6.0) }],
            p(1.0, 1.0),
            p(9.0, 1.0),
        )
        .unwrap();
        for seed in 0..10 {
            let config = NonUniformConfig { cell_size: 1.0, seed, collision: CollisionMode::Open };
            let result = plan(&scene, &config).unwrap();
            let expected = p(1.0, 1.0).distance(&p(4.0, 6.0)) + 2.0 + p(6.0, 6.0).distance(&p(9.0, 1.0));
            let got = result.smoothed_length.unwrap();
            assert!((got - expected).abs() < 1e-9, "seed {seed}: {got} vs {expected}");
            assert!(got <= result.feasible_length + 1e-12);
        }
    }

    #[test]
    fn exploration_edges_are_collision_free() {
        let grid = OccupancyGrid::from_fn(12, 1.0, |i, j| (i * 7 + j * 3) % 5 == 0);
        let (partition, graph) = parts(&grid);
        let start = partition.group_rect(0).center();
        let mut state = ExplorationState::new(start, 0, 5);
        while sample_step(&mut state, &graph).is_ok() {}
        assert_eq!(state.explored_regions.len(), state.tree.len() - 1);
        for (a, b) in state.tree.edges() {
            assert!(!segment_collides(&grid, &a, &b));
        }
    }
}
