#![allow(dead_code)]

use std::path::PathBuf;

use nusampler::{
    merge_cells, CellGroup, ExplorationState, NodeSite, OccupancyGrid, Partition, Point2,
    RegionGraph, Scene,
};
use rand::Rng;

pub const BUNDLED: [&str; 4] = ["empty", "single_box", "spiral", "narrow_corridors"];

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(format!("{name}.json"))
}

pub fn load(name: &str) -> Scene {
    nusampler::load_scene(scenario_path(name)).expect("bundled scenario loads")
}

/// Grid with each cell occupied independently with probability `density`.
pub fn random_grid(rng: &mut impl Rng, n: usize, density: f64, cell_size: f64) -> OccupancyGrid {
    OccupancyGrid::from_fn(n, cell_size, |_, _| rng.gen_bool(density))
}

pub fn random_partition(rng: &mut impl Rng) -> Partition {
    let n = rng.gen_range(15..=64);
    let density = rng.gen_range(0.0..0.6);
    let cell_size = [0.5, 1.0, 2.0][rng.gen_range(0..3)];
    merge_cells(&random_grid(rng, n, density, cell_size))
}

pub fn uniform_in(rng: &mut impl Rng, lo: Point2, hi: Point2) -> Point2 {
    Point2::new(rng.gen_range(lo.x..=hi.x), rng.gen_range(lo.y..=hi.y))
}

/// Point strictly inside group `g`, at least a tenth of a cell from its edges.
pub fn interior_point(rng: &mut impl Rng, partition: &Partition, g: &CellGroup) -> Point2 {
    let rect = g.rect(&partition.grid);
    let m = partition.grid.cell_size() * 0.1;
    uniform_in(rng, Point2::new(rect.min.x + m, rect.min.y + m), Point2::new(rect.max.x - m, rect.max.y - m))
}

/// Random tree: a start strictly inside a random group, then nodes at the
/// centers of distinct random regions under random parents.
pub fn random_state(rng: &mut impl Rng, partition: &Partition, graph: &RegionGraph) -> ExplorationState {
    let g = rng.gen_range(0..partition.len());
    let start = interior_point(rng, partition, &partition.groups[g]);
    let mut state = ExplorationState::new(start, g, rng.gen());
    let mut regions: Vec<usize> = (0..graph.len()).collect();
    let k = rng.gen_range(0..=regions.len().min(25));
    for _ in 0..k {
        let r = regions.swap_remove(rng.gen_range(0..regions.len()));
        let parent = rng.gen_range(0..state.tree.len());
        let p = nusampler::region_center(&graph.regions[r]);
        state.attach(parent, p, NodeSite::Region(r));
    }
    state
}
