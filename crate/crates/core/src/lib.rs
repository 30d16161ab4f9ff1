//! Non-uniform sampling for RRT* on occupancy grids.
//!
//! The workspace is rasterized into square cells, free cells are merged into
//! rectangular groups, and the shared edges between neighbouring groups become
//! the critical regions. The planner samples only region midpoints while
//! exploring (no collision checks: every edge stays inside one convex group),
//! then shortens the first feasible path through region endpoints. A uniform
//! RRT* baseline and a benchmark CLI are included for comparison.
//!
//! Everything is generic over [`Scalar`] (`f32` or `f64`); the aliases at the
//! crate root fix the scalar to `f64`, with `*F32` variants for single
//! precision.

pub mod cli;
pub mod collision;
pub mod error;
pub mod geometry;
pub mod nonuniform_planner;
pub mod partition;
pub mod planner_core;
pub mod report;
pub mod scalar;
pub mod scene;
pub mod svg;
pub mod uniform_baseline;

pub use collision::{cells_traversed, segment_collides, segment_collides_with, CollisionChecker, CollisionMode};
pub use error::{PlanError, SceneError};
pub use nonuniform_planner::{
    explore, exploit, nearby_regions, nearby_vertices, plan, prepare, sample_step, Exploration, NodeSite,
    NonUniformConfig,
};
pub use partition::{extract_regions, merge_cells, region_center, region_endpoints, CellGroup};
pub use planner_core::{path_length, TreeNode};
pub use report::{read_csv, summarize, write_csv, MetricsRow, Summary, CSV_HEADER};
pub use scalar::Scalar;
pub use scene::{load_scene, point_is_free, rasterize};
pub use svg::render_svg;
pub use uniform_baseline::{plan_uniform, shortcut_smooth, UniformConfig};

pub type Point2 = geometry::Point2<f64>;
pub type Obstacle = scene::Obstacle<f64>;
pub type Scene = scene::Scene<f64>;
pub type OccupancyGrid = scene::OccupancyGrid<f64>;
pub type Partition = partition::Partition<f64>;
pub type CriticalRegion = partition::CriticalRegion<f64>;
pub type RegionGraph = partition::RegionGraph<f64>;
pub type SearchTree = planner_core::SearchTree<f64>;
pub type Path = planner_core::Path<f64>;
pub type PlanResult = planner_core::PlanResult<f64>;
pub type ExplorationState = nonuniform_planner::ExplorationState<f64>;

pub type Point2F32 = geometry::Point2<f32>;
pub type SceneF32 = scene::Scene<f32>;
pub type OccupancyGridF32 = scene::OccupancyGrid<f32>;
pub type PartitionF32 = partition::Partition<f32>;
pub type RegionGraphF32 = partition::RegionGraph<f32>;
pub type PlanResultF32 = planner_core::PlanResult<f32>;
