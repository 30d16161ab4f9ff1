use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("cannot read scene file {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed scene file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scene: {0}")]
    Invalid(String),
    #[error("cell size {cell_size} does not divide workspace side {side} into an integral number of cells")]
    NonIntegralGrid { side: f64, cell_size: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("no candidate parent has a feasible edge to the new node")]
    NoFeasibleParent,
    #[error("no nearby regions left to sample")]
    ExplorationExhausted,
    #[error("point ({x}, {y}) lies on no critical region and in no cell group interior")]
    InvalidPosition { x: f64, y: f64 },
    #[error("no path: {0}")]
    NoPath(String),
    #[error("cannot build the planning grid: {0}")]
    Setup(String),
    #[error("no path found within {0} iterations")]
    NoPathWithinBudget(usize),
}
