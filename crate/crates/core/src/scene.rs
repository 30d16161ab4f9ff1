//! Continuous planning scene, its JSON file format, and rasterization into an
//! occupancy grid.
//!
//! Obstacles are closed point sets. A grid cell is an obstacle cell when its
//! open interior meets an obstacle, so an obstacle whose edge lies exactly on
//! a cell boundary does not spill into the neighbouring cell.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::SceneError;
use crate::geometry::{point_in_polygon, point_segment_distance, segments_intersect, Aabb, Point2};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub enum Obstacle<T> {
    Rect { min: Point2<T>, max: Point2<T> },
    Circle { center: Point2<T>, radius: T },
    Polygon { vertices: Vec<Point2<T>> },
}

impl<T: Scalar> Obstacle<T> {
    pub fn validate(&self) -> Result<(), SceneError> {
        match self {
            Obstacle::Rect { min, max } => {
                if !(min.is_finite() && max.is_finite()) {
                    return Err(SceneError::Invalid("rectangle has non-finite corner".into()));
                }
                if !(min.x < max.x && min.y < max.y) {
                    return Err(SceneError::Invalid(format!(
                        "rectangle min ({}, {}) must be below max ({}, {}) componentwise",
                        min.x, min.y, max.x, max.y
                    )));
                }
            }
            Obstacle::Circle { center, radius } => {
                if !center.is_finite() || !radius.is_finite() || *radius <= T::zero() {
                    return Err(SceneError::Invalid(format!(
                        "circle radius must be positive and finite, got {radius}"
                    )));
                }
            }
            Obstacle::Polygon { vertices } => validate_polygon(vertices)?,
        }
        Ok(())
    }

    /// Closed-set membership.
    pub fn contains(&self, p: &Point2<T>) -> bool {
        let tol = T::tolerance();
        match self {
            Obstacle::Rect { min, max } => Aabb::new(*min, *max).contains(p, tol),
            Obstacle::Circle { center, radius } => center.distance(p) <= *radius + tol,
            Obstacle::Polygon { vertices } => {
                point_in_polygon(p, vertices)
                    || polygon_edges(vertices).any(|(a, b)| point_segment_distance(p, a, b) <= tol)
            }
        }
    }

    /// Whether the obstacle meets the open interior of `cell`.
    pub fn meets_open_box(&self, cell: &Aabb<T>) -> bool {
        let tol = T::tolerance();
        match self {
            Obstacle::Rect { min, max } => {
                min.x < cell.max.x - tol
                    && max.x > cell.min.x + tol
                    && min.y < cell.max.y - tol
                    && max.y > cell.min.y + tol
            }
            Obstacle::Circle { center, radius } => {
                let r = *radius - tol;
                r > T::zero() && cell.distance_sq(center) < r * r
            }
            Obstacle::Polygon { vertices } => {
                // The polygon is the closure of its interior, so it meets the
                // open box iff an edge enters the box or the box sits inside.
                let inner = cell.shrunk(tol);
                polygon_edges(vertices).any(|(a, b)| inner.clip_segment(a, b).is_some())
                    || point_in_polygon(&cell.center(), vertices)
            }
        }
    }

    pub fn bounding_box(&self) -> Aabb<T> {
        match self {
            Obstacle::Rect { min, max } => Aabb::new(*min, *max),
            Obstacle::Circle { center, radius } => Aabb::new(
                Point2::new(center.x - *radius, center.y - *radius),
                Point2::new(center.x + *radius, center.y + *radius),
            ),
            Obstacle::Polygon { vertices } => {
                let mut lo = vertices[0];
                let mut hi = vertices[0];
                for v in vertices {
                    lo = Point2::new(lo.x.min(v.x), lo.y.min(v.y));
                    hi = Point2::new(hi.x.max(v.x), hi.y.max(v.y));
                }
                Aabb::new(lo, hi)
            }
        }
    }

    pub fn cast<U: Scalar>(&self) -> Obstacle<U> {
        match self {
            Obstacle::Rect { min, max } => Obstacle::Rect { min: min.cast(), max: max.cast() },
            Obstacle::Circle { center, radius } => Obstacle::Circle {
                center: center.cast(),
                radius: U::lit(radius.as_f64()),
            },
            Obstacle::Polygon { vertices } => Obstacle::Polygon {
                vertices: vertices.iter().map(Point2::cast).collect(),
            },
        }
    }
}

fn polygon_edges<T>(vertices: &[Point2<T>]) -> impl Iterator<Item = (&Point2<T>, &Point2<T>)> {
    let n = vertices.len();
    (0..n).map(move |i| (&vertices[i], &vertices[(i + 1) % n]))
}

fn validate_polygon<T: Scalar>(vertices: &[Point2<T>]) -> Result<(), SceneError> {
    let n = vertices.len();
    if n < 3 {
        return Err(SceneError::Invalid(format!(
            "polygon needs at least 3 vertices, got {n}"
        )));
    }
    if vertices.iter().any(|v| !v.is_finite()) {
        return Err(SceneError::Invalid("polygon has a non-finite vertex".into()));
    }
    let tol = T::tolerance();
    let twice_area: T = polygon_edges(vertices)
        .map(|(a, b)| a.x * b.y - b.x * a.y)
        .sum();
    if twice_area.abs() <= tol {
        return Err(SceneError::Invalid("polygon has zero area".into()));
    }
    let edges: Vec<_> = polygon_edges(vertices).collect();
    for (i, (a, b)) in edges.iter().enumerate() {
        if a.distance(b) <= tol {
            return Err(SceneError::Invalid(format!("polygon edge {i} has zero length")));
        }
        for (j, (c, d)) in edges.iter().enumerate().skip(i + 2) {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return Err(SceneError::Invalid(format!(
                    "polygon is self-intersecting (edges {i} and {j})"
                )));
            }
        }
    }
    Ok(())
}

/// Planning scene over the workspace `[0, width] x [0, height]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Scene<T> {
    pub width: T,
    pub height: T,
    pub obstacles: Vec<Obstacle<T>>,
    pub start: Point2<T>,
    pub goal: Point2<T>,
}

impl<T: Scalar> Scene<T> {
    /// Builds a scene and checks every invariant.
    pub fn new(
        width: T,
        height: T,
        obstacles: Vec<Obstacle<T>>,
        start: Point2<T>,
        goal: Point2<T>,
    ) -> Result<Self, SceneError> {
        let scene = Self { width, height, obstacles, start, goal };
        scene.validate()?;
        Ok(scene)
    }

    pub fn validate(&self) -> Result<(), SceneError> {
        if !(self.width.is_finite() && self.height.is_finite())
            || self.width <= T::zero()
            || self.height <= T::zero()
        {
            return Err(SceneError::Invalid(format!(
                "workspace must have positive size, got {} x {}",
                self.width, self.height
            )));
        }
        if (self.width - self.height).abs() > T::tolerance() {
            return Err(SceneError::Invalid(format!(
                "workspace must be square, got {} x {}",
                self.width, self.height
            )));
        }
        for (k, obstacle) in self.obstacles.iter().enumerate() {
            obstacle
                .validate()
                .map_err(|e| SceneError::Invalid(format!("obstacle {k}: {e}")))?;
        }
        for (name, p) in [("start", &self.start), ("goal", &self.goal)] {
            if !p.is_finite() || !self.in_workspace(p) {
                return Err(SceneError::Invalid(format!(
                    "{name} ({}, {}) lies outside the workspace",
                    p.x, p.y
                )));
            }
            if let Some(k) = self.obstacles.iter().position(|o| o.contains(p)) {
                return Err(SceneError::Invalid(format!(
                    "{name} ({}, {}) lies inside obstacle {k}",
                    p.x, p.y
                )));
            }
        }
        Ok(())
    }

    pub fn workspace(&self) -> Aabb<T> {
        Aabb::new(Point2::new(T::zero(), T::zero()), Point2::new(self.width, self.height))
    }

    pub fn in_workspace(&self, p: &Point2<T>) -> bool {
        self.workspace().contains(p, T::tolerance())
    }

    pub fn from_json_str(text: &str) -> Result<Self, SceneError> {
        let raw: SceneFile = serde_json::from_str(text)?;
        raw.into_scene()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&SceneFile::from_scene(self)).expect("scene serializes")
    }

    pub fn cast<U: Scalar>(&self) -> Scene<U> {
        Scene {
            width: U::lit(self.width.as_f64()),
            height: U::lit(self.height.as_f64()),
            obstacles: self.obstacles.iter().map(Obstacle::cast).collect(),
            start: self.start.cast(),
            goal: self.goal.cast(),
        }
    }
}

/// Reads and validates a scene file.
pub fn load_scene<T: Scalar>(path: impl AsRef<Path>) -> Result<Scene<T>, SceneError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| SceneError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Scene::from_json_str(&text)
}

/// True iff `p` lies in the workspace and outside every (closed) obstacle.
pub fn point_is_free<T: Scalar>(scene: &Scene<T>, p: &Point2<T>) -> bool {
    scene.in_workspace(p) && !scene.obstacles.iter().any(|o| o.contains(p))
}

/// Uniform `n x n` classification of the workspace into free and obstacle
/// cells. Cell `(i, j)` covers `[i s, (i+1) s] x [j s, (j+1) s]`.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyGrid<T> {
    n: usize,
    cell_size: T,
    occupancy: Vec<bool>,
}

impl<T: Scalar> OccupancyGrid<T> {
    /// `occupancy` is indexed `j * n + i`; `true` marks an obstacle cell.
    pub fn new(n: usize, cell_size: T, occupancy: Vec<bool>) -> Self {
        assert!(n >= 1, "grid needs at least one cell per side");
        assert!(cell_size > T::zero(), "cell size must be positive");
        assert_eq!(occupancy.len(), n * n, "occupancy must hold n*n cells");
        Self { n, cell_size, occupancy }
    }

    pub fn from_fn(n: usize, cell_size: T, mut occupied: impl FnMut(usize, usize) -> bool) -> Self {
        let mut occupancy = Vec::with_capacity(n * n);
        for j in 0..n {
            for i in 0..n {
                occupancy.push(occupied(i, j));
            }
        }
        Self::new(n, cell_size, occupancy)
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn cell_size(&self) -> T {
        self.cell_size
    }

    pub fn side(&self) -> T {
        self.cell_size * T::from_usize_lossy(self.n)
    }

    #[inline]
    pub fn is_occupied(&self, i: usize, j: usize) -> bool {
        self.occupancy[j * self.n + i]
    }

    #[inline]
    pub fn is_free(&self, i: usize, j: usize) -> bool {
        !self.is_occupied(i, j)
    }

    pub fn free_count(&self) -> usize {
        self.occupancy.iter().filter(|o| !**o).count()
    }

    pub fn cell_box(&self, i: usize, j: usize) -> Aabb<T> {
        let s = self.cell_size;
        let x0 = T::from_usize_lossy(i) * s;
        let y0 = T::from_usize_lossy(j) * s;
        Aabb::new(Point2::new(x0, y0), Point2::new(x0 + s, y0 + s))
    }

    /// Coordinate of grid line `k`.
    #[inline]
    pub fn line(&self, k: usize) -> T {
        T::from_usize_lossy(k) * self.cell_size
    }

    /// Index of the cell column/row containing coordinate `v`, clamped to the grid.
    pub fn index_of(&self, v: T) -> usize {
        let k = (v / self.cell_size).floor();
        if k <= T::zero() {
            0
        } else {
            k.to_usize().unwrap_or(usize::MAX).min(self.n - 1)
        }
    }

    /// Cell containing `p`; points on shared edges go to the higher index.
    pub fn cell_of(&self, p: &Point2<T>) -> (usize, usize) {
        (self.index_of(p.x), self.index_of(p.y))
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |j| (0..self.n).map(move |i| (i, j)))
    }
}

/// Classifies every cell as obstacle when an obstacle meets its open interior.
pub fn rasterize<T: Scalar>(scene: &Scene<T>, cell_size: T) -> Result<OccupancyGrid<T>, SceneError> {
    let ratio = scene.width / cell_size;
    let n_real = ratio.round();
    if !(cell_size > T::zero())
        || !ratio.is_finite()
        || n_real < T::one()
        || (ratio - n_real).abs() > T::tolerance()
    {
        return Err(SceneError::NonIntegralGrid {
            side: scene.width.as_f64(),
            cell_size: cell_size.as_f64(),
        });
    }
    let n = n_real.to_usize().expect("positive cell count");
    let mut occupancy = vec![false; n * n];
    let probe = OccupancyGrid::new(n, cell_size, vec![false; n * n]);
    for obstacle in &scene.obstacles {
        let bb = obstacle.bounding_box();
        let (i0, j0) = probe.cell_of(&bb.min);
        let (i1, j1) = probe.cell_of(&bb.max);
        for j in j0.saturating_sub(1)..=(j1 + 1).min(n - 1) {
            for i in i0.saturating_sub(1)..=(i1 + 1).min(n - 1) {
                let idx = j * n + i;
                if !occupancy[idx] && obstacle.meets_open_box(&probe.cell_box(i, j)) {
                    occupancy[idx] = true;
                }
            }
        }
    }
    Ok(OccupancyGrid::new(n, cell_size, occupancy))
}

// On-disk representation. Coordinates are `[x, y]` arrays in meters.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    width: f64,
    height: f64,
    start: [f64; 2],
    goal: [f64; 2],
    obstacles: Vec<ObstacleFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
enum ObstacleFile {
    Rect { min: [f64; 2], max: [f64; 2] },
    Circle { center: [f64; 2], radius: f64 },
    Polygon { vertices: Vec<[f64; 2]> },
}

fn pt<T: Scalar>(v: [f64; 2]) -> Point2<T> {
    Point2::new(T::lit(v[0]), T::lit(v[1]))
}

fn arr<T: Scalar>(p: &Point2<T>) -> [f64; 2] {
    [p.x.as_f64(), p.y.as_f64()]
}

impl SceneFile {
    fn into_scene<T: Scalar>(self) -> Result<Scene<T>, SceneError> {
        let obstacles = self
            .obstacles
            .into_iter()
            .map(|o| match o {
                ObstacleFile::Rect { min, max } => Obstacle::Rect { min: pt(min), max: pt(max) },
                ObstacleFile::Circle { center, radius } => Obstacle::Circle {
                    center: pt(center),
                    radius: T::lit(radius),
                },
                ObstacleFile::Polygon { vertices } => Obstacle::Polygon {
                    vertices: vertices.into_iter().map(pt).collect(),
                },
            })
            .collect();
        Scene::new(
            T::lit(self.width),
            T::lit(self.height),
            obstacles,
            pt(self.start),
            pt(self.goal),
        )
    }

    fn from_scene<T: Scalar>(scene: &Scene<T>) -> Self {
        Self {
            width: scene.width.as_f64(),
            height: scene.height.as_f64(),
            start: arr(&scene.start),
            goal: arr(&scene.goal),
            obstacles: scene
                .obstacles
                .iter()
                .map(|o| match o {
                    Obstacle::Rect { min, max } => ObstacleFile::Rect { min: arr(min), max: arr(max) },
                    Obstacle::Circle { center, radius } => ObstacleFile::Circle {
                        center: arr(center),
                        radius: radius.as_f64(),
                    },
                    Obstacle::Polygon { vertices } => ObstacleFile::Polygon {
                        vertices: vertices.iter().map(arr).collect(),
                    },
                })
                .collect(),
        }
    }
}
