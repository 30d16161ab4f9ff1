//! Segment-versus-grid collision checks.
//!
//! A segment collides when it enters the interior of the union of obstacle
//! cells: the open interior of an obstacle cell, or the seam between two
//! adjacent obstacle cells. Running along the outer edge of an obstacle or
//! through its corner is allowed, which is what lets taut paths wrap obstacle
//! corners. [`CollisionMode::Closed`] treats closed cells as blocked instead.

use std::cell::Cell;
use std::ops::ControlFlow;

use crate::geometry::{Aabb, Point2};
use crate::scalar::Scalar;
use crate::scene::OccupancyGrid;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CollisionMode {
    /// Only the interior of the obstacle-cell union blocks.
    #[default]
    Open,
    /// Closed obstacle cells block (edges and corners included).
    Closed,
}

/// Visits every cell whose closed square meets the closed segment `[a, b]`,
/// together with the segment parameter at which the cell is first touched.
/// Cells are visited column by column, not in traversal order.
fn visit_supercover<T: Scalar>(
    grid: &OccupancyGrid<T>,
    a: &Point2<T>,
    b: &Point2<T>,
    mut f: impl FnMut(usize, usize, T) -> ControlFlow<()>,
) -> ControlFlow<()> {
    let tol = T::tolerance();
    let cs = grid.cell_size();
    let n = grid.n();
    let lo_index = |v: T| grid.index_of(v - tol);
    let hi_index = |v: T| grid.index_of(v + tol);

    let (i_lo, i_hi) = (lo_index(a.x.min(b.x)), hi_index(a.x.max(b.x)));
    let far = grid.side() + cs;
    for i in i_lo..=i_hi {
        let strip = Aabb::new(
            Point2::new(grid.line(i) - tol, -far),
            Point2::new(grid.line(i + 1) + tol, far),
        );
        let Some((t0, t1)) = strip.clip_segment(a, b) else {
            continue;
        };
        let y0 = a.y + (b.y - a.y) * t0;
        let y1 = a.y + (b.y - a.y) * t1;
        let (j_lo, j_hi) = (lo_index(y0.min(y1)), hi_index(y0.max(y1)));
        for j in j_lo..=j_hi.min(n - 1) {
            let cell = grid.cell_box(i, j).shrunk(-tol);
            if let Some((enter, _)) = cell.clip_segment(a, b) {
                f(i, j, enter)?;
            }
        }
    }
    ControlFlow::Continue(())
}

/// Every cell whose closed square the segment touches (the supercover), in
/// traversal order from `a` to `b`.
pub fn cells_traversed<T: Scalar>(
    grid: &OccupancyGrid<T>,
    a: &Point2<T>,
    b: &Point2<T>,
) -> Vec<(usize, usize)> {
    let mut hits = Vec::new();
    let _ = visit_supercover(grid, a, b, |i, j, t| {
        hits.push((t, i, j));
        ControlFlow::Continue(())
    });
    let sx = b.x >= a.x;
    let sy = b.y >= a.y;
    hits.sort_by(|l, r| {
        l.0.partial_cmp(&r.0)
            .expect("finite parameters")
            .then_with(|| if sx { l.1.cmp(&r.1) } else { r.1.cmp(&l.1) })
            .then_with(|| if sy { l.2.cmp(&r.2) } else { r.2.cmp(&l.2) })
    });
    hits.into_iter().map(|(_, i, j)| (i, j)).collect()
}

/// True iff some point of `[a, b]` lies in the interior of the union of
/// obstacle cells.
pub fn segment_collides<T: Scalar>(grid: &OccupancyGrid<T>, a: &Point2<T>, b: &Point2<T>) -> bool {
    segment_collides_with(grid, a, b, CollisionMode::Open)
}

thread_local! {
    static THREAD_CALLS: Cell<u64> = const { Cell::new(0) };
}

/// Total segment checks performed on the current thread since it started.
pub fn thread_collision_calls() -> u64 {
    THREAD_CALLS.with(Cell::get)
}

pub fn segment_collides_with<T: Scalar>(
    grid: &OccupancyGrid<T>,
    a: &Point2<T>,
    b: &Point2<T>,
    mode: CollisionMode,
) -> bool {
    THREAD_CALLS.with(|c| c.set(c.get() + 1));
    let tol = T::tolerance();
    if mode == CollisionMode::Open {
        if a.approx_eq(b) {
            return point_blocked(grid, a);
        }
        if runs_along_obstacle_seam(grid, a, b) {
            return true;
        }
    }
    visit_supercover(grid, a, b, |i, j, _| {
        if !grid.is_occupied(i, j) {
            return ControlFlow::Continue(());
        }
        let blocked = match mode {
            CollisionMode::Closed => true,
            CollisionMode::Open => grid.cell_box(i, j).shrunk(tol).clip_segment(a, b).is_some(),
        };
        if blocked {
            ControlFlow::Break(())
        } else {
            ControlFlow::Continue(())
        }
    })
    .is_break()
}

/// Whether `p` lies in the interior of the union of obstacle cells.
fn point_blocked<T: Scalar>(grid: &OccupancyGrid<T>, p: &Point2<T>) -> bool {
    let tol = T::tolerance();
    let side = grid.side();
    if p.x <= tol || p.y <= tol || p.x >= side - tol || p.y >= side - tol {
        return false;
    }
    let (i_lo, i_hi) = (grid.index_of(p.x - tol), grid.index_of(p.x + tol));
    let (j_lo, j_hi) = (grid.index_of(p.y - tol), grid.index_of(p.y + tol));
    (j_lo..=j_hi).all(|j| (i_lo..=i_hi).all(|i| grid.is_occupied(i, j)))
}

/// Whether an axis-parallel segment lying on an interior grid line runs, for
/// positive length, between two obstacle cells.
fn runs_along_obstacle_seam<T: Scalar>(grid: &OccupancyGrid<T>, a: &Point2<T>, b: &Point2<T>) -> bool {
    let tol = T::tolerance();
    let cs = grid.cell_size();
    let n = grid.n();
    // (fixed coordinate, span start, span end, seam is vertical)
    let (fixed, lo, hi, vertical) = if (a.x - b.x).abs() <= tol {
        (a.x, a.y.min(b.y), a.y.max(b.y), true)
    } else if (a.y - b.y).abs() <= tol {
        (a.y, a.x.min(b.x), a.x.max(b.x), false)
    } else {
        return false;
    };
    let k = (fixed / cs).round();
    if (fixed - k * cs).abs() > tol || k < T::one() || k >= T::from_usize_lossy(n) {
        return false;
    }
    let k = k.to_usize().expect("grid line index");
    for m in grid.index_of(lo)..=grid.index_of(hi) {
        let overlap = hi.min(grid.line(m + 1)) - lo.max(grid.line(m));
        if overlap <= tol {
            continue;
        }
        let both = if vertical {
            grid.is_occupied(k - 1, m) && grid.is_occupied(k, m)
        } else {
            grid.is_occupied(m, k - 1) && grid.is_occupied(m, k)
        };
        if both {
            return true;
        }
    }
    false
}

/// Collision oracle bound to one grid, counting how often it is queried.
#[derive(Debug)]
pub struct CollisionChecker<'g, T> {
    grid: &'g OccupancyGrid<T>,
    mode: CollisionMode,
    calls: Cell<u64>,
}

impl<'g, T: Scalar> CollisionChecker<'g, T> {
    pub fn new(grid: &'g OccupancyGrid<T>, mode: CollisionMode) -> Self {
        Self { grid, mode, calls: Cell::new(0) }
    }

    pub fn grid(&self) -> &'g OccupancyGrid<T> {
        self.grid
    }

    pub fn mode(&self) -> CollisionMode {
        self.mode
    }

    pub fn collides(&self, a: &Point2<T>, b: &Point2<T>) -> bool {
        self.calls.set(self.calls.get() + 1);
        segment_collides_with(self.grid, a, b, self.mode)
    }

    pub fn is_clear(&self, a: &Point2<T>, b: &Point2<T>) -> bool {
        !self.collides(a, b)
    }

    /// Number of queries so far.
    pub fn calls(&self) -> u64 {
        self.calls.get()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    /// 4x4 grid of 1 m cells with obstacle cell (1, 1).
    fn grid() -> OccupancyGrid<f64> {
        OccupancyGrid::from_fn(4, 1.0, |i, j| (i, j) == (1, 1))
    }

    #[test]
    fn inside_free_rectangle_is_clear() {
        assert!(!segment_collides(&grid(), &p(2.1, 0.2), &p(3.9, 3.8)));
    }

    #[test]
    fn through_obstacle_middle_collides() {
        assert!(segment_collides(&grid(), &p(0.5, 1.5), &p(2.5, 1.5)));
    }

    #[test]
    fn grazing_an_obstacle_edge_is_allowed() {
        let g = grid();
        let (a, b) = (p(0.0, 1.0), p(4.0, 1.0));
        assert!(!segment_collides(&g, &a, &b));
        // brute force: no sample along the segment is in an open obstacle cell
        for k in 0..=100_000 {
            let q = a.lerp(&b, k as f64 / 100_000.0);
            assert!(!(q.x > 1.0 && q.x < 2.0 && q.y > 1.0 && q.y < 2.0));
        }
        assert!(segment_collides_with(&g, &a, &b, CollisionMode::Closed));
    }

    #[test]
    fn through_obstacle_corner_is_allowed() {
        assert!(!segment_collides(&grid(), &p(0.0, 2.0), &p(2.0, 0.0)));
        assert!(segment_collides_with(&grid(), &p(0.0, 2.0), &p(2.0, 0.0), CollisionMode::Closed));
        // the cell's diagonal cuts straight through it
        assert!(segment_collides(&grid(), &p(0.0, 3.0), &p(3.0, 0.0)));
    }

    #[test]
    fn seam_between_obstacle_cells_collides() {
        let g = OccupancyGrid::from_fn(4, 1.0, |i, j| i == 1 && j < 3);
        // along the seam between (1, 0) and (1, 1)
        assert!(segment_collides(&g, &p(0.5, 1.0), &p(3.5, 1.0)));
        assert!(segment_collides(&g, &p(1.2, 2.0), &p(1.8, 2.0)));
        assert!(segment_collides(&g, &p(1.5, 1.0), &p(1.5, 1.0)));
        // along the top edge of the column, outside it
        assert!(!segment_collides(&g, &p(0.5, 3.0), &p(3.5, 3.0)));
        // along the side of the column
        assert!(!segment_collides(&g, &p(1.0, 0.2), &p(1.0, 2.9)));
    }

    #[test]
    fn degenerate_segment() {
        let g = grid();
        assert!(segment_collides(&g, &p(1.5, 1.5), &p(1.5, 1.5)));
        assert!(!segment_collides(&g, &p(1.0, 1.5), &p(1.0, 1.5)));
    }

    #[test]
    fn horizontal_segment_spans_three_cells_in_order() {
        let g = grid();
        assert_eq!(cells_traversed(&g, &p(0.5, 2.5), &p(2.5, 2.5)), vec![(0, 2), (1, 2), (2, 2)]);
        assert_eq!(cells_traversed(&g, &p(2.5, 2.5), &p(0.5, 2.5)), vec![(2, 2), (1, 2), (0, 2)]);
    }

    #[test]
    fn corner_pass_includes_all_four_cells() {
        let cells = cells_traversed(&grid(), &p(0.5, 0.5), &p(1.5, 1.5));
        assert_eq!(cells.len(), 4);
        assert_eq!(cells[0], (0, 0));
        assert_eq!(cells[3], (1, 1));
        assert!(cells.contains(&(1, 0)) && cells.contains(&(0, 1)));
    }

    #[test]
    fn workspace_edge_endpoints_stay_in_grid() {
        let cells = cells_traversed(&grid(), &p(4.0, 4.0), &p(3.5, 4.0));
        assert_eq!(cells, vec![(3, 3)]);
    }

    #[test]
    fn checker_counts_calls() {
        let g = grid();
        let checker = CollisionChecker::new(&g, CollisionMode::Open);
        assert!(checker.is_clear(&p(0.1, 0.1), &p(0.2, 0.2)));
        assert!(checker.collides(&p(1.5, 0.1), &p(1.5, 3.9)));
        assert_eq!(checker.calls(), 2);
    }
}
