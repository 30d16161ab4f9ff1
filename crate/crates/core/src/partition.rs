//! Greedy merging of free cells into rectangular groups, and the critical
//! regions (shared boundary segments) between neighbouring groups.

use std::collections::{BTreeMap, BTreeSet};

use crate::geometry::{point_segment_distance, Aabb, Point2};
use crate::scalar::Scalar;
use crate::scene::OccupancyGrid;

/// Rectangle of merged free cells, inclusive cell-index ranges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CellGroup {
    pub id: usize,
    pub i_range: (usize, usize),
    pub j_range: (usize, usize),
}

impl CellGroup {
    pub fn cell_count(&self) -> usize {
        (self.i_range.1 - self.i_range.0 + 1) * (self.j_range.1 - self.j_range.0 + 1)
    }

    pub fn contains_cell(&self, i: usize, j: usize) -> bool {
        (self.i_range.0..=self.i_range.1).contains(&i) && (self.j_range.0..=self.j_range.1).contains(&j)
    }

    /// Rectangle in meters.
    pub fn rect<T: Scalar>(&self, grid: &OccupancyGrid<T>) -> Aabb<T> {
        Aabb::new(
            Point2::new(grid.line(self.i_range.0), grid.line(self.j_range.0)),
            Point2::new(grid.line(self.i_range.1 + 1), grid.line(self.j_range.1 + 1)),
        )
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (self.j_range.0..=self.j_range.1)
            .flat_map(move |j| (self.i_range.0..=self.i_range.1).map(move |i| (i, j)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Partition<T> {
    pub grid: OccupancyGrid<T>,
    pub groups: Vec<CellGroup>,
    cell_to_group: Vec<Option<usize>>,
}

impl<T: Scalar> Partition<T> {
    pub fn group_of_cell(&self, i: usize, j: usize) -> Option<usize> {
        self.cell_to_group[j * self.grid.n() + i]
    }

    pub fn group_rect(&self, id: usize) -> Aabb<T> {
        self.groups[id].rect(&self.grid)
    }

    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    /// Lowest-id group whose closed rectangle contains `p`.
    pub fn group_containing(&self, p: &Point2<T>) -> Option<usize> {
        let tol = T::tolerance();
        let grid = &self.grid;
        let (i_lo, i_hi) = (grid.index_of(p.x - tol), grid.index_of(p.x + tol));
        let (j_lo, j_hi) = (grid.index_of(p.y - tol), grid.index_of(p.y + tol));
        let mut best: Option<usize> = None;
        for j in j_lo..=j_hi {
            for i in i_lo..=i_hi {
                if let Some(g) = self.group_of_cell(i, j) {
                    if self.group_rect(g).contains(p, tol) {
                        best = Some(best.map_or(g, |b| b.min(g)));
                    }
                }
            }
        }
        best
    }

    /// Group whose open rectangle contains `p`, if any.
    pub fn group_interior_containing(&self, p: &Point2<T>) -> Option<usize> {
        let tol = T::tolerance();
        let (i, j) = self.grid.cell_of(p);
        let g = self.group_of_cell(i, j)?;
        self.group_rect(g).shrunk(tol).contains(p, T::zero()).then_some(g)
    }
}

/// Merges free cells into rectangles.
///
/// Seeds are taken in row-major order (`j` then `i`). Each rectangle grows one
/// full strip at a time on whichever side yields the largest area, ties broken
/// `+i, -i, +j, -j`, until no side can take a strip of free unmerged cells.
pub fn merge_cells<T: Scalar>(grid: &OccupancyGrid<T>) -> Partition<T> {
    let n = grid.n();
    let mut cell_to_group: Vec<Option<usize>> = vec![None; n * n];
    let mut groups = Vec::new();

    let open = |cell_to_group: &[Option<usize>], i: usize, j: usize| {
        grid.is_free(i, j) && cell_to_group[j * n + i].is_none()
    };

    for (si, sj) in grid.cells() {
        if !open(&cell_to_group, si, sj) {
            continue;
        }
        let (mut i0, mut i1, mut j0, mut j1) = (si, si, sj, sj);
        loop {
            let w = i1 - i0 + 1;
            let h = j1 - j0 + 1;
            let column_open = |i: usize| (j0..=j1).all(|j| open(&cell_to_group, i, j));
            let row_open = |j: usize| (i0..=i1).all(|i| open(&cell_to_group, i, j));
            // (area after growth, side) in tie-break order
            let options = [
                (i1 + 1 < n && column_open(i1 + 1), (w + 1) * h, 0),
                (i0 > 0 && column_open(i0.wrapping_sub(1)), (w + 1) * h, 1),
                (j1 + 1 < n && row_open(j1 + 1), w * (h + 1), 2),
                (j0 > 0 && row_open(j0.wrapping_sub(1)), w * (h + 1), 3),
            ];
            let mut pick: Option<(usize, u8)> = None;
            for (ok, area, side) in options {
                if ok && pick.is_none_or(|(a, _)| area > a) {
                    pick = Some((area, side));
                }
            }
            match pick {
                Some((_, 0)) => i1 += 1,
                Some((_, 1)) => i0 -= 1,
                Some((_, 2)) => j1 += 1,
                Some((_, 3)) => j0 -= 1,
                _ => break,
            }
        }
        let group = CellGroup { id: groups.len(), i_range: (i0, i1), j_range: (j0, j1) };
        for (i, j) in group.cells() {
            cell_to_group[j * n + i] = Some(group.id);
        }
        groups.push(group);
    }

    Partition { grid: grid.clone(), groups, cell_to_group }
}

/// Shared boundary segment between two neighbouring groups.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CriticalRegion<T> {
    pub id: usize,
    pub group_a: usize,
    pub group_b: usize,
    pub segment: (Point2<T>, Point2<T>),
}

impl<T: Scalar> CriticalRegion<T> {
    pub fn other_group(&self, g: usize) -> Option<usize> {
        if g == self.group_a {
            Some(self.group_b)
        } else if g == self.group_b {
            Some(self.group_a)
        } else {
            None
        }
    }

    pub fn touches_group(&self, g: usize) -> bool {
        self.group_a == g || self.group_b == g
    }

    pub fn length(&self) -> T {
        self.segment.0.distance(&self.segment.1)
    }

    pub fn contains_point(&self, p: &Point2<T>) -> bool {
        point_segment_distance(p, &self.segment.0, &self.segment.1) <= T::tolerance()
    }
}

/// Midpoint of the region's segment.
pub fn region_center<T: Scalar>(region: &CriticalRegion<T>) -> Point2<T> {
    region.segment.0.midpoint(&region.segment.1)
}

/// The segment endpoints, lexicographically ordered by `(x, y)`.
pub fn region_endpoints<T: Scalar>(region: &CriticalRegion<T>) -> (Point2<T>, Point2<T>) {
    let (a, b) = region.segment;
    if (a.x, a.y) <= (b.x, b.y) {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RegionGraph<T> {
    pub regions: Vec<CriticalRegion<T>>,
    pub regions_of_group: Vec<Vec<usize>>,
    by_pair: BTreeMap<(usize, usize), usize>,
}

impl<T: Scalar> RegionGraph<T> {
    pub fn len(&self) -> usize {
        self.regions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.regions.is_empty()
    }

    /// Region between groups `m` and `n`, in either order.
    pub fn region_between(&self, m: usize, n: usize) -> Option<usize> {
        self.by_pair.get(&(m.min(n), m.max(n))).copied()
    }

    /// Lowest-id region whose segment contains `p`.
    pub fn region_at(&self, p: &Point2<T>) -> Option<usize> {
        self.regions.iter().find(|r| r.contains_point(p)).map(|r| r.id)
    }
}

/// One region per unordered pair of groups sharing a boundary of positive length.
pub fn extract_regions<T: Scalar>(partition: &Partition<T>) -> RegionGraph<T> {
    let grid = &partition.grid;
    let n = grid.n();
    let mut pairs = BTreeSet::new();
    for (i, j) in grid.cells() {
        let Some(g) = partition.group_of_cell(i, j) else {
            continue;
        };
        let right = (i + 1 < n).then(|| partition.group_of_cell(i + 1, j)).flatten();
        let up = (j + 1 < n).then(|| partition.group_of_cell(i, j + 1)).flatten();
        for h in [right, up].into_iter().flatten() {
            if h != g {
                pairs.insert((g.min(h), g.max(h)));
            }
        }
    }

    let mut regions = Vec::with_capacity(pairs.len());
    let mut regions_of_group = vec![Vec::new(); partition.len()];
    let mut by_pair = BTreeMap::new();
    for (a, b) in pairs {
        let segment = shared_boundary(grid, &partition.groups[a], &partition.groups[b])
            .expect("cell-adjacent groups share an edge");
        let id = regions.len();
        regions.push(CriticalRegion { id, group_a: a, group_b: b, segment });
        regions_of_group[a].push(id);
        regions_of_group[b].push(id);
        by_pair.insert((a, b), id);
    }
    RegionGraph { regions, regions_of_group, by_pair }
}

/// Shared edge of two disjoint cell rectangles, if it has positive length.
fn shared_boundary<T: Scalar>(
    grid: &OccupancyGrid<T>,
    a: &CellGroup,
    b: &CellGroup,
) -> Option<(Point2<T>, Point2<T>)> {
    let overlap = |r: (usize, usize), s: (usize, usize)| {
        let lo = r.0.max(s.0);
        let hi = r.1.min(s.1);
        (lo <= hi).then_some((lo, hi + 1))
    };
    if a.i_range.1 + 1 == b.i_range.0 || b.i_range.1 + 1 == a.i_range.0 {
        let x = grid.line(a.i_range.0.max(b.i_range.0));
        let (lo, hi) = overlap(a.j_range, b.j_range)?;
        return Some((Point2::new(x, grid.line(lo)), Point2::new(x, grid.line(hi))));
    }
    if a.j_range.1 + 1 == b.j_range.0 || b.j_range.1 + 1 == a.j_range.0 {
        let y = grid.line(a.j_range.0.max(b.j_range.0));
        let (lo, hi) = overlap(a.i_range, b.i_range)?;
        return Some((Point2::new(grid.line(lo), y), Point2::new(grid.line(hi), y)));
    }
    None
}
