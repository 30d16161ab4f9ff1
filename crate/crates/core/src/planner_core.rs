//! Search tree and the RRT* primitives shared by both planners.

use std::time::Duration;

use crate::error::PlanError;
use crate::geometry::Point2;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TreeNode<T> {
    pub id: usize,
    pub position: Point2<T>,
    pub parent: Option<usize>,
    pub cost_from_start: T,
}

/// Rooted tree of samples. Node ids are dense indices; the root is node 0.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchTree<T> {
    nodes: Vec<TreeNode<T>>,
    children: Vec<Vec<usize>>,
}

impl<T: Scalar> SearchTree<T> {
    pub fn new(root: Point2<T>) -> Self {
        Self {
            nodes: vec![TreeNode { id: 0, position: root, parent: None, cost_from_start: T::zero() }],
            children: vec![Vec::new()],
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn root(&self) -> &TreeNode<T> {
        &self.nodes[0]
    }

    pub fn node(&self, id: usize) -> &TreeNode<T> {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[TreeNode<T>] {
        &self.nodes
    }

    pub fn children(&self, id: usize) -> &[usize] {
        &self.children[id]
    }

    /// `(parent, child)` position pairs, one per edge.
    pub fn edges(&self) -> impl Iterator<Item = (Point2<T>, Point2<T>)> + '_ {
        self.nodes
            .iter()
            .filter_map(|n| n.parent.map(|p| (self.nodes[p].position, n.position)))
    }

    /// Appends a node under `parent` without any optimization.
    pub fn attach(&mut self, parent: usize, position: Point2<T>) -> usize {
        let id = self.nodes.len();
        let cost = self.nodes[parent].cost_from_start + self.nodes[parent].position.distance(&position);
        self.nodes.push(TreeNode { id, position, parent: Some(parent), cost_from_start: cost });
        self.children.push(Vec::new());
        self.children[parent].push(id);
        id
    }

    /// Nearest node to `p`, lowest id on ties.
    pub fn nearest(&self, p: &Point2<T>) -> usize {
        let mut best = 0;
        let mut best_d = self.nodes[0].position.distance_sq(p);
        for n in &self.nodes[1..] {
            let d = n.position.distance_sq(p);
            if d < best_d {
                best = n.id;
                best_d = d;
            }
        }
        best
    }

    /// Ids of nodes within `radius` of `p`, ascending.
    pub fn within(&self, p: &Point2<T>, radius: T) -> Vec<usize> {
        let r2 = radius * radius;
        self.nodes
            .iter()
            .filter(|n| n.position.distance_sq(p) <= r2)
            .map(|n| n.id)
            .collect()
    }

    /// Inserts `p` under its cheapest feasible candidate, then re-parents every
    /// candidate whose cost strictly drops by going through `p`.
    pub fn choose_parent_and_rewire(
        &mut self,
        p: Point2<T>,
        candidates: &[usize],
        mut edge_ok: impl FnMut(&Point2<T>, &Point2<T>) -> bool,
    ) -> Result<usize, PlanError> {
        let mut order = candidates.to_vec();
        order.sort_unstable();
        order.dedup();

        let mut best: Option<(usize, T)> = None;
        for &c in &order {
            let node = &self.nodes[c];
            let cost = node.cost_from_start + node.position.distance(&p);
            if best.is_none_or(|(_, b)| cost < b) && edge_ok(&node.position, &p) {
                best = Some((c, cost));
            }
        }
        let (parent, _) = best.ok_or(PlanError::NoFeasibleParent)?;
        let new_id = self.attach(parent, p);

        let tol = T::tolerance();
        for &c in &order {
            if c == parent {
                continue;
            }
            let via = self.nodes[new_id].cost_from_start + p.distance(&self.nodes[c].position);
            if via + tol < self.nodes[c].cost_from_start && edge_ok(&p, &self.nodes[c].position) {
                self.reparent(c, new_id);
            }
        }
        Ok(new_id)
    }

    fn reparent(&mut self, child: usize, new_parent: usize) {
        if let Some(old) = self.nodes[child].parent {
            self.children[old].retain(|&k| k != child);
        }
        self.nodes[child].parent = Some(new_parent);
        self.children[new_parent].push(child);
        let cost = self.nodes[new_parent].cost_from_start
            + self.nodes[new_parent].position.distance(&self.nodes[child].position);
        let delta = cost - self.nodes[child].cost_from_start;
        let mut stack = vec![child];
        while let Some(k) = stack.pop() {
            self.nodes[k].cost_from_start = self.nodes[k].cost_from_start + delta;
            stack.extend_from_slice(&self.children[k]);
        }
    }

    /// Backtracks from `id` to the root.
    pub fn path_to(&self, id: usize) -> Path<T> {
        let mut waypoints = vec![self.nodes[id].position];
        let mut cur = id;
        while let Some(parent) = self.nodes[cur].parent {
            waypoints.push(self.nodes[parent].position);
            cur = parent;
        }
        waypoints.reverse();
        Path::new(waypoints)
    }

    /// Node ids from the root to `id`.
    pub fn lineage(&self, id: usize) -> Vec<usize> {
        let mut ids = vec![id];
        let mut cur = id;
        while let Some(parent) = self.nodes[cur].parent {
            ids.push(parent);
            cur = parent;
        }
        ids.reverse();
        ids
    }

    /// Cost of `id` recomputed by walking to the root.
    pub fn recomputed_cost(&self, id: usize) -> T {
        path_length(&self.path_to(id))
    }
}

/// Polyline from start to goal.
#[derive(Clone, Debug, PartialEq)]
pub struct Path<T> {
    pub waypoints: Vec<Point2<T>>,
}

impl<T: Scalar> Path<T> {
    /// Drops consecutive duplicate waypoints.
    pub fn new(mut waypoints: Vec<Point2<T>>) -> Self {
        waypoints.dedup_by(|b, a| a.approx_eq(b));
        Self { waypoints }
    }

    pub fn start(&self) -> &Point2<T> {
        &self.waypoints[0]
    }

    pub fn goal(&self) -> &Point2<T> {
        self.waypoints.last().expect("non-empty path")
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Point2<T>, &Point2<T>)> {
        self.waypoints.windows(2).map(|w| (&w[0], &w[1]))
    }

    pub fn length(&self) -> T {
        path_length(self)
    }
}

/// Sum of Euclidean segment lengths.
pub fn path_length<T: Scalar>(path: &Path<T>) -> T {
    path.segments().map(|(a, b)| a.distance(b)).sum()
}

/// Outcome of one planner invocation.
#[derive(Clone, Debug, PartialEq)]
pub struct PlanResult<T> {
    pub feasible_path: Path<T>,
    pub smoothed_path: Option<Path<T>>,
    pub tree: SearchTree<T>,
    pub tree_size: usize,
    pub iterations: usize,
    pub collision_checks: u64,
    pub elapsed: Duration,
    pub feasible_length: T,
    pub smoothed_length: Option<T>,
    /// Number of critical regions (zero for planners that do not partition).
    pub n_regions: usize,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    #[test]
    fn lengths() {
        assert_eq!(path_length(&Path::new(vec![p(0.0, 0.0), p(3.0, 4.0)])), 5.0);
        assert_eq!(path_length(&Path::new(vec![p(0.0, 0.0), p(1.0, 0.0), p(1.0, 1.0)])), 2.0);
        let split = Path::new(vec![p(0.0, 0.0), p(1.5, 2.0), p(3.0, 4.0)]);
        assert!((path_length(&split) - 5.0).abs() < 1e-12);
    }

    #[test]
    fn nearest_ties_and_single() {
        let mut tree = SearchTree::new(p(0.0, 0.0));
        assert_eq!(tree.nearest(&p(5.0, 5.0)), 0);
        tree.attach(0, p(2.0, 0.0));
        tree.attach(0, p(0.0, 2.0));
        assert_eq!(tree.nearest(&p(1.0, 1.0)), 0);
        assert_eq!(tree.nearest(&p(2.0, 2.0)), 1);
    }

    #[test]
    fn single_candidate() {
        let mut tree = SearchTree::new(p(0.0, 0.0));
        let id = tree.choose_parent_and_rewire(p(3.0, 4.0), &[0], |_, _| true).unwrap();
        assert_eq!(tree.node(id).parent, Some(0));
        assert_eq!(tree.node(id).cost_from_start, 5.0);
    }

    #[test]
    fn cost_not_proximity_decides() {
        let mut tree = SearchTree::new(p(0.0, 0.0));
        // long detour to a node right next to the target
        let a = tree.attach(0, p(0.0, 10.0));
        let near = tree.attach(a, p(5.0, 1.0));
        let far = tree.attach(0, p(2.0, 0.0));
        let id = tree.choose_parent_and_rewire(p(5.0, 0.0), &[near, far], |_, _| true).unwrap();
        assert_eq!(tree.node(id).parent, Some(far));
        // and `near` is rewired through the new node
        assert_eq!(tree.node(near).parent, Some(id));
        assert!((tree.node(near).cost_from_start - 6.0).abs() < 1e-12);
    }

    #[test]
    fn infeasible_candidates() {
        let mut tree = SearchTree::new(p(0.0, 0.0));
        let err = tree.choose_parent_and_rewire(p(1.0, 0.0), &[0], |_, _| false).unwrap_err();
        assert_eq!(err, PlanError::NoFeasibleParent);
        assert_eq!(tree.len(), 1);
    }

    #[test]
    fn rewire_propagates_to_descendants() {
        let mut tree = SearchTree::new(p(0.0, 0.0));
        let a = tree.attach(0, p(-3.0, 4.0));
        let b = tree.attach(a, p(4.0, 4.0));
        let c = tree.attach(b, p(8.0, 4.0));
        let id = tree.choose_parent_and_rewire(p(4.0, 0.0), &[0, b], |_, _| true).unwrap();
        assert_eq!(tree.node(b).parent, Some(id));
        for k in 0..tree.len() {
            assert!((tree.node(k).cost_from_start - tree.recomputed_cost(k)).abs() < 1e-9);
        }
        assert!((tree.node(c).cost_from_start - 12.0).abs() < 1e-12);
        assert_eq!(tree.children(a), &[] as &[usize]);
    }
}
