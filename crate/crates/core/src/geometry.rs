//! Points and small planar predicates.

use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Point2<T> {
    pub x: T,
    pub y: T,
}

impl<T: Scalar> Point2<T> {
    #[inline]
    pub fn new(x: T, y: T) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    #[inline]
    pub fn distance_sq(&self, other: &Self) -> T {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn midpoint(&self, other: &Self) -> Self {
        let half = T::lit(0.5);
        Self::new((self.x + other.x) * half, (self.y + other.y) * half)
    }

    #[inline]
    pub fn lerp(&self, other: &Self, t: T) -> Self {
        Self::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn approx_eq(&self, other: &Self) -> bool {
        let tol = T::tolerance();
        (self.x - other.x).abs() <= tol && (self.y - other.y).abs() <= tol
    }

    pub fn cast<U: Scalar>(&self) -> Point2<U> {
        Point2::new(U::lit(self.x.as_f64()), U::lit(self.y.as_f64()))
    }
}

impl<T: Scalar> Add for Point2<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Scalar> Sub for Point2<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Scalar> Mul<T> for Point2<T> {
    type Output = Self;
    fn mul(self, rhs: T) -> Self {
        Self::new(self.x * rhs, self.y * rhs)
    }
}

/// Closed axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Aabb<T> {
    pub min: Point2<T>,
    pub max: Point2<T>,
}

impl<T: Scalar> Aabb<T> {
    pub fn new(min: Point2<T>, max: Point2<T>) -> Self {
        Self { min, max }
    }

    /// Box shrunk by `by` on every side.
    pub fn shrunk(&self, by: T) -> Self {
        Self::new(
            Point2::new(self.min.x + by, self.min.y + by),
            Point2::new(self.max.x - by, self.max.y - by),
        )
    }

    pub fn contains(&self, p: &Point2<T>, tol: T) -> bool {
        p.x >= self.min.x - tol
            && p.x <= self.max.x + tol
            && p.y >= self.min.y - tol
            && p.y <= self.max.y + tol
    }

    pub fn center(&self) -> Point2<T> {
        self.min.midpoint(&self.max)
    }

    /// Squared distance from `p` to the closed box (zero inside).
    pub fn distance_sq(&self, p: &Point2<T>) -> T {
        let cx = p.x.max(self.min.x).min(self.max.x);
        let cy = p.y.max(self.min.y).min(self.max.y);
        p.distance_sq(&Point2::new(cx, cy))
    }

    /// Parameter interval `[t0, t1] ⊆ [0, 1]` of the segment `a + t (b - a)`
    /// lying in the closed box, or `None` if the segment misses it
    /// (Liang–Barsky clipping).
    pub fn clip_segment(&self, a: &Point2<T>, b: &Point2<T>) -> Option<(T, T)> {
        let d = *b - *a;
        let mut t0 = T::zero();
        let mut t1 = T::one();
        let checks = [
            (-d.x, a.x - self.min.x),
            (d.x, self.max.x - a.x),
            (-d.y, a.y - self.min.y),
            (d.y, self.max.y - a.y),
        ];
        for (p, q) in checks {
            if p == T::zero() {
                if q < T::zero() {
                    return None;
                }
            } else {
                let r = q / p;
                if p < T::zero() {
                    if r > t1 {
                        return None;
                    }
                    if r > t0 {
                        t0 = r;
                    }
                } else {
                    if r < t0 {
                        return None;
                    }
                    if r < t1 {
                        t1 = r;
                    }
                }
            }
        }
        Some((t0, t1))
    }
}

/// Twice the signed area of triangle `(a, b, c)`; positive when counter-clockwise.
#[inline]
pub fn orient<T: Scalar>(a: &Point2<T>, b: &Point2<T>, c: &Point2<T>) -> T {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn point_segment_distance<T: Scalar>(p: &Point2<T>, a: &Point2<T>, b: &Point2<T>) -> T {
    let d = *b - *a;
    let len_sq = d.x * d.x + d.y * d.y;
    if len_sq == T::zero() {
        return p.distance(a);
    }
    let t = (((p.x - a.x) * d.x + (p.y - a.y) * d.y) / len_sq)
        .max(T::zero())
        .min(T::one());
    p.distance(&a.lerp(b, t))
}

/// Whether closed segments `[a, b]` and `[c, d]` share a point.
pub fn segments_intersect<T: Scalar>(
    a: &Point2<T>,
    b: &Point2<T>,
    c: &Point2<T>,
    d: &Point2<T>,
) -> bool {
    let tol = T::tolerance();
    let o1 = orient(a, b, c);
    let o2 = orient(a, b, d);
    let o3 = orient(c, d, a);
    let o4 = orient(c, d, b);
    let strictly = |u: T, v: T| (u > tol && v < -tol) || (u < -tol && v > tol);
    if strictly(o1, o2) && strictly(o3, o4) {
        return true;
    }
    point_segment_distance(c, a, b) <= tol
        || point_segment_distance(d, a, b) <= tol
        || point_segment_distance(a, c, d) <= tol
        || point_segment_distance(b, c, d) <= tol
}

/// Even-odd point-in-polygon test; boundary points are unspecified.
pub fn point_in_polygon<T: Scalar>(p: &Point2<T>, vertices: &[Point2<T>]) -> bool {
    let mut inside = false;
    let n = vertices.len();
    let mut j = n - 1;
    for i in 0..n {
        let vi = &vertices[i];
        let vj = &vertices[j];
        if (vi.y > p.y) != (vj.y > p.y) {
            let x_cross = vi.x + (p.y - vi.y) * (vj.x - vi.x) / (vj.y - vi.y);
            if p.x < x_cross {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(x: f64, y: f64) -> Point2<f64> {
        Point2::new(x, y)
    }

    #[test]
    fn clip_segment_hits_and_misses() {
        let b = Aabb::new(p(0.0, 0.0), p(1.0, 1.0));
        let (t0, t1) = b.clip_segment(&p(-1.0, 0.5), &p(2.0, 0.5)).unwrap();
        assert!((t0 - 1.0 / 3.0).abs() < 1e-12);
        assert!((t1 - 2.0 / 3.0).abs() < 1e-12);
        assert!(b.clip_segment(&p(-1.0, 2.0), &p(2.0, 2.0)).is_none());
        // touching a corner is a hit with zero-length interval
        let (t0, t1) = b.clip_segment(&p(0.0, 2.0), &p(2.0, 0.0)).unwrap();
        assert!((t0 - t1).abs() < 1e-12);
    }

    #[test]
    fn segment_intersection_cases() {
        assert!(segments_intersect(&p(0.0, 0.0), &p(2.0, 2.0), &p(0.0, 2.0), &p(2.0, 0.0)));
        assert!(!segments_intersect(&p(0.0, 0.0), &p(1.0, 0.0), &p(0.0, 1.0), &p(1.0, 1.0)));
        // T-junction
        assert!(segments_intersect(&p(0.0, 0.0), &p(2.0, 0.0), &p(1.0, 0.0), &p(1.0, 1.0)));
    }

    #[test]
    fn polygon_membership() {
        let tri = [p(0.0, 0.0), p(4.0, 0.0), p(0.0, 4.0)];
        assert!(point_in_polygon(&p(1.0, 1.0), &tri));
        assert!(!point_in_polygon(&p(3.0, 3.0), &tri));
    }
}
