/*
Copyright 2026 The smlr Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/
//! Exact 2D/3D predicates for convex shapes.
//!
//! Shapes are closed sets: touching counts as intersecting. Polygons are CCW;
//! a two-vertex polygon is a segment.

pub type Vec2 = [f64; 2];

#[inline]
fn sub(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] - b[0], a[1] - b[1]]
}

#[inline]
fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn cross(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[1] - a[1] * b[0]
}

#[inline]
pub fn norm(a: Vec2) -> f64 {
    dot(a, a).sqrt()
}

pub fn point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let ab = sub(b, a);
    let len2 = dot(ab, ab);
    let t = if len2 > 0.0 { (dot(sub(p, a), ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    norm(sub(p, [a[0] + t * ab[0], a[1] + t * ab[1]]))
}

/// True when `v` lists at least three CCW vertices forming a strictly convex
/// polygon with nonzero area.
pub fn is_convex_ccw(v: &[Vec2]) -> bool {
    if v.len() < 3 {
        return false;
    }
    let n = v.len();
    (0..n).all(|i| {
        let a = v[i];
        let b = v[(i + 1) % n];
        let c = v[(i + 2) % n];
        cross(sub(b, a), sub(c, b)) > 0.0
    })
}

/// Convex 2D shape.
#[derive(Debug, Clone, PartialEq)]
pub enum Convex2 {
    Disc { center: Vec2, radius: f64 },
    /// CCW vertices; two vertices form a segment.
    Polygon(Vec<Vec2>),
}

impl Convex2 {
    pub fn aabb_box(lo: Vec2, hi: Vec2) -> Self {
        Convex2::Polygon(vec![lo, [hi[0], lo[1]], hi, [lo[0], hi[1]]])
    }

    pub fn segment(a: Vec2, b: Vec2) -> Self {
        Convex2::Polygon(vec![a, b])
    }

    /// Signed distance from a point to this shape: negative inside.
    pub fn point_sdf(&self, p: Vec2) -> f64 {
        match self {
            Convex2::Disc { center, radius } => norm(sub(p, *center)) - radius,
            Convex2::Polygon(v) => polygon_sdf(v, p),
        }
    }

    pub fn intersects(&self, other: &Convex2) -> bool {
        match (self, other) {
            (Convex2::Disc { center, radius }, o) | (o, Convex2::Disc { center, radius }) => {
                o.point_sdf(*center) <= *radius
            }
            (Convex2::Polygon(a), Convex2::Polygon(b)) => sat_overlap(a, b).is_some(),
        }
    }

    /// Signed distance between two shapes: the gap when disjoint, minus the
    /// minimum separating-axis overlap when intersecting.
    pub fn signed_distance(&self, other: &Convex2) -> f64 {
        match (self, other) {
            (Convex2::Disc { center, radius }, o) | (o, Convex2::Disc { center, radius }) => {
                o.point_sdf(*center) - radius
            }
            (Convex2::Polygon(a), Convex2::Polygon(b)) => match sat_overlap(a, b) {
                Some(depth) => -depth,
                None => polygon_gap(a, b),
            },
        }
    }

    pub fn vertices_or_center(&self) -> Vec<(Vec2, f64)> {
        match self {
            Convex2::Disc { center, radius } => vec![(*center, *radius)],
            Convex2::Polygon(v) => v.iter().map(|p| (*p, 0.0)).collect(),
        }
    }
}

fn polygon_sdf(v: &[Vec2], p: Vec2) -> f64 {
    let n = v.len();
    let mut dist = f64::INFINITY;
    let mut inside = n >= 3;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        dist = dist.min(point_segment_distance(p, a, b));
        if cross(sub(b, a), sub(p, a)) < 0.0 {
            inside = false;
        }
    }
    if inside {
        -dist
    } else {
        dist
    }
}

fn edge_normals(v: &[Vec2]) -> impl Iterator<Item = Vec2> + '_ {
    let n = v.len();
    let edges = if n == 2 { 1 } else { n };
    (0..edges).map(move |i| {
        let e = sub(v[(i + 1) % n], v[i]);
        let len = norm(e);
        if len > 0.0 {
            [-e[1] / len, e[0] / len]
        } else {
            [1.0, 0.0]
        }
    })
}

/// Minimum overlap depth over all candidate separating axes, or `None` when
/// some axis separates the polygons.
fn sat_overlap(a: &[Vec2], b: &[Vec2]) -> Option<f64> {
    let mut depth = f64::INFINITY;
    for axis in edge_normals(a).chain(edge_normals(b)) {
        let (alo, ahi) = project(a, axis);
        let (blo, bhi) = project(b, axis);
        if ahi < blo || bhi < alo {
            return None;
        }
        depth = depth.min(ahi.min(bhi) - alo.max(blo));
    }
    Some(depth)
}

#[inline]
fn project(v: &[Vec2], axis: Vec2) -> (f64, f64) {
    v.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), p| {
        let d = dot(*p, axis);
        (lo.min(d), hi.max(d))
    })
}

fn polygon_gap(a: &[Vec2], b: &[Vec2]) -> f64 {
    let side = |p: &[Vec2], q: &[Vec2]| -> f64 {
        let n = q.len();
        let edges = if n == 2 { 1 } else { n };
        p.iter()
            .flat_map(|&x| (0..edges).map(move |i| point_segment_distance(x, q[i], q[(i + 1) % n])))
            .fold(f64::INFINITY, f64::min)
    };
    side(a, b).min(side(b, a))
}

/// Signed distance from a point to an axis-aligned box in any dimension.
pub fn box_sdf(p: &[f64], lo: &[f64], hi: &[f64]) -> f64 {
    let mut outside = 0.0;
    let mut inside = f64::NEG_INFINITY;
    for i in 0..p.len() {
        let d = (lo[i] - p[i]).max(p[i] - hi[i]);
        if d > 0.0 {
            outside += d * d;
        }
        inside = inside.max(d.min(0.0));
    }
    if outside > 0.0 {
        outside.sqrt()
    } else {
        inside
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn square(x: f64, y: f64, s: f64) -> Convex2 {
        Convex2::aabb_box([x, y], [x + s, y + s])
    }

    #[test]
    fn disc_polygon_contact() {
        let wall = Convex2::segment([0.5, 0.0], [0.5, 1.0]);
        let disc = Convex2::Disc { center: [0.45, 0.5], radius: 0.1 };
        assert!(disc.intersects(&wall));
        assert_abs_diff_eq!(disc.signed_distance(&wall), -0.05, epsilon = 1e-12);
        let far = Convex2::Disc { center: [0.3, 0.5], radius: 0.1 };
        assert!(!far.intersects(&wall));
        assert_abs_diff_eq!(far.signed_distance(&wall), 0.1, epsilon = 1e-12);
    }

    #[test]
    fn polygon_overlap_and_gap() {
        let a = square(0.0, 0.0, 1.0);
        let b = square(0.8, 0.2, 1.0);
        assert!(a.intersects(&b));
        assert_abs_diff_eq!(a.signed_distance(&b), -0.2, epsilon = 1e-12);
        let c = square(1.5, 0.0, 1.0);
        assert!(!a.intersects(&c));
        assert_abs_diff_eq!(a.signed_distance(&c), 0.5, epsilon = 1e-12);
        // diagonal gap between corners
        let d = square(2.0, 2.0, 1.0);
        assert_abs_diff_eq!(a.signed_distance(&d), 2f64.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn touching_counts_as_contact() {
        let a = square(0.0, 0.0, 1.0);
        let b = square(1.0, 0.0, 1.0);
        assert!(a.intersects(&b));
    }

    #[test]
    fn segment_against_box() {
        let b = square(0.0, 0.0, 1.0);
        let crossing = Convex2::segment([-1.0, 0.5], [2.0, 0.5]);
        assert!(crossing.intersects(&b));
        let diag_miss = Convex2::segment([1.2, 0.0], [2.0, 0.8]);
        assert!(!diag_miss.intersects(&b));
        let diag_hit = Convex2::segment([0.5, 1.5], [1.5, 0.5]);
        assert!(diag_hit.intersects(&b));
    }

    #[test]
    fn convexity_check() {
        assert!(is_convex_ccw(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]));
        assert!(!is_convex_ccw(&[[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]));
        assert!(!is_convex_ccw(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]));
    }

    #[test]
    fn box_signed_distance() {
        assert_abs_diff_eq!(box_sdf(&[0.5, 0.5], &[0.0, 0.0], &[1.0, 1.0]), -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(box_sdf(&[2.0, 0.5], &[0.0, 0.0], &[1.0, 1.0]), 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(box_sdf(&[2.0, 2.0, 0.5], &[0.0; 3], &[1.0; 3]), 2f64.sqrt(), epsilon = 1e-12);
    }
}
