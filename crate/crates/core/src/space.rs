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
//! Composable state spaces.
//!
//! A [`StateSpace`] is a bounded real box, a circle, or a weighted product of
//! other spaces. Every space flattens into a list of scalar [`Axis`] entries;
//! the product metric `sqrt(sum w_i * d_i^2)` then reduces to a weighted
//! Euclidean sum over axes, which is what all the hot-path operations use.

use std::f64::consts::{PI, TAU};
use std::fmt;

use rand::Rng;

use crate::error::{invalid, Error, Result};

/// Shrink applied to per-axis perturbations so that rounding never pushes a
/// near-sample outside its metric ball.
const NEAR_SHRINK: f64 = 1.0 - 1e-12;

/// Wraps an angle into `[0, 2pi)`.
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r >= TAU {
        0.0
    } else {
        r
    }
}

/// Signed shortest-arc difference `to - from`, in `(-pi, pi]`.
pub fn angle_diff(from: f64, to: f64) -> f64 {
    let d = (to - from).rem_euclid(TAU);
    if d > PI {
        d - TAU
    } else {
        d
    }
}

/// A point in a [`StateSpace`], stored as flat coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct State(Vec<f64>);

impl State {
    /// Wraps raw coordinates without any normalization. Use
    /// [`StateSpace::state`] to get a checked, normalized state.
    pub fn from_vec(coords: Vec<f64>) -> Self {
        State(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }
}

impl fmt::Display for State {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisKind {
    Bounded { lo: f64, hi: f64 },
    Periodic,
}

/// One scalar coordinate of a flattened space together with its effective
/// metric weight (the product of all enclosing product weights).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub kind: AxisKind,
    pub weight: f64,
}

impl Axis {
    /// Diameter of this axis under its own (unweighted) metric.
    pub fn extent(&self) -> f64 {
        match self.kind {
            AxisKind::Bounded { lo, hi } => hi - lo,
            AxisKind::Periodic => PI,
        }
    }

    /// Coordinate-space length of the axis (period for circles).
    pub fn span(&self) -> f64 {
        match self.kind {
            AxisKind::Bounded { lo, hi } => hi - lo,
            AxisKind::Periodic => TAU,
        }
    }

    pub fn lower(&self) -> f64 {
        match self.kind {
            AxisKind::Bounded { lo, .. } => lo,
            AxisKind::Periodic => 0.0,
        }
    }

    fn diff(&self, from: f64, to: f64) -> f64 {
        match self.kind {
            AxisKind::Bounded { .. } => to - from,
            AxisKind::Periodic => angle_diff(from, to),
        }
    }

    fn same_as(&self, other: &Axis) -> bool {
        const TOL: f64 = 1e-12;
        let kinds = match (self.kind, other.kind) {
            (AxisKind::Periodic, AxisKind::Periodic) => true,
            (AxisKind::Bounded { lo: a, hi: b }, AxisKind::Bounded { lo: c, hi: d }) => {
                (a - c).abs() <= TOL && (b - d).abs() <= TOL
            }
            _ => false,
        };
        kinds && (self.weight - other.weight).abs() <= TOL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceKind {
    RealVector { lo: Vec<f64>, hi: Vec<f64> },
    Circle,
    Product { children: Vec<StateSpace>, weights: Vec<f64> },
}

/// A composable state space with metric, interpolation and sampling.
#[derive(Debug, Clone, PartialEq)]
pub struct StateSpace {
    kind: SpaceKind,
    axes: Vec<Axis>,
}

impl StateSpace {
    pub fn real_vector(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch { expected: lo.len(), actual: hi.len() });
        }
        if lo.is_empty() {
            return Err(invalid("real vector space needs at least one dimension"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l.is_finite() && h.is_finite() && l < h)) {
            return Err(invalid("real vector bounds must satisfy lo < hi in every dimension"));
        }
        let axes = lo
            .iter()
            .zip(&hi)
            .map(|(&lo, &hi)| Axis { kind: AxisKind::Bounded { lo, hi }, weight: 1.0 })
            .collect();
        Ok(StateSpace { kind: SpaceKind::RealVector { lo, hi }, axes })
    }

    pub fn circle() -> Self {
        StateSpace {
            kind: SpaceKind::Circle,
            axes: vec![Axis { kind: AxisKind::Periodic, weight: 1.0 }],
        }
    }

    /// Product with unit weights.
    pub fn product(children: Vec<StateSpace>) -> Result<Self> {
        let weights = vec![1.0; children.len()];
        Self::weighted_product(children, weights)
    }

    pub fn weighted_product(children: Vec<StateSpace>, weights: Vec<f64>) -> Result<Self> {
        if children.len() < 2 {
            return Err(invalid("product space needs at least two children"));
        }
        if weights.len() != children.len() {
            return Err(Error::DimensionMismatch { expected: children.len(), actual: weights.len() });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid("product weights must be positive"));
        }
        let axes = children
            .iter()
            .zip(&weights)
            .flat_map(|(c, &w)| c.axes.iter().map(move |a| Axis { kind: a.kind, weight: a.weight * w }))
            .collect();
        Ok(StateSpace { kind: SpaceKind::Product { children, weights }, axes })
    }

    /// Rebuilds a space from flattened axes. Runs of bounded axes with equal
    /// weight become one real vector space; a single group is returned as-is
    /// (carrying its weight) instead of wrapping it in a product.
    pub fn from_axes(axes: &[Axis]) -> Result<Self> {
        if axes.is_empty() {
            return Err(invalid("cannot build a space without axes"));
        }
        let mut groups: Vec<(StateSpace, f64)> = Vec::new();
        let mut i = 0;
        while i < axes.len() {
            let w = axes[i].weight;
            match axes[i].kind {
                AxisKind::Periodic => {
                    groups.push((StateSpace::circle(), w));
                    i += 1;
                }
                AxisKind::Bounded { .. } => {
                    let mut lo = Vec::new();
                    let mut hi = Vec::new();
                    while i < axes.len() {
                        match axes[i].kind {
                            AxisKind::Bounded { lo: l, hi: h } if axes[i].weight == w => {
                                lo.push(l);
                                hi.push(h);
                                i += 1;
                            }
                            _ => break,
                        }
                    }
                    groups.push((StateSpace::real_vector(lo, hi)?, w));
                }
            }
        }
        if groups.len() == 1 {
            // a lone group keeps its effective weight on its axes
            let (mut space, w) = groups.pop().unwrap();
            for a in &mut space.axes {
                a.weight = w;
            }
            return Ok(space);
        }
        let (children, weights) = groups.into_iter().unzip();
        StateSpace::weighted_product(children, weights)
    }

    /// The subspace spanned by the given coordinate indices, in that order.
    /// Returns `None` for an empty index list.
    pub fn subspace(&self, indices: &[usize]) -> Result<Option<StateSpace>> {
        if indices.is_empty() {
            return Ok(None);
        }
        let mut axes = Vec::with_capacity(indices.len());
        for &i in indices {
            let a = self
                .axes
                .get(i)
                .ok_or_else(|| invalid(format!("coordinate index {i} out of range for dimension {}", self.dimension())))?;
            axes.push(*a);
        }
        StateSpace::from_axes(&axes).map(Some)
    }

    /// True when both spaces have the same flattened axes (kinds, bounds,
    /// effective weights), i.e. the same metric on the same coordinates.
    pub fn equivalent(&self, other: &StateSpace) -> bool {
        self.axes.len() == other.axes.len() && self.axes.iter().zip(&other.axes).all(|(a, b)| a.same_as(b))
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn dimension(&self) -> usize {
        self.axes.len()
    }

    /// Builds a checked state: circle coordinates are normalized to
    /// `[0, 2pi)`, bounded coordinates must lie within their bounds.
    pub fn state(&self, coords: Vec<f64>) -> Result<State> {
        if coords.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), actual: coords.len() });
        }
        let mut coords = coords;
        for (c, axis) in coords.iter_mut().zip(&self.axes) {
            if !c.is_finite() {
                return Err(invalid("state coordinates must be finite"));
            }
            match axis.kind {
                AxisKind::Bounded { lo, hi } => {
                    if *c < lo || *c > hi {
                        return Err(invalid(format!("coordinate {c} outside bounds [{lo}, {hi}]")));
                    }
                }
                AxisKind::Periodic => *c = normalize_angle(*c),
            }
        }
        Ok(State(coords))
    }

    /// Checks the containment invariants of `x` without modifying it.
    pub fn contains(&self, x: &State) -> bool {
        x.len() == self.dimension()
            && x.0.iter().zip(&self.axes).all(|(&c, a)| match a.kind {
                AxisKind::Bounded { lo, hi } => (lo..=hi).contains(&c),
                AxisKind::Periodic => (0.0..TAU).contains(&c),
            })
    }

    fn check_dim(&self, x: &State) -> Result<()> {
        if x.len() != self.dimension() {
            return Err(Error::DimensionMismatch { expected: self.dimension(), actual: x.len() });
        }
        Ok(())
    }

    /// Metric distance; checked variant of [`StateSpace::dist`].
    pub fn distance(&self, a: &State, b: &State) -> Result<f64> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        Ok(self.dist(a, b))
    }

    /// Metric distance without dimension checks.
    pub fn dist(&self, a: &State, b: &State) -> f64 {
        self.axes
            .iter()
            .zip(a.0.iter().zip(&b.0))
            .map(|(axis, (&x, &y))| {
                let d = axis.diff(x, y);
                axis.weight * d * d
            })
            .sum::<f64>()
            .sqrt()
    }

    /// Checked interpolation; `s` must lie in `[0, 1]`.
    pub fn interpolate(&self, a: &State, b: &State, s: f64) -> Result<State> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        if !(0.0..=1.0).contains(&s) {
            return Err(invalid(format!("interpolation parameter {s} outside [0, 1]")));
        }
        Ok(self.interp(a, b, s))
    }

    /// Interpolation along the geodesic from `a` to `b` (shortest arc on
    /// circles), without argument checks.
    pub fn interp(&self, a: &State, b: &State, s: f64) -> State {
        if s <= 0.0 {
            return a.clone();
        }
        if s >= 1.0 {
            return b.clone();
        }
        let coords = self
            .axes
            .iter()
            .zip(a.0.iter().zip(&b.0))
            .map(|(axis, (&x, &y))| match axis.kind {
                AxisKind::Bounded { lo, hi } => (x + s * (y - x)).clamp(lo, hi),
                AxisKind::Periodic => normalize_angle(x + s * angle_diff(x, y)),
            })
            .collect();
        State(coords)
    }

    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> State {
        let coords = self
            .axes
            .iter()
            .map(|axis| match axis.kind {
                AxisKind::Bounded { lo, hi } => (lo + rng.gen::<f64>() * (hi - lo)).min(hi),
                AxisKind::Periodic => normalize_angle(rng.gen::<f64>() * TAU),
            })
            .collect();
        State(coords)
    }

    /// Samples within metric distance `radius` of `center` by perturbing each
    /// axis uniformly by at most `radius / sqrt(n * w)`, then clamping
    /// (bounded axes) or wrapping (circles).
    pub fn sample_uniform_near<R: Rng + ?Sized>(&self, center: &State, radius: f64, rng: &mut R) -> State {
        if radius <= 0.0 {
            return center.clone();
        }
        let n = self.dimension() as f64;
        let coords = self
            .axes
            .iter()
            .zip(&center.0)
            .map(|(axis, &c)| {
                let half = NEAR_SHRINK * radius / (n * axis.weight).sqrt();
                let offset = (2.0 * rng.gen::<f64>() - 1.0) * half;
                match axis.kind {
                    AxisKind::Bounded { lo, hi } => (c + offset).clamp(lo, hi),
                    AxisKind::Periodic => normalize_angle(c + offset),
                }
            })
            .collect();
        State(coords)
    }

    /// Diameter of the space under its metric.
    pub fn max_extent(&self) -> f64 {
        self.axes.iter().map(|a| a.weight * a.extent() * a.extent()).sum::<f64>().sqrt()
    }

    /// Exact distance from `x` to the image of the geodesic segment `a -> b`.
    ///
    /// On periodic axes the wrapped difference is piecewise linear in the
    /// segment parameter, so the squared distance is piecewise quadratic; it is
    /// minimized in closed form on every piece.
    pub fn distance_to_segment(&self, x: &State, a: &State, b: &State) -> f64 {
        let n = self.dimension();
        let mut offset = Vec::with_capacity(n);
        let mut slope = Vec::with_capacity(n);
        let mut breaks = vec![0.0, 1.0];
        for (i, axis) in self.axes.iter().enumerate() {
            let (xa, aa, ba) = (x.0[i], a.0[i], b.0[i]);
            match axis.kind {
                AxisKind::Bounded { .. } => {
                    offset.push(xa - aa);
                    slope.push(ba - aa);
                }
                AxisKind::Periodic => {
                    let delta = angle_diff(aa, ba);
                    let g0 = angle_diff(aa, xa);
                    offset.push(g0);
                    slope.push(delta);
                    // g(s) = g0 - s * delta crosses odd multiples of pi here
                    if delta != 0.0 {
                        for m in [-3.0, -1.0, 1.0, 3.0] {
                            let s = (g0 - m * PI) / delta;
                            if s > 0.0 && s < 1.0 {
                                breaks.push(s);
                            }
                        }
                    }
                }
            }
        }
        breaks.sort_by(f64::total_cmp);
        let mut best = f64::INFINITY;
        for w in breaks.windows(2) {
            let (s0, s1) = (w[0], w[1]);
            if s1 <= s0 {
                continue;
            }
            let mid = 0.5 * (s0 + s1);
            // on this piece every axis difference is c_i - s * slope_i
            let mut c = Vec::with_capacity(n);
            for (i, axis) in self.axes.iter().enumerate() {
                let raw = offset[i] - mid * slope[i];
                let ci = match axis.kind {
                    AxisKind::Bounded { .. } => offset[i],
                    AxisKind::Periodic => offset[i] - (raw - angle_diff(0.0, raw)),
                };
                c.push(ci);
            }
            let (mut num, mut den) = (0.0, 0.0);
            for i in 0..n {
                let w = self.axes[i].weight;
                num += w * c[i] * slope[i];
                den += w * slope[i] * slope[i];
            }
            let candidates = if den > 0.0 { [s0, s1, (num / den).clamp(s0, s1)] } else { [s0, s1, s0] };
            for s in candidates {
                let f: f64 = (0..n)
                    .map(|i| {
                        let d = c[i] - s * slope[i];
                        self.axes[i].weight * d * d
                    })
                    .sum();
                best = best.min(f);
            }
        }
        best.sqrt()
    }
}
