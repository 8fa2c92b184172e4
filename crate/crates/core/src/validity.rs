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
//! Per-level constraint functions: a robot model posed by the level's state,
//! checked against a shared obstacle list inside workspace bounds.

use std::sync::Arc;

use crate::error::{invalid, Error, Result};
use crate::geometry::{box_sdf, is_convex_ccw, Convex2, Vec2};
use crate::space::{State, StateSpace};

pub const DEFAULT_CHECK_RESOLUTION: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub enum ObstacleShape {
    Disc { center: Vec2, radius: f64 },
    /// Axis-aligned box in 2D or 3D.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// Convex polygon, CCW.
    Polygon(Vec<Vec2>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle {
    shape: ObstacleShape,
    convex: Option<Convex2>,
}

impl Obstacle {
    pub fn disc(center: Vec2, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(invalid("disc obstacle radius must be positive"));
        }
        Ok(Obstacle {
            shape: ObstacleShape::Disc { center, radius },
            convex: Some(Convex2::Disc { center, radius }),
        })
    }

    pub fn aabb(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || !(lo.len() == 2 || lo.len() == 3) {
            return Err(invalid("box obstacle needs matching 2D or 3D corners"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return Err(invalid("box obstacle needs lo < hi componentwise"));
        }
        let convex = (lo.len() == 2).then(|| Convex2::aabb_box([lo[0], lo[1]], [hi[0], hi[1]]));
        Ok(Obstacle { shape: ObstacleShape::Box { lo, hi }, convex })
    }

    pub fn polygon(vertices: Vec<Vec2>) -> Result<Self> {
        if !is_convex_ccw(&vertices) {
            return Err(invalid("polygon obstacle needs >= 3 non-collinear CCW vertices forming a convex shape"));
        }
        Ok(Obstacle { convex: Some(Convex2::Polygon(vertices.clone())), shape: ObstacleShape::Polygon(vertices) })
    }

    pub fn shape(&self) -> &ObstacleShape {
        &self.shape
    }

    pub fn dimension(&self) -> usize {
        match &self.shape {
            ObstacleShape::Box { lo, .. } => lo.len(),
            _ => 2,
        }
    }

    fn point_sdf(&self, p: &[f64]) -> f64 {
        match (&self.shape, &self.convex) {
            (ObstacleShape::Box { lo, hi }, _) => box_sdf(p, lo, hi),
            (_, Some(c)) => c.point_sdf([p[0], p[1]]),
            _ => unreachable!("2D obstacles always carry a convex shape"),
        }
    }
}

/// Axis-aligned workspace bounds (2D or 3D).
#[derive(Debug, Clone, PartialEq)]
pub struct Workspace {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Workspace {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() || !(lo.len() == 2 || lo.len() == 3) {
            return Err(invalid("workspace bounds must be 2D or 3D"));
        }
        if lo.iter().zip(&hi).any(|(l, h)| !(l < h)) {
            return Err(invalid("workspace bounds need lo < hi"));
        }
        Ok(Workspace { lo, hi })
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    /// Smallest distance from `p` (inflated by `r`) to the boundary; negative
    /// when the inflated point sticks out.
    fn margin(&self, p: &[f64], r: f64) -> f64 {
        (0..p.len()).map(|i| (p[i] - self.lo[i]).min(self.hi[i] - p[i]) - r).fold(f64::INFINITY, f64::min)
    }
}

/// Workspace coordinate of a point robot: a state coordinate or a constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PoseAxis {
    Coord(usize),
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum RobotModel {
    Point { position: Vec<PoseAxis> },
    Disc { position: Vec<PoseAxis>, radius: f64 },
    /// Union of convex parts in the body frame, posed by `(x, y[, theta])`.
    RigidPolygon { parts: Vec<Vec<Vec2>>, x: usize, y: usize, theta: Option<usize> },
    /// Serial chain of links rooted at `(x, y)`; joint angles are relative.
    PlanarChain { x: usize, y: usize, joints: Vec<usize>, links: Vec<f64> },
}

impl RobotModel {
    /// State coordinates referenced by this model, in declaration order.
    pub fn coordinates(&self) -> Vec<usize> {
        match self {
            RobotModel::Point { position } | RobotModel::Disc { position, .. } => position
                .iter()
                .filter_map(|a| match a {
                    PoseAxis::Coord(i) => Some(*i),
                    PoseAxis::Fixed(_) => None,
                })
                .collect(),
            RobotModel::RigidPolygon { x, y, theta, .. } => {
                let mut v = vec![*x, *y];
                v.extend(theta.iter().copied());
                v
            }
            RobotModel::PlanarChain { x, y, joints, .. } => {
                let mut v = vec![*x, *y];
                v.extend(joints.iter().copied());
                v
            }
        }
    }

    fn workspace_dimension(&self) -> usize {
        match self {
            RobotModel::Point { position } | RobotModel::Disc { position, .. } => position.len(),
            _ => 2,
        }
    }

    fn check(&self) -> Result<()> {
        match self {
            RobotModel::Point { .. } => Ok(()),
            RobotModel::Disc { radius, .. } if *radius > 0.0 => Ok(()),
            RobotModel::Disc { .. } => Err(invalid("disc robot radius must be positive")),
            RobotModel::RigidPolygon { parts, .. } => {
                if parts.is_empty() || parts.iter().any(|p| !is_convex_ccw(p)) {
                    Err(invalid("rigid polygon robot needs convex CCW parts"))
                } else {
                    Ok(())
                }
            }
            RobotModel::PlanarChain { joints, links, .. } => {
                if joints.len() != links.len() || links.is_empty() || links.iter().any(|l| !(*l > 0.0)) {
                    Err(invalid("planar chain needs one positive link length per joint"))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// Robot geometry placed in the workspace.
enum Posed {
    Ball { center: [f64; 3], dim: usize, radius: f64 },
    Shapes(Vec<Convex2>),
}

/// The constraint function of one level.
#[derive(Debug, Clone)]
pub struct LevelValidity {
    space: StateSpace,
    robot: RobotModel,
    obstacles: Arc<Vec<Obstacle>>,
    workspace: Arc<Workspace>,
    check_resolution: f64,
    extent: f64,
}

impl LevelValidity {
    pub fn new(
        space: StateSpace,
        robot: RobotModel,
        obstacles: Arc<Vec<Obstacle>>,
        workspace: Arc<Workspace>,
        check_resolution: f64,
    ) -> Result<Self> {
        if !(check_resolution > 0.0 && check_resolution <= 1.0) {
            return Err(invalid("check resolution must lie in (0, 1]"));
        }
        robot.check()?;
        let mut coords = robot.coordinates();
        coords.sort_unstable();
        let expected: Vec<usize> = (0..space.dimension()).collect();
        if coords != expected {
            return Err(invalid(format!(
                "robot model must use each of the {} state coordinates exactly once",
                space.dimension()
            )));
        }
        let wdim = workspace.dimension();
        if robot.workspace_dimension() != wdim {
            return Err(Error::DimensionMismatch { expected: wdim, actual: robot.workspace_dimension() });
        }
        if let Some(o) = obstacles.iter().find(|o| o.dimension() != wdim) {
            return Err(Error::DimensionMismatch { expected: wdim, actual: o.dimension() });
        }
        let extent = space.max_extent();
        Ok(LevelValidity { space, robot, obstacles, workspace, check_resolution, extent })
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn robot(&self) -> &RobotModel {
        &self.robot
    }

    pub fn obstacles(&self) -> &[Obstacle] {
        &self.obstacles
    }

    pub fn workspace(&self) -> &Workspace {
        &self.workspace
    }

    pub fn check_resolution(&self) -> f64 {
        self.check_resolution
    }

    pub fn with_check_resolution(&self, check_resolution: f64) -> Result<Self> {
        LevelValidity::new(
            self.space.clone(),
            self.robot.clone(),
            Arc::clone(&self.obstacles),
            Arc::clone(&self.workspace),
            check_resolution,
        )
    }

    fn pose(&self, x: &State) -> Posed {
        let c = x.coords();
        match &self.robot {
            RobotModel::Point { position } => ball(position, c, 0.0),
            RobotModel::Disc { position, radius } => ball(position, c, *radius),
            RobotModel::RigidPolygon { parts, x, y, theta } => {
                let (tx, ty) = (c[*x], c[*y]);
                let th = theta.map_or(0.0, |i| c[i]);
                let (s, co) = th.sin_cos();
                Posed::Shapes(
                    parts
                        .iter()
                        .map(|p| {
                            Convex2::Polygon(p.iter().map(|v| [tx + co * v[0] - s * v[1], ty + s * v[0] + co * v[1]]).collect())
                        })
                        .collect(),
                )
            }
            RobotModel::PlanarChain { x, y, joints, links } => {
                let mut p = [c[*x], c[*y]];
                let mut angle = 0.0;
                let mut segs = Vec::with_capacity(links.len());
                for (j, len) in joints.iter().zip(links) {
                    angle += c[*j];
                    let q = [p[0] + len * angle.cos(), p[1] + len * angle.sin()];
                    segs.push(Convex2::segment(p, q));
                    p = q;
                }
                Posed::Shapes(segs)
            }
        }
    }

    /// True iff the posed robot lies inside the workspace and touches no
    /// obstacle.
    pub fn is_valid(&self, x: &State) -> bool {
        if x.len() != self.space.dimension() {
            return false;
        }
        match self.pose(x) {
            Posed::Ball { center, dim, radius } => {
                let p = &center[..dim];
                self.workspace.margin(p, radius) >= 0.0 && self.obstacles.iter().all(|o| o.point_sdf(p) > radius)
            }
            Posed::Shapes(shapes) => {
                let inside = shapes.iter().all(|s| match s {
                    Convex2::Polygon(v) => v.iter().all(|p| self.workspace.margin(p, 0.0) >= 0.0),
                    Convex2::Disc { center, radius } => self.workspace.margin(center, *radius) >= 0.0,
                });
                inside
                    && shapes
                        .iter()
                        .all(|s| self.obstacles.iter().all(|o| !s.intersects(o.convex.as_ref().expect("2D obstacle"))))
            }
        }
    }

    /// Motion check at the level's own resolution.
    pub fn motion_valid(&self, a: &State, b: &State) -> bool {
        self.motion_valid_at(a, b, self.check_resolution)
    }

    /// Checks `is_valid` at dyadic interpolation parameters spaced no more
    /// than `resolution * max_extent` apart, endpoints included. The dyadic
    /// grid makes a finer resolution a superset of a coarser one, and the
    /// endpoints are put in a canonical order so the check is symmetric.
    pub fn motion_valid_at(&self, a: &State, b: &State, resolution: f64) -> bool {
        let (a, b) = if a.coords() <= b.coords() { (a, b) } else { (b, a) };
        if !self.is_valid(a) || !self.is_valid(b) {
            return false;
        }
        let d = self.space.dist(a, b);
        let step = resolution * self.extent;
        let mut n: u64 = 1;
        while d / (n as f64) > step {
            n *= 2;
        }
        // coarse-to-fine order finds blocking midpoints early
        let mut stride = n;
        while stride > 1 {
            let half = stride / 2;
            let mut i = half;
            while i < n {
                let x = self.space.interp(a, b, i as f64 / n as f64);
                if !self.is_valid(&x) {
                    return false;
                }
                i += stride;
            }
            stride = half;
        }
        true
    }

    /// Signed workspace distance from the robot to the nearest obstacle or
    /// workspace wall; negative when penetrating.
    pub fn clearance(&self, x: &State) -> f64 {
        match self.pose(x) {
            Posed::Ball { center, dim, radius } => {
                let p = &center[..dim];
                let walls = self.workspace.margin(p, radius);
                self.obstacles.iter().map(|o| o.point_sdf(p) - radius).fold(walls, f64::min)
            }
            Posed::Shapes(shapes) => {
                let mut best = f64::INFINITY;
                for s in &shapes {
                    match s {
                        Convex2::Polygon(v) => {
                            for p in v {
                                best = best.min(self.workspace.margin(p, 0.0));
                            }
                        }
                        Convex2::Disc { center, radius } => best = best.min(self.workspace.margin(center, *radius)),
                    }
                    for o in self.obstacles.iter() {
                        best = best.min(s.signed_distance(o.convex.as_ref().expect("2D obstacle")));
                    }
                }
                best
            }
        }
    }
}

fn ball(position: &[PoseAxis], c: &[f64], radius: f64) -> Posed {
    let mut center = [0.0; 3];
    for (slot, axis) in center.iter_mut().zip(position) {
        *slot = match axis {
            PoseAxis::Coord(i) => c[*i],
            PoseAxis::Fixed(v) => *v,
        };
    }
    Posed::Ball { center, dim: position.len(), radius }
}
