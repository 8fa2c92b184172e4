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
//! On-disk problem definitions.
//!
//! A scenario is a TOML document. Top-level keys must precede the tables:
//!
//! ```toml
//! format_version = 1
//! name = "square_wall_feasible"
//! ground_truth = "feasible"          # or "infeasible"
//! start = [0.1, 0.5]                 # coordinates on the finest level
//! goal = [0.9, 0.5]
//! check_resolution = 0.01            # optional, fraction of the level extent
//!
//! [workspace]
//! lo = [0.0, 0.0]
//! hi = [1.0, 1.0]
//!
//! [[obstacles]]
//! type = "box"                       # box | disc | polygon
//! lo = [0.45, 0.0]
//! hi = [0.55, 0.4]
//!
//! [[levels]]                         # coarsest first
//! space = { type = "real_vector", lo = [0.0, 0.0], hi = [1.0, 1.0] }
//! robot = { type = "point", position = [0, 1] }
//!
//! [[levels]]
//! space = { type = "product", children = [
//!     { type = "real_vector", lo = [0.0, 0.0], hi = [1.0, 1.0] },
//!     { type = "circle" },
//! ] }
//! robot = { type = "polygon", x = 0, y = 1, theta = 2, parts = [[[0.0, 0.0], [0.1, 0.0], [0.1, 0.1]]] }
//! base_coords = [0, 1]               # where the previous level sits in this one
//!
//! [planner]                          # optional overrides of the defaults
//! max_failures = 1000
//! ```
//!
//! Robot types: `point` and `disc` (`position` lists state indices or
//! `{ fixed = value }` entries, `disc` adds `radius`), `polygon` (convex CCW
//! `parts` in the body frame posed by `x`, `y` and optional `theta`) and
//! `chain` (root `x`, `y`, relative `joints` and `links` lengths).

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use serde::Deserialize;

use crate::bundle::FiberBundleSequence;
use crate::error::{Error, Result};
use crate::geometry::Vec2;
use crate::planner::PlannerConfig;
use crate::space::{State, StateSpace};
use crate::validity::{LevelValidity, Obstacle, PoseAxis, RobotModel, Workspace, DEFAULT_CHECK_RESOLUTION};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroundTruth {
    Feasible,
    Infeasible,
}

impl GroundTruth {
    pub fn is_feasible(self) -> bool {
        self == GroundTruth::Feasible
    }
}

impl fmt::Display for GroundTruth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroundTruth::Feasible => "feasible",
            GroundTruth::Infeasible => "infeasible",
        })
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    format_version: u32,
    name: String,
    ground_truth: GroundTruth,
    start: Vec<f64>,
    goal: Vec<f64>,
    check_resolution: Option<f64>,
    workspace: WorkspaceSpec,
    #[serde(default)]
    obstacles: Vec<ObstacleSpec>,
    levels: Vec<LevelSpec>,
    #[serde(default)]
    planner: PlannerSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct WorkspaceSpec {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum ObstacleSpec {
    Disc { center: Vec2, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Polygon { vertices: Vec<Vec2> },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelSpec {
    space: SpaceSpec,
    robot: RobotSpec,
    base_coords: Option<Vec<usize>>,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum SpaceSpec {
    RealVector {
        lo: Vec<f64>,
        hi: Vec<f64>,
    },
    Circle,
    Product {
        children: Vec<SpaceSpec>,
        weights: Option<Vec<f64>>,
    },
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(untagged)]
enum PoseSpec {
    Coord(usize),
    Fixed { fixed: f64 },
}

#[derive(Debug, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
enum RobotSpec {
    Point { position: Vec<PoseSpec> },
    Disc { position: Vec<PoseSpec>, radius: f64 },
    Polygon { parts: Vec<Vec<Vec2>>, x: usize, y: usize, theta: Option<usize> },
    Chain { x: usize, y: usize, joints: Vec<usize>, links: Vec<f64> },
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct PlannerSpec {
    max_failures: Option<u64>,
    delta_fraction: Option<f64>,
    eta: Option<u64>,
    stretch: Option<f64>,
    time_limit: Option<f64>,
}

impl SpaceSpec {
    fn build(&self) -> Result<StateSpace> {
        match self {
            SpaceSpec::RealVector { lo, hi } => StateSpace::real_vector(lo.clone(), hi.clone()),
            SpaceSpec::Circle => Ok(StateSpace::circle()),
            SpaceSpec::Product { children, weights } => {
                let children = children.iter().map(SpaceSpec::build).collect::<Result<Vec<_>>>()?;
                match weights {
                    Some(w) => StateSpace::weighted_product(children, w.clone()),
                    None => StateSpace::product(children),
                }
            }
        }
    }
}

impl RobotSpec {
    fn build(&self) -> RobotModel {
        let pose = |p: &[PoseSpec]| -> Vec<PoseAxis> {
            p.iter()
                .map(|a| match *a {
                    PoseSpec::Coord(i) => PoseAxis::Coord(i),
                    PoseSpec::Fixed { fixed } => PoseAxis::Fixed(fixed),
                })
                .collect()
        };
        match self {
            RobotSpec::Point { position } => RobotModel::Point { position: pose(position) },
            RobotSpec::Disc { position, radius } => RobotModel::Disc { position: pose(position), radius: *radius },
            RobotSpec::Polygon { parts, x, y, theta } => {
                RobotModel::RigidPolygon { parts: parts.clone(), x: *x, y: *y, theta: *theta }
            }
            RobotSpec::Chain { x, y, joints, links } => {
                RobotModel::PlanarChain { x: *x, y: *y, joints: joints.clone(), links: links.clone() }
            }
        }
    }
}

impl ObstacleSpec {
    fn build(&self) -> Result<Obstacle> {
        match self {
            ObstacleSpec::Disc { center, radius } => Obstacle::disc(*center, *radius),
            ObstacleSpec::Box { lo, hi } => Obstacle::aabb(lo.clone(), hi.clone()),
            ObstacleSpec::Polygon { vertices } => Obstacle::polygon(vertices.clone()),
        }
    }
}

/// A validated planning problem.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub name: String,
    pub ground_truth: GroundTruth,
    pub sequence: FiberBundleSequence,
    pub start: State,
    pub goal: State,
    /// Planner defaults declared by the file (seed 0).
    pub planner: PlannerConfig,
    pub source: Option<PathBuf>,
}

impl Scenario {
    /// The finest level alone, for single-level planning.
    pub fn flat_sequence(&self) -> FiberBundleSequence {
        FiberBundleSequence::single(self.sequence.finest().clone())
    }

    pub fn dimension(&self) -> usize {
        self.sequence.finest().space().dimension()
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        file.validate()
    }
}

fn violated(invariant: &'static str, detail: impl Into<String>) -> Error {
    Error::Invariant { invariant, detail: detail.into() }
}

fn at_level(level: usize) -> impl Fn(Error) -> Error {
    move |e| Error::AtLevel { level, source: Box::new(e) }
}

impl ScenarioFile {
    fn validate(self) -> Result<Scenario> {
        if self.format_version != FORMAT_VERSION {
            return Err(violated(
                "supported format version",
                format!("got {}, this build reads {}", self.format_version, FORMAT_VERSION),
            ));
        }
        if self.name.trim().is_empty() {
            return Err(violated("non-empty name", "name is blank"));
        }
        if self.levels.is_empty() {
            return Err(violated("at least one level", "no [[levels]] given"));
        }
        let workspace = Arc::new(
            Workspace::new(self.workspace.lo.clone(), self.workspace.hi.clone())
                .map_err(|e| violated("valid workspace", e.to_string()))?,
        );
        let obstacles = self
            .obstacles
            .iter()
            .enumerate()
            .map(|(i, o)| o.build().map_err(|e| violated("valid obstacles", format!("obstacle {i}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let obstacles = Arc::new(obstacles);
        let resolution = self.check_resolution.unwrap_or(DEFAULT_CHECK_RESOLUTION);

        let mut levels = Vec::with_capacity(self.levels.len());
        let mut base_indices = Vec::new();
        for (k, spec) in self.levels.iter().enumerate() {
            let space = spec.space.build().map_err(at_level(k))?;
            let validity = LevelValidity::new(
                space,
                spec.robot.build(),
                Arc::clone(&obstacles),
                Arc::clone(&workspace),
                resolution,
            )
            .map_err(at_level(k))?;
            match (k, &spec.base_coords) {
                (0, Some(_)) => {
                    return Err(violated("coarsest level has no base", "level 0 declares base_coords"));
                }
                (0, None) => {}
                (_, None) => {
                    return Err(violated("refined levels declare base_coords", format!("level {k} has none")));
                }
                (_, Some(idx)) => base_indices.push(idx.clone()),
            }
            levels.push(validity);
        }
        let sequence = FiberBundleSequence::new(levels, base_indices)?;

        let top = sequence.finest().space();
        let k = sequence.len() - 1;
        let mut endpoints = Vec::new();
        for (which, coords) in [("start", &self.start), ("goal", &self.goal)] {
            if coords.len() != top.dimension() {
                return Err(at_level(k)(Error::DimensionMismatch { expected: top.dimension(), actual: coords.len() }));
            }
            let x = top.state(coords.clone()).map_err(|e| {
                let name = if which == "start" { "start within bounds" } else { "goal within bounds" };
                violated(name, e.to_string())
            })?;
            for level in 0..sequence.len() {
                let p = sequence.project_to(&x, level)?;
                if !sequence.level(level).is_valid(&p) {
                    let name = if which == "start" { "start collision-free" } else { "goal collision-free" };
                    return Err(violated(name, format!("{which} {p} is invalid on level {level}")));
                }
            }
            endpoints.push(x);
        }
        let goal = endpoints.pop().expect("goal");
        let start = endpoints.pop().expect("start");

        let defaults = PlannerConfig::default();
        let p = &self.planner;
        let planner = PlannerConfig {
            max_failures: p.max_failures.unwrap_or(defaults.max_failures),
            delta_fraction: p.delta_fraction.unwrap_or(defaults.delta_fraction),
            eta: p.eta.unwrap_or(defaults.eta),
            stretch: p.stretch.unwrap_or(defaults.stretch),
            time_limit: p.time_limit.unwrap_or(defaults.time_limit),
            ..defaults
        };
        planner.validate().map_err(|e| violated("valid planner defaults", e.to_string()))?;

        Ok(Scenario { name: self.name, ground_truth: self.ground_truth, sequence, start, goal, planner, source: None })
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
    let mut scenario: Scenario = text.parse().map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })?;
    scenario.source = Some(path.to_path_buf());
    Ok(scenario)
}

/// Loads every `*.toml` file of a directory, sorted by file name.
pub fn load_dir(dir: impl AsRef<Path>) -> Result<Vec<Scenario>> {
    let dir = dir.as_ref();
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| Error::Parse(format!("cannot read {}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    paths.iter().map(load_scenario).collect()
}
