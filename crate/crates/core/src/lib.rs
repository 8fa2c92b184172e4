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
//! Sparse multilevel roadmaps.
//!
//! Sparse roadmap spanners grown over a sequence of product fiber bundles of a
//! robot's state space. Lower-dimensional levels are solved first; their
//! roadmaps restrict sampling on the levels above, a priority queue decides
//! which level to grow next, and a consecutive-failure counter terminates a
//! level as probabilistically infeasible.
//!
//! ```
//! use std::sync::Arc;
//! use smlr::{smlr_solve, FiberBundleSequence, LevelValidity, PlannerConfig, PoseAxis, RobotModel, StateSpace, Status, Workspace};
//!
//! let space = StateSpace::real_vector(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
//! let robot = RobotModel::Point { position: vec![PoseAxis::Coord(0), PoseAxis::Coord(1)] };
//! let ws = Arc::new(Workspace::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap());
//! let level = LevelValidity::new(space.clone(), robot, Arc::new(Vec::new()), ws, 0.01).unwrap();
//! let seq = FiberBundleSequence::single(level);
//! let start = space.state(vec![0.1, 0.1]).unwrap();
//! let goal = space.state(vec![0.9, 0.9]).unwrap();
//! let result = smlr_solve(&seq, &start, &goal, PlannerConfig { seed: 1, ..Default::default() }).unwrap();
//! assert_eq!(result.status, Status::Feasible);
//! ```

// negated float comparisons reject NaN on purpose
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod bundle;
pub mod error;
pub mod export;
pub mod geometry;
pub mod oracle;
pub mod planner;
pub mod roadmap;
pub mod scenario;
pub mod space;
pub mod union_find;
pub mod validity;

pub use bundle::{AdmissibilityReport, FiberBundle, FiberBundleSequence};
pub use error::{Error, Result};
pub use oracle::GridOracle;
pub use planner::{
    compute_importance, smlr_solve, smooth_parameter, PlannerConfig, Planner, PlannerResult, Status, Termination,
};
pub use roadmap::{coverage_estimate, AddOutcome, GuardId, SparseRoadmap};
pub use space::{State, StateSpace};
pub use validity::{LevelValidity, Obstacle, PoseAxis, RobotModel, Workspace};
