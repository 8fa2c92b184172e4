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
//! The sparse multilevel roadmap planner.
//!
//! Levels are activated coarse to fine. While the current level is neither
//! solved nor declared infeasible, the planner pops the level with the highest
//! importance `1 / (M_k + 1)` from a priority queue, draws one restriction
//! sample for it, offers the sample to that level's sparse roadmap and pushes
//! the level back with its recomputed importance. Restriction samples on
//! level `k` are lifted from points on (or, with a ramped probability, near)
//! the edges of the roadmap on level `k - 1`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::FiberBundleSequence;
use crate::error::{invalid, Error, Result};
use crate::roadmap::{ordered, AddOutcome, GuardId, SparseRoadmap};
use crate::space::State;
use crate::validity::LevelValidity;

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerConfig {
    /// Consecutive failures `M` after which the current level is declared
    /// infeasible.
    pub max_failures: u64,
    /// Visibility radius as a fraction of each level's maximum extent.
    pub delta_fraction: f64,
    /// Number of restriction samples over which the near-edge bias ramps up.
    pub eta: u64,
    pub stretch: f64,
    /// Seconds.
    pub time_limit: f64,
    pub seed: u64,
    /// Overrides the per-level motion check resolution when set.
    pub check_resolution: Option<f64>,
}

impl Default for PlannerConfig {
    fn default() -> Self {
        PlannerConfig {
            max_failures: 1000,
            delta_fraction: 0.25,
            eta: 1000,
            stretch: 3.0,
            time_limit: 60.0,
            seed: 0,
            check_resolution: None,
        }
    }
}

impl PlannerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_failures < 1 {
            return Err(invalid("M must be at least 1"));
        }
        if !(self.delta_fraction > 0.0 && self.delta_fraction <= 1.0) {
            return Err(invalid("delta fraction must lie in (0, 1]"));
        }
        if self.eta < 1 {
            return Err(invalid("eta must be at least 1"));
        }
        if !(self.stretch > 1.0) {
            return Err(invalid("stretch factor must exceed 1"));
        }
        if !(self.time_limit > 0.0) {
            return Err(invalid("time limit must be positive"));
        }
        if let Some(r) = self.check_resolution {
            if !(r > 0.0 && r <= 1.0) {
                return Err(invalid("check resolution must lie in (0, 1]"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Status {
    Feasible,
    Infeasible,
    Timeout,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Feasible => "feasible",
            Status::Infeasible => "infeasible",
            Status::Timeout => "timeout",
        }
    }
}

/// Planner termination condition for the current level.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Continue,
    Solved,
    Infeasible,
    Timeout,
}

/// Termination precedence: solved, then infeasible (`M_cur > M`), then
/// timeout.
pub fn ptc_decision(connected: bool, failures: u64, max_failures: u64, elapsed: f64, time_limit: f64) -> Termination {
    if connected {
        Termination::Solved
    } else if failures > max_failures {
        Termination::Infeasible
    } else if elapsed > time_limit {
        Termination::Timeout
    } else {
        Termination::Continue
    }
}

/// Linear ramp `delta * min(1, t / eta)`.
pub fn smooth_parameter(t: u64, delta: f64, eta: u64) -> f64 {
    if t >= eta {
        delta
    } else {
        delta * (t as f64 / eta as f64)
    }
}

/// Importance `1 / (M_k + 1)`.
pub fn compute_importance(consecutive_failures: u64) -> f64 {
    1.0 / (consecutive_failures as f64 + 1.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelStats {
    pub vertices: usize,
    pub edges: usize,
    pub failures: u64,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlannerResult {
    pub status: Status,
    /// Level on which the run terminated.
    pub decided_level: usize,
    pub levels: Vec<LevelStats>,
    pub path: Option<Vec<State>>,
    pub cost: Option<f64>,
    pub seconds: f64,
    pub seed: u64,
}

#[derive(Debug, Clone)]
pub struct LevelState {
    pub index: usize,
    pub roadmap: SparseRoadmap,
    pub importance: f64,
    /// Restriction samples drawn for this level so far.
    pub samples: u64,
    pub start: GuardId,
    pub goal: GuardId,
}

/// What one main-loop iteration did.
#[derive(Debug, Clone)]
pub struct StepReport {
    pub level: usize,
    pub sample: State,
    /// `None` when the sample was invalid.
    pub outcome: Option<AddOutcome>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct QueueEntry {
    importance: f64,
    level: usize,
}

impl Eq for QueueEntry {}

impl Ord for QueueEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        // max importance on top; ties prefer the coarser level
        self.importance.total_cmp(&other.importance).then_with(|| other.level.cmp(&self.level))
    }
}

impl PartialOrd for QueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub struct Planner {
    seq: FiberBundleSequence,
    cfg: PlannerConfig,
    levels: Vec<LevelState>,
    queue: BinaryHeap<QueueEntry>,
    rng: ChaCha8Rng,
    current: Option<usize>,
    solutions: Vec<Option<Vec<State>>>,
    blocked: HashSet<(GuardId, GuardId)>,
    stale_at: Option<u64>,
    started: Instant,
}

impl Planner {
    /// Sets up one roadmap per level with the projected start and goal as its
    /// first two guards.
    pub fn new(seq: &FiberBundleSequence, start: &State, goal: &State, cfg: PlannerConfig) -> Result<Self> {
        cfg.validate()?;
        let seq = match cfg.check_resolution {
            Some(r) => {
                let levels = seq.levels().iter().map(|l| l.with_check_resolution(r)).collect::<Result<Vec<_>>>()?;
                let idx = (1..seq.len()).map(|k| seq.bundle(k).expect("bundle").base_indices().to_vec()).collect();
                FiberBundleSequence::new(levels, idx)?
            }
            None => seq.clone(),
        };
        let top = seq.finest().space();
        for (which, x) in [("start", start), ("goal", goal)] {
            if !top.contains(x) {
                return Err(Error::InvalidEndpoint { which, level: seq.len() - 1 });
            }
        }
        let mut levels = Vec::with_capacity(seq.len());
        for k in 0..seq.len() {
            let validity = seq.level(k);
            let s = seq.project_to(start, k)?;
            let g = seq.project_to(goal, k)?;
            if !validity.is_valid(&s) {
                return Err(Error::InvalidEndpoint { which: "start", level: k });
            }
            if !validity.is_valid(&g) {
                return Err(Error::InvalidEndpoint { which: "goal", level: k });
            }
            let space = validity.space().clone();
            let delta = cfg.delta_fraction * space.max_extent();
            let mut roadmap = SparseRoadmap::new(space, delta, cfg.stretch);
            let sid = roadmap.add_guard(s);
            let gid = roadmap.add_guard(g);
            levels.push(LevelState { index: k, roadmap, importance: 1.0, samples: 0, start: sid, goal: gid });
        }
        let rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        Ok(Planner {
            solutions: vec![None; seq.len()],
            seq,
            cfg,
            levels,
            queue: BinaryHeap::new(),
            rng,
            current: None,
            blocked: HashSet::new(),
            stale_at: None,
            started: Instant::now(),
        })
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.cfg
    }

    pub fn sequence(&self) -> &FiberBundleSequence {
        &self.seq
    }

    pub fn levels(&self) -> &[LevelState] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &LevelState {
        &self.levels[k]
    }

    pub fn current_level(&self) -> Option<usize> {
        self.current
    }

    pub fn elapsed(&self) -> f64 {
        self.started.elapsed().as_secs_f64()
    }

    /// Solution path found on level `k`, if any.
    pub fn solution(&self, k: usize) -> Option<&[State]> {
        self.solutions[k].as_deref()
    }

    /// Runs the full main loop.
    pub fn solve(mut self) -> PlannerResult {
        self.run()
    }

    /// Like [`Planner::solve`] but keeps the planner, so its roadmaps can be
    /// inspected afterwards. Call at most once.
    pub fn run(&mut self) -> PlannerResult {
        for cur in 0..self.seq.len() {
            self.activate_level(cur);
            loop {
                match self.ptc() {
                    Termination::Continue => {
                        self.step();
                    }
                    Termination::Solved => break,
                    Termination::Infeasible => return self.finish(Status::Infeasible),
                    Termination::Timeout => return self.finish(Status::Timeout),
                }
            }
        }
        self.finish(Status::Feasible)
    }

    /// Makes `k` the current level: pushes it with importance 1 and runs the
    /// section test against the solution of level `k - 1`.
    pub fn activate_level(&mut self, k: usize) {
        self.current = Some(k);
        self.levels[k].importance = 1.0;
        self.queue.push(QueueEntry { importance: 1.0, level: k });
        if let Some(path) = self.section_test(k) {
            let ids = {
                let lvl = &mut self.levels[k];
                let mut ids = vec![lvl.start];
                for x in &path[1..path.len().saturating_sub(1)] {
                    ids.push(lvl.roadmap.add_guard(x.clone()));
                }
                if path.len() > 1 {
                    ids.push(lvl.goal);
                }
                ids
            };
            for w in ids.windows(2) {
                self.levels[k].roadmap.add_edge(w[0], w[1]).expect("fresh guards");
            }
        }
    }

    /// Termination check for the current level.
    pub fn ptc(&mut self) -> Termination {
        let Some(cur) = self.current else {
            return Termination::Continue;
        };
        let connected = {
            let lvl = &self.levels[cur];
            lvl.roadmap.same_component(lvl.start, lvl.goal)
        } && self.extract_solution(cur);
        let lvl = &self.levels[cur];
        ptc_decision(connected, lvl.roadmap.consecutive_failures(), self.cfg.max_failures, self.elapsed(), self.cfg.time_limit)
    }

    /// Extracts the start-goal path of level `k` into `solutions`. On the
    /// finest level every segment is re-checked at half the planning
    /// resolution; failing edges are excluded and the search repeated.
    fn extract_solution(&mut self, k: usize) -> bool {
        if self.solutions[k].is_some() {
            return true;
        }
        let finest = k + 1 == self.seq.len();
        let stamp = self.levels[k].roadmap.total_additions() + self.levels[k].roadmap.edge_count() as u64;
        if finest && self.stale_at == Some(stamp) {
            return false;
        }
        let none = HashSet::new();
        loop {
            let lvl = &self.levels[k];
            let blocked = if finest { &self.blocked } else { &none };
            let Ok(Some((ids, _))) = lvl.roadmap.shortest_path_avoiding(lvl.start, lvl.goal, blocked) else {
                self.stale_at = Some(stamp);
                return false;
            };
            if finest {
                let validity = self.seq.level(k);
                let half = validity.check_resolution() / 2.0;
                let guards = lvl.roadmap.guards();
                let bad = ids.windows(2).find(|w| !validity.motion_valid_at(&guards[w[0]], &guards[w[1]], half));
                if let Some(w) = bad {
                    let edge = ordered(w[0], w[1]);
                    self.blocked.insert(edge);
                    continue;
                }
            }
            let path = ids.iter().map(|&i| lvl.roadmap.guards()[i].clone()).collect();
            self.solutions[k] = Some(path);
            return true;
        }
    }

    /// One main-loop iteration: pop, sample, offer, re-push.
    pub fn step(&mut self) -> StepReport {
        let top = self.queue.pop().expect("an active level").level;
        let sample = self.restriction_sample(top);
        let validity = self.seq.level(top);
        let lvl = &mut self.levels[top];
        let outcome = if validity.is_valid(&sample) {
            Some(lvl.roadmap.add_conditional(&sample, validity))
        } else {
            lvl.roadmap.record_failure();
            None
        };
        lvl.importance = compute_importance(lvl.roadmap.consecutive_failures());
        self.queue.push(QueueEntry { importance: lvl.importance, level: top });
        StepReport { level: top, sample, outcome }
    }

    /// Draws a sample on level `k`: uniform when there is no base roadmap
    /// with edges, otherwise lifted from a point on a base edge, moved within
    /// the ramped bias radius with probability `bias / delta_base`, and
    /// completed with a uniform fiber sample.
    pub fn restriction_sample(&mut self, k: usize) -> State {
        let t = self.levels[k].samples;
        self.levels[k].samples += 1;
        let space = self.seq.level(k).space();
        if k == 0 || self.levels[k - 1].roadmap.edge_count() == 0 {
            return space.sample_uniform(&mut self.rng);
        }
        let base = &self.levels[k - 1].roadmap;
        let bundle = self.seq.bundle(k).expect("bundle below level k");
        let mut x_base = base.sample_on_edges(&mut self.rng).expect("edges present");
        let delta = base.delta();
        let bias = smooth_parameter(t, delta, self.cfg.eta);
        if self.rng.gen::<f64>() < bias / delta {
            x_base = bundle.base_space().sample_uniform_near(&x_base, bias, &mut self.rng);
        }
        let x_fiber = bundle.sample_fiber(&mut self.rng);
        bundle.lift(&x_base, &x_fiber).expect("matching dimensions")
    }

    /// Simplified section test: lifts the base solution pointwise, with the
    /// fiber moving linearly (shortest arc on circles) from the start's fiber
    /// value to the goal's along normalized base path length. Returns the
    /// lifted path only if all of it is valid.
    pub fn section_test(&self, k: usize) -> Option<Vec<State>> {
        if k == 0 {
            return None;
        }
        let base_path = self.solutions[k - 1].as_ref()?;
        let bundle = self.seq.bundle(k)?;
        let validity = self.seq.level(k);
        let lvl = &self.levels[k];
        let f_start = bundle.fiber_of(&lvl.roadmap.guards()[lvl.start]);
        let f_goal = bundle.fiber_of(&lvl.roadmap.guards()[lvl.goal]);
        let base_space = bundle.base_space();
        let mut along = vec![0.0];
        for w in base_path.windows(2) {
            along.push(along.last().unwrap() + base_space.dist(&w[0], &w[1]));
        }
        let total = *along.last().unwrap();
        let mut lifted = Vec::with_capacity(base_path.len());
        for (b, &s) in base_path.iter().zip(&along) {
            let s = if total > 0.0 { s / total } else { 0.0 };
            let f = match bundle.fiber_space() {
                Some(fs) => fs.interp(&f_start, &f_goal, s),
                None => State::from_vec(Vec::new()),
            };
            lifted.push(bundle.lift(b, &f).ok()?);
        }
        // the last base state is the goal projection; pin the goal fiber
        if let (Some(last), Some(b)) = (lifted.last_mut(), base_path.last()) {
            *last = bundle.lift(b, &f_goal).ok()?;
        }
        if !lifted.iter().all(|x| validity.is_valid(x)) {
            return None;
        }
        if !lifted.windows(2).all(|w| validity.motion_valid(&w[0], &w[1])) {
            return None;
        }
        Some(lifted)
    }

    fn finish(&self, status: Status) -> PlannerResult {
        let seconds = self.elapsed();
        let levels = self
            .levels
            .iter()
            .map(|l| LevelStats {
                vertices: l.roadmap.vertex_count(),
                edges: l.roadmap.edge_count(),
                failures: l.roadmap.consecutive_failures(),
                coverage: l.roadmap.coverage_estimate(),
            })
            .collect();
        let (path, cost) = match status {
            Status::Feasible => {
                let validity = self.seq.finest();
                let path = self
                    .solutions
                    .last()
                    .cloned()
                    .flatten()
                    .map(|p| {
                        let piece = self.cfg.delta_fraction * validity.space().max_extent() / 8.0;
                        shortcut_path(validity, &p, piece, validity.check_resolution() / 2.0)
                    });
                let space = self.seq.finest().space();
                let cost = path.as_ref().map(|p| p.windows(2).map(|w| space.dist(&w[0], &w[1])).sum());
                (path, cost)
            }
            _ => (None, None),
        };
        PlannerResult {
            status,
            decided_level: self.current.unwrap_or(0),
            levels,
            path,
            cost,
            seconds,
            seed: self.cfg.seed,
        }
    }
}

/// Shortens a valid path: segments are first split into pieces no longer
/// than `max_piece`, then from each kept waypoint the farthest later waypoint
/// reachable by a motion valid at `resolution` is taken.
pub fn shortcut_path(validity: &LevelValidity, path: &[State], max_piece: f64, resolution: f64) -> Vec<State> {
    if path.len() < 2 {
        return path.to_vec();
    }
    let space = validity.space();
    let mut dense = vec![path[0].clone()];
    for w in path.windows(2) {
        let pieces = (space.dist(&w[0], &w[1]) / max_piece).ceil().max(1.0) as usize;
        for i in 1..pieces {
            dense.push(space.interp(&w[0], &w[1], i as f64 / pieces as f64));
        }
        dense.push(w[1].clone());
    }
    let mut out = vec![dense[0].clone()];
    let mut i = 0;
    while i + 1 < dense.len() {
        let mut j = dense.len() - 1;
        while j > i + 1 && !validity.motion_valid_at(&dense[i], &dense[j], resolution) {
            j -= 1;
        }
        out.push(dense[j].clone());
        i = j;
    }
    out
}

/// Runs the planner on `seq` from `start` to `goal` (states of the finest
/// level).
pub fn smlr_solve(seq: &FiberBundleSequence, start: &State, goal: &State, cfg: PlannerConfig) -> Result<PlannerResult> {
    Ok(Planner::new(seq, start, goal, cfg)?.solve())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn importance_values() {
        assert_eq!(compute_importance(0), 1.0);
        assert_eq!(compute_importance(99), 0.01);
        assert_eq!(compute_importance(1000), 1.0 / 1001.0);
    }

    #[test]
    fn ramp_values() {
        assert_eq!(smooth_parameter(0, 0.8, 1000), 0.0);
        assert_eq!(smooth_parameter(1000, 0.8, 1000), 0.8);
        assert_eq!(smooth_parameter(5000, 0.8, 1000), 0.8);
        assert_eq!(smooth_parameter(500, 0.8, 1000), 0.4);
        let mut prev = 0.0;
        for t in 0..1100 {
            let b = smooth_parameter(t, 0.8, 1000);
            assert!(b >= prev && b <= 0.8);
            prev = b;
        }
    }

    #[test]
    fn termination_precedence() {
        assert_eq!(ptc_decision(true, 5000, 1000, 100.0, 60.0), Termination::Solved);
        assert_eq!(ptc_decision(false, 1001, 1000, 0.0, 60.0), Termination::Infeasible);
        assert_eq!(ptc_decision(false, 1000, 1000, 0.0, 60.0), Termination::Continue);
        assert_eq!(ptc_decision(false, 1001, 1000, 100.0, 60.0), Termination::Infeasible);
        assert_eq!(ptc_decision(false, 0, 1000, 61.0, 60.0), Termination::Timeout);
        assert_eq!(ptc_decision(false, 0, 1000, 0.5, 60.0), Termination::Continue);
    }

    #[test]
    fn queue_order() {
        let mut q = BinaryHeap::new();
        q.push(QueueEntry { importance: 0.5, level: 1 });
        q.push(QueueEntry { importance: 0.5, level: 0 });
        q.push(QueueEntry { importance: 0.1, level: 2 });
        assert_eq!(q.pop().unwrap().level, 0);
        assert_eq!(q.pop().unwrap().level, 1);
        assert_eq!(q.pop().unwrap().level, 2);
    }

    #[test]
    fn config_validation() {
        assert!(PlannerConfig::default().validate().is_ok());
        let bad = [
            PlannerConfig { max_failures: 0, ..Default::default() },
            PlannerConfig { delta_fraction: 0.0, ..Default::default() },
            PlannerConfig { eta: 0, ..Default::default() },
            PlannerConfig { stretch: 1.0, ..Default::default() },
            PlannerConfig { time_limit: 0.0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err());
        }
    }
}
