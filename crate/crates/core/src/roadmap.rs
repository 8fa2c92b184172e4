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
//! Incremental sparse roadmap spanner.
//!
//! A sample is admitted only if it passes one of four tests, tried in order:
//! coverage, connectivity, interface and quality (shortcut). Every rejected
//! sample bumps the consecutive-failure counter `M_k`; any admission resets
//! it. The counter doubles as a coverage estimate `1 - 1/M_k`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashSet};

use rand::Rng;

use crate::error::{Error, Result};
use crate::space::{State, StateSpace};
use crate::union_find::UnionFind;
use crate::validity::LevelValidity;

pub type GuardId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AddOutcome {
    AddedCoverage,
    AddedConnectivity,
    AddedInterfaceVertex,
    AddedInterfaceEdge,
    AddedQuality,
    Rejected,
}

impl AddOutcome {
    pub fn is_addition(self) -> bool {
        self != AddOutcome::Rejected
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: GuardId,
    pub w: GuardId,
    pub length: f64,
}

#[derive(Debug, Clone)]
pub struct SparseRoadmap {
    space: StateSpace,
    guards: Vec<State>,
    adjacency: Vec<Vec<(GuardId, f64)>>,
    edges: Vec<Edge>,
    cumulative: Vec<f64>,
    components: UnionFind,
    delta: f64,
    stretch: f64,
    consecutive_failures: u64,
    total_additions: u64,
}

#[derive(Clone, Copy, PartialEq)]
struct HeapItem {
    cost: f64,
    id: GuardId,
}

impl Eq for HeapItem {}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        // min-heap on cost, then on id
        other.cost.total_cmp(&self.cost).then_with(|| other.id.cmp(&self.id))
    }
}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl SparseRoadmap {
    pub fn new(space: StateSpace, delta: f64, stretch: f64) -> Self {
        SparseRoadmap {
            space,
            guards: Vec::new(),
            adjacency: Vec::new(),
            edges: Vec::new(),
            cumulative: Vec::new(),
            components: UnionFind::new(),
            delta,
            stretch,
            consecutive_failures: 0,
            total_additions: 0,
        }
    }

    pub fn space(&self) -> &StateSpace {
        &self.space
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn stretch(&self) -> f64 {
        self.stretch
    }

    pub fn guards(&self) -> &[State] {
        &self.guards
    }

    pub fn guard(&self, id: GuardId) -> Result<&State> {
        self.guards.get(id).ok_or(Error::UnknownGuard(id))
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.guards.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn neighbors(&self, id: GuardId) -> &[(GuardId, f64)] {
        &self.adjacency[id]
    }

    pub fn consecutive_failures(&self) -> u64 {
        self.consecutive_failures
    }

    pub fn total_additions(&self) -> u64 {
        self.total_additions
    }

    /// Counts a sample that never reached the admission tests (e.g. an
    /// invalid state) as a failure.
    pub fn record_failure(&mut self) {
        self.consecutive_failures += 1;
    }

    /// Probabilistic estimate `1 - 1/M_k` of the covered free space.
    pub fn coverage_estimate(&self) -> f64 {
        coverage_estimate(self.consecutive_failures)
    }

    /// Inserts a guard unconditionally.
    pub fn add_guard(&mut self, q: State) -> GuardId {
        let id = self.guards.len();
        self.guards.push(q);
        self.adjacency.push(Vec::new());
        self.components.push();
        id
    }

    /// Inserts an edge unconditionally; the caller guarantees the straight
    /// motion between the guards is valid.
    pub fn add_edge(&mut self, u: GuardId, w: GuardId) -> Result<()> {
        if u >= self.guards.len() {
            return Err(Error::UnknownGuard(u));
        }
        if w >= self.guards.len() {
            return Err(Error::UnknownGuard(w));
        }
        if u == w || self.has_edge(u, w) {
            return Ok(());
        }
        let length = self.space.dist(&self.guards[u], &self.guards[w]);
        self.adjacency[u].push((w, length));
        self.adjacency[w].push((u, length));
        self.edges.push(Edge { u, w, length });
        let total = self.cumulative.last().copied().unwrap_or(0.0) + length;
        self.cumulative.push(total);
        self.components.union(u, w);
        Ok(())
    }

    pub fn has_edge(&self, u: GuardId, w: GuardId) -> bool {
        self.adjacency[u].iter().any(|&(v, _)| v == w)
    }

    fn share_neighbor(&self, u: GuardId, w: GuardId) -> bool {
        self.adjacency[u].iter().any(|&(v, _)| self.has_edge(v, w))
    }

    pub fn same_component(&self, u: GuardId, w: GuardId) -> bool {
        self.components.connected(u, w)
    }

    /// Guards within `delta` of `q` that `q` can reach by a valid straight
    /// motion, nearest first (ties by smaller id).
    pub fn visible_guards(&self, q: &State, validity: &LevelValidity) -> Vec<GuardId> {
        self.visible_with_distance(q, validity).into_iter().map(|(id, _)| id).collect()
    }

    fn visible_with_distance(&self, q: &State, validity: &LevelValidity) -> Vec<(GuardId, f64)> {
        let mut near: Vec<(GuardId, f64)> = self
            .guards
            .iter()
            .enumerate()
            .filter_map(|(id, g)| {
                let d = self.space.dist(q, g);
                (d <= self.delta).then_some((id, d))
            })
            .collect();
        near.sort_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        near.retain(|&(id, _)| validity.motion_valid(q, &self.guards[id]));
        near
    }

    /// Runs the four admission tests on a valid sample `q` and applies the
    /// first one that fires.
    pub fn add_conditional(&mut self, q: &State, validity: &LevelValidity) -> AddOutcome {
        let visible = self.visible_with_distance(q, validity);
        let outcome = self.admit(q, &visible, validity);
        if outcome.is_addition() {
            self.consecutive_failures = 0;
            self.total_additions += 1;
        } else {
            self.consecutive_failures += 1;
        }
        outcome
    }

    fn admit(&mut self, q: &State, visible: &[(GuardId, f64)], validity: &LevelValidity) -> AddOutcome {
        // coverage
        if visible.is_empty() {
            self.add_guard(q.clone());
            return AddOutcome::AddedCoverage;
        }

        // connectivity: nearest visible guard of every distinct component
        let mut reps: Vec<GuardId> = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        for &(g, _) in visible {
            let r = self.components.find(g);
            if !roots.contains(&r) {
                roots.push(r);
                reps.push(g);
            }
        }
        if reps.len() >= 2 {
            let id = self.add_guard(q.clone());
            for g in reps {
                self.add_edge(id, g).expect("known guards");
            }
            return AddOutcome::AddedConnectivity;
        }

        // interface: two visible guards without a direct edge
        for i in 0..visible.len() {
            for j in i + 1..visible.len() {
                let (u, w) = (visible[i].0, visible[j].0);
                if self.has_edge(u, w) {
                    continue;
                }
                if self.space.dist(&self.guards[u], &self.guards[w]) > 2.0 * self.delta {
                    continue;
                }
                if validity.motion_valid(&self.guards[u], &self.guards[w]) {
                    self.add_edge(u, w).expect("known guards");
                    return AddOutcome::AddedInterfaceEdge;
                }
                // an earlier interface vertex already links this pair
                if self.share_neighbor(u, w) {
                    continue;
                }
                let id = self.add_guard(q.clone());
                self.add_edge(id, u).expect("known guards");
                self.add_edge(id, w).expect("known guards");
                return AddOutcome::AddedInterfaceVertex;
            }
        }

        // quality: q proves a path between two visible guards that beats the
        // roadmap by more than the stretch factor
        for i in 0..visible.len() {
            let (u, du) = visible[i];
            let limit = self.stretch * (du + visible[i + 1..].iter().map(|v| v.1).fold(0.0, f64::max));
            let dist = self.dijkstra(u, None, limit).0;
            for &(w, dw) in &visible[i + 1..] {
                if dist[w] > self.stretch * (du + dw) {
                    let id = self.add_guard(q.clone());
                    self.add_edge(id, u).expect("known guards");
                    self.add_edge(id, w).expect("known guards");
                    return AddOutcome::AddedQuality;
                }
            }
        }
        AddOutcome::Rejected
    }

    /// Single-source shortest paths. Nodes farther than `limit` are left at
    /// infinity. Equal-cost predecessors resolve to the smaller id.
    fn dijkstra(
        &self,
        src: GuardId,
        blocked: Option<&HashSet<(GuardId, GuardId)>>,
        limit: f64,
    ) -> (Vec<f64>, Vec<Option<GuardId>>) {
        let n = self.guards.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut pred = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[src] = 0.0;
        heap.push(HeapItem { cost: 0.0, id: src });
        while let Some(HeapItem { cost, id }) = heap.pop() {
            if done[id] {
                continue;
            }
            if cost > limit {
                dist[id] = f64::INFINITY;
                for (d, fin) in dist.iter_mut().zip(&done) {
                    if !fin {
                        *d = f64::INFINITY;
                    }
                }
                break;
            }
            done[id] = true;
            for &(v, len) in &self.adjacency[id] {
                if done[v] || blocked.is_some_and(|b| b.contains(&ordered(id, v))) {
                    continue;
                }
                let c = cost + len;
                let better = c < dist[v] || (c == dist[v] && pred[v].is_some_and(|p| id < p));
                if better {
                    dist[v] = c;
                    pred[v] = Some(id);
                    heap.push(HeapItem { cost: c, id: v });
                }
            }
        }
        (dist, pred)
    }

    /// Minimum-length guard path between `u` and `v`.
    pub fn shortest_graph_path(&self, u: GuardId, v: GuardId) -> Result<Option<(Vec<GuardId>, f64)>> {
        self.shortest_path_avoiding(u, v, &HashSet::new())
    }

    /// Like [`SparseRoadmap::shortest_graph_path`] but ignoring the given
    /// edges (stored as ordered pairs).
    pub fn shortest_path_avoiding(
        &self,
        u: GuardId,
        v: GuardId,
        blocked: &HashSet<(GuardId, GuardId)>,
    ) -> Result<Option<(Vec<GuardId>, f64)>> {
        self.guard(u)?;
        self.guard(v)?;
        if !self.components.connected(u, v) {
            return Ok(None);
        }
        let (dist, pred) = self.dijkstra(u, Some(blocked), f64::INFINITY);
        if !dist[v].is_finite() {
            return Ok(None);
        }
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = pred[cur] {
            path.push(p);
            cur = p;
        }
        path.reverse();
        Ok(Some((path, dist[v])))
    }

    /// Shortest roadmap path between two guards, as states.
    pub fn solution_query(&self, start: GuardId, goal: GuardId) -> Option<Vec<State>> {
        let (ids, _) = self.shortest_graph_path(start, goal).ok()??;
        Some(ids.into_iter().map(|id| self.guards[id].clone()).collect())
    }

    /// Draws a point uniformly (by length) on the union of edge images.
    pub fn sample_on_edges<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<State> {
        let total = *self.cumulative.last()?;
        let idx = if total > 0.0 {
            let r = rng.gen::<f64>() * total;
            self.cumulative.partition_point(|&c| c <= r).min(self.edges.len() - 1)
        } else {
            rng.gen_range(0..self.edges.len())
        };
        let e = self.edges[idx];
        let s = rng.gen::<f64>();
        Some(self.space.interp(&self.guards[e.u], &self.guards[e.w], s))
    }

    /// Distance from `x` to the nearest edge image; isolated guards count as
    /// degenerate edges. Infinite for an empty roadmap.
    pub fn distance_to_graph(&self, x: &State) -> f64 {
        let mut best = f64::INFINITY;
        for e in &self.edges {
            best = best.min(self.space.distance_to_segment(x, &self.guards[e.u], &self.guards[e.w]));
        }
        for (id, g) in self.guards.iter().enumerate() {
            if self.adjacency[id].is_empty() {
                best = best.min(self.space.dist(x, g));
            }
        }
        best
    }

    /// True when the union-find components agree with a from-scratch
    /// traversal of the edges.
    pub fn components_consistent(&self) -> bool {
        let n = self.guards.len();
        let mut label = vec![usize::MAX; n];
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = s;
            while let Some(x) = stack.pop() {
                for &(y, _) in &self.adjacency[x] {
                    if label[y] == usize::MAX {
                        label[y] = s;
                        stack.push(y);
                    }
                }
            }
        }
        (0..n).all(|a| (0..n).all(|b| (label[a] == label[b]) == self.components.connected(a, b)))
    }
}

pub(crate) fn ordered(a: GuardId, b: GuardId) -> (GuardId, GuardId) {
    if a <= b {
        (a, b)
    } else {
        (b, a)
    }
}

/// `1 - 1/max(M, 1)`.
pub fn coverage_estimate(consecutive_failures: u64) -> f64 {
    1.0 - 1.0 / consecutive_failures.max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::validity::{Obstacle, PoseAxis, RobotModel, Workspace};
    use approx::assert_abs_diff_eq;
    use std::sync::Arc;

    fn plane(obstacles: Vec<Obstacle>) -> LevelValidity {
        let space = StateSpace::real_vector(vec![0.0, 0.0], vec![4.0, 4.0]).unwrap();
        let ws = Arc::new(Workspace::new(vec![0.0, 0.0], vec![4.0, 4.0]).unwrap());
        let robot = RobotModel::Point { position: vec![PoseAxis::Coord(0), PoseAxis::Coord(1)] };
        LevelValidity::new(space, robot, Arc::new(obstacles), ws, 0.001).unwrap()
    }

    fn st(x: f64, y: f64) -> State {
        State::from_vec(vec![x, y])
    }

    fn roadmap(v: &LevelValidity, delta: f64) -> SparseRoadmap {
        SparseRoadmap::new(v.space().clone(), delta, 3.0)
    }

    #[test]
    fn visibility() {
        let v = plane(vec![]);
        let mut g = roadmap(&v, 1.0);
        assert!(g.visible_guards(&st(1.0, 1.0), &v).is_empty());
        g.add_guard(st(1.0, 1.0));
        assert_eq!(g.visible_guards(&st(1.5, 1.0), &v), vec![0]);

        let walled = plane(vec![Obstacle::aabb(vec![1.2, 0.0], vec![1.3, 4.0]).unwrap()]);
        let mut h = roadmap(&walled, 1.0);
        h.add_guard(st(1.0, 1.0));
        assert!(h.visible_guards(&st(1.5, 1.0), &walled).is_empty());
    }

    #[test]
    fn coverage_on_empty_graph() {
        let v = plane(vec![]);
        let mut g = roadmap(&v, 1.0);
        assert_eq!(g.add_conditional(&st(2.0, 2.0), &v), AddOutcome::AddedCoverage);
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.consecutive_failures(), 0);
    }

    #[test]
    fn connectivity_merges_two_components() {
        let v = plane(vec![]);
        let mut g = roadmap(&v, 1.0);
        g.add_guard(st(1.0, 2.0));
        g.add_guard(st(2.5, 2.0));
        assert!(!g.same_component(0, 1));
        assert_eq!(g.add_conditional(&st(1.75, 2.0), &v), AddOutcome::AddedConnectivity);
        assert_eq!(g.edge_count(), 2);
        assert!(g.same_component(0, 1));
        assert!(g.components_consistent());
    }

    #[test]
    fn lone_guard_rejects() {
        let v = plane(vec![]);
        let mut g = roadmap(&v, 1.0);
        g.add_guard(st(2.0, 2.0));
        assert_eq!(g.add_conditional(&st(2.5, 2.0), &v), AddOutcome::Rejected);
        assert_eq!(g.consecutive_failures(), 1);
        assert_eq!(g.vertex_count(), 1);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn interface_edge_between_mutually_visible_guards() {
        let v = plane(vec![]);
        let mut g = roadmap(&v, 1.0);
        let a = g.add_guard(st(1.0, 2.0));
        let b = g.add_guard(st(2.5, 2.0));
        let c = g.add_guard(st(1.75, 3.0));
        g.add_edge(a, c).unwrap();
        g.add_edge(b, c).unwrap();
        // q sees a and b (same component, no direct edge)
        assert_eq!(g.add_conditional(&st(1.75, 2.0), &v), AddOutcome::AddedInterfaceEdge);
        assert!(g.has_edge(a, b));
        assert_eq!(g.vertex_count(), 3);
    }

    #[test]
    fn interface_vertex_when_guards_blocked() {
        // a thin pillar between a and b blocks their direct motion but not q
        let v = plane(vec![Obstacle::aabb(vec![1.7, 2.3], vec![1.8, 2.6]).unwrap()]);
        let mut g = roadmap(&v, 1.0);
        let a = g.add_guard(st(1.0, 2.5));
        let b = g.add_guard(st(2.5, 2.5));
        let c = g.add_guard(st(1.0, 3.5));
        let d = g.add_guard(st(2.5, 3.5));
        g.add_edge(a, c).unwrap();
        g.add_edge(c, d).unwrap();
        g.add_edge(d, b).unwrap();
        assert!(!v.motion_valid(g.guard(a).unwrap(), g.guard(b).unwrap()));
        assert_eq!(g.add_conditional(&st(1.75, 2.0), &v), AddOutcome::AddedInterfaceVertex);
        assert_eq!(g.vertex_count(), 5);
        assert!(g.has_edge(4, a) && g.has_edge(4, b));
        // the pair is now linked through the new vertex
        assert_eq!(g.add_conditional(&st(1.75, 1.9), &v), AddOutcome::Rejected);
    }

    #[test]
    fn triangle_shortest_path() {
        // lengths 1, 1, 1.9: the direct edge wins
        let v = plane(vec![]);
        let mut g = roadmap(&v, 1.0);
        let h = (1.0f64 - 0.95 * 0.95).sqrt();
        let a = g.add_guard(st(1.0, 1.0));
        let b = g.add_guard(st(1.95, 1.0 + h));
        let c = g.add_guard(st(2.9, 1.0));
        g.add_edge(a, b).unwrap();
        g.add_edge(b, c).unwrap();
        g.add_edge(a, c).unwrap();
        let (path, cost) = g.shortest_graph_path(a, c).unwrap().unwrap();
        assert_eq!(path, vec![a, c]);
        assert_abs_diff_eq!(cost, 1.9, epsilon = 1e-12);
        let (p, c0) = g.shortest_graph_path(b, b).unwrap().unwrap();
        assert_eq!((p, c0), (vec![b], 0.0));
        let d = g.add_guard(st(3.5, 3.5));
        assert!(g.shortest_graph_path(a, d).unwrap().is_none());
        assert!(matches!(g.shortest_graph_path(a, 99), Err(Error::UnknownGuard(99))));
    }

    #[test]
    fn coverage_estimates() {
        assert_abs_diff_eq!(coverage_estimate(100), 0.99, epsilon = 1e-15);
        assert_abs_diff_eq!(coverage_estimate(1000), 0.999, epsilon = 1e-15);
        assert_eq!(coverage_estimate(1), 0.0);
        assert_eq!(coverage_estimate(0), 0.0);
    }

    #[test]
    fn edge_sampling_lies_on_edges() {
        let v = plane(vec![]);
        let mut g = roadmap(&v, 1.0);
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(2);
        assert!(g.sample_on_edges(&mut rng).is_none());
        let a = g.add_guard(st(1.0, 1.0));
        let b = g.add_guard(st(2.0, 1.0));
        let c = g.add_guard(st(2.0, 3.0));
        g.add_edge(a, b).unwrap();
        g.add_edge(b, c).unwrap();
        let mut on_long = 0;
        for _ in 0..3000 {
            let x = g.sample_on_edges(&mut rng).unwrap();
            assert!(g.distance_to_graph(&x) < 1e-12);
            if x.coords()[0] == 2.0 && x.coords()[1] > 1.0 {
                on_long += 1;
            }
        }
        // the second edge is twice as long
        let frac = on_long as f64 / 3000.0;
        assert!((frac - 2.0 / 3.0).abs() < 0.04, "{frac}");
    }
}
