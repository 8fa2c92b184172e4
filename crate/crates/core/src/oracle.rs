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
//! Brute-force grid oracle for ground-truth feasibility, shortest-path cost
//! and free-space coverage on low-dimensional levels.
//!
//! Every axis is tiled by equal cells no larger than `h` (in metric units);
//! periodic axes wrap. A cell is free when its center is valid, and two free
//! neighbors are linked when the straight motion between their centers is
//! valid. Neighbors are the 8-neighborhood in 2D and the `2n` face neighbors
//! otherwise. Occupancy is only sampled at centers, so results approximate the
//! continuous problem with an error that vanishes as `h -> 0`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, VecDeque};

use crate::error::{invalid, Error, Result};
use crate::roadmap::SparseRoadmap;
use crate::space::{AxisKind, State};
use crate::validity::LevelValidity;

pub const MAX_ORACLE_DIMENSION: usize = 4;

#[derive(Debug, Clone, Copy)]
struct AxisGrid {
    lo: f64,
    cell: f64,
    count: usize,
    periodic: bool,
}

#[derive(Debug, Clone)]
pub struct GridOracle<'a> {
    validity: &'a LevelValidity,
    resolution: f64,
    axes: Vec<AxisGrid>,
    strides: Vec<usize>,
    occupied: Vec<bool>,
    offsets: Vec<Vec<isize>>,
}

#[derive(Clone, Copy, PartialEq)]
struct Item(f64, usize);

impl Eq for Item {}

impl Ord for Item {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Item {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<'a> GridOracle<'a> {
    pub fn new(validity: &'a LevelValidity, resolution: f64) -> Result<Self> {
        let space = validity.space();
        if space.dimension() > MAX_ORACLE_DIMENSION {
            return Err(Error::UnsupportedDimension(space.dimension()));
        }
        if !(resolution > 0.0) {
            return Err(invalid("oracle resolution must be positive"));
        }
        let axes: Vec<AxisGrid> = space
            .axes()
            .iter()
            .map(|a| {
                let span = a.span();
                // cell width h in metric units is h / sqrt(w) in coordinates
                let width = resolution / a.weight.sqrt();
                let count = (span / width).ceil().max(1.0) as usize;
                AxisGrid {
                    lo: a.lower(),
                    cell: span / count as f64,
                    count,
                    periodic: matches!(a.kind, AxisKind::Periodic),
                }
            })
            .collect();
        let mut strides = vec![1; axes.len()];
        for i in 1..axes.len() {
            strides[i] = strides[i - 1] * axes[i - 1].count;
        }
        let total: usize = axes.iter().map(|a| a.count).product();
        let n = axes.len();
        let offsets = if n == 2 {
            let mut v = Vec::new();
            for dx in -1..=1isize {
                for dy in -1..=1isize {
                    if dx != 0 || dy != 0 {
                        v.push(vec![dx, dy]);
                    }
                }
            }
            v
        } else {
            (0..n)
                .flat_map(|i| {
                    [-1isize, 1].into_iter().map(move |s| {
                        let mut o = vec![0; n];
                        o[i] = s;
                        o
                    })
                })
                .collect()
        };
        let mut oracle = GridOracle { validity, resolution, axes, strides, occupied: Vec::new(), offsets };
        oracle.occupied = (0..total).map(|c| !validity.is_valid(&oracle.center(c))).collect();
        Ok(oracle)
    }

    pub fn resolution(&self) -> f64 {
        self.resolution
    }

    pub fn cell_count(&self) -> usize {
        self.occupied.len()
    }

    pub fn free_cell_count(&self) -> usize {
        self.occupied.iter().filter(|o| !**o).count()
    }

    pub fn is_free(&self, cell: usize) -> bool {
        !self.occupied[cell]
    }

    fn index(&self, cell: usize, axis: usize) -> usize {
        (cell / self.strides[axis]) % self.axes[axis].count
    }

    pub fn center(&self, cell: usize) -> State {
        State::from_vec(
            self.axes
                .iter()
                .enumerate()
                .map(|(i, a)| a.lo + (self.index(cell, i) as f64 + 0.5) * a.cell)
                .collect(),
        )
    }

    pub fn cell_of(&self, x: &State) -> usize {
        self.axes
            .iter()
            .zip(x.coords())
            .zip(&self.strides)
            .map(|((a, &c), s)| (((c - a.lo) / a.cell).floor().max(0.0) as usize).min(a.count - 1) * s)
            .sum()
    }

    fn neighbors(&self, cell: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.offsets.len());
        'next: for off in &self.offsets {
            let mut id = 0;
            for (i, a) in self.axes.iter().enumerate() {
                let mut j = self.index(cell, i) as isize + off[i];
                if j < 0 || j >= a.count as isize {
                    if !a.periodic {
                        continue 'next;
                    }
                    j = j.rem_euclid(a.count as isize);
                }
                id += j as usize * self.strides[i];
            }
            if id != cell && !out.contains(&id) {
                out.push(id);
            }
        }
        out
    }

    fn linked(&self, a: usize, b: usize) -> bool {
        !self.occupied[b] && self.validity.motion_valid(&self.center(a), &self.center(b))
    }

    fn endpoint_cells(&self, start: &State, goal: &State) -> Result<(usize, usize)> {
        let (s, g) = (self.cell_of(start), self.cell_of(goal));
        if self.occupied[s] {
            return Err(Error::OccupiedCell { which: "start" });
        }
        if self.occupied[g] {
            return Err(Error::OccupiedCell { which: "goal" });
        }
        Ok((s, g))
    }

    /// Breadth-first reachability between the cells of `start` and `goal`.
    pub fn oracle_feasible(&self, start: &State, goal: &State) -> Result<bool> {
        let (s, g) = self.endpoint_cells(start, goal)?;
        let mut seen = vec![false; self.occupied.len()];
        let mut queue = VecDeque::from([s]);
        seen[s] = true;
        while let Some(c) = queue.pop_front() {
            if c == g {
                return Ok(true);
            }
            for n in self.neighbors(c) {
                if !seen[n] && self.linked(c, n) {
                    seen[n] = true;
                    queue.push_back(n);
                }
            }
        }
        Ok(false)
    }

    /// Dijkstra over cell centers, plus the legs from `start` to its cell
    /// center and from the goal cell center to `goal`.
    pub fn oracle_shortest_path(&self, start: &State, goal: &State) -> Result<Option<f64>> {
        let (s, g) = self.endpoint_cells(start, goal)?;
        let space = self.validity.space();
        if s == g {
            return Ok(Some(space.dist(start, goal)));
        }
        let mut dist = vec![f64::INFINITY; self.occupied.len()];
        let mut heap = BinaryHeap::new();
        dist[s] = 0.0;
        heap.push(Item(0.0, s));
        while let Some(Item(d, c)) = heap.pop() {
            if d > dist[c] {
                continue;
            }
            if c == g {
                let cs = self.center(s);
                let cg = self.center(g);
                return Ok(Some(space.dist(start, &cs) + d + space.dist(&cg, goal)));
            }
            let cc = self.center(c);
            for n in self.neighbors(c) {
                if self.occupied[n] {
                    continue;
                }
                let cn = self.center(n);
                let nd = d + space.dist(&cc, &cn);
                if nd < dist[n] && self.validity.motion_valid(&cc, &cn) {
                    dist[n] = nd;
                    heap.push(Item(nd, n));
                }
            }
        }
        Ok(None)
    }

    /// Fraction of free cell centers within `delta` of the roadmap's edge
    /// images (isolated guards count as degenerate edges).
    pub fn coverage_fraction(&self, roadmap: &SparseRoadmap, delta: f64) -> f64 {
        let free = self.free_cell_count();
        if free == 0 || roadmap.vertex_count() == 0 {
            return 0.0;
        }
        let covered = (0..self.occupied.len())
            .filter(|&c| !self.occupied[c] && roadmap.distance_to_graph(&self.center(c)) <= delta)
            .count();
        covered as f64 / free as f64
    }
}
