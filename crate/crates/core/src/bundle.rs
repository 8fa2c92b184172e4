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
//! Product fiber bundles and bundle sequences.
//!
//! A bundle `X -> B` selects B's coordinates inside X's flat coordinate
//! vector; the remaining coordinates form the fiber F. Lifting scatters base
//! and fiber coordinates back into place, so `project(lift(b, f)) == b`
//! holds exactly.

use rand::Rng;

use crate::error::{invalid, Error, Result};
use crate::space::{State, StateSpace};
use crate::validity::LevelValidity;

#[derive(Debug, Clone)]
pub struct FiberBundle {
    bundle_space: StateSpace,
    base_space: StateSpace,
    fiber_space: Option<StateSpace>,
    base_indices: Vec<usize>,
    fiber_indices: Vec<usize>,
}

impl FiberBundle {
    /// Builds the bundle `bundle_space -> base_space` whose base coordinates
    /// sit at `base_indices`. The base space must match the selected
    /// coordinates axis for axis.
    pub fn new(bundle_space: StateSpace, base_space: StateSpace, base_indices: Vec<usize>) -> Result<Self> {
        let n = bundle_space.dimension();
        if base_indices.len() != base_space.dimension() {
            return Err(Error::DimensionMismatch { expected: base_space.dimension(), actual: base_indices.len() });
        }
        let mut seen = vec![false; n];
        for &i in &base_indices {
            if i >= n {
                return Err(invalid(format!("base coordinate index {i} out of range for dimension {n}")));
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(invalid(format!("base coordinate index {i} repeated")));
            }
        }
        let selected = bundle_space.subspace(&base_indices)?.expect("non-empty index set");
        if !selected.equivalent(&base_space) {
            return Err(invalid("base coordinates of the bundle space do not match the base space"));
        }
        let fiber_indices: Vec<usize> = (0..n).filter(|i| !seen[*i]).collect();
        let fiber_space = bundle_space.subspace(&fiber_indices)?;
        Ok(FiberBundle { bundle_space, base_space, fiber_space, base_indices, fiber_indices })
    }

    pub fn bundle_space(&self) -> &StateSpace {
        &self.bundle_space
    }

    pub fn base_space(&self) -> &StateSpace {
        &self.base_space
    }

    /// `None` when the bundle and base have the same dimension.
    pub fn fiber_space(&self) -> Option<&StateSpace> {
        self.fiber_space.as_ref()
    }

    pub fn base_indices(&self) -> &[usize] {
        &self.base_indices
    }

    pub fn fiber_dimension(&self) -> usize {
        self.fiber_indices.len()
    }

    pub fn project(&self, x: &State) -> Result<State> {
        if x.len() != self.bundle_space.dimension() {
            return Err(Error::DimensionMismatch { expected: self.bundle_space.dimension(), actual: x.len() });
        }
        Ok(self.project_unchecked(x))
    }

    pub(crate) fn project_unchecked(&self, x: &State) -> State {
        State::from_vec(self.base_indices.iter().map(|&i| x.coords()[i]).collect())
    }

    /// Fiber coordinates of `x`.
    pub fn fiber_of(&self, x: &State) -> State {
        State::from_vec(self.fiber_indices.iter().map(|&i| x.coords()[i]).collect())
    }

    pub fn lift(&self, b: &State, f: &State) -> Result<State> {
        if b.len() != self.base_indices.len() {
            return Err(Error::DimensionMismatch { expected: self.base_indices.len(), actual: b.len() });
        }
        if f.len() != self.fiber_indices.len() {
            return Err(Error::DimensionMismatch { expected: self.fiber_indices.len(), actual: f.len() });
        }
        let mut coords = vec![0.0; self.bundle_space.dimension()];
        for (&i, &c) in self.base_indices.iter().zip(b.coords()) {
            coords[i] = c;
        }
        for (&i, &c) in self.fiber_indices.iter().zip(f.coords()) {
            coords[i] = c;
        }
        Ok(State::from_vec(coords))
    }

    /// Uniform sample of the fiber. Product bundles have the same fiber over
    /// every base point, so no base point is needed. Empty for a
    /// zero-dimensional fiber.
    pub fn sample_fiber<R: Rng + ?Sized>(&self, rng: &mut R) -> State {
        match &self.fiber_space {
            Some(f) => f.sample_uniform(rng),
            None => State::from_vec(Vec::new()),
        }
    }
}

/// Levels `X_1..X_K` (coarse to fine) with their constraint functions and the
/// bundles linking each level to the one below.
#[derive(Debug, Clone)]
pub struct FiberBundleSequence {
    levels: Vec<LevelValidity>,
    bundles: Vec<FiberBundle>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AdmissibilityReport {
    pub violations: usize,
    pub checked: usize,
}

impl FiberBundleSequence {
    /// `base_indices[k]` places level `k`'s coordinates inside level `k + 1`.
    pub fn new(levels: Vec<LevelValidity>, base_indices: Vec<Vec<usize>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(invalid("a bundle sequence needs at least one level"));
        }
        if base_indices.len() + 1 != levels.len() {
            return Err(Error::DimensionMismatch { expected: levels.len() - 1, actual: base_indices.len() });
        }
        let bundles = base_indices
            .into_iter()
            .enumerate()
            .map(|(k, idx)| FiberBundle::new(levels[k + 1].space().clone(), levels[k].space().clone(), idx))
            .collect::<Result<Vec<_>>>()?;
        Ok(FiberBundleSequence { levels, bundles })
    }

    pub fn single(level: LevelValidity) -> Self {
        FiberBundleSequence { levels: vec![level], bundles: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn levels(&self) -> &[LevelValidity] {
        &self.levels
    }

    pub fn level(&self, k: usize) -> &LevelValidity {
        &self.levels[k]
    }

    pub fn finest(&self) -> &LevelValidity {
        self.levels.last().expect("non-empty sequence")
    }

    /// Bundle with bundle space `X_k` and base `X_{k-1}`, for `k >= 1`.
    pub fn bundle(&self, k: usize) -> Option<&FiberBundle> {
        k.checked_sub(1).and_then(|i| self.bundles.get(i))
    }

    /// Projects a state of the finest level down to level `k`.
    pub fn project_to(&self, x: &State, k: usize) -> Result<State> {
        let top = self.levels.len() - 1;
        if k > top {
            return Err(invalid(format!("level {k} out of range")));
        }
        let mut s = x.clone();
        for j in (k + 1..=top).rev() {
            s = self.bundles[j - 1].project(&s)?;
        }
        Ok(s)
    }

    /// Statistical admissibility check: for every level `k >= 1` draws
    /// `n_samples` uniform states and counts those valid on `X_k` whose
    /// projection is invalid on `X_{k-1}`.
    pub fn check_admissibility<R: Rng + ?Sized>(&self, n_samples: usize, rng: &mut R) -> AdmissibilityReport {
        let mut report = AdmissibilityReport::default();
        for (k, bundle) in self.bundles.iter().enumerate() {
            let (base, top) = (&self.levels[k], &self.levels[k + 1]);
            for _ in 0..n_samples {
                let x = top.space().sample_uniform(rng);
                report.checked += 1;
                if top.is_valid(&x) && !base.is_valid(&bundle.project_unchecked(&x)) {
                    report.violations += 1;
                }
            }
        }
        report
    }
}
