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
//! Property tests over random inputs.

use std::sync::Arc;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smlr::bench::{PlannerKind, ResultTable, RunRow, RunStatus};
use smlr::planner::LevelStats;
use smlr::{AddOutcome, FiberBundle, LevelValidity, Obstacle, PoseAxis, RobotModel, SparseRoadmap, State, StateSpace, Workspace};

fn se2() -> StateSpace {
    StateSpace::weighted_product(
        vec![StateSpace::real_vector(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(), StateSpace::circle()],
        vec![1.0, 0.3],
    )
    .unwrap()
}

fn torus() -> StateSpace {
    StateSpace::product(vec![StateSpace::circle(), StateSpace::circle()]).unwrap()
}

fn se2_state() -> impl Strategy<Value = State> {
    (0.0..1.0f64, 0.0..1.0f64, -10.0..10.0f64).prop_map(|(x, y, t)| se2().state(vec![x, y, t]).unwrap())
}

fn torus_state() -> impl Strategy<Value = State> {
    (-7.0..7.0f64, -7.0..7.0f64).prop_map(|(a, b)| torus().state(vec![a, b]).unwrap())
}

fn cluttered_plane() -> LevelValidity {
    let space = StateSpace::real_vector(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
    let robot = RobotModel::Disc { position: vec![PoseAxis::Coord(0), PoseAxis::Coord(1)], radius: 0.02 };
    let obstacles = vec![
        Obstacle::aabb(vec![0.3, 0.0], vec![0.35, 0.6]).unwrap(),
        Obstacle::disc([0.7, 0.6], 0.12).unwrap(),
        Obstacle::polygon(vec![[0.5, 0.8], [0.7, 0.9], [0.5, 0.95]]).unwrap(),
    ];
    let ws = Workspace::new(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
    LevelValidity::new(space, robot, Arc::new(obstacles), Arc::new(ws), 0.01).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn metric_axioms(a in se2_state(), b in se2_state(), c in se2_state()) {
        let s = se2();
        let ab = s.dist(&a, &b);
        prop_assert!(ab >= 0.0);
        prop_assert!((ab - s.dist(&b, &a)).abs() <= 1e-12);
        prop_assert!(s.dist(&a, &a) == 0.0);
        prop_assert!(s.dist(&a, &c) <= ab + s.dist(&b, &c) + 1e-9);
    }

    #[test]
    fn interpolation_is_proportional(a in torus_state(), b in torus_state(), t in 0.0..1.0f64) {
        let s = torus();
        let m = s.interp(&a, &b, t);
        let d = s.dist(&a, &b);
        prop_assert!((s.dist(&a, &m) - t * d).abs() <= 1e-9);
        prop_assert!((s.dist(&m, &b) - (1.0 - t) * d).abs() <= 1e-9);
        prop_assert!(s.contains(&m));
    }

    #[test]
    fn segment_distance_matches_dense_search(x in se2_state(), a in se2_state(), b in se2_state()) {
        let s = se2();
        let exact = s.distance_to_segment(&x, &a, &b);
        let dense = (0..=2000).map(|i| s.dist(&x, &s.interp(&a, &b, i as f64 / 2000.0))).fold(f64::INFINITY, f64::min);
        prop_assert!(exact <= dense + 1e-9);
        prop_assert!(dense - exact <= 2e-3 * s.dist(&a, &b) + 1e-9);
    }

    #[test]
    fn lift_inverts_projection(x in se2_state()) {
        let b = FiberBundle::new(se2(), StateSpace::real_vector(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap(), vec![0, 1]).unwrap();
        let base = b.project(&x).unwrap();
        prop_assert_eq!(b.lift(&base, &b.fiber_of(&x)).unwrap(), x);
    }

    #[test]
    fn projection_is_lipschitz(x in se2_state(), y in se2_state()) {
        let base = StateSpace::real_vector(vec![0.0, 0.0], vec![1.0, 1.0]).unwrap();
        let b = FiberBundle::new(se2(), base.clone(), vec![0, 1]).unwrap();
        prop_assert!(base.dist(&b.project(&x).unwrap(), &b.project(&y).unwrap()) <= se2().dist(&x, &y) + 1e-12);
    }

    #[test]
    fn motion_check_is_symmetric(ax in 0.0..1.0f64, ay in 0.0..1.0f64, bx in 0.0..1.0f64, by in 0.0..1.0f64) {
        let v = cluttered_plane();
        let a = State::from_vec(vec![ax, ay]);
        let b = State::from_vec(vec![bx, by]);
        prop_assert_eq!(v.motion_valid(&a, &b), v.motion_valid(&b, &a));
        // a finer check never accepts what a coarser one rejects
        if v.motion_valid_at(&a, &b, 0.005) {
            prop_assert!(v.motion_valid_at(&a, &b, 0.01));
        }
    }

    #[test]
    fn near_samples_stay_in_ball(c in se2_state(), r in 0.001..0.5f64, seed in any::<u64>()) {
        let s = se2();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..20 {
            let x = s.sample_uniform_near(&c, r, &mut rng);
            prop_assert!(s.contains(&x));
            prop_assert!(s.dist(&c, &x) <= r);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Drives a roadmap with random samples and checks the bookkeeping
    /// invariants after every call.
    #[test]
    fn roadmap_invariants(seed in any::<u64>()) {
        let v = cluttered_plane();
        let mut g = SparseRoadmap::new(v.space().clone(), 0.2, 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..300 {
            let q = v.space().sample_uniform(&mut rng);
            if !v.is_valid(&q) {
                continue;
            }
            let (nv, ne, m) = (g.vertex_count(), g.edge_count(), g.consecutive_failures());
            let out = g.add_conditional(&q, &v);
            if out == AddOutcome::Rejected {
                prop_assert_eq!((g.vertex_count(), g.edge_count()), (nv, ne));
                prop_assert_eq!(g.consecutive_failures(), m + 1);
            } else {
                prop_assert!(g.vertex_count() > nv || g.edge_count() > ne);
                prop_assert_eq!(g.consecutive_failures(), 0);
            }
            if out == AddOutcome::AddedCoverage {
                let id = g.vertex_count() - 1;
                let others = g.visible_guards(&q, &v);
                prop_assert_eq!(others, vec![id]);
            }
            prop_assert!(g.components_consistent());
        }
        for e in g.edges() {
            prop_assert!(v.motion_valid(&g.guards()[e.u], &g.guards()[e.w]));
            prop_assert_eq!(e.length, v.space().dist(&g.guards()[e.u], &g.guards()[e.w]));
        }
    }
}

fn status() -> impl Strategy<Value = RunStatus> {
    prop_oneof![Just(RunStatus::Feasible), Just(RunStatus::Infeasible), Just(RunStatus::Timeout), Just(RunStatus::Error)]
}

fn run_row() -> impl Strategy<Value = RunRow> {
    (
        "[a-z_,\" ]{1,12}",
        any::<bool>(),
        any::<u64>(),
        status(),
        0.0..100.0f64,
        proptest::option::of(0.0..1e3f64),
        proptest::collection::vec((0usize..1000, 0usize..5000, any::<u32>(), 0.0..1.0f64), 0..4),
    )
        .prop_map(|(scenario, smlr, seed, status, seconds, cost, levels)| RunRow {
            scenario,
            planner: if smlr { PlannerKind::Smlr } else { PlannerKind::Flat },
            seed,
            status,
            seconds,
            cost,
            levels: levels
                .into_iter()
                .map(|(vertices, edges, failures, coverage)| LevelStats { vertices, edges, failures: failures as u64, coverage })
                .collect(),
        })
}

proptest! {
    #[test]
    fn csv_round_trips(rows in proptest::collection::vec(run_row(), 0..8)) {
        // distinct seeds keep adjacent rows of one run apart
        let rows: Vec<RunRow> = rows.into_iter().enumerate().map(|(i, mut r)| { r.seed = i as u64; r }).collect();
        let table = ResultTable { rows };
        prop_assert_eq!(ResultTable::from_csv(&table.to_csv()).unwrap(), table);
    }
}
