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
//! Benchmark tables and roadmap exports.

mod common;

use approx::assert_relative_eq;
use smlr::bench::{run_benchmark, write_summary_csv, Overrides, PlannerKind, ResultTable, RunStatus, CSV_HEADER};
use smlr::export::{export_graph, export_svg, SvgFigure};
use smlr::{Planner, PlannerConfig};

fn quick() -> Overrides {
    Overrides { max_failures: Some(200), time_limit: Some(10.0), ..Default::default() }
}

#[test]
fn one_row_per_run_and_one_summary_per_planner() {
    let s = common::scenario("square_wall_feasible");
    let seeds: Vec<u64> = (1..=10).collect();
    let report = run_benchmark(&[s], &PlannerKind::ALL, &seeds, &quick());
    assert!(report.errors.is_empty());
    let rows = &report.table.rows;
    assert_eq!(rows.len(), 20);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.planner, PlannerKind::ALL[i / 10]);
        assert_eq!(row.seed, seeds[i % 10]);
        assert_eq!(row.levels.len(), 1);
    }
    let summary = report.table.summary();
    assert_eq!(summary.len(), 2);
    for (row, kind) in summary.iter().zip(PlannerKind::ALL) {
        assert_eq!(row.planner, kind);
        assert_eq!(row.runs, 10);
        assert_eq!(row.feasible + row.infeasible + row.timeout + row.error, 10);
        assert_eq!(row.infeasible, 0);
        let mean = rows.iter().filter(|r| r.planner == kind).map(|r| r.seconds).sum::<f64>() / 10.0;
        assert_relative_eq!(row.mean_seconds, mean, max_relative = 1e-12);
    }
}

#[test]
fn infeasible_scenario_never_reports_a_path() {
    let s = common::scenario("bugtrap2d_infeasible");
    let report = run_benchmark(&[s], &PlannerKind::ALL, &[1, 2, 3], &quick());
    for row in &report.table.rows {
        assert_ne!(row.status, RunStatus::Feasible);
        assert!(row.cost.is_none());
    }
    assert!(report.table.summary().iter().all(|r| r.feasible == 0));
}

#[test]
fn benchmark_is_deterministic_apart_from_timing() {
    let s = common::scenario("torus_band_feasible");
    let strip = |t: ResultTable| {
        t.rows
            .into_iter()
            .map(|mut r| {
                r.seconds = 0.0;
                r
            })
            .collect::<Vec<_>>()
    };
    let a = run_benchmark(std::slice::from_ref(&s), &PlannerKind::ALL, &[4, 5], &quick());
    let b = run_benchmark(std::slice::from_ref(&s), &PlannerKind::ALL, &[4, 5], &quick());
    assert_eq!(strip(a.table), strip(b.table));
}

#[test]
fn setup_failures_become_error_rows() {
    let mut s = common::scenario("square_wall_feasible");
    s.start = s.sequence.finest().space().state(vec![0.5, 0.3]).unwrap();
    let report = run_benchmark(&[s], &[PlannerKind::Smlr], &[1], &quick());
    assert_eq!(report.table.rows[0].status, RunStatus::Error);
    assert_eq!(report.errors.len(), 1);
    assert_eq!(report.table.summary()[0].error, 1);
}

#[test]
fn csv_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let s = common::scenario("torus_band_feasible");
    let report = run_benchmark(&[s], &PlannerKind::ALL, &[1, 2], &quick());
    let path = dir.path().join("results.csv");
    report.table.save(&path).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER.join(","));
    // smlr rows carry two levels, flat rows one
    assert_eq!(text.lines().count(), 1 + 2 * 2 + 2);
    let back = ResultTable::load(&path).unwrap();
    assert_eq!(back, report.table);
    assert_eq!(back.summary(), report.table.summary());

    let mut buf = Vec::new();
    write_summary_csv(&report.table.summary(), &mut buf).unwrap();
    let summary = String::from_utf8(buf).unwrap();
    assert_eq!(summary.lines().count(), 3);
    assert!(summary.lines().nth(1).unwrap().starts_with("torus_band_feasible,smlr,2,"));
}

#[test]
fn malformed_csv_is_rejected() {
    assert!(ResultTable::from_csv("scenario,planner\nx,smlr\n").is_err());
    let bad_status = format!("{}\nx,smlr,1,maybe,0.1,,0,2,0,0,0\n", CSV_HEADER.join(","));
    assert!(ResultTable::from_csv(&bad_status).is_err());
}

#[test]
fn fresh_roadmap_exports_only_the_endpoints() {
    let s = common::scenario("square_wall_feasible");
    let p = Planner::new(&s.sequence, &s.start, &s.goal, PlannerConfig::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (v, e) = export_graph(&p.level(0).roadmap, 0, dir.path()).unwrap();
    assert_eq!(v.file_name().unwrap(), "level0_vertices.txt");
    assert_eq!(std::fs::read_to_string(v).unwrap(), "0 0.1 0.5\n1 0.9 0.5\n");
    assert_eq!(std::fs::read_to_string(e).unwrap(), "");
}

#[test]
fn solved_roadmap_exports_edges_and_figure() {
    let s = common::scenario("square_wall_feasible");
    let mut p = Planner::new(&s.sequence, &s.start, &s.goal, PlannerConfig { seed: 2, ..Default::default() }).unwrap();
    let r = p.run();
    let roadmap = &p.level(0).roadmap;
    let dir = tempfile::tempdir().unwrap();
    let (v, e) = export_graph(roadmap, 0, dir.path().join("nested")).unwrap();
    assert_eq!(std::fs::read_to_string(v).unwrap().lines().count(), roadmap.vertex_count());
    let edges = std::fs::read_to_string(e).unwrap();
    assert_eq!(edges.lines().count(), roadmap.edge_count());
    for line in edges.lines() {
        let f: Vec<f64> = line.split(' ').map(|x| x.parse().unwrap()).collect();
        assert_eq!(f.len(), 3);
        assert!(f[2] > 0.0);
    }
    let svg = dir.path().join("level0.svg");
    export_svg(s.sequence.level(0), roadmap, r.path.as_deref(), &svg).unwrap();
    let text = std::fs::read_to_string(svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    assert!(!text.contains("class=\"wrap\""));
}

#[test]
fn torus_figure_marks_the_wrap() {
    let s = common::scenario("torus_free");
    let mut p = Planner::new(&s.sequence, &s.start, &s.goal, PlannerConfig { seed: 1, ..Default::default() }).unwrap();
    p.activate_level(0);
    while p.level(0).roadmap.edge_count() == 0 {
        p.step();
    }
    let samples: Vec<_> = (0..200).map(|_| p.restriction_sample(1)).collect();
    let mut fig = SvgFigure::new(s.sequence.level(1)).unwrap();
    fig.samples(&samples).endpoints(&s.start, &s.goal);
    let text = fig.render();
    assert_eq!(text.matches("class=\"wrap\"").count(), 4);
    assert_eq!(text.matches("r=\"1.2\"").count(), 200);
    assert!(SvgFigure::new(common::scenario("bugtrap_se2_feasible").sequence.level(1)).is_err());
}
