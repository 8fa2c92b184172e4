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
//! Command-line front end: single runs, benchmarks and grid-oracle checks.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};
use smlr::bench::{run_benchmark, write_summary_csv, Overrides, PlannerKind, ResultTable, RunRow};
use smlr::export::{export_graph, SvgFigure};
use smlr::scenario::{load_dir, load_scenario, Scenario};
use smlr::{GridOracle, Planner};

#[derive(Parser)]
#[command(name = "smlr", version, about = "Sparse multilevel roadmap planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one scenario and optionally export roadmaps and figures.
    Plan {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long, default_value = "smlr")]
        planner: PlannerKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        overrides: OverrideArgs,
        /// Output directory for the result row, graph tables and SVGs.
        #[arg(long, env = "SMLR_OUT_DIR")]
        out: Option<PathBuf>,
    },
    /// Run every scenario of a directory with both planners over a seed range.
    Bench {
        #[arg(long)]
        scenarios: PathBuf,
        /// Inclusive range `a..b` or a comma list.
        #[arg(long, default_value = "1..10", value_parser = parse_seeds)]
        seeds: Seeds,
        #[arg(long, value_delimiter = ',', default_values = ["smlr", "flat"])]
        planners: Vec<PlannerKind>,
        #[command(flatten)]
        overrides: OverrideArgs,
        #[arg(long, env = "SMLR_OUT_DIR", default_value = "smlr_out")]
        out: PathBuf,
    },
    /// Decide a scenario on a grid of the finest level.
    Oracle {
        #[arg(long)]
        scenario: PathBuf,
        /// Cell side length.
        #[arg(long)]
        resolution: f64,
    },
}

#[derive(Args)]
struct OverrideArgs {
    /// Seconds per run.
    #[arg(long)]
    time_limit: Option<f64>,
    /// Consecutive failures before declaring infeasibility.
    #[arg(long = "M")]
    max_failures: Option<u64>,
    #[arg(long)]
    delta_fraction: Option<f64>,
    #[arg(long)]
    eta: Option<u64>,
}

impl OverrideArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            max_failures: self.max_failures,
            delta_fraction: self.delta_fraction,
            eta: self.eta,
            time_limit: self.time_limit,
            ..Default::default()
        }
    }
}

#[derive(Clone)]
struct Seeds(Vec<u64>);

fn parse_seeds(s: &str) -> Result<Seeds, String> {
    parse_seed_list(s).map(Seeds)
}

fn parse_seed_list(s: &str) -> Result<Vec<u64>, String> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|e| format!("bad range start: {e}"))?;
        let b: u64 = b.trim().parse().map_err(|e| format!("bad range end: {e}"))?;
        if a > b {
            return Err(format!("empty seed range {s}"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|x| x.trim().parse::<u64>().map_err(|e| format!("bad seed {x:?}: {e}"))).collect()
}

/// Failures that mean the input was unusable (exit code 2).
struct BadInput(anyhow::Error);

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Plan { scenario, planner, seed, overrides, out } => {
            plan(&scenario, planner, seed, &overrides.overrides(), out.as_deref())
        }
        Command::Bench { scenarios, seeds, planners, overrides, out } => {
            bench(&scenarios, &seeds.0, &planners, &overrides.overrides(), &out)
        }
        Command::Oracle { scenario, resolution } => oracle(&scenario, resolution),
    };
    match outcome {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
        Err(BadInput(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

type Outcome = Result<anyhow::Result<()>, BadInput>;

fn load(path: &Path) -> Result<Scenario, BadInput> {
    load_scenario(path).with_context(|| format!("loading {}", path.display())).map_err(BadInput)
}

fn plan(path: &Path, kind: PlannerKind, seed: u64, overrides: &Overrides, out: Option<&Path>) -> Outcome {
    let scenario = load(path)?;
    let cfg = overrides.apply(&scenario.planner, seed);
    let seq = match kind {
        PlannerKind::Smlr => scenario.sequence.clone(),
        PlannerKind::Flat => scenario.flat_sequence(),
    };
    let mut planner = Planner::new(&seq, &scenario.start, &scenario.goal, cfg).map_err(|e| BadInput(e.into()))?;
    let result = planner.run();
    println!(
        "{} {} seed={} status={} seconds={:.3} level={} cost={}",
        scenario.name,
        kind,
        seed,
        result.status.as_str(),
        result.seconds,
        result.decided_level,
        result.cost.map_or("-".to_string(), |c| format!("{c:.6}"))
    );
    for (k, l) in result.levels.iter().enumerate() {
        println!("  level {k}: vertices={} edges={} failures={} coverage={:.6}", l.vertices, l.edges, l.failures, l.coverage);
    }
    let Some(dir) = out else {
        return Ok(Ok(()));
    };
    Ok(write_plan_outputs(&scenario, kind, &planner, &result, dir))
}

fn write_plan_outputs(
    scenario: &Scenario,
    kind: PlannerKind,
    planner: &Planner,
    result: &smlr::PlannerResult,
    dir: &Path,
) -> anyhow::Result<()> {
    let dir = dir.join(format!("{}_{}_{}", scenario.name, kind, result.seed));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
    let table = ResultTable { rows: vec![RunRow::from_result(&scenario.name, kind, result)] };
    table.save(dir.join("result.csv"))?;
    let seq = planner.sequence();
    for (k, lvl) in planner.levels().iter().enumerate() {
        export_graph(&lvl.roadmap, k, &dir)?;
        let validity = seq.level(k);
        if validity.space().dimension() == 2 {
            let mut fig = SvgFigure::new(validity)?;
            fig.roadmap(&lvl.roadmap);
            if let Some(p) = planner.solution(k) {
                fig.path(p);
            }
            let g = lvl.roadmap.guards();
            fig.endpoints(&g[lvl.start], &g[lvl.goal]);
            fig.save(dir.join(format!("level{k}.svg")))?;
        }
    }
    println!("wrote {}", dir.display());
    Ok(())
}

fn bench(dir: &Path, seeds: &[u64], planners: &[PlannerKind], overrides: &Overrides, out: &Path) -> Outcome {
    let scenarios = load_dir(dir).with_context(|| format!("loading scenarios from {}", dir.display())).map_err(BadInput)?;
    if scenarios.is_empty() {
        return Err(BadInput(anyhow::anyhow!("no .toml scenarios in {}", dir.display())));
    }
    Ok(run_bench(&scenarios, seeds, planners, overrides, out))
}

fn run_bench(
    scenarios: &[Scenario],
    seeds: &[u64],
    planners: &[PlannerKind],
    overrides: &Overrides,
    out: &Path,
) -> anyhow::Result<()> {
    let report = run_benchmark(scenarios, planners, seeds, overrides);
    for e in &report.errors {
        eprintln!("run failed: {e}");
    }
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    report.table.save(out.join("results.csv"))?;
    let summary = report.table.summary();
    let file = std::fs::File::create(out.join("summary.csv"))?;
    write_summary_csv(&summary, file)?;
    println!("{:<28} {:<6} {:>10} {:>12}", "scenario", "plan", "mean [s]", "f|i|t");
    for s in &summary {
        println!("{:<28} {:<6} {:>10.3} {:>12}", s.scenario, s.planner, s.mean_seconds, s.counts());
    }
    let truth_mismatch: Vec<String> = report
        .table
        .rows
        .iter()
        .filter(|r| {
            let declared = scenarios.iter().find(|s| s.name == r.scenario).map(|s| s.ground_truth);
            declared.is_some_and(|g| !g.is_feasible()) && r.status == smlr::bench::RunStatus::Feasible
        })
        .map(|r| format!("{} {} seed {}", r.scenario, r.planner, r.seed))
        .collect();
    if !truth_mismatch.is_empty() {
        bail!("feasible verdicts on infeasible scenarios: {}", truth_mismatch.join(", "));
    }
    println!("wrote {}", out.display());
    Ok(())
}

fn oracle(path: &Path, resolution: f64) -> Outcome {
    let scenario = load(path)?;
    let level = scenario.sequence.finest();
    let grid = GridOracle::new(level, resolution).map_err(|e| BadInput(e.into()))?;
    let cost = grid.oracle_shortest_path(&scenario.start, &scenario.goal).map_err(|e| BadInput(e.into()))?;
    let verdict = if cost.is_some() { "feasible" } else { "infeasible" };
    println!(
        "{} oracle={} declared={} cells={} free={} cost={}",
        scenario.name,
        verdict,
        scenario.ground_truth,
        grid.cell_count(),
        grid.free_cell_count(),
        cost.map_or("-".to_string(), |c| format!("{c:.6}"))
    );
    Ok(Ok(()))
}
