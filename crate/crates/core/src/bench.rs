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
//! Benchmark runs over scenarios, planners and seeds, with CSV output.

use std::fmt;
use std::io;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::planner::{smlr_solve, LevelStats, PlannerConfig, PlannerResult, Status};
use crate::scenario::Scenario;

pub const CSV_HEADER: [&str; 11] =
    ["scenario", "planner", "seed", "status", "seconds", "cost", "level", "vertices", "edges", "failures", "coverage"];

pub const SUMMARY_HEADER: [&str; 8] =
    ["scenario", "planner", "runs", "mean_seconds", "feasible", "infeasible", "timeout", "error"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PlannerKind {
    /// The full level sequence.
    Smlr,
    /// The finest level only.
    Flat,
}

impl PlannerKind {
    pub const ALL: [PlannerKind; 2] = [PlannerKind::Smlr, PlannerKind::Flat];

    pub fn as_str(self) -> &'static str {
        match self {
            PlannerKind::Smlr => "smlr",
            PlannerKind::Flat => "flat",
        }
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smlr" => Ok(PlannerKind::Smlr),
            "flat" => Ok(PlannerKind::Flat),
            _ => Err(invalid(format!("unknown planner {s:?}, expected smlr or flat"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RunStatus {
    Feasible,
    Infeasible,
    Timeout,
    /// The run could not be set up.
    Error,
}

impl RunStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RunStatus::Feasible => "feasible",
            RunStatus::Infeasible => "infeasible",
            RunStatus::Timeout => "timeout",
            RunStatus::Error => "error",
        }
    }
}

impl From<Status> for RunStatus {
    fn from(s: Status) -> Self {
        match s {
            Status::Feasible => RunStatus::Feasible,
            Status::Infeasible => RunStatus::Infeasible,
            Status::Timeout => RunStatus::Timeout,
        }
    }
}

impl fmt::Display for RunStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RunStatus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "feasible" => Ok(RunStatus::Feasible),
            "infeasible" => Ok(RunStatus::Infeasible),
            "timeout" => Ok(RunStatus::Timeout),
            "error" => Ok(RunStatus::Error),
            _ => Err(invalid(format!("unknown status {s:?}"))),
        }
    }
}

/// One (scenario, planner, seed) run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRow {
    pub scenario: String,
    pub planner: PlannerKind,
    pub seed: u64,
    pub status: RunStatus,
    pub seconds: f64,
    pub cost: Option<f64>,
    pub levels: Vec<LevelStats>,
}

/// Config fields that override a scenario's declared planner defaults.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub max_failures: Option<u64>,
    pub delta_fraction: Option<f64>,
    pub eta: Option<u64>,
    pub stretch: Option<f64>,
    pub time_limit: Option<f64>,
    pub check_resolution: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, base: &PlannerConfig, seed: u64) -> PlannerConfig {
        PlannerConfig {
            max_failures: self.max_failures.unwrap_or(base.max_failures),
            delta_fraction: self.delta_fraction.unwrap_or(base.delta_fraction),
            eta: self.eta.unwrap_or(base.eta),
            stretch: self.stretch.unwrap_or(base.stretch),
            time_limit: self.time_limit.unwrap_or(base.time_limit),
            seed,
            check_resolution: self.check_resolution.or(base.check_resolution),
        }
    }
}

/// Runs one planner on one scenario.
pub fn run_planner(scenario: &Scenario, planner: PlannerKind, cfg: PlannerConfig) -> Result<PlannerResult> {
    match planner {
        PlannerKind::Smlr => smlr_solve(&scenario.sequence, &scenario.start, &scenario.goal, cfg),
        PlannerKind::Flat => smlr_solve(&scenario.flat_sequence(), &scenario.start, &scenario.goal, cfg),
    }
}

impl RunRow {
    pub fn from_result(scenario: &str, planner: PlannerKind, r: &PlannerResult) -> Self {
        RunRow {
            scenario: scenario.to_string(),
            planner,
            seed: r.seed,
            status: r.status.into(),
            seconds: r.seconds,
            cost: r.cost,
            levels: r.levels.clone(),
        }
    }
}

/// Raw rows plus the messages of runs that failed to start.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchReport {
    pub table: ResultTable,
    pub errors: Vec<String>,
}

/// Runs every (scenario, planner, seed) combination in parallel. Rows come
/// back in scenario, planner, seed order regardless of scheduling.
pub fn run_benchmark(scenarios: &[Scenario], planners: &[PlannerKind], seeds: &[u64], overrides: &Overrides) -> BenchReport {
    let jobs: Vec<(&Scenario, PlannerKind, u64)> = scenarios
        .iter()
        .flat_map(|s| planners.iter().flat_map(move |&p| seeds.iter().map(move |&seed| (s, p, seed))))
        .collect();
    let outcomes: Vec<(RunRow, Option<String>)> = jobs
        .par_iter()
        .map(|&(s, p, seed)| {
            let cfg = overrides.apply(&s.planner, seed);
            match run_planner(s, p, cfg) {
                Ok(r) => (RunRow::from_result(&s.name, p, &r), None),
                Err(e) => {
                    let row = RunRow {
                        scenario: s.name.clone(),
                        planner: p,
                        seed,
                        status: RunStatus::Error,
                        seconds: 0.0,
                        cost: None,
                        levels: Vec::new(),
                    };
                    (row, Some(format!("{} / {} / seed {}: {}", s.name, p, seed, e)))
                }
            }
        })
        .collect();
    let mut report = BenchReport::default();
    for (row, err) in outcomes {
        report.table.rows.push(row);
        report.errors.extend(err);
    }
    report
}

/// Per (scenario, planner) aggregate in the `feasible|infeasible|timeout`
/// style.
#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub scenario: String,
    pub planner: PlannerKind,
    pub runs: usize,
    /// Mean wall time over the runs that started.
    pub mean_seconds: f64,
    pub feasible: usize,
    pub infeasible: usize,
    pub timeout: usize,
    pub error: usize,
}

impl SummaryRow {
    pub fn counts(&self) -> String {
        format!("{}|{}|{}", self.feasible, self.infeasible, self.timeout)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<RunRow>,
}

impl ResultTable {
    /// One summary row per (scenario, planner), in first-appearance order.
    pub fn summary(&self) -> Vec<SummaryRow> {
        let mut out: Vec<SummaryRow> = Vec::new();
        let mut totals: Vec<f64> = Vec::new();
        for row in &self.rows {
            let i = match out.iter().position(|s| s.scenario == row.scenario && s.planner == row.planner) {
                Some(i) => i,
                None => {
                    out.push(SummaryRow {
                        scenario: row.scenario.clone(),
                        planner: row.planner,
                        runs: 0,
                        mean_seconds: 0.0,
                        feasible: 0,
                        infeasible: 0,
                        timeout: 0,
                        error: 0,
                    });
                    totals.push(0.0);
                    out.len() - 1
                }
            };
            let s = &mut out[i];
            s.runs += 1;
            match row.status {
                RunStatus::Feasible => s.feasible += 1,
                RunStatus::Infeasible => s.infeasible += 1,
                RunStatus::Timeout => s.timeout += 1,
                RunStatus::Error => s.error += 1,
            }
            if row.status != RunStatus::Error {
                totals[i] += row.seconds;
            }
        }
        for (s, total) in out.iter_mut().zip(totals) {
            let started = s.runs - s.error;
            s.mean_seconds = if started > 0 { total / started as f64 } else { 0.0 };
        }
        out
    }

    /// Writes one CSV line per level of every run (a single line with empty
    /// level fields for runs without levels).
    pub fn write_csv<W: io::Write>(&self, w: W) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(CSV_HEADER).map_err(csv_error)?;
        for r in &self.rows {
            let head = [
                r.scenario.clone(),
                r.planner.to_string(),
                r.seed.to_string(),
                r.status.to_string(),
                r.seconds.to_string(),
                r.cost.map(|c| c.to_string()).unwrap_or_default(),
            ];
            if r.levels.is_empty() {
                let mut rec = head.to_vec();
                rec.extend(std::iter::repeat_n(String::new(), 5));
                out.write_record(&rec).map_err(csv_error)?;
            }
            for (k, l) in r.levels.iter().enumerate() {
                let mut rec = head.to_vec();
                rec.extend([
                    k.to_string(),
                    l.vertices.to_string(),
                    l.edges.to_string(),
                    l.failures.to_string(),
                    l.coverage.to_string(),
                ]);
                out.write_record(&rec).map_err(csv_error)?;
            }
        }
        out.flush().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is utf-8")
    }

    /// Parses the output of [`ResultTable::write_csv`]; consecutive lines of
    /// the same run are merged back into one row.
    pub fn read_csv<R: io::Read>(r: R) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(r);
        let header = rdr.headers().map_err(csv_error)?.clone();
        if header.iter().ne(CSV_HEADER) {
            return Err(Error::Parse(format!("unexpected CSV header {:?}", header.iter().collect::<Vec<_>>())));
        }
        let mut rows: Vec<RunRow> = Vec::new();
        for (line, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(csv_error)?;
            let ctx = |field: &str| Error::Parse(format!("record {}: bad {field}", line + 1));
            let scenario = rec[0].to_string();
            let planner: PlannerKind = rec[1].parse().map_err(|_| ctx("planner"))?;
            let seed: u64 = rec[2].parse().map_err(|_| ctx("seed"))?;
            let status: RunStatus = rec[3].parse().map_err(|_| ctx("status"))?;
            let seconds: f64 = rec[4].parse().map_err(|_| ctx("seconds"))?;
            let cost = match &rec[5] {
                "" => None,
                c => Some(c.parse::<f64>().map_err(|_| ctx("cost"))?),
            };
            let level = match &rec[6] {
                "" => None,
                l => Some(l.parse::<usize>().map_err(|_| ctx("level"))?),
            };
            let continues = level.is_some_and(|k| k > 0)
                && rows.last().is_some_and(|r| r.scenario == scenario && r.planner == planner && r.seed == seed);
            if !continues {
                rows.push(RunRow { scenario, planner, seed, status, seconds, cost, levels: Vec::new() });
            }
            if let Some(k) = level {
                let row = rows.last_mut().expect("row pushed");
                if row.levels.len() != k {
                    return Err(ctx("level index"));
                }
                row.levels.push(LevelStats {
                    vertices: rec[7].parse().map_err(|_| ctx("vertices"))?,
                    edges: rec[8].parse().map_err(|_| ctx("edges"))?,
                    failures: rec[9].parse().map_err(|_| ctx("failures"))?,
                    coverage: rec[10].parse().map_err(|_| ctx("coverage"))?,
                });
            }
        }
        Ok(ResultTable { rows })
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        Self::read_csv(text.as_bytes())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path.as_ref()).map_err(|e| Error::Parse(e.to_string()))?;
        self.write_csv(io::BufWriter::new(f))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let f = std::fs::File::open(path.as_ref()).map_err(|e| Error::Parse(e.to_string()))?;
        Self::read_csv(io::BufReader::new(f))
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Parse(e.to_string())
}

pub fn write_summary_csv<W: io::Write>(summary: &[SummaryRow], w: W) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(SUMMARY_HEADER).map_err(csv_error)?;
    for s in summary {
        out.write_record([
            s.scenario.clone(),
            s.planner.to_string(),
            s.runs.to_string(),
            s.mean_seconds.to_string(),
            s.feasible.to_string(),
            s.infeasible.to_string(),
            s.timeout.to_string(),
            s.error.to_string(),
        ])
        .map_err(csv_error)?;
    }
    out.flush().map_err(|e| Error::Parse(e.to_string()))?;
    Ok(())
}
