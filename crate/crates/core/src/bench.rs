//! Benchmark harness: runs methods over a generated suite and reports
//! Time / Gap / Opt averages grouped by each grid dimension.

use std::fmt::{self, Write as _};
use std::io;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::binsearch::{binary_search_minmax, BinarySearchConfig, MilpDecision, NativeDecision};
use crate::gen::SuiteInstance;
use crate::milp::{build_model, solve_external, ExternalSolver, Formulation};
use crate::oracle::{brute_force, OracleLimits};
use crate::problem::ObjectiveKind;
use crate::solver::{solve, SolveConfig, SolveResult, SolveStats, SolveStatus};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Native,
    Oracle,
    BsNative,
    Milp(Formulation),
    BsMilp(Formulation),
}

impl Method {
    pub fn name(self) -> String {
        match self {
            Method::Native => "native".into(),
            Method::Oracle => "oracle".into(),
            Method::BsNative => "bs-native".into(),
            Method::Milp(f) => f.name().into(),
            Method::BsMilp(f) => format!("bs-{f}"),
        }
    }

    pub fn is_binary_search(self) -> bool {
        matches!(self, Method::BsNative | Method::BsMilp(_))
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        match lower.as_str() {
            "native" => Ok(Method::Native),
            "oracle" => Ok(Method::Oracle),
            "bs-native" => Ok(Method::BsNative),
            _ => match lower.strip_prefix("bs-") {
                Some(f) => f.parse().map(Method::BsMilp),
                None => lower.parse().map(Method::Milp),
            }
            .map_err(|_| format!("unknown method `{s}`")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub objective: ObjectiveKind,
    pub time_limit: Duration,
    /// Gap handed to binary-search probes.
    pub gamma: f64,
    /// Needed by the MILP methods; without it their rows are skipped.
    pub external: Option<ExternalSolver>,
    pub oracle: OracleLimits,
}

impl BenchConfig {
    pub fn new(objective: ObjectiveKind, time_limit: Duration) -> Self {
        Self {
            objective,
            time_limit,
            gamma: 0.1,
            external: None,
            oracle: OracleLimits::default(),
        }
    }
}

/// One CSV row. Missing values are empty fields.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub instance: String,
    pub jobs: usize,
    pub machines: usize,
    pub capacity: i64,
    pub alpha: u32,
    pub setting: u8,
    pub method: String,
    pub objective: ObjectiveKind,
    /// A solver status, or `skipped` / `error`.
    pub status: String,
    pub incumbent: Option<i64>,
    pub bound: Option<i64>,
    pub gap: Option<f64>,
    pub time: f64,
    pub iterations: Option<u32>,
    pub nodes: u64,
    /// Proven optimal within the time limit.
    pub opt: bool,
    pub note: String,
}

impl BenchRecord {
    pub fn skipped(&self) -> bool {
        self.status == "skipped"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Dimension {
    Jobs,
    Machines,
    Capacity,
    ConflictRate,
    Setting,
    Total,
}

impl Dimension {
    pub const GROUPS: [Dimension; 5] = [
        Dimension::Jobs,
        Dimension::Machines,
        Dimension::Capacity,
        Dimension::ConflictRate,
        Dimension::Setting,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Dimension::Jobs => "Jobs",
            Dimension::Machines => "Machines",
            Dimension::Capacity => "Capacity",
            Dimension::ConflictRate => "Conflict rate",
            Dimension::Setting => "Setting",
            Dimension::Total => "Total",
        }
    }

    fn key(self, r: &BenchRecord) -> i64 {
        match self {
            Dimension::Jobs => r.jobs as i64,
            Dimension::Machines => r.machines as i64,
            Dimension::Capacity => r.capacity,
            Dimension::ConflictRate => i64::from(r.alpha),
            Dimension::Setting => i64::from(r.setting),
            Dimension::Total => 0,
        }
    }
}

/// Averages over the non-skipped records of one group and method.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub dimension: Dimension,
    /// Group value; `None` for the total row.
    pub value: Option<i64>,
    pub method: String,
    pub instances: usize,
    pub skipped: usize,
    pub time: Option<f64>,
    /// Mean over records that have a gap.
    pub gap: Option<f64>,
    pub opt: usize,
    pub iterations: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub records: Vec<BenchRecord>,
    pub summary: Vec<SummaryRow>,
}

pub fn run_bench(suite: &[SuiteInstance], methods: &[Method], cfg: &BenchConfig) -> BenchReport {
    let mut records = Vec::with_capacity(suite.len() * methods.len());
    for member in suite {
        for &method in methods {
            records.push(run_one(member, method, cfg));
        }
    }
    let summary = summarize(&records, methods);
    BenchReport { records, summary }
}

fn run_one(member: &SuiteInstance, method: Method, cfg: &BenchConfig) -> BenchRecord {
    let p = member.params;
    let mut record = BenchRecord {
        instance: member.name(),
        jobs: p.n_jobs,
        machines: p.n_machines,
        capacity: p.capacity,
        alpha: p.alpha,
        setting: p.setting,
        method: method.name(),
        objective: cfg.objective,
        status: "skipped".into(),
        incumbent: None,
        bound: None,
        gap: None,
        time: 0.0,
        iterations: None,
        nodes: 0,
        opt: false,
        note: String::new(),
    };
    let inst = &member.instance;
    let obj = cfg.objective;
    if method.is_binary_search() && obj != ObjectiveKind::MinMax {
        record.note = "binary search applies to MinMax only".into();
        return record;
    }
    let needs_external = matches!(method, Method::Milp(_) | Method::BsMilp(_));
    let external = match (&cfg.external, needs_external) {
        (None, true) => {
            record.note = "no external solver configured".into();
            return record;
        }
        (ext, _) => ext.clone(),
    };

    let started = Instant::now();
    let outcome: Result<SolveResult, String> = match method {
        Method::Native => {
            let solve_cfg = SolveConfig::default().with_time_limit(cfg.time_limit);
            solve(inst, obj, &solve_cfg).map_err(|e| e.to_string())
        }
        Method::Oracle => match brute_force(inst, obj, cfg.oracle) {
            Ok(sol) => {
                let stats = SolveStats {
                    nodes: sol.orientations,
                    elapsed: started.elapsed(),
                    ..SolveStats::default()
                };
                Ok(SolveResult::assemble(obj, Some((sol.optimum, sol.schedule)), None, true, 0.0, stats))
            }
            Err(e @ crate::oracle::OracleError::TooLarge { .. }) => {
                record.note = e.to_string();
                return record;
            }
            Err(e) => Err(e.to_string()),
        },
        Method::BsNative | Method::BsMilp(_) => {
            let bs_cfg = BinarySearchConfig {
                gamma: cfg.gamma,
                probe_time_limit: Some(cfg.time_limit),
                time_limit: Some(cfg.time_limit),
            };
            let result = match method {
                Method::BsMilp(formulation) => binary_search_minmax(
                    inst,
                    &mut MilpDecision {
                        formulation,
                        solver: external.expect("checked above"),
                    },
                    &bs_cfg,
                ),
                _ => binary_search_minmax(inst, &mut NativeDecision::default(), &bs_cfg),
            };
            result.map_err(|e| e.to_string())
        }
        Method::Milp(f) => build_model(inst, f, obj)
            .map(|model| solve_external(inst, &model, &external.expect("checked above"), cfg.time_limit, 0.0))
            .map_err(|e| e.to_string()),
    };
    let elapsed = started.elapsed();
    record.time = elapsed.as_secs_f64();
    match outcome {
        Ok(r) => {
            record.status = r.status.name().into();
            record.incumbent = r.incumbent;
            record.bound = r.bound;
            record.gap = r.gap;
            record.iterations = r.stats.iterations;
            record.nodes = r.stats.nodes;
            record.opt = r.status == SolveStatus::Optimal && elapsed <= cfg.time_limit;
            record.note = r.diagnostics.join("; ");
        }
        Err(msg) => {
            record.status = "error".into();
            record.note = msg;
        }
    }
    record
}

/// Per-method rows for every value of every grouping dimension, then the
/// totals, in the order of `methods`.
pub fn summarize(records: &[BenchRecord], methods: &[Method]) -> Vec<SummaryRow> {
    let mut rows = Vec::new();
    for dim in Dimension::GROUPS.into_iter().chain([Dimension::Total]) {
        let mut values: Vec<i64> = records.iter().map(|r| dim.key(r)).collect();
        values.sort_unstable();
        values.dedup();
        for value in values {
            for method in methods {
                let name = method.name();
                let members: Vec<&BenchRecord> = records
                    .iter()
                    .filter(|r| r.method == name && dim.key(r) == value)
                    .collect();
                rows.push(summary_row(dim, (dim != Dimension::Total).then_some(value), name, &members));
            }
        }
    }
    rows
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, count) = xs.fold((0.0, 0usize), |(s, c), x| (s + x, c + 1));
    (count > 0).then(|| sum / count as f64)
}

fn summary_row(dimension: Dimension, value: Option<i64>, method: String, members: &[&BenchRecord]) -> SummaryRow {
    let ran: Vec<&&BenchRecord> = members.iter().filter(|r| !r.skipped()).collect();
    SummaryRow {
        dimension,
        value,
        method,
        instances: members.len(),
        skipped: members.len() - ran.len(),
        time: mean(ran.iter().map(|r| r.time)),
        gap: mean(ran.iter().filter_map(|r| r.gap)),
        opt: ran.iter().filter(|r| r.opt).count(),
        iterations: mean(ran.iter().filter_map(|r| r.iterations.map(f64::from))),
    }
}

pub fn write_csv<W: io::Write>(records: &[BenchRecord], out: W) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    for r in records {
        writer.serialize(r)?;
    }
    writer.flush()?;
    Ok(())
}

/// Text tables, one block per grouping dimension plus the total. Each
/// method contributes `Time Gap Opt` columns, and `Iter` for binary search.
pub fn render_table(summary: &[SummaryRow], methods: &[Method]) -> String {
    let mut out = String::new();
    let cell = |row: &SummaryRow, method: Method| -> String {
        let time = row.time.map_or("-".into(), |t| format!("{t:.3}"));
        let gap = row.gap.map_or("-".into(), |g| format!("{:.2}", g * 100.0));
        let mut s = if row.skipped == row.instances {
            format!("{:>9} {:>7} {:>5}", "skipped", "", "")
        } else {
            format!("{time:>9} {gap:>7} {:>5}", row.opt)
        };
        if method.is_binary_search() {
            let iter = row.iterations.map_or("-".into(), |i| format!("{i:.1}"));
            let _ = write!(s, " {iter:>5}");
        }
        s
    };
    let header = |out: &mut String, label: &str| {
        let _ = write!(out, "{label:<14}");
        for &m in methods {
            let width = if m.is_binary_search() { 29 } else { 23 };
            let _ = write!(out, " | {:^width$}", m.name());
        }
        out.push('\n');
        let _ = write!(out, "{:<14}", "");
        for &m in methods {
            let _ = write!(out, " | {:>9} {:>7} {:>5}", "Time", "Gap%", "Opt");
            if m.is_binary_search() {
                let _ = write!(out, " {:>5}", "Iter");
            }
        }
        out.push('\n');
    };
    for dim in Dimension::GROUPS.into_iter().chain([Dimension::Total]) {
        header(&mut out, dim.label());
        let mut values: Vec<Option<i64>> = summary.iter().filter(|r| r.dimension == dim).map(|r| r.value).collect();
        values.dedup();
        for value in values {
            let label = value.map_or("Total".into(), |v| v.to_string());
            let _ = write!(out, "{label:<14}");
            for &m in methods {
                let name = m.name();
                if let Some(row) = summary
                    .iter()
                    .find(|r| r.dimension == dim && r.value == value && r.method == name)
                {
                    let _ = write!(out, " | {}", cell(row, m));
                }
            }
            out.push('\n');
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gen::{generate_suite, SuiteGrid};

    fn tiny_suite() -> Vec<SuiteInstance> {
        let grid = SuiteGrid {
            jobs: vec![4],
            machines: vec![2],
            capacities: vec![10, 20],
            alphas: vec![1, 2],
            settings: vec![1],
            ..SuiteGrid::mini(3)
        };
        generate_suite(&grid).unwrap()
    }

    #[test]
    fn method_names_round_trip() {
        for name in ["native", "oracle", "bs-native", "f1", "f2", "f3", "bs-f1", "bs-f3"] {
            assert_eq!(name.parse::<Method>().unwrap().name(), name);
        }
        assert!("f4".parse::<Method>().is_err());
        assert!("bs-x".parse::<Method>().is_err());
    }

    #[test]
    fn grouped_rows_and_skips() {
        let suite = tiny_suite();
        let methods = [Method::Native, Method::Oracle, Method::BsNative, Method::Milp(Formulation::F2)];
        let cfg = BenchConfig::new(ObjectiveKind::MinMax, Duration::from_secs(10));
        let report = run_bench(&suite, &methods, &cfg);
        assert_eq!(report.records.len(), 4 * 4);
        for r in &report.records {
            match r.method.as_str() {
                "f2" => assert!(r.skipped()),
                _ => assert!(r.opt && r.gap == Some(0.0), "{r:?}"),
            }
        }
        let total: Vec<&SummaryRow> = report
            .summary
            .iter()
            .filter(|r| r.dimension == Dimension::Total)
            .collect();
        assert_eq!(total.len(), 4);
        assert_eq!(total[0].opt, 4);
        assert_eq!(total[3].skipped, 4);
        let capacity_rows = report
            .summary
            .iter()
            .filter(|r| r.dimension == Dimension::Capacity && r.method == "native")
            .count();
        assert_eq!(capacity_rows, 2);
        let table = render_table(&report.summary, &methods);
        assert!(table.contains("Conflict rate"));
        assert!(table.contains("skipped"));
        let mut csv = Vec::new();
        write_csv(&report.records, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("instance,jobs,machines,capacity,alpha,setting,method,objective,status,"));
        assert_eq!(text.lines().count(), 17);
    }

    #[test]
    fn binary_search_rows_are_skipped_for_other_objectives() {
        let suite = tiny_suite();
        let cfg = BenchConfig::new(ObjectiveKind::MaxSum, Duration::from_secs(10));
        let report = run_bench(&suite[..1], &[Method::BsNative], &cfg);
        assert!(report.records[0].skipped());
    }
}
