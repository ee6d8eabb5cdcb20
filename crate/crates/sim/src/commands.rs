//! Command implementations behind the CLI. Each returns data; printing is
//! left to the caller.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Mutex;

use lisl_core::engine::SimReport;
use lisl_core::topology::{diameter, generate_records, max_hops_formula, Arrangement};
use lisl_core::traffic::generate_flows;

use crate::config::Config;
use crate::error::Result;
use crate::export::{export, Exported};
use crate::pipeline::{graphs_for, run_scenario, weights_for, Scenario};
use crate::records::{read_records, write_records};
use crate::report::RunRecord;

/// Writes the configured shell's records; returns how many.
pub fn generate(config: &Config, out_dir: &Path) -> Result<usize> {
    let records = generate_records(&config.shell, config.arrangement)?;
    write_records(out_dir, &records)?;
    Ok(records.len())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Match,
    Mismatch,
    /// The formula only holds for even plane and per-plane counts.
    SkippedOdd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidateRow {
    pub arrangement: Arrangement,
    pub diameter: u32,
    pub formula: u32,
    pub check: Check,
}

/// Measured diameter against the hop formula for all four arrangements.
pub fn validate(config: &Config) -> Result<Vec<ValidateRow>> {
    let shell = &config.shell;
    let odd = shell.planes % 2 == 1 || shell.sats_per_plane % 2 == 1;
    let mut rows = Vec::new();
    for a in Arrangement::ALL {
        let records = generate_records(shell, a)?;
        let graphs = graphs_for(config, &records)?;
        let mut d = 0;
        for g in graphs.values() {
            d = d.max(diameter(g)?);
        }
        let formula = max_hops_formula(a, shell.planes, shell.sats_per_plane);
        let check = match (odd, d == formula) {
            (true, _) => Check::SkippedOdd,
            (false, true) => Check::Match,
            (false, false) => Check::Mismatch,
        };
        rows.push(ValidateRow {
            arrangement: a,
            diameter: d,
            formula,
            check,
        });
    }
    Ok(rows)
}

pub fn render_validate(rows: &[ValidateRow]) -> String {
    let mut out = format!("{:<22} {:>8} {:>8}  {}\n", "arrangement", "diameter", "formula", "match");
    for r in rows {
        let (formula, check) = match r.check {
            Check::Match => (r.formula.to_string(), "yes"),
            Check::Mismatch => (r.formula.to_string(), "NO"),
            Check::SkippedOdd => ("-".to_owned(), "skipped (odd)"),
        };
        let _ = writeln!(out, "{:<22} {:>8} {:>8}  {}", r.arrangement.name(), r.diameter, formula, check);
    }
    if rows.iter().any(|r| r.check == Check::SkippedOdd) {
        out.push_str("note: formula comparison needs even planes and sats_per_plane\n");
    }
    out
}

pub fn export_dir(config: &Config, records_dir: &Path, out_dir: &Path) -> Result<Exported> {
    let records = read_records(records_dir)?;
    let graphs = graphs_for(config, &records)?;
    export(config, &graphs, out_dir)
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialRow {
    pub arrangement: Arrangement,
    /// 1-based.
    pub trial: u32,
    pub seed: u64,
    pub report: SimReport,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanRow {
    pub arrangement: Arrangement,
    pub trials: u32,
    pub flow_count: f64,
    pub flows_dropped: f64,
    pub sim_time_s: f64,
    pub wall_time_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    /// Ordered by (arrangement as given, trial).
    pub trials: Vec<TrialRow>,
    pub means: Vec<MeanRow>,
}

impl Sweep {
    pub fn run_records(&self, config: &Config) -> Vec<RunRecord> {
        self.trials
            .iter()
            .map(|t| {
                let c = Config {
                    arrangement: t.arrangement,
                    ..config.clone()
                };
                RunRecord::new(&c, t.seed, t.report.clone())
            })
            .collect()
    }
}

/// Runs `trials` seeds (`traffic.seed + k`) for each arrangement. Trials run
/// on worker threads; results are ordered independently of scheduling.
pub fn sweep(config: &Config, arrangements: &[Arrangement], trials: u32) -> Result<Sweep> {
    if trials == 0 {
        return Err(lisl_core::Error::Argument("trials must be ≥ 1".into()).into());
    }
    if arrangements.is_empty() {
        return Err(lisl_core::Error::Argument("no arrangements given".into()).into());
    }
    let base = config.traffic.seed;
    let mut jobs = Vec::new();
    for (slot, &a) in arrangements.iter().enumerate() {
        let c = Config {
            arrangement: a,
            ..config.clone()
        };
        let records = generate_records(&c.shell, a)?;
        let graphs = graphs_for(&c, &records)?;
        for k in 0..trials {
            jobs.push((slot, k, c.clone(), graphs.clone()));
        }
    }

    let workers = std::thread::available_parallelism().map_or(1, |n| n.get()).min(jobs.len());
    let queue = Mutex::new(jobs.into_iter());
    let results = Mutex::new(BTreeMap::new());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let Some((slot, k, c, graphs)) = queue.lock().expect("job queue").next() else {
                    break;
                };
                let seed = base.wrapping_add(u64::from(k));
                let mut flow_params = c.traffic.flow_params();
                flow_params.seed = seed;
                let weights = weights_for(&c, &graphs);
                let outcome = generate_flows(&flow_params, &weights)
                    .map_err(Into::into)
                    .and_then(|flows| run_scenario(&c, &Scenario { graphs, weights, flows }, false));
                results.lock().expect("results").insert((slot, k), (c.arrangement, seed, outcome));
            });
        }
    });

    let mut rows = Vec::new();
    for ((_, k), (arrangement, seed, outcome)) in results.into_inner().expect("results") {
        rows.push(TrialRow {
            arrangement,
            trial: k + 1,
            seed,
            report: outcome?,
        });
    }
    let means = arrangements
        .iter()
        .enumerate()
        .map(|(slot, &a)| {
            let rows = &rows[slot * trials as usize..(slot + 1) * trials as usize];
            let mean = |f: &dyn Fn(&SimReport) -> f64| rows.iter().map(|r| f(&r.report)).sum::<f64>() / f64::from(trials);
            MeanRow {
                arrangement: a,
                trials,
                flow_count: mean(&|r| r.flow_count as f64),
                flows_dropped: mean(&|r| r.flows_dropped as f64),
                sim_time_s: mean(&|r| r.sim_time_secs()),
                wall_time_ms: mean(&|r| r.wall_time_ms as f64),
            }
        })
        .collect();
    Ok(Sweep { trials: rows, means })
}

pub fn render_sweep(sweep: &Sweep) -> String {
    let mut out = format!(
        "{:<22} {:>7} {:>6} {:>6} {:>7} {:>12} {:>9}\n",
        "arrangement", "trial", "seed", "flows", "dropped", "sim_time_s", "wall_ms"
    );
    for t in &sweep.trials {
        let _ = writeln!(
            out,
            "{:<22} {:>7} {:>6} {:>6} {:>7} {:>12.6} {:>9}",
            t.arrangement.name(),
            t.trial,
            t.seed,
            t.report.flow_count,
            t.report.flows_dropped,
            t.report.sim_time_secs(),
            t.report.wall_time_ms
        );
    }
    for m in &sweep.means {
        let _ = writeln!(
            out,
            "{:<22} {:>7} {:>6} {:>6.2} {:>7.2} {:>12.6} {:>9.1}",
            m.arrangement.name(),
            "mean",
            "-",
            m.flow_count,
            m.flows_dropped,
            m.sim_time_s,
            m.wall_time_ms
        );
    }
    out
}

/// Parses `full4,two` or `1,4` style lists.
pub fn parse_arrangements(list: &str) -> Result<Vec<Arrangement>> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<Arrangement>().map_err(Into::into))
        .collect()
}
