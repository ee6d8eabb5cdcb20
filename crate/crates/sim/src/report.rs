//! Report rendering: a key/value block for people and one JSON line per run
//! for tools.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::Path;

use lisl_core::engine::SimReport;
use lisl_core::topology::Arrangement;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Result, SimError};

/// One machine-readable run record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub arrangement: Arrangement,
    pub seed: u64,
    pub satellites: u32,
    #[serde(flatten)]
    pub report: SimReport,
}

impl RunRecord {
    pub fn new(config: &Config, seed: u64, report: SimReport) -> Self {
        RunRecord {
            arrangement: config.arrangement,
            seed,
            satellites: config.shell.satellite_count(),
            report,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("run records serialize")
    }
}

pub fn render_text(record: &RunRecord) -> String {
    let r = &record.report;
    let lookups = r.cache_hits + r.cache_misses;
    let hit_rate = if lookups == 0 { 0.0 } else { r.cache_hits as f64 / lookups as f64 };
    let unroutable = r
        .unroutable
        .iter()
        .map(u64::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let mut rows: Vec<(&str, String)> = vec![
        ("arrangement", record.arrangement.name().to_owned()),
        ("seed", record.seed.to_string()),
        ("satellites", record.satellites.to_string()),
        ("flow_count", r.flow_count.to_string()),
        ("flows_completed", r.flows_completed.to_string()),
        ("flows_dropped", r.flows_dropped.to_string()),
        ("bytes_delivered", r.bytes_delivered.to_string()),
        ("bytes_dropped", r.bytes_dropped.to_string()),
        ("sim_time_ns", r.sim_time_ns.to_string()),
        ("sim_time_s", format!("{:.9}", r.sim_time_secs())),
        ("wall_time_ms", r.wall_time_ms.to_string()),
        ("cache_hits", r.cache_hits.to_string()),
        ("cache_misses", r.cache_misses.to_string()),
        ("cache_hit_rate", format!("{hit_rate:.4}")),
        ("chunk_transmissions", r.chunk_transmissions.to_string()),
        ("unroutable", unroutable),
    ];
    if let Some(links) = &r.per_link_busy_ns {
        let busiest = links.iter().max_by_key(|l| (l.busy_ns, std::cmp::Reverse((l.from, l.to))));
        rows.push(("links_used", links.len().to_string()));
        if let Some(l) = busiest {
            rows.push(("busiest_link", format!("{}->{} {} ns", l.from, l.to, l.busy_ns)));
        }
    }
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter()
        .map(|(k, v)| format!("{k:<width$} = {v}\n"))
        .collect()
}

/// Writes the text block to `output.report` and appends the JSON line to
/// `output.runs_log`, when configured.
pub fn persist(config: &Config, record: &RunRecord) -> Result<()> {
    if let Some(path) = &config.output.report {
        std::fs::write(path, render_text(record)).map_err(|e| SimError::io(path, e))?;
    }
    if let Some(path) = &config.output.runs_log {
        append_line(path, &record.to_json_line())?;
    }
    Ok(())
}

pub fn append_line(path: &Path, line: &str) -> Result<()> {
    let mut f = OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)
        .map_err(|e| SimError::io(path, e))?;
    writeln!(f, "{line}").map_err(|e| SimError::io(path, e))
}
