//! Plot-ready CSV tables. Each file starts with a header row naming its
//! columns.
//!
//! | file                   | columns                                       |
//! |------------------------|-----------------------------------------------|
//! | `satellites.csv`       | id, plane, index, lat_deg, lon_deg, weight    |
//! | `edges.csv`            | src, dst                                      |
//! | `regions.csv`          | name, lat_min, lat_max, lon_min, lon_max, weight |
//! | `weight_histogram.csv` | weight, count                                 |

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use lisl_core::orbital::subsatellite_point;
use lisl_core::topology::{Altitude, ShellGraph};
use lisl_core::traffic::TrafficRegion;
use lisl_core::SatId;
use serde::{Deserialize, Serialize};

use crate::config::Config;
use crate::error::{Result, SimError};
use crate::pipeline::weights_for;

pub const SATELLITES: &str = "satellites.csv";
pub const EDGES: &str = "edges.csv";
pub const REGIONS: &str = "regions.csv";
pub const WEIGHT_HISTOGRAM: &str = "weight_histogram.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatelliteRow {
    pub id: SatId,
    pub plane: u32,
    pub index: u32,
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRow {
    pub src: SatId,
    pub dst: SatId,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub weight: f64,
    pub count: u64,
}

/// Files written by [`export`], in write order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exported {
    pub files: Vec<PathBuf>,
    pub satellites: usize,
    pub edges: usize,
    pub regions: usize,
}

pub fn satellite_rows(config: &Config, graphs: &BTreeMap<Altitude, ShellGraph>) -> Vec<SatelliteRow> {
    let weight: BTreeMap<SatId, f64> = weights_for(config, graphs).into_iter().map(|w| (w.id, w.weight)).collect();
    let mut rows: Vec<SatelliteRow> = graphs
        .values()
        .flat_map(|g| g.states().iter())
        .map(|s| {
            let pos = subsatellite_point(s, config.shell.inclination_deg);
            SatelliteRow {
                id: s.id,
                plane: s.plane,
                index: s.index,
                lat_deg: pos.lat_deg,
                lon_deg: pos.lon_deg,
                weight: weight[&s.id],
            }
        })
        .collect();
    rows.sort_by_key(|r| r.id);
    rows
}

pub fn edge_rows(graphs: &BTreeMap<Altitude, ShellGraph>) -> Vec<EdgeRow> {
    let mut rows: Vec<EdgeRow> = graphs
        .values()
        .flat_map(|g| g.edges())
        .map(|(src, dst)| EdgeRow { src, dst })
        .collect();
    rows.sort_by_key(|e| (e.src, e.dst));
    rows
}

/// Satellite count per distinct weight, ascending by weight.
pub fn histogram(rows: &[SatelliteRow]) -> Vec<HistogramRow> {
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    for r in rows {
        // weights are positive, so bit patterns order like the values
        *counts.entry(r.weight.to_bits()).or_default() += 1;
    }
    counts
        .into_iter()
        .map(|(bits, count)| HistogramRow {
            weight: f64::from_bits(bits),
            count,
        })
        .collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T], header: &[&str]) -> Result<()> {
    let io = |e: csv::Error| match e.into_kind() {
        csv::ErrorKind::Io(source) => SimError::io(path, source),
        other => SimError::io(path, std::io::Error::other(format!("{other:?}"))),
    };
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path).map_err(io)?;
    // explicit header so empty tables still document their schema
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.serialize(row).map_err(io)?;
    }
    w.flush().map_err(|e| SimError::io(path, e))
}

/// Writes all four tables into `out_dir`.
pub fn export(config: &Config, graphs: &BTreeMap<Altitude, ShellGraph>, out_dir: &Path) -> Result<Exported> {
    fs::create_dir_all(out_dir).map_err(|e| SimError::io(out_dir, e))?;
    let sats = satellite_rows(config, graphs);
    let edges = edge_rows(graphs);
    let regions: Vec<TrafficRegion> = config.traffic.regions();
    let hist = histogram(&sats);

    let files: Vec<PathBuf> = [SATELLITES, EDGES, REGIONS, WEIGHT_HISTOGRAM]
        .iter()
        .map(|f| out_dir.join(f))
        .collect();
    write_csv(&files[0], &sats, &["id", "plane", "index", "lat_deg", "lon_deg", "weight"])?;
    write_csv(&files[1], &edges, &["src", "dst"])?;
    write_csv(
        &files[2],
        &regions,
        &["name", "lat_min", "lat_max", "lon_min", "lon_max", "weight"],
    )?;
    write_csv(&files[3], &hist, &["weight", "count"])?;
    Ok(Exported {
        files,
        satellites: sats.len(),
        edges: edges.len(),
        regions: regions.len(),
    })
}
