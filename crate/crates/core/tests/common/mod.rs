#![allow(dead_code)]

use std::collections::BTreeMap;

use lisl_core::orbital::{place_shell, SatelliteState, ShellParams};
use lisl_core::topology::{build_graphs, generate_records, Altitude, Arrangement, SatelliteRecord, ShellGraph};
use lisl_core::SatId;

pub fn shell(planes: u32, sats_per_plane: u32) -> ShellParams {
    ShellParams {
        planes,
        sats_per_plane,
        ..ShellParams::default()
    }
}

pub fn graphs_for(p: &ShellParams, a: Arrangement) -> BTreeMap<Altitude, ShellGraph> {
    let records = generate_records(p, a).unwrap();
    build_graphs(&records, &place_shell(p).unwrap()).unwrap()
}

pub fn single(p: &ShellParams, a: Arrangement) -> ShellGraph {
    graphs_for(p, a).pop_first().unwrap().1
}

fn dummy_state(id: SatId) -> SatelliteState {
    SatelliteState {
        id,
        plane: 0,
        index: id - 1,
        raan_deg: 0.0,
        arg_lat_deg: 0.0,
        altitude_km: 540.0,
    }
}

/// Graph from explicit directed edges over ids `1..=n`.
pub fn custom_graphs(n: SatId, edges: &[(SatId, SatId)]) -> BTreeMap<Altitude, ShellGraph> {
    let records: Vec<SatelliteRecord> = (1..=n)
        .map(|id| {
            let neighbors: Vec<SatId> = edges.iter().filter(|e| e.0 == id).map(|e| e.1).collect();
            SatelliteRecord {
                id,
                altitude_km: 540.0,
                lisl_count: neighbors.len() as u32,
                neighbors,
            }
        })
        .collect();
    let states: Vec<SatelliteState> = (1..=n).map(dummy_state).collect();
    build_graphs(&records, &states).unwrap()
}

/// Directed line 1 → 2 → … → hops+1.
pub fn line(hops: u32) -> BTreeMap<Altitude, ShellGraph> {
    let edges: Vec<(SatId, SatId)> = (1..=hops).map(|k| (k, k + 1)).collect();
    custom_graphs(hops + 1, &edges)
}
