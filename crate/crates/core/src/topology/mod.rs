//! Neighbor assignment, per-satellite records and LISL arrangements.

mod graph;

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::orbital::ShellParams;
use crate::{Error, Result, SatId};

pub use graph::{build_graphs, diameter, strong_connectivity, Altitude, ShellGraph};

/// Which of the four canonical neighbors each satellite keeps as an outgoing
/// LISL.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Arrangement {
    /// Previous and next in-plane, previous and next plane.
    #[default]
    Full4,
    /// Drops the previous in-plane neighbor.
    ThreeWithinPlane,
    /// Drops the neighbor in the previous plane.
    ThreeBetweenPlanes,
    /// Keeps only the next in-plane and next-plane neighbors.
    Two,
}

impl Arrangement {
    pub const ALL: [Arrangement; 4] = [
        Arrangement::Full4,
        Arrangement::ThreeWithinPlane,
        Arrangement::ThreeBetweenPlanes,
        Arrangement::Two,
    ];

    pub fn lisl_count(self) -> u32 {
        match self {
            Arrangement::Full4 => 4,
            Arrangement::ThreeWithinPlane | Arrangement::ThreeBetweenPlanes => 3,
            Arrangement::Two => 2,
        }
    }

    /// 1-based experiment number (1 = four LISLs … 4 = two LISLs).
    pub fn number(self) -> u8 {
        match self {
            Arrangement::Full4 => 1,
            Arrangement::ThreeWithinPlane => 2,
            Arrangement::ThreeBetweenPlanes => 3,
            Arrangement::Two => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Arrangement::Full4 => "full4",
            Arrangement::ThreeWithinPlane => "three_within_plane",
            Arrangement::ThreeBetweenPlanes => "three_between_planes",
            Arrangement::Two => "two",
        }
    }
}

impl fmt::Display for Arrangement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Arrangement {
    type Err = Error;

    /// Accepts the snake_case name or the experiment number `1`–`4`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        Arrangement::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s) || format!("{}", a.number()) == s)
            .ok_or_else(|| Error::Argument(format!("unknown arrangement `{s}`")))
    }
}

/// The four canonical neighbors of one satellite.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbors {
    /// Previous satellite in the same plane.
    pub prev_in_plane: SatId,
    /// Next satellite in the same plane.
    pub next_in_plane: SatId,
    /// Same-index satellite in the previous plane.
    pub prev_plane: SatId,
    /// Same-index satellite in the next plane.
    pub next_plane: SatId,
}

impl Neighbors {
    pub fn as_array(&self) -> [SatId; 4] {
        [
            self.prev_in_plane,
            self.next_in_plane,
            self.prev_plane,
            self.next_plane,
        ]
    }
}

/// Ids of the four neighbors of the satellite at 0-indexed `(plane, index)` in
/// a shell of `planes × per_plane` satellites.
pub fn neighbor_ids(plane: u32, index: u32, planes: u32, per_plane: u32) -> Result<Neighbors> {
    if planes < 3 || per_plane < 3 {
        return Err(Error::Argument(format!(
            "shell {planes}×{per_plane} is smaller than 3×3"
        )));
    }
    if plane >= planes || index >= per_plane {
        return Err(Error::Argument(format!(
            "(plane {plane}, index {index}) outside {planes}×{per_plane} shell"
        )));
    }
    let (p, i, o, q) = (
        i64::from(plane),
        i64::from(index),
        i64::from(planes),
        i64::from(per_plane),
    );
    // ids fit in u32 because planes * per_plane was validated by the caller's
    // shell, and every term below is < o * q + 1
    let id = |v: i64| v as SatId;
    Ok(Neighbors {
        prev_in_plane: id(p * q + (i - 1).rem_euclid(q) + 1),
        next_in_plane: id(p * q + (i + 1).rem_euclid(q) + 1),
        prev_plane: id(q * (p - 1).rem_euclid(o) + i + 1),
        next_plane: id(q * (p + 1).rem_euclid(o) + i + 1),
    })
}

/// Outgoing neighbor list kept under `arrangement`.
pub fn apply_arrangement(n: &Neighbors, arrangement: Arrangement) -> Vec<SatId> {
    match arrangement {
        Arrangement::Full4 => n.as_array().to_vec(),
        Arrangement::ThreeWithinPlane => vec![n.next_in_plane, n.prev_plane, n.next_plane],
        Arrangement::ThreeBetweenPlanes => vec![n.prev_in_plane, n.next_in_plane, n.next_plane],
        Arrangement::Two => vec![n.next_in_plane, n.next_plane],
    }
}

/// Persisted description of one satellite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SatelliteRecord {
    pub id: SatId,
    pub altitude_km: f64,
    pub lisl_count: u32,
    pub neighbors: Vec<SatId>,
}

/// One record per satellite of the shell, ordered by id.
pub fn generate_records(params: &ShellParams, arrangement: Arrangement) -> Result<Vec<SatelliteRecord>> {
    params.validate()?;
    let mut records = Vec::with_capacity(params.satellite_count() as usize);
    for id in 1..=params.satellite_count() {
        let (plane, index) = params.plane_index(id)?;
        let n = neighbor_ids(plane, index, params.planes, params.sats_per_plane)?;
        let neighbors = apply_arrangement(&n, arrangement);
        records.push(SatelliteRecord {
            id,
            altitude_km: params.altitude_km,
            lisl_count: neighbors.len() as u32,
            neighbors,
        });
    }
    Ok(records)
}

/// Checks every record on its own and against the set: unique ids, consistent
/// LISL counts, no self or duplicate neighbors, no dangling neighbor ids.
/// Returns the records sorted by id.
pub fn validate_records(mut records: Vec<SatelliteRecord>) -> Result<Vec<SatelliteRecord>> {
    records.sort_by_key(|r| r.id);
    let bad = |id: SatId, reason: String| Error::Record { id, reason };
    for pair in records.windows(2) {
        if pair[0].id == pair[1].id {
            return Err(bad(pair[0].id, "duplicate satellite id".into()));
        }
    }
    let ids: BTreeSet<SatId> = records.iter().map(|r| r.id).collect();
    for r in &records {
        if r.id == 0 {
            return Err(bad(0, "ids are 1-indexed".into()));
        }
        if !(r.altitude_km.is_finite() && r.altitude_km > 0.0) {
            return Err(bad(r.id, format!("altitude_km {} is not positive", r.altitude_km)));
        }
        if r.lisl_count > 4 {
            return Err(bad(r.id, format!("lisl_count {} exceeds 4", r.lisl_count)));
        }
        if r.neighbors.len() != r.lisl_count as usize {
            return Err(bad(
                r.id,
                format!(
                    "lisl_count {} but {} neighbors listed",
                    r.lisl_count,
                    r.neighbors.len()
                ),
            ));
        }
        let mut seen = BTreeSet::new();
        for &n in &r.neighbors {
            if n == r.id {
                return Err(bad(r.id, "lists itself as a neighbor".into()));
            }
            if !seen.insert(n) {
                return Err(bad(r.id, format!("neighbor {n} listed twice")));
            }
            if !ids.contains(&n) {
                return Err(bad(r.id, format!("neighbor {n} does not exist")));
            }
        }
    }
    Ok(records)
}

/// Hop-count diameter predicted for an arrangement. Halved terms use floor
/// division; the prediction is exact for even `planes` and `per_plane`.
pub fn max_hops_formula(arrangement: Arrangement, planes: u32, per_plane: u32) -> u32 {
    let (o, q) = (planes, per_plane);
    match arrangement {
        Arrangement::Full4 => (o + q) / 2,
        Arrangement::ThreeWithinPlane => o / 2 + q - 1,
        Arrangement::ThreeBetweenPlanes => o - 1 + q / 2,
        Arrangement::Two => o + q - 2,
    }
}

/// Records grouped by altitude, for callers that need per-shell views before
/// building graphs.
pub fn records_by_altitude(records: &[SatelliteRecord]) -> BTreeMap<Altitude, Vec<&SatelliteRecord>> {
    let mut out: BTreeMap<Altitude, Vec<&SatelliteRecord>> = BTreeMap::new();
    for r in records {
        out.entry(Altitude(r.altitude_km)).or_default().push(r);
    }
    out
}
