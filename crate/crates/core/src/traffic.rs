//! Region-weighted endpoint selection and budgeted flow generation.
//!
//! Flow lists are reproducible: generation draws from a `ChaCha8Rng` seeded
//! with [`rand::SeedableRng::seed_from_u64`], in a fixed order per flow
//! (source, destination with re-draws, then size).

use alloc::string::String;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::orbital::{subsatellite_point, GeoCoord, SatelliteState};
use crate::{Error, Result, SatId, GIB, KIB, MIB};

/// Weight of a satellite that lies outside every region.
pub const DEFAULT_WEIGHT: f64 = 1.0;

/// Latitude/longitude box with a selection weight. Bounds are inclusive.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrafficRegion {
    pub name: String,
    pub lat_min: f64,
    pub lat_max: f64,
    pub lon_min: f64,
    pub lon_max: f64,
    pub weight: f64,
}

impl TrafficRegion {
    fn new(name: &str, lat: (f64, f64), lon: (f64, f64), weight: f64) -> Self {
        TrafficRegion {
            name: name.into(),
            lat_min: lat.0,
            lat_max: lat.1,
            lon_min: lon.0,
            lon_max: lon.1,
            weight,
        }
    }

    pub fn contains(&self, pos: &GeoCoord) -> bool {
        (self.lat_min..=self.lat_max).contains(&pos.lat_deg)
            && (self.lon_min..=self.lon_max).contains(&pos.lon_deg)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.lat_min, self.lat_max, self.lon_min, self.lon_max, self.weight]
            .iter()
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::config("regions", alloc::format!("{}: bounds must be finite", self.name)));
        }
        if self.lat_min > self.lat_max {
            return Err(Error::config("regions", alloc::format!("{}: lat_min > lat_max", self.name)));
        }
        if self.lon_min > self.lon_max {
            return Err(Error::config("regions", alloc::format!("{}: lon_min > lon_max", self.name)));
        }
        if self.weight <= 0.0 {
            return Err(Error::config("regions", alloc::format!("{}: weight must be > 0", self.name)));
        }
        Ok(())
    }
}

/// Built-in population regions. North America spans latitudes 25°–50°.
pub fn default_regions() -> Vec<TrafficRegion> {
    alloc::vec![
        TrafficRegion::new("North America", (25.0, 50.0), (-130.0, -60.0), 8.0),
        TrafficRegion::new("Europe", (35.0, 60.0), (-15.0, 45.0), 9.0),
        TrafficRegion::new("Asia", (10.0, 55.0), (60.0, 150.0), 9.5),
        TrafficRegion::new("Middle East", (12.0, 38.0), (30.0, 65.0), 5.0),
        TrafficRegion::new("South America", (-55.0, 15.0), (-85.0, -30.0), 4.0),
        TrafficRegion::new("Africa", (-35.0, 37.0), (-20.0, 55.0), 3.0),
        TrafficRegion::new("Oceania", (-50.0, -10.0), (110.0, 180.0), 2.0),
    ]
}

/// Highest weight among the regions containing `pos`, or `default_weight`.
pub fn region_weight(pos: &GeoCoord, regions: &[TrafficRegion], default_weight: f64) -> f64 {
    regions
        .iter()
        .filter(|r| r.contains(pos))
        .map(|r| r.weight)
        .reduce(f64::max)
        .unwrap_or(default_weight)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightedSatellite {
    pub id: SatId,
    pub weight: f64,
}

pub fn assign_weights(
    states: &[SatelliteState],
    inclination_deg: f64,
    regions: &[TrafficRegion],
    default_weight: f64,
) -> Vec<WeightedSatellite> {
    states
        .iter()
        .map(|s| WeightedSatellite {
            id: s.id,
            weight: region_weight(&subsatellite_point(s, inclination_deg), regions, default_weight),
        })
        .collect()
}

/// Draws flow endpoints with probability proportional to satellite weight.
#[derive(Debug, Clone)]
pub struct EndpointSampler {
    ids: Vec<SatId>,
    cumulative: Vec<f64>,
}

impl EndpointSampler {
    pub fn new(weights: &[WeightedSatellite]) -> Result<Self> {
        if weights.len() < 2 {
            return Err(Error::TooFewSatellites(weights.len()));
        }
        let mut total = 0.0;
        let mut cumulative = Vec::with_capacity(weights.len());
        for w in weights {
            if !(w.weight.is_finite() && w.weight > 0.0) {
                return Err(Error::config(
                    "weight",
                    alloc::format!("satellite {} has weight {}", w.id, w.weight),
                ));
            }
            total += w.weight;
            cumulative.push(total);
        }
        Ok(EndpointSampler {
            ids: weights.iter().map(|w| w.id).collect(),
            cumulative,
        })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let total = *self.cumulative.last().expect("at least two satellites");
        let x = rng.random::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= x)
            .min(self.cumulative.len() - 1)
    }

    /// Source, then destination re-drawn until it differs from the source.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (SatId, SatId) {
        let src = self.draw(rng);
        let mut dst = self.draw(rng);
        while dst == src {
            dst = self.draw(rng);
        }
        (self.ids[src], self.ids[dst])
    }
}

/// One source → destination transfer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DataFlow {
    pub flow_id: u64,
    pub src: SatId,
    pub dst: SatId,
    pub size_bytes: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowGenParams {
    pub total_bytes: u64,
    pub min_flow_bytes: u64,
    pub max_flow_bytes: u64,
    pub seed: u64,
}

impl Default for FlowGenParams {
    /// 1 GiB split into flows of 1 KiB to 10 MiB.
    fn default() -> Self {
        FlowGenParams {
            total_bytes: GIB,
            min_flow_bytes: KIB,
            max_flow_bytes: 10 * MIB,
            seed: 0,
        }
    }
}

impl FlowGenParams {
    pub fn validate(&self) -> Result<()> {
        if self.total_bytes == 0 {
            return Err(Error::config("total_bytes", "must be positive"));
        }
        if self.min_flow_bytes == 0 {
            return Err(Error::config("min_flow_bytes", "must be positive"));
        }
        if self.min_flow_bytes > self.max_flow_bytes {
            return Err(Error::config("min_flow_bytes", "must not exceed max_flow_bytes"));
        }
        if self.max_flow_bytes > self.total_bytes {
            return Err(Error::config("max_flow_bytes", "must not exceed total_bytes"));
        }
        Ok(())
    }
}

/// Generates flows with uniform sizes until `total_bytes` is used up. The last
/// flow is truncated so the sizes sum to the budget exactly.
pub fn generate_flows(params: &FlowGenParams, weights: &[WeightedSatellite]) -> Result<Vec<DataFlow>> {
    params.validate()?;
    let sampler = EndpointSampler::new(weights)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut flows = Vec::new();
    let mut remaining = params.total_bytes;
    while remaining > 0 {
        let (src, dst) = sampler.sample(&mut rng);
        let size = rng
            .random_range(params.min_flow_bytes..=params.max_flow_bytes)
            .min(remaining);
        flows.push(DataFlow {
            flow_id: flows.len() as u64,
            src,
            dst,
            size_bytes: size,
        });
        remaining -= size;
    }
    Ok(flows)
}
