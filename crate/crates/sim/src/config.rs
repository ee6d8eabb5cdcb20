//! TOML run configuration. Every key is optional and defaults to the
//! reference scenario; unknown keys are rejected.
//!
//! ```toml
//! arrangement = "full4"   # full4 | three_within_plane | three_between_planes | two
//!
//! [shell]
//! planes = 72
//! sats_per_plane = 22
//! altitude_km = 540.0
//! inclination_deg = 53.0
//! phasing_offset = 0
//!
//! [traffic]
//! total_bytes = 1073741824     # 1 GiB
//! min_flow_bytes = 1024        # 1 KiB
//! max_flow_bytes = 10485760    # 10 MiB
//! seed = 0                     # ChaCha8 stream seed
//! default_weight = 1.0
//! # [[traffic.regions]] replaces the built-in region table when present
//!
//! [sim]
//! link_bitrate_bps = 100000000000
//! chunk_bytes = 65536
//! # buffer_cap_bytes = 1048576
//! # route_cache_cap = 100000
//! propagation_delay = true
//! link_usage = false
//!
//! [output]
//! # report = "report.txt"       # key/value report block
//! # runs_log = "runs.jsonl"     # one JSON line appended per run
//! ```

use std::path::{Path, PathBuf};

use lisl_core::engine::SimParams;
use lisl_core::orbital::ShellParams;
use lisl_core::topology::Arrangement;
use lisl_core::traffic::{default_regions, FlowGenParams, TrafficRegion, DEFAULT_WEIGHT};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub arrangement: Arrangement,
    pub shell: ShellParams,
    pub traffic: TrafficConfig,
    pub sim: SimConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrafficConfig {
    pub total_bytes: u64,
    pub min_flow_bytes: u64,
    pub max_flow_bytes: u64,
    pub seed: u64,
    pub default_weight: f64,
    pub regions: Option<Vec<TrafficRegion>>,
}

impl Default for TrafficConfig {
    fn default() -> Self {
        let f = FlowGenParams::default();
        TrafficConfig {
            total_bytes: f.total_bytes,
            min_flow_bytes: f.min_flow_bytes,
            max_flow_bytes: f.max_flow_bytes,
            seed: f.seed,
            default_weight: DEFAULT_WEIGHT,
            regions: None,
        }
    }
}

impl TrafficConfig {
    pub fn flow_params(&self) -> FlowGenParams {
        FlowGenParams {
            total_bytes: self.total_bytes,
            min_flow_bytes: self.min_flow_bytes,
            max_flow_bytes: self.max_flow_bytes,
            seed: self.seed,
        }
    }

    /// Configured regions, or the built-in table.
    pub fn regions(&self) -> Vec<TrafficRegion> {
        self.regions.clone().unwrap_or_else(default_regions)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub link_bitrate_bps: u64,
    pub chunk_bytes: u64,
    pub buffer_cap_bytes: Option<u64>,
    pub route_cache_cap: Option<usize>,
    /// Delay each hop by the light-speed travel time between the two
    /// satellites' epoch positions.
    pub propagation_delay: bool,
    pub link_usage: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        let p = SimParams::default();
        SimConfig {
            link_bitrate_bps: p.link_bitrate_bps,
            chunk_bytes: p.chunk_bytes,
            buffer_cap_bytes: p.buffer_cap_bytes,
            route_cache_cap: p.route_cache_cap,
            propagation_delay: true,
            link_usage: p.link_usage,
        }
    }
}

impl SimConfig {
    pub fn params(&self) -> SimParams {
        SimParams {
            link_bitrate_bps: self.link_bitrate_bps,
            chunk_bytes: self.chunk_bytes,
            buffer_cap_bytes: self.buffer_cap_bytes,
            route_cache_cap: self.route_cache_cap,
            link_usage: self.link_usage,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub report: Option<PathBuf>,
    pub runs_log: Option<PathBuf>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path).map_err(|e| SimError::ConfigFile {
            path: path.to_owned(),
            reason: e.to_string(),
        })?;
        let config = Config::from_toml(&text).map_err(|e| match e {
            SimError::ConfigFile { reason, .. } => SimError::ConfigFile {
                path: path.to_owned(),
                reason,
            },
            other => other,
        })?;
        Ok(config)
    }

    /// Parses and validates a TOML document.
    pub fn from_toml(text: &str) -> Result<Config> {
        let config: Config = toml::from_str(text).map_err(|e| SimError::ConfigFile {
            path: PathBuf::from("<inline>"),
            reason: e.message().to_owned(),
        })?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config is always serializable")
    }

    pub fn validate(&self) -> Result<()> {
        self.shell.validate()?;
        self.traffic.flow_params().validate()?;
        let w = self.traffic.default_weight;
        if !(w.is_finite() && w > 0.0) {
            return Err(lisl_core::Error::Config {
                field: "default_weight",
                reason: "must be positive".into(),
            }
            .into());
        }
        for r in self.traffic.regions() {
            r.validate()?;
        }
        self.sim.params().validate()?;
        Ok(())
    }
}
