//! The full run: records → graphs → weights → flows → engine.

use std::collections::BTreeMap;
use std::io::{IsTerminal, Write};
use std::path::Path;
use std::time::Instant;

use lisl_core::engine::{Engine, LinkDelays, Progress, SimReport};
use lisl_core::orbital::place_shell;
use lisl_core::topology::{build_graphs, generate_records, Altitude, SatelliteRecord, ShellGraph};
use lisl_core::traffic::{assign_weights, generate_flows, DataFlow, WeightedSatellite};

use crate::config::Config;
use crate::error::{Result, SimError};
use crate::records::read_records;

/// Everything a run needs, built but not yet simulated.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub graphs: BTreeMap<Altitude, ShellGraph>,
    pub weights: Vec<WeightedSatellite>,
    pub flows: Vec<DataFlow>,
}

/// Graphs for `records`, positioned by the configured shell geometry.
pub fn graphs_for(config: &Config, records: &[SatelliteRecord]) -> Result<BTreeMap<Altitude, ShellGraph>> {
    let states = place_shell(&config.shell)?;
    Ok(build_graphs(records, &states)?)
}

/// Endpoint weights for every satellite present in `graphs`.
pub fn weights_for(config: &Config, graphs: &BTreeMap<Altitude, ShellGraph>) -> Vec<WeightedSatellite> {
    let regions = config.traffic.regions();
    let mut weights: Vec<WeightedSatellite> = graphs
        .values()
        .flat_map(|g| {
            assign_weights(
                g.states(),
                config.shell.inclination_deg,
                &regions,
                config.traffic.default_weight,
            )
        })
        .collect();
    weights.sort_by_key(|w| w.id);
    weights
}

/// Builds graphs, weights and flows. `seed` overrides `traffic.seed`.
pub fn build_scenario(config: &Config, records: &[SatelliteRecord], seed: Option<u64>) -> Result<Scenario> {
    let graphs = graphs_for(config, records)?;
    let weights = weights_for(config, &graphs);
    let mut flow_params = config.traffic.flow_params();
    if let Some(seed) = seed {
        flow_params.seed = seed;
    }
    let flows = generate_flows(&flow_params, &weights)?;
    Ok(Scenario { graphs, weights, flows })
}

/// Per-link propagation delays, or none when disabled in the config.
pub fn link_delays(config: &Config, graphs: &BTreeMap<Altitude, ShellGraph>) -> LinkDelays {
    if !config.sim.propagation_delay {
        return LinkDelays::new();
    }
    graphs
        .values()
        .flat_map(|g| g.propagation_delays(config.shell.inclination_deg))
        .collect()
}

/// Simulates a built scenario and stamps the wall time.
pub fn run_scenario(config: &Config, scenario: &Scenario, show_progress: bool) -> Result<SimReport> {
    let started = Instant::now();
    let mut engine = Engine::new(config.sim.params())?;
    engine.with_link_delays(link_delays(config, &scenario.graphs));
    let mut bar = ProgressBar::default();
    if show_progress {
        engine.on_progress(|p| {
            bar.update(p);
            Ok(())
        });
    }
    let result = engine.run(&scenario.graphs, &scenario.flows);
    drop(engine);
    if show_progress {
        bar.finish();
    }
    let mut report = result?;
    report.wall_time_ms = started.elapsed().as_millis() as u64;
    Ok(report)
}

/// Loads a record directory and runs it. Record sets that disagree with the
/// configured shell are load errors.
pub fn simulate_dir(config: &Config, dir: &Path, seed: Option<u64>) -> Result<SimReport> {
    let records = read_records(dir)?;
    let scenario = build_scenario(config, &records, seed).map_err(|e| match e {
        SimError::Core(inner @ lisl_core::Error::Graph(_)) => SimError::Load {
            path: dir.to_owned(),
            reason: inner.to_string(),
        },
        other => other,
    })?;
    run_scenario(config, &scenario, std::io::stderr().is_terminal())
}

/// Same run as generating records to disk and simulating them, without the
/// disk.
pub fn simulate_in_memory(config: &Config, seed: Option<u64>) -> Result<SimReport> {
    let records = generate_records(&config.shell, config.arrangement)?;
    let scenario = build_scenario(config, &records, seed)?;
    run_scenario(config, &scenario, false)
}

/// Single-line progress indicator on stderr.
#[derive(Default)]
struct ProgressBar {
    shown: Option<u64>,
}

impl ProgressBar {
    const WIDTH: u64 = 40;

    fn update(&mut self, p: Progress) {
        let pct = (p.completed * 100).checked_div(p.total).unwrap_or(100);
        if self.shown == Some(pct) {
            return;
        }
        self.shown = Some(pct);
        let filled = (pct * Self::WIDTH / 100) as usize;
        let mut err = std::io::stderr().lock();
        let _ = write!(
            err,
            "\r[{}{}] {:3}% {}/{} flows, t = {:.6} s",
            "#".repeat(filled),
            " ".repeat(Self::WIDTH as usize - filled),
            pct,
            p.completed,
            p.total,
            p.sim_time_ns as f64 / 1e9
        );
        let _ = err.flush();
    }

    fn finish(&self) {
        if self.shown.is_some() {
            eprintln!();
        }
    }
}
