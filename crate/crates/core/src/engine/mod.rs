//! Discrete-event store-and-forward replay of data flows over LISLs.
//!
//! Every flow starts at time 0 at its source and is cut into chunks of
//! `chunk_bytes` (the last one partial). A chunk crosses one directed link at
//! a time; each link sends one chunk at a time at `link_bitrate_bps`, serving
//! its queue first-in first-out. A relay must hold the whole chunk before
//! forwarding it. Links may carry a fixed propagation delay (see
//! [`Engine::with_link_delays`]); without one, a chunk arrives the instant its
//! transmission ends.
//!
//! Time is kept in integer nanoseconds; events at the same instant run in the
//! order they were scheduled.

mod queue;

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, VecDeque};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::routing::RouteTable;
use crate::topology::{Altitude, ShellGraph};
use crate::traffic::DataFlow;
use crate::{Error, Result, SatId};

pub use queue::Nanos;
use queue::EventQueue;

pub const NANOS_PER_SEC: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimParams {
    pub link_bitrate_bps: u64,
    pub chunk_bytes: u64,
    /// Per-relay buffer limit. `None` never drops.
    pub buffer_cap_bytes: Option<u64>,
    /// Upper bound on cached routes per shell. `None` is unbounded.
    pub route_cache_cap: Option<usize>,
    /// Collect per-link busy time into the report.
    pub link_usage: bool,
}

impl Default for SimParams {
    /// 100 Gbps links, 64 KiB chunks, unbounded buffers.
    fn default() -> Self {
        SimParams {
            link_bitrate_bps: 100_000_000_000,
            chunk_bytes: 64 * 1024,
            buffer_cap_bytes: None,
            route_cache_cap: None,
            link_usage: false,
        }
    }
}

impl SimParams {
    pub fn validate(&self) -> Result<()> {
        if self.link_bitrate_bps == 0 {
            return Err(Error::config("link_bitrate_bps", "must be positive"));
        }
        if self.chunk_bytes == 0 {
            return Err(Error::config("chunk_bytes", "must be positive"));
        }
        if let Some(cap) = self.buffer_cap_bytes {
            if cap < self.chunk_bytes {
                return Err(Error::config("buffer_cap_bytes", "must be at least chunk_bytes"));
            }
        }
        if self.route_cache_cap == Some(0) {
            return Err(Error::config("route_cache_cap", "must be positive when set"));
        }
        Ok(())
    }

    /// Time to put `bytes` on the wire, rounded up to the next nanosecond.
    pub fn transmission_ns(&self, bytes: u64) -> Nanos {
        let bits = u128::from(bytes) * 8 * u128::from(NANOS_PER_SEC);
        bits.div_ceil(u128::from(self.link_bitrate_bps)) as Nanos
    }
}

/// Outcome of offering a chunk to a relay's buffer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admission {
    Accept,
    DropFlow,
}

/// A relay accepts a chunk only if its buffered bytes stay within the cap.
pub fn drop_policy(buffered_bytes: u64, chunk_bytes: u64, cap: Option<u64>) -> Admission {
    match cap {
        Some(cap) if buffered_bytes + chunk_bytes > cap => Admission::DropFlow,
        _ => Admission::Accept,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkUsage {
    pub from: SatId,
    pub to: SatId,
    pub busy_ns: Nanos,
}

/// End-of-run statistics.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimReport {
    pub flow_count: u64,
    pub flows_completed: u64,
    pub flows_dropped: u64,
    pub bytes_delivered: u64,
    pub bytes_dropped: u64,
    pub sim_time_ns: Nanos,
    /// Filled in by the host; the core has no clock.
    pub wall_time_ms: u64,
    pub cache_hits: u64,
    pub cache_misses: u64,
    pub chunk_transmissions: u64,
    /// Flows that had no route, by flow id.
    pub unroutable: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_link_busy_ns: Option<Vec<LinkUsage>>,
}

impl SimReport {
    pub fn sim_time_secs(&self) -> f64 {
        self.sim_time_ns as f64 / NANOS_PER_SEC as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Progress {
    pub completed: u64,
    pub total: u64,
    pub sim_time_ns: Nanos,
}

/// One chunk crossing one link.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Transmission {
    pub flow_id: u64,
    pub chunk: u32,
    /// 0-based position of the link on the flow's route.
    pub hop: u32,
    pub from: SatId,
    pub to: SatId,
    pub start_ns: Nanos,
    pub end_ns: Nanos,
}

/// Event log of a traced run, in execution order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SimTrace {
    pub transmissions: Vec<Transmission>,
    /// `(flow_id, time)` for every completed flow.
    pub completions: Vec<(u64, Nanos)>,
    /// `(flow_id, time)` for every dropped flow.
    pub drops: Vec<(u64, Nanos)>,
}

/// Fixed one-way delay per directed link. Links not listed have none.
pub type LinkDelays = BTreeMap<(SatId, SatId), Nanos>;

type Observer<'a> = Box<dyn FnMut(Progress) -> core::result::Result<(), String> + 'a>;

/// Runs simulations with fixed parameters and an optional progress observer.
pub struct Engine<'a> {
    params: SimParams,
    delays: LinkDelays,
    observer: Option<Observer<'a>>,
}

impl<'a> Engine<'a> {
    pub fn new(params: SimParams) -> Result<Self> {
        params.validate()?;
        Ok(Engine {
            params,
            delays: LinkDelays::new(),
            observer: None,
        })
    }

    /// Adds a propagation delay between the end of a transmission and the
    /// chunk's arrival at the far end of the link.
    pub fn with_link_delays(&mut self, delays: LinkDelays) -> &mut Self {
        self.delays = delays;
        self
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    /// Registers an observer called after every flow completion. Returning
    /// `Err` aborts the run.
    pub fn on_progress<F>(&mut self, observer: F) -> &mut Self
    where
        F: FnMut(Progress) -> core::result::Result<(), String> + 'a,
    {
        self.observer = Some(Box::new(observer));
        self
    }

    pub fn run(&mut self, graphs: &BTreeMap<Altitude, ShellGraph>, flows: &[DataFlow]) -> Result<SimReport> {
        let mut routes = RouteTable::new(self.params.route_cache_cap);
        self.run_with_routes(graphs, flows, &mut routes)
    }

    /// Like [`Engine::run`] but reuses a caller-owned route table; the report's
    /// cache counters cover this run only.
    pub fn run_with_routes(
        &mut self,
        graphs: &BTreeMap<Altitude, ShellGraph>,
        flows: &[DataFlow],
        routes: &mut RouteTable,
    ) -> Result<SimReport> {
        self.execute(graphs, flows, routes, None)
    }

    pub fn run_traced(
        &mut self,
        graphs: &BTreeMap<Altitude, ShellGraph>,
        flows: &[DataFlow],
    ) -> Result<(SimReport, SimTrace)> {
        let mut routes = RouteTable::new(self.params.route_cache_cap);
        let mut trace = SimTrace::default();
        let report = self.execute(graphs, flows, &mut routes, Some(&mut trace))?;
        Ok((report, trace))
    }

    fn execute(
        &mut self,
        graphs: &BTreeMap<Altitude, ShellGraph>,
        flows: &[DataFlow],
        routes: &mut RouteTable,
        trace: Option<&mut SimTrace>,
    ) -> Result<SimReport> {
        let before = routes.stats();
        let mut sim = Sim::new(&self.params, &self.delays, flows.len(), trace);
        sim.inject(graphs, flows, routes);
        sim.run(self.observer.as_mut())?;
        let after = routes.stats();
        let mut report = sim.report();
        report.cache_hits = after.hits - before.hits;
        report.cache_misses = after.misses - before.misses;
        Ok(report)
    }
}

/// Runs `flows` once with `params` and no observer.
pub fn run(
    graphs: &BTreeMap<Altitude, ShellGraph>,
    flows: &[DataFlow],
    params: &SimParams,
) -> Result<SimReport> {
    Engine::new(*params)?.run(graphs, flows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Status {
    Active,
    Completed,
    Dropped,
}

struct FlowState {
    flow: DataFlow,
    path: Vec<SatId>,
    /// Link index for each hop of `path`.
    links: Vec<usize>,
    chunks: u32,
    delivered: u32,
    status: Status,
}

#[derive(Debug, Clone, Copy)]
struct Chunk {
    flow: usize,
    index: u32,
    bytes: u64,
    /// Links already crossed; the chunk sits at `path[hop]`.
    hop: u32,
}

struct Link {
    from: SatId,
    to: SatId,
    delay: Nanos,
    busy: bool,
    busy_ns: Nanos,
    queue: VecDeque<Chunk>,
}

enum Event {
    TransmissionComplete { link: usize, chunk: Chunk, start: Nanos },
    ChunkArrival(Chunk),
    FlowComplete(usize),
}

struct Sim<'p, 't> {
    params: &'p SimParams,
    delays: &'p LinkDelays,
    queue: EventQueue<Event>,
    flows: Vec<FlowState>,
    links: Vec<Link>,
    link_ids: BTreeMap<(SatId, SatId), usize>,
    buffered: BTreeMap<SatId, u64>,
    unresolved: usize,
    completed: u64,
    dropped: u64,
    bytes_delivered: u64,
    bytes_dropped: u64,
    transmissions: u64,
    last_resolution: Nanos,
    unroutable: Vec<u64>,
    trace: Option<&'t mut SimTrace>,
}

impl<'p, 't> Sim<'p, 't> {
    fn new(params: &'p SimParams, delays: &'p LinkDelays, flow_count: usize, trace: Option<&'t mut SimTrace>) -> Self {
        Sim {
            params,
            delays,
            queue: EventQueue::new(),
            flows: Vec::with_capacity(flow_count),
            links: Vec::new(),
            link_ids: BTreeMap::new(),
            buffered: BTreeMap::new(),
            unresolved: 0,
            completed: 0,
            dropped: 0,
            bytes_delivered: 0,
            bytes_dropped: 0,
            transmissions: 0,
            last_resolution: 0,
            unroutable: Vec::new(),
            trace,
        }
    }

    fn link_id(&mut self, from: SatId, to: SatId) -> usize {
        let links = &mut self.links;
        let delay = self.delays.get(&(from, to)).copied().unwrap_or(0);
        *self.link_ids.entry((from, to)).or_insert_with(|| {
            links.push(Link {
                from,
                to,
                delay,
                busy: false,
                busy_ns: 0,
                queue: VecDeque::new(),
            });
            links.len() - 1
        })
    }

    fn inject(&mut self, graphs: &BTreeMap<Altitude, ShellGraph>, flows: &[DataFlow], routes: &mut RouteTable) {
        let chunk_bytes = self.params.chunk_bytes;
        for flow in flows {
            let f = self.flows.len();
            let chunks = flow.size_bytes.div_ceil(chunk_bytes) as u32;
            let mut state = FlowState {
                flow: *flow,
                path: Vec::new(),
                links: Vec::new(),
                chunks,
                delivered: 0,
                status: Status::Active,
            };
            match routes.route(graphs, flow.src, flow.dst) {
                Ok(route) => {
                    state.path = route.path().to_vec();
                    state.links = route.path().windows(2).map(|w| self.link_id(w[0], w[1])).collect();
                    self.flows.push(state);
                    self.unresolved += 1;
                    if chunks == 0 || self.flows[f].links.is_empty() {
                        self.queue.schedule(0, Event::FlowComplete(f));
                        continue;
                    }
                    let first = self.flows[f].links[0];
                    for index in 0..chunks {
                        let offset = u64::from(index) * chunk_bytes;
                        let bytes = chunk_bytes.min(flow.size_bytes - offset);
                        self.enqueue(first, Chunk { flow: f, index, bytes, hop: 0 });
                    }
                }
                Err(_) => {
                    state.status = Status::Dropped;
                    self.flows.push(state);
                    self.unroutable.push(flow.flow_id);
                    self.dropped += 1;
                    self.bytes_dropped += flow.size_bytes;
                    if let Some(t) = self.trace.as_deref_mut() {
                        t.drops.push((flow.flow_id, 0));
                    }
                }
            }
        }
    }

    fn enqueue(&mut self, link: usize, chunk: Chunk) {
        self.links[link].queue.push_back(chunk);
        if !self.links[link].busy {
            self.start_next(link);
        }
    }

    fn start_next(&mut self, link: usize) {
        let Some(chunk) = self.links[link].queue.pop_front() else {
            return;
        };
        let now = self.queue.now();
        let end = now + self.params.transmission_ns(chunk.bytes);
        self.links[link].busy = true;
        self.queue.schedule(end, Event::TransmissionComplete { link, chunk, start: now });
    }

    fn run(&mut self, mut observer: Option<&mut Observer<'_>>) -> Result<()> {
        while self.unresolved > 0 {
            let Some(event) = self.queue.pop() else {
                break;
            };
            let now = self.queue.now();
            match event {
                Event::TransmissionComplete { link, chunk, start } => {
                    self.transmissions += 1;
                    let l = &mut self.links[link];
                    l.busy = false;
                    l.busy_ns += now - start;
                    let (from, to, delay) = (l.from, l.to, l.delay);
                    if chunk.hop > 0 {
                        self.release(from, chunk.bytes);
                    }
                    self.start_next(link);
                    if let Some(t) = self.trace.as_deref_mut() {
                        t.transmissions.push(Transmission {
                            flow_id: self.flows[chunk.flow].flow.flow_id,
                            chunk: chunk.index,
                            hop: chunk.hop,
                            from,
                            to,
                            start_ns: start,
                            end_ns: now,
                        });
                    }
                    if self.flows[chunk.flow].status == Status::Active {
                        let arrived = Chunk {
                            hop: chunk.hop + 1,
                            ..chunk
                        };
                        self.queue.schedule(now + delay, Event::ChunkArrival(arrived));
                    }
                }
                Event::ChunkArrival(chunk) => self.arrive(chunk),
                Event::FlowComplete(f) => {
                    let flow = &mut self.flows[f];
                    flow.status = Status::Completed;
                    self.bytes_delivered += flow.flow.size_bytes;
                    if let Some(t) = self.trace.as_deref_mut() {
                        t.completions.push((flow.flow.flow_id, now));
                    }
                    self.completed += 1;
                    self.resolve(now);
                    if let Some(cb) = observer.as_mut() {
                        let progress = Progress {
                            completed: self.completed,
                            total: self.flows.len() as u64,
                            sim_time_ns: now,
                        };
                        cb(progress).map_err(Error::ObserverAborted)?;
                    }
                }
            }
        }
        Ok(())
    }

    fn arrive(&mut self, chunk: Chunk) {
        let flow = &mut self.flows[chunk.flow];
        if flow.status != Status::Active {
            return;
        }
        let hop = chunk.hop as usize;
        if hop == flow.links.len() {
            flow.delivered += 1;
            if flow.delivered == flow.chunks {
                let now = self.queue.now();
                self.queue.schedule(now, Event::FlowComplete(chunk.flow));
            }
            return;
        }
        let relay = flow.path[hop];
        let link = flow.links[hop];
        let held = self.buffered.get(&relay).copied().unwrap_or(0);
        match drop_policy(held, chunk.bytes, self.params.buffer_cap_bytes) {
            Admission::Accept => {
                if self.params.buffer_cap_bytes.is_some() {
                    self.buffered.insert(relay, held + chunk.bytes);
                }
                self.enqueue(link, chunk);
            }
            Admission::DropFlow => self.drop_flow(chunk.flow),
        }
    }

    fn release(&mut self, relay: SatId, bytes: u64) {
        if self.params.buffer_cap_bytes.is_some() {
            if let Some(held) = self.buffered.get_mut(&relay) {
                *held -= bytes;
            }
        }
    }

    /// Marks the flow dropped and purges its queued chunks everywhere. Chunks
    /// already on the wire finish and are discarded on completion.
    fn drop_flow(&mut self, f: usize) {
        let now = self.queue.now();
        self.flows[f].status = Status::Dropped;
        self.dropped += 1;
        self.bytes_dropped += self.flows[f].flow.size_bytes;
        if let Some(t) = self.trace.as_deref_mut() {
            t.drops.push((self.flows[f].flow.flow_id, now));
        }
        for hop in 0..self.flows[f].links.len() {
            let link = self.flows[f].links[hop];
            let mut purged = 0;
            self.links[link].queue.retain(|c| {
                let ours = c.flow == f;
                if ours {
                    purged += c.bytes;
                }
                !ours
            });
            // chunks queued at a relay were admitted to its buffer
            if hop > 0 && purged > 0 {
                let relay = self.flows[f].path[hop];
                self.release(relay, purged);
            }
        }
        self.resolve(now);
    }

    fn resolve(&mut self, now: Nanos) {
        self.unresolved -= 1;
        self.last_resolution = self.last_resolution.max(now);
    }

    fn report(&self) -> SimReport {
        let per_link_busy_ns = self.params.link_usage.then(|| {
            let mut usage: Vec<LinkUsage> = self
                .links
                .iter()
                .map(|l| LinkUsage {
                    from: l.from,
                    to: l.to,
                    busy_ns: l.busy_ns,
                })
                .collect();
            usage.sort_by_key(|u| (u.from, u.to));
            usage
        });
        SimReport {
            flow_count: self.flows.len() as u64,
            flows_completed: self.completed,
            flows_dropped: self.dropped,
            bytes_delivered: self.bytes_delivered,
            bytes_dropped: self.bytes_dropped,
            sim_time_ns: self.last_resolution,
            wall_time_ms: 0,
            cache_hits: 0,
            cache_misses: 0,
            chunk_transmissions: self.transmissions,
            unroutable: self.unroutable.clone(),
            per_link_busy_ns,
        }
    }
}
