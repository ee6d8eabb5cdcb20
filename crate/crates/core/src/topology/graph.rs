use alloc::collections::{BTreeMap, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::orbital::{propagation_delay_ns, SatelliteState};
use crate::topology::SatelliteRecord;
use crate::{Error, Result, SatId};

/// Shell key. Ordered with `f64::total_cmp` so it can index maps.
#[derive(Debug, Clone, Copy)]
pub struct Altitude(pub f64);

impl PartialEq for Altitude {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Altitude {}

impl PartialOrd for Altitude {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Altitude {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Directed LISL graph of one shell.
///
/// Nodes are stored densely in ascending id order; each adjacency list is
/// sorted by neighbor id so breadth-first searches expand in id order.
#[derive(Debug, Clone)]
pub struct ShellGraph {
    altitude_km: f64,
    ids: Vec<SatId>,
    states: Vec<SatelliteState>,
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
    fingerprint: u64,
}

impl ShellGraph {
    pub fn altitude_km(&self) -> f64 {
        self.altitude_km
    }

    pub fn node_count(&self) -> usize {
        self.ids.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, id: SatId) -> bool {
        self.index_of(id).is_some()
    }

    pub fn ids(&self) -> &[SatId] {
        &self.ids
    }

    pub fn states(&self) -> &[SatelliteState] {
        &self.states
    }

    pub fn state(&self, id: SatId) -> Option<&SatelliteState> {
        self.index_of(id).map(|k| &self.states[k])
    }

    pub fn has_edge(&self, from: SatId, to: SatId) -> bool {
        match (self.index_of(from), self.index_of(to)) {
            (Some(u), Some(v)) => self.adjacency[u].binary_search(&(v as u32)).is_ok(),
            _ => false,
        }
    }

    pub fn out_degree(&self, id: SatId) -> Option<usize> {
        self.index_of(id).map(|k| self.adjacency[k].len())
    }

    /// Outgoing neighbors of `id` in ascending id order.
    pub fn successors(&self, id: SatId) -> impl Iterator<Item = SatId> + '_ {
        let adj: &[u32] = match self.index_of(id) {
            Some(k) => &self.adjacency[k],
            None => &[],
        };
        adj.iter().map(|&v| self.ids[v as usize])
    }

    /// All directed edges, ordered by source then destination id.
    pub fn edges(&self) -> impl Iterator<Item = (SatId, SatId)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(move |(u, adj)| adj.iter().map(move |&v| (self.ids[u], self.ids[v as usize])))
    }

    /// Light-speed delay of every directed edge, from epoch positions.
    pub fn propagation_delays(&self, inclination_deg: f64) -> BTreeMap<(SatId, SatId), u64> {
        self.edges()
            .map(|(u, v)| {
                let (a, b) = (self.state(u).unwrap(), self.state(v).unwrap());
                ((u, v), propagation_delay_ns(a, b, inclination_deg))
            })
            .collect()
    }

    /// Hash of the node set and edge set. Two graphs with the same fingerprint
    /// are treated as the same topology by the route cache.
    pub fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub(crate) fn index_of(&self, id: SatId) -> Option<usize> {
        self.ids.binary_search(&id).ok()
    }

    pub(crate) fn id_at(&self, index: usize) -> SatId {
        self.ids[index]
    }

    pub(crate) fn adjacency(&self, index: usize) -> &[u32] {
        &self.adjacency[index]
    }

    /// Hop distances from the node at dense `index`; `u32::MAX` marks
    /// unreachable nodes.
    pub(crate) fn hop_distances(&self, index: usize, dist: &mut Vec<u32>, queue: &mut VecDeque<u32>) {
        dist.clear();
        dist.resize(self.ids.len(), u32::MAX);
        queue.clear();
        dist[index] = 0;
        queue.push_back(index as u32);
        while let Some(u) = queue.pop_front() {
            let d = dist[u as usize] + 1;
            for &v in &self.adjacency[u as usize] {
                if dist[v as usize] == u32::MAX {
                    dist[v as usize] = d;
                    queue.push_back(v);
                }
            }
        }
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(0xcbf2_9ce4_8422_2325)
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 ^= u64::from(b);
            self.0 = self.0.wrapping_mul(0x0100_0000_01b3);
        }
    }
}

/// Builds one graph per altitude present in `records`.
///
/// The first pass creates every node, grouped by altitude; the second pass adds
/// a directed edge `u → v` for each `v` in `u`'s neighbor list. Every record
/// needs a matching entry in `states`, and edges may not cross altitudes.
pub fn build_graphs(
    records: &[SatelliteRecord],
    states: &[SatelliteState],
) -> Result<BTreeMap<Altitude, ShellGraph>> {
    let state_of: BTreeMap<SatId, &SatelliteState> = states.iter().map(|s| (s.id, s)).collect();

    // pass 1: nodes
    let mut shells: BTreeMap<Altitude, Vec<(SatId, SatelliteState)>> = BTreeMap::new();
    let mut home: BTreeMap<SatId, Altitude> = BTreeMap::new();
    for r in records {
        let state = state_of
            .get(&r.id)
            .ok_or_else(|| Error::Graph(format!("satellite {} has no orbital state", r.id)))?;
        let alt = Altitude(r.altitude_km);
        if home.insert(r.id, alt).is_some() {
            return Err(Error::Graph(format!("satellite {} appears twice", r.id)));
        }
        let mut state = **state;
        state.altitude_km = r.altitude_km;
        shells.entry(alt).or_default().push((r.id, state));
    }

    let mut graphs: BTreeMap<Altitude, ShellGraph> = shells
        .into_iter()
        .map(|(alt, mut nodes)| {
            nodes.sort_by_key(|(id, _)| *id);
            let n = nodes.len();
            let (ids, states) = nodes.into_iter().unzip();
            let graph = ShellGraph {
                altitude_km: alt.0,
                ids,
                states,
                adjacency: vec![Vec::new(); n],
                edge_count: 0,
                fingerprint: 0,
            };
            (alt, graph)
        })
        .collect();

    // pass 2: edges
    for r in records {
        let alt = home[&r.id];
        let graph = graphs.get_mut(&alt).expect("shell created in pass 1");
        let u = graph.index_of(r.id).expect("node created in pass 1");
        for &n in &r.neighbors {
            match graph.index_of(n) {
                Some(v) => graph.adjacency[u].push(v as u32),
                None if home.contains_key(&n) => {
                    return Err(Error::Graph(format!(
                        "edge {} → {n} crosses shells ({} km → {} km)",
                        r.id, alt.0, home[&n].0
                    )))
                }
                None => {
                    return Err(Error::Graph(format!(
                        "edge {} → {n} points to an unknown satellite",
                        r.id
                    )))
                }
            }
        }
    }

    for graph in graphs.values_mut() {
        let mut h = Fnv::new();
        h.write(&graph.altitude_km.to_bits().to_le_bytes());
        for (u, adj) in graph.adjacency.iter_mut().enumerate() {
            adj.sort_unstable();
            adj.dedup();
            h.write(&graph.ids[u].to_le_bytes());
            h.write(&(adj.len() as u32).to_le_bytes());
            for &v in adj.iter() {
                h.write(&graph.ids[v as usize].to_le_bytes());
            }
        }
        graph.edge_count = graph.adjacency.iter().map(Vec::len).sum();
        graph.fingerprint = h.0;
    }
    Ok(graphs)
}

/// Longest shortest-path hop count over all ordered node pairs.
pub fn diameter(graph: &ShellGraph) -> Result<u32> {
    let mut dist = Vec::new();
    let mut queue = VecDeque::new();
    let mut best = 0;
    for s in 0..graph.node_count() {
        graph.hop_distances(s, &mut dist, &mut queue);
        for (t, &d) in dist.iter().enumerate() {
            if d == u32::MAX {
                return Err(Error::NotStronglyConnected {
                    from: graph.id_at(s),
                    to: graph.id_at(t),
                });
            }
            best = best.max(d);
        }
    }
    Ok(best)
}

/// Succeeds iff every node reaches every other node. On failure the error
/// names one unreachable ordered pair.
pub fn strong_connectivity(graph: &ShellGraph) -> Result<()> {
    let n = graph.node_count();
    if n == 0 {
        return Ok(());
    }
    let mut dist = Vec::new();
    let mut queue = VecDeque::new();
    graph.hop_distances(0, &mut dist, &mut queue);
    if let Some(t) = dist.iter().position(|&d| d == u32::MAX) {
        return Err(Error::NotStronglyConnected {
            from: graph.id_at(0),
            to: graph.id_at(t),
        });
    }

    // everything must also reach node 0: search the reversed graph
    let mut reverse = vec![Vec::new(); n];
    for u in 0..n {
        for &v in graph.adjacency(u) {
            reverse[v as usize].push(u as u32);
        }
    }
    let mut seen = vec![false; n];
    seen[0] = true;
    queue.clear();
    queue.push_back(0u32);
    while let Some(u) = queue.pop_front() {
        for &v in &reverse[u as usize] {
            if !seen[v as usize] {
                seen[v as usize] = true;
                queue.push_back(v);
            }
        }
    }
    match seen.iter().position(|&s| !s) {
        Some(t) => Err(Error::NotStronglyConnected {
            from: graph.id_at(t),
            to: graph.id_at(0),
        }),
        None => Ok(()),
    }
}
