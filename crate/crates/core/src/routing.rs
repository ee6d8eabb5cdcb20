//! Centralized hop-count routing with a transparent route cache.
//!
//! Paths are found with a breadth-first search that expands neighbors in
//! ascending id order, so among equally short paths the same one is always
//! returned.

use alloc::collections::{BTreeMap, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::topology::{Altitude, ShellGraph};
use crate::{Error, Result, SatId};

/// Path from source to destination, both inclusive.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Route {
    path: Vec<SatId>,
}

impl Route {
    /// Wraps a path without checking it against any graph.
    pub fn from_path(path: Vec<SatId>) -> Result<Self> {
        if path.is_empty() {
            return Err(Error::Argument("a route needs at least one satellite".into()));
        }
        Ok(Route { path })
    }

    pub fn path(&self) -> &[SatId] {
        &self.path
    }

    pub fn src(&self) -> SatId {
        self.path[0]
    }

    pub fn dst(&self) -> SatId {
        self.path[self.path.len() - 1]
    }

    pub fn hops(&self) -> usize {
        self.path.len() - 1
    }

    /// True if every step is an edge of `graph` and no satellite repeats.
    pub fn is_valid_in(&self, graph: &ShellGraph) -> bool {
        let mut seen = self.path.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len() == self.path.len()
            && self.path.iter().all(|&id| graph.contains(id))
            && self.path.windows(2).all(|w| graph.has_edge(w[0], w[1]))
    }

    /// The satellite after `current` on this route.
    pub fn next_hop(&self, current: SatId) -> Result<SatId> {
        if current == self.dst() {
            return Err(Error::AlreadyAtDestination(current));
        }
        let pos = self
            .path
            .iter()
            .position(|&id| id == current)
            .ok_or(Error::NotOnRoute(current))?;
        Ok(self.path[pos + 1])
    }
}

pub fn next_hop(route: &Route, current: SatId) -> Result<SatId> {
    route.next_hop(current)
}

/// Minimum-hop route from `src` to `dst`.
pub fn shortest_path(graph: &ShellGraph, src: SatId, dst: SatId) -> Result<Route> {
    let s = graph.index_of(src).ok_or(Error::UnknownSatellite(src))?;
    let t = graph.index_of(dst).ok_or(Error::UnknownSatellite(dst))?;
    if s == t {
        return Ok(Route { path: vec![src] });
    }
    let mut parent = vec![u32::MAX; graph.node_count()];
    parent[s] = s as u32;
    let mut queue = VecDeque::from([s as u32]);
    'search: while let Some(u) = queue.pop_front() {
        for &v in graph.adjacency(u as usize) {
            if parent[v as usize] == u32::MAX {
                parent[v as usize] = u;
                if v as usize == t {
                    break 'search;
                }
                queue.push_back(v);
            }
        }
    }
    if parent[t] == u32::MAX {
        return Err(Error::Unroutable { from: src, to: dst });
    }
    let mut path = vec![dst];
    let mut k = t;
    while k != s {
        k = parent[k] as usize;
        path.push(graph.id_at(k));
    }
    path.reverse();
    Ok(Route { path })
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheStats {
    pub hits: u64,
    pub misses: u64,
    pub entries: usize,
}

impl core::ops::Add for CacheStats {
    type Output = CacheStats;

    fn add(self, rhs: CacheStats) -> CacheStats {
        CacheStats {
            hits: self.hits + rhs.hits,
            misses: self.misses + rhs.misses,
            entries: self.entries + rhs.entries,
        }
    }
}

/// Memoizes [`shortest_path`] for one graph.
///
/// The cache binds to the first graph it routes on (by fingerprint) and
/// refuses any other. With a capacity limit, routes computed once the cache
/// is full are returned but not stored.
#[derive(Debug, Clone, Default)]
pub struct RouteCache {
    graph: Option<u64>,
    routes: BTreeMap<(SatId, SatId), Route>,
    capacity: Option<usize>,
    hits: u64,
    misses: u64,
}

impl RouteCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity_limit(capacity: Option<usize>) -> Self {
        RouteCache {
            capacity,
            ..Self::default()
        }
    }

    pub fn route(&mut self, graph: &ShellGraph, src: SatId, dst: SatId) -> Result<Route> {
        match self.graph {
            Some(fp) if fp != graph.fingerprint() => return Err(Error::CacheGraphMismatch),
            Some(_) => {}
            None => self.graph = Some(graph.fingerprint()),
        }
        if let Some(route) = self.routes.get(&(src, dst)) {
            self.hits += 1;
            return Ok(route.clone());
        }
        self.misses += 1;
        let route = shortest_path(graph, src, dst)?;
        if self.capacity.is_none_or(|cap| self.routes.len() < cap) {
            self.routes.insert((src, dst), route.clone());
        }
        Ok(route)
    }

    pub fn get(&self, src: SatId, dst: SatId) -> Option<&Route> {
        self.routes.get(&(src, dst))
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits,
            misses: self.misses,
            entries: self.routes.len(),
        }
    }
}

/// One [`RouteCache`] per shell, for routing across a set of isolated graphs.
#[derive(Debug, Clone, Default)]
pub struct RouteTable {
    caches: BTreeMap<Altitude, RouteCache>,
    capacity: Option<usize>,
}

impl RouteTable {
    pub fn new(capacity: Option<usize>) -> Self {
        RouteTable {
            caches: BTreeMap::new(),
            capacity,
        }
    }

    /// Routes within whichever shell holds `src`. Endpoints in different
    /// shells are unroutable.
    pub fn route(&mut self, graphs: &BTreeMap<Altitude, ShellGraph>, src: SatId, dst: SatId) -> Result<Route> {
        let (alt, graph) = graphs
            .iter()
            .find(|(_, g)| g.contains(src))
            .ok_or(Error::UnknownSatellite(src))?;
        if !graph.contains(dst) {
            if graphs.values().any(|g| g.contains(dst)) {
                return Err(Error::Unroutable { from: src, to: dst });
            }
            return Err(Error::UnknownSatellite(dst));
        }
        let capacity = self.capacity;
        self.caches
            .entry(*alt)
            .or_insert_with(|| RouteCache::with_capacity_limit(capacity))
            .route(graph, src, dst)
    }

    pub fn stats(&self) -> CacheStats {
        self.caches.values().map(RouteCache::stats).fold(CacheStats::default(), |a, b| a + b)
    }
}
