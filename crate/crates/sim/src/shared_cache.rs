//! Route cache that many threads can share.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::RwLock;

use lisl_core::routing::{shortest_path, CacheStats, Route};
use lisl_core::topology::ShellGraph;
use lisl_core::{Error, SatId};

/// Thread-safe counterpart of [`lisl_core::routing::RouteCache`]: lookups
/// take a shared lock, insertion an exclusive one. Routes are computed
/// outside the lock, so two threads missing on the same pair may both run
/// the search; the first insert wins and both get the same path.
#[derive(Debug)]
pub struct SharedRouteCache {
    fingerprint: u64,
    capacity: Option<usize>,
    routes: RwLock<HashMap<(SatId, SatId), Route>>,
    hits: AtomicU64,
    misses: AtomicU64,
}

impl SharedRouteCache {
    pub fn new(graph: &ShellGraph, capacity: Option<usize>) -> Self {
        SharedRouteCache {
            fingerprint: graph.fingerprint(),
            capacity,
            routes: RwLock::new(HashMap::new()),
            hits: AtomicU64::new(0),
            misses: AtomicU64::new(0),
        }
    }

    pub fn route(&self, graph: &ShellGraph, src: SatId, dst: SatId) -> lisl_core::Result<Route> {
        if graph.fingerprint() != self.fingerprint {
            return Err(Error::CacheGraphMismatch);
        }
        if let Some(route) = self.routes.read().expect("route cache lock").get(&(src, dst)) {
            self.hits.fetch_add(1, Ordering::Relaxed);
            return Ok(route.clone());
        }
        self.misses.fetch_add(1, Ordering::Relaxed);
        let route = shortest_path(graph, src, dst)?;
        let mut routes = self.routes.write().expect("route cache lock");
        if let Some(existing) = routes.get(&(src, dst)) {
            return Ok(existing.clone());
        }
        if self.capacity.is_none_or(|cap| routes.len() < cap) {
            routes.insert((src, dst), route.clone());
        }
        Ok(route)
    }

    pub fn stats(&self) -> CacheStats {
        CacheStats {
            hits: self.hits.load(Ordering::Relaxed),
            misses: self.misses.load(Ordering::Relaxed),
            entries: self.routes.read().expect("route cache lock").len(),
        }
    }

    /// Every stored route, for auditing.
    pub fn snapshot(&self) -> Vec<Route> {
        let mut all: Vec<Route> = self.routes.read().expect("route cache lock").values().cloned().collect();
        all.sort_by_key(|r| (r.src(), r.dst()));
        all
    }
}
