use alloc::string::String;

use crate::SatId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter failed validation; `field` names the offending setting.
    #[error("invalid configuration: {field} {reason}")]
    Config { field: &'static str, reason: String },

    #[error("argument out of range: {0}")]
    Argument(String),

    #[error("satellite record {id} is invalid: {reason}")]
    Record { id: SatId, reason: String },

    #[error("graph construction failed: {0}")]
    Graph(String),

    #[error("graph is not strongly connected: {to} is unreachable from {from}")]
    NotStronglyConnected { from: SatId, to: SatId },

    #[error("no route from {from} to {to}")]
    Unroutable { from: SatId, to: SatId },

    #[error("satellite {0} is not part of the graph")]
    UnknownSatellite(SatId),

    #[error("route cache belongs to a different graph")]
    CacheGraphMismatch,

    #[error("already at destination {0}")]
    AlreadyAtDestination(SatId),

    #[error("satellite {0} is not on the route")]
    NotOnRoute(SatId),

    #[error("traffic generation needs at least two satellites, got {0}")]
    TooFewSatellites(usize),

    #[error("progress observer aborted the run: {0}")]
    ObserverAborted(String),
}

impl Error {
    pub(crate) fn config(field: &'static str, reason: impl Into<String>) -> Self {
        Error::Config {
            field,
            reason: reason.into(),
        }
    }
}
