//! Flow-level simulation of laser inter-satellite-link (LISL) traffic over a
//! single LEO shell.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only the algorithmic
//! pieces: satellite placement, neighbor topology, weighted traffic
//! generation, hop-count routing with a route cache, and the discrete-event
//! store-and-forward engine. File formats, configuration and the command-line
//! front end live in the `lisl-sim` crate.
//!
//! A typical pipeline:
//!
//! 1. [`orbital::place_shell`] lays out `planes × sats_per_plane` satellites.
//! 2. [`topology::generate_records`] assigns each satellite its LISL neighbors
//!    for an [`topology::Arrangement`], and [`topology::build_graphs`] turns
//!    records into one directed [`topology::ShellGraph`] per altitude.
//! 3. [`traffic::assign_weights`] and [`traffic::generate_flows`] produce the
//!    data flows.
//! 4. [`engine::Engine::run`] routes every flow and replays the transfer.
#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod engine;
mod error;
pub mod orbital;
pub mod routing;
pub mod topology;
pub mod traffic;

pub use error::{Error, Result};

/// 1-indexed satellite identifier, unique across every shell of a run.
pub type SatId = u32;

pub const KIB: u64 = 1024;
pub const MIB: u64 = 1024 * KIB;
pub const GIB: u64 = 1024 * MIB;
