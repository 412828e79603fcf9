//! Rate-level simulator and analysis library for unified multi-antenna
//! NOMA/SDMA transmission.
//!
//! The crate evaluates per-user achievable rates for downlink grouped-SIC
//! transmission and uplink layered detection, checks SIC decoding
//! feasibility, sweeps two-user SISO capacity/rate region boundaries, and
//! brute-force searches grouping/ordering/beamformer/power configurations at
//! desk scale.
//!
//! Everything is a pure function over immutable values; evaluations may run
//! concurrently without coordination.

pub mod downlink;
pub mod error;
pub mod io;
pub mod model;
pub mod regions;
pub mod search;
pub mod uplink;

pub use error::{NgmaError, Result};
pub use model::{generate_scenario, inner_product, ChannelKind, ChannelSpec, ComplexVec, Scenario};
