//! Time-domain stochastic network calculus.
//!
//! Traffic is described by when packets arrive and service by how long packets
//! take, both indexed by packet number. The crate provides:
//!
//! - [`curve_algebra`]: index curves, bounding functions and the (max,+)/(min,+)
//!   operators over them.
//! - [`traffic_models`]: arrival models (i.a.t, v.w.d, v.b.c) and conversions.
//! - [`service_models`]: service models (i.d, eta, strict) and the slotted
//!   wireless link with retransmissions.
//! - [`bounds_analysis`]: delay, backlog and output bounds, tandem
//!   concatenation, node-by-node analysis and eta search.
//! - [`fifo_simulator`]: a packet-level FIFO simulator with empirical CCDFs and
//!   DKW bands used to check the analytic bounds.

pub mod bounds_analysis;
pub mod curve_algebra;
pub mod fifo_simulator;
pub mod service_models;
pub mod traffic_models;

mod error;

pub use error::{Error, Result};
