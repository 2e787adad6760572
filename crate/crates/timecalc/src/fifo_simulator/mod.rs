//! Packet-level Monte Carlo for FIFO queues.
//!
//! Arrival and service sequences come from seeded ChaCha streams, departures
//! from the recursion `d(n) = max(a(n), d(n-1)) + delta(n)`. The statistics
//! module computes, per packet, the random quantity each model definition
//! bounds, so its empirical CCDF can be checked against the bounding function
//! with a DKW band.

mod ccdf;
mod generators;
mod merge;
mod metrics;
mod node;
mod replicate;
mod statistics;

pub use ccdf::{check_dominance, check_dominance_values, dkw_epsilon, empirical_ccdf, Dominance, EmpiricalCcdf, MIN_SAMPLES};
pub use generators::{gen_renewal_arrivals, gen_service_times, stream_rng, ArrivalDist, ServiceDist};
pub use merge::{merge_fifo, merge_fifo_n};
pub use metrics::{backlog_at, inter_departure, measure_metrics, Metrics};
pub use node::{simulate_fifo_node, PacketTrace};
pub use replicate::{replicate, warmup_start};
pub use statistics::{
    eta_statistic, iat_statistic, id_statistic, model_statistics, strict_statistic, vwd_statistic, ModelRef,
};
