//! Curve and bounding-function value types with the (max,+) and (min,+)
//! operators every other module builds on.
//!
//! Index curves (`lambda`, `gamma`, `a`, `d`) are sampled on integer packet
//! indices with a linear tail. Bounding functions are non-increasing envelopes
//! in `[0, 1]`, either analytic or sampled on a uniform [`Grid`]. All values
//! are immutable once built.

mod bounding;
mod index_curve;
mod inverse;
mod maxplus;
mod minplus;
mod time_curve;

pub use bounding::{BoundingFunction, Grid, TailClass};
pub use index_curve::IndexCurve;
pub use inverse::{pseudo_inverse, Interp, MonotoneMap};
pub use maxplus::{
    arrival_service_conv, horizontal_distance, max_plus_conv, max_plus_deconv, min_plus_deconv_at,
    service_chain_conv, stability_margin,
};
pub use minplus::{eta_inflate, independent_combine, min_plus_conv};
pub use time_curve::TimeCurve;
