//! Operators on bounding functions.
//!
//! ```text
//! (h1 (x) h2)(x)   = [ inf_{0<=y<=x} h1(y) + h2(x-y) ]_1
//! h_eta(x)         = [ h(x) + (1/eta) int_x^inf h(y) dy ]_1
//! combine(j, h)(x) = 1 - (jbar * hbar)(x),   jbar = 1 - [j]_1,  hbar = 1 - [h]_1
//! ```
//!
//! `*` is a Stieltjes convolution computed on the grid.

use super::bounding::{BoundingFunction, Grid, Shape, TailClass};
use crate::{Error, Result};

/// Tail-integral inflation. Exponentials and steps stay in closed form; sampled
/// functions are inflated sample by sample; anything else is inflated lazily.
pub fn eta_inflate(h: &BoundingFunction, eta: f64) -> Result<BoundingFunction> {
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::param("eta", format!("must be > 0, got {eta}")));
    }
    if h.class() != TailClass::Gbar {
        return Err(Error::NotIntegrable);
    }
    match &h.shape {
        Shape::Step => Ok(BoundingFunction::step()),
        Shape::Exponential { amplitude, decay } => {
            // the clipped part only matters where the result is clipped anyway
            BoundingFunction::exponential(amplitude * (1.0 + 1.0 / (eta * decay)), *decay)
        }
        Shape::Sampled { grid, values, tail_decay } => {
            let inflated = (0..values.len())
                .map(|i| Ok(values[i] + h.tail_integral(grid.x(i))? / eta))
                .collect::<Result<Vec<f64>>>()?;
            Ok(BoundingFunction::sampled_lifted(*grid, inflated, *tail_decay, TailClass::Gbar))
        }
        _ => {
            h.tail_integral(0.0)?;
            Ok(BoundingFunction::inflated(h, eta))
        }
    }
}

/// Decay rate valid for a sum (or infimal sum) of two exponentially decaying tails.
fn combined_decay(a: &BoundingFunction, b: &BoundingFunction) -> Option<f64> {
    match (a.tail_decay(), b.tail_decay()) {
        (Some(x), Some(y)) => Some(x * y / (x + y)),
        _ => None,
    }
}

fn combined_class(a: &BoundingFunction, b: &BoundingFunction) -> TailClass {
    if a.class() == TailClass::Gbar && b.class() == TailClass::Gbar {
        TailClass::Gbar
    } else {
        TailClass::Fbar
    }
}

/// Min-plus convolution on `grid`. The infimum runs over grid splits only, so
/// the result never undershoots the continuous one.
pub fn min_plus_conv(h1: &BoundingFunction, h2: &BoundingFunction, grid: &Grid) -> BoundingFunction {
    if h1.is_step() {
        return h2.clone();
    }
    if h2.is_step() {
        return h1.clone();
    }
    let a = h1.sample(grid);
    let b = h2.sample(grid);
    let values = (0..grid.len())
        .map(|i| (0..=i).map(|k| a[k] + b[i - k]).fold(f64::INFINITY, f64::min))
        .collect();
    BoundingFunction::sampled_lifted(*grid, values, combined_decay(h1, h2), combined_class(h1, h2))
}

/// `1 - (jbar * hbar)(x)` for independent quantities with tails `j` and `h`.
///
/// With `F = 1 - [j]_1` and `G = 1 - [h]_1` both distribution-like on the grid,
///
/// ```text
/// (F * G)(x_k) = F(x_k) G(0) + sum_{i=1}^{k} (F(x_k - x_{i-1}) + F(x_k - x_i))/2 * (G(x_i) - G(x_{i-1}))
/// ```
///
/// and the two orderings are averaged.
pub fn independent_combine(j: &BoundingFunction, h: &BoundingFunction, grid: &Grid) -> BoundingFunction {
    if j.is_step() {
        return h.clone();
    }
    if h.is_step() {
        return j.clone();
    }
    let f: Vec<f64> = j.sample(grid).iter().map(|v| 1.0 - v).collect();
    let g: Vec<f64> = h.sample(grid).iter().map(|v| 1.0 - v).collect();
    let fg = stieltjes(&f, &g);
    let gf = stieltjes(&g, &f);
    let values = fg.iter().zip(&gf).map(|(a, b)| 1.0 - 0.5 * (a + b)).collect();
    BoundingFunction::sampled_lifted(*grid, values, combined_decay(j, h), combined_class(j, h))
}

fn stieltjes(f: &[f64], g: &[f64]) -> Vec<f64> {
    (0..f.len())
        .map(|k| {
            let mut acc = f[k] * g[0];
            for i in 1..=k {
                acc += 0.5 * (f[k - i + 1] + f[k - i]) * (g[i] - g[i - 1]);
            }
            acc
        })
        .collect()
}
