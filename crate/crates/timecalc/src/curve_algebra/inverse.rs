use crate::{Error, Result};

/// How a [`MonotoneMap`] behaves between its knots.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interp {
    /// Continuous, piecewise linear through the knots.
    Linear,
    /// Right-continuous staircase; each knot value holds until the next knot.
    /// Knots must sit at every jump.
    Step,
}

/// Nondecreasing real map sampled at increasing knots `x_0 < x_1 < ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneMap {
    xs: Vec<f64>,
    zs: Vec<f64>,
    interp: Interp,
}

impl MonotoneMap {
    pub fn new(xs: Vec<f64>, zs: Vec<f64>, interp: Interp) -> Result<Self> {
        if xs.len() != zs.len() {
            return Err(Error::LengthMismatch { left: xs.len(), right: zs.len() });
        }
        if xs.is_empty() {
            return Err(Error::Empty("map knots"));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("xs", "knots must be strictly increasing"));
        }
        if zs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::param("zs", "map must be nondecreasing"));
        }
        Ok(Self { xs, zs, interp })
    }

    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    pub fn zs(&self) -> &[f64] {
        &self.zs
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    pub fn x_max(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let i = self.xs.partition_point(|&k| k <= x);
        if i == 0 {
            return self.zs[0];
        }
        if i == self.xs.len() {
            return *self.zs.last().unwrap();
        }
        match self.interp {
            Interp::Step => self.zs[i - 1],
            Interp::Linear => {
                let (x0, x1, z0, z1) = (self.xs[i - 1], self.xs[i], self.zs[i - 1], self.zs[i]);
                z0 + (x - x0) * (z1 - z0) / (x1 - x0)
            }
        }
    }
}

/// Lower pseudo-inverse `inf{x >= x_0 : z(x) >= y}`.
///
/// Linear maps interpolate inside the crossing segment, so linear `z` is
/// inverted exactly. Step maps return the left edge of the first step reaching
/// `y`. When no knot reaches `y` the largest knot is returned.
pub fn pseudo_inverse(z: &MonotoneMap, y: f64) -> f64 {
    let i = z.zs.partition_point(|&v| v < y);
    if i == 0 {
        return z.xs[0];
    }
    if i == z.zs.len() {
        return z.x_max();
    }
    match z.interp {
        Interp::Step => z.xs[i],
        Interp::Linear => {
            let (x0, x1, z0, z1) = (z.xs[i - 1], z.xs[i], z.zs[i - 1], z.zs[i]);
            x0 + (y - z0) / (z1 - z0) * (x1 - x0)
        }
    }
}
