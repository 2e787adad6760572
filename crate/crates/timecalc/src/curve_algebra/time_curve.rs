use super::inverse::Interp;
use crate::{Error, Result};

/// Nondecreasing packet count over real time, sampled at knots and extended
/// with `tail_rate` packets per second beyond the last knot. A step curve keeps
/// its staircase shape in the tail (`floor`), a linear one grows linearly.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeCurve {
    grid: Vec<f64>,
    values: Vec<f64>,
    interp: Interp,
    tail_rate: f64,
}

impl TimeCurve {
    pub fn new(grid: Vec<f64>, values: Vec<f64>, interp: Interp, tail_rate: f64) -> Result<Self> {
        if grid.len() != values.len() {
            return Err(Error::LengthMismatch { left: grid.len(), right: values.len() });
        }
        if grid.is_empty() {
            return Err(Error::Empty("time grid"));
        }
        if grid[0] < 0.0 || grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::param("grid", "must start at t >= 0 and be strictly increasing"));
        }
        if values[0] < 0.0 || values.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::param("values", "must be nonnegative and nondecreasing"));
        }
        if !(tail_rate.is_finite() && tail_rate > 0.0) {
            return Err(Error::param("tail_rate", format!("must be > 0, got {tail_rate}")));
        }
        Ok(Self { grid, values, interp, tail_rate })
    }

    /// `t -> rate * t`.
    pub fn linear(rate: f64, t_max: f64) -> Result<Self> {
        Self::new(vec![0.0, t_max], vec![0.0, rate * t_max], Interp::Linear, rate)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn interp(&self) -> Interp {
        self.interp
    }

    pub fn tail_rate(&self) -> f64 {
        self.tail_rate
    }

    pub fn t_max(&self) -> f64 {
        *self.grid.last().unwrap()
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t < self.grid[0] {
            return 0.0;
        }
        let (tl, vl) = (self.t_max(), *self.values.last().unwrap());
        if t >= tl {
            let grow = self.tail_rate * (t - tl);
            return match self.interp {
                Interp::Linear => vl + grow,
                Interp::Step => vl + (grow + 1e-9).floor(),
            };
        }
        let i = self.grid.partition_point(|&g| g <= t);
        match self.interp {
            Interp::Step => self.values[i - 1],
            Interp::Linear => {
                let (t0, t1, v0, v1) = (self.grid[i - 1], self.grid[i], self.values[i - 1], self.values[i]);
                v0 + (t - t0) * (v1 - v0) / (t1 - t0)
            }
        }
    }

    /// `inf{t >= 0 : self(t) >= n}`.
    pub fn first_reach(&self, n: f64) -> f64 {
        if n <= 0.0 {
            return 0.0;
        }
        let i = self.values.partition_point(|&v| v < n);
        if i == self.values.len() {
            return self.t_max() + (n - self.values[i - 1]) / self.tail_rate;
        }
        if i == 0 {
            return self.grid[0];
        }
        match self.interp {
            Interp::Step => self.grid[i],
            Interp::Linear => {
                let (t0, t1, v0, v1) = (self.grid[i - 1], self.grid[i], self.values[i - 1], self.values[i]);
                t0 + (n - v0) * (t1 - t0) / (v1 - v0)
            }
        }
    }

    /// Pointwise sum. Step curves stay exact up to the longest component grid
    /// (tail jumps of shorter components are added as knots); past that the
    /// summed tail uses `floor(sum of rates * dt)`, which never undercounts.
    pub fn sum(curves: &[TimeCurve]) -> Result<TimeCurve> {
        let first = curves.first().ok_or(Error::Empty("curves to sum"))?;
        let interp = first.interp;
        if curves.iter().any(|c| c.interp != interp) {
            return Err(Error::param("curves", "cannot mix step and linear curves"));
        }
        let t_end = curves.iter().map(|c| c.t_max()).fold(0.0, f64::max);
        let mut knots: Vec<f64> = curves.iter().flat_map(|c| c.grid.iter().copied()).collect();
        if interp == Interp::Step {
            for c in curves {
                let mut k = 1.0;
                loop {
                    let t = c.t_max() + k / c.tail_rate;
                    if t > t_end {
                        break;
                    }
                    knots.push(t);
                    k += 1.0;
                }
            }
        }
        knots.sort_by(f64::total_cmp);
        knots.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * b.abs().max(1.0));
        let values = knots.iter().map(|&t| curves.iter().map(|c| c.eval(t)).sum()).collect();
        let rate = curves.iter().map(|c| c.tail_rate).sum();
        TimeCurve::new(knots, values, interp, rate)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_eval_and_inverse() {
        let a = TimeCurve::linear(2.0, 64.0).unwrap();
        assert_eq!(a.eval(3.0), 6.0);
        assert_eq!(a.eval(100.0), 200.0);
        for n in 0..200 {
            assert_eq!(a.first_reach(n as f64), n as f64 / 2.0);
        }
    }

    #[test]
    fn step_staircase() {
        // one packet per second
        let grid: Vec<f64> = (0..=10).map(f64::from).collect();
        let a = TimeCurve::new(grid.clone(), grid, Interp::Step, 1.0).unwrap();
        assert_eq!(a.eval(2.5), 2.0);
        assert_eq!(a.eval(12.5), 12.0);
        for n in 1..20 {
            assert_eq!(a.first_reach(n as f64), n as f64);
        }
    }

    #[test]
    fn sum_of_steps() {
        let mk = |p: f64| {
            let grid: Vec<f64> = (0..=4).map(|k| k as f64 * p).collect();
            let vals: Vec<f64> = (0..=4).map(f64::from).collect();
            TimeCurve::new(grid, vals, Interp::Step, 1.0 / p).unwrap()
        };
        let s = TimeCurve::sum(&[mk(1.0), mk(2.0)]).unwrap();
        for t in [0.5, 1.0, 2.0, 3.5, 6.0, 7.9] {
            let want = (t / 1.0f64).floor() + (t / 2.0f64).floor();
            assert_eq!(s.eval(t), want, "t = {t}");
        }
        assert!(s.eval(50.0) >= 50.0 + 25.0);
    }
}
