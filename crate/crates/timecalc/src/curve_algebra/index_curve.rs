use crate::{Error, Result};

/// Nondecreasing curve over packet index, sampled on `0..=horizon` and
/// extended linearly with `tail_rate` beyond. Negative indices evaluate to 0.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexCurve {
    values: Vec<f64>,
    tail_rate: f64,
}

impl IndexCurve {
    pub fn new(values: Vec<f64>, tail_rate: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Empty("curve values"));
        }
        if !(tail_rate.is_finite() && tail_rate >= 0.0) {
            return Err(Error::param("tail_rate", format!("must be finite and >= 0, got {tail_rate}")));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("values", "non-finite entry"));
        }
        if values[0] < 0.0 {
            return Err(Error::param("values", format!("value at 0 is negative ({})", values[0])));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] < w[0]) {
            return Err(Error::param("values", format!("decreasing at index {}", i + 1)));
        }
        Ok(Self { values, tail_rate })
    }

    /// `n -> rate * n` sampled up to `horizon`.
    pub fn linear(rate: f64, horizon: usize) -> Result<Self> {
        Self::from_fn(horizon, rate, |n| rate * n as f64)
    }

    /// `n -> offset + rate * n`.
    pub fn affine(offset: f64, rate: f64, horizon: usize) -> Result<Self> {
        Self::from_fn(horizon, rate, |n| offset + rate * n as f64)
    }

    pub fn from_fn(horizon: usize, tail_rate: f64, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..=horizon).map(f).collect(), tail_rate)
    }

    pub fn horizon(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail_rate(&self) -> f64 {
        self.tail_rate
    }

    pub fn eval(&self, n: i64) -> f64 {
        if n < 0 {
            return 0.0;
        }
        let h = self.horizon();
        let n = n as usize;
        if n <= h {
            self.values[n]
        } else {
            self.values[h] + self.tail_rate * (n - h) as f64
        }
    }

    /// Same curve, resampled to at least `horizon` (never shortened).
    pub fn extended_to(&self, horizon: usize) -> Self {
        if horizon <= self.horizon() {
            return self.clone();
        }
        let values = (0..=horizon).map(|n| self.eval(n as i64)).collect();
        Self { values, tail_rate: self.tail_rate }
    }

    /// `n -> self(n + 1)`.
    pub fn shifted_left(&self) -> Self {
        let h = self.horizon().max(1);
        let values = (0..h).map(|n| self.eval(n as i64 + 1)).collect();
        Self { values, tail_rate: self.tail_rate }
    }

    /// `n -> self(n) + rate * n`.
    pub fn plus_linear(&self, rate: f64) -> Result<Self> {
        Self::from_fn(self.horizon(), self.tail_rate + rate, |n| self.values[n] + rate * n as f64)
    }

    /// Largest index `k` with `self(k) < v`, or `None` when `self(0) >= v`.
    /// Requires a positive tail rate when `v` lies beyond the horizon.
    pub fn last_below(&self, v: f64) -> Option<u64> {
        let h = self.horizon();
        if self.values[0] >= v {
            return None;
        }
        if self.values[h] < v {
            if self.tail_rate <= 0.0 {
                return Some(u64::MAX);
            }
            let mut k = h as u64 + ((v - self.values[h]) / self.tail_rate).ceil().max(0.0) as u64;
            while k > h as u64 && self.eval(k as i64) >= v {
                k -= 1;
            }
            while self.eval(k as i64 + 1) < v {
                k += 1;
            }
            return Some(k);
        }
        let first_ge = self.values.partition_point(|&x| x < v);
        Some(first_ge as u64 - 1)
    }

    /// Largest index `k` with `self(k) <= v`, with the same conventions as
    /// [`last_below`](Self::last_below).
    pub fn last_at_most(&self, v: f64) -> Option<u64> {
        let h = self.horizon();
        if self.values[0] > v {
            return None;
        }
        if self.values[h] <= v {
            if self.tail_rate <= 0.0 {
                return Some(u64::MAX);
            }
            let mut k = h as u64 + ((v - self.values[h]) / self.tail_rate).floor().max(0.0) as u64;
            while k > h as u64 && self.eval(k as i64) > v {
                k -= 1;
            }
            while self.eval(k as i64 + 1) <= v {
                k += 1;
            }
            return Some(k);
        }
        let first_gt = self.values.partition_point(|&x| x <= v);
        Some(first_gt as u64 - 1)
    }

    /// Numerical sub-additivity on the horizon: `f(a+b) <= f(a) + f(b)`.
    pub fn is_subadditive(&self) -> bool {
        let h = self.horizon();
        (0..=h).all(|a| (a..=h - a).all(|b| self.values[a + b] <= self.values[a] + self.values[b]))
    }
}
