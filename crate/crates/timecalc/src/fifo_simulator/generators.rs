use rand::distr::weighted::WeightedIndex;
use rand::distr::Uniform;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, Exp, Geometric};

use crate::{Error, Result};

/// Inter-arrival time law of a renewal flow.
#[derive(Debug, Clone, PartialEq)]
pub enum ArrivalDist {
    Exponential { rate: f64 },
    Deterministic { period: f64 },
    Uniform { lo: f64, hi: f64 },
}

/// Per-packet service time law.
#[derive(Debug, Clone, PartialEq)]
pub enum ServiceDist {
    Deterministic { value: f64 },
    /// `k * slot` with `P{k = i} = (1-pe) pe^{i-1}`, `i >= 1`.
    GeometricSlotted { pe: f64, slot: f64 },
    /// Discrete law over `values` with weights `probs`.
    Table { values: Vec<f64>, probs: Vec<f64> },
}

/// Independent generator for `(seed, stream)`; distinct streams never overlap.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be > 0, got {v}")))
    }
}

/// Cumulative arrival times; `a(0)` is the first inter-arrival draw.
pub fn gen_renewal_arrivals<R: Rng>(dist: &ArrivalDist, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::param("n", "must be >= 1"));
    }
    let gaps: Vec<f64> = match *dist {
        ArrivalDist::Exponential { rate } => {
            positive("rate", rate)?;
            let e = Exp::new(rate).map_err(|e| Error::param("rate", e.to_string()))?;
            (0..n).map(|_| e.sample(rng)).collect()
        }
        ArrivalDist::Deterministic { period } => {
            positive("period", period)?;
            vec![period; n]
        }
        ArrivalDist::Uniform { lo, hi } => {
            if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
                return Err(Error::param("uniform", format!("need 0 <= lo < hi, got [{lo}, {hi}]")));
            }
            let u = Uniform::new_inclusive(lo, hi).map_err(|e| Error::param("uniform", e.to_string()))?;
            (0..n).map(|_| u.sample(rng)).collect()
        }
    };
    let mut t = 0.0;
    Ok(gaps
        .into_iter()
        .map(|g| {
            t += g;
            t
        })
        .collect())
}

pub fn gen_service_times<R: Rng>(dist: &ServiceDist, n: usize, rng: &mut R) -> Result<Vec<f64>> {
    match dist {
        ServiceDist::Deterministic { value } => {
            if !(value.is_finite() && *value >= 0.0) {
                return Err(Error::param("value", format!("must be >= 0, got {value}")));
            }
            Ok(vec![*value; n])
        }
        ServiceDist::GeometricSlotted { pe, slot } => {
            if !(0.0..1.0).contains(pe) {
                return Err(Error::param("pe", format!("must lie in [0, 1), got {pe}")));
            }
            positive("slot", *slot)?;
            let g = Geometric::new(1.0 - pe).map_err(|e| Error::param("pe", e.to_string()))?;
            Ok((0..n).map(|_| (g.sample(rng) + 1) as f64 * slot).collect())
        }
        ServiceDist::Table { values, probs } => {
            if values.len() != probs.len() {
                return Err(Error::LengthMismatch { left: values.len(), right: probs.len() });
            }
            if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
                return Err(Error::param("values", "service times must be finite and >= 0"));
            }
            let w = WeightedIndex::new(probs).map_err(|e| Error::param("probs", e.to_string()))?;
            Ok((0..n).map(|_| values[w.sample(rng)]).collect())
        }
    }
}
