//! Per-packet realizations of the quantities the model definitions bound.
//!
//! Suprema over `m` are split at the curve horizon `H`: closer indices are
//! scanned directly, farther ones only need a running maximum because the
//! curve is linear there. Each statistic costs `O(n H)`.

use super::node::PacketTrace;
use crate::curve_algebra::IndexCurve;
use crate::service_models::ServiceModel;
use crate::traffic_models::TrafficModel;
use crate::{Error, Result};

/// `sup_{0<=m<=n} lambda(n-m) - (a(n) - a(m))`.
pub fn vwd_statistic(a: &[f64], lambda: &IndexCurve) -> Vec<f64> {
    let h = lambda.horizon();
    let r = lambda.tail_rate();
    let base = lambda.eval(h as i64) - r * h as f64;
    let mut far = f64::NEG_INFINITY; // max_{m <= n-h-1} a(m) - r m
    (0..a.len())
        .map(|n| {
            if n > h {
                let m = n - h - 1;
                far = far.max(a[m] - r * m as f64);
            }
            let lo = n.saturating_sub(h);
            let near = (lo..=n).map(|m| lambda.eval((n - m) as i64) - (a[n] - a[m])).fold(f64::NEG_INFINITY, f64::max);
            near.max(base + r * n as f64 - a[n] + far)
        })
        .collect()
}

/// `lambda(k) - (a(n) - a(n-k))` for every `n >= k`, pooled over `lags`.
pub fn iat_statistic(a: &[f64], lambda: &IndexCurve, lags: &[usize]) -> Vec<f64> {
    lags.iter()
        .filter(|&&k| k > 0)
        .flat_map(|&k| (k..a.len()).map(move |n| lambda.eval(k as i64) - (a[n] - a[n - k])))
        .collect()
}

/// `d(n) - sup_{0<=m<=n} [a(m) + gamma(n-m+1)]`.
pub fn id_statistic(trace: &PacketTrace, gamma: &IndexCurve) -> Vec<f64> {
    let a = &trace.a;
    let h = gamma.horizon().max(1);
    let r = gamma.tail_rate();
    let base = gamma.eval(h as i64) - r * h as f64;
    let mut far = f64::NEG_INFINITY; // max_{m <= n-h} a(m) - r m
    (0..a.len())
        .map(|n| {
            if n >= h {
                let m = n - h;
                far = far.max(a[m] - r * m as f64);
            }
            let lo = (n + 1).saturating_sub(h);
            let near = (lo..=n).map(|m| a[m] + gamma.eval((n - m + 1) as i64)).fold(f64::NEG_INFINITY, f64::max);
            trace.d[n] - near.max(base + r * (n + 1) as f64 + far)
        })
        .collect()
}

/// `sup_{0<=m<=n} id(m) - eta (n-m)`.
pub fn eta_statistic(trace: &PacketTrace, gamma: &IndexCurve, eta: f64) -> Vec<f64> {
    let mut run = f64::NEG_INFINITY;
    id_statistic(trace, gamma)
        .into_iter()
        .map(|v| {
            run = v.max(run - eta);
            run
        })
        .collect()
}

/// `Delta(n-L+1, n) - gamma(L)` for every window of length `L` in `lens` that
/// lies inside one busy period, pooled.
pub fn strict_statistic(trace: &PacketTrace, gamma: &IndexCurve, lens: &[usize]) -> Vec<f64> {
    let n = trace.len();
    let mut prefix = Vec::with_capacity(n + 1);
    prefix.push(0.0);
    for &s in &trace.delta {
        prefix.push(prefix.last().unwrap() + s);
    }
    let mut start = vec![0usize; n];
    for i in 1..n {
        start[i] = if trace.a[i] >= trace.d[i - 1] { i } else { start[i - 1] };
    }
    let mut out = Vec::new();
    for &len in lens.iter().filter(|&&l| l > 0) {
        for i in len - 1..n {
            let m = i + 1 - len;
            if m >= start[i] {
                out.push(prefix[i + 1] - prefix[m] - gamma.eval(len as i64));
            }
        }
    }
    out
}

/// A model whose defining statistic should be measured.
#[derive(Debug, Clone, Copy)]
pub enum ModelRef<'a> {
    Traffic(&'a TrafficModel),
    Service(&'a ServiceModel),
}

/// Per-packet statistic matching the model's definition. `lags` selects the
/// spans for i.a.t models and the window lengths for strict ones.
pub fn model_statistics(trace: &PacketTrace, model: ModelRef<'_>, lags: &[usize]) -> Result<Vec<f64>> {
    Ok(match model {
        ModelRef::Traffic(TrafficModel::Vwd { lambda, .. }) => vwd_statistic(&trace.a, lambda),
        ModelRef::Traffic(TrafficModel::Iat { lambda, .. }) => iat_statistic(&trace.a, lambda, lags),
        ModelRef::Traffic(TrafficModel::Vbc { .. }) => {
            return Err(Error::WrongKind { expected: "i.a.t or v.w.d", found: "v.b.c" })
        }
        ModelRef::Service(ServiceModel::Id { gamma, .. }) => id_statistic(trace, gamma),
        ModelRef::Service(ServiceModel::Eta { gamma, eta, .. }) => eta_statistic(trace, gamma, *eta),
        ModelRef::Service(ServiceModel::Strict { gamma, .. }) => strict_statistic(trace, gamma, lags),
    })
}
