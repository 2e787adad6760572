use super::node::PacketTrace;

/// Per-packet and per-instant performance samples of one trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Metrics {
    /// `D(n) = d(n) - a(n)`.
    pub delay: Vec<f64>,
    /// `W(n) = D(n) - delta(n)`.
    pub waiting: Vec<f64>,
    /// Packets in the system at each requested instant.
    pub backlog: Vec<f64>,
    /// `d(n) - d(n-k)` for each lag `k`, pooled.
    pub inter_departure: Vec<f64>,
}

/// `#{n : a(n) <= t} - #{n : d(n) <= t}`.
pub fn backlog_at(trace: &PacketTrace, t: f64) -> usize {
    let arrived = trace.a.partition_point(|&x| x <= t);
    let left = trace.d.partition_point(|&x| x <= t);
    arrived - left
}

/// Departure gaps `d(n) - d(n-k)` for `n >= k`, pooled over `lags`.
pub fn inter_departure(d: &[f64], lags: &[usize]) -> Vec<f64> {
    lags.iter().filter(|&&k| k > 0).flat_map(|&k| (k..d.len()).map(move |n| d[n] - d[n - k])).collect()
}

/// Delays and waits for packets `from..`, backlog at each of `t_grid`.
pub fn measure_metrics(trace: &PacketTrace, from: usize, t_grid: &[f64], lags: &[usize]) -> Metrics {
    let n = trace.len();
    let from = from.min(n);
    let delay: Vec<f64> = (from..n).map(|i| trace.d[i] - trace.a[i]).collect();
    let waiting = (from..n).map(|i| delay[i - from] - trace.delta[i]).collect();
    let backlog = t_grid.iter().map(|&t| backlog_at(trace, t) as f64).collect();
    let inter_departure = inter_departure(&trace.d[from..], lags);
    Metrics { delay, waiting, backlog, inter_departure }
}
