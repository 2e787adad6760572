//! Replicated FIFO simulation of a scenario and the samples bounds are checked on.

use anyhow::Result;
use timecalc::fifo_simulator::{
    backlog_at, empirical_ccdf, gen_renewal_arrivals, gen_service_times, iat_statistic, inter_departure, merge_fifo_n,
    replicate, simulate_fifo_node, stream_rng, vwd_statistic, warmup_start, EmpiricalCcdf, PacketTrace,
};

use crate::analyze::{backlog_levels, delay_grid, SampleSpec};
use crate::scenario::{ArrivalSpec, Scenario};

/// Offset separating server streams from flow streams inside a replication.
const SERVER_STREAMS: u64 = 1 << 15;

/// One replication: the trace at every hop, hop 0 fed by the merged flows.
#[derive(Debug, Clone)]
pub struct Replication {
    pub hops: Vec<PacketTrace>,
}

fn mean_rate(a: &ArrivalSpec) -> f64 {
    match *a {
        ArrivalSpec::Exponential { rate } => rate,
        ArrivalSpec::Deterministic { period } => 1.0 / period,
        ArrivalSpec::Uniform { lo, hi } => 2.0 / (lo + hi),
    }
}

fn one_replication(s: &Scenario, r: usize) -> Result<Replication> {
    let seed = s.simulation.seed;
    let n = s.simulation.packets;
    let base = (r as u64) << 16;
    let specs: Vec<ArrivalSpec> = s.flows.iter().map(|f| f.arrival.expect("checked")).collect();
    let total: f64 = specs.iter().map(mean_rate).sum();
    let mut flows = Vec::with_capacity(specs.len());
    for (i, spec) in specs.iter().enumerate() {
        // enough packets that every flow outlasts the first `n` merged ones
        let count = ((n as f64 * mean_rate(spec) / total) * 1.5).ceil() as usize + 64;
        flows.push(gen_renewal_arrivals(&spec.dist(), count, &mut stream_rng(seed, base | i as u64))?);
    }
    let end = flows.iter().map(|f| *f.last().expect("nonempty")).fold(f64::INFINITY, f64::min);
    let mut a = merge_fifo_n(&flows)?;
    a.retain(|&t| t <= end);
    a.truncate(n);
    let mut hops = Vec::new();
    for (k, srv) in s.path().iter().enumerate() {
        let dist = srv.service.as_ref().expect("checked").dist();
        let delta = gen_service_times(&dist, a.len(), &mut stream_rng(seed, base | (SERVER_STREAMS + k as u64)))?;
        let t = simulate_fifo_node(&a, &delta)?;
        a = t.d.clone();
        hops.push(t);
    }
    Ok(Replication { hops })
}

/// Runs all replications in parallel; the result order follows the index.
pub fn run_replications(s: &Scenario) -> Result<Vec<Replication>> {
    crate::scenario::require(s, false, true)?;
    replicate(s.simulation.replications, |r| one_replication(s, r)).into_iter().collect()
}

fn steady(t: &PacketTrace) -> std::ops::Range<usize> {
    warmup_start(t.len())..t.len()
}

/// Backlog at every post-warm-up arrival epoch and on an equally dense time grid.
fn backlog_samples(t: &PacketTrace) -> Vec<f64> {
    let r = steady(t);
    let mut out: Vec<f64> = r.clone().map(|i| backlog_at(t, t.a[i]) as f64).collect();
    let (t0, t1) = (t.a[r.start], t.a[t.len() - 1]);
    let count = r.len();
    let step = (t1 - t0) / count as f64;
    if step > 0.0 {
        out.extend((0..count).map(|k| backlog_at(t, t0 + step * k as f64) as f64));
    }
    out
}

/// Pooled post-warm-up samples of the quantity `which` refers to.
pub fn samples(which: &SampleSpec, reps: &[Replication]) -> Vec<f64> {
    reps.iter()
        .flat_map(|rep| {
            let first = &rep.hops[0];
            let last = rep.hops.last().expect("nonempty path");
            match which {
                SampleSpec::Delay { hop } => {
                    let t = &rep.hops[*hop];
                    steady(t).map(|i| t.d[i] - t.a[i]).collect::<Vec<_>>()
                }
                SampleSpec::EndToEnd => steady(first).map(|i| last.d[i] - first.a[i]).collect(),
                SampleSpec::Backlog => backlog_samples(first),
                SampleSpec::Departures { lambda, lags } => iat_statistic(&first.d[steady(first).start..], lambda, lags),
                SampleSpec::Arrivals { lambda } => vwd_statistic(&first.a, lambda)[steady(first).start..].to_vec(),
            }
        })
        .collect()
}

/// One empirical CCDF reported by `simulate`.
#[derive(Debug, Clone)]
pub struct EmpiricalRow {
    pub metric: String,
    pub ccdf: EmpiricalCcdf,
}

/// Delay per hop, end-to-end delay, waiting time, backlog and departure gaps.
pub fn run_simulate(s: &Scenario) -> Result<(Vec<Replication>, Vec<EmpiricalRow>)> {
    let reps = run_replications(s)?;
    let xs: Vec<f64> = delay_grid(s)?.points().collect();
    let alpha = s.analysis.alpha;
    let hops = reps[0].hops.len();
    let mut rows = Vec::new();
    let mut push = |metric: String, samples: Vec<f64>, grid: &[f64]| -> Result<()> {
        rows.push(EmpiricalRow { metric, ccdf: empirical_ccdf(&samples, grid, alpha)? });
        Ok(())
    };
    for hop in 0..hops {
        let name = if hops == 1 { "delay".to_string() } else { format!("delay_hop{}", hop + 1) };
        push(name, samples(&SampleSpec::Delay { hop }, &reps), &xs)?;
    }
    if hops > 1 {
        push("e2e_delay".into(), samples(&SampleSpec::EndToEnd, &reps), &xs)?;
    }
    let waiting = reps
        .iter()
        .flat_map(|r| {
            let t = &r.hops[0];
            steady(t).map(|i| t.d[i] - t.a[i] - t.delta[i]).collect::<Vec<_>>()
        })
        .collect();
    push("waiting".into(), waiting, &xs)?;
    push("backlog".into(), samples(&SampleSpec::Backlog, &reps), &backlog_levels(s))?;
    let gaps = reps
        .iter()
        .flat_map(|r| {
            let t = r.hops.last().expect("nonempty path");
            inter_departure(&t.d[steady(t).start..], &[1])
        })
        .collect();
    push("inter_departure".into(), gaps, &xs)?;
    Ok((reps, rows))
}
