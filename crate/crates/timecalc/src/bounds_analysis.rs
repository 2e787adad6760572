//! Delay, backlog and output bounds for a v.w.d flow through an i.d server,
//! tandem concatenation, the node-by-node pipeline and eta search.
//!
//! With `comb` either `j (x) h` or, for independent arrivals and service,
//! `1 - jbar * hbar`:
//!
//! ```text
//! P{D(n) > x}       <= comb(x - c),                 c = sup_k gamma(k+1) - lambda(k)
//! P{B(t) > x}       <= comb(inf_{v>=1} lambda(v+x-1) - gamma(v)),   x >= 1
//! P{B(t) > H(lambda, gamma+x) + 1} <= comb(x)
//! output i.a.t:     lambda*(n) = [(lambda (/) gamma)(n-1)]^+,  h* = comb
//! ```
//!
//! Bounds are evaluated at the unclamped argument; a bounding function is 1
//! at negative arguments, so a deterministic delay `c` gives a step at `c`.

use crate::curve_algebra::{
    eta_inflate, horizontal_distance, independent_combine, max_plus_deconv, min_plus_conv, min_plus_deconv_at,
    service_chain_conv, stability_margin, BoundingFunction, Grid, IndexCurve, TailClass,
};
use crate::service_models::ServiceModel;
use crate::traffic_models::{iat_to_vwd, TrafficModel};
use crate::{Error, Result};

/// How the arrival and service bounds are combined.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combine {
    /// `j (x) h`, valid without any independence assumption.
    MinPlus,
    /// `1 - jbar * hbar`, for independent arrivals and service.
    Independent,
}

pub fn combine(j: &BoundingFunction, h: &BoundingFunction, grid: &Grid, mode: Combine) -> BoundingFunction {
    match mode {
        Combine::MinPlus => min_plus_conv(j, h, grid),
        Combine::Independent => independent_combine(j, h, grid),
    }
}

fn check_stable(lambda: &IndexCurve, gamma: &IndexCurve) -> Result<()> {
    if stability_margin(lambda, gamma) > 0.0 {
        return Err(Error::Unstable { arrival: lambda.tail_rate(), service: gamma.tail_rate() });
    }
    Ok(())
}

/// Deterministic delay offset `c = sup_{k>=0} gamma(k+1) - lambda(k)`.
pub fn delay_offset(lambda: &IndexCurve, gamma: &IndexCurve) -> Result<f64> {
    check_stable(lambda, gamma)?;
    min_plus_deconv_at(gamma, lambda, 1, 0)
}

/// `P{D(n) > x} <= comb(x - c)`.
pub fn delay_bound(arr: &TrafficModel, svc: &ServiceModel, grid: &Grid, mode: Combine) -> Result<BoundingFunction> {
    let (lambda, h) = arr.as_vwd()?;
    let (gamma, j) = svc.as_id()?;
    let c = delay_offset(lambda, gamma)?;
    BoundingFunction::shifted(&combine(j, h, grid, mode), c)
}

/// `inf_{v>=1} lambda(v+x-1) - gamma(v)` for a backlog level `x >= 1`.
pub fn backlog_argument(lambda: &IndexCurve, gamma: &IndexCurve, x: u64) -> Result<f64> {
    if x < 1 {
        return Err(Error::param("x", "backlog level must be >= 1"));
    }
    check_stable(lambda, gamma)?;
    // past both horizons the objective is nondecreasing in v
    let v_max = lambda.horizon().max(gamma.horizon()) as i64 + 1;
    let x = x as i64;
    Ok((1..=v_max).map(|v| lambda.eval(v + x - 1) - gamma.eval(v)).fold(f64::INFINITY, f64::min))
}

/// Backlog bound over packet counts `0..=b_max` (grid step 1): the value at
/// `b` bounds `P{B(t) > b}`.
pub fn backlog_bound(
    arr: &TrafficModel,
    svc: &ServiceModel,
    b_max: usize,
    grid: &Grid,
    mode: Combine,
) -> Result<BoundingFunction> {
    let (lambda, h) = arr.as_vwd()?;
    let (gamma, j) = svc.as_id()?;
    check_stable(lambda, gamma)?;
    let comb = combine(j, h, grid, mode);
    let mut values = vec![1.0];
    for b in 1..=b_max as u64 {
        values.push(comb.eval(backlog_argument(lambda, gamma, b)?));
    }
    let decay = comb.tail_decay().map(|d| d * lambda.tail_rate()).filter(|d| *d > 0.0);
    Ok(BoundingFunction::sampled_lifted(Grid::with_len(1.0, b_max + 1)?, values, decay, comb.class()))
}

/// One point of the horizontal backlog bound: `P{B(t) > level} <= bound`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BacklogPoint {
    pub x: f64,
    pub level: u64,
    pub bound: f64,
}

/// `(H(lambda, gamma + x) + 1, comb(x))` for every `x` on `x_grid`.
pub fn backlog_bound_horizontal(
    arr: &TrafficModel,
    svc: &ServiceModel,
    x_grid: &Grid,
    mode: Combine,
) -> Result<Vec<BacklogPoint>> {
    let (lambda, h) = arr.as_vwd()?;
    let (gamma, j) = svc.as_id()?;
    check_stable(lambda, gamma)?;
    let comb = combine(j, h, x_grid, mode);
    x_grid
        .points()
        .map(|x| Ok(BacklogPoint { x, level: horizontal_distance(lambda, gamma, x)? + 1, bound: comb.eval(x) }))
        .collect()
}

/// Packet-count envelope of horizontal points: at `b`, the smallest bound
/// among points with `level <= b` (1 when there is none).
pub fn horizontal_envelope(points: &[BacklogPoint], b_max: usize) -> Result<BoundingFunction> {
    let values = (0..=b_max as u64)
        .map(|b| points.iter().filter(|p| p.level <= b).map(|p| p.bound).fold(1.0, f64::min))
        .collect();
    let class = if points.iter().any(|p| p.bound == 0.0) { TailClass::Gbar } else { TailClass::Fbar };
    Ok(BoundingFunction::sampled_lifted(Grid::with_len(1.0, b_max + 1)?, values, None, class))
}

/// Departure process as an i.a.t model: `lambda*(n) = [(lambda (/) gamma)(n-1)]^+`
/// with `lambda*(0) = lambda*(1) = 0`, bound `comb`. It constrains departure
/// gaps spanning at least two packets.
pub fn output_characterization(
    arr: &TrafficModel,
    svc: &ServiceModel,
    grid: &Grid,
    mode: Combine,
) -> Result<TrafficModel> {
    let (lambda, h) = arr.as_vwd()?;
    let (gamma, j) = svc.as_id()?;
    check_stable(lambda, gamma)?;
    let deconv = max_plus_deconv(lambda, gamma, lambda.horizon().max(gamma.horizon()).max(1))?;
    let mut values = Vec::with_capacity(deconv.horizon() + 2);
    values.push(0.0);
    values.push(0.0);
    values.extend_from_slice(&deconv.values()[1..]);
    Ok(TrafficModel::Iat { lambda: IndexCurve::new(values, deconv.tail_rate())?, bound: combine(j, h, grid, mode) })
}

/// Tandem of i.d servers as one i.d server:
///
/// ```text
/// gamma = gamma^1 (x) gamma^2_{eta} (x) ... (x) gamma^N_{(N-1) eta},   gamma^k_s(n) = gamma^k(n) + s n
/// j     = j^{1,eta_1} (x) ... (x) j^{N-1,eta_{N-1}} (x) j^N
/// ```
///
/// The curves are composed under the guaranteed-rate clock, so a packet pays
/// one service quantum per node. `eta_k` defaults to `eta` for every node.
pub fn concatenate(svcs: &[ServiceModel], eta: f64, eta_k: Option<&[f64]>, grid: &Grid) -> Result<ServiceModel> {
    if svcs.len() < 2 {
        return Err(Error::param("svcs", format!("need at least two servers, got {}", svcs.len())));
    }
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::param("eta", format!("must be > 0, got {eta}")));
    }
    let etas: Vec<f64> = match eta_k {
        Some(e) if e.len() != svcs.len() - 1 => {
            return Err(Error::LengthMismatch { left: e.len(), right: svcs.len() - 1 })
        }
        Some(e) => e.to_vec(),
        None => vec![eta; svcs.len() - 1],
    };
    let parts = svcs.iter().map(ServiceModel::as_id).collect::<Result<Vec<_>>>()?;
    let mut gamma = parts[0].0.clone();
    for (k, (g, _)) in parts.iter().enumerate().skip(1) {
        gamma = service_chain_conv(&gamma, &g.plus_linear(k as f64 * eta)?);
    }
    let mut bound = eta_inflate(parts[0].1, etas[0])?;
    for (k, (_, j)) in parts.iter().enumerate().skip(1) {
        let jk = if k + 1 < parts.len() { eta_inflate(j, etas[k])? } else { (*j).clone() };
        bound = min_plus_conv(&bound, &jk, grid);
    }
    Ok(ServiceModel::Id { gamma, bound })
}

/// Result of the node-by-node pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct NodeByNode {
    /// Arrival model offered to each hop.
    pub arrivals: Vec<TrafficModel>,
    /// Delay bound at each hop.
    pub per_hop: Vec<BoundingFunction>,
    /// End-to-end bound: min-plus convolution of the per-hop bounds.
    pub total: BoundingFunction,
}

/// Delay bound per hop, feeding each hop's output (as i.a.t, converted back
/// to v.w.d with `eta`) into the next, and summing delays by min-plus
/// convolution.
pub fn node_by_node_delay(
    arr: &TrafficModel,
    svcs: &[ServiceModel],
    eta: f64,
    grid: &Grid,
    mode: Combine,
) -> Result<NodeByNode> {
    if svcs.is_empty() {
        return Err(Error::Empty("servers"));
    }
    let mut arrivals = vec![arr.clone()];
    let mut per_hop = Vec::with_capacity(svcs.len());
    for (k, svc) in svcs.iter().enumerate() {
        let here = &arrivals[k];
        per_hop.push(delay_bound(here, svc, grid, mode)?);
        if k + 1 < svcs.len() {
            let out = output_characterization(here, svc, grid, mode)?;
            arrivals.push(iat_to_vwd(&out, eta)?);
        }
    }
    let total = per_hop[1..].iter().fold(per_hop[0].clone(), |acc, b| min_plus_conv(&acc, b, grid));
    Ok(NodeByNode { arrivals, per_hop, total })
}

/// What [`optimize_eta`] minimizes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EtaObjective {
    /// Bound value at one point.
    BoundAt(f64),
    /// Riemann sum of the bound over a grid.
    Area(Grid),
}

impl EtaObjective {
    fn score(&self, b: &BoundingFunction) -> f64 {
        match self {
            EtaObjective::BoundAt(x) => b.eval(*x),
            EtaObjective::Area(g) => g.points().map(|x| b.eval(x)).sum::<f64>() * g.step(),
        }
    }
}

/// Grid search over `eta`. Values for which `builder` fails are skipped as
/// inadmissible; ties go to the smaller `eta`.
pub fn optimize_eta<F>(objective: EtaObjective, search_grid: &[f64], builder: F) -> Result<(f64, BoundingFunction)>
where
    F: Fn(f64) -> Result<BoundingFunction>,
{
    if search_grid.is_empty() {
        return Err(Error::Empty("eta search grid"));
    }
    let mut etas = search_grid.to_vec();
    etas.sort_by(f64::total_cmp);
    let mut best: Option<(f64, f64, BoundingFunction)> = None;
    for eta in etas {
        let Ok(b) = builder(eta) else { continue };
        let s = objective.score(&b);
        if best.as_ref().is_none_or(|(_, bs, _)| s < *bs) {
            best = Some((eta, s, b));
        }
    }
    best.map(|(eta, _, b)| (eta, b)).ok_or(Error::Empty("admissible eta grid"))
}
