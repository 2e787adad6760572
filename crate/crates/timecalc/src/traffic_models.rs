//! Stochastic arrival models and the transformations between them.
//!
//! ```text
//! i.a.t: P{ a(m+n) - a(m) < [lambda(n) - x]^+ }                        <= h(x)
//! v.w.d: P{ sup_{0<=m<=n} lambda(n-m) - (a(n) - a(m)) > x }            <= h(x)
//! v.b.c: P{ sup_{0<=s<=t} A(s,t) - alpha(t-s) > x }                    <= f(x)
//! ```
//!
//! `lambda` is an index curve in seconds, `alpha` a packet count over time.

use statrs::function::gamma::gamma_lr;

use crate::curve_algebra::{
    eta_inflate, min_plus_conv, BoundingFunction, Grid, IndexCurve, Interp, MonotoneMap, TailClass,
    TimeCurve,
};
use crate::{Error, Result};

/// Smallest packet range covered when a curve is resampled between the index
/// and time domains.
const MIN_PACKETS: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrafficKind {
    Iat,
    Vwd,
    Vbc,
}

impl TrafficKind {
    pub fn name(self) -> &'static str {
        match self {
            TrafficKind::Iat => "i.a.t",
            TrafficKind::Vwd => "v.w.d",
            TrafficKind::Vbc => "v.b.c",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrafficModel {
    Iat { lambda: IndexCurve, bound: BoundingFunction },
    Vwd { lambda: IndexCurve, bound: BoundingFunction },
    Vbc { alpha: TimeCurve, bound: BoundingFunction },
}

impl TrafficModel {
    pub fn kind(&self) -> TrafficKind {
        match self {
            TrafficModel::Iat { .. } => TrafficKind::Iat,
            TrafficModel::Vwd { .. } => TrafficKind::Vwd,
            TrafficModel::Vbc { .. } => TrafficKind::Vbc,
        }
    }

    pub fn bound(&self) -> &BoundingFunction {
        match self {
            TrafficModel::Iat { bound, .. } | TrafficModel::Vwd { bound, .. } | TrafficModel::Vbc { bound, .. } => bound,
        }
    }

    /// Index curve of an i.a.t or v.w.d model.
    pub fn lambda(&self) -> Option<&IndexCurve> {
        match self {
            TrafficModel::Iat { lambda, .. } | TrafficModel::Vwd { lambda, .. } => Some(lambda),
            TrafficModel::Vbc { .. } => None,
        }
    }

    pub(crate) fn expect(&self, kind: TrafficKind) -> Result<()> {
        if self.kind() == kind {
            Ok(())
        } else {
            Err(Error::WrongKind { expected: kind.name(), found: self.kind().name() })
        }
    }

    pub(crate) fn as_vwd(&self) -> Result<(&IndexCurve, &BoundingFunction)> {
        match self {
            TrafficModel::Vwd { lambda, bound } => Ok((lambda, bound)),
            other => Err(Error::WrongKind { expected: "v.w.d", found: other.kind().name() }),
        }
    }
}

/// `P{Erlang(n, mu) <= y}`: probability that `n` exponential gaps fit in `y`.
pub fn erlang_cdf(mu: f64, n: u64, y: f64) -> f64 {
    if y <= 0.0 || n == 0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    gamma_lr(n as f64, mu * y)
}

/// Poisson flow of rate `mu` as an i.a.t model with `lambda(n) = n/mu`.
///
/// The bound is `h(x) = sup_{1<=n<=horizon} P{Erlang(n,mu) <= [n/mu - x]^+}`,
/// sampled on `grid` (extended to `horizon/mu`, where it reaches 0). It holds
/// for spans of at most `horizon` packets.
pub fn poisson_iat_sac(mu: f64, horizon: usize, grid: &Grid) -> Result<TrafficModel> {
    if !(mu.is_finite() && mu > 0.0) {
        return Err(Error::param("mu", format!("must be > 0, got {mu}")));
    }
    if horizon == 0 {
        return Err(Error::param("horizon", "must be >= 1"));
    }
    let grid = grid.extended_to(horizon as f64 / mu);
    let values = grid
        .points()
        .map(|x| (1..=horizon as u64).map(|n| erlang_cdf(mu, n, n as f64 / mu - x)).fold(0.0, f64::max))
        .collect();
    Ok(TrafficModel::Iat {
        lambda: IndexCurve::linear(1.0 / mu, horizon)?,
        bound: BoundingFunction::sampled_lifted(grid, values, None, TailClass::Gbar),
    })
}

/// Poisson flow of rate `mu` as a v.w.d model: `lambda(n) = hbar n` with the
/// M/D/1 waiting-time tail for service `hbar`.
pub fn md1_vwd_sac(mu: f64, hbar: f64) -> Result<TrafficModel> {
    let bound = BoundingFunction::md1_wait(mu, hbar)?;
    Ok(TrafficModel::Vwd { lambda: IndexCurve::linear(hbar, 1)?, bound })
}

/// Aggregate of independent Poisson flows, itself Poisson, at spacing `t_s`.
pub fn poisson_superposition_vwd(rates: &[f64], t_s: f64) -> Result<TrafficModel> {
    if rates.is_empty() {
        return Err(Error::Empty("rates"));
    }
    if let Some(r) = rates.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(Error::param("rates", format!("must be > 0, got {r}")));
    }
    md1_vwd_sac(rates.iter().sum(), t_s)
}

/// Rate-`rho` flow whose backlog-centric bound is `f`: `lambda(n) = n/rho`,
/// `h(y) = f(rho y)`.
pub fn gsbb_vwd_sac(rho: f64, f: &BoundingFunction) -> Result<TrafficModel> {
    if !(rho.is_finite() && rho > 0.0) {
        return Err(Error::param("rho", format!("must be > 0, got {rho}")));
    }
    Ok(TrafficModel::Vwd { lambda: IndexCurve::linear(1.0 / rho, 1)?, bound: BoundingFunction::scaled(f, rho)? })
}

/// A v.w.d model is also an i.a.t model with the same curve and bound.
pub fn vwd_to_iat(m: &TrafficModel) -> Result<TrafficModel> {
    let (lambda, bound) = m.as_vwd()?;
    Ok(TrafficModel::Iat { lambda: lambda.clone(), bound: bound.clone() })
}

/// i.a.t to v.w.d: `([lambda(n) - eta n]^+, h_eta)`.
///
/// Where the clamped curve would dip it is replaced by its largest
/// nondecreasing minorant, which only weakens the claim.
pub fn iat_to_vwd(m: &TrafficModel, eta: f64) -> Result<TrafficModel> {
    let (lambda, bound) = match m {
        TrafficModel::Iat { lambda, bound } => (lambda, bound),
        other => return Err(Error::WrongKind { expected: "i.a.t", found: other.kind().name() }),
    };
    if !(eta.is_finite() && eta > 0.0 && eta <= lambda.tail_rate()) {
        return Err(Error::param(
            "eta",
            format!("need 0 < eta <= {} (curve tail rate), got {eta}", lambda.tail_rate()),
        ));
    }
    let bound = eta_inflate(bound, eta)?;
    let mut values: Vec<f64> =
        lambda.values().iter().enumerate().map(|(n, v)| (v - eta * n as f64).max(0.0)).collect();
    for i in (0..values.len() - 1).rev() {
        values[i] = values[i].min(values[i + 1]);
    }
    Ok(TrafficModel::Vwd { lambda: IndexCurve::new(values, lambda.tail_rate() - eta)?, bound })
}

/// `z(x) = sup_k lambda(k) - lambda(k-x)` on `x = 0..=n_max`, linear between
/// integers. Uses `z = lambda` when `lambda` is sub-additive on its horizon.
fn index_span_map(lambda: &IndexCurve, n_max: usize) -> Result<MonotoneMap> {
    let xs: Vec<f64> = (0..=n_max).map(|x| x as f64).collect();
    let zs: Vec<f64> = if lambda.is_subadditive() && lambda.eval(0) == 0.0 {
        (0..=n_max).map(|x| lambda.eval(x as i64)).collect()
    } else {
        (0..=n_max as i64)
            .map(|x| (0..=n_max as i64 + x).map(|k| lambda.eval(k) - lambda.eval(k - x)).fold(0.0, f64::max))
            .collect()
    };
    MonotoneMap::new(xs, zs, Interp::Linear)
}

/// v.b.c to v.w.d: `lambda(n) = inf{t : alpha(t) >= n}`, `h(y) = f(z^{-1}(y))`.
pub fn vbc_to_vwd(m: &TrafficModel) -> Result<TrafficModel> {
    let (alpha, f) = match m {
        TrafficModel::Vbc { alpha, bound } => (alpha, bound),
        other => return Err(Error::WrongKind { expected: "v.b.c", found: other.kind().name() }),
    };
    let n_max = (alpha.eval(alpha.t_max()).floor() as usize).max(MIN_PACKETS);
    let lambda = IndexCurve::from_fn(n_max, 1.0 / alpha.tail_rate(), |n| alpha.first_reach(n as f64))?;
    let bound = if f.is_step() { f.clone() } else { BoundingFunction::warped(f, index_span_map(&lambda, n_max)?) };
    Ok(TrafficModel::Vwd { lambda, bound })
}

/// v.w.d to v.b.c: `alpha(t) = sup{k : lambda(k) <= t}`, `f(x) = h(z^{-1}(x))`
/// with `z(y) = sup_t alpha(t+y) - alpha(t) + 1`.
///
/// `alpha` is the exact staircase. `z` is represented by its right limits at
/// every jump, which never undercounts and so keeps `f` conservative.
pub fn vwd_to_vbc(m: &TrafficModel) -> Result<TrafficModel> {
    let (lambda, h) = m.as_vwd()?;
    let r = lambda.tail_rate();
    if r <= 0.0 {
        return Err(Error::Divergent("arrival count (flat v.w.d curve)"));
    }
    let n = lambda.horizon();
    let ext = lambda.extended_to(n.max(MIN_PACKETS));
    let mut grid: Vec<f64> = Vec::with_capacity(ext.horizon() + 1);
    let mut values: Vec<f64> = Vec::with_capacity(ext.horizon() + 1);
    for (k, &t) in ext.values().iter().enumerate() {
        if grid.last() == Some(&t) {
            *values.last_mut().unwrap() = k as f64;
        } else {
            grid.push(t);
            values.push(k as f64);
        }
    }
    let alpha = TimeCurve::new(grid, values, Interp::Step, 1.0 / r)?;
    if h.is_step() {
        return Ok(TrafficModel::Vbc { alpha, bound: h.clone() });
    }

    // Past the horizon the increments repeat, so starting points j <= n+1 and
    // spans of MIN_PACKETS cover every distinct jump of z.
    let mut knots: Vec<f64> = vec![0.0];
    for j in 0..=n as i64 + 1 {
        for k in j..=j + MIN_PACKETS as i64 {
            knots.push(lambda.eval(k) - lambda.eval(j));
        }
    }
    knots.sort_by(f64::total_cmp);
    knots.dedup_by(|a, b| *a - *b <= 1e-12 * b.abs().max(1.0));
    let span = |y: f64| -> f64 {
        (0..=n as i64 + 1)
            .map(|j| {
                let v = lambda.eval(j) + y;
                let top = lambda.last_at_most(v + 1e-12 * v.abs().max(1.0)).map_or(-1.0, |k| k as f64);
                top - j as f64 + 2.0
            })
            .fold(1.0, f64::max)
    };
    let zs: Vec<f64> = knots.iter().map(|&y| span(y)).collect();
    let map = MonotoneMap::new(knots, zs, Interp::Step)?;
    Ok(TrafficModel::Vbc { alpha, bound: BoundingFunction::warped(h, map) })
}

/// Aggregate of v.w.d flows sharing a FIFO queue. Each flow goes to the
/// time domain, the curves are summed and the bounds min-plus convolved on
/// `packet_grid`, and the result comes back as a v.w.d model.
pub fn superpose(models: &[TrafficModel], packet_grid: &Grid) -> Result<TrafficModel> {
    let first = models.first().ok_or(Error::Empty("traffic models"))?;
    for m in models {
        m.expect(TrafficKind::Vwd)?;
    }
    if models.len() == 1 {
        return Ok(first.clone());
    }
    let mut alphas = Vec::with_capacity(models.len());
    let mut f: Option<BoundingFunction> = None;
    for m in models {
        if let TrafficModel::Vbc { alpha, bound } = vwd_to_vbc(m)? {
            alphas.push(alpha);
            f = Some(match f {
                None => bound,
                Some(acc) => min_plus_conv(&acc, &bound, packet_grid),
            });
        }
    }
    let alpha = TimeCurve::sum(&alphas)?;
    vbc_to_vwd(&TrafficModel::Vbc { alpha, bound: f.expect("at least two models") })
}
