//! Stochastic service models and conversions.
//!
//! ```text
//! i.d:    P{ d(n) - (a (x) gamma)(n) > x }                                  <= j(x)
//! eta:    P{ sup_{0<=m<=n} [d(m) - (a (x) gamma)(m)] - eta (n-m) > x }      <= j(x)
//! strict: P{ Delta(m,n) - gamma(n-m+1) > x }  for windows inside a busy period <= j(x)
//! ```
//!
//! `Delta(m,n)` is the total service time of packets `m..=n`. Curves are in
//! seconds.

use statrs::function::gamma::ln_gamma;

use crate::curve_algebra::{eta_inflate, BoundingFunction, Grid, IndexCurve, TailClass};
use crate::{Error, Result};

/// Truncated tail sums stop once the remainder is provably below this.
const TAIL_TOL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServiceKind {
    Id,
    Eta,
    Strict,
}

impl ServiceKind {
    pub fn name(self) -> &'static str {
        match self {
            ServiceKind::Id => "i.d",
            ServiceKind::Eta => "eta",
            ServiceKind::Strict => "strict",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ServiceModel {
    Id { gamma: IndexCurve, bound: BoundingFunction },
    Eta { gamma: IndexCurve, bound: BoundingFunction, eta: f64 },
    Strict { gamma: IndexCurve, bound: BoundingFunction },
}

impl ServiceModel {
    pub fn kind(&self) -> ServiceKind {
        match self {
            ServiceModel::Id { .. } => ServiceKind::Id,
            ServiceModel::Eta { .. } => ServiceKind::Eta,
            ServiceModel::Strict { .. } => ServiceKind::Strict,
        }
    }

    pub fn gamma(&self) -> &IndexCurve {
        match self {
            ServiceModel::Id { gamma, .. } | ServiceModel::Eta { gamma, .. } | ServiceModel::Strict { gamma, .. } => {
                gamma
            }
        }
    }

    pub fn bound(&self) -> &BoundingFunction {
        match self {
            ServiceModel::Id { bound, .. } | ServiceModel::Eta { bound, .. } | ServiceModel::Strict { bound, .. } => {
                bound
            }
        }
    }

    pub(crate) fn as_id(&self) -> Result<(&IndexCurve, &BoundingFunction)> {
        match self {
            ServiceModel::Id { gamma, bound } => Ok((gamma, bound)),
            other => Err(Error::WrongKind { expected: "i.d", found: other.kind().name() }),
        }
    }
}

/// Constant service time per packet: `gamma(n) = service * n` with no violation.
pub fn deterministic_server(service: f64) -> Result<ServiceModel> {
    if !(service.is_finite() && service >= 0.0) {
        return Err(Error::param("service", format!("must be >= 0, got {service}")));
    }
    Ok(ServiceModel::Id { gamma: IndexCurve::linear(service, 1)?, bound: BoundingFunction::step() })
}

fn check_pe(pe: f64) -> Result<()> {
    if !(0.0..1.0).contains(&pe) {
        return Err(Error::param("pe", format!("must lie in [0, 1), got {pe}")));
    }
    Ok(())
}

/// `P{S_{n+1} > dbar (n+1) + x}` where `S_{n+1}` is the number of slots taken
/// by `n+1` packets, each transmitted until success with per-slot error
/// probability `pe`, and `dbar = 1/(1-pe)`.
///
/// ```text
/// sum_{i >= K} C(i-1, n) (1-pe)^{n+1} pe^{i-n-1},   K = floor(dbar (n+1) + x) + 1
/// ```
///
/// Terms are summed in log space; the sum stops when the ratio-test bound on
/// the remainder drops below 1e-13, and that bound is added.
pub fn negbin_tail(pe: f64, n: u64, x: f64) -> Result<f64> {
    check_pe(pe)?;
    if !(x.is_finite() && x >= 0.0) {
        return Err(Error::param("x", format!("must be finite and >= 0, got {x}")));
    }
    if pe == 0.0 {
        return Ok(0.0);
    }
    let p = 1.0 - pe;
    let m = n + 1;
    let start = ((m as f64) / p + x).floor() as u64 + 1;
    let start = start.max(m);
    let ln_term = |i: u64| {
        ln_gamma(i as f64) - ln_gamma(m as f64) - ln_gamma((i - n) as f64) + m as f64 * p.ln()
            + (i - m) as f64 * pe.ln()
    };
    let mut term = ln_term(start).exp();
    let mut acc = 0.0;
    let mut i = start;
    loop {
        acc += term;
        let ratio = pe * i as f64 / (i - n) as f64;
        if ratio < 1.0 {
            let rest = term * ratio / (1.0 - ratio);
            if rest < TAIL_TOL {
                return Ok((acc + rest).min(1.0));
            }
        }
        term *= ratio;
        i += 1;
    }
}

/// Chernoff exponent for `S_L - (dbar + eta) L` with geometric slots:
/// returns `(theta, q)` minimizing `q(theta) = M(theta) e^{-theta (dbar+eta)}`,
/// so that `P{S_L - (dbar+eta) L > x} <= e^{-theta x} q^L`.
fn chernoff(pe: f64, eta: f64) -> (f64, f64) {
    let p = 1.0 - pe;
    let dbar = 1.0 / p;
    let ln_q = |t: f64| p.ln() + t - (1.0 - pe * t.exp()).ln() - t * (dbar + eta);
    let (mut lo, mut hi) = (0.0, -pe.ln());
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..200 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if ln_q(a) < ln_q(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let t = 0.5 * (lo + hi);
    (t, ln_q(t).exp())
}

/// `sum_{L>=1} P{S_L - dbar L > x + eta L}` in slots: the probability that any
/// window ending at a given packet exceeds the rate-`dbar + eta` service curve
/// by more than `x`.
pub fn wireless_eta_tail(pe: f64, eta: f64, x: f64) -> Result<f64> {
    check_pe(pe)?;
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::param("eta", format!("must be > 0, got {eta}")));
    }
    if pe == 0.0 {
        return Ok(if x < 0.0 { 1.0 } else { 0.0 });
    }
    let (theta, q) = chernoff(pe, eta);
    let scale = (-theta * x).exp() / (1.0 - q);
    let mut acc = 0.0;
    let mut q_pow = q;
    for len in 1u64.. {
        acc += negbin_tail(pe, len - 1, x + eta * len as f64)?;
        if acc >= 1.0 {
            return Ok(1.0);
        }
        q_pow *= q;
        let rest = scale * q_pow;
        if rest < TAIL_TOL {
            return Ok((acc + rest).min(1.0));
        }
    }
    unreachable!()
}

/// `sup_{L>=1} P{S_L - dbar L > x + eta L}` in slots: the worst single window.
pub fn wireless_window_tail(pe: f64, eta: f64, x: f64) -> Result<f64> {
    check_pe(pe)?;
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::param("eta", format!("must be > 0, got {eta}")));
    }
    if pe == 0.0 {
        return Ok(0.0);
    }
    let (theta, q) = chernoff(pe, eta);
    let scale = (-theta * x).exp();
    let mut best: f64 = 0.0;
    let mut q_pow = 1.0;
    for len in 1u64.. {
        best = best.max(negbin_tail(pe, len - 1, x + eta * len as f64)?);
        q_pow *= q;
        if scale * q_pow < TAIL_TOL.max(best * 1e-9) {
            return Ok(best);
        }
    }
    unreachable!()
}

fn wireless_parts(
    pe: f64,
    eta: f64,
    slot: f64,
    grid: &Grid,
    tail: fn(f64, f64, f64) -> Result<f64>,
) -> Result<(IndexCurve, BoundingFunction)> {
    check_pe(pe)?;
    if !(eta.is_finite() && eta > 0.0) {
        return Err(Error::param("eta", format!("must be > 0, got {eta}")));
    }
    if !(slot.is_finite() && slot > 0.0) {
        return Err(Error::param("slot", format!("must be > 0, got {slot}")));
    }
    let gamma = IndexCurve::linear((1.0 / (1.0 - pe) + eta) * slot, 1)?;
    if pe == 0.0 {
        return Ok((gamma, BoundingFunction::step()));
    }
    let values = grid.points().map(|x| tail(pe, eta, x / slot)).collect::<Result<Vec<f64>>>()?;
    let (theta, _) = chernoff(pe, eta);
    Ok((gamma, BoundingFunction::sampled_lifted(*grid, values, Some(theta / slot), TailClass::Gbar)))
}

/// Slotted link with retransmission until success as an i.d model:
/// `gamma(n) = (dbar + eta) n slot` with bound [`wireless_eta_tail`], sampled
/// on `grid` (seconds).
pub fn wireless_link_ssc(pe: f64, eta: f64, slot: f64, grid: &Grid) -> Result<ServiceModel> {
    let (gamma, bound) = wireless_parts(pe, eta, slot, grid, wireless_eta_tail)?;
    Ok(ServiceModel::Id { gamma, bound })
}

/// The same link as a strict model, bounded per window by
/// [`wireless_window_tail`].
pub fn wireless_link_strict(pe: f64, eta: f64, slot: f64, grid: &Grid) -> Result<ServiceModel> {
    let (gamma, bound) = wireless_parts(pe, eta, slot, grid, wireless_window_tail)?;
    Ok(ServiceModel::Strict { gamma, bound })
}

/// An eta model is an i.d model with the same curve and bound.
pub fn eta_to_id(m: &ServiceModel) -> Result<ServiceModel> {
    match m {
        ServiceModel::Eta { gamma, bound, .. } => Ok(ServiceModel::Id { gamma: gamma.clone(), bound: bound.clone() }),
        other => Err(Error::WrongKind { expected: "eta", found: other.kind().name() }),
    }
}

/// i.d to eta: `(gamma, j_eta)`.
pub fn id_to_eta(m: &ServiceModel, eta: f64) -> Result<ServiceModel> {
    let (gamma, bound) = m.as_id()?;
    Ok(ServiceModel::Eta { gamma: gamma.clone(), bound: eta_inflate(bound, eta)?, eta })
}

/// Strict to i.d (same bound) or to eta (inflated bound). `eta` is ignored for
/// an i.d target.
pub fn strict_convert(m: &ServiceModel, target: ServiceKind, eta: f64) -> Result<ServiceModel> {
    let (gamma, bound) = match m {
        ServiceModel::Strict { gamma, bound } => (gamma, bound),
        other => return Err(Error::WrongKind { expected: "strict", found: other.kind().name() }),
    };
    match target {
        ServiceKind::Id => Ok(ServiceModel::Id { gamma: gamma.clone(), bound: bound.clone() }),
        ServiceKind::Eta => Ok(ServiceModel::Eta { gamma: gamma.clone(), bound: eta_inflate(bound, eta)?, eta }),
        ServiceKind::Strict => Err(Error::param("target", "must be i.d or eta")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::beta::beta_reg;

    #[test]
    fn negbin_examples() {
        assert!((negbin_tail(0.5, 0, 0.0).unwrap() - 0.25).abs() < 1e-13);
        for n in [0, 3, 17] {
            for x in [0.0, 0.5, 4.0] {
                assert_eq!(negbin_tail(0.0, n, x).unwrap(), 0.0);
            }
        }
        assert!(negbin_tail(1.0, 0, 0.0).is_err());
    }

    #[test]
    fn negbin_against_incomplete_beta() {
        // P{S_m >= K} = P{fewer than m successes in K-1 slots} = I_{pe}(K-m, m)
        for pe in [0.05, 0.2, 0.5, 0.8] {
            for n in [0u64, 1, 4, 9, 30] {
                for x in [0.0, 0.7, 1.0, 3.0, 10.0, 25.0] {
                    let m = n + 1;
                    let k = ((m as f64) / (1.0 - pe) + x).floor() as u64 + 1;
                    let want = if k <= m { 1.0 } else { beta_reg((k - m) as f64, m as f64, pe) };
                    let got = negbin_tail(pe, n, x).unwrap();
                    assert!((got - want).abs() < 1e-10, "pe={pe} n={n} x={x}: {got} vs {want}");
                }
            }
        }
    }

    #[test]
    fn negbin_non_increasing() {
        let mut prev = 1.0;
        for i in 0..200 {
            let v = negbin_tail(0.2, 4, i as f64 * 0.1).unwrap();
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn chernoff_envelope() {
        let (theta, q) = chernoff(0.2, 0.3);
        assert!(theta > 0.0 && q < 1.0);
        for len in 1..40u64 {
            for x in [0.0, 2.0, 6.0] {
                let t = negbin_tail(0.2, len - 1, x + 0.3 * len as f64).unwrap();
                assert!(t <= (-theta * x).exp() * q.powi(len as i32) + 1e-15);
            }
        }
    }

    #[test]
    fn eta_tail_against_long_sum() {
        for x in [0.0, 1.0, 5.0, 12.0] {
            let brute: f64 = (1..5000u64).map(|l| negbin_tail(0.2, l - 1, x + 0.3 * l as f64).unwrap()).sum();
            let got = wireless_eta_tail(0.2, 0.3, x).unwrap();
            assert!(got >= brute.min(1.0) - 1e-15);
            assert!(got - brute.min(1.0) < 1e-12, "x={x}");
        }
    }

    #[test]
    fn window_tail_is_below_sum() {
        for x in [0.0, 2.0, 8.0] {
            let w = wireless_window_tail(0.2, 0.3, x).unwrap();
            assert!(w <= wireless_eta_tail(0.2, 0.3, x).unwrap());
            assert!(w >= negbin_tail(0.2, 0, x + 0.3).unwrap());
        }
    }

    #[test]
    fn wireless_error_free() {
        let g = Grid::new(0.1, 5.0).unwrap();
        let m = wireless_link_ssc(0.0, 0.5, 2.0, &g).unwrap();
        assert_eq!(m.gamma().eval(4), 12.0);
        assert!(m.bound().is_step());
    }

    #[test]
    fn wireless_model_shape() {
        let g = Grid::new(0.5, 40.0).unwrap();
        let m = wireless_link_ssc(0.2, 0.3, 1.0, &g).unwrap();
        assert!((m.gamma().eval(10) - 15.5).abs() < 1e-12);
        let b = m.bound();
        assert_eq!(b.class(), TailClass::Gbar);
        let mut prev = 1.0;
        for x in g.points() {
            let v = b.eval(x);
            assert!(v <= prev);
            assert!(v >= negbin_tail(0.2, 0, x + 0.3).unwrap());
            prev = v;
        }
    }

    #[test]
    fn conversions() {
        let gamma = IndexCurve::linear(1.0, 4).unwrap();
        let j = BoundingFunction::exponential(1.0, 1.0).unwrap();
        let id = ServiceModel::Id { gamma: gamma.clone(), bound: j.clone() };
        let eta = id_to_eta(&id, 1.0).unwrap();
        for i in 0..60 {
            let x = i as f64 * 0.1;
            assert!((eta.bound().eval(x) - (2.0 * (-x).exp()).min(1.0)).abs() < 1e-12);
        }
        let back = eta_to_id(&eta).unwrap();
        assert_eq!(back.kind(), ServiceKind::Id);
        for i in 0..60 {
            let x = i as f64 * 0.1;
            assert!(back.bound().eval(x) >= j.eval(x));
        }
        assert!(eta_to_id(&id).is_err());
        assert!(id_to_eta(&eta, 1.0).is_err());

        let strict = ServiceModel::Strict { gamma, bound: j };
        assert_eq!(strict_convert(&strict, ServiceKind::Id, 1.0).unwrap().bound(), strict.bound());
        let e = strict_convert(&strict, ServiceKind::Eta, 1.0).unwrap();
        assert!((e.bound().eval(1.0) - 2.0 * (-1f64).exp()).abs() < 1e-12);
        let det = ServiceModel::Strict { gamma: IndexCurve::linear(0.5, 1).unwrap(), bound: BoundingFunction::step() };
        assert!(strict_convert(&det, ServiceKind::Id, 0.0).unwrap().bound().is_step());
    }

    #[test]
    fn eta_monotone_inflation() {
        let j = BoundingFunction::exponential(1.0, 1.0).unwrap();
        let id = ServiceModel::Id { gamma: IndexCurve::linear(1.0, 1).unwrap(), bound: j };
        let etas: Vec<f64> = (1..=20).map(|k| k as f64 * 0.1).collect();
        for w in etas.windows(2) {
            let small = id_to_eta(&id, w[0]).unwrap();
            let large = id_to_eta(&id, w[1]).unwrap();
            for i in 0..50 {
                let x = i as f64 * 0.2;
                assert!(small.bound().eval(x) >= large.bound().eval(x));
            }
        }
    }
}
