//! (max,+) operators on index curves and the distance primitives built on them.
//!
//! ```text
//! (f (x) g)(n)        = sup_{0<=m<=n} { f(m) + g(n-m) }
//! (f (/) g)(n)        = inf_{m>=0}    { f(n+m) - g(m) }
//! (a (x) gamma)(n)    = sup_{0<=m<=n} { a(m) + gamma(n-m+1) }     guaranteed-rate clock
//! (f (/) g)_min(t)    = sup_{k>=0}    { f(k+t) - g(k) }
//! H(lambda, gamma+x)  = sup_{m>=0} inf{ k>=0 : gamma(m) + x <= lambda(m+k) }
//! ```
//!
//! Every sup/inf over an unbounded index is reduced to a finite range using the
//! linear tails: past both horizons the objective moves monotonically.

use super::IndexCurve;
use crate::{Error, Result};

/// Plain max-plus convolution. The result is exact on every index.
pub fn max_plus_conv(f: &IndexCurve, g: &IndexCurve) -> IndexCurve {
    let (rf, rg) = (f.tail_rate(), g.tail_rate());
    let (nf, ng) = (f.horizon(), g.horizon());
    let base = nf + ng;
    // Past `base` the result is max(A + r_hi n, B + r_lo n); sample until the
    // faster line has taken over so the tail is exactly linear.
    let (fast, slow, n_fast, n_slow) = if rf >= rg { (f, g, nf, ng) } else { (g, f, ng, nf) };
    let (r_hi, r_lo) = (fast.tail_rate(), slow.tail_rate());
    let a = (0..=n_slow).map(|j| slow.eval(j as i64) - r_hi * j as f64).fold(f64::NEG_INFINITY, f64::max)
        + fast.eval(n_fast as i64)
        - r_hi * n_fast as f64;
    let b = (0..=n_fast).map(|m| fast.eval(m as i64) - r_lo * m as f64).fold(f64::NEG_INFINITY, f64::max)
        + slow.eval(n_slow as i64)
        - r_lo * n_slow as f64;
    let horizon = if r_hi > r_lo && b > a {
        base.max(((b - a) / (r_hi - r_lo)).ceil() as usize)
    } else {
        base
    };
    let values = (0..=horizon)
        .map(|n| {
            let n = n as i64;
            (0..=n).map(|m| f.eval(m) + g.eval(n - m)).fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    IndexCurve::new(values, r_hi).expect("convolution of valid curves is a valid curve")
}

/// Max-plus deconvolution `inf_{0<=m<=m_max} f(n+m) - g(m)`, clamped at 0.
///
/// The range is widened to cover both horizons, which makes the infimum exact
/// over all `m >= 0` because `f.tail_rate >= g.tail_rate` is required.
pub fn max_plus_deconv(f: &IndexCurve, g: &IndexCurve, m_max: usize) -> Result<IndexCurve> {
    if m_max < 1 {
        return Err(Error::param("m_max", "must be >= 1"));
    }
    if f.tail_rate() < g.tail_rate() {
        return Err(Error::Divergent("max-plus deconvolution (f grows slower than g)"));
    }
    let m_hi = m_max.max(f.horizon()).max(g.horizon()) as i64;
    let raw = |n: i64| (0..=m_hi).map(|m| f.eval(n + m) - g.eval(m)).fold(f64::INFINITY, f64::min);
    // past f's horizon the unclamped value is linear in n; sample until the
    // clamp stops binding so the tail stays exact
    let h = f.horizon() as i64;
    let mut n_end = h;
    let at_h = raw(h);
    if at_h < 0.0 && f.tail_rate() > 0.0 {
        n_end += (-at_h / f.tail_rate()).ceil() as i64;
    }
    let values = (0..=n_end).map(|n| raw(n).max(0.0)).collect();
    IndexCurve::new(values, f.tail_rate())
}

/// `sup_{0<=k<=k_max} f(k+t) - g(k)`, exact over all `k >= 0` (range widened to
/// the horizons). Requires `f.tail_rate <= g.tail_rate`.
pub fn min_plus_deconv_at(f: &IndexCurve, g: &IndexCurve, t: usize, k_max: usize) -> Result<f64> {
    if f.tail_rate() > g.tail_rate() {
        return Err(Error::Divergent("min-plus deconvolution (f grows faster than g)"));
    }
    let k_hi = k_max.max(f.horizon()).max(g.horizon()) as i64;
    let t = t as i64;
    Ok((0..=k_hi).map(|k| f.eval(k + t) - g.eval(k)).fold(f64::NEG_INFINITY, f64::max))
}

/// Guaranteed-rate clock `sup_{0<=m<=n} a(m) + gamma(n-m+1)`.
pub fn arrival_service_conv(a: &IndexCurve, gamma: &IndexCurve) -> IndexCurve {
    max_plus_conv(a, &gamma.shifted_left())
}

/// Composition of two service curves under the guaranteed-rate clock:
/// `a (x) g1 (x) g2 = a (x) G` with
/// `G(n) = sup_{1<=i<=n} g1(i) + g2(n+1-i)` for `n >= 1` and `G(0) = g1(0) + g2(0)`.
pub fn service_chain_conv(g1: &IndexCurve, g2: &IndexCurve) -> IndexCurve {
    let inner = max_plus_conv(&g1.shifted_left(), &g2.shifted_left());
    let mut values = Vec::with_capacity(inner.horizon() + 2);
    values.push(g1.eval(0) + g2.eval(0));
    values.extend_from_slice(inner.values());
    IndexCurve::new(values, inner.tail_rate()).expect("service composition stays nondecreasing")
}

/// Maximum horizontal distance `H(lambda, gamma + x)` in packets.
pub fn horizontal_distance(lambda: &IndexCurve, gamma: &IndexCurve, x: f64) -> Result<u64> {
    if stability_margin(lambda, gamma) > 0.0 {
        return Err(Error::Divergent("horizontal distance (service slower than arrivals)"));
    }
    let m_hi = lambda.horizon().max(gamma.horizon()) as i64;
    let mut worst = 0u64;
    for m in 0..=m_hi {
        let target = gamma.eval(m) + x;
        let base = lambda.eval(m);
        if base >= target {
            continue;
        }
        // first index j >= m with lambda(j) >= target
        let j = match lambda.last_below(target) {
            Some(u64::MAX) => return Err(Error::Divergent("horizontal distance (flat arrival curve)")),
            Some(k) => k + 1,
            None => 0,
        };
        worst = worst.max(j.saturating_sub(m as u64));
    }
    Ok(worst)
}

/// `gamma.tail_rate - lambda.tail_rate`; bounds need this to be `<= 0`.
pub fn stability_margin(lambda: &IndexCurve, gamma: &IndexCurve) -> f64 {
    gamma.tail_rate() - lambda.tail_rate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lin(r: f64) -> IndexCurve {
        IndexCurve::linear(r, 16).unwrap()
    }

    #[test]
    fn conv_examples() {
        let zero = IndexCurve::linear(0.0, 8).unwrap();
        let c = max_plus_conv(&lin(1.0), &zero);
        for n in 0..=64 {
            assert_eq!(c.eval(n), n as f64);
        }
        let c = max_plus_conv(&lin(1.0), &lin(2.0));
        for n in 0..=64 {
            let brute = (0..=n).map(|m| m as f64 + 2.0 * (n - m) as f64).fold(f64::MIN, f64::max);
            assert_eq!(c.eval(n), brute);
            assert_eq!(c.eval(n), 2.0 * n as f64);
        }
    }

    #[test]
    fn conv_tail_crossover() {
        // slow curve starts high, fast curve overtakes far beyond the horizons
        let slow = IndexCurve::affine(100.0, 1.0, 2).unwrap();
        let fast = IndexCurve::linear(1.5, 2).unwrap();
        let c = max_plus_conv(&slow, &fast);
        for n in 0..400i64 {
            let brute = (0..=n).map(|m| slow.eval(m) + fast.eval(n - m)).fold(f64::MIN, f64::max);
            assert_eq!(c.eval(n), brute, "n = {n}");
        }
    }

    #[test]
    fn deconv_examples() {
        let d = max_plus_deconv(&lin(2.0), &lin(1.0), 1000).unwrap();
        for n in 0..=40 {
            assert_eq!(d.eval(n), 2.0 * n as f64);
        }
        let f = IndexCurve::new(vec![0.0, 1.0, 1.0, 4.0, 5.0], 1.0).unwrap();
        let d = max_plus_deconv(&f, &f, 10).unwrap();
        assert_eq!(d.eval(0), 0.0);
        for n in 0..=4 {
            assert!(d.eval(n) <= f.eval(n));
        }
        assert!(max_plus_deconv(&lin(1.0), &lin(2.0), 10).is_err());
    }

    #[test]
    fn min_deconv_examples() {
        assert_eq!(min_plus_deconv_at(&lin(2.0), &lin(3.0), 1, 1000).unwrap(), 2.0);
        assert_eq!(min_plus_deconv_at(&lin(1.0), &lin(1.0), 0, 1000).unwrap(), 0.0);
        assert!(min_plus_deconv_at(&lin(2.0), &lin(1.0), 1, 10).is_err());
    }

    #[test]
    fn grc_examples() {
        let r = arrival_service_conv(&lin(1.0), &lin(1.0));
        for n in 0..=30 {
            assert_eq!(r.eval(n), n as f64 + 1.0);
        }
        let a = IndexCurve::new(vec![0.0, 0.3, 2.0, 2.5], 1.0).unwrap();
        let c = 0.7;
        let gamma = IndexCurve::from_fn(4, 0.0, |n| if n == 0 { 0.0 } else { c }).unwrap();
        let r = arrival_service_conv(&a, &gamma);
        for n in 0..=3 {
            assert!((r.eval(n) - (a.eval(n) + c)).abs() < 1e-15);
        }
    }

    #[test]
    fn chain_of_two_unit_servers() {
        // one packet through two unit-time servers leaves at time 2
        let g = lin(1.0);
        let chain = service_chain_conv(&g, &g);
        let a = IndexCurve::linear(0.0, 4).unwrap();
        let grc = arrival_service_conv(&a, &chain);
        assert_eq!(grc.eval(0), 2.0);
        // G(n) = sup_{1<=i<=n} i + 1.1 (n+1-i) = 1 + 1.1 n
        let chain = service_chain_conv(&g, &g.plus_linear(0.1).unwrap());
        for n in 1..=40 {
            assert!((chain.eval(n) - (1.0 + 1.1 * n as f64)).abs() < 1e-12);
        }
    }

    #[test]
    fn horizontal_examples() {
        let l = IndexCurve::linear(1.0, 32).unwrap();
        assert_eq!(horizontal_distance(&l, &l, 2.0).unwrap(), 2);
        assert_eq!(horizontal_distance(&l, &lin(0.5), 0.0).unwrap(), 0);
        assert!(horizontal_distance(&l, &lin(2.0), 1.0).is_err());
    }

    #[test]
    fn stability_examples() {
        assert_eq!(stability_margin(&lin(1.0), &lin(0.5)), -0.5);
        assert_eq!(stability_margin(&lin(1.0), &lin(1.0)), 0.0);
        assert_eq!(stability_margin(&lin(1.0), &lin(2.0)), 1.0);
    }
}
