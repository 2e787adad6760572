use crate::curve_algebra::BoundingFunction;
use crate::{Error, Result};

/// Fewest samples accepted for an empirical CCDF.
pub const MIN_SAMPLES: usize = 100;

/// Empirical `P{X > x}` on a grid with its DKW half-width.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCcdf {
    pub grid: Vec<f64>,
    pub ccdf: Vec<f64>,
    pub n_samples: usize,
    pub dkw_epsilon: f64,
}

/// `sqrt(ln(2/alpha) / (2n))`: with probability `1 - alpha` the empirical
/// distribution is uniformly within this of the true one.
pub fn dkw_epsilon(n: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt()
}

pub fn empirical_ccdf(samples: &[f64], x_grid: &[f64], alpha: f64) -> Result<EmpiricalCcdf> {
    if samples.len() < MIN_SAMPLES {
        return Err(Error::TooFewSamples { got: samples.len(), need: MIN_SAMPLES });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::param("alpha", format!("must lie in (0, 1), got {alpha}")));
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::param("samples", "contain NaN"));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    let ccdf = x_grid.iter().map(|&x| (n - sorted.partition_point(|&v| v <= x)) as f64 / n as f64).collect();
    Ok(EmpiricalCcdf { grid: x_grid.to_vec(), ccdf, n_samples: n, dkw_epsilon: dkw_epsilon(n, alpha) })
}

/// Outcome of comparing a bound against an empirical CCDF.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dominance {
    pub pass: bool,
    /// `min_x bound(x) - (ccdf(x) - eps)`; negative means a violation.
    pub worst_margin: f64,
    pub worst_x: f64,
}

/// Passes iff `ccdf(x) - eps <= bound(x)` at every grid point.
pub fn check_dominance(bound: &BoundingFunction, ccdf: &EmpiricalCcdf) -> Dominance {
    let values: Vec<f64> = ccdf.grid.iter().map(|&x| bound.eval(x)).collect();
    check_dominance_values(&values, ccdf).expect("lengths agree by construction")
}

/// [`check_dominance`] for bound values already sampled on the CCDF grid.
pub fn check_dominance_values(bound: &[f64], ccdf: &EmpiricalCcdf) -> Result<Dominance> {
    if bound.len() != ccdf.grid.len() {
        return Err(Error::GridMismatch);
    }
    let mut worst = Dominance { pass: true, worst_margin: f64::INFINITY, worst_x: f64::NAN };
    for ((&b, &p), &x) in bound.iter().zip(&ccdf.ccdf).zip(&ccdf.grid) {
        let margin = b - (p - ccdf.dkw_epsilon);
        if margin < worst.worst_margin {
            worst.worst_margin = margin;
            worst.worst_x = x;
        }
    }
    worst.pass = worst.worst_margin >= 0.0;
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fifo_simulator::stream_rng;
    use rand_distr::{Distribution, Exp};

    #[test]
    fn constant_samples_step() {
        let c = empirical_ccdf(&[2.0; 200], &[0.0, 1.9, 2.0, 3.0], 0.01).unwrap();
        assert_eq!(c.ccdf, vec![1.0, 1.0, 0.0, 0.0]);
        assert!(empirical_ccdf(&[1.0; 99], &[0.0], 0.01).is_err());
    }

    #[test]
    fn epsilon_value() {
        assert!((dkw_epsilon(10_000, 0.01) - 0.016276).abs() < 1e-6);
    }

    #[test]
    fn exponential_samples_within_band() {
        let mut rng = stream_rng(42, 0);
        let e = Exp::new(1.0).unwrap();
        let s: Vec<f64> = (0..10_000).map(|_| e.sample(&mut rng)).collect();
        let grid: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let c = empirical_ccdf(&s, &grid, 0.01).unwrap();
        for (x, p) in grid.iter().zip(&c.ccdf) {
            assert!((p - (-x).exp()).abs() <= c.dkw_epsilon);
        }
    }

    #[test]
    fn dominance_examples() {
        let c = empirical_ccdf(&[1.0; 500], &[0.0, 0.5, 1.0], 0.01).unwrap();
        let one = BoundingFunction::sampled(
            crate::curve_algebra::Grid::new(1.0, 1.0).unwrap(),
            vec![1.0, 1.0],
            None,
            crate::curve_algebra::TailClass::Fbar,
        )
        .unwrap();
        assert!(check_dominance(&one, &c).pass);
        let d = check_dominance(&BoundingFunction::step(), &c);
        assert!(!d.pass);
        assert_eq!(d.worst_x, 0.0);
        assert_eq!(check_dominance_values(&[1.0], &c), Err(Error::GridMismatch));
    }
}
