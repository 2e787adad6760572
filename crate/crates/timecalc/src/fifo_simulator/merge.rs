//! FIFO aggregation of arrival sequences:
//!
//! ```text
//! a(n) = min_{0<=m<=n+1} max[ a1(m-1), a2(n-m) ]
//! ```
//!
//! with `a_i(k) = 0` for `k < 0` and `+inf` past the end of a sequence.

use crate::{Error, Result};

fn at(a: &[f64], k: i64) -> f64 {
    if k < 0 {
        0.0
    } else {
        a.get(k as usize).copied().unwrap_or(f64::INFINITY)
    }
}

/// Merged arrival times of two FIFO flows.
///
/// `a1(m-1)` grows and `a2(n-m)` shrinks with `m`, so the minimum of their
/// maximum sits where they cross; it is located by bisection.
pub fn merge_fifo(a1: &[f64], a2: &[f64]) -> Vec<f64> {
    let total = a1.len() + a2.len();
    (0..total as i64)
        .map(|n| {
            // smallest m in [0, n+1] with a1(m-1) >= a2(n-m); m = n+1 always qualifies
            let (mut lo, mut hi) = (0i64, n + 1);
            while lo < hi {
                let mid = (lo + hi) / 2;
                if at(a1, mid - 1) >= at(a2, n - mid) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
            let here = at(a1, lo - 1).max(at(a2, n - lo));
            if lo == 0 {
                here
            } else {
                here.min(at(a1, lo - 2).max(at(a2, n - lo + 1)))
            }
        })
        .collect()
}

/// Left fold of [`merge_fifo`] over any number of flows.
pub fn merge_fifo_n(flows: &[Vec<f64>]) -> Result<Vec<f64>> {
    let (first, rest) = flows.split_first().ok_or(Error::Empty("flows"))?;
    Ok(rest.iter().fold(first.clone(), |acc, f| merge_fifo(&acc, f)))
}
