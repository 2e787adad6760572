use std::io::{self, Write};

use crate::{Error, Result};

/// One FIFO node's per-packet arrival, service and departure times (seconds).
#[derive(Debug, Clone, PartialEq)]
pub struct PacketTrace {
    pub a: Vec<f64>,
    pub delta: Vec<f64>,
    pub d: Vec<f64>,
}

impl PacketTrace {
    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    /// CSV with header `n,a,delta,d`, 9 decimals.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "n,a,delta,d")?;
        for n in 0..self.len() {
            writeln!(w, "{n},{:.9},{:.9},{:.9}", self.a[n], self.delta[n], self.d[n])?;
        }
        Ok(())
    }
}

/// Runs `d(n) = max(a(n), d(n-1)) + delta(n)`.
pub fn simulate_fifo_node(a: &[f64], delta: &[f64]) -> Result<PacketTrace> {
    if a.len() != delta.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: delta.len() });
    }
    if a.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("a", "arrival times must be nondecreasing"));
    }
    if delta.iter().any(|v| v.is_nan() || *v < 0.0) {
        return Err(Error::param("delta", "service times must be >= 0"));
    }
    let mut d = Vec::with_capacity(a.len());
    let mut last = f64::NEG_INFINITY;
    for (&t, &s) in a.iter().zip(delta) {
        last = t.max(last) + s;
        d.push(last);
    }
    Ok(PacketTrace { a: a.to_vec(), delta: delta.to_vec(), d })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_examples() {
        let t = simulate_fifo_node(&[0.0, 1.0, 2.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(t.d, vec![1.0, 2.0, 3.0]);
        let t = simulate_fifo_node(&[0.0, 0.0, 0.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(t.d, vec![1.0, 2.0, 3.0]);
        assert!(simulate_fifo_node(&[0.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn csv_format() {
        let t = simulate_fifo_node(&[0.5], &[0.25]).unwrap();
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "n,a,delta,d\n0,0.500000000,0.250000000,0.750000000\n");
    }
}
