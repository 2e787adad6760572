//! CSV artifacts and the plain-text report.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use timecalc::fifo_simulator::EmpiricalCcdf;

pub const CSV_HEADER: &str = "x,bound,ccdf,dkw_eps,dominated";

/// Rows `x,bound,ccdf,dkw_eps,dominated`; columns without data stay empty.
pub fn csv_text(grid: &[f64], bound: Option<&[f64]>, ccdf: Option<&EmpiricalCcdf>) -> String {
    let mut out = String::with_capacity(grid.len() * 48);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (i, x) in grid.iter().enumerate() {
        let b = bound.map(|b| b[i]);
        let _ = write!(out, "{x:.9},");
        if let Some(b) = b {
            let _ = write!(out, "{b:.9}");
        }
        out.push(',');
        if let Some(c) = ccdf {
            let _ = write!(out, "{:.9},{:.9}", c.ccdf[i], c.dkw_epsilon);
        } else {
            out.push(',');
        }
        out.push(',');
        if let (Some(b), Some(c)) = (b, ccdf) {
            out.push_str(if b - (c.ccdf[i] - c.dkw_epsilon) >= 0.0 { "true" } else { "false" });
        }
        out.push('\n');
    }
    out
}

pub fn write_file(dir: &Path, name: &str, text: &str) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = dir.join(name);
    fs::write(&path, text).with_context(|| format!("writing {}", path.display()))
}
