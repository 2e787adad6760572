//! Pairs each analytic bound with its simulated counterpart.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;
use timecalc::fifo_simulator::{check_dominance_values, empirical_ccdf, EmpiricalCcdf};

use crate::analyze::{run_analyze, BoundSet};
use crate::output::{csv_text, write_file};
use crate::scenario::Scenario;
use crate::simulate::{run_replications, samples, EmpiricalRow};

/// Outcome of one bound-versus-simulation check.
#[derive(Debug, Clone)]
pub struct ComparisonRow {
    pub metric: String,
    pub tag: String,
    pub grid: Vec<f64>,
    pub bound: Vec<f64>,
    pub ccdf: EmpiricalCcdf,
    pub dominated: bool,
    pub worst_margin: f64,
    pub worst_x: f64,
}

impl ComparisonRow {
    pub fn file_stem(&self) -> String {
        format!("{}_{}", self.metric, self.tag)
    }
}

#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub bounds: BoundSet,
    pub rows: Vec<ComparisonRow>,
}

impl ComparisonReport {
    pub fn failures(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(|r| !r.dominated)
    }

    pub fn all_dominated(&self) -> bool {
        self.failures().next().is_none()
    }
}

pub fn run_compare(s: &Scenario) -> Result<ComparisonReport> {
    crate::scenario::require(s, true, true)?;
    let bounds = run_analyze(s)?;
    let reps = run_replications(s)?;
    let mut rows = Vec::with_capacity(bounds.rows.len());
    for b in &bounds.rows {
        let ccdf = empirical_ccdf(&samples(&b.sample, &reps), &b.grid, s.analysis.alpha)?;
        let values = b.values();
        let d = check_dominance_values(&values, &ccdf)?;
        rows.push(ComparisonRow {
            metric: b.metric.clone(),
            tag: b.tag.clone(),
            grid: b.grid.clone(),
            bound: values,
            ccdf,
            dominated: d.pass,
            worst_margin: d.worst_margin,
            worst_x: d.worst_x,
        });
    }
    Ok(ComparisonReport { bounds, rows })
}

fn header(s: &Scenario, command: &str, simulated: bool) -> String {
    let mut out = format!("scenario: {}\ncommand: {command}\n", s.name);
    if simulated {
        let sim = &s.simulation;
        let _ = writeln!(
            out,
            "seed: {}  replications: {}  packets per replication: {}  alpha: {}",
            sim.seed, sim.replications, sim.packets, s.analysis.alpha
        );
    }
    out
}

fn bound_header(out: &mut String, s: &Scenario, b: &BoundSet) {
    let _ = writeln!(out, "eta: {}", b.eta);
    for (f, h) in s.flows.iter().zip(&b.hbar) {
        if let Some(h) = h {
            let _ = writeln!(out, "flow {}: hbar {h:.6}", f.name);
        }
    }
    for n in &b.notes {
        let _ = writeln!(out, "note: {n}");
    }
}

pub fn analyze_report(s: &Scenario, b: &BoundSet) -> String {
    let mut out = header(s, "analyze", false);
    bound_header(&mut out, s, b);
    let probe = s.analysis.eta_objective_x;
    let _ = writeln!(out, "\n{:<34} {:<10} {:>14}", "metric", "tag", format!("bound@{probe}"));
    for r in &b.rows {
        let _ = writeln!(out, "{:<34} {:<10} {:>14.9}", r.metric, r.tag, r.bound.eval(probe));
    }
    out
}

pub fn simulate_report(s: &Scenario, rows: &[EmpiricalRow]) -> String {
    let mut out = header(s, "simulate", true);
    let _ = writeln!(out, "\n{:<34} {:>9} {:>11}", "metric", "samples", "dkw_eps");
    for r in rows {
        let _ = writeln!(out, "{:<34} {:>9} {:>11.6}", r.metric, r.ccdf.n_samples, r.ccdf.dkw_epsilon);
    }
    out
}

pub fn compare_report(s: &Scenario, c: &ComparisonReport) -> String {
    let mut out = header(s, "compare", true);
    bound_header(&mut out, s, &c.bounds);
    let _ = writeln!(
        out,
        "\n{:<34} {:<10} {:<6} {:>13} {:>9} {:>9} {:>11}",
        "metric", "tag", "result", "worst_margin", "worst_x", "samples", "dkw_eps"
    );
    for r in &c.rows {
        let _ = writeln!(
            out,
            "{:<34} {:<10} {:<6} {:>13.6} {:>9.3} {:>9} {:>11.6}",
            r.metric,
            r.tag,
            if r.dominated { "PASS" } else { "FAIL" },
            r.worst_margin,
            r.worst_x,
            r.ccdf.n_samples,
            r.ccdf.dkw_epsilon
        );
    }
    let failures: Vec<String> =
        c.failures().map(|r| format!("{} ({}) at x = {:.3}, margin {:.6}", r.metric, r.tag, r.worst_x, r.worst_margin)).collect();
    if failures.is_empty() {
        out.push_str("\ndominance failures: none\n");
    } else {
        let _ = writeln!(out, "\ndominance failures: {}", failures.len());
        for f in failures {
            let _ = writeln!(out, "  {f}");
        }
    }
    out
}

/// Writes one CSV per bound plus `report.txt`.
pub fn write_analyze(s: &Scenario, b: &BoundSet, dir: &Path) -> Result<()> {
    for r in &b.rows {
        write_file(dir, &format!("{}.csv", r.file_stem()), &csv_text(&r.grid, Some(&r.values()), None))?;
    }
    write_file(dir, "report.txt", &analyze_report(s, b))
}

pub fn write_simulate(s: &Scenario, rows: &[EmpiricalRow], dir: &Path) -> Result<()> {
    for r in rows {
        write_file(dir, &format!("{}.csv", r.metric), &csv_text(&r.ccdf.grid, None, Some(&r.ccdf)))?;
    }
    write_file(dir, "report.txt", &simulate_report(s, rows))
}

pub fn write_compare(s: &Scenario, c: &ComparisonReport, dir: &Path) -> Result<()> {
    for r in &c.rows {
        write_file(dir, &format!("{}.csv", r.file_stem()), &csv_text(&r.grid, Some(&r.bound), Some(&r.ccdf)))?;
    }
    write_file(dir, "report.txt", &compare_report(s, c))
}

