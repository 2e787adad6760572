//! Builds every analytic bound a scenario asks for.

use anyhow::{bail, Result};
use timecalc::bounds_analysis::{
    backlog_bound, backlog_bound_horizontal, concatenate, delay_bound, horizontal_envelope, node_by_node_delay,
    optimize_eta, output_characterization, Combine, EtaObjective,
};
use timecalc::curve_algebra::{stability_margin, BoundingFunction, Grid, IndexCurve};
use timecalc::service_models::{deterministic_server, wireless_link_ssc, ServiceModel};
use timecalc::traffic_models::{gsbb_vwd_sac, md1_vwd_sac, poisson_superposition_vwd, superpose, TrafficModel};
use timecalc::Error;

use crate::scenario::{FlowModel, Scenario, ServerModel};

/// Which simulated quantity a bound is compared against.
#[derive(Debug, Clone, PartialEq)]
pub enum SampleSpec {
    /// `d - a` at one hop.
    Delay { hop: usize },
    /// Last departure minus first arrival.
    EndToEnd,
    /// Packets in the first node, at arrival epochs and on a time grid.
    Backlog,
    /// Departure-gap statistic of the first node against `lambda`, over
    /// packet spans `lags`.
    Departures { lambda: IndexCurve, lags: Vec<usize> },
    /// Virtual-waiting statistic of the merged arrivals against `lambda`.
    Arrivals { lambda: IndexCurve },
}

/// One analytic bound with the grid it is reported on.
#[derive(Debug, Clone)]
pub struct BoundRow {
    pub metric: String,
    /// Result the bound comes from (T6, L1, T7, L2, T8, L3, T9, T11, or a
    /// `+`-joined chain of them).
    pub tag: String,
    pub grid: Vec<f64>,
    pub bound: BoundingFunction,
    pub sample: SampleSpec,
}

impl BoundRow {
    pub fn file_stem(&self) -> String {
        format!("{}_{}", self.metric, self.tag)
    }

    pub fn values(&self) -> Vec<f64> {
        self.grid.iter().map(|&x| self.bound.eval(x)).collect()
    }
}

#[derive(Debug, Clone)]
pub struct BoundSet {
    pub eta: f64,
    /// Arrival-curve spacing used for each flow (`None` when not an M/D/1 model).
    pub hbar: Vec<Option<f64>>,
    pub rows: Vec<BoundRow>,
    pub notes: Vec<String>,
}

/// Arrival model offered to the path, under one construction.
struct Aggregate {
    variant: &'static str,
    tag_prefix: &'static str,
    model: TrafficModel,
}

struct Built {
    servers: Vec<ServiceModel>,
    /// The whole path as one server.
    path: ServiceModel,
    hbar: Vec<Option<f64>>,
    aggregates: Vec<Aggregate>,
}

pub fn delay_grid(s: &Scenario) -> Result<Grid> {
    Ok(Grid::new(s.analysis.grid_step, s.analysis.x_max)?)
}

pub fn backlog_levels(s: &Scenario) -> Vec<f64> {
    (0..=s.analysis.backlog_max).map(|b| b as f64).collect()
}

fn server_model(m: &ServerModel, eta: f64, grid: &Grid) -> timecalc::Result<ServiceModel> {
    match *m {
        ServerModel::Deterministic { service } => deterministic_server(service),
        ServerModel::Wireless { pe, slot } => wireless_link_ssc(pe, eta, slot, grid),
    }
}

fn build(s: &Scenario, eta: f64, grid: &Grid) -> timecalc::Result<Built> {
    let servers = s
        .path()
        .iter()
        .map(|srv| server_model(srv.model.as_ref().expect("checked"), eta, grid))
        .collect::<timecalc::Result<Vec<_>>>()?;
    let path = if servers.len() == 1 { servers[0].clone() } else { concatenate(&servers, eta, None, grid)? };
    // an M/D/1 flow without explicit spacing gets its share of the path rate
    let path_rate = path.gamma().tail_rate();
    let models: Vec<FlowModel> = s.flows.iter().map(|f| f.model.expect("checked")).collect();
    let total_rate: f64 = models.iter().map(FlowModel::rate).sum();
    let mut hbar = Vec::with_capacity(models.len());
    let mut flows = Vec::with_capacity(models.len());
    for m in &models {
        let (model, h) = match *m {
            FlowModel::Md1Vwd { rate, hbar } => {
                let h = hbar.unwrap_or(path_rate / (rate / total_rate));
                (md1_vwd_sac(rate, h)?, Some(h))
            }
            FlowModel::Periodic { period } => (
                TrafficModel::Vwd { lambda: IndexCurve::linear(period, 1)?, bound: BoundingFunction::step() },
                None,
            ),
            FlowModel::Gsbb { rho, amplitude, decay } => {
                (gsbb_vwd_sac(rho, &BoundingFunction::exponential(amplitude, decay)?)?, None)
            }
        };
        flows.push(model);
        hbar.push(h);
    }
    let mut aggregates = Vec::new();
    if flows.len() == 1 {
        aggregates.push(Aggregate { variant: "", tag_prefix: "", model: flows.remove(0) });
    } else {
        let packets = Grid::new(1.0, s.analysis.superposition_packets as f64)?;
        aggregates.push(Aggregate { variant: "superposed", tag_prefix: "T11+", model: superpose(&flows, &packets)? });
        // independent Poisson flows merge into one Poisson flow
        if models.iter().all(|m| matches!(m, FlowModel::Md1Vwd { hbar: None, .. })) {
            let rates: Vec<f64> = models.iter().map(FlowModel::rate).collect();
            aggregates.push(Aggregate {
                variant: "direct",
                tag_prefix: "",
                model: poisson_superposition_vwd(&rates, path_rate)?,
            });
        }
    }
    Ok(Built { servers, path, hbar, aggregates })
}

/// Main delay bound, used to pick `eta`: end-to-end through the concatenated
/// path for the first arrival construction.
fn primary_delay(b: &Built, grid: &Grid) -> timecalc::Result<BoundingFunction> {
    delay_bound(&b.aggregates[0].model, &b.path, grid, Combine::MinPlus)
}

fn unstable_message(lambda: f64, gamma: f64, what: &str) -> String {
    format!(
        "unstable {what}: service curve grows by {gamma} per packet but the arrival curve only by {lambda} \
         (the service rate must not exceed the arrival rate); pass --allow-unstable to continue"
    )
}

/// Fails when some arrival curve grows slower than the service curve it feeds.
pub fn check_stability(s: &Scenario) -> Result<()> {
    let grid = delay_grid(s)?;
    let eta = s.analysis.eta.iter().copied().fold(f64::INFINITY, f64::min);
    let b = build(s, eta, &grid)?;
    for agg in &b.aggregates {
        let lambda = agg.model.lambda().expect("v.w.d aggregates");
        let mut pairs = vec![(b.path.gamma(), "path")];
        pairs.extend(b.servers.iter().map(|srv| (srv.gamma(), "node")));
        for (gamma, what) in pairs {
            if stability_margin(lambda, gamma) > 0.0 {
                bail!(unstable_message(lambda.tail_rate(), gamma.tail_rate(), what));
            }
        }
    }
    Ok(())
}

/// Skips rows that fail only because the path is unstable, when allowed.
#[allow(clippy::too_many_arguments)]
fn keep(
    s: &Scenario,
    notes: &mut Vec<String>,
    rows: &mut Vec<BoundRow>,
    metric: String,
    tag: String,
    grid: Vec<f64>,
    sample: SampleSpec,
    bound: timecalc::Result<BoundingFunction>,
) -> Result<()> {
    match bound {
        Ok(bound) => rows.push(BoundRow { metric, tag, grid, bound, sample }),
        Err(Error::Unstable { arrival, service }) if s.allow_unstable => {
            notes.push(format!("{metric} ({tag}) skipped: {}", unstable_message(arrival, service, "path")));
        }
        Err(e) => return Err(e.into()),
    }
    Ok(())
}

fn named(base: &str, variant: &str) -> String {
    if variant.is_empty() {
        base.to_string()
    } else {
        format!("{base}_{variant}")
    }
}

/// Picks `eta` and builds every bound row.
pub fn run_analyze(s: &Scenario) -> Result<BoundSet> {
    crate::scenario::require(s, true, false)?;
    let grid = delay_grid(s)?;
    let xs: Vec<f64> = grid.points().collect();
    let levels = backlog_levels(s);
    let mut notes = Vec::new();

    let eta = if s.analysis.eta.len() == 1 {
        s.analysis.eta[0]
    } else {
        let objective = EtaObjective::BoundAt(s.analysis.eta_objective_x);
        match optimize_eta(objective, &s.analysis.eta, |eta| primary_delay(&build(s, eta, &grid)?, &grid)) {
            Ok((eta, best)) => {
                notes.push(format!(
                    "eta = {eta} minimizes the delay bound at x = {} (value {:.6})",
                    s.analysis.eta_objective_x,
                    best.eval(s.analysis.eta_objective_x)
                ));
                eta
            }
            Err(e) if s.allow_unstable => {
                notes.push(format!("no eta gives a stable path ({e}); analysis skipped"));
                return Ok(BoundSet { eta: f64::NAN, hbar: Vec::new(), rows: Vec::new(), notes });
            }
            Err(e) => return Err(e.into()),
        }
    };
    let b = build(s, eta, &grid)?;
    notes.push("backlog bounds evaluate the combined violation bound at inf_{v>=1} lambda(v+x-1) - gamma(v)".into());

    let mut modes = vec![(Combine::MinPlus, false)];
    if s.analysis.independent {
        modes.push((Combine::Independent, true));
    }
    let mut rows = Vec::new();
    for agg in &b.aggregates {
        let arr = &agg.model;
        let p = agg.tag_prefix;
        let v = agg.variant;
        if agg.variant == "superposed" {
            let lambda = arr.lambda().expect("v.w.d").clone();
            rows.push(BoundRow {
                metric: "arrivals_superposed".into(),
                tag: "T11".into(),
                grid: xs.clone(),
                bound: arr.bound().clone(),
                sample: SampleSpec::Arrivals { lambda },
            });
        }
        let first = &b.servers[0];
        let tandem = b.servers.len() > 1;
        for &(mode, indep) in &modes {
            let t = |dep: &str, ind: &str| format!("{p}{}", if indep { ind } else { dep });
            let delay_name = if tandem { named("delay_hop1", v) } else { named("delay", v) };
            if !tandem {
                let bound = delay_bound(arr, first, &grid, mode);
                keep(s, &mut notes, &mut rows, delay_name, t("T6", "L1"), xs.clone(), SampleSpec::Delay { hop: 0 }, bound)?;
            }
            let bound = backlog_bound(arr, first, s.analysis.backlog_max, &grid, mode);
            keep(s, &mut notes, &mut rows, named("backlog", v), t("T7", "L2"), levels.clone(), SampleSpec::Backlog, bound)?;
            if !indep {
                let bound = backlog_bound_horizontal(arr, first, &grid, mode)
                    .and_then(|pts| horizontal_envelope(&pts, s.analysis.backlog_max));
                keep(s, &mut notes, &mut rows, named("backlog_horizontal", v), t("T7", "L2"), levels.clone(), SampleSpec::Backlog, bound)?;
            }
            match output_characterization(arr, first, &grid, mode) {
                Ok(out) => {
                    let lambda = out.lambda().expect("i.a.t").clone();
                    rows.push(BoundRow {
                        metric: named(if tandem { "output_hop1" } else { "output" }, v),
                        tag: t("T8", "L3"),
                        grid: xs.clone(),
                        bound: out.bound().clone(),
                        sample: SampleSpec::Departures { lambda, lags: s.analysis.lags.clone() },
                    });
                }
                Err(e) => keep(s, &mut notes, &mut rows, named("output", v), t("T8", "L3"), xs.clone(), SampleSpec::Backlog, Err(e))?,
            }
            if tandem {
                let bound = delay_bound(arr, &b.path, &grid, mode);
                let tag = if indep { format!("{p}T9+L1") } else { format!("{p}T9") };
                keep(s, &mut notes, &mut rows, named("e2e_delay", v), tag, xs.clone(), SampleSpec::EndToEnd, bound)?;
                match node_by_node_delay(arr, &b.servers, eta, &grid, mode) {
                    Ok(nbn) => {
                        for (k, hop) in nbn.per_hop.iter().enumerate() {
                            let tag = if k == 0 { t("T6", "L1") } else { t("T8+T6", "L3+L1") };
                            rows.push(BoundRow {
                                metric: named(&format!("delay_hop{}", k + 1), v),
                                tag,
                                grid: xs.clone(),
                                bound: hop.clone(),
                                sample: SampleSpec::Delay { hop: k },
                            });
                        }
                        rows.push(BoundRow {
                            metric: named("e2e_delay_node_by_node", v),
                            tag: t("T6+T8", "L1+L3"),
                            grid: xs.clone(),
                            bound: nbn.total,
                            sample: SampleSpec::EndToEnd,
                        });
                    }
                    Err(e) => keep(s, &mut notes, &mut rows, named("e2e_delay_node_by_node", v), t("T6+T8", "L1+L3"), xs.clone(), SampleSpec::EndToEnd, Err(e))?,
                }
            }
        }
    }
    Ok(BoundSet { eta, hbar: b.hbar, rows, notes })
}
