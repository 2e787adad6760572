//! Scenario documents (JSON, `"schema": 1`).
//!
//! A scenario names some flows and servers, a path through the servers, and
//! the analysis and simulation settings. All flows are merged in FIFO order in
//! front of the first server on the path. Each flow and server may carry a
//! distribution (used by `simulate`), a model (used by `analyze`), or both.

use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::Deserialize;
use timecalc::fifo_simulator::{ArrivalDist, ServiceDist};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: u32,
    pub name: String,
    pub flows: Vec<Flow>,
    pub servers: Vec<Server>,
    #[serde(default)]
    pub topology: Topology,
    #[serde(default)]
    pub analysis: Analysis,
    #[serde(default)]
    pub simulation: Simulation,
    /// Skip the stability precheck and analyze only what is stable.
    #[serde(default)]
    pub allow_unstable: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Flow {
    pub name: String,
    pub arrival: Option<ArrivalSpec>,
    pub model: Option<FlowModel>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Server {
    pub name: String,
    pub service: Option<ServiceSpec>,
    pub model: Option<ServerModel>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArrivalSpec {
    Exponential { rate: f64 },
    Deterministic { period: f64 },
    Uniform { lo: f64, hi: f64 },
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "dist", rename_all = "snake_case", deny_unknown_fields)]
pub enum ServiceSpec {
    Deterministic { value: f64 },
    GeometricSlotted { pe: f64, slot: f64 },
    Table { values: Vec<f64>, probs: Vec<f64> },
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FlowModel {
    /// Poisson flow with the M/D/1 waiting-time tail. `hbar` is the packet
    /// spacing of the arrival curve; when omitted it is matched to the path.
    Md1Vwd { rate: f64, hbar: Option<f64> },
    /// Strictly periodic flow: `lambda(n) = n * period`, no violation.
    Periodic { period: f64 },
    /// Linear backlog envelope `rho * t` with violation `amplitude * e^{-decay x}`.
    Gsbb { rho: f64, amplitude: f64, decay: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ServerModel {
    Deterministic { service: f64 },
    /// Retransmitting link, one attempt per slot, loss probability `pe`.
    Wireless { pe: f64, slot: f64 },
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Topology {
    /// Server names in traversal order; all servers in listed order if empty.
    #[serde(default)]
    pub path: Vec<String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Analysis {
    pub x_max: f64,
    pub grid_step: f64,
    /// Candidate `eta` values; the one minimizing the main delay bound at
    /// `eta_objective_x` is used.
    pub eta: Vec<f64>,
    pub eta_objective_x: f64,
    pub alpha: f64,
    /// Also report bounds for independent arrival and service violations.
    pub independent: bool,
    /// Largest backlog level (packets) reported.
    pub backlog_max: usize,
    /// Packet spans used for the departure-gap statistic.
    pub lags: Vec<usize>,
    /// Packet horizon of the superposition grid.
    pub superposition_packets: usize,
}

impl Default for Analysis {
    fn default() -> Self {
        Self {
            x_max: 40.0,
            grid_step: 0.1,
            eta: vec![0.5],
            eta_objective_x: 10.0,
            alpha: 0.01,
            independent: false,
            backlog_max: 40,
            lags: vec![1, 2, 4, 8, 16],
            superposition_packets: 256,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Simulation {
    /// Packets per replication, after merging all flows.
    pub packets: usize,
    pub replications: usize,
    pub seed: u64,
}

impl Default for Simulation {
    fn default() -> Self {
        Self { packets: 5000, replications: 20, seed: 1 }
    }
}

/// Command-line settings that take precedence over the document.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub packets: Option<usize>,
    pub replications: Option<usize>,
    pub grid_step: Option<f64>,
    pub alpha: Option<f64>,
    pub allow_unstable: bool,
}

impl ArrivalSpec {
    pub fn dist(&self) -> ArrivalDist {
        match *self {
            ArrivalSpec::Exponential { rate } => ArrivalDist::Exponential { rate },
            ArrivalSpec::Deterministic { period } => ArrivalDist::Deterministic { period },
            ArrivalSpec::Uniform { lo, hi } => ArrivalDist::Uniform { lo, hi },
        }
    }
}

impl ServiceSpec {
    pub fn dist(&self) -> ServiceDist {
        match self {
            ServiceSpec::Deterministic { value } => ServiceDist::Deterministic { value: *value },
            ServiceSpec::GeometricSlotted { pe, slot } => ServiceDist::GeometricSlotted { pe: *pe, slot: *slot },
            ServiceSpec::Table { values, probs } => ServiceDist::Table { values: values.clone(), probs: probs.clone() },
        }
    }
}

impl FlowModel {
    /// Long-run packet rate claimed by the model.
    pub fn rate(&self) -> f64 {
        match *self {
            FlowModel::Md1Vwd { rate, .. } => rate,
            FlowModel::Periodic { period } => 1.0 / period,
            FlowModel::Gsbb { rho, .. } => rho,
        }
    }
}

impl Scenario {
    /// Servers on the path, in traversal order.
    pub fn path(&self) -> Vec<&Server> {
        if self.topology.path.is_empty() {
            return self.servers.iter().collect();
        }
        self.topology
            .path
            .iter()
            .map(|n| self.servers.iter().find(|s| &s.name == n).expect("validated"))
            .collect()
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(v) = o.seed {
            self.simulation.seed = v;
        }
        if let Some(v) = o.packets {
            self.simulation.packets = v;
        }
        if let Some(v) = o.replications {
            self.simulation.replications = v;
        }
        if let Some(v) = o.grid_step {
            self.analysis.grid_step = v;
        }
        if let Some(v) = o.alpha {
            self.analysis.alpha = v;
        }
        self.allow_unstable |= o.allow_unstable;
    }

    /// Checks every field that is not checked by the model constructors.
    pub fn validate(&self) -> Result<()> {
        ensure!(self.schema == SCHEMA_VERSION, "schema: unsupported version {} (expected {SCHEMA_VERSION})", self.schema);
        ensure!(!self.flows.is_empty(), "flows: at least one flow is required");
        ensure!(!self.servers.is_empty(), "servers: at least one server is required");
        for (i, f) in self.flows.iter().enumerate() {
            ensure!(self.flows[..i].iter().all(|g| g.name != f.name), "flows[{i}].name: duplicate name {:?}", f.name);
            if let Some(a) = &f.arrival {
                check_arrival(a).with_context(|| format!("flows[{i}].arrival"))?;
            }
            if let Some(m) = &f.model {
                check_flow_model(m).with_context(|| format!("flows[{i}].model"))?;
            }
        }
        for (i, s) in self.servers.iter().enumerate() {
            ensure!(self.servers[..i].iter().all(|t| t.name != s.name), "servers[{i}].name: duplicate name {:?}", s.name);
            if let Some(d) = &s.service {
                check_service(d).with_context(|| format!("servers[{i}].service"))?;
            }
            if let Some(m) = &s.model {
                check_server_model(m).with_context(|| format!("servers[{i}].model"))?;
            }
        }
        for (i, n) in self.topology.path.iter().enumerate() {
            ensure!(self.servers.iter().any(|s| &s.name == n), "topology.path[{i}]: unknown server {n:?}");
        }
        let a = &self.analysis;
        ensure!(a.grid_step > 0.0 && a.grid_step.is_finite(), "analysis.grid_step: must be > 0");
        ensure!(a.x_max > a.grid_step && a.x_max.is_finite(), "analysis.x_max: must exceed grid_step");
        ensure!(!a.eta.is_empty(), "analysis.eta: at least one value is required");
        ensure!(a.eta.iter().all(|e| *e > 0.0 && e.is_finite()), "analysis.eta: values must be > 0");
        ensure!(a.alpha > 0.0 && a.alpha < 1.0, "analysis.alpha: must lie in (0, 1)");
        ensure!(a.backlog_max >= 1, "analysis.backlog_max: must be >= 1");
        ensure!(a.lags.iter().all(|k| *k >= 1), "analysis.lags: spans must be >= 1");
        ensure!(a.superposition_packets >= 2, "analysis.superposition_packets: must be >= 2");
        let s = &self.simulation;
        ensure!(s.replications >= 1, "simulation.replications: must be >= 1");
        ensure!(s.packets >= 10, "simulation.packets: must be >= 10");
        Ok(())
    }

    pub fn has_models(&self) -> bool {
        self.flows.iter().all(|f| f.model.is_some()) && self.path().iter().all(|s| s.model.is_some())
    }

    pub fn has_distributions(&self) -> bool {
        self.flows.iter().all(|f| f.arrival.is_some()) && self.path().iter().all(|s| s.service.is_some())
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    ensure!(v.is_finite() && v > 0.0, "{name}: must be > 0, got {v}");
    Ok(())
}

fn probability(name: &str, v: f64) -> Result<()> {
    ensure!(v > 0.0 && v < 1.0, "{name}: must lie in (0, 1), got {v}");
    Ok(())
}

fn check_arrival(a: &ArrivalSpec) -> Result<()> {
    match *a {
        ArrivalSpec::Exponential { rate } => positive("rate", rate),
        ArrivalSpec::Deterministic { period } => positive("period", period),
        ArrivalSpec::Uniform { lo, hi } => {
            ensure!(lo >= 0.0 && hi > lo, "hi: need 0 <= lo < hi, got lo={lo} hi={hi}");
            Ok(())
        }
    }
}

fn check_service(s: &ServiceSpec) -> Result<()> {
    match s {
        ServiceSpec::Deterministic { value } => positive("value", *value),
        ServiceSpec::GeometricSlotted { pe, slot } => {
            probability("pe", *pe)?;
            positive("slot", *slot)
        }
        ServiceSpec::Table { values, probs } => {
            ensure!(!values.is_empty() && values.len() == probs.len(), "probs: need one weight per value");
            ensure!(values.iter().all(|v| *v >= 0.0), "values: must be >= 0");
            ensure!(probs.iter().all(|p| *p >= 0.0) && probs.iter().sum::<f64>() > 0.0, "probs: need nonnegative weights");
            Ok(())
        }
    }
}

fn check_flow_model(m: &FlowModel) -> Result<()> {
    match *m {
        FlowModel::Md1Vwd { rate, hbar } => {
            positive("rate", rate)?;
            if let Some(h) = hbar {
                positive("hbar", h)?;
                ensure!(rate * h < 1.0, "hbar: rate * hbar must be < 1, got {}", rate * h);
            }
            Ok(())
        }
        FlowModel::Periodic { period } => positive("period", period),
        FlowModel::Gsbb { rho, amplitude, decay } => {
            positive("rho", rho)?;
            positive("amplitude", amplitude)?;
            positive("decay", decay)
        }
    }
}

fn check_server_model(m: &ServerModel) -> Result<()> {
    match *m {
        ServerModel::Deterministic { service } => positive("service", service),
        ServerModel::Wireless { pe, slot } => {
            probability("pe", pe)?;
            positive("slot", slot)
        }
    }
}

/// Parses a scenario document, reporting schema errors with their field path.
pub fn parse_str(text: &str) -> Result<Scenario> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let s: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        anyhow::anyhow!("{path}: {}", e.into_inner())
    })?;
    s.validate()?;
    Ok(s)
}

/// Reads, parses and validates a scenario, applies the overrides, then runs
/// the stability precheck unless it is overridden.
pub fn parse_scenario(path: &Path, overrides: &Overrides) -> Result<Scenario> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut s = parse_str(&text).with_context(|| format!("invalid scenario {}", path.display()))?;
    s.apply(overrides);
    s.validate()?;
    if !s.allow_unstable && s.has_models() {
        crate::analyze::check_stability(&s)?;
    }
    Ok(s)
}

/// Fails when a required part is missing for the requested run.
pub fn require(s: &Scenario, models: bool, distributions: bool) -> Result<()> {
    if models && !s.has_models() {
        bail!("every flow and every server on the path needs a `model` for analysis");
    }
    if distributions && !s.has_distributions() {
        bail!("every flow needs an `arrival` and every server on the path a `service` for simulation");
    }
    Ok(())
}
