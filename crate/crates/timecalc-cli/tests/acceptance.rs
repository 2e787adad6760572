//! Acceptance suite: one PASS/FAIL line per criterion, then a single verdict.
//! Runs without the test harness so the lines are always printed; the
//! process exits nonzero when any criterion fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;
use timecalc::bounds_analysis::{backlog_bound_horizontal, delay_bound, Combine};
use timecalc::curve_algebra::{eta_inflate, max_plus_conv, BoundingFunction, Grid, IndexCurve, TimeCurve};
use timecalc::fifo_simulator::{
    gen_service_times, merge_fifo, merge_fifo_n, simulate_fifo_node, stream_rng, ServiceDist,
};
use timecalc::service_models::{negbin_tail, ServiceModel};
use timecalc::traffic_models::{vbc_to_vwd, TrafficModel};
use timecalc_cli::{parse_scenario, run_compare, ComparisonReport, Overrides};

const SHIPPED: [&str; 4] = ["md1", "wireless-single", "wireless-tandem", "poisson-superposition"];

fn scenario_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(format!("{name}.json"))
}

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn random_curve(rng: &mut impl Rng, max_horizon: usize) -> IndexCurve {
    let len = rng.random_range(1..=max_horizon + 1);
    let mut v = f64::from(rng.random_range(0u8..5));
    let mut values = vec![v];
    for _ in 1..len {
        v += f64::from(rng.random_range(0u8..4));
        values.push(v);
    }
    IndexCurve::new(values, f64::from(rng.random_range(0u8..4))).unwrap()
}

fn equal_until(a: &IndexCurve, b: &IndexCurve, n: i64) -> bool {
    (0..=n).all(|k| a.eval(k) == b.eval(k))
}

fn algebra_laws() -> Outcome {
    let mut rng = stream_rng(101, 0);
    let mut bad = 0;
    for _ in 0..200 {
        let (f, g, h) = (random_curve(&mut rng, 64), random_curve(&mut rng, 64), random_curve(&mut rng, 64));
        let comm = equal_until(&max_plus_conv(&f, &g), &max_plus_conv(&g, &f), 400);
        let assoc = equal_until(
            &max_plus_conv(&max_plus_conv(&f, &g), &h),
            &max_plus_conv(&f, &max_plus_conv(&g, &h)),
            400,
        );
        bad += usize::from(!(comm && assoc));
    }
    outcome(bad == 0, format!("200 triples, {bad} violations"))
}

/// Nondecreasing times on a half-unit lattice so ties are common.
fn random_arrivals(rng: &mut impl Rng, max_len: usize) -> Vec<f64> {
    let n = rng.random_range(0..=max_len);
    let mut t = 0.0;
    (0..n)
        .map(|_| {
            t += f64::from(rng.random_range(0u8..3)) * 0.5;
            t
        })
        .collect()
}

fn merge_oracle() -> Outcome {
    let mut rng = stream_rng(102, 0);
    let mut bad = 0;
    for _ in 0..1000 {
        let k = rng.random_range(1..=4);
        let flows: Vec<Vec<f64>> = (0..k).map(|_| random_arrivals(&mut rng, 32)).collect();
        let mut want: Vec<f64> = flows.iter().flatten().copied().collect();
        want.sort_by(f64::total_cmp);
        let pair_ok = {
            let mut two: Vec<f64> = flows[0].iter().chain(flows.last().unwrap()).copied().collect();
            two.sort_by(f64::total_cmp);
            merge_fifo(&flows[0], flows.last().unwrap()) == two
        };
        bad += usize::from(!(pair_ok && merge_fifo_n(&flows).unwrap() == want));
    }
    outcome(bad == 0, format!("1000 instances, {bad} mismatches"))
}

fn recursion_oracle() -> Outcome {
    let mut rng = stream_rng(103, 0);
    let mut bad = 0;
    for _ in 0..1000 {
        let a = random_arrivals(&mut rng, 32);
        let delta: Vec<f64> = a.iter().map(|_| f64::from(rng.random_range(0u8..8)) * 0.25).collect();
        let t = simulate_fifo_node(&a, &delta).unwrap();
        let ok = (0..a.len()).all(|n| {
            let sup = (0..=n).map(|m| a[m] + delta[m..=n].iter().sum::<f64>()).fold(f64::NEG_INFINITY, f64::max);
            t.d[n] == sup
        });
        bad += usize::from(!ok);
    }
    outcome(bad == 0, format!("1000 instances, {bad} mismatches"))
}

fn eta_closed_form() -> Outcome {
    let grid = Grid::new(0.01, 40.0).unwrap();
    let h = BoundingFunction::exponential(1.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for eta in [0.25, 0.5, 1.0, 2.0] {
        let inflated = eta_inflate(&h, eta).unwrap();
        for x in grid.points() {
            let want = ((1.0 + 1.0 / eta) * (-x).exp()).min(1.0);
            worst = worst.max((inflated.eval(x) - want).abs());
        }
    }
    outcome(worst <= 1e-6, format!("max error {worst:.2e}"))
}

fn negbin_monte_carlo() -> Outcome {
    const SAMPLES: usize = 1_000_000;
    let pe = 0.2;
    let dbar = 1.0 / (1.0 - pe);
    let mut worst_z: f64 = 0.0;
    let mut bad = 0;
    for (k, n) in [0u64, 4, 9].into_iter().enumerate() {
        let m = n as usize + 1;
        let slots = gen_service_times(&ServiceDist::GeometricSlotted { pe, slot: 1.0 }, SAMPLES * m, &mut stream_rng(104, k as u64))
            .unwrap();
        let sums: Vec<f64> = slots.chunks(m).map(|c| c.iter().sum()).collect();
        for x in 0..=10 {
            let x = f64::from(x);
            let level = dbar * m as f64 + x;
            let est = sums.iter().filter(|&&s| s > level).count() as f64 / SAMPLES as f64;
            let p = negbin_tail(pe, n, x).unwrap();
            let se = (p * (1.0 - p) / SAMPLES as f64).sqrt().max(1.0 / SAMPLES as f64);
            let z = (est - p).abs() / se;
            worst_z = worst_z.max(z);
            bad += usize::from(z > 3.0);
        }
    }
    outcome(bad == 0, format!("33 points, worst |z| = {worst_z:.2}"))
}

fn vbc_closed_form() -> Outcome {
    let f = BoundingFunction::exponential(1.0, 0.7).unwrap();
    let grid = Grid::new(0.1, 30.0).unwrap();
    let mut ok = true;
    for rho in [0.5, 1.0, 2.0] {
        let m = TrafficModel::Vbc { alpha: TimeCurve::linear(rho, 64.0).unwrap(), bound: f.clone() };
        let v = vbc_to_vwd(&m).unwrap();
        let lambda = v.lambda().unwrap();
        ok &= (0..200).all(|n| lambda.eval(n) == n as f64 / rho);
        ok &= grid.points().all(|y| (v.bound().eval(y) - f.eval(rho * y)).abs() <= 1e-12);
    }
    outcome(ok, "rho in {0.5, 1, 2}")
}

fn deterministic_reduction() -> Outcome {
    let mut rng = stream_rng(107, 0);
    let grid = Grid::new(0.25, 80.0).unwrap();
    let zero = Grid::new(1.0, 1.0).unwrap();
    let mut bad = 0;
    let mut pairs = 0;
    while pairs < 50 {
        let lambda = random_curve(&mut rng, 24).plus_linear(1.0).unwrap();
        let gamma = random_curve(&mut rng, 24);
        if gamma.tail_rate() > lambda.tail_rate() {
            continue;
        }
        pairs += 1;
        let arr = TrafficModel::Vwd { lambda: lambda.clone(), bound: BoundingFunction::step() };
        let svc = ServiceModel::Id { gamma: gamma.clone(), bound: BoundingFunction::step() };
        let c = (0..400i64).map(|k| gamma.eval(k + 1) - lambda.eval(k)).fold(f64::NEG_INFINITY, f64::max);
        let d = delay_bound(&arr, &svc, &grid, Combine::MinPlus).unwrap();
        // delays are nonnegative, so only x >= 0 is probed
        let step_ok = grid
            .points()
            .chain([c, c - 1e-9])
            .filter(|x| *x >= 0.0)
            .all(|x| d.eval(x) == if x < c { 1.0 } else { 0.0 });
        let h = (0..400i64).map(|m| (0..).find(|&k| gamma.eval(m) <= lambda.eval(m + k)).unwrap()).max().unwrap();
        let pts = backlog_bound_horizontal(&arr, &svc, &zero, Combine::MinPlus).unwrap();
        let back_ok = pts[0].x == 0.0 && pts[0].level == h as u64 + 1 && pts[0].bound == 0.0;
        bad += usize::from(!(step_ok && back_ok));
    }
    outcome(bad == 0, format!("50 stable pairs, {bad} mismatches"))
}

fn compare_one(label: String, s: &timecalc_cli::Scenario, ok: &mut bool, lines: &mut Vec<String>) -> ComparisonReport {
    let r = run_compare(s).expect("compare runs");
    let failed: Vec<String> = r.failures().map(|f| format!("{} ({})", f.metric, f.tag)).collect();
    let worst = r.rows.iter().map(|f| f.worst_margin).fold(f64::INFINITY, f64::min);
    *ok &= failed.is_empty() && !r.rows.is_empty();
    lines.push(format!("    {label}: {} checks, worst margin {worst:.6}, failures {failed:?}", r.rows.len()));
    r
}

fn dominance_suite() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for name in SHIPPED {
        let s = parse_scenario(&scenario_path(name), &Overrides::default()).unwrap();
        let r = compare_one(name.to_string(), &s, &mut ok, &mut lines);
        if name == "wireless-tandem" {
            let has = |m: &str| r.rows.iter().any(|row| row.metric == m && row.dominated);
            ok &= has("e2e_delay") && has("e2e_delay_node_by_node");
        }
        if name == "wireless-single" {
            // every eta on the grid, not only the chosen one
            for &eta in &s.analysis.eta {
                let mut one = s.clone();
                one.analysis.eta = vec![eta];
                compare_one(format!("wireless-single eta={eta}"), &one, &mut ok, &mut lines);
            }
        }
    }
    outcome(ok, format!("\n{}", lines.join("\n")))
}

fn reproducibility() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_timecalc");
    let tmp = tempfile::tempdir().unwrap();
    let mut ok = true;
    for name in SHIPPED {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let out = tmp.path().join(format!("{name}-{run}"));
            let status = Command::new(bin)
                .args(["compare", "--seed", "7", "--scenario"])
                .arg(scenario_path(name))
                .arg("--out")
                .arg(&out)
                .status()
                .unwrap();
            ok &= status.success();
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&out)
                .unwrap()
                .map(|e| e.unwrap().path())
                .filter(|p| p.extension().is_some_and(|e| e == "csv"))
                .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
                .collect();
            files.sort();
            outputs.push(files);
        }
        ok &= !outputs[0].is_empty() && outputs[0] == outputs[1];
    }
    outcome(ok, "4 shipped scenarios, seed 7, two runs each")
}

fn main() -> std::process::ExitCode {
    type Criterion = (&'static str, Duration, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("1 algebra laws", Duration::from_secs(5), algebra_laws),
        ("2 merge oracle", Duration::from_secs(5), merge_oracle),
        ("3 FIFO recursion oracle", Duration::from_secs(5), recursion_oracle),
        ("4 closed-form eta inflation", Duration::from_secs(1), eta_closed_form),
        ("5 negative-binomial tail vs Monte Carlo", Duration::from_secs(30), negbin_monte_carlo),
        ("6 backlog-to-waiting closed form", Duration::from_secs(1), vbc_closed_form),
        ("7 deterministic reduction", Duration::from_secs(5), deterministic_reduction),
        ("8 dominance suite", Duration::from_secs(180), dominance_suite),
        ("9 reproducibility", Duration::from_secs(60), reproducibility),
    ];
    let mut failed = Vec::new();
    for (name, limit, run) in criteria {
        let start = Instant::now();
        let o = run();
        let took = start.elapsed();
        let pass = o.ok && took <= limit;
        println!(
            "{} criterion {name} [{:.2}s, limit {}s]: {}",
            if pass { "PASS" } else { "FAIL" },
            took.as_secs_f64(),
            limit.as_secs(),
            o.detail
        );
        if !pass {
            failed.push(name);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria passed");
        std::process::ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::ExitCode::FAILURE
    }
}
