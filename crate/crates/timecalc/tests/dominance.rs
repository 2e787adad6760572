//! Analytic bounds against pooled simulation on the reference scenarios.

use timecalc::bounds_analysis::*;
use timecalc::curve_algebra::*;
use timecalc::fifo_simulator::*;
use timecalc::service_models::*;
use timecalc::traffic_models::*;

const REPS: usize = 20;
const PACKETS: usize = 2000;
const ALPHA: f64 = 0.01;

fn grid() -> Grid {
    Grid::new(0.1, 40.0).unwrap()
}

fn assert_dominated(name: &str, bound: &BoundingFunction, samples: &[f64], xs: &[f64]) {
    let c = empirical_ccdf(samples, xs, ALPHA).unwrap();
    let d = check_dominance(bound, &c);
    assert!(d.pass, "{name}: margin {} at x={}", d.worst_margin, d.worst_x);
}

fn tandem(seed: u64, svc: &ServiceDist, rate: f64, hops: usize) -> Vec<Vec<PacketTrace>> {
    replicate(REPS, |r| {
        let base = (r as u64) << 16;
        let mut a = gen_renewal_arrivals(&ArrivalDist::Exponential { rate }, PACKETS, &mut stream_rng(seed, base)).unwrap();
        (0..hops)
            .map(|k| {
                let s = gen_service_times(svc, PACKETS, &mut stream_rng(seed, base | (k as u64 + 1))).unwrap();
                let t = simulate_fifo_node(&a, &s).unwrap();
                a = t.d.clone();
                t
            })
            .collect()
    })
}

fn steady<'a>(traces: impl Iterator<Item = &'a PacketTrace>, f: impl Fn(&PacketTrace, usize) -> f64) -> Vec<f64> {
    traces.flat_map(|t| (warmup_start(t.len())..t.len()).map(|i| f(t, i)).collect::<Vec<_>>()).collect()
}

#[test]
fn md1_delay_backlog_output() {
    let g = grid();
    let xs: Vec<f64> = g.points().collect();
    let arr = md1_vwd_sac(1.0, 0.5).unwrap();
    let svc = deterministic_server(0.5).unwrap();
    let runs = tandem(1, &ServiceDist::Deterministic { value: 0.5 }, 1.0, 1);
    let traces = || runs.iter().map(|r| &r[0]);

    let delay = steady(traces(), |t, i| t.d[i] - t.a[i]);
    for mode in [Combine::MinPlus, Combine::Independent] {
        assert_dominated("delay", &delay_bound(&arr, &svc, &g, mode).unwrap(), &delay, &xs);
    }

    let backlog = steady(traces(), |t, i| backlog_at(t, t.a[i]) as f64);
    let bx: Vec<f64> = (0..=40).map(f64::from).collect();
    assert_dominated("backlog", &backlog_bound(&arr, &svc, 40, &g, Combine::MinPlus).unwrap(), &backlog, &bx);
    let points = backlog_bound_horizontal(&arr, &svc, &g, Combine::MinPlus).unwrap();
    assert_dominated("backlog-h", &horizontal_envelope(&points, 40).unwrap(), &backlog, &bx);

    let out = output_characterization(&arr, &svc, &g, Combine::MinPlus).unwrap();
    let stat: Vec<f64> = traces()
        .flat_map(|t| iat_statistic(&t.d[warmup_start(t.len())..], out.lambda().unwrap(), &[1, 2, 4, 8, 16]))
        .collect();
    assert_dominated("output", out.bound(), &stat, &xs);
}

#[test]
fn wireless_single_node_over_eta_grid() {
    let g = grid();
    let xs: Vec<f64> = g.points().collect();
    let runs = tandem(2, &ServiceDist::GeometricSlotted { pe: 0.2, slot: 1.0 }, 0.4, 1);
    let delay = steady(runs.iter().map(|r| &r[0]), |t, i| t.d[i] - t.a[i]);
    let etas: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
    for &eta in &etas {
        let svc = wireless_link_ssc(0.2, eta, 1.0, &g).unwrap();
        let id: Vec<f64> = runs.iter().flat_map(|r| {
            let t = &r[0];
            id_statistic(t, svc.gamma())[warmup_start(t.len())..].to_vec()
        }).collect();
        assert_dominated("service curve", svc.bound(), &id, &xs);
        let arr = md1_vwd_sac(0.4, svc.gamma().tail_rate()).unwrap();
        for mode in [Combine::MinPlus, Combine::Independent] {
            assert_dominated("wireless delay", &delay_bound(&arr, &svc, &g, mode).unwrap(), &delay, &xs);
        }
    }
    let (eta, best) = optimize_eta(EtaObjective::BoundAt(10.0), &etas, |eta| {
        let svc = wireless_link_ssc(0.2, eta, 1.0, &g)?;
        let arr = md1_vwd_sac(0.4, svc.gamma().tail_rate())?;
        delay_bound(&arr, &svc, &g, Combine::MinPlus)
    })
    .unwrap();
    assert!(etas.contains(&eta));
    assert!(best.eval(10.0) < 1.0);
    assert_dominated("optimized", &best, &delay, &xs);
}

#[test]
fn wireless_tandem_both_variants() {
    let g = grid();
    let xs: Vec<f64> = g.points().collect();
    let runs = tandem(3, &ServiceDist::GeometricSlotted { pe: 0.2, slot: 1.0 }, 0.4, 2);
    let e2e: Vec<f64> = runs
        .iter()
        .flat_map(|r| (warmup_start(PACKETS)..PACKETS).map(|i| r[1].d[i] - r[0].a[i]).collect::<Vec<_>>())
        .collect();
    let hop = wireless_link_ssc(0.2, 0.3, 1.0, &g).unwrap();
    let chain = concatenate(&[hop.clone(), hop.clone()], 0.3, None, &g).unwrap();
    let arr = md1_vwd_sac(0.4, chain.gamma().tail_rate()).unwrap();
    assert_dominated("concatenated", &delay_bound(&arr, &chain, &g, Combine::MinPlus).unwrap(), &e2e, &xs);
    let nbn = node_by_node_delay(&arr, &[hop.clone(), hop], 0.3, &g, Combine::MinPlus).unwrap();
    assert_dominated("node-by-node", &nbn.total, &e2e, &xs);
}

#[test]
fn poisson_superposition() {
    let g = grid();
    let xs: Vec<f64> = g.points().collect();
    let (mu1, mu2, t_s) = (0.6, 0.4, 0.5);
    let runs = replicate(REPS, |r| {
        let base = (r as u64) << 16;
        let a1 = gen_renewal_arrivals(&ArrivalDist::Exponential { rate: mu1 }, PACKETS, &mut stream_rng(4, base)).unwrap();
        let a2 = gen_renewal_arrivals(&ArrivalDist::Exponential { rate: mu2 }, PACKETS, &mut stream_rng(4, base | 1)).unwrap();
        let end = a1.last().unwrap().min(*a2.last().unwrap());
        let mut a = merge_fifo(&a1, &a2);
        a.retain(|&t| t <= end);
        simulate_fifo_node(&a, &vec![t_s; a.len()]).unwrap()
    });
    let svc = deterministic_server(t_s).unwrap();
    let direct = poisson_superposition_vwd(&[mu1, mu2], t_s).unwrap();
    let flows = [
        md1_vwd_sac(mu1, t_s * (mu1 + mu2) / mu1).unwrap(),
        md1_vwd_sac(mu2, t_s * (mu1 + mu2) / mu2).unwrap(),
    ];
    let piped = superpose(&flows, &Grid::new(1.0, 256.0).unwrap()).unwrap();
    let delay = steady(runs.iter(), |t, i| t.d[i] - t.a[i]);
    for model in [&direct, &piped] {
        let stat: Vec<f64> = runs
            .iter()
            .flat_map(|t| vwd_statistic(&t.a, model.lambda().unwrap())[warmup_start(t.len())..].to_vec())
            .collect();
        assert_dominated("aggregate model", model.bound(), &stat, &xs);
        assert_dominated("aggregate delay", &delay_bound(model, &svc, &g, Combine::MinPlus).unwrap(), &delay, &xs);
    }
}
