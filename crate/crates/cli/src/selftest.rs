//! Embedded property suites run by the `selftest` command.

use std::io::Write;
use std::time::Instant;

use ensemble_metrics::channels::{apply_to_ensemble, dist_iso, jamiolkowski_ensemble, GeneralizedMeasurement, Method};
use ensemble_metrics::ehs::{
    ehs_distance, ehs_fidelity, pure_ensemble_fidelity, theorem4_decomposition, DistanceObjective, FidelityObjective,
    JointObjective, JointPair, SolverOptions,
};
use ensemble_metrics::ensembles::{
    average_entropy, average_state, fannes_avg_entropy_bound, make_ensemble, unify_support, DensityMatrix, Ensemble,
};
use ensemble_metrics::kantorovich::{
    flag_ensemble, flagged_closed_form_distance, flagged_closed_form_fidelity, kantorovich_distance,
    kantorovich_fidelity, transportation_lp, Sense,
};
use ensemble_metrics::linalg::{fidelity, trace_distance};
use ensemble_metrics::oracle::{
    fd_subgradient_check, lp_vertex_oracle, random_density, random_ensemble, random_measurement, random_probabilities,
    simulate_kantorovich_game,
};
use ensemble_metrics::Complex64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Level {
    Quick,
    Full,
}

type CheckFn = fn(usize, u64) -> Result<(), String>;

struct Check {
    name: &'static str,
    quick_cases: usize,
    full_cases: usize,
    run: CheckFn,
}

const CHECKS: &[Check] = &[
    Check { name: "singleton reduction", quick_cases: 10, full_cases: 50, run: singleton_reduction },
    Check { name: "classical limits", quick_cases: 10, full_cases: 50, run: classical_limits },
    Check { name: "flagged closed forms", quick_cases: 10, full_cases: 50, run: flagged_forms },
    Check { name: "sandwich inequalities", quick_cases: 10, full_cases: 100, run: sandwich },
    Check { name: "measurement monotonicity", quick_cases: 10, full_cases: 100, run: monotonicity },
    Check { name: "fidelity-attaining decompositions", quick_cases: 10, full_cases: 50, run: decompositions },
    Check { name: "average entropy continuity", quick_cases: 20, full_cases: 100, run: entropy_continuity },
    Check { name: "triangle inequality", quick_cases: 10, full_cases: 200, run: triangle },
    Check { name: "simplex vs vertex enumeration", quick_cases: 50, full_cases: 500, run: lp_oracle },
    Check { name: "gradients vs finite differences", quick_cases: 0, full_cases: 100, run: gradients },
    Check { name: "discrimination game", quick_cases: 0, full_cases: 3, run: game },
    Check { name: "channel measures", quick_cases: 1, full_cases: 1, run: channel_measures },
];

fn case_seed(seed: u64, k: usize) -> u64 {
    seed.wrapping_add((k as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

fn err(e: ensemble_metrics::Error) -> String {
    e.to_string()
}

fn ensure(ok: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what())
    }
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

/// Runs the suites at the given level, printing one line per check. Returns
/// true when every check passes.
pub fn run(level: Level, seed: u64, out: &mut dyn Write) -> bool {
    let mut all = true;
    for c in CHECKS {
        let cases = match level {
            Level::Quick => c.quick_cases,
            Level::Full => c.full_cases,
        };
        if cases == 0 {
            continue;
        }
        let start = Instant::now();
        let mut failure = None;
        for k in 0..cases {
            let s = case_seed(seed, k);
            if let Err(msg) = (c.run)(k, s) {
                failure = Some(format!("case {k} (seed {s}): {msg}"));
                break;
            }
        }
        let secs = start.elapsed().as_secs_f64();
        let _ = match failure {
            None => writeln!(out, "PASS {} ({cases} cases, {secs:.2} s)", c.name),
            Some(msg) => {
                all = false;
                writeln!(out, "FAIL {}: {msg}", c.name)
            }
        };
    }
    all
}

fn dims(k: usize) -> usize {
    2 + k % 2
}

fn singleton_reduction(k: usize, seed: u64) -> Result<(), String> {
    let d = dims(k);
    let rho = random_density(d, 1 + k % d, seed).map_err(err)?;
    let sigma = random_density(d, d, seed ^ 1).map_err(err)?;
    let (a, b) = (Ensemble::singleton(rho.clone()), Ensemble::singleton(sigma.clone()));
    let delta = trace_distance(&rho, &sigma).map_err(err)?;
    let f = fidelity(&rho, &sigma).map_err(err)?;
    let dk = kantorovich_distance(&a, &b).map_err(err)?.value;
    let fk = kantorovich_fidelity(&a, &b).map_err(err)?.value;
    let de = ehs_distance(&a, &b, &opts()).map_err(err)?.value;
    let fe = ehs_fidelity(&a, &b, &opts()).map_err(err)?.value;
    ensure((dk - delta).abs() <= 1e-9 && (fk - f).abs() <= 1e-9, || format!("D^K={dk} F^K={fk} vs Δ={delta} F={f}"))?;
    ensure((de - delta).abs() <= 1e-4 && (fe - f).abs() <= 1e-4, || format!("D^EHS={de} F^EHS={fe} vs Δ={delta} F={f}"))
}

fn classical_limits(k: usize, seed: u64) -> Result<(), String> {
    let d = 2 + k % 3;
    let p = random_probabilities(d, seed);
    let q = random_probabilities(d, seed ^ 2);
    let basis = |w: &[f64]| make_ensemble(w.iter().enumerate().map(|(i, &x)| (x, DensityMatrix::basis(d, i))).collect());
    let (a, b) = (basis(&p).map_err(err)?, basis(&q).map_err(err)?);
    let kolmogorov = 0.5 * p.iter().zip(&q).map(|(x, y)| (x - y).abs()).sum::<f64>();
    let overlap_min: f64 = p.iter().zip(&q).map(|(x, y)| x.min(*y)).sum();
    let bhattacharyya: f64 = p.iter().zip(&q).map(|(x, y)| (x * y).sqrt()).sum();
    let dk = kantorovich_distance(&a, &b).map_err(err)?.value;
    let fk = kantorovich_fidelity(&a, &b).map_err(err)?.value;
    ensure((dk - kolmogorov).abs() <= 1e-9 && (fk - overlap_min).abs() <= 1e-9, || format!("D^K={dk} F^K={fk}"))?;
    let de = ehs_distance(&a, &b, &opts()).map_err(err)?.value;
    let fe = ehs_fidelity(&a, &b, &opts()).map_err(err)?.value;
    ensure((de - kolmogorov).abs() <= 1e-4 && (fe - bhattacharyya).abs() <= 1e-4, || format!("D^EHS={de} F^EHS={fe}"))
}

fn flagged_forms(k: usize, seed: u64) -> Result<(), String> {
    let n = 1 + k % 3;
    let wp = random_probabilities(n, seed);
    let wq = random_probabilities(n, seed ^ 3);
    let mut ps = Vec::new();
    let mut qs = Vec::new();
    for i in 0..n {
        ps.push((wp[i], random_density(2, 1 + i % 2, case_seed(seed, 10 + i)).map_err(err)?));
        qs.push((wq[i], random_density(2, 2 - i % 2, case_seed(seed, 20 + i)).map_err(err)?));
    }
    let (a, b) = (flag_ensemble(&ps).map_err(err)?, flag_ensemble(&qs).map_err(err)?);
    let d = kantorovich_distance(&a, &b).map_err(err)?.value;
    let f = kantorovich_fidelity(&a, &b).map_err(err)?.value;
    let dc = flagged_closed_form_distance(&ps, &qs).map_err(err)?;
    let fc = flagged_closed_form_fidelity(&ps, &qs).map_err(err)?;
    ensure((d - dc).abs() <= 1e-9 && (f - fc).abs() <= 1e-9, || format!("program ({d}, {f}) vs closed form ({dc}, {fc})"))
}

fn random_pair(k: usize, seed: u64) -> Result<(Ensemble, Ensemble), String> {
    let d = dims(k);
    let a = random_ensemble(d, 1 + k % 3, 1 + k % d, seed).map_err(err)?;
    let b = random_ensemble(d, 1 + (k / 3) % 3, d - k % d, seed ^ 5).map_err(err)?;
    Ok((a, b))
}

fn sandwich(k: usize, seed: u64) -> Result<(), String> {
    let (a, b) = random_pair(k, seed)?;
    let (ra, rb) = (average_state(&a), average_state(&b));
    let lo = trace_distance(&ra, &rb).map_err(err)?;
    let hi = kantorovich_distance(&a, &b).map_err(err)?.value;
    let de = ehs_distance(&a, &b, &opts()).map_err(err)?.value;
    ensure(lo - 1e-4 <= de && de <= hi + 1e-4, || format!("{lo} ≤ {de} ≤ {hi} violated"))?;
    let lo = kantorovich_fidelity(&a, &b).map_err(err)?.value;
    let hi = fidelity(&ra, &rb).map_err(err)?;
    let fe = ehs_fidelity(&a, &b, &opts()).map_err(err)?.value;
    ensure(lo - 1e-4 <= fe && fe <= hi + 1e-4, || format!("{lo} ≤ {fe} ≤ {hi} violated"))
}

fn monotonicity(k: usize, seed: u64) -> Result<(), String> {
    let (a, b) = random_pair(k, seed)?;
    let m = random_measurement(a.dim(), 1 + k % 3, seed ^ 7).map_err(err)?;
    let (ma, mb) = (apply_to_ensemble(&m, &a).map_err(err)?, apply_to_ensemble(&m, &b).map_err(err)?);
    let before = ehs_distance(&a, &b, &opts()).map_err(err)?.value;
    let after = ehs_distance(&ma, &mb, &opts()).map_err(err)?.value;
    ensure(after <= before + 5e-4, || format!("D^EHS rose from {before} to {after}"))?;
    let before = ehs_fidelity(&a, &b, &opts()).map_err(err)?.value;
    let after = ehs_fidelity(&ma, &mb, &opts()).map_err(err)?.value;
    ensure(after >= before - 5e-4, || format!("F^EHS fell from {before} to {after}"))?;
    // A single-outcome measurement is a channel, for which the Kantorovich
    // measures contract as well.
    let c = random_measurement(a.dim(), 1, seed ^ 9).map_err(err)?;
    let (ca, cb) = (apply_to_ensemble(&c, &a).map_err(err)?, apply_to_ensemble(&c, &b).map_err(err)?);
    let (d0, d1) = (kantorovich_distance(&a, &b).map_err(err)?.value, kantorovich_distance(&ca, &cb).map_err(err)?.value);
    let (f0, f1) = (kantorovich_fidelity(&a, &b).map_err(err)?.value, kantorovich_fidelity(&ca, &cb).map_err(err)?.value);
    ensure(d1 <= d0 + 1e-8 && f1 >= f0 - 1e-8, || format!("D^K {d0} -> {d1}, F^K {f0} -> {f1}"))
}

fn decompositions(k: usize, seed: u64) -> Result<(), String> {
    let d = dims(k);
    let rho = random_density(d, 1 + k % d, seed).map_err(err)?;
    let sigma = random_density(d, d, seed ^ 11).map_err(err)?;
    let f = fidelity(&rho, &sigma).map_err(err)?;
    let t = theorem4_decomposition(&rho, &sigma).map_err(err)?;
    let v = pure_ensemble_fidelity(&t.ensemble_p, &t.ensemble_q, &opts()).map_err(err)?;
    ensure((v - f).abs() <= 1e-6, || format!("decomposition scores {v}, fidelity {f}"))
}

fn entropy_continuity(k: usize, seed: u64) -> Result<(), String> {
    let d = 2 + k % 3;
    let a = random_ensemble(d, 1 + k % 3, 1 + k % d, seed).map_err(err)?;
    let b = random_ensemble(d, 2, d, seed ^ 13).map_err(err)?;
    let dk = kantorovich_distance(&a, &b).map_err(err)?.value;
    let gap = (average_entropy(&a).map_err(err)? - average_entropy(&b).map_err(err)?).abs();
    let bound = fannes_avg_entropy_bound(dk, d).map_err(err)?;
    ensure(gap <= bound + 1e-8, || format!("entropy gap {gap} exceeds bound {bound} at D^K={dk}"))
}

fn triangle(k: usize, seed: u64) -> Result<(), String> {
    let pool: Vec<DensityMatrix> =
        (0..3).map(|i| random_density(2, 1 + i % 2, case_seed(seed, i))).collect::<Result<_, _>>().map_err(err)?;
    let mut es = Vec::new();
    for t in 0..3u64 {
        let w = random_ensemble(1, 3, 1, seed ^ (t + 100)).map_err(err)?.probs().to_vec();
        es.push(make_ensemble(w.into_iter().zip(pool.iter().cloned()).collect()).map_err(err)?);
    }
    let _ = k;
    let dk = |x: &Ensemble, y: &Ensemble| kantorovich_distance(x, y).map(|r| r.value);
    let de = |x: &Ensemble, y: &Ensemble| ehs_distance(x, y, &opts()).map(|r| r.value);
    let (ab, bc, ac) = (dk(&es[0], &es[1]).map_err(err)?, dk(&es[1], &es[2]).map_err(err)?, dk(&es[0], &es[2]).map_err(err)?);
    ensure(ac <= ab + bc + 1e-8, || format!("D^K: {ac} > {ab} + {bc}"))?;
    let (ab, bc, ac) = (de(&es[0], &es[1]).map_err(err)?, de(&es[1], &es[2]).map_err(err)?, de(&es[0], &es[2]).map_err(err)?);
    ensure(ac <= ab + bc + 5e-4, || format!("D^EHS: {ac} > {ab} + {bc}"))
}

fn lp_oracle(k: usize, seed: u64) -> Result<(), String> {
    let (m, n) = (1 + k % 5, 1 + (k / 5) % 5);
    let p = random_probabilities(m, seed);
    let q = random_probabilities(n, seed ^ 17);
    let raw = random_probabilities(m * n, seed ^ 19);
    // Costs spread over [-1, 1].
    let scale = raw.iter().fold(0.0f64, |a, b| a.max(*b));
    let cost: Vec<Vec<f64>> = (0..m).map(|i| (0..n).map(|j| 2.0 * raw[i * n + j] / scale - 1.0).collect()).collect();
    let sense = if k % 2 == 0 { Sense::Min } else { Sense::Max };
    let lp = transportation_lp(&p, &q, &cost, sense).map_err(err)?.value;
    let oracle = lp_vertex_oracle(&p, &q, &cost, sense).map_err(err)?;
    ensure((lp - oracle).abs() <= 1e-9, || format!("simplex {lp} vs vertices {oracle}"))
}

fn interior_point(n: usize, p: &[f64], q: &[f64], seed: u64) -> Result<JointPair, String> {
    let mut jp = JointPair::zeros(n);
    for i in 0..n {
        let w = random_ensemble(1, n, 1, case_seed(seed, i)).map_err(err)?.probs().to_vec();
        for j in 0..n {
            jp.p_table[i][j] = p[i] * (0.5 / n as f64 + 0.5 * w[j]);
        }
    }
    for j in 0..n {
        let w = random_ensemble(1, n, 1, case_seed(seed, n + j)).map_err(err)?.probs().to_vec();
        for i in 0..n {
            jp.q_table[i][j] = q[j] * (0.5 / n as f64 + 0.5 * w[i]);
        }
    }
    Ok(jp)
}

fn gradients(k: usize, seed: u64) -> Result<(), String> {
    let (a, b) = random_pair(k, seed)?;
    let sp = unify_support(&a, &b).map_err(err)?;
    if sp.len() < 2 {
        return Ok(());
    }
    let point = interior_point(sp.len(), &sp.p, &sp.q, seed)?;
    let dist: &dyn JointObjective = &DistanceObjective { support: &sp };
    let fid = FidelityObjective::new(&sp).map_err(err)?;
    for (name, obj) in [("distance", dist), ("fidelity", &fid as &dyn JointObjective)] {
        let r = fd_subgradient_check(obj, &point, 4, seed).map_err(err)?;
        ensure(r.max_rel_error <= 1e-4, || format!("{name} gradient relative error {}", r.max_rel_error))?;
    }
    Ok(())
}

fn game(k: usize, seed: u64) -> Result<(), String> {
    let (a, b) = random_pair(k, seed)?;
    let r = kantorovich_distance(&a, &b).map_err(err)?;
    let g = simulate_kantorovich_game(&a, &b, &r.coupling, 100_000, seed).map_err(err)?;
    let gap = (g.implied_distance() - r.value).abs();
    ensure(gap <= 6.0 * g.stderr, || format!("game gives {}, D^K is {} (σ={})", g.implied_distance(), r.value, g.stderr))
}

fn channel_measures(_k: usize, _seed: u64) -> Result<(), String> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let c = |x: f64| Complex64::new(x, 0.0);
    let z = GeneralizedMeasurement::projective(&[vec![c(1.0), c(0.0)], vec![c(0.0), c(1.0)]]).map_err(err)?;
    let x = GeneralizedMeasurement::projective(&[vec![c(h), c(h)], vec![c(h), c(-h)]]).map_err(err)?;
    let a = jamiolkowski_ensemble(&z).map_err(err)?.ensemble;
    let b = jamiolkowski_ensemble(&x).map_err(err)?.ensemble;
    let direct = kantorovich_distance(&a, &b).map_err(err)?.value;
    let iso = dist_iso(&z, &x, Method::Kantorovich, &opts()).map_err(err)?;
    let expected = 0.75f64.sqrt();
    ensure((iso - direct).abs() <= 1e-6 && (iso - expected).abs() <= 1e-6, || format!("dist_iso {iso}, direct {direct}"))
}
