mod common;

use common::map_ensemble;
use ensemble_metrics::ensembles::{
    average_entropy, average_state, canonical_ehs_pair, fannes_avg_entropy_bound, holevo_chi, make_ensemble,
    mix_ensembles, unify_support, DensityMatrix, Ensemble,
};
use ensemble_metrics::kantorovich::{
    flag_ensemble, flagged_closed_form_distance, flagged_closed_form_fidelity, kantorovich_distance,
    kantorovich_fidelity, lemma1_bound, transportation_lp, Sense,
};
use ensemble_metrics::linalg::{fidelity, trace_distance, von_neumann_entropy};
use ensemble_metrics::oracle::{lp_vertex_oracle, random_cptp, random_density, random_ensemble, random_unitary};
use proptest::prelude::*;

fn weights(raw: &[f64]) -> Vec<f64> {
    let s: f64 = raw.iter().sum();
    raw.iter().map(|x| x / s).collect()
}

// Ensemble over a fixed pool with the given (unnormalized) weights.
fn over_pool(pool: &[DensityMatrix], raw: &[f64]) -> Ensemble {
    make_ensemble(weights(raw).into_iter().zip(pool.iter().cloned()).collect()).unwrap()
}

fn audenaert(dk: f64, d: usize) -> f64 {
    dk * ((d - 1) as f64).log2() + ensemble_metrics::ensembles::binary_entropy(dk)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn triangle_inequality_on_a_shared_pool(
        seed in any::<u64>(),
        a in prop::collection::vec(0.01f64..1.0, 4),
        b in prop::collection::vec(0.01f64..1.0, 4),
        c in prop::collection::vec(0.01f64..1.0, 4),
    ) {
        let pool: Vec<_> = (0..4).map(|k| random_density(2, 1 + k % 2, seed + k as u64).unwrap()).collect();
        let (p, q, r) = (over_pool(&pool, &a), over_pool(&pool, &b), over_pool(&pool, &c));
        let pq = kantorovich_distance(&p, &q).unwrap().value;
        prop_assert_eq!(pq, kantorovich_distance(&q, &p).unwrap().value);
        prop_assert_eq!(kantorovich_fidelity(&p, &q).unwrap().value, kantorovich_fidelity(&q, &p).unwrap().value);
        let qr = kantorovich_distance(&q, &r).unwrap().value;
        let pr = kantorovich_distance(&p, &r).unwrap().value;
        prop_assert!(pr <= pq + qr + 1e-8);
        prop_assert!(kantorovich_distance(&p, &p).unwrap().value.abs() <= 1e-12);
        prop_assert!((kantorovich_fidelity(&p, &p).unwrap().value - 1.0).abs() <= 1e-9);
    }

    #[test]
    fn joint_convexity_and_concavity(seed in any::<u64>(), w in 0.05f64..0.95) {
        let e: Vec<_> = (0..4).map(|k| random_ensemble(2, 2, 1 + k % 2, seed + 100 * k as u64).unwrap()).collect();
        let pm = mix_ensembles(&[(w, &e[0]), (1.0 - w, &e[1])]).unwrap();
        let qm = mix_ensembles(&[(w, &e[2]), (1.0 - w, &e[3])]).unwrap();
        let dm = kantorovich_distance(&pm, &qm).unwrap().value;
        let ds = w * kantorovich_distance(&e[0], &e[2]).unwrap().value + (1.0 - w) * kantorovich_distance(&e[1], &e[3]).unwrap().value;
        prop_assert!(dm <= ds + 1e-8);
        let fm = kantorovich_fidelity(&pm, &qm).unwrap().value;
        let fs = w * kantorovich_fidelity(&e[0], &e[2]).unwrap().value + (1.0 - w) * kantorovich_fidelity(&e[1], &e[3]).unwrap().value;
        prop_assert!(fm >= fs - 1e-8);
    }

    #[test]
    fn channels_are_contractions(seed in any::<u64>(), d in 2usize..4, k in 1usize..4) {
        let p = random_ensemble(d, 3, d, seed).unwrap();
        let q = random_ensemble(d, 2, 1, seed ^ 77).unwrap();
        let kraus = random_cptp(d, d, k, seed ^ 5).unwrap();
        let (p2, q2) = (map_ensemble(&kraus, &p), map_ensemble(&kraus, &q));
        prop_assert!(kantorovich_distance(&p2, &q2).unwrap().value <= kantorovich_distance(&p, &q).unwrap().value + 1e-8);
        prop_assert!(kantorovich_fidelity(&p2, &q2).unwrap().value >= kantorovich_fidelity(&p, &q).unwrap().value - 1e-8);
    }

    #[test]
    fn averaging_is_monotone(seed in any::<u64>(), d in 2usize..5) {
        let p = random_ensemble(d, 3, 1 + seed as usize % d, seed).unwrap();
        let q = random_ensemble(d, 3, d, seed ^ 3).unwrap();
        let (ap, aq) = (average_state(&p), average_state(&q));
        prop_assert!(trace_distance(&ap, &aq).unwrap() <= kantorovich_distance(&p, &q).unwrap().value + 1e-9);
        prop_assert!(fidelity(&ap, &aq).unwrap() >= kantorovich_fidelity(&p, &q).unwrap().value - 1e-9);
    }

    #[test]
    fn tensoring_with_a_shared_ensemble_is_neutral(seed in any::<u64>()) {
        let p = random_ensemble(2, 2, 1, seed).unwrap();
        let q = random_ensemble(2, 3, 2, seed ^ 1).unwrap();
        let r = random_ensemble(2, 2, 2, seed ^ 2).unwrap();
        let (pr, qr) = (p.tensor(&r).unwrap(), q.tensor(&r).unwrap());
        prop_assert!((kantorovich_distance(&pr, &qr).unwrap().value - kantorovich_distance(&p, &q).unwrap().value).abs() <= 1e-8);
        prop_assert!((kantorovich_fidelity(&pr, &qr).unwrap().value - kantorovich_fidelity(&p, &q).unwrap().value).abs() <= 1e-8);
    }

    #[test]
    fn average_entropy_continuity(seed in any::<u64>(), d in 2usize..5) {
        let p = random_ensemble(d, 3, 1 + seed as usize % d, seed).unwrap();
        let q = random_ensemble(d, 2, d, seed ^ 9).unwrap();
        let dk = kantorovich_distance(&p, &q).unwrap().value;
        let gap = (average_entropy(&p).unwrap() - average_entropy(&q).unwrap()).abs();
        prop_assert!(gap <= fannes_avg_entropy_bound(dk, d).unwrap() + 1e-8);
        let hp: Vec<f64> = p.states().iter().map(|s| von_neumann_entropy(s).unwrap()).collect();
        let hq: Vec<f64> = q.states().iter().map(|s| von_neumann_entropy(s).unwrap()).collect();
        let hbar = |h: &[f64], e: &Ensemble| h.iter().zip(e.probs()).map(|(x, w)| x * w).sum::<f64>();
        let check = lemma1_bound(hbar(&hp, &p), hbar(&hq, &q), dk, |x| audenaert(x, d));
        prop_assert!(check.holds);
    }

    #[test]
    fn simplex_agrees_with_vertex_enumeration(
        m in 1usize..5,
        n in 1usize..5,
        raw_p in prop::collection::vec(0.0f64..1.0, 4),
        raw_q in prop::collection::vec(0.0f64..1.0, 4),
        cost in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 4),
        maximize in any::<bool>(),
    ) {
        let mut p = raw_p[..m].to_vec();
        let mut q = raw_q[..n].to_vec();
        p[0] += 0.1;
        q[n - 1] += 0.1;
        let (p, q) = (weights(&p), weights(&q));
        let cost: Vec<Vec<f64>> = cost[..m].iter().map(|r| r[..n].to_vec()).collect();
        let sense = if maximize { Sense::Max } else { Sense::Min };
        let lp = transportation_lp(&p, &q, &cost, sense).unwrap();
        let oracle = lp_vertex_oracle(&p, &q, &cost, sense).unwrap();
        prop_assert!((lp.value - oracle).abs() <= 1e-9, "simplex {} vs oracle {}", lp.value, oracle);
        prop_assert!(lp.coupling.marginal_residual(&p, &q) <= 1e-9);
        prop_assert!((lp.coupling.cost(&cost) - lp.value).abs() <= 1e-10);
    }

    #[test]
    fn flagged_closed_forms_match_the_program(seed in any::<u64>(), n in 1usize..4) {
        let pw = weights(&(0..n).map(|k| 0.2 + ((seed >> (4 * k)) & 15) as f64).collect::<Vec<_>>());
        let qw = weights(&(0..n).map(|k| 0.2 + ((seed >> (4 * k + 20)) & 15) as f64).collect::<Vec<_>>());
        let ps: Vec<_> = (0..n).map(|k| (pw[k], random_density(2, 1 + k % 2, seed + k as u64).unwrap())).collect();
        let qs: Vec<_> = (0..n).map(|k| (qw[k], random_density(2, 2 - k % 2, seed + 50 + k as u64).unwrap())).collect();
        let (fp, fq) = (flag_ensemble(&ps).unwrap(), flag_ensemble(&qs).unwrap());
        let d = kantorovich_distance(&fp, &fq).unwrap().value;
        prop_assert!((d - flagged_closed_form_distance(&ps, &qs).unwrap()).abs() <= 1e-9);
        let f = kantorovich_fidelity(&fp, &fq).unwrap().value;
        prop_assert!((f - flagged_closed_form_fidelity(&ps, &qs).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn holevo_is_unitarily_invariant(seed in any::<u64>(), d in 2usize..4) {
        let e = random_ensemble(d, 3, 1 + seed as usize % d, seed).unwrap();
        let u = random_unitary(d, seed ^ 8).unwrap();
        let rotated = map_ensemble(&[u], &e);
        prop_assert!((holevo_chi(&e).unwrap() - holevo_chi(&rotated).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn averages_are_linear_in_the_weights(seed in any::<u64>(), w in 0.0f64..1.0) {
        let pool: Vec<_> = (0..3).map(|k| random_density(3, 2, seed + k).unwrap()).collect();
        let (a, b) = (weights(&[1.0, 2.0, 3.0]), weights(&[3.0, 0.5, 1.0]));
        let mixed: Vec<f64> = a.iter().zip(&b).map(|(x, y)| w * x + (1.0 - w) * y).collect();
        let avg = |ws: &[f64]| average_state(&make_ensemble(ws.iter().copied().zip(pool.iter().cloned()).collect()).unwrap());
        let lhs = avg(&mixed);
        let rhs = &avg(&a).mat().scale(w) + &avg(&b).mat().scale(1.0 - w);
        prop_assert!(lhs.mat().max_diff(&rhs) <= 1e-12);
    }

    #[test]
    fn canonical_pointer_states_give_the_kolmogorov_distance(
        seed in any::<u64>(),
        a in prop::collection::vec(0.0f64..1.0, 3),
        b in prop::collection::vec(0.0f64..1.0, 3),
    ) {
        let pool: Vec<_> = (0..3).map(|k| random_density(2, 1 + k % 2, seed + k as u64).unwrap()).collect();
        let mut a = a; a[0] += 0.1;
        let mut b = b; b[2] += 0.1;
        let (p, q) = (over_pool(&pool, &a), over_pool(&pool, &b));
        let sp = unify_support(&p, &q).unwrap();
        let (x, y) = canonical_ehs_pair(&sp);
        let dx = DensityMatrix::new(x.mat.clone()).unwrap();
        let dy = DensityMatrix::new(y.mat.clone()).unwrap();
        let kolmogorov = 0.5 * sp.p.iter().zip(&sp.q).map(|(u, v)| (u - v).abs()).sum::<f64>();
        prop_assert!((trace_distance(&dx, &dy).unwrap() - kolmogorov).abs() <= 1e-10);
    }
}
