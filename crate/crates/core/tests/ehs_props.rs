mod common;

use ensemble_metrics::channels::{apply_to_ensemble, apply_to_pure};
use ensemble_metrics::ehs::{
    ehs_bures, ehs_distance, ehs_fidelity, pure_ensemble_fidelity, theorem4_decomposition, SolverOptions,
};
use ensemble_metrics::ensembles::{average_entropy, average_state, make_ensemble, mix_ensembles, DensityMatrix, Ensemble};
use ensemble_metrics::kantorovich::{kantorovich_distance, kantorovich_fidelity};
use ensemble_metrics::linalg::{fidelity, inner, trace_distance, ComplexMatrix};
use ensemble_metrics::oracle::{haar_state, random_cptp, random_density, random_ensemble, random_measurement};
use proptest::prelude::*;

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn dist(a: &Ensemble, b: &Ensemble) -> f64 {
    ehs_distance(a, b, &opts()).unwrap().value
}

fn fid(a: &Ensemble, b: &Ensemble) -> f64 {
    ehs_fidelity(a, b, &opts()).unwrap().value
}

// Pure-state decomposition of ρ from the rows of a random isometry: the
// vectors √ρ r_k† sum (as projectors) to ρ.
fn random_decomposition(rho: &DensityMatrix, n: usize, seed: u64) -> Ensemble {
    let root = ensemble_metrics::linalg::mat_sqrt_psd(rho.mat()).unwrap();
    let rows = random_cptp(rho.dim(), 1, n, seed).unwrap();
    let mut pairs = Vec::new();
    for r in rows {
        let v = root.apply(&r.adjoint().col(0));
        let w = inner(&v, &v).re;
        if w > 1e-12 {
            pairs.push((w, DensityMatrix::pure(&v).unwrap()));
        }
    }
    make_ensemble(pairs).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn sandwich(seed in any::<u64>(), d in 2usize..4, n in 1usize..4, m in 1usize..4) {
        let p = random_ensemble(d, n, 1 + seed as usize % d, seed).unwrap();
        let q = random_ensemble(d, m, 1 + (seed >> 8) as usize % d, seed ^ 41).unwrap();
        let (ap, aq) = (average_state(&p), average_state(&q));
        let de = dist(&p, &q);
        prop_assert!(trace_distance(&ap, &aq).unwrap() - 1e-4 <= de);
        prop_assert!(de <= kantorovich_distance(&p, &q).unwrap().value + 1e-4);
        let fe = fid(&p, &q);
        prop_assert!(kantorovich_fidelity(&p, &q).unwrap().value - 1e-4 <= fe);
        prop_assert!(fe <= fidelity(&ap, &aq).unwrap() + 1e-4);
        prop_assert_eq!(de, dist(&q, &p));
        prop_assert_eq!(fe, fid(&q, &p));
    }

    #[test]
    fn triangle_inequality(seed in any::<u64>()) {
        let pool: Vec<_> = (0..3).map(|k| random_density(2, 1 + k % 2, seed + k as u64).unwrap()).collect();
        let mk = |s: u64| {
            let raw: Vec<f64> = (0..3).map(|k| 0.05 + ((s >> (8 * k)) & 255) as f64).collect();
            let t: f64 = raw.iter().sum();
            make_ensemble(raw.iter().map(|x| x / t).zip(pool.iter().cloned()).collect()).unwrap()
        };
        let (a, b, c) = (mk(seed ^ 1), mk(seed.rotate_left(17)), mk(seed.rotate_left(39)));
        prop_assert!(dist(&a, &c) <= dist(&a, &b) + dist(&b, &c) + 5e-4);
        prop_assert!(dist(&a, &a) <= 1e-4);
    }

    #[test]
    fn generalized_measurements_are_contractions(seed in any::<u64>(), outcomes in 1usize..4) {
        let p = random_ensemble(2, 2, 1 + seed as usize % 2, seed).unwrap();
        let q = random_ensemble(2, 2, 2, seed ^ 13).unwrap();
        let m = random_measurement(2, outcomes, seed ^ 99).unwrap();
        let (mp, mq) = (apply_to_ensemble(&m, &p).unwrap(), apply_to_ensemble(&m, &q).unwrap());
        prop_assert!(dist(&mp, &mq) <= dist(&p, &q) + 5e-4);
        prop_assert!(fid(&mp, &mq) >= fid(&p, &q) - 5e-4);
    }

    #[test]
    fn measured_pure_states_keep_their_overlap(seed in any::<u64>(), d in 2usize..4, outcomes in 1usize..4) {
        let psi = haar_state(d, seed).unwrap();
        let phi = haar_state(d, seed ^ 5).unwrap();
        let m = random_measurement(d, outcomes, seed ^ 6).unwrap();
        let (a, b) = (apply_to_pure(&m, &psi).unwrap(), apply_to_pure(&m, &phi).unwrap());
        prop_assert!(fid(&a, &b) >= inner(&psi, &phi).norm() - 5e-4);
    }

    #[test]
    fn no_decomposition_beats_the_fidelity(seed in any::<u64>(), d in 2usize..4, n in 1usize..5, k in 1usize..5) {
        let rho = random_density(d, d, seed).unwrap();
        let sigma = random_density(d, 1 + seed as usize % d, seed ^ 3).unwrap();
        let f = fidelity(&rho, &sigma).unwrap();
        let a = random_decomposition(&rho, n.max(d), seed ^ 7);
        let b = random_decomposition(&sigma, k.max(d), seed ^ 8);
        prop_assert!(pure_ensemble_fidelity(&a, &b, &opts()).unwrap() <= f + 1e-6);
        let t4 = theorem4_decomposition(&rho, &sigma).unwrap();
        let v = pure_ensemble_fidelity(&t4.ensemble_p, &t4.ensemble_q, &opts()).unwrap();
        prop_assert!((v - f).abs() <= 1e-6, "{} vs {}", v, f);
    }

    #[test]
    fn fidelity_is_strongly_concave(seed in any::<u64>(), p in 0.05f64..0.95, q in 0.05f64..0.95) {
        let e: Vec<_> = (0..4).map(|k| random_ensemble(2, 2, 1 + k % 2, seed + 31 * k as u64).unwrap()).collect();
        let a = mix_ensembles(&[(p, &e[0]), (1.0 - p, &e[1])]).unwrap();
        let b = mix_ensembles(&[(q, &e[2]), (1.0 - q, &e[3])]).unwrap();
        let rhs = (p * q).sqrt() * fid(&e[0], &e[2]) + ((1.0 - p) * (1.0 - q)).sqrt() * fid(&e[1], &e[3]);
        prop_assert!(fid(&a, &b) >= rhs - 5e-4);
    }

    #[test]
    fn bures_follows_the_fidelity(seed in any::<u64>()) {
        let p = random_ensemble(2, 2, 1, seed).unwrap();
        let q = random_ensemble(2, 3, 2, seed ^ 2).unwrap();
        let f = fid(&p, &q);
        let (b, a) = ehs_bures(&p, &q, &opts()).unwrap();
        prop_assert!((b - (1.0 - f).max(0.0).sqrt()).abs() <= 1e-9);
        prop_assert!((a - f.clamp(-1.0, 1.0).acos()).abs() <= 1e-9);
    }
}

// Ensembles that differ only in how mixed one member is: as the mixing goes
// to zero, so do the EHS distance and the gap in average entropy.
#[test]
fn average_entropy_gap_shrinks_with_the_distance() {
    let zero = DensityMatrix::basis(2, 0);
    let one = DensityMatrix::basis(2, 1);
    let p = make_ensemble(vec![(0.5, zero.clone()), (0.5, one.clone())]).unwrap();
    let mut last: Option<(f64, f64)> = None;
    for eps in [0.4, 0.2, 0.1, 0.05, 0.02, 0.01] {
        let mixed = &zero.mat().scale(1.0 - eps) + &ComplexMatrix::identity(2).scale(eps / 2.0);
        let q = make_ensemble(vec![(0.5, DensityMatrix::new(mixed).unwrap()), (0.5, one.clone())]).unwrap();
        let d = dist(&p, &q);
        let gap = (average_entropy(&p).unwrap() - average_entropy(&q).unwrap()).abs();
        assert!(d <= eps / 2.0 + 1e-4);
        if let Some((d0, g0)) = last {
            assert!(d < d0 && gap < g0, "eps={eps}: distance {d} (was {d0}), gap {gap} (was {g0})");
        }
        last = Some((d, gap));
    }
    let (d, gap) = last.unwrap();
    assert!(d < 0.01 && gap < 0.05);
}
