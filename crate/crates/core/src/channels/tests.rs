use num_complex::Complex64;

use super::*;
use crate::ehs::SolverOptions;
use crate::ensembles::average_state;
use crate::linalg::{fidelity, trace_distance};
use crate::oracle::{random_measurement, random_unitary};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn z_basis() -> GeneralizedMeasurement {
    GeneralizedMeasurement::projective(&[vec![c(1.0, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap()
}

fn x_basis() -> GeneralizedMeasurement {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    GeneralizedMeasurement::projective(&[vec![c(s, 0.0), c(s, 0.0)], vec![c(s, 0.0), c(-s, 0.0)]]).unwrap()
}

fn plus() -> DensityMatrix {
    DensityMatrix::pure(&[c(1.0, 0.0), c(1.0, 0.0)]).unwrap()
}

#[test]
fn z_measurement_of_plus() {
    let e = apply_measurement(&z_basis(), &plus()).unwrap();
    assert_eq!(e.len(), 2);
    for (p, s) in e.iter() {
        assert!((p - 0.5).abs() < 1e-12);
        assert!((s.purity() - 1.0).abs() < 1e-12);
    }
    assert!(e.states()[0].mat().max_diff(DensityMatrix::basis(2, 0).mat()) < 1e-12);
}

#[test]
fn outcomes_with_equal_post_states_merge() {
    let k1 = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap();
    let k2 = ComplexMatrix::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
    let m = GeneralizedMeasurement::from_kraus_sets(vec![vec![k1], vec![k2]]).unwrap();
    assert_eq!(m.len(), 2);
    let e = apply_measurement(&m, &DensityMatrix::maximally_mixed(2)).unwrap();
    assert_eq!(e.len(), 1);
    assert!((e.probs()[0] - 1.0).abs() < 1e-15);
    assert!(e.states()[0].mat().max_diff(DensityMatrix::basis(2, 0).mat()) < 1e-12);
}

#[test]
fn identity_channel_keeps_the_state() {
    let e = apply_measurement(&GeneralizedMeasurement::identity(2), &plus()).unwrap();
    assert_eq!(e.len(), 1);
    assert!(e.states()[0].mat().max_diff(plus().mat()) < 1e-15);
    let j = jamiolkowski_ensemble(&GeneralizedMeasurement::identity(3)).unwrap();
    assert_eq!(j.ensemble.len(), 1);
    let phi = DensityMatrix::pure(&max_entangled(3)).unwrap();
    assert!(j.ensemble.states()[0].mat().max_diff(phi.mat()) < 1e-12);
}

#[test]
fn jamiolkowski_of_z_basis() {
    let j = jamiolkowski_ensemble(&z_basis()).unwrap();
    assert_eq!(j.ensemble.len(), 2);
    for (k, (p, s)) in j.ensemble.iter().enumerate() {
        assert!((p - 0.5).abs() < 1e-12);
        assert!(s.mat().max_diff(DensityMatrix::basis(4, 3 * k).mat()) < 1e-12);
    }
}

#[test]
fn jamiolkowski_weights_are_outcome_weights() {
    let m = random_measurement(3, 3, 17).unwrap();
    let j = jamiolkowski_ensemble(&m).unwrap();
    assert_eq!(j.ensemble.len(), 3);
    for (o, p) in m.outcomes().iter().zip(j.ensemble.probs()) {
        assert!((o.weight - p).abs() < 1e-9);
    }
    let avg = average_state(&j.ensemble);
    let marginal = linalg::partial_trace(avg.mat(), (3, 3), linalg::Keep::A).unwrap();
    assert!(marginal.max_diff(&ComplexMatrix::identity(3).scale(1.0 / 3.0)) < 1e-7);
}

#[test]
fn incomplete_measurement_reports_residual() {
    let k = ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.9]]).unwrap();
    let err = GeneralizedMeasurement::new(vec![Outcome { weight: 1.0, kraus: vec![k.scale((2.0f64 / 1.81).sqrt())] }]).unwrap_err();
    match err {
        Error::InvalidMeasurement { residual, .. } => assert!(residual > 0.05),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn duplicate_outcomes_merge() {
    let u = random_unitary(2, 3).unwrap();
    let m = GeneralizedMeasurement::from_kraus_sets(vec![vec![u.scale(0.6)], vec![u.scale(0.8)]]).unwrap();
    assert_eq!(m.len(), 1);
    assert!((m.outcomes()[0].weight - 1.0).abs() < 1e-15);
}

#[test]
fn iso_measures_between_z_and_x() {
    let opts = SolverOptions::default();
    assert_eq!(dist_iso(&z_basis(), &z_basis(), Method::Kantorovich, &opts).unwrap(), 0.0);
    assert!((fid_iso(&z_basis(), &z_basis(), Method::Ehs, &opts).unwrap() - 1.0).abs() < 1e-12);

    // Choi states of Z and X written out by hand.
    let zero = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    let za = make_ensemble(vec![
        (0.5, DensityMatrix::pure(&[one, zero, zero, zero]).unwrap()),
        (0.5, DensityMatrix::pure(&[zero, zero, zero, one]).unwrap()),
    ])
    .unwrap();
    let xa = make_ensemble(vec![
        (0.5, DensityMatrix::pure(&[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]).unwrap()),
        (0.5, DensityMatrix::pure(&[c(0.5, 0.0), c(-0.5, 0.0), c(-0.5, 0.0), c(0.5, 0.0)]).unwrap()),
    ])
    .unwrap();
    for method in [Method::Kantorovich, Method::Ehs] {
        let d = dist_iso(&z_basis(), &x_basis(), method, &opts).unwrap();
        let hand = ensemble_distance(&za, &xa, method, &opts).unwrap();
        assert!(d > 0.1);
        assert!((d - hand).abs() < 1e-9);
        let f = fid_iso(&z_basis(), &x_basis(), method, &opts).unwrap();
        assert!((f - ensemble_fidelity(&za, &xa, method, &opts).unwrap()).abs() < 1e-9);
    }
    // |⟨00|++⟩| = ½ for every pair, so each pairwise distance is √3/2.
    let expected = 3.0f64.sqrt() / 2.0;
    assert!((dist_iso(&z_basis(), &x_basis(), Method::Kantorovich, &opts).unwrap() - expected).abs() < 1e-9);
}

#[test]
fn identity_versus_depolarizing_reduces_to_states() {
    let half = 0.5;
    let pauli = [
        ComplexMatrix::identity(2),
        ComplexMatrix::from_real(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap(),
        ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, -1.0)], vec![c(0.0, 1.0), c(0.0, 0.0)]]).unwrap(),
        ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, -1.0]]).unwrap(),
    ];
    let dep = GeneralizedMeasurement::channel(pauli.iter().map(|p| p.scale(half)).collect()).unwrap();
    let id = GeneralizedMeasurement::identity(2);
    let phi = DensityMatrix::pure(&max_entangled(2)).unwrap();
    let mixed = DensityMatrix::maximally_mixed(4);
    let expected = trace_distance(&phi, &mixed).unwrap();
    let opts = SolverOptions::default();
    for method in [Method::Kantorovich, Method::Ehs] {
        assert!((dist_iso(&id, &dep, method, &opts).unwrap() - expected).abs() < 1e-9);
    }
    let f = fidelity(&phi, &mixed).unwrap();
    assert!((fid_iso(&id, &dep, Method::Kantorovich, &opts).unwrap() - f).abs() < 1e-9);
}

#[test]
fn orthogonal_outputs_have_zero_fidelity() {
    let to = |k: usize| {
        let mut a = ComplexMatrix::zeros(2, 2);
        a[(k, 0)] = c(1.0, 0.0);
        let mut b = ComplexMatrix::zeros(2, 2);
        b[(k, 1)] = c(1.0, 0.0);
        GeneralizedMeasurement::channel(vec![a, b]).unwrap()
    };
    let opts = SolverOptions::default();
    assert!(fid_iso(&to(0), &to(1), Method::Ehs, &opts).unwrap().abs() < 1e-12);
    let w = WorstCaseOptions { restarts: 2, max_steps: 20, ..WorstCaseOptions::default() };
    assert!(fid_min(&to(0), &to(1), Method::Kantorovich, &w).unwrap().value.abs() < 1e-12);
}

#[test]
fn worst_case_dominates_the_entangled_probe() {
    let m = random_measurement(2, 2, 1).unwrap();
    let n = random_measurement(2, 2, 2).unwrap();
    let opts = WorstCaseOptions { restarts: 4, max_steps: 60, ..WorstCaseOptions::default() };
    let iso = dist_iso(&m, &n, Method::Kantorovich, &opts.solver).unwrap();
    let worst = dist_max(&m, &n, Method::Kantorovich, &opts).unwrap();
    assert!(worst.value >= iso - 1e-6, "{} < {iso}", worst.value);
    assert!((linalg::norm(&worst.state) - 1.0).abs() < 1e-12);
    let fi = fid_iso(&m, &n, Method::Kantorovich, &opts.solver).unwrap();
    let fw = fid_min(&m, &n, Method::Kantorovich, &opts).unwrap();
    assert!(fw.value <= fi + 1e-6);
    let same = dist_max(&m, &m, Method::Kantorovich, &WorstCaseOptions { restarts: 1, max_steps: 5, ..opts }).unwrap();
    assert!(same.value.abs() < 1e-12);
}

#[test]
fn worst_case_unitaries_match_a_grid_search() {
    let u = random_unitary(2, 41).unwrap();
    let v = random_unitary(2, 42).unwrap();
    let m = GeneralizedMeasurement::channel(vec![u.clone()]).unwrap();
    let n = GeneralizedMeasurement::channel(vec![v.clone()]).unwrap();
    let opts = WorstCaseOptions { restarts: 6, max_steps: 200, ..WorstCaseOptions::default() };
    let found = dist_max(&m, &n, Method::Kantorovich, &opts).unwrap().value;

    // The outputs are pure, so the distance is √(1 − |Tr(ρ_S W)|²) with
    // W = U†V and ρ_S the reduced input, which ranges over the Bloch ball.
    let w = u.adjoint().matmul(&v);
    let mut best: f64 = 0.0;
    let steps = 120;
    for a in 0..=steps {
        let theta = std::f64::consts::PI * a as f64 / steps as f64;
        for b in 0..2 * steps {
            let phi = std::f64::consts::PI * b as f64 / steps as f64;
            for r in [0.0, 0.25, 0.5, 0.75, 1.0] {
                let (x, y, z) = (r * theta.sin() * phi.cos(), r * theta.sin() * phi.sin(), r * theta.cos());
                let rho = ComplexMatrix::from_rows(&[
                    vec![c((1.0 + z) / 2.0, 0.0), c(x / 2.0, -y / 2.0)],
                    vec![c(x / 2.0, y / 2.0), c((1.0 - z) / 2.0, 0.0)],
                ])
                .unwrap();
                let overlap = rho.trace_product(&w).norm();
                best = best.max((1.0 - overlap * overlap).max(0.0).sqrt());
            }
        }
    }
    assert!(found >= best - 1e-6, "search {found} below grid {best}");
    assert!(found - best < 1e-3, "search {found} far above grid {best}");
}

#[test]
fn composition_and_unitality() {
    let m = random_measurement(2, 2, 8).unwrap();
    let id = GeneralizedMeasurement::identity(2);
    let opts = SolverOptions::default();
    let left = compose(&id, &m).unwrap();
    assert_eq!(left.len(), m.len());
    assert!(dist_iso(&left, &m, Method::Kantorovich, &opts).unwrap() < 1e-9);
    let zz = compose(&z_basis(), &z_basis()).unwrap();
    assert_eq!(zz.len(), 2);
    assert!(is_unital(&z_basis()));
    assert!(is_unital(&crate::oracle::random_unital_measurement(3, 3, 5).unwrap()));
    let damp = GeneralizedMeasurement::channel(vec![
        ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.6]]).unwrap(),
        ComplexMatrix::from_real(&[&[0.0, 0.8], &[0.0, 0.0]]).unwrap(),
    ])
    .unwrap();
    assert!(!is_unital(&damp));
}

#[test]
fn identity_extension_keeps_normalization() {
    let m = random_measurement(2, 2, 4).unwrap();
    let big = tensor_identity_left(&m, 3);
    assert_eq!(big.dim(), 6);
    let again = GeneralizedMeasurement::new(big.outcomes().to_vec()).unwrap();
    assert_eq!(again.len(), 2);
}

#[test]
fn povm_ensembles() {
    let z = Povm::new(vec![
        ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap(),
        ComplexMatrix::from_real(&[&[0.0, 0.0], &[0.0, 1.0]]).unwrap(),
    ])
    .unwrap();
    let x = Povm::new(vec![
        ComplexMatrix::from_real(&[&[0.5, 0.5], &[0.5, 0.5]]).unwrap(),
        ComplexMatrix::from_real(&[&[0.5, -0.5], &[-0.5, 0.5]]).unwrap(),
    ])
    .unwrap();
    let e = povm_to_ensemble(&z).unwrap();
    assert_eq!(e.probs(), &[0.5, 0.5]);
    let trivial = Povm::new(vec![ComplexMatrix::identity(3)]).unwrap();
    let t = povm_to_ensemble(&trivial).unwrap();
    assert_eq!(t.len(), 1);
    assert!(t.states()[0].mat().max_diff(DensityMatrix::maximally_mixed(3).mat()) < 1e-15);

    let opts = SolverOptions::default();
    let d = povm_distance(&z, &x, Method::Kantorovich, &opts).unwrap();
    assert!((d - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-9);
    assert_eq!(povm_distance(&z, &z, Method::Kantorovich, &opts).unwrap(), 0.0);
    assert!((povm_fidelity(&x, &x, Method::Ehs, &opts).unwrap() - 1.0).abs() < 1e-12);
    let lower = povm_distance(&trivial, &Povm::new(vec![ComplexMatrix::identity(3)]).unwrap(), Method::Ehs, &opts).unwrap();
    assert!(lower.abs() < 1e-12);
}

#[test]
fn sic_povm_gives_four_pure_states() {
    // Tetrahedral Bloch vectors; E_i = (I + n_i·σ)/4.
    let t = 1.0 / 3.0f64.sqrt();
    let dirs = [[t, t, t], [t, -t, -t], [-t, t, -t], [-t, -t, t]];
    let elements = dirs
        .iter()
        .map(|[x, y, z]| {
            ComplexMatrix::from_rows(&[
                vec![c((1.0 + z) / 4.0, 0.0), c(x / 4.0, -y / 4.0)],
                vec![c(x / 4.0, y / 4.0), c((1.0 - z) / 4.0, 0.0)],
            ])
            .unwrap()
        })
        .collect();
    let e = povm_to_ensemble(&Povm::new(elements).unwrap()).unwrap();
    assert_eq!(e.len(), 4);
    for (p, s) in e.iter() {
        assert!((p - 0.25).abs() < 1e-12);
        assert!((s.purity() - 1.0).abs() < 1e-12);
    }
    assert!(average_state(&e).mat().max_diff(DensityMatrix::maximally_mixed(2).mat()) < 1e-8);
}

#[test]
fn invalid_povm_is_rejected() {
    let bad = Povm::new(vec![
        ComplexMatrix::from_real(&[&[1.0, 0.0], &[0.0, 0.0]]).unwrap(),
        ComplexMatrix::from_real(&[&[0.0, 0.0], &[0.0, 0.9]]).unwrap(),
    ]);
    assert!(matches!(bad, Err(Error::InvalidPovm { residual, .. }) if (residual - 0.1).abs() < 1e-12));
    let negative = Povm::new(vec![
        ComplexMatrix::from_real(&[&[1.2, 0.0], &[0.0, 0.0]]).unwrap(),
        ComplexMatrix::from_real(&[&[-0.2, 0.0], &[0.0, 1.0]]).unwrap(),
    ]);
    assert!(matches!(negative, Err(Error::InvalidPovm { .. })));
}
