use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::channels::GeneralizedMeasurement;
use crate::ensembles::{make_ensemble, DensityMatrix, Ensemble};
use crate::linalg::{inner, norm, ComplexMatrix};
use crate::{Error, Result};

fn gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

fn sub_seed(seed: u64, k: u64) -> u64 {
    seed.wrapping_add((k + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

// Gram-Schmidt (twice) on the columns of a Gaussian rows×cols matrix. The
// R factor has a positive diagonal, so the result is Haar distributed.
fn gaussian_isometry(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> ComplexMatrix {
    let mut q = ComplexMatrix::zeros(rows, cols);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(cols);
    while basis.len() < cols {
        let mut v: Vec<Complex64> = (0..rows).map(|_| gaussian(rng)).collect();
        for _ in 0..2 {
            for b in &basis {
                let c = inner(b, &v);
                for (x, y) in v.iter_mut().zip(b) {
                    *x -= c * y;
                }
            }
        }
        let n = norm(&v);
        if n > 1e-8 {
            q.set_col(basis.len(), &v.iter().map(|z| z / n).collect::<Vec<_>>());
            basis.push(v.iter().map(|z| z / n).collect());
        }
    }
    q
}

/// Kraus operators K_1..K_k (d_out × d_in) cut from a Haar isometry
/// C^{d_in} → C^{k·d_out}, so that Σ K†K = I.
pub fn random_cptp(d_in: usize, d_out: usize, k: usize, seed: u64) -> Result<Vec<ComplexMatrix>> {
    if d_in == 0 || d_out == 0 || k == 0 || k * d_out < d_in {
        return Err(Error::InvalidParams(format!(
            "need positive sizes with k·d_out ≥ d_in (got d_in={d_in}, d_out={d_out}, k={k})"
        )));
    }
    let v = gaussian_isometry(k * d_out, d_in, &mut ChaCha8Rng::seed_from_u64(seed));
    Ok((0..k).map(|j| v.row_block(j * d_out, d_out)).collect())
}

/// Haar-random unitary.
pub fn random_unitary(d: usize, seed: u64) -> Result<ComplexMatrix> {
    Ok(random_cptp(d, d, 1, seed)?.remove(0))
}

/// Haar-random unit vector.
pub fn haar_state(d: usize, seed: u64) -> Result<Vec<Complex64>> {
    if d == 0 {
        return Err(Error::InvalidParams("dimension must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let v: Vec<Complex64> = (0..d).map(|_| gaussian(&mut rng)).collect();
    let n = norm(&v);
    Ok(v.iter().map(|z| z / n).collect())
}

/// Normalized Wishart state G G† / Tr(G G†) with G of size d × rank.
pub fn random_density(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if d == 0 || rank == 0 || rank > d {
        return Err(Error::InvalidParams(format!("need 1 ≤ rank ≤ d (got d={d}, rank={rank})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let data = (0..d * rank).map(|_| gaussian(&mut rng)).collect();
    let g = ComplexMatrix::from_vec(d, rank, data)?;
    DensityMatrix::from_unnormalized(g.matmul(&g.adjoint()).hermitian_part())
}

/// Measurement with the given number of outcomes, two Kraus operators each,
/// from one random channel.
pub fn random_measurement(d: usize, outcomes: usize, seed: u64) -> Result<GeneralizedMeasurement> {
    if outcomes == 0 {
        return Err(Error::InvalidParams("need at least one outcome".into()));
    }
    let kraus = random_cptp(d, d, 2 * outcomes, seed)?;
    GeneralizedMeasurement::from_kraus_sets(kraus.chunks(2).map(|c| c.to_vec()).collect())
}

/// Unital measurement: outcome i applies one of two Haar unitaries with
/// equal probability, outcome weights drawn from a flat Dirichlet.
pub fn random_unital_measurement(d: usize, outcomes: usize, seed: u64) -> Result<GeneralizedMeasurement> {
    if outcomes == 0 {
        return Err(Error::InvalidParams("need at least one outcome".into()));
    }
    let weights = dirichlet(outcomes, &mut ChaCha8Rng::seed_from_u64(seed));
    let mut sets = Vec::with_capacity(outcomes);
    for (i, w) in weights.iter().enumerate() {
        let s = (w / 2.0).sqrt();
        let u = random_unitary(d, sub_seed(seed, 2 * i as u64))?;
        let v = random_unitary(d, sub_seed(seed, 2 * i as u64 + 1))?;
        sets.push(vec![u.scale(s), v.scale(s)]);
    }
    GeneralizedMeasurement::from_kraus_sets(sets)
}

/// n states of the given rank with flat-Dirichlet probabilities.
pub fn random_ensemble(d: usize, n: usize, rank: usize, seed: u64) -> Result<Ensemble> {
    if n == 0 {
        return Err(Error::InvalidParams("need at least one state".into()));
    }
    let probs = dirichlet(n, &mut ChaCha8Rng::seed_from_u64(seed));
    let mut pairs = Vec::with_capacity(n);
    for (k, p) in probs.into_iter().enumerate() {
        pairs.push((p, random_density(d, rank, sub_seed(seed, k as u64))?));
    }
    make_ensemble(pairs)
}

/// Flat-Dirichlet probability vector of length n.
pub fn random_probabilities(n: usize, seed: u64) -> Vec<f64> {
    dirichlet(n, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn dirichlet(n: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| Exp1.sample(rng)).collect();
    let s: f64 = w.iter().sum();
    w.into_iter().map(|x| x / s).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cptp_is_complete() {
        let k = random_cptp(3, 2, 3, 7).unwrap();
        let mut total = ComplexMatrix::zeros(3, 3);
        for op in &k {
            total += &op.adjoint().matmul(op);
        }
        assert!(total.max_diff(&ComplexMatrix::identity(3)) < 1e-10);
        assert!(random_cptp(3, 1, 2, 0).is_err());
    }

    #[test]
    fn rank_one_density_is_pure() {
        let r = random_density(2, 1, 11).unwrap();
        assert!((r.purity() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_density(3, 2, 5).unwrap(), random_density(3, 2, 5).unwrap());
        assert_ne!(random_density(3, 2, 5).unwrap(), random_density(3, 2, 6).unwrap());
        let a = random_measurement(2, 3, 9).unwrap();
        assert_eq!(a.len(), 3);
    }
}
