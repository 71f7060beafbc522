//! Seeded generators for test states, observables and rotations.
//!
//! Every generator owns a ChaCha8 stream seeded from its `seed` argument,
//! so outputs are reproducible bit-for-bit and calls share no state.

use nalgebra::DMatrix;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::{ComplexMatrix, DensityMatrix, Observable, C64};
use crate::error::{Error, Result};

pub(crate) fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// `rows x cols` matrix of i.i.d. standard complex Gaussians.
pub(crate) fn ginibre(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DMatrix<C64> {
    DMatrix::from_fn(rows, cols, |_, _| {
        let re = gaussian(rng);
        let im = gaussian(rng);
        C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// `G G^dagger / tr(G G^dagger)` with `G` an `n x rank` Ginibre matrix.
pub fn random_density(seed: u64, n: usize, rank: usize) -> Result<DensityMatrix> {
    if n == 0 || rank == 0 || rank > n {
        return Err(Error::Domain(format!("rank {rank} must lie in 1..={n}")));
    }
    let mut rng = rng(seed);
    let g = ginibre(&mut rng, n, rank);
    let w = &g * g.adjoint();
    let tr = w.trace().re;
    DensityMatrix::new(ComplexMatrix::new(w * C64::new(1.0 / tr, 0.0))?)
}

/// Full-rank random state.
pub fn random_mixed(seed: u64, n: usize) -> DensityMatrix {
    random_density(seed, n, n).expect("full rank is always in range")
}

/// Random pure state.
pub fn random_pure(seed: u64, n: usize) -> DensityMatrix {
    random_density(seed, n, 1).expect("rank one is always in range")
}

/// Haar-distributed unitary: QR of a Ginibre matrix with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary(seed: u64, n: usize) -> ComplexMatrix {
    let mut rng = rng(seed);
    let g = ginibre(&mut rng, n, n);
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        q.column_mut(j).iter_mut().for_each(|z| *z *= phase);
    }
    ComplexMatrix::new(q).expect("QR of a finite matrix is finite")
}

/// Haar-distributed real orthogonal matrix, by the same QR construction.
pub fn random_orthogonal(seed: u64, n: usize) -> DMatrix<f64> {
    let mut rng = rng(seed);
    let g = DMatrix::from_fn(n, n, |_, _| gaussian(&mut rng));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).iter_mut().for_each(|x| *x = -*x);
        }
    }
    q
}

/// GUE-like random observable `(G + G^dagger) / 2`.
pub fn random_observable(seed: u64, n: usize) -> Observable {
    let mut rng = rng(seed);
    let g = ginibre(&mut rng, n, n);
    let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    Observable::from_hermitian_unchecked(ComplexMatrix::new(h).expect("finite"))
}

/// Random pure-state vector of dimension `n`, normalized.
pub fn random_vector(seed: u64, n: usize) -> Vec<C64> {
    let mut rng = rng(seed);
    let g = ginibre(&mut rng, n, 1);
    let norm = g.norm();
    g.iter().map(|z| z / norm).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_one_is_pure() {
        for seed in 0..5 {
            let rho = random_density(seed, 4, 1).unwrap();
            assert!((rho.spectrum()[0] - 1.0).abs() <= 1e-12);
        }
    }

    #[test]
    fn full_rank_has_positive_spectrum() {
        let rho = random_density(3, 4, 4).unwrap();
        assert!(rho.spectrum().iter().all(|&l| l > 0.0));
    }

    #[test]
    fn spectral_rank_matches_requested_rank() {
        for rank in 1..=5 {
            let rho = random_density(11 + rank as u64, 5, rank).unwrap();
            let observed = rho.spectrum().iter().filter(|&&l| l > 1e-12).count();
            assert_eq!(observed, rank);
            assert!(rho.reconstruction_residual() <= 1e-9);
            assert!(rho.eigenvectors().unitarity_defect() <= 1e-9);
        }
    }

    #[test]
    fn rank_out_of_range_is_rejected() {
        assert!(matches!(random_density(0, 3, 0), Err(Error::Domain(_))));
        assert!(matches!(random_density(0, 3, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(random_density(9, 4, 2).unwrap().matrix(), random_density(9, 4, 2).unwrap().matrix());
        assert_eq!(haar_unitary(9, 4), haar_unitary(9, 4));
        assert_ne!(haar_unitary(9, 4), haar_unitary(10, 4));
    }

    #[test]
    fn haar_unitary_is_unitary() {
        let u1 = haar_unitary(5, 1);
        assert!((u1.get(0, 0).norm() - 1.0).abs() < 1e-15);
        for seed in 0..10 {
            assert!(haar_unitary(seed, 4).unitarity_defect() <= 1e-10);
        }
    }

    #[test]
    fn random_orthogonal_is_orthogonal() {
        let q = random_orthogonal(1, 9);
        let defect = (q.transpose() * &q - DMatrix::<f64>::identity(9, 9)).abs().max();
        assert!(defect <= 1e-12);
    }
}
