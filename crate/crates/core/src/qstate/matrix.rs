use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest tolerated `max |M - M^dagger|` entry before symmetrization.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Largest tolerated `|tr rho - 1|`.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues in `[-NEGATIVE_EIG_TOL, 0)` are clamped to zero.
pub const NEGATIVE_EIG_TOL: f64 = 1e-9;

/// Eigenvalues with magnitude below this are eigensolver noise on the
/// kernel and are set to exactly zero. The observed noise for unit-trace
/// states up to dimension 64 is below 5e-16.
pub const EIGENVALUE_FLOOR: f64 = 1e-14;

/// A trace already this close to one is left untouched, which keeps
/// re-reading a normalized state bit-exact.
const TRACE_ROUNDING: f64 = 1e-14;

pub type C64 = Complex64;

/// Dense square complex matrix with finite entries.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    pub fn new(inner: DMatrix<C64>) -> Result<Self> {
        if !inner.is_square() {
            return Err(Error::Domain(format!("matrix is {}x{}, expected square", inner.nrows(), inner.ncols())));
        }
        if inner.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(inner))
    }

    /// Builds an `n x n` matrix from `n^2` row-major entries.
    pub fn from_row_major(n: usize, entries: &[C64]) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        if entries.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, found: entries.len() });
        }
        Self::new(DMatrix::from_row_slice(n, n, entries))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self(DMatrix::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) }))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        Self(DMatrix::zeros(n, n))
    }

    /// `|a><b|`.
    pub fn outer(a: &[C64], b: &[C64]) -> Self {
        assert_eq!(a.len(), b.len());
        let n = a.len();
        Self(DMatrix::from_fn(n, n, |i, j| a[i] * b[j].conj()))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn as_inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    /// Entries in row-major order.
    pub fn row_major(&self) -> Vec<C64> {
        let n = self.dim();
        (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| self.0[(i, j)]).collect()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn trace(&self) -> C64 {
        self.0.trace()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(&self.0 * C64::new(s, 0.0))
    }

    pub fn scale_complex(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    /// `AB - BA`.
    pub fn commutator(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0 - &other.0 * &self.0)
    }

    /// Largest entry modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (&self.0 - &other.0).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    /// `max |U^dagger U - 1|`.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim()))
    }

    /// `tr(A B)`.
    pub fn trace_product(&self, other: &Self) -> C64 {
        let n = self.dim();
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.0[(i, k)] * other.0[(k, i)];
            }
        }
        acc
    }

    /// Kronecker product `self (x) other`.
    pub fn kron(&self, other: &Self) -> Self {
        Self(self.0.kronecker(&other.0))
    }

    /// `U^dagger self U`: the matrix expressed in the basis of U's columns.
    pub fn in_basis(&self, u: &Self) -> Self {
        Self(u.0.adjoint() * &self.0 * &u.0)
    }

    fn hermitian_part(&self) -> Self {
        Self((&self.0 + self.0.adjoint()) * C64::new(0.5, 0.0))
    }
}

impl<'a> Add<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl<'a> Sub<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl<'a> Mul<&'a ComplexMatrix> for &'a ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &'a ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

/// Kronecker product.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// A Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Observable {
    matrix: ComplexMatrix,
}

impl Observable {
    /// Accepts matrices Hermitian up to [`HERMITIAN_TOL`] and symmetrizes them.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermiticity_defect();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { matrix: matrix.hermitian_part() })
    }

    pub fn identity(n: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(n) }
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self { matrix: ComplexMatrix::from_real_diagonal(diag) }
    }

    pub fn pauli_x() -> Self {
        let (o, l) = (C64::new(0.0, 0.0), C64::new(1.0, 0.0));
        Self { matrix: ComplexMatrix::from_row_major(2, &[o, l, l, o]).unwrap() }
    }

    pub fn pauli_y() -> Self {
        let (o, i) = (C64::new(0.0, 0.0), C64::new(0.0, 1.0));
        Self { matrix: ComplexMatrix::from_row_major(2, &[o, -i, i, o]).unwrap() }
    }

    pub fn pauli_z() -> Self {
        Self::diagonal(&[1.0, -1.0])
    }

    /// Skips the Hermiticity check; callers guarantee exact Hermiticity.
    pub(crate) fn from_hermitian_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `U H U^dagger`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Self {
        let m = &(u * &self.matrix) * &u.adjoint();
        Self { matrix: m.hermitian_part() }
    }

    /// `H (x) 1_n`.
    pub fn extend_left(&self, n: usize) -> Self {
        Self { matrix: self.matrix.kron(&ComplexMatrix::identity(n)) }
    }

    /// `1_m (x) H`.
    pub fn extend_right(&self, m: usize) -> Self {
        Self { matrix: ComplexMatrix::identity(m).kron(&self.matrix) }
    }

    /// `A (x) 1 + 1 (x) B`.
    pub fn local_sum(a: &Observable, b: &Observable) -> Self {
        let l = a.extend_left(b.dim());
        let r = b.extend_right(a.dim());
        Self { matrix: &l.matrix + &r.matrix }
    }

    /// Linear combination with real coefficients.
    pub fn combine(terms: &[(f64, &Observable)]) -> Self {
        let n = terms.first().map(|(_, o)| o.dim()).unwrap_or(0);
        let mut acc = DMatrix::<C64>::zeros(n, n);
        for (c, o) in terms {
            acc += o.matrix.as_inner() * C64::new(*c, 0.0);
        }
        Self { matrix: ComplexMatrix(acc) }
    }
}

/// Eigendecomposition of a Hermitian matrix: eigenvalues ascending and the
/// matching orthonormal eigenvectors as columns.
pub fn eigh(m: &Observable) -> (Vec<f64>, ComplexMatrix) {
    let n = m.dim();
    let eig = SymmetricEigen::new(m.matrix.as_inner().clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, ComplexMatrix(vectors))
}

/// A quantum state: Hermitian, positive semidefinite, unit trace, with its
/// spectral decomposition computed once at construction.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    /// Descending, nonnegative, summing to one.
    spectrum: Vec<f64>,
    /// Column `k` is the eigenvector of `spectrum[k]`.
    eigenvectors: ComplexMatrix,
}

impl PartialEq for DensityMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.matrix == other.matrix
    }
}

impl DensityMatrix {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let deviation = matrix.hermiticity_defect();
        if deviation > HERMITIAN_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let mut matrix = matrix.hermitian_part();
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotUnitTrace { trace });
        }
        if (trace - 1.0).abs() > TRACE_ROUNDING {
            matrix = matrix.scale(1.0 / trace);
        }

        let (values, vectors) = eigh(&Observable::from_hermitian_unchecked(matrix.clone()));
        let n = values.len();
        let mut spectrum = Vec::with_capacity(n);
        let mut cols = Vec::with_capacity(n);
        for k in (0..n).rev() {
            let v = values[k];
            if v < -NEGATIVE_EIG_TOL {
                return Err(Error::NegativeEigenvalue { value: v });
            }
            spectrum.push(if v < EIGENVALUE_FLOOR { 0.0 } else { v });
            cols.push(k);
        }
        let total: f64 = spectrum.iter().sum();
        spectrum.iter_mut().for_each(|v| *v /= total);
        let eigenvectors = DMatrix::from_fn(n, n, |i, j| vectors.0[(i, cols[j])]);

        Ok(Self { matrix, spectrum, eigenvectors: ComplexMatrix(eigenvectors) })
    }

    /// `|psi><psi| / <psi|psi>`.
    pub fn pure(psi: &[C64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if !(norm2 > 0.0 && norm2.is_finite()) {
            return Err(Error::Domain("state vector must be nonzero and finite".into()));
        }
        Self::new(ComplexMatrix::outer(psi, psi).scale(1.0 / norm2))
    }

    /// `|k><k|` in dimension `n`.
    pub fn basis_state(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::Domain(format!("basis index {k} out of range for dimension {n}")));
        }
        let mut diag = vec![0.0; n];
        diag[k] = 1.0;
        Self::diagonal(&diag)
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        Self::diagonal(&vec![1.0 / n as f64; n])
    }

    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Domain("dimension must be positive".into()));
        }
        Self::new(ComplexMatrix::from_real_diagonal(probs))
    }

    /// Convex combination `sum_j w_j rho_j`. Weights must be nonnegative
    /// and sum to one.
    pub fn mixture(terms: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::Domain("empty mixture".into()))?;
        let n = first.1.dim();
        let mut acc = DMatrix::<C64>::zeros(n, n);
        for (w, rho) in terms {
            if rho.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: rho.dim() });
            }
            if w.is_nan() || *w < 0.0 {
                return Err(Error::Domain(format!("negative mixture weight {w}")));
            }
            acc += rho.matrix.as_inner() * C64::new(*w, 0.0);
        }
        Self::new(ComplexMatrix::new(acc)?)
    }

    /// `U rho U^dagger`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::new(&(u * &self.matrix) * &u.adjoint())
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn spectrum(&self) -> &[f64] {
        &self.spectrum
    }

    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    /// `V f(Lambda) V^dagger` over the cached decomposition.
    pub fn apply_spectral(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.dim();
        let v = self.eigenvectors.as_inner();
        let mut scaled = v.clone();
        for (k, lam) in self.spectrum.iter().enumerate() {
            let s = C64::new(f(*lam), 0.0);
            scaled.column_mut(k).iter_mut().for_each(|z| *z *= s);
        }
        let out = scaled * v.adjoint();
        debug_assert_eq!(out.nrows(), n);
        ComplexMatrix(out)
    }

    /// `max |rho - V Lambda V^dagger|`.
    pub fn reconstruction_residual(&self) -> f64 {
        self.apply_spectral(|x| x).max_abs_diff(&self.matrix)
    }

    /// `tr(rho H)`.
    pub fn expectation(&self, h: &Observable) -> Result<f64> {
        self.check_dim(h.dim())?;
        Ok(self.matrix.trace_product(h.matrix()).re)
    }

    pub fn purity(&self) -> f64 {
        self.spectrum.iter().map(|l| l * l).sum()
    }

    pub(crate) fn check_dim(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: n });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::random::{haar_unitary, random_observable};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn eigh_of_diagonal_sorts_and_permutes() {
        let (vals, vecs) = eigh(&Observable::diagonal(&[3.0, 1.0, 2.0]));
        assert_eq!(vals, vec![1.0, 2.0, 3.0]);
        // column k is a unit vector on the original position of vals[k]
        for (k, pos) in [1usize, 2, 0].iter().enumerate() {
            assert!((vecs.get(*pos, k).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn eigh_of_pauli_x() {
        let (vals, _) = eigh(&Observable::pauli_x());
        assert!((vals[0] + 1.0).abs() < 1e-14 && (vals[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn eigh_reconstructs_random_hermitian() {
        for seed in 0..10 {
            let h = random_observable(seed, 5);
            let (vals, v) = eigh(&h);
            assert!(vals.windows(2).all(|w| w[0] <= w[1]));
            let lam = ComplexMatrix::from_real_diagonal(&vals);
            let rebuilt = &(&v * &lam) * &v.adjoint();
            assert!(rebuilt.max_abs_diff(h.matrix()) <= 1e-9);
            assert!(v.unitarity_defect() <= 1e-9);
        }
    }

    #[test]
    fn observable_rejects_non_hermitian() {
        let m = ComplexMatrix::from_row_major(2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!(matches!(Observable::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn observable_symmetrizes_small_defects() {
        let m = ComplexMatrix::from_row_major(2, &[c(1.0, 1e-12), c(0.5, 0.0), c(0.5, 1e-12), c(0.0, 0.0)]).unwrap();
        let o = Observable::new(m).unwrap();
        assert_eq!(o.matrix().hermiticity_defect(), 0.0);
    }

    #[test]
    fn complex_matrix_rejects_non_finite() {
        let r = ComplexMatrix::from_row_major(1, &[c(f64::NAN, 0.0)]);
        assert!(matches!(r, Err(Error::NonFinite)));
        assert!(ComplexMatrix::from_row_major(2, &[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn tensor_examples() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(tensor(&i2, &i2), ComplexMatrix::identity(4));
        let z = Observable::pauli_z();
        let zi = tensor(z.matrix(), &i2);
        assert_eq!(zi, ComplexMatrix::from_real_diagonal(&[1.0, 1.0, -1.0, -1.0]));
    }

    #[test]
    fn tensor_mixed_product() {
        for seed in 0..5 {
            let a = random_observable(seed, 2);
            let b = random_observable(seed + 100, 2);
            let i2 = ComplexMatrix::identity(2);
            let lhs = &tensor(a.matrix(), &i2) * &tensor(&i2, b.matrix());
            assert!(lhs.max_abs_diff(&tensor(a.matrix(), b.matrix())) <= 1e-12);
        }
    }

    #[test]
    fn density_rejects_contract_violations() {
        let not_unit = ComplexMatrix::from_real_diagonal(&[0.5, 0.4]);
        assert!(matches!(DensityMatrix::new(not_unit), Err(Error::NotUnitTrace { .. })));
        let negative = ComplexMatrix::from_real_diagonal(&[1.1, -0.1]);
        assert!(matches!(DensityMatrix::new(negative), Err(Error::NegativeEigenvalue { .. })));
        let m = ComplexMatrix::from_row_major(2, &[c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)]).unwrap();
        assert!(matches!(DensityMatrix::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn density_clamps_tiny_negative_eigenvalues() {
        let m = ComplexMatrix::from_real_diagonal(&[1.0 + 5e-10, -5e-10]);
        let rho = DensityMatrix::new(m).unwrap();
        assert_eq!(rho.spectrum()[1], 0.0);
        assert!((rho.spectrum().iter().sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_spectrum_is_descending_and_reconstructs() {
        let rho = DensityMatrix::diagonal(&[0.2, 0.5, 0.3]).unwrap();
        assert_eq!(rho.spectrum(), &[0.5, 0.3, 0.2]);
        assert!(rho.reconstruction_residual() <= 1e-15);
        assert!(rho.eigenvectors().unitarity_defect() <= 1e-15);
    }

    #[test]
    fn conjugation_preserves_spectrum() {
        let rho = DensityMatrix::diagonal(&[0.6, 0.3, 0.1]).unwrap();
        let u = haar_unitary(7, 3);
        let r2 = rho.conjugate_by(&u).unwrap();
        for (a, b) in rho.spectrum().iter().zip(r2.spectrum()) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(r2.reconstruction_residual() <= 1e-9);
    }
}
