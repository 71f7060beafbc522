//! Orthonormal bases of the real Hilbert space of Hermitian matrices under
//! `<A, B> = tr(A B)`.

use nalgebra::DMatrix;

use super::matrix::{ComplexMatrix, DensityMatrix, Observable, C64};
use super::random::random_orthogonal;
use crate::error::{Error, Result};

/// Largest tolerated `|tr(H_i H_j) - delta_ij|`.
pub const ORTHONORMAL_TOL: f64 = 1e-9;

/// `n^2` trace-orthonormal Hermitian matrices of dimension `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianBasis {
    dim: usize,
    elements: Vec<Observable>,
}

impl HermitianBasis {
    pub fn new(elements: Vec<Observable>) -> Result<Self> {
        let dim = elements.first().map(Observable::dim).ok_or_else(|| Error::Domain("empty basis".into()))?;
        if elements.len() != dim * dim {
            return Err(Error::DimensionMismatch { expected: dim * dim, found: elements.len() });
        }
        if let Some(e) = elements.iter().find(|e| e.dim() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: e.dim() });
        }
        let basis = Self { dim, elements };
        let residual = basis.orthonormality_residual();
        if residual > ORTHONORMAL_TOL {
            return Err(Error::Domain(format!("basis is not orthonormal (residual {residual:e})")));
        }
        Ok(basis)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn elements(&self) -> &[Observable] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Observable> {
        self.elements.iter()
    }

    /// Gram matrix `G_ij = tr(H_i H_j)`.
    pub fn gram(&self) -> DMatrix<f64> {
        let k = self.elements.len();
        DMatrix::from_fn(k, k, |i, j| self.elements[i].matrix().trace_product(self.elements[j].matrix()).re)
    }

    /// `max |tr(H_i H_j) - delta_ij|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let k = self.elements.len();
        (self.gram() - DMatrix::<f64>::identity(k, k)).abs().max()
    }

    /// Coefficients `tr(M H_j)` of a Hermitian matrix in this basis.
    pub fn coefficients(&self, m: &Observable) -> Result<Vec<f64>> {
        if m.dim() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: m.dim() });
        }
        Ok(self.elements.iter().map(|h| m.matrix().trace_product(h.matrix()).re).collect())
    }

    /// `sum_j c_j H_j`.
    pub fn expand(&self, coefficients: &[f64]) -> Observable {
        let terms: Vec<(f64, &Observable)> = coefficients.iter().copied().zip(&self.elements).collect();
        Observable::combine(&terms)
    }

    /// `K_i = sum_j a_ij H_j` for a real orthogonal `a`.
    pub fn rotate_with(&self, a: &DMatrix<f64>) -> Result<Self> {
        let k = self.elements.len();
        if a.nrows() != k || a.ncols() != k {
            return Err(Error::DimensionMismatch { expected: k, found: a.nrows() });
        }
        let elements = (0..k)
            .map(|i| {
                let row: Vec<f64> = (0..k).map(|j| a[(i, j)]).collect();
                self.expand(&row)
            })
            .collect();
        Self::new(elements)
    }
}

impl<'a> IntoIterator for &'a HermitianBasis {
    type Item = &'a Observable;
    type IntoIter = std::slice::Iter<'a, Observable>;
    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

fn unit(n: usize, i: usize, j: usize, z: C64) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(n, n);
    m[(i, j)] = z;
    m
}

fn observable(m: DMatrix<C64>) -> Observable {
    Observable::from_hermitian_unchecked(ComplexMatrix::new(m).expect("finite"))
}

/// Normalized generalized Gell-Mann basis, ordered as: `1/sqrt(n)`, the
/// symmetric off-diagonal elements, the antisymmetric ones (both over pairs
/// `j < k` in lexicographic order), then the traceless diagonal ones.
///
/// For `n = 2` this is `{1, sx, sy, sz} / sqrt(2)`.
pub fn gell_mann_basis(n: usize) -> Result<HermitianBasis> {
    if n < 2 {
        return Err(Error::Domain(format!("Gell-Mann basis needs n >= 2, got {n}")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    out.push(observable(DMatrix::identity(n, n) * C64::new(1.0 / (n as f64).sqrt(), 0.0)));
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (j + 1..n).map(move |k| (j, k))).collect();
    for &(j, k) in &pairs {
        out.push(observable(unit(n, j, k, C64::new(s, 0.0)) + unit(n, k, j, C64::new(s, 0.0))));
    }
    for &(j, k) in &pairs {
        out.push(observable(unit(n, j, k, C64::new(0.0, -s)) + unit(n, k, j, C64::new(0.0, s))));
    }
    for l in 1..n {
        let c = 1.0 / ((l * (l + 1)) as f64).sqrt();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..l {
            m[(j, j)] = C64::new(c, 0.0);
        }
        m[(l, l)] = C64::new(-(l as f64) * c, 0.0);
        out.push(observable(m));
    }
    HermitianBasis::new(out)
}

/// Basis built from orthonormal columns `phi_j` of `v`: the projectors
/// `|phi_j><phi_j|`, then `(|phi_k><phi_j| + |phi_j><phi_k|)/sqrt(2)` and
/// `i(|phi_k><phi_j| - |phi_j><phi_k|)/sqrt(2)` for `k < j`.
fn adapted_to(v: &ComplexMatrix) -> Result<HermitianBasis> {
    let n = v.dim();
    let cols: Vec<Vec<C64>> = (0..n).map(|j| (0..n).map(|i| v.get(i, j)).collect()).collect();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    for c in &cols {
        out.push(ComplexMatrix::outer(c, c));
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|k| (k + 1..n).map(move |j| (k, j))).collect();
    for &(k, j) in &pairs {
        let kj = ComplexMatrix::outer(&cols[k], &cols[j]);
        out.push((&kj + &kj.adjoint()).scale(s));
    }
    for &(k, j) in &pairs {
        let kj = ComplexMatrix::outer(&cols[k], &cols[j]);
        out.push((&kj - &kj.adjoint()).scale_complex(C64::new(0.0, s)));
    }
    HermitianBasis::new(out.into_iter().map(Observable::new).collect::<Result<_>>()?)
}

/// The eigenbasis-adapted basis of `rho`, built from its cached eigenvectors.
pub fn eigen_adapted_basis(rho: &DensityMatrix) -> Result<HermitianBasis> {
    adapted_to(rho.eigenvectors())
}

/// Matrix-unit basis `{|j><j|} U {(|k><j| + |j><k|)/sqrt 2} U {i(|k><j| - |j><k|)/sqrt 2}`
/// in the computational basis.
pub fn matrix_unit_basis(n: usize) -> Result<HermitianBasis> {
    if n < 1 {
        return Err(Error::Domain("dimension must be positive".into()));
    }
    adapted_to(&ComplexMatrix::identity(n))
}

/// Applies a seeded Haar-random `n^2 x n^2` orthogonal matrix to `basis`.
pub fn rotate_basis(basis: &HermitianBasis, seed: u64) -> HermitianBasis {
    let a = random_orthogonal(seed, basis.len());
    basis.rotate_with(&a).expect("orthogonal rotation of a valid basis")
}
