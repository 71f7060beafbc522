//! Variance, metric-adjusted skew information, the monotone metric and the
//! total uncertainty `Q^f`, evaluated through the cached eigendecomposition
//! of the state.
//!
//! In the eigenbasis `{phi_k}` of `rho` with eigenvalues `lambda_k`, the
//! superoperator `m^f(L_rho, R_rho)` acts on entry `(k, l)` as multiplication
//! by `m^f(lambda_k, lambda_l)`, so
//!
//! ```text
//! I^f(rho, H) = f(0)/2 sum_{k,l} (lambda_k - lambda_l)^2 / m^f(lambda_k, lambda_l) |<phi_k|H|phi_l>|^2
//! ```
//!
//! Pairs with `lambda_k == lambda_l` contribute zero.

use crate::error::{Error, Result};
use crate::qstate::{gell_mann_basis, matrix_unit_basis, ComplexMatrix, DensityMatrix, HermitianBasis, Observable};
use crate::specfun::MonotoneFunctionSpec;

/// Eigenbasis entries above this magnitude on the kernel of `m^f(L, R)`
/// make the monotone metric undefined.
pub const KERNEL_TOL: f64 = 1e-10;

/// `(f(0)/2) (x - y)^2 / m(x, y)`, zero when `x == y`.
#[inline]
fn pair_weight(f0: f64, x: f64, y: f64, mean: &impl Fn(f64, f64) -> f64) -> f64 {
    if x == y {
        0.0
    } else {
        let d = x - y;
        0.5 * f0 * d * d / mean(x, y)
    }
}

/// The superoperator `m^f(L_rho, R_rho)` of a state in diagonal form.
#[derive(Clone, Debug)]
pub struct MeanSuperoperatorContext<'a> {
    rho: &'a DensityMatrix,
    spec: MonotoneFunctionSpec,
    /// Row-major `n x n` table of `(f(0)/2)(lambda_k - lambda_l)^2 / m^f(lambda_k, lambda_l)`.
    weights: Vec<f64>,
}

impl<'a> MeanSuperoperatorContext<'a> {
    pub fn new(spec: MonotoneFunctionSpec, rho: &'a DensityMatrix) -> Self {
        let lam = rho.spectrum();
        let n = lam.len();
        let f0 = spec.f_zero();
        let mean = |x, y| spec.mean(x, y);
        let mut weights = vec![0.0; n * n];
        for k in 0..n {
            for l in 0..n {
                weights[k * n + l] = pair_weight(f0, lam[k], lam[l], &mean);
            }
        }
        Self { rho, spec, weights }
    }

    pub fn spec(&self) -> MonotoneFunctionSpec {
        self.spec
    }

    pub fn state(&self) -> &DensityMatrix {
        self.rho
    }

    /// `I^f(rho, H)`.
    pub fn skew_information(&self, h: &Observable) -> Result<f64> {
        self.rho.check_dim(h.dim())?;
        let n = self.rho.dim();
        let ht = h.matrix().in_basis(self.rho.eigenvectors());
        let mut acc = 0.0;
        for k in 0..n {
            for l in 0..n {
                let w = self.weights[k * n + l];
                if w != 0.0 {
                    acc += w * ht.get(k, l).norm_sqr();
                }
            }
        }
        Ok(acc)
    }

    /// `K^f_rho(A, B) = (f(0)/2) tr A [m^f(L_rho, R_rho)]^{-1} B`, real part.
    pub fn monotone_metric(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
        self.rho.check_dim(a.dim())?;
        self.rho.check_dim(b.dim())?;
        let v = self.rho.eigenvectors();
        let (at, bt) = (a.in_basis(v), b.in_basis(v));
        let lam = self.rho.spectrum();
        let n = lam.len();
        let f0 = self.spec.f_zero();
        let mut acc = 0.0;
        for k in 0..n {
            for l in 0..n {
                let m = self.spec.mean(lam[k], lam[l]);
                let (akl, alk, bkl) = (at.get(k, l), at.get(l, k), bt.get(k, l));
                if m == 0.0 {
                    let magnitude = akl.norm().max(alk.norm()).max(bkl.norm());
                    if magnitude > KERNEL_TOL {
                        return Err(Error::KernelSupport { magnitude });
                    }
                    continue;
                }
                acc += (alk * bkl).re / m;
            }
        }
        Ok(0.5 * f0 * acc)
    }
}

/// `V(rho, H) = tr rho H^2 - (tr rho H)^2`, clamped at zero.
pub fn variance(rho: &DensityMatrix, h: &Observable) -> Result<f64> {
    rho.check_dim(h.dim())?;
    let h2 = h.matrix() * h.matrix();
    let second = rho.matrix().trace_product(&h2).re;
    let first = rho.matrix().trace_product(h.matrix()).re;
    Ok((second - first * first).max(0.0))
}

pub fn skew_information(spec: MonotoneFunctionSpec, rho: &DensityMatrix, h: &Observable) -> Result<f64> {
    MeanSuperoperatorContext::new(spec, rho).skew_information(h)
}

pub fn monotone_metric(
    spec: MonotoneFunctionSpec,
    rho: &DensityMatrix,
    a: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<f64> {
    MeanSuperoperatorContext::new(spec, rho).monotone_metric(a, b)
}

/// `i[rho, H]`, the tangent vector whose metric length is `I^f(rho, H)`.
pub fn commutator_tangent(rho: &DensityMatrix, h: &Observable) -> ComplexMatrix {
    rho.matrix().commutator(h.matrix()).scale_complex(crate::qstate::C64::new(0.0, 1.0))
}

/// `Q^f(rho) = sum_j I^f(rho, H_j)` over an orthonormal observable basis.
pub fn q_uncertainty_basis(spec: MonotoneFunctionSpec, rho: &DensityMatrix, basis: &HermitianBasis) -> Result<f64> {
    if basis.dim() != rho.dim() {
        return Err(Error::DimensionMismatch { expected: rho.dim(), found: basis.dim() });
    }
    let ctx = MeanSuperoperatorContext::new(spec, rho);
    basis.iter().map(|h| ctx.skew_information(h)).sum()
}

pub(crate) fn spectral_sum(spectrum: &[f64], f0: f64, mean: impl Fn(f64, f64) -> f64) -> f64 {
    let mut acc = 0.0;
    for (k, &x) in spectrum.iter().enumerate() {
        for &y in &spectrum[k + 1..] {
            acc += pair_weight(f0, x, y, &mean);
        }
    }
    2.0 * acc
}

/// `Q^f(rho) = f(0)/2 sum_{k,l} (lambda_k - lambda_l)^2 / m^f(lambda_k, lambda_l)`.
pub fn q_uncertainty_spectral(spec: MonotoneFunctionSpec, rho: &DensityMatrix) -> f64 {
    spectral_sum(rho.spectrum(), spec.f_zero(), |x, y| spec.mean(x, y))
}

/// `Q^f(rho) = sum_{k,l} [m_a(lambda_k, lambda_l) - m^{f~}(lambda_k, lambda_l)]`.
pub fn q_uncertainty_tilde(spec: MonotoneFunctionSpec, rho: &DensityMatrix) -> f64 {
    let lam = rho.spectrum();
    let mut acc = 0.0;
    for (k, &x) in lam.iter().enumerate() {
        for &y in &lam[k + 1..] {
            if x != y {
                acc += 0.5 * (x + y) - spec.tilde_mean(x, y);
            }
        }
    }
    2.0 * acc
}

/// `Q^WY(rho) = n - (tr sqrt(rho))^2`.
pub fn qwy_closed_form(rho: &DensityMatrix) -> f64 {
    let s: f64 = rho.spectrum().iter().map(|l| l.sqrt()).sum();
    rho.dim() as f64 - s * s
}

/// `S(rho) = -tr rho ln rho` with `0 ln 0 = 0`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    rho.spectrum().iter().filter(|&&l| l > 0.0).map(|&l| -l * l.ln()).sum::<f64>().max(0.0)
}

/// `U(rho) = n - tr rho^2`.
pub fn total_variance(rho: &DensityMatrix) -> f64 {
    rho.dim() as f64 - rho.purity()
}

/// Default observable basis for a dimension: Gell-Mann for `n >= 2`.
pub fn default_basis(n: usize) -> Result<HermitianBasis> {
    gell_mann_basis(n).or_else(|_| matrix_unit_basis(n))
}

/// `Q^f` by all three routes.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QRoutes {
    pub basis: f64,
    pub spectral: f64,
    pub tilde: f64,
}

impl QRoutes {
    pub fn compute(spec: MonotoneFunctionSpec, rho: &DensityMatrix) -> Result<Self> {
        let basis = default_basis(rho.dim())?;
        Ok(Self {
            basis: q_uncertainty_basis(spec, rho, &basis)?,
            spectral: q_uncertainty_spectral(spec, rho),
            tilde: q_uncertainty_tilde(spec, rho),
        })
    }

    pub fn max_deviation(&self) -> f64 {
        let d1 = (self.basis - self.spectral).abs();
        let d2 = (self.basis - self.tilde).abs();
        let d3 = (self.spectral - self.tilde).abs();
        d1.max(d2).max(d3)
    }
}
