use nalgebra::DMatrix;

use super::matrix::{ComplexMatrix, DensityMatrix, C64};
use crate::error::{Error, Result};

/// Which factor a partial trace keeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// A state on `C^m (x) C^n`, with `|i>_a (x) |j>_b` stored at index `i n + j`.
#[derive(Clone, Debug, PartialEq)]
pub struct BipartiteState {
    dims: (usize, usize),
    state: DensityMatrix,
}

impl BipartiteState {
    pub fn new(state: DensityMatrix, m: usize, n: usize) -> Result<Self> {
        if m == 0 || n == 0 {
            return Err(Error::Domain("subsystem dimensions must be positive".into()));
        }
        if m * n != state.dim() {
            return Err(Error::DimensionMismatch { expected: m * n, found: state.dim() });
        }
        Ok(Self { dims: (m, n), state })
    }

    /// `rho_a (x) rho_b`.
    pub fn product(a: &DensityMatrix, b: &DensityMatrix) -> Result<Self> {
        let rho = DensityMatrix::new(a.matrix().kron(b.matrix()))?;
        Self::new(rho, a.dim(), b.dim())
    }

    /// Convex combination of states sharing the same factorization.
    pub fn mixture(terms: &[(f64, &BipartiteState)]) -> Result<Self> {
        let first = terms.first().ok_or_else(|| Error::Domain("empty mixture".into()))?;
        let dims = first.1.dims;
        if let Some((_, s)) = terms.iter().find(|(_, s)| s.dims != dims) {
            return Err(Error::DimensionMismatch { expected: dims.0 * dims.1, found: s.dims.0 * s.dims.1 });
        }
        let parts: Vec<(f64, &DensityMatrix)> = terms.iter().map(|(w, s)| (*w, &s.state)).collect();
        Self::new(DensityMatrix::mixture(&parts)?, dims.0, dims.1)
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn into_state(self) -> DensityMatrix {
        self.state
    }

    pub fn partial_trace(&self, keep: Subsystem) -> DensityMatrix {
        let (m, n) = self.dims;
        let rho = self.state.matrix().as_inner();
        let reduced = match keep {
            Subsystem::A => DMatrix::from_fn(m, m, |i, k| (0..n).map(|j| rho[(i * n + j, k * n + j)]).sum::<C64>()),
            Subsystem::B => DMatrix::from_fn(n, n, |j, l| (0..m).map(|i| rho[(i * n + j, i * n + l)]).sum::<C64>()),
        };
        let reduced = ComplexMatrix::new(reduced).expect("finite");
        DensityMatrix::new(reduced).expect("partial trace of a state is a state")
    }
}

/// `|Omega> = sum_i |ii> / sqrt(d)`.
pub fn maximally_entangled_vector(d: usize) -> Vec<C64> {
    let amp = C64::new(1.0 / (d as f64).sqrt(), 0.0);
    let mut v = vec![C64::new(0.0, 0.0); d * d];
    for i in 0..d {
        v[i * d + i] = amp;
    }
    v
}
