//! Dense complex Hermitian linear algebra: states, observables, observable
//! bases, bipartite structure and seeded random generators.

mod basis;
mod bipartite;
pub mod io;
mod matrix;
pub mod random;

pub use basis::{
    eigen_adapted_basis, gell_mann_basis, matrix_unit_basis, rotate_basis, HermitianBasis, ORTHONORMAL_TOL,
};
pub use bipartite::{maximally_entangled_vector, BipartiteState, Subsystem};
pub use matrix::{
    eigh, tensor, ComplexMatrix, DensityMatrix, Observable, C64, EIGENVALUE_FLOOR, HERMITIAN_TOL, NEGATIVE_EIG_TOL,
    TRACE_TOL,
};
pub use random::{haar_unitary, random_density};
