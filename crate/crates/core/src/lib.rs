//! Metric-adjusted skew information and the quantum uncertainty measures
//! built from it.
//!
//! - [`specfun`]: the catalog of regular operator-monotone functions and
//!   their scalar means.
//! - [`qstate`]: density matrices, observables, observable bases, partial
//!   traces and seeded random generators.
//! - [`measures`]: variance, `I^f(rho, H)`, the monotone metric `K^f_rho`,
//!   and `Q^f(rho)` by three independent routes.
//! - [`detect`]: correlation and entanglement detectors for bipartite states.
//! - [`cli`]: the command-line front end.

pub mod cli;
pub mod detect;
pub mod error;
pub mod measures;
pub mod numfmt;
pub mod qstate;
pub mod specfun;

pub use error::{Error, Result};
pub use specfun::MonotoneFunctionSpec;
