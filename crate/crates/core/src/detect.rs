//! Correlation and entanglement detectors for bipartite states.
//!
//! For a state on `C^m (x) C^n` with local observable bases `{A_j}`, `{B_j}`:
//!
//! ```text
//! F_bar = sum_j I^f(rho_ab, A_j (x) 1) - sum_j I^f(rho_a, A_j)
//! F_hat = sum_j I^f(rho_ab, A_j (x) 1 + 1 (x) B_j)          (m = n)
//! V_hat = sum_j V(rho_ab, A_j (x) 1 + 1 (x) B_j)            (m = n)
//! ```
//!
//! `F_bar` vanishes exactly on product states. Separable states satisfy
//! `F_hat <= 2m - 2` and `V_hat >= 2m - 2`, so crossing either threshold
//! certifies entanglement. Both criteria are sufficient only.
//!
//! `F_hat` and `V_hat` pair `A_j` with `B_j`; they are invariant when both
//! bases are rotated by the same orthogonal matrix.

use std::fmt;

use rand::{Rng, RngCore};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{default_basis, q_uncertainty_basis, variance, MeanSuperoperatorContext};
use crate::qstate::random::{random_density, rng};
use crate::qstate::{
    maximally_entangled_vector, BipartiteState, ComplexMatrix, DensityMatrix, HermitianBasis, Observable, Subsystem,
};
use crate::specfun::MonotoneFunctionSpec;

/// Guard band around the `2m - 2` thresholds.
pub const THRESHOLD_GUARD: f64 = 1e-8;
/// `F_bar` above this reports the state as correlated.
pub const CORRELATION_THRESHOLD: f64 = 1e-6;
/// Negative `F_bar` within this band is reported as zero.
pub const F_BAR_ZERO_BAND: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureName {
    FBar,
    FHat,
    VHat,
}

impl fmt::Display for MeasureName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeasureName::FBar => "f_bar",
            MeasureName::FHat => "f_hat",
            MeasureName::VHat => "v_hat",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Entangled,
    Correlated,
    Product,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Entangled => "entangled",
            Verdict::Correlated => "correlated",
            Verdict::Product => "product",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One detector evaluated on one state.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureReport {
    pub measure_name: MeasureName,
    /// Function identifier, or `"variance"` for `V_hat`.
    pub spec_name: String,
    pub value: f64,
    pub threshold: f64,
    pub verdict: Verdict,
}

impl MeasureReport {
    pub fn f_bar(spec: MonotoneFunctionSpec, raw: f64) -> Self {
        let value = if (-F_BAR_ZERO_BAND..0.0).contains(&raw) { 0.0 } else { raw };
        let verdict = if value > CORRELATION_THRESHOLD { Verdict::Correlated } else { Verdict::Product };
        Self { measure_name: MeasureName::FBar, spec_name: spec.to_string(), value, threshold: 0.0, verdict }
    }

    pub fn f_hat(spec: MonotoneFunctionSpec, value: f64, m: usize) -> Self {
        let threshold = separability_threshold(m);
        let verdict = if value > threshold + THRESHOLD_GUARD { Verdict::Entangled } else { Verdict::Inconclusive };
        Self { measure_name: MeasureName::FHat, spec_name: spec.to_string(), value, threshold, verdict }
    }

    pub fn v_hat(value: f64, m: usize) -> Self {
        let threshold = separability_threshold(m);
        let verdict = if value < threshold - THRESHOLD_GUARD { Verdict::Entangled } else { Verdict::Inconclusive };
        Self { measure_name: MeasureName::VHat, spec_name: "variance".into(), value, threshold, verdict }
    }
}

/// All detectors evaluated on one state, with a combined verdict.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DetectionReport {
    pub dims: (usize, usize),
    pub spec_name: String,
    /// `2m - 2` when `m = n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<f64>,
    pub measures: Vec<MeasureReport>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl DetectionReport {
    pub fn measure(&self, name: MeasureName) -> Option<&MeasureReport> {
        self.measures.iter().find(|r| r.measure_name == name)
    }

    pub fn value(&self, name: MeasureName) -> Option<f64> {
        self.measure(name).map(|r| r.value)
    }
}

/// `2m - 2`.
pub fn separability_threshold(m: usize) -> f64 {
    2.0 * m as f64 - 2.0
}

fn require_square(state: &BipartiteState) -> Result<usize> {
    let (m, n) = state.dims();
    if m != n {
        return Err(Error::Domain(format!("F_hat and V_hat need equal subsystem dimensions, got {m}x{n}")));
    }
    Ok(m)
}

fn check_basis(basis: &HermitianBasis, dim: usize) -> Result<()> {
    if basis.dim() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: basis.dim() });
    }
    Ok(())
}

pub fn f_bar_with_basis(spec: MonotoneFunctionSpec, state: &BipartiteState, basis_a: &HermitianBasis) -> Result<f64> {
    let (m, n) = state.dims();
    check_basis(basis_a, m)?;
    let ctx = MeanSuperoperatorContext::new(spec, state.state());
    let mut joint = 0.0;
    for a in basis_a {
        joint += ctx.skew_information(&a.extend_left(n))?;
    }
    let local = q_uncertainty_basis(spec, &state.partial_trace(Subsystem::A), basis_a)?;
    Ok(joint - local)
}

/// `F_bar` over the Gell-Mann basis of the first factor.
pub fn f_bar(spec: MonotoneFunctionSpec, state: &BipartiteState) -> Result<f64> {
    f_bar_with_basis(spec, state, &default_basis(state.dims().0)?)
}

fn local_sums(a: &HermitianBasis, b: &HermitianBasis) -> Vec<Observable> {
    a.iter().zip(b.iter()).map(|(x, y)| Observable::local_sum(x, y)).collect()
}

pub fn f_hat_with_bases(
    spec: MonotoneFunctionSpec,
    state: &BipartiteState,
    basis_a: &HermitianBasis,
    basis_b: &HermitianBasis,
) -> Result<f64> {
    let m = require_square(state)?;
    check_basis(basis_a, m)?;
    check_basis(basis_b, m)?;
    let ctx = MeanSuperoperatorContext::new(spec, state.state());
    local_sums(basis_a, basis_b).iter().map(|x| ctx.skew_information(x)).sum()
}

/// `F_hat` with `A_j = B_j` the Gell-Mann basis.
pub fn f_hat(spec: MonotoneFunctionSpec, state: &BipartiteState) -> Result<f64> {
    let m = require_square(state)?;
    let basis = default_basis(m)?;
    f_hat_with_bases(spec, state, &basis, &basis)
}

pub fn v_hat_with_bases(state: &BipartiteState, basis_a: &HermitianBasis, basis_b: &HermitianBasis) -> Result<f64> {
    let m = require_square(state)?;
    check_basis(basis_a, m)?;
    check_basis(basis_b, m)?;
    local_sums(basis_a, basis_b).iter().map(|x| variance(state.state(), x)).sum()
}

/// `V_hat` with `A_j = B_j` the Gell-Mann basis.
pub fn v_hat(state: &BipartiteState) -> Result<f64> {
    let m = require_square(state)?;
    let basis = default_basis(m)?;
    v_hat_with_bases(state, &basis, &basis)
}

/// `(1 - p) 1/d^2 + p |Omega><Omega|`.
pub fn isotropic_state(p: f64, d: usize) -> Result<BipartiteState> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("mixing parameter p = {p} outside [0, 1]")));
    }
    if d < 2 {
        return Err(Error::Domain(format!("isotropic state needs d >= 2, got {d}")));
    }
    let omega = maximally_entangled_vector(d);
    let proj = ComplexMatrix::outer(&omega, &omega);
    let noise = ComplexMatrix::identity(d * d).scale((1.0 - p) / (d * d) as f64);
    let rho = DensityMatrix::new(&noise + &proj.scale(p))?;
    BipartiteState::new(rho, d, d)
}

/// `F_hat` of the `d = 3` isotropic state in closed form:
/// `(20/3) f(0) p^2 / m^f(1/9 + 8p/9, 1/9 - p/9)`.
pub fn f_hat_isotropic_closed_form(spec: MonotoneFunctionSpec, p: f64, d: usize) -> Result<f64> {
    if d != 3 {
        return Err(Error::Unsupported(format!("closed form is only available for d = 3, got d = {d}")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::Domain(format!("mixing parameter p = {p} outside [0, 1]")));
    }
    if p == 0.0 {
        return Ok(0.0);
    }
    let top = 1.0 / 9.0 + 8.0 * p / 9.0;
    let rest = 1.0 / 9.0 - p / 9.0;
    Ok(20.0 / 3.0 * spec.f_zero() * p * p / spec.mean(top, rest))
}

/// `V_hat` of the `d = 3` isotropic state: `16/3 + 4p/3`.
pub fn v_hat_isotropic_closed_form(p: f64) -> f64 {
    16.0 / 3.0 + 4.0 * p / 3.0
}

/// `sum_j p_j |j><j| (x) rho_j`.
pub fn classical_quantum_state(probs: &[f64], branch_states: &[DensityMatrix]) -> Result<BipartiteState> {
    if probs.is_empty() || probs.len() != branch_states.len() {
        return Err(Error::Domain(format!("{} probabilities for {} branch states", probs.len(), branch_states.len())));
    }
    if probs.iter().any(|&p| p.is_nan() || p < 0.0) || (probs.iter().sum::<f64>() - 1.0).abs() > 1e-10 {
        return Err(Error::Domain("branch probabilities must be nonnegative and sum to 1".into()));
    }
    let n = branch_states[0].dim();
    if let Some(s) = branch_states.iter().find(|s| s.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: s.dim() });
    }
    let m = probs.len();
    let mut acc = ComplexMatrix::zeros(m * n);
    for (j, (p, rho)) in probs.iter().zip(branch_states).enumerate() {
        let mut proj = vec![0.0; m];
        proj[j] = 1.0;
        let term = ComplexMatrix::from_real_diagonal(&proj).kron(rho.matrix()).scale(*p);
        acc = &acc + &term;
    }
    BipartiteState::new(DensityMatrix::new(acc)?, m, n)
}

/// Product of two seeded random states of random rank.
pub fn random_product_state(seed: u64, m: usize, n: usize) -> BipartiteState {
    let mut r = rng(seed);
    let ra = r.random_range(1..=m);
    let rb = r.random_range(1..=n);
    let a = random_density(r.next_u64(), m, ra).expect("rank in range");
    let b = random_density(r.next_u64(), n, rb).expect("rank in range");
    BipartiteState::product(&a, &b).expect("product of states")
}

/// `sum_j w_j rho^a_j (x) rho^b_j` with 2 to 5 terms, weights from
/// normalized uniforms and Ginibre factors of random rank.
pub fn random_separable_state(seed: u64, m: usize, n: usize) -> BipartiteState {
    let mut r = rng(seed);
    let k = r.random_range(2..=5);
    let raw: Vec<f64> = (0..k).map(|_| r.random::<f64>() + 1e-3).collect();
    let total: f64 = raw.iter().sum();
    let terms: Vec<BipartiteState> = (0..k).map(|_| random_product_state(r.next_u64(), m, n)).collect();
    let weighted: Vec<(f64, &BipartiteState)> = raw.iter().map(|w| w / total).zip(terms.iter()).collect();
    BipartiteState::mixture(&weighted).expect("mixture of states")
}

/// The `F_hat` / `V_hat` entanglement test. Requires `m = n`.
pub fn detect_entanglement(spec: MonotoneFunctionSpec, state: &BipartiteState) -> Result<DetectionReport> {
    let m = require_square(state)?;
    let fh = MeasureReport::f_hat(spec, f_hat(spec, state)?, m);
    let vh = MeasureReport::v_hat(v_hat(state)?, m);
    let verdict = if fh.verdict == Verdict::Entangled || vh.verdict == Verdict::Entangled {
        Verdict::Entangled
    } else {
        Verdict::Inconclusive
    };
    Ok(DetectionReport {
        dims: state.dims(),
        spec_name: spec.to_string(),
        threshold: Some(separability_threshold(m)),
        measures: vec![fh, vh],
        verdict,
        note: None,
    })
}

/// Every applicable detector. The combined verdict is `entangled` if an
/// entanglement criterion fires, else `correlated` or `product` from `F_bar`.
pub fn analyze(spec: MonotoneFunctionSpec, state: &BipartiteState) -> Result<DetectionReport> {
    let (m, n) = state.dims();
    let fb = MeasureReport::f_bar(spec, f_bar(spec, state)?);
    let fb_verdict = fb.verdict;
    if m != n {
        return Ok(DetectionReport {
            dims: (m, n),
            spec_name: spec.to_string(),
            threshold: None,
            measures: vec![fb],
            verdict: fb_verdict,
            note: Some(format!("f_hat and v_hat omitted: they are defined only for m = n (got {m}x{n})")),
        });
    }
    let mut report = detect_entanglement(spec, state)?;
    report.measures.insert(0, fb);
    if report.verdict != Verdict::Entangled {
        report.verdict = fb_verdict;
    }
    Ok(report)
}
