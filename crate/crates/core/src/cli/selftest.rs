//! Built-in property suites, run from a single seed.
//!
//! Every check records a nonnegative residual against a tolerance. A suite
//! fails if any residual exceeds its tolerance. The report holds no timings,
//! so the same seed always prints the same text.

use std::fmt;

use rand::{Rng, RngCore};
use rand_chacha::ChaCha8Rng;

use crate::detect::{
    classical_quantum_state, f_bar, f_hat, f_hat_isotropic_closed_form, isotropic_state, random_product_state,
    random_separable_state, separability_threshold, v_hat, v_hat_isotropic_closed_form,
};
use crate::measures::{
    q_uncertainty_basis, q_uncertainty_spectral, q_uncertainty_tilde, qwy_closed_form, skew_information, spectral_sum,
    variance,
};
use crate::numfmt::fmt_f64;
use crate::qstate::io::{density_to_json, parse_density};
use crate::qstate::random::{haar_unitary, random_density, random_mixed, random_observable, random_pure, rng};
use crate::qstate::{
    eigen_adapted_basis, gell_mann_basis, rotate_basis, BipartiteState, DensityMatrix, Observable, Subsystem,
};
use crate::specfun::MonotoneFunctionSpec;

/// Deliberate defects for exercising the failure path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Fault {
    /// Scale the operator mean by 1.05 in the spectral route.
    BrokenMean,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SuiteReport {
    pub name: &'static str,
    pub checks: usize,
    pub failures: usize,
    pub worst_residual: f64,
    /// Largest residual / tolerance. Infinite when a zero-tolerance check fails.
    pub worst_ratio: f64,
}

impl SuiteReport {
    fn new(name: &'static str) -> Self {
        Self { name, checks: 0, failures: 0, worst_residual: 0.0, worst_ratio: 0.0 }
    }

    fn check(&mut self, residual: f64, tol: f64) {
        self.checks += 1;
        let residual = if residual.is_nan() { f64::INFINITY } else { residual };
        if residual > tol {
            self.failures += 1;
        }
        let ratio = if residual == 0.0 {
            0.0
        } else if tol == 0.0 {
            f64::INFINITY
        } else {
            residual / tol
        };
        self.worst_residual = self.worst_residual.max(residual);
        self.worst_ratio = self.worst_ratio.max(ratio);
    }

    /// Checks `|a - b| <= tol`.
    fn close(&mut self, a: f64, b: f64, tol: f64) {
        self.check((a - b).abs(), tol);
    }

    /// Checks `a <= b + tol`.
    fn at_most(&mut self, a: f64, b: f64, tol: f64) {
        self.check((a - b).max(0.0), tol);
    }

    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelftestReport {
    pub seed: u64,
    pub fault: Option<Fault>,
    pub suites: Vec<SuiteReport>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(SuiteReport::passed)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "selftest seed {}", self.seed)?;
        if let Some(fault) = self.fault {
            writeln!(f, "injected fault: {fault:?}")?;
        }
        writeln!(
            f,
            "{:<10} {:>7} {:>9} {:>15} {:>12}",
            "suite", "checks", "failures", "worst_residual", "worst_ratio"
        )?;
        for s in &self.suites {
            writeln!(
                f,
                "{:<10} {:>7} {:>9} {:>15.3e} {:>12.3e}",
                s.name, s.checks, s.failures, s.worst_residual, s.worst_ratio
            )?;
        }
        writeln!(f, "result: {}", if self.passed() { "pass" } else { "FAIL" })
    }
}

fn log_uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    10f64.powf(r.random_range(lo..hi))
}

fn random_state(r: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let rank = r.random_range(1..=n);
    random_density(r.next_u64(), n, rank).expect("rank in range")
}

fn specs_with_random_alpha(r: &mut ChaCha8Rng) -> Vec<MonotoneFunctionSpec> {
    let mut specs = MonotoneFunctionSpec::catalog();
    specs.push(MonotoneFunctionSpec::wyd(r.random_range(0.05..0.95)).expect("alpha in range"));
    specs
}

fn specfun_suite(r: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = SuiteReport::new("specfun");
    let grid: Vec<f64> = (-24..=24).map(|k| 10f64.powf(k as f64 / 4.0)).collect();
    for spec in specs_with_random_alpha(r) {
        s.close(spec.f(1.0), 1.0, 1e-15);
        s.close(spec.f(0.0), spec.f_zero(), 1e-15);
        for &t in &grid {
            let ft = spec.f(t);
            s.check((ft - t * spec.f(1.0 / t)).abs() / ft.max(1.0), 1e-12);
        }
        for w in grid.windows(2) {
            s.at_most(spec.f(w[0]), spec.f(w[1]), 0.0);
        }
        for _ in 0..100 {
            let x = log_uniform(r, -6.0, 2.0);
            let y = log_uniform(r, -6.0, 2.0);
            let arith = 0.5 * (x + y);
            let harm = 2.0 * x * y / (x + y);
            let m = spec.mean(x, y);
            let mt = spec.tilde_mean(x, y);
            let tol = 1e-12 * arith;
            s.at_most(harm, m, tol);
            s.at_most(m, arith, tol);
            s.at_most(harm, mt, tol);
            s.at_most(mt, arith, tol);
            let gap = 0.5 * spec.f_zero() * (x - y) * (x - y) / m;
            s.check((arith - mt - gap).abs() / arith, 1e-10);
        }
    }
    s
}

fn qstate_suite(r: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = SuiteReport::new("qstate");
    for i in 0..12 {
        let n = 2 + i % 5;
        let rho = random_state(r, n);
        s.check(rho.reconstruction_residual(), 1e-12);
        s.close(rho.spectrum().iter().sum(), 1.0, 1e-12);
        s.check(-rho.spectrum().iter().copied().fold(0.0, f64::min), 0.0);
        s.check(rho.matrix().hermiticity_defect(), 0.0);
        let u = haar_unitary(r.next_u64(), n);
        s.check(u.unitarity_defect(), 1e-12);
        let moved = rho.conjugate_by(&u).expect("unitary conjugation preserves states");
        let drift = rho.spectrum().iter().zip(moved.spectrum()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        s.check(drift, 1e-12);
        s.check(eigen_adapted_basis(&rho).expect("valid state").orthonormality_residual(), 1e-12);
    }
    for n in 2..=8 {
        let gm = gell_mann_basis(n).expect("n >= 2");
        s.check(gm.orthonormality_residual(), 1e-12);
        s.check(rotate_basis(&gm, r.next_u64()).orthonormality_residual(), 1e-12);
    }
    for (m, n) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
        let a = random_state(r, m);
        let b = random_state(r, n);
        let ab = BipartiteState::product(&a, &b).expect("product of states");
        s.check(ab.partial_trace(Subsystem::A).matrix().max_abs_diff(a.matrix()), 1e-12);
        s.check(ab.partial_trace(Subsystem::B).matrix().max_abs_diff(b.matrix()), 1e-12);
    }
    s
}

/// `-1/2 tr [sqrt(rho), H]^2` from the commutator itself.
fn wy_commutator(rho: &DensityMatrix, h: &Observable) -> f64 {
    let sq = rho.apply_spectral(f64::sqrt);
    let c = sq.commutator(h.matrix());
    -0.5 * c.trace_product(&c).re
}

fn measures_suite(r: &mut ChaCha8Rng, fault: Option<Fault>) -> SuiteReport {
    let mut s = SuiteReport::new("measures");
    let specs = specs_with_random_alpha(r);
    let sld = MonotoneFunctionSpec::sld();
    for i in 0..16 {
        let n = 2 + i % 4;
        let rho = random_state(r, n);
        let gm = gell_mann_basis(n).expect("n >= 2");
        let rotated = rotate_basis(&gm, r.next_u64());
        let h = random_observable(r.next_u64(), n);
        let q_sld = q_uncertainty_spectral(sld, &rho);
        for &spec in &specs {
            let basis = q_uncertainty_basis(spec, &rho, &gm).expect("matching dims");
            let spectral = match fault {
                Some(Fault::BrokenMean) => spectral_sum(rho.spectrum(), spec.f_zero(), |x, y| 1.05 * spec.mean(x, y)),
                None => q_uncertainty_spectral(spec, &rho),
            };
            let tilde = q_uncertainty_tilde(spec, &rho);
            s.close(basis, spectral, 1e-8);
            s.close(basis, tilde, 1e-8);
            s.close(spectral, tilde, 1e-8);
            s.close(q_uncertainty_basis(spec, &rho, &rotated).expect("matching dims"), basis, 1e-8);
            s.at_most(0.0, basis, 1e-10);
            s.at_most(basis, n as f64 - 1.0, 1e-10);
            s.at_most(basis, q_sld, 1e-9);
            let skew = skew_information(spec, &rho, &h).expect("matching dims");
            s.at_most(skew, variance(&rho, &h).expect("matching dims"), 1e-10);
            s.at_most(0.0, skew, 1e-12);
            if spec == MonotoneFunctionSpec::wy() {
                s.close(basis, qwy_closed_form(&rho), 1e-9);
                s.close(skew, wy_commutator(&rho, &h), 1e-9);
            }
        }
    }
    for n in 2..=8 {
        let pure = random_pure(r.next_u64(), n);
        let mixed = DensityMatrix::maximally_mixed(n).expect("n >= 1");
        for &spec in &specs {
            s.close(q_uncertainty_spectral(spec, &pure), n as f64 - 1.0, 1e-10);
            s.check(q_uncertainty_spectral(spec, &mixed).abs(), 1e-12);
        }
    }
    for (i, (m, n)) in [(2, 2), (2, 3), (3, 3)].into_iter().cycle().take(9).enumerate() {
        let ab = BipartiteState::new(random_mixed(r.next_u64() + i as u64, m * n), m, n).expect("dims match");
        let rho_a = ab.partial_trace(Subsystem::A);
        let a = random_observable(r.next_u64(), m);
        let ext = a.extend_left(n);
        for &spec in &specs {
            let joint = skew_information(spec, ab.state(), &ext).expect("matching dims");
            let local = skew_information(spec, &rho_a, &a).expect("matching dims");
            s.at_most(local, joint, 1e-9);
        }
    }
    s
}

fn detect_suite(r: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = SuiteReport::new("detect");
    let specs = MonotoneFunctionSpec::catalog();
    for (m, n) in [(2, 2), (2, 3), (3, 3), (3, 2)] {
        let prod = random_product_state(r.next_u64(), m, n);
        for &spec in &specs {
            s.check(f_bar(spec, &prod).expect("valid state").abs(), 1e-8);
        }
    }
    for m in [2, 3, 2, 3] {
        let sep = random_separable_state(r.next_u64(), m, m);
        for &spec in &specs {
            s.at_most(f_hat(spec, &sep).expect("square dims"), separability_threshold(m), 1e-8);
        }
    }
    for k in 0..=8 {
        let p = k as f64 / 8.0;
        let iso = isotropic_state(p, 3).expect("p in range");
        for &spec in &specs {
            let closed = f_hat_isotropic_closed_form(spec, p, 3).expect("d = 3");
            let numeric = f_hat(spec, &iso).expect("square dims");
            s.check((numeric - closed).abs() / closed.max(1.0), 1e-8);
        }
        s.close(v_hat(&iso).expect("square dims"), v_hat_isotropic_closed_form(p), 1e-8);
    }
    let branches = [random_pure(r.next_u64(), 2), random_pure(r.next_u64(), 2)];
    let cq = classical_quantum_state(&[0.5, 0.5], &branches).expect("valid branches");
    for &spec in &specs {
        s.at_most(1e-6, f_bar(spec, &cq).expect("valid state"), 0.0);
    }
    s
}

fn io_suite(r: &mut ChaCha8Rng) -> SuiteReport {
    let mut s = SuiteReport::new("io");
    for i in 0..8 {
        let rho = random_state(r, 2 + i % 4);
        let text = density_to_json(&rho);
        match parse_density(&text) {
            Ok(back) => {
                s.check(back.matrix().max_abs_diff(rho.matrix()), 0.0);
                s.check(if density_to_json(&back) == text { 0.0 } else { 1.0 }, 0.0);
            }
            Err(_) => s.check(f64::INFINITY, 0.0),
        }
    }
    let mut n = 0;
    while n < 200 {
        let v = f64::from_bits(r.next_u64());
        if !v.is_finite() {
            continue;
        }
        n += 1;
        let back: f64 = fmt_f64(v).parse().unwrap_or(f64::NAN);
        s.check(if back.to_bits() == v.to_bits() { 0.0 } else { 1.0 }, 0.0);
    }
    s
}

pub fn run_selftest(seed: u64, fault: Option<Fault>) -> SelftestReport {
    let mut master = rng(seed);
    let mut sub = || rng(master.next_u64());
    let suites = vec![
        specfun_suite(&mut sub()),
        qstate_suite(&mut sub()),
        measures_suite(&mut sub(), fault),
        detect_suite(&mut sub()),
        io_suite(&mut sub()),
    ];
    SelftestReport { seed, fault, suites }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn passes_and_is_deterministic() {
        let a = run_selftest(42, None);
        assert!(a.passed(), "{a}");
        assert!(a.suites.iter().all(|s| s.checks > 0));
        let b = run_selftest(42, None);
        assert_eq!(a.to_string(), b.to_string());
        assert_ne!(a.to_string(), run_selftest(43, None).to_string());
    }

    #[test]
    fn broken_mean_is_caught() {
        let r = run_selftest(42, Some(Fault::BrokenMean));
        assert!(!r.passed());
        let measures = r.suites.iter().find(|s| s.name == "measures").unwrap();
        assert!(measures.failures > 0);
        assert!(r.suites.iter().filter(|s| s.name != "measures").all(SuiteReport::passed));
    }

    #[test]
    fn check_bookkeeping() {
        let mut s = SuiteReport::new("t");
        s.check(0.0, 0.0);
        s.check(1e-9, 1e-8);
        assert!(s.passed());
        assert!((s.worst_ratio - 0.1).abs() < 1e-12);
        s.check(f64::NAN, 1.0);
        assert!(!s.passed());
        assert_eq!(s.worst_residual, f64::INFINITY);
    }
}
