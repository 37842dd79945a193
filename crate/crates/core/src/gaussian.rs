// Copyright 2026 The unruh-metrology Authors
// SPDX-License-Identifier: Apache-2.0

//! Single-mode Gaussian states under the amplification channel.
//!
//! Quadratures are `q = (a + a†)/√2`, `p = −i(a − a†)/√2`, so the vacuum has
//! identity covariance and `⟨a†a⟩ = (tr σ − 2)/4 + (q² + p²)/2`.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::fock_channel::AccelerationParameter;
use crate::numerics::scan_then_golden_max;

/// Allowed range of the Bures finite-difference step.
pub const BURES_STEP_RANGE: (f64, f64) = (1e-6, 1e-2);
pub const DEFAULT_BURES_STEP: f64 = 1e-4;

const OPTIMIZER_TOL: f64 = 1e-8;
const OPTIMIZER_SCAN: usize = 65;

/// First moments and covariance matrix of one bosonic mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianState {
    pub mean: Vector2<f64>,
    pub cov: Matrix2<f64>,
}

impl GaussianState {
    /// Checks symmetry and the uncertainty relation `det σ ≥ 1`.
    pub fn new(mean: Vector2<f64>, cov: Matrix2<f64>) -> Result<Self> {
        if (cov[(0, 1)] - cov[(1, 0)]).abs() > 1e-12 {
            return Err(Error::Validation("covariance matrix is not symmetric".into()));
        }
        if cov[(0, 0)] <= 0.0 || cov.determinant() < 1.0 - 1e-10 {
            return Err(Error::Validation(format!(
                "covariance violates the uncertainty relation (det = {})",
                cov.determinant()
            )));
        }
        Ok(Self { mean, cov })
    }

    pub fn vacuum() -> Self {
        Self { mean: Vector2::zeros(), cov: Matrix2::identity() }
    }

    /// Pure coherent state `|α⟩` with `α = (q + ip)/√2`.
    pub fn coherent(q0: f64, p0: f64) -> Self {
        Self { mean: Vector2::new(q0, p0), cov: Matrix2::identity() }
    }

    /// Displaced squeezed state of the energy split: squeezing along `q`
    /// with `sinh²s = x n̄₀` and displacement `p₀ = √(2(1−x) n̄₀)`.
    pub fn from_split(split: EnergySplit) -> Self {
        let s = (split.x * split.n_bar0).sqrt().asinh();
        let p0 = (2.0 * (1.0 - split.x) * split.n_bar0).sqrt();
        displaced_squeezed_state(s, 0.0, 0.0, p0)
    }

    pub fn is_pure(&self) -> bool {
        (self.cov.determinant() - 1.0).abs() <= 1e-8
    }

    /// Moments of the heterodyne outcome density in quadrature units:
    /// mean `ξ`, covariance `(σ + 𝟙)/2`.
    pub fn heterodyne_outcome_moments(&self) -> (Vector2<f64>, Matrix2<f64>) {
        (self.mean, (self.cov + Matrix2::identity()) * 0.5)
    }
}

/// Inertial energy `n̄₀` and the fraction `x` of it spent on squeezing.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct EnergySplit {
    pub n_bar0: f64,
    pub x: f64,
}

impl EnergySplit {
    pub fn new(n_bar0: f64, x: f64) -> Result<Self> {
        if !(n_bar0.is_finite() && n_bar0 >= 0.0) {
            return Err(Error::Domain(format!("n_bar0 must be finite and nonnegative, got {n_bar0}")));
        }
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(format!("energy ratio x must lie in [0, 1], got {x}")));
        }
        Ok(Self { n_bar0, x })
    }
}

/// Pure displaced squeezed state with squeezing `s` at phase `θ`.
pub fn displaced_squeezed_state(s: f64, theta: f64, q0: f64, p0: f64) -> GaussianState {
    let (e2, em2) = ((2.0 * s).exp(), (-2.0 * s).exp());
    let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
    let off = (2.0 * theta).sin() * (2.0 * s).sinh();
    let cov = Matrix2::new(e2 * c2 + em2 * s2, off, off, em2 * c2 + e2 * s2);
    GaussianState { mean: Vector2::new(q0, p0), cov }
}

/// `ξ → cosh r ξ`, `σ → cosh²r σ + sinh²r 𝟙`.
pub fn evolve_gaussian(g: &GaussianState, r: AccelerationParameter) -> GaussianState {
    evolve_unchecked(g, r.value())
}

// The moment map is even in r; finite differences may probe r slightly below 0.
fn evolve_unchecked(g: &GaussianState, r: f64) -> GaussianState {
    let (c, s) = (r.cosh(), r.sinh());
    GaussianState { mean: g.mean * c, cov: g.cov * (c * c) + Matrix2::identity() * (s * s) }
}

pub fn gaussian_mean_photon(g: &GaussianState) -> f64 {
    ((g.cov.trace() - 2.0) / 4.0 + g.mean.norm_squared() / 2.0).max(0.0)
}

/// Uhlmann fidelity between two single-mode Gaussian states.
pub fn fidelity_gaussian(g1: &GaussianState, g2: &GaussianState) -> Result<f64> {
    let sum = g1.cov + g2.cov;
    let sigma = sum.determinant();
    if !(sigma > 1e-300) {
        return Err(Error::NumericalDegeneracy(format!("det(σ₁ + σ₂) = {sigma:e}")));
    }
    let gamma = ((g1.cov.determinant() - 1.0) * (g2.cov.determinant() - 1.0)).max(0.0);
    let inv = sum
        .try_inverse()
        .ok_or_else(|| Error::NumericalDegeneracy("σ₁ + σ₂ is singular".into()))?;
    let delta = g2.mean - g1.mean;
    let quad = (delta.transpose() * inv * delta)[(0, 0)];
    // 2/(√(Σ+Γ) − √Γ) rewritten without the subtraction.
    let prefactor = 2.0 * ((sigma + gamma).sqrt() + gamma.sqrt()) / sigma;
    Ok((prefactor * (-quad).exp()).clamp(0.0, 1.0))
}

fn bures_pair(g0: &GaussianState, r_lo: f64, r_hi: f64) -> Result<f64> {
    let h = r_hi - r_lo;
    let f = fidelity_gaussian(&evolve_unchecked(g0, r_lo), &evolve_unchecked(g0, r_hi))?;
    Ok(4.0 * (1.0 - f) / (h * h))
}

fn check_step(dr: f64) -> Result<()> {
    let (min, max) = BURES_STEP_RANGE;
    if !(min..=max).contains(&dr) {
        return Err(Error::StepSize { step: dr, min, max });
    }
    Ok(())
}

/// `4[1 − F(ρ_{r−dr/2}, ρ_{r+dr/2})]/dr²`; one-sided when `r < dr/2`.
pub fn qfi_bures_gaussian(g0: &GaussianState, r: AccelerationParameter, dr: f64) -> Result<f64> {
    check_step(dr)?;
    let rv = r.value();
    if rv >= dr / 2.0 {
        bures_pair(g0, rv - dr / 2.0, rv + dr / 2.0)
    } else {
        bures_pair(g0, rv, rv + dr)
    }
}

/// Bures QFI with one Richardson step on `dr` and `dr/2`.
pub fn qfi_bures_gaussian_richardson(g0: &GaussianState, r: AccelerationParameter, dr: f64) -> Result<f64> {
    check_step(dr)?;
    let rv = r.value();
    let half = dr / 2.0;
    if rv >= dr / 2.0 {
        let coarse = bures_pair(g0, rv - dr / 2.0, rv + dr / 2.0)?;
        let fine = bures_pair(g0, rv - half / 2.0, rv + half / 2.0)?;
        Ok((4.0 * fine - coarse) / 3.0)
    } else {
        // Forward pairs carry an O(dr) leading error.
        let coarse = bures_pair(g0, rv, rv + dr)?;
        let fine = bures_pair(g0, rv, rv + half)?;
        Ok(2.0 * fine - coarse)
    }
}

/// Closed-form QFI of the displaced squeezed family with energy split
/// `(n̄₀, x)`.
pub fn qfi_gaussian_closed_form(split: EnergySplit, r: AccelerationParameter) -> f64 {
    let EnergySplit { n_bar0: n, x } = split;
    let rv = r.value();
    let xn = x * n;
    let first = 2.0 * (x - 1.0) * n / ((2.0 * rv).cosh() * (xn + 1.0) - (xn * (xn + 1.0)).sqrt());
    let second = 16.0 * xn / ((4.0 * rv).cosh() * (xn + 1.0) - xn + 3.0);
    let third = -2.0 * (x - 1.0) * n;
    let fourth = -2.0 * (x - 1.0) * n * (xn / (xn + 1.0)).sqrt();
    first + second + third + fourth + 4.0
}

/// Maximiser of the closed-form QFI over the energy ratio.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct GaussianOptimum {
    pub x_star: f64,
    pub qfi: f64,
}

/// Maximises [`qfi_gaussian_closed_form`] over `x ∈ [0, 1]`; ties go to `x = 1`.
pub fn optimize_gaussian_qfi(n_bar0: f64, r: AccelerationParameter) -> Result<GaussianOptimum> {
    EnergySplit::new(n_bar0, 1.0)?;
    let f = |x: f64| qfi_gaussian_closed_form(EnergySplit { n_bar0, x }, r);
    let at_one = f(1.0);
    if n_bar0 == 0.0 {
        return Ok(GaussianOptimum { x_star: 1.0, qfi: at_one });
    }
    let best = scan_then_golden_max(f, 0.0, 1.0, OPTIMIZER_SCAN, OPTIMIZER_TOL);
    if at_one >= best.value - 1e-12 * best.value.abs() {
        Ok(GaussianOptimum { x_star: 1.0, qfi: at_one })
    } else {
        Ok(GaussianOptimum { x_star: best.arg, qfi: best.value })
    }
}

/// Classical Fisher information of coherent input plus heterodyne:
/// `4(1 + n̄₀/2) tanh² r`.
pub fn heterodyne_fisher_coherent(n_bar0: f64, r: AccelerationParameter) -> f64 {
    4.0 * (1.0 + n_bar0 / 2.0) * r.tanh_sq()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    fn r(v: f64) -> AccelerationParameter {
        AccelerationParameter::new(v).unwrap()
    }

    #[test]
    fn squeezed_state_construction() {
        let vac = displaced_squeezed_state(0.0, 0.3, 0.0, 0.0);
        assert_abs_diff_eq!((vac.cov - Matrix2::identity()).norm(), 0.0, epsilon = 1e-15);
        let s = 0.7;
        let g = displaced_squeezed_state(s, 0.0, 0.0, 0.0);
        assert_relative_eq!(g.cov[(0, 0)], (2.0 * s).exp(), max_relative = 1e-15);
        assert_relative_eq!(g.cov[(1, 1)], (-2.0 * s).exp(), max_relative = 1e-15);
        assert_eq!(g.cov[(0, 1)], 0.0);
        assert!(GaussianState::new(g.mean, g.cov).is_ok());
    }

    #[test]
    fn rejects_unphysical_covariance() {
        assert!(GaussianState::new(Vector2::zeros(), Matrix2::identity() * 0.5).is_err());
        assert!(GaussianState::new(Vector2::zeros(), Matrix2::new(2.0, 0.1, 0.0, 2.0)).is_err());
        assert!(EnergySplit::new(1.0, 1.5).is_err());
        assert!(EnergySplit::new(-1.0, 0.5).is_err());
    }

    #[test]
    fn mean_photon_decomposition() {
        assert_eq!(gaussian_mean_photon(&GaussianState::vacuum()), 0.0);
        let s = 0.9;
        assert_relative_eq!(
            gaussian_mean_photon(&displaced_squeezed_state(s, 0.0, 0.0, 0.0)),
            s.sinh().powi(2),
            max_relative = 1e-14
        );
        assert_relative_eq!(gaussian_mean_photon(&GaussianState::coherent(1.2, -0.4)), (1.44 + 0.16) / 2.0);
        let split = EnergySplit::new(3.0, 0.4).unwrap();
        assert_relative_eq!(gaussian_mean_photon(&GaussianState::from_split(split)), 3.0, max_relative = 1e-13);
    }

    #[test]
    fn evolution_of_vacuum_is_thermal() {
        let rv = 0.6f64;
        let out = evolve_gaussian(&GaussianState::vacuum(), r(rv));
        let c = rv.cosh().powi(2) + rv.sinh().powi(2);
        assert_abs_diff_eq!((out.cov - Matrix2::identity() * c).norm(), 0.0, epsilon = 1e-14);
        assert_relative_eq!(gaussian_mean_photon(&out), rv.sinh().powi(2), max_relative = 1e-13);
        let g = displaced_squeezed_state(0.4, 0.2, 0.3, 1.0);
        assert_eq!(evolve_gaussian(&g, AccelerationParameter::ZERO), g);
    }

    #[test]
    fn evolved_determinant_at_zero_phase() {
        let (s, rv) = (0.5f64, 0.8f64);
        let out = evolve_gaussian(&displaced_squeezed_state(s, 0.0, 0.0, 0.0), r(rv));
        let (c2, s2) = (rv.cosh().powi(2), rv.sinh().powi(2));
        let expect = (c2 * (2.0 * s).exp() + s2) * (c2 * (-2.0 * s).exp() + s2);
        assert_relative_eq!(out.cov.determinant(), expect, max_relative = 1e-13);
    }

    #[test]
    fn fidelity_of_coherent_states() {
        let a = GaussianState::coherent(0.3, 1.1);
        let b = GaussianState::coherent(-0.5, 0.2);
        let d2 = ((0.8f64).powi(2) + (0.9f64).powi(2)) / 2.0;
        assert_relative_eq!(fidelity_gaussian(&a, &b).unwrap(), (-d2).exp(), max_relative = 1e-14);
        let g = evolve_gaussian(&displaced_squeezed_state(1.0, 0.4, 0.2, -0.3), r(0.9));
        assert_abs_diff_eq!(fidelity_gaussian(&g, &g).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn vacuum_bures_qfi_is_four() {
        for rv in [0.0, 0.3, 1.2] {
            let h = qfi_bures_gaussian(&GaussianState::vacuum(), r(rv), 1e-4).unwrap();
            assert_abs_diff_eq!(h, 4.0, epsilon = 1e-3);
        }
    }

    #[test]
    fn bures_step_range_enforced() {
        let g = GaussianState::vacuum();
        assert!(matches!(qfi_bures_gaussian(&g, r(0.5), 1e-7), Err(Error::StepSize { .. })));
        assert!(matches!(qfi_bures_gaussian(&g, r(0.5), 0.1), Err(Error::StepSize { .. })));
    }

    #[test]
    fn bures_qfi_reflection_symmetric_in_p0() {
        let a = displaced_squeezed_state(0.3, 0.0, 0.0, 1.4);
        let b = displaced_squeezed_state(0.3, 0.0, 0.0, -1.4);
        let ha = qfi_bures_gaussian(&a, r(0.7), 1e-4).unwrap();
        let hb = qfi_bures_gaussian(&b, r(0.7), 1e-4).unwrap();
        assert_relative_eq!(ha, hb, max_relative = 1e-12);
    }

    #[test]
    fn closed_form_limits() {
        for x in [0.0, 0.4, 1.0] {
            assert_eq!(qfi_gaussian_closed_form(EnergySplit { n_bar0: 0.0, x }, r(0.9)), 4.0);
        }
        for n in [0.5, 3.0, 10.0] {
            let h = qfi_gaussian_closed_form(EnergySplit { n_bar0: n, x: 1.0 }, r(1e-6));
            assert_relative_eq!(h, 4.0 * (1.0 + n), max_relative = 1e-9);
        }
    }

    #[test]
    fn closed_form_matches_bures_for_coherent_family() {
        for n in [0.5, 4.0, 9.0] {
            for rv in [0.1, 0.7, 1.4] {
                let split = EnergySplit { n_bar0: n, x: 0.0 };
                let bures = qfi_bures_gaussian_richardson(&GaussianState::from_split(split), r(rv), 1e-4).unwrap();
                assert_relative_eq!(qfi_gaussian_closed_form(split, r(rv)), bures, max_relative = 1e-3);
            }
        }
    }

    #[test]
    fn optimum_prefers_squeezing_at_small_r() {
        let opt = optimize_gaussian_qfi(5.0, r(0.01)).unwrap();
        assert!(opt.x_star > 0.99, "x* = {}", opt.x_star);
        let vac = optimize_gaussian_qfi(0.0, r(0.5)).unwrap();
        assert_eq!(vac, GaussianOptimum { x_star: 1.0, qfi: 4.0 });
    }

    #[test]
    fn optimum_is_global_on_a_fine_grid() {
        for n in [0.3, 2.0, 8.0] {
            for rv in [0.05, 0.4, 1.0, 1.5] {
                let opt = optimize_gaussian_qfi(n, r(rv)).unwrap();
                let grid_best = (0..=4000)
                    .map(|i| qfi_gaussian_closed_form(EnergySplit { n_bar0: n, x: i as f64 / 4000.0 }, r(rv)))
                    .fold(f64::NEG_INFINITY, f64::max);
                assert!(opt.qfi >= grid_best - 1e-9, "n={n} r={rv}");
            }
        }
    }

    #[test]
    fn optimum_increases_with_energy() {
        for rv in [0.1, 0.5, 1.0, 1.5] {
            let mut prev = 0.0;
            for i in 0..20 {
                let h = optimize_gaussian_qfi(0.5 * i as f64, r(rv)).unwrap().qfi;
                assert!(h > prev);
                prev = h;
            }
        }
    }

    #[test]
    fn heterodyne_formula_and_bound() {
        assert_eq!(heterodyne_fisher_coherent(3.0, AccelerationParameter::ZERO), 0.0);
        assert_relative_eq!(heterodyne_fisher_coherent(4.0, r(0.8)), 12.0 * 0.8f64.tanh().powi(2));
        for n in [0.0, 1.0, 4.0, 10.0] {
            for rv in [0.1, 0.5, 1.0, 1.5] {
                let qfi = qfi_gaussian_closed_form(EnergySplit { n_bar0: n, x: 0.0 }, r(rv));
                assert!(heterodyne_fisher_coherent(n, r(rv)) <= qfi);
            }
        }
    }

    #[test]
    fn zero_phase_and_q_displacement_minimise_fidelity() {
        let (s, d, rv, dr) = (0.5f64, 1.5f64, 0.6f64, 1e-3f64);
        let fid = |g: GaussianState| {
            fidelity_gaussian(&evolve_gaussian(&g, r(rv)), &evolve_gaussian(&g, r(rv + dr))).unwrap()
        };
        let reference = fid(displaced_squeezed_state(s, 0.0, 0.0, d));
        for i in 1..=20 {
            let theta = FRAC_PI_2 * i as f64 / 20.0;
            assert!(fid(displaced_squeezed_state(s, theta, 0.0, d)) >= reference);
        }
        for i in 1..=20 {
            let phi = FRAC_PI_2 * i as f64 / 20.0;
            let (q0, p0) = (d * phi.sin(), d * phi.cos());
            assert!(fid(displaced_squeezed_state(s, 0.0, q0, p0)) >= reference);
        }
    }

    #[test]
    fn heterodyne_moments_of_vacuum_are_identity() {
        let (m, c) = GaussianState::vacuum().heterodyne_outcome_moments();
        assert_eq!(m, Vector2::zeros());
        assert_eq!(c, Matrix2::identity());
    }

    fn arb_state() -> impl Strategy<Value = GaussianState> {
        (0.0f64..1.2, 0.0f64..3.2, -2.0f64..2.0, -2.0f64..2.0, 0.0f64..1.2)
            .prop_map(|(s, th, q, p, rv)| evolve_gaussian(&displaced_squeezed_state(s, th, q, p), r(rv)))
    }

    proptest! {
        #[test]
        fn fidelity_is_bounded_and_symmetric(a in arb_state(), b in arb_state()) {
            let fab = fidelity_gaussian(&a, &b).unwrap();
            let fba = fidelity_gaussian(&b, &a).unwrap();
            prop_assert!((0.0..=1.0).contains(&fab));
            prop_assert!((fab - fba).abs() <= 1e-12);
        }

        #[test]
        fn pure_parametrisation_has_unit_determinant(s in -2.0f64..2.0, th in -4.0f64..4.0) {
            let g = displaced_squeezed_state(s, th, 0.1, 0.2);
            prop_assert!((g.cov.determinant() - 1.0).abs() <= 1e-10 * g.cov.norm().powi(2).max(1.0));
        }
    }
}
