// Copyright 2026 The unruh-metrology Authors
// SPDX-License-Identifier: Apache-2.0

//! One-parameter estimation: classical Fisher information of a measurement
//! model, the symmetric logarithmic derivative of a density-matrix family,
//! the Fock and ultimate quantum bounds, and reparametrisation of Fisher
//! information to physical parameters.

use std::sync::Arc;

use nalgebra::{DMatrix, Matrix2, Vector2};
use rayon::prelude::*;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock_channel::{
    amplification_generator, apply_amplification_channel, build_fock_state, fock_output_derivative, fock_output_distribution,
    required_kmax, required_output_dim, AccelerationParameter, FockDensityMatrix,
};
use crate::gaussian::{heterodyne_fisher_coherent, optimize_gaussian_qfi};
use crate::physical_units::{thermal_photon_number, CODATA_2018};

const SLD_CUTOFF: f64 = 1e-12;
const NORMALISATION_TOL: f64 = 1e-8;
const SERIES_TOL: f64 = 1e-12;
const QFI_TAIL_TOL: f64 = 1e-20;

/// Probabilities over outcomes `0..len` plus the mass of unlisted outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution {
    pub probabilities: Vec<f64>,
    pub tail_mass: f64,
}

pub type DiscreteEvaluator = Arc<dyn Fn(f64) -> DiscreteDistribution + Send + Sync>;
pub type DiscreteDerivative = Arc<dyn Fn(f64) -> Vec<f64> + Send + Sync>;
pub type MomentEvaluator = Arc<dyn Fn(f64) -> (Vector2<f64>, Matrix2<f64>) + Send + Sync>;

/// How `∂p/∂r` is obtained.
#[derive(Clone)]
pub enum Derivative<F> {
    Analytic(F),
    CentralDifference { step: f64 },
}

/// A one-parameter family of outcome distributions `p(χ|r)`.
#[derive(Clone)]
pub enum MeasurementModel {
    /// Countable outcomes; the evaluator returns the whole distribution at `r`.
    Discrete { prob: DiscreteEvaluator, dprob: Derivative<DiscreteDerivative> },
    /// Outcomes in the plane with a Gaussian density of the given moments.
    GaussianPlane { moments: MomentEvaluator, dmoments: Derivative<MomentEvaluator> },
}

impl std::fmt::Debug for MeasurementModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Discrete { .. } => f.write_str("MeasurementModel::Discrete"),
            Self::GaussianPlane { .. } => f.write_str("MeasurementModel::GaussianPlane"),
        }
    }
}

impl MeasurementModel {
    /// Photon counting on the channel output of `|n₀⟩`; outcome `k` is the
    /// number of added photons.
    pub fn fock_photon_counting(n0: usize, tail_tolerance: f64) -> Self {
        let kmax_at = move |r: f64| required_kmax(n0, AccelerationParameter(r), tail_tolerance.min(SERIES_TOL));
        let prob: DiscreteEvaluator = Arc::new(move |r| {
            let d = fock_output_distribution(n0, AccelerationParameter(r), kmax_at(r));
            DiscreteDistribution { probabilities: d.probabilities, tail_mass: d.tail_mass }
        });
        let dprob: DiscreteDerivative = Arc::new(move |r| fock_output_derivative(n0, AccelerationParameter(r), kmax_at(r)));
        Self::Discrete { prob, dprob: Derivative::Analytic(dprob) }
    }

    /// Photon counting on the channel output of an arbitrary input state.
    pub fn photon_counting(rho0: FockDensityMatrix) -> Self {
        let rho0 = Arc::new(rho0);
        let dim_at = {
            let rho0 = rho0.clone();
            move |r: f64| {
                crate::fock_channel::required_output_dim(rho0.support_max(), AccelerationParameter(r), rho0.tail_tolerance())
                    .max(rho0.dim())
            }
        };
        let (prob_rho, prob_dim) = (rho0.clone(), dim_at.clone());
        let prob: DiscreteEvaluator = Arc::new(move |r| {
            let out = crate::fock_channel::apply_amplification_channel(&prob_rho, AccelerationParameter(r), prob_dim(r))
                .expect("policy dimension satisfies the tail tolerance");
            let probabilities = out.populations();
            let tail_mass = (1.0 - probabilities.iter().sum::<f64>()).max(0.0);
            DiscreteDistribution { probabilities, tail_mass }
        });
        let dprob: DiscreteDerivative = Arc::new(move |r| {
            let out = crate::fock_channel::apply_amplification_channel(&rho0, AccelerationParameter(r), dim_at(r))
                .expect("policy dimension satisfies the tail tolerance");
            let g = amplification_generator(out.entries(), r);
            (0..g.nrows()).map(|i| g[(i, i)].re).collect()
        });
        Self::Discrete { prob, dprob: Derivative::Analytic(dprob) }
    }

    /// Heterodyne detection of the channel output of a coherent input with
    /// quadrature mean `ξ₀`: outcome density `N(cosh r ξ₀, cosh² r 𝟙)`.
    pub fn coherent_heterodyne(xi0: Vector2<f64>) -> Self {
        let moments: MomentEvaluator = Arc::new(move |r: f64| (xi0 * r.cosh(), Matrix2::identity() * r.cosh().powi(2)));
        let dmoments: MomentEvaluator =
            Arc::new(move |r: f64| (xi0 * r.sinh(), Matrix2::identity() * (2.0 * r.sinh() * r.cosh())));
        Self::GaussianPlane { moments, dmoments: Derivative::Analytic(dmoments) }
    }
}

/// Fisher information value with the probability mass left out of the sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FisherInformation {
    pub value: f64,
    pub tail_mass: f64,
}

/// `I_r = Σ_χ p(χ|r) (∂_r ln p(χ|r))²`, or its Gaussian-density analogue.
pub fn classical_fisher(model: &MeasurementModel, r: AccelerationParameter) -> Result<FisherInformation> {
    let rv = r.value();
    match model {
        MeasurementModel::Discrete { prob, dprob } => {
            let dist = prob(rv);
            let total: f64 = dist.probabilities.iter().sum::<f64>() + dist.tail_mass;
            if (total - 1.0).abs() > NORMALISATION_TOL {
                return Err(Error::Validation(format!("model is not normalised at r = {rv} (total {total})")));
            }
            if dist.probabilities.iter().any(|&p| p < 0.0 || !p.is_finite()) {
                return Err(Error::Validation("model has negative probabilities".into()));
            }
            let dp = match dprob {
                Derivative::Analytic(f) => f(rv),
                Derivative::CentralDifference { step } => {
                    let lo = prob((rv - step).max(0.0)).probabilities;
                    let hi = prob(rv + step).probabilities;
                    let h = rv + step - (rv - step).max(0.0);
                    (0..dist.probabilities.len())
                        .map(|k| (hi.get(k).copied().unwrap_or(0.0) - lo.get(k).copied().unwrap_or(0.0)) / h)
                        .collect()
                }
            };
            let mut terms = Vec::with_capacity(dist.probabilities.len());
            for (k, &p) in dist.probabilities.iter().enumerate() {
                let d = dp.get(k).copied().unwrap_or(0.0);
                if p == 0.0 {
                    // Outside the support; zero-probability outcomes carry no information
                    // only if their derivative vanishes too.
                    if d.abs() > 1e-300 {
                        return Err(Error::Validation(format!("outcome {k} has p = 0 but dp/dr = {d:e}")));
                    }
                    continue;
                }
                terms.push(d * d / p);
            }
            let last = terms.last().copied().unwrap_or(0.0);
            if dist.tail_mass > SERIES_TOL && last > SERIES_TOL {
                return Err(Error::TailBound(format!(
                    "tail mass {:e} with last increment {last:e}",
                    dist.tail_mass
                )));
            }
            Ok(FisherInformation { value: crate::numerics::pairwise_sum(&terms), tail_mass: dist.tail_mass })
        }
        MeasurementModel::GaussianPlane { moments, dmoments } => {
            let (_, sigma) = moments(rv);
            let (dmu, dsigma) = match dmoments {
                Derivative::Analytic(f) => f(rv),
                Derivative::CentralDifference { step } => {
                    let (m_hi, s_hi) = moments(rv + step);
                    let (m_lo, s_lo) = moments(rv - step);
                    ((m_hi - m_lo) / (2.0 * step), (s_hi - s_lo) / (2.0 * step))
                }
            };
            let inv = sigma
                .try_inverse()
                .ok_or_else(|| Error::NumericalDegeneracy("outcome covariance is singular".into()))?;
            let a = inv * dsigma;
            let value = (dmu.transpose() * inv * dmu)[(0, 0)] + 0.5 * (a * a).trace();
            Ok(FisherInformation { value, tail_mass: 0.0 })
        }
    }
}

/// Tensor-grid quadrature of `∫ p (∂_r ln p)² d²χ` for a Gaussian-plane
/// model, with `∂_r p` from central differences. Cross-check only.
pub fn classical_fisher_quadrature(model: &MeasurementModel, r: AccelerationParameter, points: usize) -> Result<f64> {
    let MeasurementModel::GaussianPlane { moments, .. } = model else {
        return Err(Error::Validation("quadrature cross-check needs a Gaussian-plane model".into()));
    };
    let rv = r.value();
    let h = 1e-5;
    let density = |mu: &Vector2<f64>, sigma: &Matrix2<f64>, x: f64, y: f64| {
        let inv = sigma.try_inverse().expect("positive-definite covariance");
        let d = Vector2::new(x, y) - mu;
        (-0.5 * (d.transpose() * inv * d)[(0, 0)]).exp() / (2.0 * std::f64::consts::PI * sigma.determinant().sqrt())
    };
    let (mu, sigma) = moments(rv);
    let (mu_hi, s_hi) = moments(rv + h);
    let (mu_lo, s_lo) = moments((rv - h).max(0.0));
    let h_eff = rv + h - (rv - h).max(0.0);
    let width = 10.0 * sigma[(0, 0)].max(sigma[(1, 1)]).sqrt();
    let step = 2.0 * width / (points - 1) as f64;
    let mut acc = 0.0;
    for i in 0..points {
        let x = mu[0] - width + step * i as f64;
        for j in 0..points {
            let y = mu[1] - width + step * j as f64;
            let p = density(&mu, &sigma, x, y);
            if p < 1e-300 {
                continue;
            }
            let dp = (density(&mu_hi, &s_hi, x, y) - density(&mu_lo, &s_lo, x, y)) / h_eff;
            acc += dp * dp / p;
        }
    }
    Ok(acc * step * step)
}

/// Symmetric logarithmic derivative in the eigenbasis of `ρ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SldResult {
    pub eigenvalues: Vec<f64>,
    /// `Λ` in the eigenbasis of `ρ`, ordered as `eigenvalues`.
    pub sld_matrix: DMatrix<Complex64>,
    pub qfi: f64,
}

impl SldResult {
    /// `Tr[ρ Λ²]` evaluated directly in the eigenbasis.
    pub fn trace_rho_sld_squared(&self) -> f64 {
        let l2 = &self.sld_matrix * &self.sld_matrix;
        self.eigenvalues.iter().enumerate().map(|(i, &lam)| lam * l2[(i, i)].re).sum()
    }
}

fn is_diagonal(m: &DMatrix<Complex64>) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)] == Complex64::ZERO))
}

/// Solves `2 dρ = Λρ + ρΛ` on the support of `ρ` and returns `Λ` and the
/// quantum Fisher information `Tr[ρΛ²] = Σ 2|dρ_ij|²/(λ_i + λ_j)`.
pub fn sld_from_family(rho: &FockDensityMatrix, drho_dr: &DMatrix<Complex64>) -> Result<SldResult> {
    let d = rho.dim();
    if drho_dr.nrows() != d || drho_dr.ncols() != d {
        return Err(Error::Validation(format!(
            "derivative is {}x{} but the state is {d}x{d}",
            drho_dr.nrows(),
            drho_dr.ncols()
        )));
    }
    let herm = (0..d)
        .flat_map(|i| (0..d).map(move |j| (i, j)))
        .map(|(i, j)| (drho_dr[(i, j)] - drho_dr[(j, i)].conj()).norm())
        .fold(0.0, f64::max);
    if herm > 1e-10 || rho.max_hermiticity_defect() > 1e-10 {
        return Err(Error::Validation("state and derivative must be Hermitian".into()));
    }
    let tr: f64 = (0..d).map(|i| drho_dr[(i, i)].re).sum();
    if tr.abs() > 1e-8 {
        return Err(Error::Validation(format!("derivative is not traceless (trace {tr:e})")));
    }

    let (eigenvalues, rotated) = if is_diagonal(rho.entries()) && is_diagonal(drho_dr) {
        (rho.populations(), drho_dr.clone())
    } else {
        let eig = nalgebra::SymmetricEigen::new(rho.entries().clone());
        let u = eig.eigenvectors;
        let rotated = u.adjoint() * drho_dr * &u;
        (eig.eigenvalues.iter().copied().collect(), rotated)
    };

    let mut sld = DMatrix::<Complex64>::zeros(d, d);
    let mut terms = Vec::new();
    for i in 0..d {
        for j in 0..d {
            let denom = eigenvalues[i] + eigenvalues[j];
            if denom < SLD_CUTOFF {
                continue;
            }
            let dij = rotated[(i, j)];
            if dij == Complex64::ZERO {
                continue;
            }
            sld[(i, j)] = dij * (2.0 / denom);
            terms.push(2.0 * dij.norm_sqr() / denom);
        }
    }
    Ok(SldResult { eigenvalues, sld_matrix: sld, qfi: crate::numerics::pairwise_sum(&terms) })
}

/// Quantum Fisher information of a Fock input, `4(1 + n₀)`.
pub fn fock_qfi(n0: u64) -> f64 {
    4.0 * (1.0 + n0 as f64)
}

/// QFI of `ρ_r` computed from the channel output and the master-equation
/// generator through the SLD; numeric route to [`fock_qfi`] for Fock inputs.
pub fn channel_qfi(rho0: &FockDensityMatrix, r: AccelerationParameter) -> Result<SldResult> {
    // The tail carries weight (∂ ln p)² ~ (k/r)², so it is cut much deeper
    // than the state tolerance.
    let dim = required_output_dim(rho0.support_max(), r, QFI_TAIL_TOL).max(rho0.dim());
    let out = apply_amplification_channel(rho0, r, dim)?;
    let drho = amplification_generator(out.entries(), r.value());
    sld_from_family(&out, &drho)
}

/// [`channel_qfi`] for `|n₀⟩`.
pub fn fock_qfi_series(n0: usize, r: AccelerationParameter) -> Result<f64> {
    Ok(channel_qfi(&build_fock_state(n0, n0 + 1)?, r)?.qfi)
}

/// `H_max = 4(⟨G²⟩ − ⟨G⟩²) = 4(1 + n̄₀)` for the global two-mode squeezer.
pub fn ultimate_bound(n_bar0: f64) -> f64 {
    4.0 * (1.0 + n_bar0)
}

/// Applies `G = −i(b₁†b₂† − b₁b₂)` to a vector on the `dim2 × dim2` product
/// space, index `n₁·dim2 + n₂`. Components leaving the truncation are dropped.
fn apply_generator(v: &[Complex64], dim2: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::ZERO; v.len()];
    let minus_i = Complex64::new(0.0, -1.0);
    for n1 in 0..dim2 {
        for n2 in 0..dim2 {
            let z = v[n1 * dim2 + n2];
            if z == Complex64::ZERO {
                continue;
            }
            if n1 + 1 < dim2 && n2 + 1 < dim2 {
                let amp = (((n1 + 1) * (n2 + 1)) as f64).sqrt();
                out[(n1 + 1) * dim2 + n2 + 1] += minus_i * amp * z;
            }
            if n1 > 0 && n2 > 0 {
                let amp = ((n1 * n2) as f64).sqrt();
                out[(n1 - 1) * dim2 + n2 - 1] -= minus_i * amp * z;
            }
        }
    }
    out
}

/// `⟨G²⟩ − ⟨G⟩²` on `ρ₀ ⊗ |0⟩⟨0|` with explicit two-mode arithmetic.
pub fn generator_variance(rho0: &FockDensityMatrix, dim2: usize) -> Result<f64> {
    let n_max = rho0.support_max();
    if dim2 < n_max + 2 {
        return Err(Error::Truncation {
            reason: format!("two-mode dimension {dim2} cannot hold G acting on level {n_max}"),
            suggested_dim: n_max + 2,
        });
    }
    let idx = |n1: usize| n1 * dim2;
    let size = dim2 * dim2;
    let mut mean_g = Complex64::ZERO;
    let mut mean_g2 = Complex64::ZERO;
    // Tr[ρ X] = Σ_j ⟨j| X ρ |j⟩ over the columns of ρ ⊗ |0⟩⟨0|.
    for j in 0..=n_max.min(rho0.dim() - 1) {
        let mut col = vec![Complex64::ZERO; size];
        for i in 0..rho0.dim().min(dim2) {
            col[idx(i)] = rho0.entries()[(i, j)];
        }
        let g_col = apply_generator(&col, dim2);
        let g2_col = apply_generator(&g_col, dim2);
        mean_g += g_col[idx(j)];
        mean_g2 += g2_col[idx(j)];
    }
    Ok(mean_g2.re - mean_g.re * mean_g.re)
}

/// Parameter to which a Fisher information about `r` can be transferred.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Parameter {
    R,
    /// `n_T = sinh² r`.
    ThermalPhotons,
    /// Unruh temperature at angular frequency `omega`.
    Temperature { omega: f64 },
    /// Acceleration in m/s² at angular frequency `omega`.
    Acceleration { omega: f64 },
}

/// `dθ/dr` for the target parameter `θ`.
pub fn jacobian(r: AccelerationParameter, target: Parameter) -> Result<f64> {
    let rv = r.value();
    if target == Parameter::R {
        return Ok(1.0);
    }
    if rv == 0.0 {
        return Err(Error::SingularJacobian(format!("dr/d{target:?} diverges at r = 0")));
    }
    let dn_dr = (2.0 * rv).sinh();
    let k = CODATA_2018;
    let dt_dr = |omega: f64| {
        // T = ħω/(k_B L), L = ln(1 + 1/n_T), dL/dn_T = −1/(n_T(n_T + 1)).
        let n = thermal_photon_number(r);
        let l = (1.0 / n).ln_1p();
        k.hbar * omega / (k.k_b * l * l) / (n * (n + 1.0)) * dn_dr
    };
    Ok(match target {
        Parameter::R => 1.0,
        Parameter::ThermalPhotons => dn_dr,
        Parameter::Temperature { omega } => dt_dr(omega),
        Parameter::Acceleration { omega } => 2.0 * std::f64::consts::PI * k.c * k.k_b / k.hbar * dt_dr(omega),
    })
}

/// `I_θ = I_r (∂r/∂θ)²`.
pub fn reparametrize_fisher(i_r: f64, r: AccelerationParameter, target: Parameter) -> Result<f64> {
    let j = jacobian(r, target)?;
    Ok(i_r / (j * j))
}

/// Inverse of [`reparametrize_fisher`]: `I_r = I_θ (∂θ/∂r)²`.
pub fn fisher_to_r(i_target: f64, r: AccelerationParameter, target: Parameter) -> Result<f64> {
    let j = jacobian(r, target)?;
    Ok(i_target * j * j)
}

/// Optimal single-run variance of `n_T`: `(n_T + n_T²)/(1 + n̄₀)`.
pub fn minimum_variance_thermal(n_bar0: f64, n_t: f64) -> f64 {
    (n_t + n_t * n_t) / (1.0 + n_bar0)
}

/// `ε = [(1 + 1/n_T)/(1 + n̄₀)]^{1/2} / √N`.
pub fn relative_error(n_bar0: f64, n_t: f64, repetitions: u64) -> Result<f64> {
    if !(n_t > 0.0) {
        return Err(Error::Domain(format!("thermal photon number must be positive, got {n_t}")));
    }
    if repetitions == 0 {
        return Err(Error::Domain("at least one repetition is required".into()));
    }
    if !(n_bar0 >= 0.0) {
        return Err(Error::Domain(format!("n_bar0 must be nonnegative, got {n_bar0}")));
    }
    Ok(((1.0 + 1.0 / n_t) / (1.0 + n_bar0)).sqrt() / (repetitions as f64).sqrt())
}

/// One point of the three Fisher-information surfaces over `(r, n̄₀)`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct FisherSurfacePoint {
    pub r: f64,
    pub n_bar0: f64,
    pub i_coherent_het: f64,
    pub h_gaussian_opt: f64,
    pub x_star: f64,
    pub h_fock: f64,
}

/// Coherent-heterodyne FI, optimal Gaussian QFI and Fock QFI on the product
/// grid, `r` outermost and `n̄₀` varying fastest.
pub fn fisher_surfaces(r_values: &[f64], n_bar_values: &[f64]) -> Result<Vec<FisherSurfacePoint>> {
    let points: Vec<(f64, f64)> =
        r_values.iter().flat_map(|&r| n_bar_values.iter().map(move |&n| (r, n))).collect();
    points
        .into_par_iter()
        .map(|(rv, n_bar0)| {
            let r = AccelerationParameter::new(rv)?;
            let opt = optimize_gaussian_qfi(n_bar0, r)?;
            Ok(FisherSurfacePoint {
                r: rv,
                n_bar0,
                i_coherent_het: heterodyne_fisher_coherent(n_bar0, r),
                h_gaussian_opt: opt.qfi,
                x_star: opt.x_star,
                h_fock: ultimate_bound(n_bar0),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_channel::{amplify, coherent_dim_for, coherent_state, DEFAULT_TAIL_TOLERANCE};
    use crate::physical_units::r_from_temperature;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    fn r(v: f64) -> AccelerationParameter {
        AccelerationParameter::new(v).unwrap()
    }

    /// Σ_k (∂c)²/c with both terms from the closed-form weights.
    fn fock_series_oracle(n0: usize, rv: f64) -> f64 {
        let kmax = required_kmax(n0, r(rv), 1e-14);
        let c = fock_output_distribution(n0, r(rv), kmax).probabilities;
        let dc = fock_output_derivative(n0, r(rv), kmax);
        c.iter().zip(&dc).filter(|(p, _)| **p > 0.0).map(|(p, d)| d * d / p).sum()
    }

    #[test]
    fn fock_qfi_values() {
        assert_eq!(fock_qfi(0), 4.0);
        assert_eq!(fock_qfi(10), 44.0);
        assert_eq!(ultimate_bound(0.0), 4.0);
        for n in 0..20u64 {
            assert_eq!(ultimate_bound(n as f64), fock_qfi(n));
        }
    }

    #[test]
    fn sld_series_matches_closed_form() {
        for n0 in [0usize, 1, 5, 10] {
            for rv in [0.1, 0.5, 1.0, 1.5] {
                let series = fock_qfi_series(n0, r(rv)).unwrap();
                assert_relative_eq!(series, fock_qfi(n0 as u64), max_relative = 1e-6);
                assert_relative_eq!(series, fock_series_oracle(n0, rv), max_relative = 1e-6);
            }
        }
        assert_abs_diff_eq!(fock_qfi_series(5, r(0.7)).unwrap(), 24.0, epsilon = 1e-6);
    }

    #[test]
    fn diagonal_sld_is_score() {
        let (n0, rv) = (3usize, 0.6f64);
        let out = amplify(&build_fock_state(n0, n0 + 1).unwrap(), r(rv)).unwrap();
        let drho = amplification_generator(out.entries(), rv);
        let res = sld_from_family(&out, &drho).unwrap();
        let (s, c) = (rv.sinh(), rv.cosh());
        for k in 0..20 {
            let score = 2.0 * k as f64 / (s * c) - 2.0 * (n0 as f64 + 1.0) * rv.tanh();
            assert_relative_eq!(res.sld_matrix[(n0 + k, n0 + k)].re, score, max_relative = 1e-9);
        }
        assert_relative_eq!(res.qfi, res.trace_rho_sld_squared(), max_relative = 1e-8);
    }

    #[test]
    fn zero_derivative_gives_zero_sld() {
        let rho = coherent_state(Complex64::new(0.5, 0.1), 20).unwrap();
        let res = sld_from_family(&rho, &DMatrix::zeros(20, 20)).unwrap();
        assert_eq!(res.qfi, 0.0);
        assert!(res.sld_matrix.iter().all(|z| *z == Complex64::ZERO));
    }

    #[test]
    fn sld_rejects_bad_inputs() {
        let rho = build_fock_state(1, 3).unwrap();
        let mut d = DMatrix::zeros(3, 3);
        d[(0, 1)] = Complex64::new(1.0, 0.0);
        assert!(matches!(sld_from_family(&rho, &d), Err(Error::Validation(_))));
        let mut d = DMatrix::zeros(3, 3);
        d[(0, 0)] = Complex64::new(1.0, 0.0);
        assert!(matches!(sld_from_family(&rho, &d), Err(Error::Validation(_))));
    }

    #[test]
    fn sld_satisfies_defining_equation_off_diagonal() {
        let rho0 = coherent_state(Complex64::new(0.6, -0.2), 18).unwrap();
        let rv = 0.4;
        let out = amplify(&rho0, r(rv)).unwrap();
        let drho = amplification_generator(out.entries(), rv);
        let res = sld_from_family(&out, &drho).unwrap();
        assert_relative_eq!(res.qfi, res.trace_rho_sld_squared(), max_relative = 1e-8);
        // Λ is Hermitian.
        let defect = (&res.sld_matrix - res.sld_matrix.adjoint()).norm();
        assert!(defect < 1e-8 * res.sld_matrix.norm().max(1.0));
    }

    #[test]
    fn photon_counting_fisher_on_fock_output() {
        for n0 in [0usize, 3, 5] {
            for rv in [0.2, 0.9] {
                let fi = classical_fisher(&MeasurementModel::fock_photon_counting(n0, DEFAULT_TAIL_TOLERANCE), r(rv)).unwrap();
                assert_abs_diff_eq!(fi.value, fock_qfi(n0 as u64), epsilon = 1e-6);
            }
        }
    }

    #[test]
    fn heterodyne_fisher_matches_formula_and_quadrature() {
        for n in [0.0f64, 1.0, 4.0, 10.0] {
            for rv in [0.2, 0.8, 1.4] {
                let xi0 = Vector2::new(0.0, (2.0 * n).sqrt());
                let model = MeasurementModel::coherent_heterodyne(xi0);
                let fi = classical_fisher(&model, r(rv)).unwrap().value;
                assert_abs_diff_eq!(fi, heterodyne_fisher_coherent(n, r(rv)), epsilon = 1e-6);
            }
        }
        let model = MeasurementModel::coherent_heterodyne(Vector2::new(1.0, 2.0));
        let analytic = classical_fisher(&model, r(0.7)).unwrap().value;
        let quad = classical_fisher_quadrature(&model, r(0.7), 301).unwrap();
        assert_relative_eq!(analytic, quad, max_relative = 1e-6);
    }

    #[test]
    fn finite_difference_derivative_policy() {
        let MeasurementModel::Discrete { prob, .. } = MeasurementModel::fock_photon_counting(2, 1e-12) else {
            unreachable!()
        };
        let model = MeasurementModel::Discrete { prob, dprob: Derivative::CentralDifference { step: 1e-6 } };
        let fi = classical_fisher(&model, r(0.8)).unwrap().value;
        assert_relative_eq!(fi, 12.0, max_relative = 1e-5);
    }

    #[test]
    fn r_independent_model_has_zero_information() {
        let prob: DiscreteEvaluator =
            Arc::new(|_| DiscreteDistribution { probabilities: vec![0.25, 0.5, 0.25], tail_mass: 0.0 });
        let dprob: DiscreteDerivative = Arc::new(|_| vec![0.0; 3]);
        let model = MeasurementModel::Discrete { prob, dprob: Derivative::Analytic(dprob) };
        assert_eq!(classical_fisher(&model, r(0.5)).unwrap().value, 0.0);
        let moments: MomentEvaluator = Arc::new(|_| (Vector2::new(1.0, 0.0), Matrix2::identity()));
        let gauss = MeasurementModel::GaussianPlane { moments, dmoments: Derivative::CentralDifference { step: 1e-4 } };
        assert_eq!(classical_fisher(&gauss, r(0.5)).unwrap().value, 0.0);
    }

    #[test]
    fn unnormalised_model_is_rejected() {
        let prob: DiscreteEvaluator = Arc::new(|_| DiscreteDistribution { probabilities: vec![0.3, 0.3], tail_mass: 0.0 });
        let dprob: DiscreteDerivative = Arc::new(|_| vec![0.0; 2]);
        let model = MeasurementModel::Discrete { prob, dprob: Derivative::Analytic(dprob) };
        assert!(matches!(classical_fisher(&model, r(0.5)), Err(Error::Validation(_))));
    }

    #[test]
    fn information_inequality_for_counting_on_coherent_input() {
        let alpha = Complex64::new(1.2, 0.0);
        let rho0 = coherent_state(alpha, coherent_dim_for(alpha, DEFAULT_TAIL_TOLERANCE)).unwrap();
        for rv in [0.2, 0.7, 1.2] {
            let fi = classical_fisher(&MeasurementModel::photon_counting(rho0.clone()), r(rv)).unwrap().value;
            let qfi = channel_qfi(&rho0, r(rv)).unwrap().qfi;
            assert!(fi <= qfi + 1e-6, "r={rv}: {fi} > {qfi}");
        }
    }

    #[test]
    fn generator_variance_of_fock_and_coherent() {
        let five = build_fock_state(5, 6).unwrap();
        assert_abs_diff_eq!(generator_variance(&five, 8).unwrap(), 6.0, epsilon = 1e-10);
        assert!(matches!(generator_variance(&five, 6), Err(Error::Truncation { .. })));
        let alpha = Complex64::new(0.8, 0.9);
        let rho0 = coherent_state(alpha, coherent_dim_for(alpha, 1e-12)).unwrap();
        let n_bar = crate::fock_channel::mean_photon_number(&rho0);
        assert_abs_diff_eq!(generator_variance(&rho0, rho0.dim() + 1).unwrap(), 1.0 + n_bar, epsilon = 1e-8);
    }

    #[test]
    fn reparametrisation_to_thermal_photons() {
        for (n0, rv) in [(0u64, 0.3f64), (5, 0.9), (10, 1.4)] {
            let i_nt = reparametrize_fisher(fock_qfi(n0), r(rv), Parameter::ThermalPhotons).unwrap();
            let n_t = rv.sinh().powi(2);
            assert_relative_eq!(1.0 / i_nt, minimum_variance_thermal(n0 as f64, n_t), max_relative = 1e-12);
            assert_relative_eq!(1.0 / i_nt, (n_t + n_t * n_t) / (1.0 + n0 as f64), max_relative = 1e-12);
        }
        assert_eq!(reparametrize_fisher(7.0, r(0.4), Parameter::R).unwrap(), 7.0);
        assert!(matches!(
            reparametrize_fisher(4.0, AccelerationParameter::ZERO, Parameter::ThermalPhotons),
            Err(Error::SingularJacobian(_))
        ));
    }

    #[test]
    fn temperature_jacobian_matches_finite_difference() {
        let omega = 1e10;
        for rv in [0.2, 0.8, 1.5] {
            let t = crate::physical_units::temperature_from_r(r(rv), omega).unwrap();
            let h = t * 1e-6;
            let dr_dt = (r_from_temperature(t + h, omega).unwrap().value() - r_from_temperature(t - h, omega).unwrap().value())
                / (2.0 * h);
            let analytic = 1.0 / jacobian(r(rv), Parameter::Temperature { omega }).unwrap();
            assert_relative_eq!(analytic, dr_dt, max_relative = 1e-6);
        }
    }

    #[test]
    fn relative_error_examples() {
        assert_relative_eq!(relative_error(1.0, 1.0, 1).unwrap(), 1.0);
        let e1 = relative_error(3.0, 0.2, 1).unwrap();
        assert_relative_eq!(relative_error(3.0, 0.2, 16).unwrap(), e1 / 4.0, max_relative = 1e-15);
        assert!(relative_error(1.0, 0.0, 1).is_err());
        assert!(relative_error(1.0, -1.0, 1).is_err());
        // ε ≪ 1 once n̄₀ n_T ≫ 1, and ε ≳ 1 below the threshold.
        assert!(relative_error(1e4, 1.0, 1).unwrap() < 0.02);
        assert!(relative_error(1e-4, 1e-2, 1).unwrap() > 1.0);
    }

    proptest! {
        #[test]
        fn reparametrisation_round_trips(i_r in 0.1f64..100.0, rv in 0.01f64..2.0, which in 0usize..4) {
            let omega = 1e10;
            let target = [
                Parameter::R,
                Parameter::ThermalPhotons,
                Parameter::Temperature { omega },
                Parameter::Acceleration { omega },
            ][which];
            let there = reparametrize_fisher(i_r, r(rv), target).unwrap();
            let back = fisher_to_r(there, r(rv), target).unwrap();
            prop_assert!(((back - i_r) / i_r).abs() < 1e-10);
        }

        #[test]
        fn fock_qfi_is_r_independent(n0 in 0usize..8, r1 in 0.05f64..1.5, r2 in 0.05f64..1.5) {
            let a = fock_qfi_series(n0, r(r1)).unwrap();
            let b = fock_qfi_series(n0, r(r2)).unwrap();
            prop_assert!((a - b).abs() < 1e-6);
        }

        #[test]
        fn generator_variance_on_random_diagonal(pops in prop::collection::vec(0.0f64..1.0, 1..8)) {
            let total: f64 = pops.iter().sum();
            prop_assume!(total > 1e-3);
            let p: Vec<f64> = pops.iter().map(|x| x / total).collect();
            let rho0 = FockDensityMatrix::from_diagonal(&p, DEFAULT_TAIL_TOLERANCE).unwrap();
            let n_bar = crate::fock_channel::mean_photon_number(&rho0);
            let v = generator_variance(&rho0, rho0.dim() + 1).unwrap();
            prop_assert!((v - (1.0 + n_bar)).abs() < 1e-8);
        }
    }
}
