// Copyright 2026 The unruh-metrology Authors
// SPDX-License-Identifier: Apache-2.0

//! Truncated Fock-space states and the Unruh–Hawking amplification channel.
//!
//! The channel maps an input mode `ρ₀` to
//!
//! ```text
//! ρ_r = cosh⁻²r Σ_k (tanh²ᵏ r / k!) (b†)ᵏ (cosh r)^{-b†b} ρ₀ (cosh r)^{-b†b} bᵏ
//! ```
//!
//! which is the solution of `dρ/dr = tanh r (2 b†ρb − bb†ρ − ρbb†)` with
//! `ρ(0) = ρ₀`. In the number basis the Kraus sum only couples the entry
//! `(m, m')` of `ρ₀` to `(m + k, m' + k)` of `ρ_r`, so both the closed form
//! and the master equation are evaluated element-wise without building
//! ladder-operator matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{integrate_dopri5, StepControl};

/// Default bound on probability mass discarded by truncation.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-10;

const HERMITIAN_TOL: f64 = 1e-12;
const POSITIVITY_TOL: f64 = -1e-10;

/// Two-mode squeezing strength `r ≥ 0` of the channel.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, serde::Serialize, serde::Deserialize)]
#[serde(transparent)]
pub struct AccelerationParameter(pub(crate) f64);

impl AccelerationParameter {
    pub const ZERO: Self = Self(0.0);

    pub fn new(r: f64) -> Result<Self> {
        if r.is_finite() && r >= 0.0 {
            Ok(Self(r))
        } else {
            Err(Error::Domain(format!("acceleration parameter must be finite and nonnegative, got {r}")))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `tanh² r`, the success-complement of the photon-count distribution.
    #[inline]
    pub fn tanh_sq(self) -> f64 {
        self.0.tanh().powi(2)
    }
}

impl TryFrom<f64> for AccelerationParameter {
    type Error = Error;
    fn try_from(r: f64) -> Result<Self> {
        Self::new(r)
    }
}

/// Truncated number-basis density operator.
///
/// `tail_tolerance` bounds the probability mass that the truncation has
/// discarded, so the trace lies in `[1 − tail_tolerance, 1]` up to rounding.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDensityMatrix {
    entries: DMatrix<Complex64>,
    tail_tolerance: f64,
}

impl FockDensityMatrix {
    /// Wraps a matrix after checking Hermiticity and trace.
    pub fn from_matrix(entries: DMatrix<Complex64>, tail_tolerance: f64) -> Result<Self> {
        let rho = Self::from_parts(entries, tail_tolerance)?;
        rho.check_hermitian()?;
        let tr = rho.trace();
        if (tr - 1.0).abs() > tail_tolerance.max(1e-12) {
            return Err(Error::Validation(format!(
                "trace {tr} differs from 1 by more than the tail tolerance {tail_tolerance:e}"
            )));
        }
        Ok(rho)
    }

    fn from_parts(entries: DMatrix<Complex64>, tail_tolerance: f64) -> Result<Self> {
        if entries.nrows() == 0 || entries.nrows() != entries.ncols() {
            return Err(Error::Validation(format!(
                "density matrix must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        if !(tail_tolerance.is_finite() && tail_tolerance >= 0.0) {
            return Err(Error::Validation(format!("invalid tail tolerance {tail_tolerance}")));
        }
        Ok(Self { entries, tail_tolerance })
    }

    /// Diagonal state with the given populations.
    pub fn from_diagonal(populations: &[f64], tail_tolerance: f64) -> Result<Self> {
        if populations.iter().any(|&p| !(p.is_finite() && p >= 0.0)) {
            return Err(Error::Validation("populations must be finite and nonnegative".into()));
        }
        let dim = populations.len();
        let m = DMatrix::from_fn(dim, dim, |i, j| if i == j { Complex64::new(populations[i], 0.0) } else { Complex64::ZERO });
        Self::from_matrix(m, tail_tolerance)
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn tail_tolerance(&self) -> f64 {
        self.tail_tolerance
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).sum()
    }

    pub fn populations(&self) -> Vec<f64> {
        (0..self.dim()).map(|i| self.entries[(i, i)].re).collect()
    }

    /// Largest occupied number state (diagonal entry strictly positive).
    pub fn support_max(&self) -> usize {
        (0..self.dim()).rev().find(|&i| self.entries[(i, i)].re > 0.0).unwrap_or(0)
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let d = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    worst = worst.max(self.entries[(i, j)].norm());
                }
            }
        }
        worst
    }

    fn check_hermitian(&self) -> Result<()> {
        let defect = self.max_hermiticity_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::Validation(format!("matrix is not Hermitian (defect {defect:e})")));
        }
        Ok(())
    }

    /// Eigenvalues in ascending order from a Hermitian eigendecomposition.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let eig = nalgebra::SymmetricEigen::new(self.entries.clone());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Errors if an eigenvalue falls below `−1e-10`.
    pub fn check_positive(&self) -> Result<()> {
        let min = self.min_eigenvalue();
        if min < POSITIVITY_TOL {
            return Err(Error::Validation(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// Frobenius distance, zero-padding the smaller matrix.
    pub fn frobenius_distance(&self, other: &Self) -> f64 {
        let d = self.dim().max(other.dim());
        let get = |m: &DMatrix<Complex64>, i: usize, j: usize| {
            if i < m.nrows() && j < m.ncols() {
                m[(i, j)]
            } else {
                Complex64::ZERO
            }
        };
        let mut acc = 0.0;
        for i in 0..d {
            for j in 0..d {
                acc += (get(&self.entries, i, j) - get(&other.entries, i, j)).norm_sqr();
            }
        }
        acc.sqrt()
    }

    /// Row-major CSV dump, each entry written as an `re,im` pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.dim() {
            let row: Vec<String> = (0..self.dim())
                .map(|j| {
                    let z = self.entries[(i, j)];
                    format!("{:.17e},{:.17e}", z.re, z.im)
                })
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Number state `|n⟩⟨n|` in a `dim`-dimensional truncation.
pub fn build_fock_state(n: usize, dim: usize) -> Result<FockDensityMatrix> {
    if n >= dim {
        return Err(Error::IndexOutOfTruncation { index: n, dim });
    }
    let mut m = DMatrix::zeros(dim, dim);
    m[(n, n)] = Complex64::ONE;
    FockDensityMatrix::from_parts(m, DEFAULT_TAIL_TOLERANCE)
}

/// Poisson probability mass beyond index `dim − 1` for mean `mean`.
pub fn poisson_tail(mean: f64, dim: usize) -> f64 {
    if mean == 0.0 {
        return 0.0;
    }
    // Sum the tail directly so it is not swamped by cancellation against 1.
    let mut ln_term = -mean + dim as f64 * mean.ln() - ln_factorial(dim);
    let mut tail = 0.0;
    let mut k = dim;
    loop {
        let term = ln_term.exp();
        tail += term;
        let ratio = mean / (k + 1) as f64;
        if ratio < 0.5 && term * ratio / (1.0 - ratio) <= tail * 1e-17 + f64::MIN_POSITIVE {
            break;
        }
        k += 1;
        ln_term += ratio.ln();
    }
    tail
}

fn ln_factorial(n: usize) -> f64 {
    (1..=n).map(|i| (i as f64).ln()).sum()
}

/// Smallest truncation whose Poisson tail for `|α|²` is below `tolerance`.
pub fn coherent_dim_for(alpha: Complex64, tolerance: f64) -> usize {
    let mean = alpha.norm_sqr();
    let mut dim = 1;
    while poisson_tail(mean, dim) >= tolerance {
        dim += 1;
    }
    dim
}

/// Coherent state `|α⟩⟨α|` with the default tail tolerance.
pub fn coherent_state(alpha: Complex64, dim: usize) -> Result<FockDensityMatrix> {
    coherent_state_with_tolerance(alpha, dim, DEFAULT_TAIL_TOLERANCE)
}

/// Coherent state; errors when the Poisson tail beyond `dim − 1` exceeds
/// `tail_tolerance`. The truncated amplitudes are not renormalised.
pub fn coherent_state_with_tolerance(alpha: Complex64, dim: usize, tail_tolerance: f64) -> Result<FockDensityMatrix> {
    let mean = alpha.norm_sqr();
    let tail = poisson_tail(mean, dim);
    if dim == 0 || tail > tail_tolerance {
        return Err(Error::Truncation {
            reason: format!("Poisson tail {tail:e} for |alpha|^2 = {mean} beyond dimension {dim}"),
            suggested_dim: coherent_dim_for(alpha, tail_tolerance),
        });
    }
    // c_n = e^{-|α|²/2} αⁿ/√n!, built by the ratio c_n = c_{n-1} α/√n.
    let mut amps = Vec::with_capacity(dim);
    let mut c = Complex64::new((-0.5 * mean).exp(), 0.0);
    for n in 0..dim {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        amps.push(c);
    }
    let m = DMatrix::from_fn(dim, dim, |i, j| amps[i] * amps[j].conj());
    FockDensityMatrix::from_parts(m, tail_tolerance)
}

/// Photon-count distribution `c_{n₀,k}(r)` of a Fock input, `k = 0..=kmax`.
#[derive(Debug, Clone, PartialEq)]
pub struct FockDistribution {
    pub n0: usize,
    pub probabilities: Vec<f64>,
    /// Certified bound on `Σ_{k > kmax} c_{n₀,k}`.
    pub tail_mass: f64,
}

impl FockDistribution {
    /// Mean of the total photon number `n₀ + k` over the retained terms.
    pub fn mean_total_photons(&self) -> f64 {
        self.probabilities.iter().enumerate().map(|(k, p)| (self.n0 + k) as f64 * p).sum()
    }
}

/// Iterates `c_{n₀,k}(r)` for `k = 0, 1, ...` in log space.
///
/// `ln c_{n,0} = −2(n+1) ln cosh r`, `c_{n,k} = c_{n,k−1} · t (n+k)/k`.
#[derive(Debug, Clone)]
pub(crate) struct CountTerms {
    n0: f64,
    ln_t: f64,
    ln_term: f64,
    k: usize,
    degenerate: bool,
}

impl CountTerms {
    pub(crate) fn new(n0: usize, r: AccelerationParameter) -> Self {
        let t = r.tanh_sq();
        Self {
            n0: n0 as f64,
            ln_t: t.ln(),
            ln_term: -2.0 * (n0 as f64 + 1.0) * r.value().cosh().ln(),
            k: 0,
            degenerate: t == 0.0,
        }
    }

    /// Ratio `c_{k+1}/c_k` for the current `k`.
    fn next_ratio(&self) -> f64 {
        if self.degenerate {
            0.0
        } else {
            (self.ln_t + ((self.n0 + self.k as f64 + 1.0) / (self.k as f64 + 1.0)).ln()).exp()
        }
    }
}

impl Iterator for CountTerms {
    type Item = f64;
    fn next(&mut self) -> Option<f64> {
        let value = if self.degenerate && self.k > 0 { 0.0 } else { self.ln_term.exp() };
        self.k += 1;
        if !self.degenerate {
            self.ln_term += self.ln_t + ((self.n0 + self.k as f64) / self.k as f64).ln();
        }
        Some(value)
    }
}

/// Terms `c_{n₀,0..}` up to the point where the geometric remainder bound is
/// negligible, together with that remainder bound.
fn count_terms_to_convergence(n0: usize, r: AccelerationParameter, min_len: usize) -> (Vec<f64>, f64) {
    let mut it = CountTerms::new(n0, r);
    let mut terms = Vec::new();
    let mut total = 0.0;
    loop {
        let ratio = it.next_ratio();
        let term = it.next().expect("infinite iterator");
        terms.push(term);
        total += term;
        if terms.len() >= min_len && ratio < 1.0 {
            let remainder = term * ratio / (1.0 - ratio);
            if remainder <= 1e-18 * total.max(1e-300) {
                return (terms, remainder);
            }
        }
    }
}

/// `Σ_{k > kmax} c_{n₀,k}(r)` computed from the far side, free of
/// cancellation against one.
pub fn negative_binomial_tail(n0: usize, r: AccelerationParameter, kmax: usize) -> f64 {
    let (terms, remainder) = count_terms_to_convergence(n0, r, kmax + 2);
    terms[kmax + 1..].iter().rev().sum::<f64>() + remainder
}

/// Smallest `kmax` whose count tail is below `tolerance`.
pub fn required_kmax(n0: usize, r: AccelerationParameter, tolerance: f64) -> usize {
    weighted_kmax(n0, r, tolerance, |_| 1.0)
}

/// Smallest `k` with `Σ_{j > k} w(j) c_{n₀,j} < tolerance`.
fn weighted_kmax(n0: usize, r: AccelerationParameter, tolerance: f64, w: impl Fn(usize) -> f64) -> usize {
    let (terms, remainder) = count_terms_to_convergence(n0, r, 1);
    let mut tail = remainder * w(terms.len());
    for k in (0..terms.len()).rev() {
        let next = tail + w(k) * terms[k];
        if next >= tolerance {
            return k;
        }
        tail = next;
    }
    0
}

/// `c_{n₀,k}(r) = C(n₀+k, n₀) cosh^{-2(n₀+1)} r tanh^{2k} r` for `k ≤ kmax`.
pub fn fock_output_distribution(n0: usize, r: AccelerationParameter, kmax: usize) -> FockDistribution {
    let probabilities: Vec<f64> = CountTerms::new(n0, r).take(kmax + 1).collect();
    let tail_mass = negative_binomial_tail(n0, r, kmax);
    FockDistribution { n0, probabilities, tail_mass }
}

/// `∂c_{n₀,k}/∂r = c_{n₀,k} (2k/(sinh r cosh r) − 2(n₀+1) tanh r)`.
pub fn fock_output_derivative(n0: usize, r: AccelerationParameter, kmax: usize) -> Vec<f64> {
    let rv = r.value();
    if rv == 0.0 {
        return vec![0.0; kmax + 1];
    }
    let (s, c) = (rv.sinh(), rv.cosh());
    CountTerms::new(n0, r)
        .take(kmax + 1)
        .enumerate()
        .map(|(k, p)| p * (2.0 * k as f64 / (s * c) - 2.0 * (n0 as f64 + 1.0) * rv.tanh()))
        .collect()
}

/// Output dimension required for inputs supported on `0..=n_max`: both the
/// discarded mass and the discarded photon number stay below `tolerance`.
pub fn required_output_dim(n_max: usize, r: AccelerationParameter, tolerance: f64) -> usize {
    n_max + weighted_kmax(n_max, r, tolerance, |k| (n_max + k + 1) as f64) + 1
}

/// `⟨n̂⟩ = Tr[ρ b†b]`.
pub fn mean_photon_number(rho: &FockDensityMatrix) -> f64 {
    (0..rho.dim()).map(|n| n as f64 * rho.entries[(n, n)].re).sum::<f64>().max(0.0)
}

/// Closed-form channel output in a `dim_out`-dimensional truncation.
///
/// Errors when the count tail of the highest occupied input level beyond
/// `dim_out` exceeds the input's tail tolerance.
pub fn apply_amplification_channel(
    rho0: &FockDensityMatrix,
    r: AccelerationParameter,
    dim_out: usize,
) -> Result<FockDensityMatrix> {
    let tol = rho0.tail_tolerance;
    let n_max = rho0.support_max();
    let needed = required_output_dim(n_max, r, tol);
    if dim_out < n_max + 1 {
        return Err(Error::Truncation {
            reason: format!("output dimension {dim_out} too small for input support {n_max} at r = {}", r.value()),
            suggested_dim: needed,
        });
    }
    let lost = negative_binomial_tail(n_max, r, dim_out - 1 - n_max);
    if lost > tol {
        return Err(Error::Truncation {
            reason: format!("discarded mass {lost:e} exceeds tolerance {tol:e}"),
            suggested_dim: needed,
        });
    }

    let rv = r.value();
    let mut out = DMatrix::<Complex64>::zeros(dim_out, dim_out);
    if rv == 0.0 {
        let d = rho0.dim().min(dim_out);
        out.view_mut((0, 0), (d, d)).copy_from(&rho0.entries.view((0, 0), (d, d)));
    } else {
        let ln_cosh = rv.cosh().ln();
        let ln_t = r.tanh_sq().ln();
        let d_in = rho0.dim();
        for m in 0..d_in {
            for mp in 0..d_in {
                let z = rho0.entries[(m, mp)];
                if z == Complex64::ZERO {
                    continue;
                }
                // w_k = sqrt(C(m+k,k) C(m'+k,k)) t^k cosh^{-(m+m'+2)} r
                let mut ln_w = -((m + mp + 2) as f64) * ln_cosh;
                let mut k = 0;
                while m.max(mp) + k < dim_out {
                    out[(m + k, mp + k)] += z * ln_w.exp();
                    k += 1;
                    ln_w += ln_t + 0.5 * (((m + k) * (mp + k)) as f64).ln() - (k as f64).ln();
                }
            }
        }
    }
    FockDensityMatrix::from_parts(out, tol + lost)
}

/// Closed-form channel output with the output dimension chosen by the
/// truncation policy.
pub fn amplify(rho0: &FockDensityMatrix, r: AccelerationParameter) -> Result<FockDensityMatrix> {
    let dim_out = required_output_dim(rho0.support_max(), r, rho0.tail_tolerance).max(rho0.dim());
    apply_amplification_channel(rho0, r, dim_out)
}

/// `tanh r · (2b†ρb − bb†ρ − ρbb†)` evaluated on the retained window.
///
/// Entry `(m, n)` only depends on `ρ[m, n]` and `ρ[m−1, n−1]`, so the window
/// is closed under the generator and this is the exact derivative of the
/// truncated entries.
pub fn amplification_generator(rho: &DMatrix<Complex64>, r: f64) -> DMatrix<Complex64> {
    let d = rho.nrows();
    let g = r.tanh();
    DMatrix::from_fn(d, d, |m, n| {
        let mut v = -((m + n + 2) as f64) * rho[(m, n)];
        if m > 0 && n > 0 {
            v += 2.0 * ((m * n) as f64).sqrt() * rho[(m - 1, n - 1)];
        }
        g * v
    })
}

/// Integrates the master equation from 0 to `r_final` in the policy output
/// dimension; independent of the Kraus-sum evaluation.
pub fn integrate_master_equation(
    rho0: &FockDensityMatrix,
    r_final: AccelerationParameter,
    control: &StepControl,
) -> Result<FockDensityMatrix> {
    integrate_master_equation_observed(rho0, r_final, control, |_, _| {})
}

/// As [`integrate_master_equation`], calling `observe(r, trace)` after each
/// accepted step.
pub fn integrate_master_equation_observed<O: FnMut(f64, f64)>(
    rho0: &FockDensityMatrix,
    r_final: AccelerationParameter,
    control: &StepControl,
    mut observe: O,
) -> Result<FockDensityMatrix> {
    let tol = rho0.tail_tolerance;
    let n_max = rho0.support_max();
    let dim = required_output_dim(n_max, r_final, tol).max(rho0.dim());
    let lost = negative_binomial_tail(n_max, r_final, dim - 1 - n_max);

    let mut y0 = vec![0.0; 2 * dim * dim];
    for i in 0..rho0.dim() {
        for j in 0..rho0.dim() {
            let z = rho0.entries[(i, j)];
            y0[2 * (i * dim + j)] = z.re;
            y0[2 * (i * dim + j) + 1] = z.im;
        }
    }
    let rhs = |r: f64, y: &[f64], dy: &mut [f64]| {
        let g = r.tanh();
        for m in 0..dim {
            for n in 0..dim {
                let idx = 2 * (m * dim + n);
                let diag = -((m + n + 2) as f64);
                let mut re = diag * y[idx];
                let mut im = diag * y[idx + 1];
                if m > 0 && n > 0 {
                    let prev = 2 * ((m - 1) * dim + n - 1);
                    let c = 2.0 * ((m * n) as f64).sqrt();
                    re += c * y[prev];
                    im += c * y[prev + 1];
                }
                dy[idx] = g * re;
                dy[idx + 1] = g * im;
            }
        }
    };
    let y = integrate_dopri5(rhs, 0.0, r_final.value(), &y0, control, |r, y| {
        let tr: f64 = (0..dim).map(|i| y[2 * (i * dim + i)]).sum();
        observe(r, tr);
    })?;
    let m = DMatrix::from_fn(dim, dim, |i, j| Complex64::new(y[2 * (i * dim + j)], y[2 * (i * dim + j) + 1]));
    FockDensityMatrix::from_parts(m, tol + lost)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn r(v: f64) -> AccelerationParameter {
        AccelerationParameter::new(v).unwrap()
    }

    #[test]
    fn acceleration_parameter_rejects_negative_and_nan() {
        assert!(AccelerationParameter::new(-0.1).is_err());
        assert!(AccelerationParameter::new(f64::NAN).is_err());
        assert!(AccelerationParameter::new(f64::INFINITY).is_err());
    }

    #[test]
    fn fock_state_basics() {
        let vac = build_fock_state(0, 8).unwrap();
        assert_eq!(vac.entries()[(0, 0)], Complex64::ONE);
        assert_eq!(vac.trace(), 1.0);
        let three = build_fock_state(3, 10).unwrap();
        assert_eq!(mean_photon_number(&three), 3.0);
        assert_eq!(build_fock_state(10, 10).unwrap_err(), Error::IndexOutOfTruncation { index: 10, dim: 10 });
    }

    #[test]
    fn coherent_state_vacuum_and_mean() {
        let vac = coherent_state(Complex64::ZERO, 8).unwrap();
        assert_abs_diff_eq!(vac.frobenius_distance(&build_fock_state(0, 8).unwrap()), 0.0, epsilon = 1e-15);
        let alpha = Complex64::new(1.0, 0.0);
        let dim = coherent_dim_for(alpha, DEFAULT_TAIL_TOLERANCE);
        let rho = coherent_state(alpha, dim).unwrap();
        assert_abs_diff_eq!(mean_photon_number(&rho), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn coherent_state_tail_error() {
        // Poisson(4) mass beyond index 11, summed by brute force.
        let mut p = (-4.0f64).exp();
        let mut head = 0.0;
        for n in 0..12 {
            if n > 0 {
                p *= 4.0 / n as f64;
            }
            head += p;
        }
        let tail = 1.0 - head;
        assert!(tail > 1e-12, "oracle tail {tail}");
        assert_abs_diff_eq!(poisson_tail(4.0, 12), tail, epsilon = 1e-15);
        match coherent_state_with_tolerance(Complex64::new(0.0, 2.0), 12, 1e-12) {
            Err(Error::Truncation { suggested_dim, .. }) => assert!(suggested_dim > 12),
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn identity_at_zero() {
        let rho = coherent_state(Complex64::new(0.7, -0.4), 20).unwrap();
        let out = apply_amplification_channel(&rho, AccelerationParameter::ZERO, 20).unwrap();
        assert!(out.frobenius_distance(&rho) <= 1e-12);
    }

    #[test]
    fn vacuum_goes_to_geometric() {
        let rv = 0.5f64;
        let out = amplify(&build_fock_state(0, 1).unwrap(), r(rv)).unwrap();
        let t = rv.tanh().powi(2);
        for k in 0..out.dim() {
            let expect = (1.0 - t) * t.powi(k as i32);
            assert_abs_diff_eq!(out.entries()[(k, k)].re, expect, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(mean_photon_number(&out), rv.sinh().powi(2), epsilon = 1e-9);
    }

    #[test]
    fn fock_input_matches_count_distribution() {
        for &(n0, rv) in &[(3usize, 0.4f64), (7, 1.1)] {
            let out = amplify(&build_fock_state(n0, n0 + 1).unwrap(), r(rv)).unwrap();
            let (c, s) = (rv.cosh(), rv.tanh());
            // Brute-force binomial coefficient in floating point.
            for k in 0..(out.dim() - n0) {
                let binom: f64 = (1..=k).map(|j| (n0 + j) as f64 / j as f64).product();
                let expect = binom * c.powi(-2 * (n0 as i32 + 1)) * s.powi(2 * k as i32);
                assert_abs_diff_eq!(out.entries()[(n0 + k, n0 + k)].re, expect, epsilon = 1e-14);
            }
            assert!(out.max_off_diagonal() <= 1e-12);
        }
    }

    #[test]
    fn insufficient_output_dim_errors_with_hint() {
        let rho = build_fock_state(2, 3).unwrap();
        match apply_amplification_channel(&rho, r(1.0), 10) {
            Err(Error::Truncation { suggested_dim, .. }) => {
                assert_eq!(suggested_dim, required_output_dim(2, r(1.0), DEFAULT_TAIL_TOLERANCE));
                assert!(apply_amplification_channel(&rho, r(1.0), suggested_dim).is_ok());
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn count_distribution_for_vacuum_is_geometric() {
        let rv = 0.8f64;
        let t = rv.tanh().powi(2);
        let d = fock_output_distribution(0, r(rv), 40);
        for (k, p) in d.probabilities.iter().enumerate() {
            assert_abs_diff_eq!(*p, (1.0 - t) * t.powi(k as i32), epsilon = 1e-15);
        }
        // Closed-form geometric tail t^{kmax+1}.
        assert_abs_diff_eq!(d.tail_mass, t.powi(41), epsilon = 1e-15);
    }

    #[test]
    fn count_distribution_normalises_and_has_the_energy_mean() {
        for &n0 in &[0usize, 1, 5, 10] {
            for &rv in &[0.1, 0.5, 1.0, 1.5] {
                let kmax = required_kmax(n0, r(rv), 1e-12);
                let d = fock_output_distribution(n0, r(rv), kmax);
                let total: f64 = d.probabilities.iter().sum();
                assert!((1.0 - total).abs() < 1e-10, "n0={n0} r={rv} total={total}");
                assert!(d.tail_mass < 1e-12);
                assert!(d.probabilities.iter().all(|&p| (0.0..=1.0).contains(&p)));
                let expect = n0 as f64 + rv.sinh().powi(2) * (n0 as f64 + 1.0);
                assert!((d.mean_total_photons() - expect).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn count_derivative_matches_finite_difference() {
        let (n0, rv, h) = (4usize, 0.6f64, 1e-6);
        let d = fock_output_derivative(n0, r(rv), 30);
        let hi = fock_output_distribution(n0, r(rv + h), 30).probabilities;
        let lo = fock_output_distribution(n0, r(rv - h), 30).probabilities;
        for k in 0..=30 {
            assert_abs_diff_eq!(d[k], (hi[k] - lo[k]) / (2.0 * h), epsilon = 1e-8);
        }
    }

    #[test]
    fn large_photon_numbers_do_not_overflow() {
        let d = fock_output_distribution(400, r(0.3), 2000);
        let total: f64 = d.probabilities.iter().sum();
        assert!((total - 1.0).abs() < 1e-10);
    }

    #[test]
    fn master_equation_reproduces_closed_form_for_vacuum() {
        let vac = build_fock_state(0, 1).unwrap();
        let closed = amplify(&vac, r(0.5)).unwrap();
        let mut worst: f64 = 0.0;
        let ode = integrate_master_equation_observed(&vac, r(0.5), &StepControl::default(), |_, tr| {
            worst = worst.max((tr - 1.0).abs());
        })
        .unwrap();
        assert!(closed.frobenius_distance(&ode) < 1e-6);
        assert!(worst < 1e-8);
    }

    #[test]
    fn master_equation_zero_length() {
        let rho = build_fock_state(2, 5).unwrap();
        let out = integrate_master_equation(&rho, AccelerationParameter::ZERO, &StepControl::default()).unwrap();
        assert!(out.frobenius_distance(&rho) == 0.0);
    }

    #[test]
    fn generator_is_derivative_of_closed_form() {
        let rho0 = coherent_state(Complex64::new(0.5, 0.3), 16).unwrap();
        let (rv, h) = (0.7, 1e-5);
        let dim = 120;
        let out = apply_amplification_channel(&rho0, r(rv), dim).unwrap();
        let hi = apply_amplification_channel(&rho0, r(rv + h), dim).unwrap();
        let lo = apply_amplification_channel(&rho0, r(rv - h), dim).unwrap();
        let fd = (hi.entries() - lo.entries()) / Complex64::new(2.0 * h, 0.0);
        let gen = amplification_generator(out.entries(), rv);
        assert!((fd - gen).norm() < 1e-7);
    }

    #[test]
    fn printed_right_hand_ordering_is_not_trace_preserving() {
        // Kraus sum with (cosh r)^{-bb†} on the right of ρ₀ and N_r = cosh⁻²r.
        // On |n⟩ this multiplies every weight by an extra 1/cosh r.
        let (n0, rv) = (2usize, 0.9f64);
        let c = rv.cosh();
        let t2 = rv.tanh().powi(2);
        let mut trace = 0.0;
        for k in 0..400 {
            let binom: f64 = (1..=k).map(|j| (n0 + j) as f64 / j as f64).product();
            let left = c.powi(-(n0 as i32));
            let right = c.powi(-(n0 as i32 + 1));
            trace += c.powi(-2) * t2.powi(k as i32) * binom * left * right;
        }
        assert_abs_diff_eq!(trace, 1.0 / c, epsilon = 1e-12);
        let ours = amplify(&build_fock_state(n0, n0 + 1).unwrap(), r(rv)).unwrap();
        assert_abs_diff_eq!(ours.trace(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn csv_dump_layout() {
        let rho = build_fock_state(1, 2).unwrap();
        let csv = rho.to_csv();
        let rows: Vec<&str> = csv.lines().collect();
        assert_eq!(rows.len(), 2);
        assert_eq!(rows[1].split(',').count(), 4);
        let vals: Vec<f64> = rows[1].split(',').map(|s| s.parse().unwrap()).collect();
        assert_eq!(vals, vec![0.0, 0.0, 1.0, 0.0]);
    }

    fn random_mixed(dim: usize, seed_vals: &[f64]) -> FockDensityMatrix {
        // ρ = A A† / Tr(A A†) from a pseudo-random complex matrix.
        let a = DMatrix::from_fn(dim, dim, |i, j| {
            let k = (i * dim + j) % seed_vals.len();
            Complex64::new(seed_vals[k], seed_vals[(k + 1) % seed_vals.len()] - 0.5)
        });
        let m = &a * a.adjoint();
        let tr: f64 = (0..dim).map(|i| m[(i, i)].re).sum();
        let mut m = m / Complex64::new(tr, 0.0);
        for i in 0..dim {
            for j in 0..i {
                m[(i, j)] = m[(j, i)].conj();
            }
        }
        FockDensityMatrix::from_matrix(m, DEFAULT_TAIL_TOLERANCE).unwrap()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn channel_preserves_trace_hermiticity_positivity_and_energy_law(
            vals in prop::collection::vec(0.0f64..1.0, 7),
            dim in 1usize..6,
            rv in 0.0f64..1.5,
        ) {
            let rho0 = random_mixed(dim, &vals);
            let out = amplify(&rho0, r(rv)).unwrap();
            prop_assert!((out.trace() - rho0.trace()).abs() <= rho0.tail_tolerance());
            prop_assert!(out.max_hermiticity_defect() <= 1e-12);
            prop_assert!(out.min_eigenvalue() >= -1e-10);
            let n0 = mean_photon_number(&rho0);
            let expect = n0 + rv.sinh().powi(2) * (n0 + 1.0);
            prop_assert!((mean_photon_number(&out) - expect).abs() < 1e-8);
        }

        #[test]
        fn output_energy_strictly_increases_in_r(n0 in 0usize..6, r1 in 0.0f64..1.4, dr in 0.01f64..0.1) {
            let rho0 = build_fock_state(n0, n0 + 1).unwrap();
            let a = mean_photon_number(&amplify(&rho0, r(r1)).unwrap());
            let b = mean_photon_number(&amplify(&rho0, r(r1 + dr)).unwrap());
            prop_assert!(b > a);
        }
    }
}
