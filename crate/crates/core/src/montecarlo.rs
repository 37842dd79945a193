// Copyright 2026 The unruh-metrology Authors
// SPDX-License-Identifier: Apache-2.0

//! Seeded simulation of the two estimation strategies and empirical checks
//! of the Cramér–Rao bound.
//!
//! Every experiment repetition draws from its own ChaCha8 stream selected
//! by the repetition index, so reports are reproducible regardless of how
//! rayon schedules the work.

use nalgebra::Vector2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation_theory::fock_qfi;
use crate::fock_channel::{AccelerationParameter, CountTerms, DEFAULT_TAIL_TOLERANCE};
use crate::gaussian::heterodyne_fisher_coherent;
use crate::numerics::{golden_section_max, pairwise_sum};

const MLE_TOL: f64 = 1e-8;
const Z_95: f64 = 1.959_963_984_540_054;

/// Probe state and measurement pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// Fock input, photon counting.
    #[value(name = "fock-counting", aliases = ["fock_counting", "fock"])]
    #[serde(alias = "fock-counting")]
    FockCounting,
    /// Coherent input, heterodyne detection.
    #[value(name = "coherent-heterodyne", aliases = ["coherent_heterodyne", "coherent"])]
    #[serde(alias = "coherent-heterodyne")]
    CoherentHeterodyne,
}

/// Description of a Monte Carlo estimation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub strategy: Strategy,
    /// `n₀` for Fock probes (must be integral), `|α₀|²` for coherent probes.
    pub probe_energy: f64,
    pub true_r: f64,
    /// Measurement outcomes per experiment (`N`).
    pub samples: usize,
    /// Independent experiments whose estimates form the report statistics.
    pub trials: usize,
    pub seed: u64,
    pub estimator_bounds: (f64, f64),
    pub tail_tolerance: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            strategy: Strategy::FockCounting,
            probe_energy: 5.0,
            true_r: 0.5,
            samples: 10_000,
            trials: 1000,
            seed: 0,
            estimator_bounds: (0.0, 3.0),
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.estimator_bounds;
        if !(lo >= 0.0 && lo < hi && hi.is_finite()) {
            return Err(Error::Validation(format!("invalid estimator bounds ({lo}, {hi})")));
        }
        if !(self.true_r >= lo && self.true_r <= hi) {
            return Err(Error::Validation(format!(
                "true r = {} outside estimator bounds ({lo}, {hi})",
                self.true_r
            )));
        }
        if self.samples == 0 || self.trials == 0 {
            return Err(Error::Validation("samples and trials must be positive".into()));
        }
        if !(self.probe_energy.is_finite() && self.probe_energy >= 0.0) {
            return Err(Error::Validation(format!("invalid probe energy {}", self.probe_energy)));
        }
        if self.strategy == Strategy::FockCounting && self.probe_energy.fract() != 0.0 {
            return Err(Error::Validation(format!(
                "Fock probes need an integral photon number, got {}",
                self.probe_energy
            )));
        }
        if !(self.tail_tolerance > 0.0 && self.tail_tolerance < 1.0) {
            return Err(Error::Validation(format!("invalid tail tolerance {}", self.tail_tolerance)));
        }
        Ok(())
    }

    fn true_parameter(&self) -> Result<AccelerationParameter> {
        AccelerationParameter::new(self.true_r)
    }
}

/// Inverse-CDF sampler of the total photon number `n₀ + k`.
#[derive(Debug, Clone)]
pub struct PhotonCountSampler {
    n0: usize,
    r: AccelerationParameter,
    cdf: Vec<f64>,
}

impl PhotonCountSampler {
    pub fn new(n0: usize, r: AccelerationParameter, tail_tolerance: f64) -> Self {
        let kmax = crate::fock_channel::required_kmax(n0, r, tail_tolerance.min(1e-15));
        let mut acc = 0.0;
        let cdf = CountTerms::new(n0, r)
            .take(kmax + 1)
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        Self { n0, r, cdf }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        let k = self.cdf.partition_point(|&c| c <= u);
        if k < self.cdf.len() {
            return (self.n0 + k) as u64;
        }
        // Beyond the tabulated range; continue the recurrence.
        let mut acc = *self.cdf.last().expect("nonempty table");
        for (k, p) in CountTerms::new(self.n0, self.r).enumerate().skip(self.cdf.len()) {
            acc += p;
            if acc > u || p == 0.0 {
                return (self.n0 + k) as u64;
            }
        }
        unreachable!("count iterator is infinite")
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `count` photon-number outcomes for a Fock input `|n₀⟩` at `r`.
pub fn sample_photon_counts(n0: usize, r: AccelerationParameter, count: usize, seed: u64) -> Vec<u64> {
    let sampler = PhotonCountSampler::new(n0, r, DEFAULT_TAIL_TOLERANCE);
    let mut rng = stream_rng(seed, 0);
    (0..count).map(|_| sampler.sample(&mut rng)).collect()
}

fn heterodyne_draws<R: Rng + ?Sized>(alpha0: Complex64, r: f64, count: usize, rng: &mut R) -> Vec<Complex64> {
    // Quadratures ~ N(cosh r ξ₀, cosh² r), χ = (q + ip)/√2.
    let (c, root2) = (r.cosh(), std::f64::consts::SQRT_2);
    let (q0, p0) = (root2 * alpha0.re, root2 * alpha0.im);
    (0..count)
        .map(|_| {
            let zq: f64 = StandardNormal.sample(rng);
            let zp: f64 = StandardNormal.sample(rng);
            Complex64::new(c * (q0 + zq), c * (p0 + zp)) / root2
        })
        .collect()
}

/// `count` heterodyne outcomes `χ` for a coherent input `|α₀⟩` at `r`.
pub fn sample_heterodyne(alpha0: Complex64, r: AccelerationParameter, count: usize, seed: u64) -> Vec<Complex64> {
    heterodyne_draws(alpha0, r.value(), count, &mut stream_rng(seed, 0))
}

/// Quadrature pair `(q, p) = √2 (Re χ, Im χ)` of a heterodyne outcome.
pub fn quadratures(chi: Complex64) -> Vector2<f64> {
    Vector2::new(chi.re, chi.im) * std::f64::consts::SQRT_2
}

/// Measurement record of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub enum Samples {
    Counts(Vec<u64>),
    Heterodyne(Vec<Complex64>),
}

/// Probe parameters the likelihood needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StrategyContext {
    Fock { n0: usize },
    Coherent { alpha0: Complex64 },
}

/// Maximum-likelihood estimate of `r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleEstimate {
    pub r: f64,
    /// The maximiser sits on an estimator bound.
    pub at_boundary: bool,
}

/// Log-likelihood in terms of sufficient statistics, constants dropped.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Likelihood {
    /// `ℓ = −2N(n₀+1) ln cosh r + 2K ln tanh r` with `K = Σ k_i`.
    Fock { n0: f64, n: f64, added: f64 },
    /// `ℓ = −(S₂ − 2c S₁ + N c² |ξ₀|²)/(2c²) − 2N ln c`, `c = cosh r`.
    Heterodyne { n: f64, s1: f64, s2: f64, xi0_sq: f64 },
}

impl Likelihood {
    fn from_samples(samples: &Samples, ctx: StrategyContext) -> Result<Self> {
        match (samples, ctx) {
            (Samples::Counts(counts), StrategyContext::Fock { n0 }) => {
                if counts.is_empty() {
                    return Err(Error::Validation("no samples".into()));
                }
                let mut added = 0u64;
                for &c in counts {
                    if c < n0 as u64 {
                        return Err(Error::Validation(format!("count {c} below the input photon number {n0}")));
                    }
                    added += c - n0 as u64;
                }
                Ok(Self::Fock { n0: n0 as f64, n: counts.len() as f64, added: added as f64 })
            }
            (Samples::Heterodyne(points), StrategyContext::Coherent { alpha0 }) => {
                if points.is_empty() {
                    return Err(Error::Validation("no samples".into()));
                }
                let xi0 = quadratures(alpha0);
                let xs: Vec<Vector2<f64>> = points.iter().map(|&z| quadratures(z)).collect();
                let s1 = pairwise_sum(&xs.iter().map(|x| x.dot(&xi0)).collect::<Vec<_>>());
                let s2 = pairwise_sum(&xs.iter().map(|x| x.norm_squared()).collect::<Vec<_>>());
                Ok(Self::Heterodyne { n: points.len() as f64, s1, s2, xi0_sq: xi0.norm_squared() })
            }
            _ => Err(Error::Validation("samples do not match the strategy context".into())),
        }
    }

    fn eval(&self, r: f64) -> f64 {
        match *self {
            Self::Fock { n0, n, added } => {
                let base = -2.0 * n * (n0 + 1.0) * r.cosh().ln();
                if added == 0.0 {
                    base
                } else {
                    base + 2.0 * added * r.tanh().ln()
                }
            }
            Self::Heterodyne { n, s1, s2, xi0_sq } => {
                let c = r.cosh();
                -(s2 - 2.0 * c * s1 + n * c * c * xi0_sq) / (2.0 * c * c) - 2.0 * n * c.ln()
            }
        }
    }

    fn maximise(&self, bounds: (f64, f64)) -> MleEstimate {
        if let Self::Fock { added, .. } = *self {
            if added == 0.0 {
                return MleEstimate { r: bounds.0, at_boundary: true };
            }
        }
        let best = golden_section_max(|r| self.eval(r), bounds.0, bounds.1, MLE_TOL);
        MleEstimate { r: best.arg, at_boundary: best.arg == bounds.0 || best.arg == bounds.1 }
    }
}

/// Maximum-likelihood estimate of `r` on `bounds`.
pub fn mle_r(samples: &Samples, ctx: StrategyContext, bounds: (f64, f64)) -> Result<MleEstimate> {
    if !(bounds.0 >= 0.0 && bounds.0 < bounds.1) {
        return Err(Error::Validation(format!("invalid estimator bounds {bounds:?}")));
    }
    Ok(Likelihood::from_samples(samples, ctx)?.maximise(bounds))
}

/// Statistics of a Monte Carlo estimation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub strategy: Strategy,
    pub probe_energy: f64,
    pub true_r: f64,
    pub samples: usize,
    pub trials: usize,
    pub seed: u64,
    pub estimates: Vec<f64>,
    pub empirical_mean: f64,
    pub bias: f64,
    /// Unbiased sample variance across trials; absent with one trial.
    pub empirical_variance: Option<f64>,
    pub fisher_information: f64,
    /// `1/(N I_r)` at the true `r`; absent when `I_r = 0`.
    pub crb: Option<f64>,
    pub variance_ratio: Option<f64>,
    pub confidence_interval_95: Option<(f64, f64)>,
    pub boundary_hits: usize,
    pub undefined_variance: bool,
}

impl ExperimentReport {
    /// `N · Var[ř]`.
    pub fn normalized_variance(&self) -> Option<f64> {
        self.empirical_variance.map(|v| v * self.samples as f64)
    }

    /// Standard deviation of a single estimate.
    pub fn estimate_std(&self) -> Option<f64> {
        self.empirical_variance.map(f64::sqrt)
    }
}

/// Runs `config.trials` independent experiments of `config.samples`
/// outcomes each and reduces the estimates.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let r = config.true_parameter()?;
    let bounds = config.estimator_bounds;
    let (ctx, fisher) = match config.strategy {
        Strategy::FockCounting => {
            let n0 = config.probe_energy as usize;
            (StrategyContext::Fock { n0 }, fock_qfi(n0 as u64))
        }
        Strategy::CoherentHeterodyne => (
            StrategyContext::Coherent { alpha0: Complex64::new(config.probe_energy.sqrt(), 0.0) },
            heterodyne_fisher_coherent(config.probe_energy, r),
        ),
    };
    let sampler = match ctx {
        StrategyContext::Fock { n0 } => Some(PhotonCountSampler::new(n0, r, config.tail_tolerance)),
        StrategyContext::Coherent { .. } => None,
    };

    let results: Vec<MleEstimate> = (0..config.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let mut rng = stream_rng(config.seed, trial);
            let samples = match (&sampler, ctx) {
                (Some(s), _) => Samples::Counts((0..config.samples).map(|_| s.sample(&mut rng)).collect()),
                (None, StrategyContext::Coherent { alpha0 }) => {
                    Samples::Heterodyne(heterodyne_draws(alpha0, r.value(), config.samples, &mut rng))
                }
                (None, StrategyContext::Fock { .. }) => unreachable!("Fock strategy always has a sampler"),
            };
            mle_r(&samples, ctx, bounds)
        })
        .collect::<Result<_>>()?;

    let estimates: Vec<f64> = results.iter().map(|e| e.r).collect();
    let boundary_hits = results.iter().filter(|e| e.at_boundary).count();
    let n = estimates.len() as f64;
    let empirical_mean = pairwise_sum(&estimates) / n;
    let undefined_variance = estimates.len() < 2;
    let empirical_variance = (!undefined_variance).then(|| {
        let sq: Vec<f64> = estimates.iter().map(|e| (e - empirical_mean).powi(2)).collect();
        pairwise_sum(&sq) / (n - 1.0)
    });
    let crb = (fisher > 0.0).then(|| 1.0 / (config.samples as f64 * fisher));
    let variance_ratio = match (empirical_variance, crb) {
        (Some(v), Some(c)) if v > 0.0 => Some(v / c),
        _ => None,
    };
    let confidence_interval_95 = empirical_variance.map(|v| {
        let half = Z_95 * (v / n).sqrt();
        (empirical_mean - half, empirical_mean + half)
    });

    Ok(ExperimentReport {
        strategy: config.strategy,
        probe_energy: config.probe_energy,
        true_r: config.true_r,
        samples: config.samples,
        trials: config.trials,
        seed: config.seed,
        estimates,
        empirical_mean,
        bias: empirical_mean - config.true_r,
        empirical_variance,
        fisher_information: fisher,
        crb,
        variance_ratio,
        confidence_interval_95,
        boundary_hits,
        undefined_variance,
    })
}
