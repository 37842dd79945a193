// Copyright 2026 The unruh-metrology Authors
// SPDX-License-Identifier: Apache-2.0

//! Physical constants and conversions between acceleration, black-hole mass,
//! temperature, the acceleration parameter `r` and the thermal photon number
//! `n_T = sinh² r`.
//!
//! | constant | value | unit |
//! |----------|-------|------|
//! | ħ        | 1.054571817e-34 | J·s |
//! | c        | 299792458       | m/s |
//! | k_B      | 1.380649e-23    | J/K |
//! | G        | 6.67430e-11     | m³/(kg·s²) |
//! | g        | 9.80665         | m/s² |
//!
//! Mode frequencies are angular (rad/s) wherever `ħω` appears. Use
//! [`OmegaConvention`] to read a frequency given in Hz.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimation_theory::relative_error;
use crate::fock_channel::AccelerationParameter;

/// CODATA 2018 values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub c: f64,
    pub k_b: f64,
    pub g_newton: f64,
    pub g_std: f64,
}

pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
    hbar: 1.054_571_817e-34,
    c: 299_792_458.0,
    k_b: 1.380_649e-23,
    g_newton: 6.674_30e-11,
    g_std: 9.806_65,
};

/// How a user-supplied frequency is to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaConvention {
    /// Value is already in rad/s.
    #[default]
    Angular,
    /// Value is in Hz; multiplied by 2π.
    Ordinary,
}

impl OmegaConvention {
    pub fn to_angular(self, value: f64) -> f64 {
        match self {
            Self::Angular => value,
            Self::Ordinary => 2.0 * PI * value,
        }
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if omega.is_finite() && omega > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("mode frequency must be positive, got {omega}")))
    }
}

/// `T = ħa/(2πck_B)`.
pub fn unruh_temperature(a: f64) -> Result<f64> {
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::Domain(format!("acceleration must be nonnegative, got {a}")));
    }
    let k = CODATA_2018;
    Ok(k.hbar * a / (2.0 * PI * k.c * k.k_b))
}

/// Inverse of [`unruh_temperature`].
pub fn acceleration_from_temperature(t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("temperature must be nonnegative, got {t}")));
    }
    let k = CODATA_2018;
    Ok(2.0 * PI * k.c * k.k_b * t / k.hbar)
}

/// `T = ħc³/(8πGMk_B)`.
pub fn hawking_temperature(mass: f64) -> Result<f64> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::Domain(format!("black-hole mass must be positive, got {mass}")));
    }
    let k = CODATA_2018;
    Ok(k.hbar * k.c.powi(3) / (8.0 * PI * k.g_newton * mass * k.k_b))
}

/// Inverse of [`hawking_temperature`].
pub fn mass_from_hawking_temperature(t: f64) -> Result<f64> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::Domain(format!("temperature must be positive, got {t}")));
    }
    let k = CODATA_2018;
    Ok(k.hbar * k.c.powi(3) / (8.0 * PI * k.g_newton * t * k.k_b))
}

/// Bose–Einstein occupation `1/(e^{ħω/k_BT} − 1)`.
pub fn bose_einstein_occupation(t: f64, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("temperature must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(0.0);
    }
    let k = CODATA_2018;
    Ok(1.0 / (k.hbar * omega / (k.k_b * t)).exp_m1())
}

/// Solves `cosh⁻² r = 1 − exp(−ħω/k_BT)`.
pub fn r_from_temperature(t: f64, omega: f64) -> Result<AccelerationParameter> {
    let n_t = bose_einstein_occupation(t, omega)?;
    r_from_thermal_photons(n_t)
}

/// Inverse of [`r_from_temperature`]; `T = ħω / (k_B ln(1 + 1/n_T))`.
pub fn temperature_from_r(r: AccelerationParameter, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    let n_t = thermal_photon_number(r);
    if n_t == 0.0 {
        return Ok(0.0);
    }
    let k = CODATA_2018;
    Ok(k.hbar * omega / (k.k_b * (1.0 / n_t).ln_1p()))
}

/// `n_T = sinh² r`.
pub fn thermal_photon_number(r: AccelerationParameter) -> f64 {
    r.value().sinh().powi(2)
}

pub fn r_from_thermal_photons(n_t: f64) -> Result<AccelerationParameter> {
    if !(n_t.is_finite() && n_t >= 0.0) {
        return Err(Error::Domain(format!("thermal photon number must be nonnegative, got {n_t}")));
    }
    AccelerationParameter::new(n_t.sqrt().asinh())
}

/// Excess energy `n̄_r − n̄₀ = sinh² r (n̄₀ + 1)` seen by the accelerated observer.
pub fn visibility(n_bar0: f64, r: AccelerationParameter) -> f64 {
    thermal_photon_number(r) * (n_bar0 + 1.0)
}

/// Acceleration at which `n̄₀ · n_T = 1`.
pub fn threshold_acceleration(n_bar0: f64, omega: f64) -> Result<f64> {
    if !(n_bar0.is_finite() && n_bar0 > 0.0) {
        return Err(Error::Domain(format!("n_bar0 must be positive, got {n_bar0}")));
    }
    let r = r_from_thermal_photons(1.0 / n_bar0)?;
    acceleration_from_temperature(temperature_from_r(r, omega)?)
}

/// The quantity a [`Scenario`] is specified by.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioSource {
    Acceleration(f64),
    Mass(f64),
    Temperature(f64),
    R(f64),
}

/// A mode frequency plus one physical specification of the effect.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scenario {
    pub omega: f64,
    pub source: ScenarioSource,
}

/// Every quantity derived from a [`Scenario`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedQuantities {
    pub omega: f64,
    pub acceleration: f64,
    pub acceleration_over_g: f64,
    pub temperature: f64,
    pub r: f64,
    pub n_t: f64,
    /// Black-hole mass with the same Hawking temperature; absent at `T = 0`.
    pub mass: Option<f64>,
}

impl Scenario {
    pub fn new(omega: f64, source: ScenarioSource) -> Result<Self> {
        check_omega(omega)?;
        Ok(Self { omega, source })
    }

    pub fn temperature(&self) -> Result<f64> {
        match self.source {
            ScenarioSource::Acceleration(a) => unruh_temperature(a),
            ScenarioSource::Mass(m) => hawking_temperature(m),
            ScenarioSource::Temperature(t) => {
                if t.is_finite() && t >= 0.0 {
                    Ok(t)
                } else {
                    Err(Error::Domain(format!("temperature must be nonnegative, got {t}")))
                }
            }
            ScenarioSource::R(r) => temperature_from_r(AccelerationParameter::new(r)?, self.omega),
        }
    }

    pub fn acceleration_parameter(&self) -> Result<AccelerationParameter> {
        match self.source {
            ScenarioSource::R(r) => AccelerationParameter::new(r),
            _ => r_from_temperature(self.temperature()?, self.omega),
        }
    }

    pub fn derive(&self) -> Result<DerivedQuantities> {
        let temperature = self.temperature()?;
        let r = self.acceleration_parameter()?;
        let acceleration = match self.source {
            ScenarioSource::Acceleration(a) => a,
            _ => acceleration_from_temperature(temperature)?,
        };
        let mass = match self.source {
            ScenarioSource::Mass(m) => Some(m),
            _ if temperature > 0.0 => Some(mass_from_hawking_temperature(temperature)?),
            _ => None,
        };
        Ok(DerivedQuantities {
            omega: self.omega,
            acceleration,
            acceleration_over_g: acceleration / CODATA_2018.g_std,
            temperature,
            r: r.value(),
            n_t: thermal_photon_number(r),
            mass,
        })
    }
}

/// One point of the relative-error contour grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ContourPoint {
    pub a_over_g: f64,
    pub n_bar0: f64,
    pub n_t: f64,
    /// Infinite where `n_T` underflows to zero.
    pub epsilon: f64,
    /// Grid point nearest (in log a) to the `n̄₀ n_T = 1` curve in its row.
    pub on_threshold: bool,
}

/// Point of the `n̄₀ n_T = 1` equality curve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThresholdPoint {
    pub n_bar0: f64,
    pub a_over_g: f64,
    pub acceleration: f64,
    pub temperature: f64,
    pub n_t: f64,
    pub r: f64,
}

/// `count` log-spaced values from `lo` to `hi` inclusive.
pub fn log_space(lo: f64, hi: f64, count: usize) -> Result<Vec<f64>> {
    if !(lo > 0.0 && hi >= lo && lo.is_finite() && hi.is_finite()) || count == 0 {
        return Err(Error::Domain(format!("invalid log range [{lo}, {hi}] with {count} points")));
    }
    if count == 1 {
        return Ok(vec![lo]);
    }
    let (l0, l1) = (lo.log10(), hi.log10());
    Ok((0..count).map(|i| 10f64.powf(l0 + (l1 - l0) * i as f64 / (count - 1) as f64)).collect())
}

/// Relative error of the optimal `n_T` estimate over an (a, n̄₀) grid.
///
/// `a_over_g` values are accelerations in units of standard gravity. Rows are
/// ordered with `n̄₀` outermost and `a` varying fastest.
pub fn error_contour_grid(a_over_g: &[f64], n0_range: &[f64], omega: f64, repetitions: u64) -> Result<Vec<ContourPoint>> {
    check_omega(omega)?;
    if a_over_g.is_empty() || n0_range.is_empty() {
        return Err(Error::Domain("contour ranges must be nonempty".into()));
    }
    let g = CODATA_2018.g_std;
    let n_ts: Vec<f64> = a_over_g
        .iter()
        .map(|&a| Ok(thermal_photon_number(r_from_temperature(unruh_temperature(a * g)?, omega)?)))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(a_over_g.len() * n0_range.len());
    for &n0 in n0_range {
        let nearest = threshold_acceleration(n0, omega).ok().and_then(|a_th| {
            let target = (a_th / g).log10();
            let lo = a_over_g.iter().cloned().fold(f64::INFINITY, f64::min).log10();
            let hi = a_over_g.iter().cloned().fold(f64::NEG_INFINITY, f64::max).log10();
            if target < lo || target > hi {
                return None;
            }
            a_over_g
                .iter()
                .enumerate()
                .min_by(|x, y| (x.1.log10() - target).abs().total_cmp(&(y.1.log10() - target).abs()))
                .map(|(i, _)| i)
        });
        for (i, (&a, &n_t)) in a_over_g.iter().zip(&n_ts).enumerate() {
            let epsilon = if n_t > 0.0 { relative_error(n0, n_t, repetitions)? } else { f64::INFINITY };
            out.push(ContourPoint { a_over_g: a, n_bar0: n0, n_t, epsilon, on_threshold: nearest == Some(i) });
        }
    }
    Ok(out)
}

/// Samples the `n̄₀ n_T = 1` curve at each `n̄₀`.
pub fn threshold_curve(n0_range: &[f64], omega: f64) -> Result<Vec<ThresholdPoint>> {
    n0_range
        .iter()
        .map(|&n0| {
            let acceleration = threshold_acceleration(n0, omega)?;
            let temperature = unruh_temperature(acceleration)?;
            let r = r_from_temperature(temperature, omega)?;
            Ok(ThresholdPoint {
                n_bar0: n0,
                a_over_g: acceleration / CODATA_2018.g_std,
                acceleration,
                temperature,
                n_t: thermal_photon_number(r),
                r: r.value(),
            })
        })
        .collect()
}
