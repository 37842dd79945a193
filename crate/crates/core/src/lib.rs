// Copyright 2026 The unruh-metrology Authors
// SPDX-License-Identifier: Apache-2.0

//! Quantum parameter estimation for the Unruh–Hawking effect.
//!
//! The accelerated observer sees the inertial field through a bosonic
//! amplification channel with squeezing strength `r`. This crate computes
//! the (quantum) Fisher information of Fock and Gaussian probes under that
//! channel, checks the closed forms against independent numerical routes,
//! simulates the photon-counting and heterodyne estimation experiments, and
//! converts between `r` and physical accelerations, masses and temperatures.
//!
//! Module map:
//!
//! - [`fock_channel`]: truncated number-basis states, closed-form Kraus sum
//!   and master-equation integration of the channel.
//! - [`gaussian`]: single-mode Gaussian states, fidelity, Bures QFI and the
//!   closed-form Gaussian QFI with its optimisation over the energy split.
//! - [`estimation_theory`]: classical Fisher information, symmetric
//!   logarithmic derivative, ultimate two-mode bound, reparametrisation.
//! - [`montecarlo`]: seeded sampling, maximum likelihood and Cramér–Rao
//!   saturation experiments.
//! - [`physical_units`]: constants and unit conversions, contour grid data.
//! - [`cli`]: the `unruh` command-line front end.

pub mod cli;
pub mod error;
pub mod estimation_theory;
pub mod fock_channel;
pub mod gaussian;
pub mod montecarlo;
pub mod numerics;
pub mod physical_units;

pub use error::{Error, Result};
pub use fock_channel::{AccelerationParameter, FockDensityMatrix};
pub use gaussian::{EnergySplit, GaussianState};
