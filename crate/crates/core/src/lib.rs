// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! Resonance-theory dynamics of paramagnetic spins coupled to local and
//! collective bosonic reservoirs.
//!
//! The crate evaluates the closed-form main term of the reduced single-spin
//! dynamics: relaxation and dephasing rates, the collective factor
//! `C_j(N, t)`, magnetization trajectories and the time-dependent
//! coefficients of the modified Bloch equation. Two independent checks are
//! provided: the exactly solvable pure-dephasing model ([`oracle`]) and
//! direct diagonalisation of the level shift operators ([`lso`]).
//!
//! All quantities are dimensionless: frequencies, couplings and temperature
//! are measured in units of a reference frequency `ω₀`, time in `1/ω₀`.
//! Every dynamical output is the main term only; the `O(α²)` remainder is
//! not computed.

pub mod dynamics;
pub mod error;
pub mod lso;
pub mod model;
pub mod oracle;
pub mod quadrature;
pub mod rates;
pub mod spectral;
pub mod validity;

pub use error::{Error, Result};
pub use model::{DensityMatrix, EnsembleConfig, Species, SpinParams};
pub use num_complex::Complex64 as C64;
pub use quadrature::QuadOptions;
pub use spectral::{FormFactor, SpectralResult};
