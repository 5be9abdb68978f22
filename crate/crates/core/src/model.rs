// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! Spin, species and ensemble parameters.

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::quadrature::QuadOptions;
use crate::spectral::FormFactor;
use crate::C64;

const STATE_TOL: f64 = 1e-12;

/// Reduced 2×2 density matrix in the `S^z` eigenbasis `φ₁ = [1, 0]ᵀ`
/// (`σ = +1/2`), `φ₂ = [0, 1]ᵀ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix(Matrix2<C64>);

impl DensityMatrix {
    /// Validates hermiticity, unit trace and eigenvalues in `[0, 1]`.
    pub fn new(m: Matrix2<C64>) -> Result<Self> {
        let herm = (m - m.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        if herm > STATE_TOL {
            return Err(Error::invalid("rho0", "density matrix is not Hermitian"));
        }
        let trace = m[(0, 0)] + m[(1, 1)];
        if (trace - C64::new(1.0, 0.0)).norm() > STATE_TOL {
            return Err(Error::invalid(
                "rho0",
                format!("trace is {trace}, expected 1"),
            ));
        }
        // eigenvalues of a unit-trace Hermitian 2×2: 1/2 ± |v|/2
        let p = m[(0, 0)].re;
        let half_gap = ((p - 0.5).powi(2) + m[(1, 0)].norm_sqr()).sqrt();
        if 0.5 + half_gap > 1.0 + STATE_TOL {
            return Err(Error::invalid(
                "rho0",
                "density matrix has an eigenvalue outside [0, 1]",
            ));
        }
        Ok(DensityMatrix(m))
    }

    /// `ρ = (1 + v·σ)/2` with the standard Pauli matrices; requires `|v| ≤ 1`.
    pub fn from_bloch(v: [f64; 3]) -> Result<Self> {
        let norm = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if !norm.is_finite() || norm > 1.0 + STATE_TOL {
            return Err(Error::invalid(
                "bloch",
                format!("Bloch vector norm {norm} exceeds 1"),
            ));
        }
        let m = Matrix2::new(
            C64::new(0.5 * (1.0 + v[2]), 0.0),
            C64::new(0.5 * v[0], -0.5 * v[1]),
            C64::new(0.5 * v[0], 0.5 * v[1]),
            C64::new(0.5 * (1.0 - v[2]), 0.0),
        );
        Ok(DensityMatrix(m))
    }

    /// Diagonal state with `[ρ]₁₁ = p`.
    pub fn diagonal(p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(
                "p",
                format!("population {p} outside [0, 1]"),
            ));
        }
        Ok(DensityMatrix(Matrix2::new(
            C64::new(p, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
            C64::new(1.0 - p, 0.0),
        )))
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    /// `[ρ]₁₁`, the population of `σ = +1/2`.
    pub fn p11(&self) -> f64 {
        self.0[(0, 0)].re
    }

    pub fn p22(&self) -> f64 {
        self.0[(1, 1)].re
    }

    pub fn rho21(&self) -> C64 {
        self.0[(1, 0)]
    }

    pub fn rho12(&self) -> C64 {
        self.0[(0, 1)]
    }

    /// `⟨S^z⟩ = ([ρ]₁₁ − [ρ]₂₂)/2`.
    pub fn sz(&self) -> f64 {
        0.5 * (self.p11() - self.p22())
    }
}

/// One spin: frequency, the four coupling constants, local form factors and
/// initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinParams {
    pub omega: f64,
    /// Energy-exchange collective coupling.
    pub lambda: f64,
    /// Energy-conserving collective coupling.
    pub varkappa: f64,
    /// Energy-exchange local coupling.
    pub mu: f64,
    /// Energy-conserving local coupling.
    pub nu: f64,
    pub g_loc: FormFactor,
    pub f_loc: FormFactor,
    pub rho0: DensityMatrix,
}

impl SpinParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::invalid(
                "omega",
                format!("spin frequency must be positive, got {}", self.omega),
            ));
        }
        for (name, x) in [
            ("lambda", self.lambda),
            ("varkappa", self.varkappa),
            ("mu", self.mu),
            ("nu", self.nu),
        ] {
            if !x.is_finite() {
                return Err(Error::invalid(
                    name,
                    format!("coupling must be finite, got {x}"),
                ));
            }
        }
        Ok(())
    }

    pub fn max_coupling(&self) -> f64 {
        [self.lambda, self.varkappa, self.mu, self.nu]
            .iter()
            .map(|x| x.abs())
            .fold(0.0, f64::max)
    }
}

/// A group of identical spins.
#[derive(Debug, Clone, PartialEq)]
pub struct Species {
    pub count: usize,
    pub spin: SpinParams,
}

/// How the ensemble was specified; species blocks stand for a homogeneous
/// field within each block.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    Spins,
    Species,
}

/// Ensemble-wide parameters: temperature, collective form factors and the
/// spins, always stored as species blocks (a spin list becomes blocks of one).
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleConfig {
    pub beta: f64,
    pub g_c: FormFactor,
    pub f_c: FormFactor,
    species: Vec<Species>,
    layout: Layout,
    pub quad: QuadOptions,
}

impl EnsembleConfig {
    pub fn from_spins(
        beta: f64,
        g_c: FormFactor,
        f_c: FormFactor,
        spins: Vec<SpinParams>,
    ) -> Result<Self> {
        let species = spins
            .into_iter()
            .map(|spin| Species { count: 1, spin })
            .collect();
        Self::build(beta, g_c, f_c, species, Layout::Spins)
    }

    pub fn from_species(
        beta: f64,
        g_c: FormFactor,
        f_c: FormFactor,
        species: Vec<Species>,
    ) -> Result<Self> {
        Self::build(beta, g_c, f_c, species, Layout::Species)
    }

    fn build(
        beta: f64,
        g_c: FormFactor,
        f_c: FormFactor,
        species: Vec<Species>,
        layout: Layout,
    ) -> Result<Self> {
        if !(beta.is_finite() && beta > 0.0) {
            return Err(Error::invalid(
                "beta",
                format!("inverse temperature must be positive, got {beta}"),
            ));
        }
        if species.is_empty() {
            return Err(Error::invalid(
                "species",
                "ensemble needs at least one spin",
            ));
        }
        for s in &species {
            if s.count == 0 {
                return Err(Error::invalid("count", "species counts must be positive"));
            }
            s.spin.validate()?;
        }
        Ok(EnsembleConfig {
            beta,
            g_c,
            f_c,
            species,
            layout,
            quad: QuadOptions::default(),
        })
    }

    pub fn with_quad(mut self, quad: QuadOptions) -> Self {
        self.quad = quad;
        self
    }

    pub fn species(&self) -> &[Species] {
        &self.species
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    /// Total number of spins `N`.
    pub fn total_spins(&self) -> usize {
        self.species.iter().map(|s| s.count).sum()
    }

    /// Species block containing spin `j` (0-based, in block order).
    pub fn species_of(&self, j: usize) -> Result<usize> {
        let mut offset = 0;
        for (k, s) in self.species.iter().enumerate() {
            if j < offset + s.count {
                return Ok(k);
            }
            offset += s.count;
        }
        Err(Error::SpinIndexOutOfRange {
            index: j,
            total: offset,
        })
    }

    /// Every spin individually, species blocks expanded.
    pub fn expanded_spins(&self) -> Vec<&SpinParams> {
        self.species
            .iter()
            .flat_map(|s| std::iter::repeat_n(&s.spin, s.count))
            .collect()
    }
}
