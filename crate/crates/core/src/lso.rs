// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! Level shift operators and their resonance energies.
//!
//! For a Bohr energy `e` the operator restricted to its eigenspace is a
//! scalar `X_e + iY_e` plus one 2×2 block per spin that does not flip,
//!
//! ```text
//! ib_n [[c_n, −c_n], [−1, 1]] − r_n [[1, 0], [0, −1]]
//! ```
//!
//! acting on the `(φ₁⊗φ₁, φ₂⊗φ₂)` pair of that spin.

use nalgebra::{Matrix2, Vector2};

use crate::error::{Error, Result};
use crate::model::{EnsembleConfig, SpinParams};
use crate::rates::principal_sqrt;
use crate::spectral::{coth, unit_dispersion_integral};
use crate::C64;

/// Largest `N₀(e)` for which all `2^{N₀}` sign patterns are enumerated.
pub const MAX_ENUMERATED_BLOCKS: usize = 20;

/// Bohr-energy label: `δ_n = σ_n − τ_n ∈ {−2, 0, 2}` per spin, with
/// `σ = +1` for `φ₁`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnergyLabel {
    deltas: Vec<i8>,
}

impl EnergyLabel {
    pub fn new(deltas: Vec<i8>) -> Result<Self> {
        if deltas.is_empty() {
            return Err(Error::invalid("deltas", "label needs at least one spin"));
        }
        if let Some(d) = deltas.iter().find(|d| !matches!(d, -2 | 0 | 2)) {
            return Err(Error::invalid(
                "deltas",
                format!("entries must be -2, 0 or 2, got {d}"),
            ));
        }
        Ok(EnergyLabel { deltas })
    }

    /// The `e = 0` label.
    pub fn zero(n: usize) -> Result<Self> {
        Self::new(vec![0; n])
    }

    /// Only spin `j` flipped: `δ_j = +2` gives `e = −ω_j`, `δ_j = −2` gives `e = +ω_j`.
    pub fn single_flip(n: usize, j: usize, delta: i8) -> Result<Self> {
        if j >= n {
            return Err(Error::SpinIndexOutOfRange { index: j, total: n });
        }
        let mut deltas = vec![0; n];
        deltas[j] = delta;
        Self::new(deltas)
    }

    pub fn deltas(&self) -> &[i8] {
        &self.deltas
    }

    pub fn len(&self) -> usize {
        self.deltas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }

    /// `N₀(e)`, the number of unflipped spins.
    pub fn unflipped(&self) -> usize {
        self.deltas.iter().filter(|&&d| d == 0).count()
    }

    /// `e = −(1/2) Σ ω_n δ_n`.
    pub fn energy(&self, omegas: &[f64]) -> f64 {
        -0.5 * self
            .deltas
            .iter()
            .zip(omegas)
            .map(|(&d, w)| d as f64 * w)
            .sum::<f64>()
    }
}

/// One spin's block of the level shift operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsoBlock {
    pub spin: usize,
    pub b: f64,
    pub c: f64,
    pub r: f64,
    pub matrix: Matrix2<C64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LevelShiftOperator {
    pub energy: f64,
    /// `e₀(e) = Σ_{δ_n≠0} ϰ_n δ_n`.
    pub e0: f64,
    /// `X_e`, exchange dispersion part.
    pub x_e: f64,
    /// `y_e({λ_n}, g_c) + y_e({μ_n}, {g_n})`.
    pub y_exchange: f64,
    /// `y′_e`, local energy-conserving part.
    pub y_prime: f64,
    /// `y″_e`, collective energy-conserving part.
    pub y_double_prime: f64,
    /// `X_e + iY_e`.
    pub scalar_part: C64,
    /// Blocks in increasing spin order.
    pub blocks: Vec<LsoBlock>,
}

pub fn build_level_shift(label: &EnergyLabel, ens: &EnsembleConfig) -> Result<LevelShiftOperator> {
    let spins = ens.expanded_spins();
    if label.len() != spins.len() {
        return Err(Error::invalid(
            "label",
            format!(
                "label has {} entries for an ensemble of {} spins",
                label.len(),
                spins.len()
            ),
        ));
    }
    let beta = ens.beta;
    let omegas: Vec<f64> = spins.iter().map(|s| s.omega).collect();
    let e0: f64 = label
        .deltas()
        .iter()
        .zip(&spins)
        .map(|(&d, s)| s.varkappa * d as f64)
        .sum();
    let coulomb = ens.f_c.bath_coulomb_integral();
    let y_double_prime = std::f64::consts::PI / (8.0 * beta) * ens.f_c.gamma_plus() * e0 * e0;

    // the dispersion integral only depends on the species, so cache it per block
    let mut dispersion: Vec<Option<f64>> = vec![None; ens.species().len()];
    let mut x_e = 0.0;
    let mut y_exchange = 0.0;
    let mut y_prime = 0.0;
    let mut blocks = Vec::new();
    for (n, (&d, spin)) in label.deltas().iter().zip(&spins).enumerate() {
        if d != 0 {
            let sigma = d as f64 / 2.0;
            let k = ens.species_of(n)?;
            let xn = match dispersion[k] {
                Some(v) => v,
                None => {
                    let v = exchange_dispersion(spin, ens)?;
                    dispersion[k] = Some(v);
                    v
                }
            };
            x_e += sigma * xn;
            let w = spin.omega;
            let g_sum = spin.lambda.powi(2) * ens.g_c.angular_density(w)
                + spin.mu.powi(2) * spin.g_loc.angular_density(w);
            y_exchange += std::f64::consts::PI / 8.0 * w * w * g_sum * coth(0.5 * beta * w);
            y_prime +=
                std::f64::consts::PI / (2.0 * beta) * spin.nu.powi(2) * spin.f_loc.gamma_plus();
        } else {
            let w = spin.omega;
            let g_sum = spin.lambda.powi(2) * ens.g_c.angular_density(w)
                + spin.mu.powi(2) * spin.g_loc.angular_density(w);
            // (π/4)ω²G/(e^{βω} − 1) · e^{βω}
            let b = std::f64::consts::PI / 4.0 * w * w * g_sum / -(-beta * w).exp_m1();
            let c = (-beta * w).exp();
            let r = 0.25 * spin.varkappa * e0 * coulomb;
            blocks.push(LsoBlock {
                spin: n,
                b,
                c,
                r,
                matrix: exchange_block(b, c, r),
            });
        }
    }
    let y = y_double_prime + y_prime + y_exchange;
    Ok(LevelShiftOperator {
        energy: label.energy(&omegas),
        e0,
        x_e,
        y_exchange,
        y_prime,
        y_double_prime,
        scalar_part: C64::new(x_e, y),
        blocks,
    })
}

fn exchange_dispersion(spin: &SpinParams, ens: &EnsembleConfig) -> Result<f64> {
    let mut total = 0.0;
    for (coupling, h) in [(spin.lambda, &ens.g_c), (spin.mu, &spin.g_loc)] {
        if coupling != 0.0 {
            let unit = unit_dispersion_integral(h, spin.omega, ens.beta, &ens.quad)
                .map_err(|e| e.in_operation("build_level_shift"))?;
            total += coupling * coupling * unit.value;
        }
    }
    Ok(total)
}

fn exchange_block(b: f64, c: f64, r: f64) -> Matrix2<C64> {
    let i = C64::i();
    Matrix2::new(i * b * c - r, -i * b * c, -i * b, i * b + r)
}

/// Eigenvalues and biorthogonal eigenvectors of one block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlockEigensystem {
    /// Eigenvalue with the larger imaginary part.
    pub z_plus: C64,
    pub z_minus: C64,
    /// Right eigenvectors, first component 1 whenever possible.
    pub xi_plus: Vector2<C64>,
    pub xi_minus: Vector2<C64>,
    /// Left vectors with `⟨ξ̃^ϱ, ξ^ϱ′⟩ = δ_{ϱϱ′}` (`⟨·,·⟩` antilinear in the first slot).
    pub xi_tilde_plus: Vector2<C64>,
    pub xi_tilde_minus: Vector2<C64>,
}

impl BlockEigensystem {
    /// `|ξ⁺⟩⟨ξ̃⁺|` or `|ξ⁻⟩⟨ξ̃⁻|`.
    pub fn projector(&self, plus: bool) -> Matrix2<C64> {
        let (xi, tilde) = if plus {
            (self.xi_plus, self.xi_tilde_plus)
        } else {
            (self.xi_minus, self.xi_tilde_minus)
        };
        xi * tilde.adjoint()
    }

    /// `α` of a right eigenvector `[1, α]ᵀ`.
    pub fn alpha(&self, plus: bool) -> C64 {
        let xi = if plus { self.xi_plus } else { self.xi_minus };
        xi[1] / xi[0]
    }
}

/// Eigensystem of a level shift block; `c` enters the left vectors
/// `ξ̃ = [1, c·ᾱ]ᵀ / (1 + c·ᾱ²)` belonging to `ξ = [1, α]ᵀ`.
pub fn block_eigensystem(block: &Matrix2<C64>, c: f64) -> Result<BlockEigensystem> {
    let trace = block[(0, 0)] + block[(1, 1)];
    let det = block[(0, 0)] * block[(1, 1)] - block[(0, 1)] * block[(1, 0)];
    let s = principal_sqrt(trace * trace - 4.0 * det);
    let big = if (trace + s).norm() >= (trace - s).norm() {
        0.5 * (trace + s)
    } else {
        0.5 * (trace - s)
    };
    let small = if big.norm() == 0.0 {
        C64::new(0.0, 0.0)
    } else {
        det / big
    };
    let (z_plus, z_minus) = if big.im >= small.im {
        (big, small)
    } else {
        (small, big)
    };
    let scale = block.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if (z_plus - z_minus).norm() <= 1e-13 * scale || scale == 0.0 {
        return Err(Error::DegenerateEigenvalues { value: z_plus });
    }
    let xi_plus = right_vector(block, z_plus);
    let xi_minus = right_vector(block, z_minus);
    let (xi_tilde_plus, xi_tilde_minus) =
        match (weighted_tilde(xi_plus, c), weighted_tilde(xi_minus, c)) {
            (Some(p), Some(m)) => (p, m),
            _ => inverse_rows(xi_plus, xi_minus)?,
        };
    Ok(BlockEigensystem {
        z_plus,
        z_minus,
        xi_plus,
        xi_minus,
        xi_tilde_plus,
        xi_tilde_minus,
    })
}

fn right_vector(m: &Matrix2<C64>, z: C64) -> Vector2<C64> {
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    // pick the better-conditioned row of (M − z)v = 0
    let r0 = (m[(0, 0)] - z, m[(0, 1)]);
    let r1 = (m[(1, 0)], m[(1, 1)] - z);
    let row = if r0.0.norm() + r0.1.norm() >= r1.0.norm() + r1.1.norm() {
        r0
    } else {
        r1
    };
    if row.1.norm() > 1e-14 * row.0.norm() && row.1.norm() > 0.0 {
        Vector2::new(one, -row.0 / row.1)
    } else if row.0.norm() > 0.0 {
        Vector2::new(zero, one)
    } else {
        Vector2::new(one, zero)
    }
}

fn weighted_tilde(xi: Vector2<C64>, c: f64) -> Option<Vector2<C64>> {
    if xi[0] != C64::new(1.0, 0.0) {
        return None;
    }
    let alpha = xi[1];
    let denom = 1.0 + c * alpha.conj() * alpha.conj();
    if denom.norm() < 1e-12 * (1.0 + c * alpha.norm_sqr()) {
        return None;
    }
    Some(Vector2::new(C64::new(1.0, 0.0), c * alpha.conj()) / denom)
}

fn inverse_rows(p: Vector2<C64>, m: Vector2<C64>) -> Result<(Vector2<C64>, Vector2<C64>)> {
    let v = Matrix2::from_columns(&[p, m]);
    let inv = v
        .try_inverse()
        .ok_or(Error::DegenerateEigenvalues { value: p[1] })?;
    let row = |k: usize| Vector2::new(inv[(k, 0)].conj(), inv[(k, 1)].conj());
    Ok((row(0), row(1)))
}

/// One resonance energy and the sign pattern selecting it.
#[derive(Debug, Clone, PartialEq)]
pub struct Resonance {
    /// `true` for `ϱ_k = +1`, in block order.
    pub pattern: Vec<bool>,
    pub energy: C64,
}

/// All `2^{N₀(e)}` resonance energies `e + X_e + iY_e + Σ_k z_{j_k}^{ϱ_k}`
/// bifurcating from the label's Bohr energy.
pub fn resonance_energies(label: &EnergyLabel, ens: &EnsembleConfig) -> Result<Vec<Resonance>> {
    let n0 = label.unflipped();
    if n0 > MAX_ENUMERATED_BLOCKS {
        return Err(Error::TooManyPatterns {
            n0,
            limit: MAX_ENUMERATED_BLOCKS,
        });
    }
    let lso = build_level_shift(label, ens)?;
    let systems = lso
        .blocks
        .iter()
        .map(|b| block_eigensystem(&b.matrix, b.c))
        .collect::<Result<Vec<_>>>()?;
    let base = lso.energy + lso.scalar_part;
    let mut out = Vec::with_capacity(1 << n0);
    for bits in 0u32..(1u32 << n0) {
        let pattern: Vec<bool> = (0..n0).map(|k| bits >> k & 1 == 0).collect();
        let energy = base
            + systems
                .iter()
                .zip(&pattern)
                .map(|(s, &p)| if p { s.z_plus } else { s.z_minus })
                .sum::<C64>();
        out.push(Resonance { pattern, energy });
    }
    check_distinct(&out)?;
    Ok(out)
}

/// The resonance energy for an explicit sign pattern, without enumeration.
pub fn resonance_energy(
    label: &EnergyLabel,
    ens: &EnsembleConfig,
    pattern: &[bool],
) -> Result<C64> {
    let lso = build_level_shift(label, ens)?;
    if pattern.len() != lso.blocks.len() {
        return Err(Error::invalid(
            "pattern",
            format!(
                "pattern has {} signs for {} unflipped spins",
                pattern.len(),
                lso.blocks.len()
            ),
        ));
    }
    let mut energy = lso.energy + lso.scalar_part;
    for (b, &p) in lso.blocks.iter().zip(pattern) {
        let s = block_eigensystem(&b.matrix, b.c)?;
        energy += if p { s.z_plus } else { s.z_minus };
    }
    Ok(energy)
}

fn check_distinct(res: &[Resonance]) -> Result<()> {
    let scale = res.iter().map(|r| r.energy.norm()).fold(1e-300, f64::max);
    let tol = 1e-13 * scale;
    let mut order: Vec<usize> = (0..res.len()).collect();
    order.sort_by(|&i, &j| res[i].energy.re.total_cmp(&res[j].energy.re));
    for (k, &i) in order.iter().enumerate() {
        for &j in &order[k + 1..] {
            if res[j].energy.re - res[i].energy.re > tol {
                break;
            }
            if (res[j].energy - res[i].energy).norm() <= tol {
                return Err(Error::ResonancesNotDistinct {
                    first: res[i].energy,
                    second: res[j].energy,
                });
            }
        }
    }
    Ok(())
}
