// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! Per-spin resonance data and ensemble decay summaries.

use crate::error::{Error, Result};
use crate::model::{DensityMatrix, EnsembleConfig, SpinParams};
use crate::spectral::{coth, pv_dispersion_integral, SpectralResult};
use crate::C64;

/// Everything derived from one spin's parameters and the ensemble bath.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateSet {
    pub omega: f64,
    /// `b = (1/4)·e^{βω}/(e^{βω} − 1)·{λ²J_{g_c}(ω) + μ²J_{g_ℓ}(ω)}`.
    pub b: f64,
    /// `c = e^{−βω}`.
    pub c: f64,
    pub z_beta: f64,
    /// `a = −(1/2)ϰ² ∫|f_c(p)|²/|p| d³p`.
    pub a: f64,
    pub x: SpectralResult,
    pub y: f64,
    pub z_plus: C64,
    pub z_minus: C64,
    /// `None` when `b = 0`.
    pub alpha_plus: Option<C64>,
    pub alpha_minus: Option<C64>,
    /// `ζ = (1 + cα⁺)/(1 + c(α⁺)²)`, `None` when `b = 0`.
    pub zeta: Option<C64>,
    pub gamma_relax: f64,
    pub gamma_cons: f64,
    /// `|a|/b`, `None` when `b = 0`.
    pub r: Option<f64>,
}

impl RateSet {
    /// Amplitude `κ` of `e^{itz⁺}` in `D(t) = κe^{itz⁺} + (1 − κ)e^{itz⁻}`.
    ///
    /// At `b = 0` this is the `b → 0⁺` limit `κ = [ρ₀]₂₂`, paired with
    /// `z⁺ = |a|`, `z⁻ = −|a|`.
    pub fn kappa(&self, rho11: f64) -> C64 {
        match (self.alpha_plus, self.zeta) {
            (Some(al), Some(zeta)) => zeta * (al + rho11 * (1.0 - al)),
            _ => C64::new(1.0 - rho11, 0.0),
        }
    }

    /// `γ_j = min(Im z⁺, Im z⁻)`.
    pub fn gamma_min(&self) -> f64 {
        self.z_plus.im.min(self.z_minus.im)
    }
}

/// Principal square root with the cut on the negative real axis; on the cut
/// the value is the limit from above, `+i√|w|`.
pub fn principal_sqrt(w: C64) -> C64 {
    if w.im == 0.0 && w.re < 0.0 {
        C64::new(0.0, (-w.re).sqrt())
    } else {
        w.sqrt()
    }
}

/// Roots `z± = (1/2){ib(1+c) ± √(−b²(1+c)² + 4a[a − ib(1−c)])}`.
///
/// The root of larger modulus is formed directly and the other from the
/// product `z⁺z⁻ = −a² + iab(1−c)`, which keeps `z⁻` accurate for `|a| ≪ b`.
pub fn resonance_roots(a: f64, b: f64, c: f64) -> (C64, C64) {
    let sum = C64::new(0.0, b * (1.0 + c));
    let product = C64::new(-a * a, a * b * (1.0 - c));
    stable_pair(sum, product, radicand(a, b, c))
}

/// Shifted roots `w± = z± − a`, which solve `w² − (ib(1+c) − 2a)w − 2iabc = 0`
/// with the same discriminant.
fn shifted_roots(a: f64, b: f64, c: f64) -> (C64, C64) {
    let sum = C64::new(-2.0 * a, b * (1.0 + c));
    let product = C64::new(0.0, -2.0 * a * b * c);
    stable_pair(sum, product, radicand(a, b, c))
}

fn radicand(a: f64, b: f64, c: f64) -> C64 {
    C64::new(
        -(b * (1.0 + c)).powi(2) + 4.0 * a * a,
        -4.0 * a * b * (1.0 - c),
    )
}

fn stable_pair(sum: C64, product: C64, radicand: C64) -> (C64, C64) {
    let s = principal_sqrt(radicand);
    let plus = 0.5 * (sum + s);
    let minus = 0.5 * (sum - s);
    if plus.norm() >= minus.norm() {
        let other = if plus.norm() == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            product / plus
        };
        (plus, other)
    } else {
        (product / minus, minus)
    }
}

pub fn compute_rateset(spin: &SpinParams, ens: &EnsembleConfig) -> Result<RateSet> {
    spin.validate()?;
    let beta = ens.beta;
    let omega = spin.omega;
    let bw = beta * omega;
    let j_sum = spin.lambda.powi(2) * ens.g_c.spectral_density(omega)
        + spin.mu.powi(2) * spin.g_loc.spectral_density(omega);
    let b = 0.25 * j_sum / -(-bw).exp_m1();
    let c = (-bw).exp();
    let z_beta = 2.0 * (0.5 * bw).cosh();
    let a = -0.5 * spin.varkappa.powi(2) * ens.f_c.bath_coulomb_integral();
    let x = pv_dispersion_integral(
        &ens.g_c,
        &spin.g_loc,
        spin.lambda,
        spin.mu,
        omega,
        beta,
        &ens.quad,
    )?;
    let gamma_relax = 0.25 * coth(0.5 * bw) * j_sum;
    let gamma_cons = (spin.varkappa.powi(2) * ens.f_c.spectral_density_slope_zero()
        + spin.nu.powi(2) * spin.f_loc.spectral_density_slope_zero())
        / (2.0 * beta);
    let y = 0.5 * gamma_relax + gamma_cons;
    let (z_plus, z_minus) = resonance_roots(a, b, c);
    let (alpha_plus, alpha_minus, zeta, r) = if b > 0.0 {
        let (w_plus, w_minus) = shifted_roots(a, b, c);
        let alpha = |w: C64| 1.0 + C64::i() * w / (b * c);
        let ap = alpha(w_plus);
        // 1 + cα⁺ = −i(z⁻ + a)/b, free of the cancellation near α⁺ ≈ −1/c
        let numerator = -C64::i() * (2.0 * a + w_minus) / b;
        let zeta = numerator / (1.0 + c * ap * ap);
        (
            Some(ap),
            Some(alpha(w_minus)),
            Some(zeta),
            Some(a.abs() / b),
        )
    } else {
        (None, None, None, None)
    };
    Ok(RateSet {
        omega,
        b,
        c,
        z_beta,
        a,
        x,
        y,
        z_plus,
        z_minus,
        alpha_plus,
        alpha_minus,
        zeta,
        gamma_relax,
        gamma_cons,
        r,
    })
}

/// Rate sets for every species block of the ensemble, in block order.
pub fn species_ratesets(ens: &EnsembleConfig) -> Result<Vec<RateSet>> {
    ens.species()
        .iter()
        .map(|s| compute_rateset(&s.spin, ens))
        .collect()
}

/// Ensemble decay summary.
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingSummary {
    /// `γ = min_j min(Im z_j⁺, Im z_j⁻)`.
    pub gamma: f64,
    /// `c′ = ln(2|κ| + 1)`, maximised over spins.
    pub c_prime: f64,
    /// `γ′ = γ/(ln2/(N−1) + c′)`, zero for `N < 2`.
    pub gamma_prime: f64,
    /// `γ_relax/2 + γ_cons + γ′` per input spin.
    pub gamma_deph: Vec<f64>,
}

pub fn dephasing_summary(
    rates: &[RateSet],
    rho0s: &[DensityMatrix],
    n: usize,
) -> Result<DephasingSummary> {
    if rates.is_empty() || rates.len() != rho0s.len() {
        return Err(Error::invalid(
            "rates",
            format!(
                "need matching nonempty rate and state lists, got {} and {}",
                rates.len(),
                rho0s.len()
            ),
        ));
    }
    let gamma = rates
        .iter()
        .map(RateSet::gamma_min)
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    let c_prime = rates
        .iter()
        .zip(rho0s)
        .map(|(rs, rho)| (2.0 * rs.kappa(rho.p11()).norm() + 1.0).ln())
        .fold(0.0, f64::max);
    let gamma_prime = if n < 2 || gamma == 0.0 {
        0.0
    } else {
        gamma / (std::f64::consts::LN_2 / (n - 1) as f64 + c_prime)
    };
    let gamma_deph = rates
        .iter()
        .map(|rs| 0.5 * rs.gamma_relax + rs.gamma_cons + gamma_prime)
        .collect();
    Ok(DephasingSummary {
        gamma,
        c_prime,
        gamma_prime,
        gamma_deph,
    })
}

/// Summary for an ensemble, taking one state per species block.
pub fn ensemble_dephasing_summary(
    ens: &EnsembleConfig,
    rates: &[RateSet],
) -> Result<DephasingSummary> {
    let rho0s: Vec<DensityMatrix> = ens.species().iter().map(|s| s.spin.rho0).collect();
    dephasing_summary(rates, &rho0s, ens.total_spins())
}

/// `γ_deph,A_j(∞) = γ_relax/2 + γ_cons + (N_j − 1) Im z_j⁻ + Σ_{k≠j} N_k Im z_k⁻`.
pub fn asymptotic_dephasing_multispecies(species: &[(usize, RateSet)]) -> Result<Vec<f64>> {
    if let Some((count, _)) = species.iter().find(|(count, _)| *count == 0) {
        return Err(Error::invalid(
            "count",
            format!("species counts must be positive, got {count}"),
        ));
    }
    let collective: f64 = species
        .iter()
        .map(|(count, rs)| *count as f64 * rs.z_minus.im)
        .sum();
    Ok(species
        .iter()
        .map(|(_, rs)| 0.5 * rs.gamma_relax + rs.gamma_cons + collective - rs.z_minus.im)
        .collect())
}
