// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! The exactly solvable pure-dephasing model.
//!
//! With only energy-conserving couplings the populations are constant and
//! the coherence of spin `j` is
//!
//! ```text
//! [ρ_t]₂₁ = [ρ₀]₂₁ e^{−iωt} e^{−ν²Γ_ℓ(t) − ϰ²Γ_c(t)} Π_{l≠j} (p e^{iϰ²S_c(t)} + (1 − p) e^{−iϰ²S_c(t)})
//! ```
//!
//! where each factor is the configuration sum `Σ_σ [ρ₀]_{σσ} e^{2iσϰ²S_c(t)}`
//! over `σ = ±1/2` (`+1/2` for `φ₁`) of a spin in a product state.

use nalgebra::Matrix2;

use crate::dynamics::evolve_observable;
use crate::error::{Error, Result};
use crate::model::{DensityMatrix, EnsembleConfig, Species, SpinParams};
use crate::quadrature::QuadOptions;
use crate::rates::species_ratesets;
use crate::spectral::{decoherence_gamma, lamb_shift, FormFactor};
use crate::C64;

/// Largest ensemble for [`exact_offdiagonal_enumerated`].
pub const MAX_ENUMERATED_SPINS: usize = 12;

#[derive(Debug, Clone, PartialEq)]
pub struct OracleConfig {
    pub beta: f64,
    /// Total number of spins, including spin `j`.
    pub n: usize,
    /// Population of `σ = +1/2` for every spin other than `j`.
    pub p: f64,
    pub varkappa_c: f64,
    pub nu_l: f64,
    pub f_c: FormFactor,
    pub f_l: FormFactor,
    pub rho0_j: DensityMatrix,
    pub omega: f64,
}

impl OracleConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(Error::invalid(
                "beta",
                format!("must be positive, got {}", self.beta),
            ));
        }
        if self.n == 0 {
            return Err(Error::invalid("n", "need at least one spin"));
        }
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::invalid(
                "p",
                format!("population {} outside [0, 1]", self.p),
            ));
        }
        if !(self.varkappa_c.is_finite() && self.nu_l.is_finite()) {
            return Err(Error::invalid("varkappa_c", "couplings must be finite"));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(Error::invalid(
                "omega",
                format!("must be positive, got {}", self.omega),
            ));
        }
        Ok(())
    }

    /// `a = −(1/2)ϰ_c² ∫|f_c|²/|p| d³p`.
    pub fn a(&self) -> f64 {
        -0.5 * self.varkappa_c.powi(2) * self.f_c.bath_coulomb_integral()
    }

    /// Equivalent ensemble with vanishing exchange couplings: spin `j` first,
    /// then a block of `N − 1` spins in the diagonal state with population `p`.
    pub fn ensemble(&self) -> Result<EnsembleConfig> {
        self.validate()?;
        let spin = |rho0| SpinParams {
            omega: self.omega,
            lambda: 0.0,
            varkappa: self.varkappa_c,
            mu: 0.0,
            nu: self.nu_l,
            g_loc: self.f_l,
            f_loc: self.f_l,
            rho0,
        };
        let mut species = vec![Species {
            count: 1,
            spin: spin(self.rho0_j),
        }];
        if self.n > 1 {
            species.push(Species {
                count: self.n - 1,
                spin: spin(DensityMatrix::diagonal(self.p)?),
            });
        }
        EnsembleConfig::from_species(self.beta, self.f_c, self.f_c, species)
    }
}

/// `(Γ_ℓ(t), Γ_c(t), S_c(t))`, skipping integrals whose coupling vanishes.
fn time_integrals(cfg: &OracleConfig, t: f64, opts: &QuadOptions) -> Result<(f64, f64, f64)> {
    let g_l = if cfg.nu_l != 0.0 {
        decoherence_gamma(&cfg.f_l, cfg.beta, t, opts)?.value
    } else {
        0.0
    };
    let (g_c, s_c) = if cfg.varkappa_c != 0.0 {
        (
            decoherence_gamma(&cfg.f_c, cfg.beta, t, opts)?.value,
            lamb_shift(&cfg.f_c, t, opts)?.value,
        )
    } else {
        (0.0, 0.0)
    };
    Ok((g_l, g_c, s_c))
}

/// `(p e^{iφ} + (1 − p) e^{−iφ})^{N−1}` in log-polar form.
fn product_factor(p: f64, phi: f64, n: usize) -> C64 {
    if n <= 1 {
        return C64::new(1.0, 0.0);
    }
    let single = C64::new(phi.cos(), (2.0 * p - 1.0) * phi.sin());
    let m = single.norm();
    if m == 0.0 {
        return C64::new(0.0, 0.0);
    }
    let k = (n - 1) as f64;
    C64::from_polar((k * m.ln()).exp(), k * single.arg())
}

fn coherence(cfg: &OracleConfig, t: f64, dephasing: f64, phi: f64) -> C64 {
    let envelope = C64::from_polar((-dephasing).exp(), -cfg.omega * t);
    cfg.rho0_j.rho21() * envelope * product_factor(cfg.p, phi, cfg.n)
}

/// Exact `[ρ_t^{(j)}]₂₁`.
pub fn exact_offdiagonal(cfg: &OracleConfig, t: f64, opts: &QuadOptions) -> Result<C64> {
    cfg.validate()?;
    let (g_l, g_c, s_c) =
        time_integrals(cfg, t, opts).map_err(|e| e.in_operation("exact_offdiagonal"))?;
    let dephasing = cfg.nu_l.powi(2) * g_l + cfg.varkappa_c.powi(2) * g_c;
    Ok(coherence(cfg, t, dephasing, cfg.varkappa_c.powi(2) * s_c))
}

/// Exact `[ρ_t^{(j)}]₂₁` by summing all `2^{N−1}` configurations of the
/// other spins; restricted to `N ≤ 12`.
pub fn exact_offdiagonal_enumerated(cfg: &OracleConfig, t: f64, opts: &QuadOptions) -> Result<C64> {
    cfg.validate()?;
    if cfg.n > MAX_ENUMERATED_SPINS {
        return Err(Error::invalid(
            "n",
            format!(
                "enumeration supports at most {MAX_ENUMERATED_SPINS} spins, got {}",
                cfg.n
            ),
        ));
    }
    let (g_l, g_c, s_c) = time_integrals(cfg, t, opts)?;
    let dephasing = cfg.nu_l.powi(2) * g_l + cfg.varkappa_c.powi(2) * g_c;
    let phase = cfg.varkappa_c.powi(2) * s_c;
    let others = cfg.n - 1;
    let mut sum = C64::new(0.0, 0.0);
    for config in 0u32..(1u32 << others) {
        let mut term = C64::new(1.0, 0.0);
        for l in 0..others {
            let up = config >> l & 1 == 1;
            let (weight, sigma) = if up {
                (cfg.p, 0.5)
            } else {
                (1.0 - cfg.p, -0.5)
            };
            term *= weight * C64::new(0.0, 2.0 * sigma * phase).exp();
        }
        sum += term;
    }
    let envelope = C64::from_polar((-dephasing).exp(), -cfg.omega * t);
    Ok(cfg.rho0_j.rho21() * envelope * sum)
}

/// `C(N, t) = [p e^{iat} + (1 − p) e^{−iat}]^{N−1}`, the product factor after
/// `ϰ²S(t) ↦ ta`.
pub fn asymptotic_product_factor(cfg: &OracleConfig, t: f64) -> Result<C64> {
    cfg.validate()?;
    Ok(product_factor(cfg.p, cfg.a() * t, cfg.n))
}

/// Exact formula with `Γ(t) ↦ tJ̃(0)/(2β)` and `ϰ²S(t) ↦ ta`.
pub fn substituted_offdiagonal(cfg: &OracleConfig, t: f64) -> Result<C64> {
    cfg.validate()?;
    let rate = (cfg.nu_l.powi(2) * cfg.f_l.spectral_density_slope_zero()
        + cfg.varkappa_c.powi(2) * cfg.f_c.spectral_density_slope_zero())
        / (2.0 * cfg.beta);
    Ok(coherence(cfg, t, rate * t, cfg.a() * t))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleRow {
    pub t: f64,
    /// Exact model, full time dependence.
    pub exact: C64,
    /// Exact model after the linear substitutions.
    pub substituted: C64,
    /// Resonance-theory main term.
    pub resonance: C64,
}

impl OracleRow {
    pub fn substituted_deviation(&self) -> f64 {
        (self.substituted - self.resonance).norm()
    }

    pub fn exact_deviation(&self) -> f64 {
        (self.exact - self.resonance).norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleReport {
    pub rows: Vec<OracleRow>,
    pub max_substituted_deviation: f64,
    pub max_exact_deviation: f64,
}

/// Compares the resonance main term against the exact model on a grid.
pub fn compare_resonance_vs_exact(
    cfg: &OracleConfig,
    times: &[f64],
    opts: &QuadOptions,
) -> Result<OracleReport> {
    let ens = cfg.ensemble()?.with_quad(*opts);
    let rates = species_ratesets(&ens)?;
    let selector = Matrix2::new(
        C64::new(0.0, 0.0),
        C64::new(1.0, 0.0),
        C64::new(0.0, 0.0),
        C64::new(0.0, 0.0),
    );
    let mut rows = Vec::with_capacity(times.len());
    for &t in times {
        rows.push(OracleRow {
            t,
            exact: exact_offdiagonal(cfg, t, opts)?,
            substituted: substituted_offdiagonal(cfg, t)?,
            resonance: evolve_observable(&selector, 0, &ens, &rates, t)?,
        });
    }
    let max_substituted_deviation = rows
        .iter()
        .map(OracleRow::substituted_deviation)
        .fold(0.0, f64::max);
    let max_exact_deviation = rows
        .iter()
        .map(OracleRow::exact_deviation)
        .fold(0.0, f64::max);
    Ok(OracleReport {
        rows,
        max_substituted_deviation,
        max_exact_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::DFactor;
    use crate::rates::compute_rateset;

    fn cfg(n: usize, p: f64) -> OracleConfig {
        OracleConfig {
            beta: 1.0,
            n,
            p,
            varkappa_c: 0.1,
            nu_l: 0.05,
            f_c: FormFactor::new(0, 1, 1.0).unwrap(),
            f_l: FormFactor::new(0, 2, 1.0).unwrap(),
            rho0_j: DensityMatrix::from_bloch([0.6, -0.2, 0.3]).unwrap(),
            omega: 1.0,
        }
    }

    #[test]
    fn initial_value() {
        let c = cfg(5, 0.3);
        let o = QuadOptions::default();
        assert_eq!(exact_offdiagonal(&c, 0.0, &o).unwrap(), c.rho0_j.rho21());
        let rep = compare_resonance_vs_exact(&c, &[0.0], &o).unwrap();
        assert!(rep.rows[0].exact_deviation() < 1e-16);
    }

    #[test]
    fn product_matches_enumeration() {
        let o = QuadOptions::default();
        for (n, p) in [(1, 0.3), (4, 0.3), (7, 0.8)] {
            let c = cfg(n, p);
            for t in [0.5, 3.0, 20.0] {
                let a = exact_offdiagonal(&c, t, &o).unwrap();
                let b = exact_offdiagonal_enumerated(&c, t, &o).unwrap();
                assert!((a - b).norm() < 1e-13, "n={n} t={t}");
                assert!(a.norm() <= c.rho0_j.rho21().norm() * (1.0 + 1e-14));
            }
        }
        assert!(exact_offdiagonal_enumerated(&cfg(13, 0.5), 1.0, &o).is_err());
    }

    #[test]
    fn single_spin_envelope() {
        let c = cfg(1, 0.5);
        let o = QuadOptions::default();
        let t = 4.0;
        let gl = decoherence_gamma(&c.f_l, 1.0, t, &o).unwrap().value;
        let gc = decoherence_gamma(&c.f_c, 1.0, t, &o).unwrap().value;
        let expected =
            c.rho0_j.rho21() * C64::from_polar((-(0.05f64.powi(2) * gl + 0.01 * gc)).exp(), -t);
        assert!((exact_offdiagonal(&c, t, &o).unwrap() - expected).norm() < 1e-15);
    }

    #[test]
    fn recurrences() {
        for n in [2, 11] {
            for p in [0.3, 0.5] {
                let c = cfg(n, p);
                let a = c.a().abs();
                for k in 1..4 {
                    let full =
                        asymptotic_product_factor(&c, k as f64 * std::f64::consts::PI / a).unwrap();
                    assert!((full.norm() - 1.0).abs() < 1e-10);
                    let half =
                        asymptotic_product_factor(&c, (k as f64 + 0.5) * std::f64::consts::PI / a)
                            .unwrap();
                    assert!((half.norm() - (1.0 - 2.0 * p).abs().powi(n as i32 - 1)).abs() < 1e-10);
                }
            }
        }
        let c = cfg(11, 0.5);
        let zero =
            asymptotic_product_factor(&c, std::f64::consts::PI / (2.0 * c.a().abs())).unwrap();
        assert!(zero.norm() < 1e-12);
    }

    #[test]
    fn degenerate_d_factor_matches_oracle_term() {
        let c = cfg(2, 0.3);
        let ens = c.ensemble().unwrap();
        let others = &ens.species()[1].spin;
        let rs = compute_rateset(others, &ens).unwrap();
        let d = DFactor::new(&rs, &others.rho0);
        for t in [0.0, 1.0, 17.0, 90.0] {
            let oracle = asymptotic_product_factor(&c, t).unwrap();
            assert!((d.value(t) - oracle).norm() < 1e-12);
        }
    }

    #[test]
    fn substituted_agrees_with_main_term() {
        let c = cfg(6, 0.3);
        let times: Vec<f64> = (0..=50).map(|k| 2.0 * k as f64).collect();
        let rep = compare_resonance_vs_exact(&c, &times, &QuadOptions::default()).unwrap();
        assert!(
            rep.max_substituted_deviation < 1e-8,
            "{}",
            rep.max_substituted_deviation
        );
        assert!(rep.max_exact_deviation > 0.0);
    }

    #[test]
    fn rejects_invalid_config() {
        let mut c = cfg(3, 0.3);
        c.p = 1.2;
        assert!(c.validate().is_err());
        let mut c = cfg(3, 0.3);
        c.n = 0;
        assert!(exact_offdiagonal(&c, 1.0, &QuadOptions::default()).is_err());
    }
}
