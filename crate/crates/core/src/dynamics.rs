// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! Main-term single-spin dynamics, the collective factor `C_j(N, t)` and the
//! coefficients of the modified Bloch equation.
//!
//! `⟨S^−⟩` denotes `[ρ]₂₁`, the expectation of the observable with
//! `[A]₁₂ = 1` and all other entries zero. It evolves with
//! `e^{it(−ω + X + iY)} C_j(N, t)`.

use nalgebra::Matrix2;

use crate::error::{Error, Result};
use crate::model::{DensityMatrix, EnsembleConfig};
use crate::rates::RateSet;
use crate::C64;

/// Below this modulus the factor `D(t)e^{−itz⁻}` is treated as a zero of `D`:
/// its logarithmic derivative is reported as undefined.
pub const LOG_DERIVATIVE_FLOOR: f64 = 1e-12;
/// Floor for `|D(t)e^{−itz⁻}|` in the log domain.
pub const MAGNITUDE_FLOOR: f64 = 1e-300;

/// `D(t) = κe^{itz⁺} + (1 − κ)e^{itz⁻}` for one spin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DFactor {
    pub kappa: C64,
    pub z_plus: C64,
    pub z_minus: C64,
}

/// `ln D` split into magnitude and phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogValue {
    pub ln_abs: f64,
    pub phase: f64,
    /// Set when the magnitude hit [`MAGNITUDE_FLOOR`].
    pub clamped: bool,
}

impl LogValue {
    pub fn value(&self) -> C64 {
        C64::from_polar(self.ln_abs.exp(), self.phase)
    }
}

impl DFactor {
    pub fn new(rs: &RateSet, rho0: &DensityMatrix) -> Self {
        DFactor {
            kappa: rs.kappa(rho0.p11()),
            z_plus: rs.z_plus,
            z_minus: rs.z_minus,
        }
    }

    /// `w(t) = 1 + κ(e^{it(z⁺ − z⁻)} − 1)`, so that `D = e^{itz⁻}·w`.
    fn reduced(&self, t: f64) -> (C64, C64) {
        let em1 = exp_m1(C64::i() * t * (self.z_plus - self.z_minus));
        (1.0 + self.kappa * em1, em1 + 1.0)
    }

    pub fn value(&self, t: f64) -> C64 {
        let (w, _) = self.reduced(t);
        (C64::i() * t * self.z_minus).exp() * w
    }

    /// Principal-branch `ln D(t)`.
    pub fn log_value(&self, t: f64) -> LogValue {
        let (w, _) = self.reduced(t);
        let (ln_w, clamped) = clamped_ln_abs(w);
        LogValue {
            ln_abs: -t * self.z_minus.im + ln_w,
            phase: t * self.z_minus.re + w.arg(),
            clamped,
        }
    }

    /// `Ḋ/D = iz⁻ + iκ(z⁺ − z⁻)e^{it(z⁺−z⁻)}/w(t)`, `None` near zeros of `D`.
    pub fn log_derivative(&self, t: f64) -> Option<C64> {
        let (w, e) = self.reduced(t);
        if w.norm() < LOG_DERIVATIVE_FLOOR {
            return None;
        }
        Some(C64::i() * self.z_minus + C64::i() * self.kappa * (self.z_plus - self.z_minus) * e / w)
    }
}

/// `e^q − 1` without cancellation for small `|q|`.
fn exp_m1(q: C64) -> C64 {
    let half = (0.5 * q.im).sin();
    let re = q.re.exp_m1() * q.im.cos() - 2.0 * half * half;
    C64::new(re, q.re.exp() * q.im.sin())
}

fn clamped_ln_abs(w: C64) -> (f64, bool) {
    let m = w.norm();
    if m < MAGNITUDE_FLOOR {
        (MAGNITUDE_FLOOR.ln(), true)
    } else {
        (m.ln(), false)
    }
}

fn check_rates(ens: &EnsembleConfig, rates: &[RateSet]) -> Result<()> {
    if rates.len() != ens.species().len() {
        return Err(Error::invalid(
            "rates",
            format!(
                "expected one rate set per species block ({}), got {}",
                ens.species().len(),
                rates.len()
            ),
        ));
    }
    Ok(())
}

fn check_grid(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::invalid("times", "time grid is empty"));
    }
    if times[0] < 0.0 || !times.iter().all(|t| t.is_finite()) {
        return Err(Error::invalid(
            "times",
            "time grid must be finite and nonnegative",
        ));
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "times",
            "time grid must be strictly increasing",
        ));
    }
    Ok(())
}

/// Per-species D factors, in block order.
pub fn species_factors(ens: &EnsembleConfig, rates: &[RateSet]) -> Result<Vec<DFactor>> {
    check_rates(ens, rates)?;
    Ok(ens
        .species()
        .iter()
        .zip(rates)
        .map(|(s, rs)| DFactor::new(rs, &s.spin.rho0))
        .collect())
}

/// Powers of each species' D factor in `C` for a spin of block `k`.
fn exponents(ens: &EnsembleConfig, k: usize) -> Vec<f64> {
    ens.species()
        .iter()
        .enumerate()
        .map(|(l, s)| (s.count - usize::from(l == k)) as f64)
        .collect()
}

/// `C_j(N, t) = Π_{l≠j} D_l(t)` in log-polar form with the principal phase
/// of each factor.
pub fn collective_factor(
    j: usize,
    ens: &EnsembleConfig,
    rates: &[RateSet],
    t: f64,
) -> Result<LogValue> {
    let factors = species_factors(ens, rates)?;
    let k = ens.species_of(j)?;
    let mut out = LogValue {
        ln_abs: 0.0,
        phase: 0.0,
        clamped: false,
    };
    for (d, p) in factors.iter().zip(exponents(ens, k)) {
        if p == 0.0 {
            continue;
        }
        let l = d.log_value(t);
        out.ln_abs += p * l.ln_abs;
        out.phase += p * l.phase;
        out.clamped |= l.clamped;
    }
    Ok(out)
}

/// Continuous-phase `ln D` along an increasing grid. Between grid points
/// the rotating term is sampled at least every half radian so that each
/// principal-phase step stays below π.
fn unwrapped_log_series(d: &DFactor, times: &[f64]) -> Vec<LogValue> {
    let mut out = Vec::with_capacity(times.len());
    let mut prev_t = 0.0;
    let mut prev_arg = d.reduced(0.0).0.arg();
    let mut offset = 0.0;
    let rate = (d.z_plus - d.z_minus).norm();
    for &t in times {
        let steps = (((t - prev_t) * rate / 0.5).ceil() as usize).clamp(1, 100_000);
        for s in 1..=steps {
            let ts = prev_t + (t - prev_t) * s as f64 / steps as f64;
            let arg = d.reduced(ts).0.arg();
            let jump = arg - prev_arg;
            if jump > std::f64::consts::PI {
                offset -= std::f64::consts::TAU;
            } else if jump < -std::f64::consts::PI {
                offset += std::f64::consts::TAU;
            }
            prev_arg = arg;
        }
        prev_t = t;
        let (w, _) = d.reduced(t);
        let (ln_w, clamped) = clamped_ln_abs(w);
        out.push(LogValue {
            ln_abs: -t * d.z_minus.im + ln_w,
            phase: t * d.z_minus.re + w.arg() + offset,
            clamped,
        });
    }
    out
}

/// `C_j(N, t)` on a grid with the phase unwrapped along the grid.
pub fn collective_factor_series(
    j: usize,
    ens: &EnsembleConfig,
    rates: &[RateSet],
    times: &[f64],
) -> Result<Vec<LogValue>> {
    check_grid(times)?;
    let factors = species_factors(ens, rates)?;
    let k = ens.species_of(j)?;
    Ok(combine_series(&factors, &exponents(ens, k), times))
}

fn combine_series(factors: &[DFactor], powers: &[f64], times: &[f64]) -> Vec<LogValue> {
    let mut acc = vec![
        LogValue {
            ln_abs: 0.0,
            phase: 0.0,
            clamped: false,
        };
        times.len()
    ];
    for (d, &p) in factors.iter().zip(powers) {
        if p == 0.0 {
            continue;
        }
        for (a, l) in acc.iter_mut().zip(unwrapped_log_series(d, times)) {
            a.ln_abs += p * l.ln_abs;
            a.phase += p * l.phase;
            a.clamped |= l.clamped;
        }
    }
    acc
}

/// Main term of `⟨A_j⟩_t` for the spin with index `j`.
pub fn evolve_observable(
    a: &Matrix2<C64>,
    j: usize,
    ens: &EnsembleConfig,
    rates: &[RateSet],
    t: f64,
) -> Result<C64> {
    check_rates(ens, rates)?;
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::invalid(
            "t",
            format!("must be nonnegative and finite, got {t}"),
        ));
    }
    let k = ens.species_of(j)?;
    let rs = &rates[k];
    let rho = &ens.species()[k].spin.rho0;
    let c = rs.c;
    let equilibrium = (a[(0, 0)] + c * a[(1, 1)]) / (1.0 + c);
    let population =
        (-t * rs.gamma_relax).exp() * (rho.p11() - 1.0 / (1.0 + c)) * (a[(0, 0)] - a[(1, 1)]);
    let lc = collective_factor(j, ens, rates, t)?;
    let detuning = t * (rs.x.value - rs.omega);
    let decay = lc.ln_abs - t * rs.y;
    let lower = C64::from_polar(decay.exp(), detuning + lc.phase) * rho.rho21() * a[(0, 1)];
    let upper = C64::from_polar(decay.exp(), -detuning - lc.phase) * rho.rho12() * a[(1, 0)];
    Ok(equilibrium + population + lower + upper)
}

/// Sampled magnetization of one species block or of the whole ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub sz: Vec<f64>,
    /// `Σ_j [ρ_t^{(j)}]₂₁`.
    pub sminus: Vec<C64>,
    /// `Γ(t)`; `None` where the logarithmic derivative is undefined.
    pub gamma_t: Vec<Option<f64>>,
    /// `B(t)`; `None` where the logarithmic derivative is undefined.
    pub b_t: Vec<Option<f64>>,
    /// `ln|C_j(N, t)|` for a spin of this block; `None` for the ensemble
    /// total when several blocks carry different factors.
    pub log_c_magnitude: Option<Vec<f64>>,
    /// Unwrapped `arg C_j(N, t)`, same availability as the magnitude.
    pub c_phase: Option<Vec<f64>>,
    /// Any factor hit [`MAGNITUDE_FLOOR`].
    pub clamped: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MagnetizationTrajectory {
    pub total: Trajectory,
    /// One trajectory per species block, in block order.
    pub species: Vec<Trajectory>,
}

/// `Γ(t)` and `B(t)` of one species block.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochCoefficients {
    pub gamma: Vec<Option<f64>>,
    pub b: Vec<Option<f64>>,
}

/// `Γ_A(t) = γ_relax/2 + γ_cons − Σ_l p_l Re(Ḋ_l/D_l)`,
/// `B_A(t) = −ω + X + Σ_l p_l Im(Ḋ_l/D_l)`, with `p_l` the power of `D_l`
/// in `C` for a spin of block `A`.
pub fn bloch_coefficients(
    ens: &EnsembleConfig,
    rates: &[RateSet],
    times: &[f64],
) -> Result<Vec<BlochCoefficients>> {
    check_grid(times)?;
    let factors = species_factors(ens, rates)?;
    let derivs: Vec<Vec<Option<C64>>> = factors
        .iter()
        .map(|d| times.iter().map(|&t| d.log_derivative(t)).collect())
        .collect();
    Ok((0..factors.len())
        .map(|k| {
            let powers = exponents(ens, k);
            let rs = &rates[k];
            let mut gamma = Vec::with_capacity(times.len());
            let mut b = Vec::with_capacity(times.len());
            for i in 0..times.len() {
                let mut sum = Some(C64::new(0.0, 0.0));
                for (dl, &p) in derivs.iter().zip(&powers) {
                    if p != 0.0 {
                        sum = sum.zip(dl[i]).map(|(s, d)| s + p * d);
                    }
                }
                gamma.push(sum.map(|s| rs.y - s.re));
                b.push(sum.map(|s| rs.x.value - rs.omega + s.im));
            }
            BlochCoefficients { gamma, b }
        })
        .collect())
}

/// `t → ∞` limits `(Γ_A(∞), B_A(∞))` per block, from `Ḋ/D → iz⁻`:
/// `Γ_A(∞) = γ_relax/2 + γ_cons + Σ_l p_l Im z_l⁻`, `B_A(∞) = −ω + X + Σ_l p_l Re z_l⁻`.
pub fn bloch_limits(ens: &EnsembleConfig, rates: &[RateSet]) -> Result<Vec<(f64, f64)>> {
    check_rates(ens, rates)?;
    Ok((0..rates.len())
        .map(|k| {
            let (mut g, mut b) = (rates[k].y, rates[k].x.value - rates[k].omega);
            for (l, p) in exponents(ens, k).into_iter().enumerate() {
                g += p * rates[l].z_minus.im;
                b += p * rates[l].z_minus.re;
            }
            (g, b)
        })
        .collect())
}

/// Total and per-species `⟨S^z⟩_t`, `⟨S^−⟩_t`, `Γ(t)`, `B(t)` and `C(N, t)`.
pub fn magnetization_trajectory(
    ens: &EnsembleConfig,
    rates: &[RateSet],
    times: &[f64],
) -> Result<MagnetizationTrajectory> {
    check_grid(times)?;
    let factors = species_factors(ens, rates)?;
    let bloch = bloch_coefficients(ens, rates, times)?;
    let mut species = Vec::with_capacity(factors.len());
    for (k, (s, rs)) in ens.species().iter().zip(rates).enumerate() {
        let n = s.count as f64;
        let rho = &s.spin.rho0;
        let half_tanh = 0.5 * (1.0 - rs.c) / (1.0 + rs.c);
        let c_series = combine_series(&factors, &exponents(ens, k), times);
        let mut sz = Vec::with_capacity(times.len());
        let mut sminus = Vec::with_capacity(times.len());
        for (&t, lc) in times.iter().zip(&c_series) {
            let relax = (-t * rs.gamma_relax).exp();
            sz.push(n * (half_tanh * (1.0 - relax) + relax * rho.sz()));
            let arg = t * (rs.x.value - rs.omega) + lc.phase;
            sminus.push(n * C64::from_polar((lc.ln_abs - t * rs.y).exp(), arg) * rho.rho21());
        }
        species.push(Trajectory {
            times: times.to_vec(),
            sz,
            sminus,
            gamma_t: bloch[k].gamma.clone(),
            b_t: bloch[k].b.clone(),
            log_c_magnitude: Some(c_series.iter().map(|l| l.ln_abs).collect()),
            c_phase: Some(c_series.iter().map(|l| l.phase).collect()),
            clamped: c_series.iter().any(|l| l.clamped),
        });
    }
    let total = if species.len() == 1 {
        species[0].clone()
    } else {
        total_of(&species, times)
    };
    Ok(MagnetizationTrajectory { total, species })
}

/// Sums the blocks; the total's `−Γ + iB` is the `⟨S_A^−⟩`-weighted mean
/// of the block values.
fn total_of(species: &[Trajectory], times: &[f64]) -> Trajectory {
    let len = times.len();
    let mut sz = vec![0.0; len];
    let mut sminus = vec![C64::new(0.0, 0.0); len];
    let mut gamma_t = Vec::with_capacity(len);
    let mut b_t = Vec::with_capacity(len);
    for i in 0..len {
        let mut weighted = Some(C64::new(0.0, 0.0));
        let mut scale = 0.0;
        for s in species {
            sz[i] += s.sz[i];
            sminus[i] += s.sminus[i];
            scale += s.sminus[i].norm();
            let rate = s.gamma_t[i].zip(s.b_t[i]).map(|(g, b)| C64::new(-g, b));
            weighted = weighted.zip(rate).map(|(w, r)| w + r * s.sminus[i]);
        }
        let rate = weighted
            .filter(|_| scale > 0.0 && sminus[i].norm() > 1e-12 * scale)
            .map(|w| (w / scale) / (sminus[i] / scale));
        gamma_t.push(rate.map(|r| -r.re));
        b_t.push(rate.map(|r| r.im));
    }
    Trajectory {
        times: times.to_vec(),
        sz,
        sminus,
        gamma_t,
        b_t,
        log_c_magnitude: None,
        c_phase: None,
        clamped: species.iter().any(|s| s.clamped),
    }
}

/// Time grid spacing.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    /// `t = 0` followed by geometric points over six decades ending at `t_max`.
    Log,
}

pub const LOG_GRID_DECADES: f64 = 6.0;

pub fn time_grid(t_max: f64, num_points: usize, spacing: Spacing) -> Result<Vec<f64>> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::invalid(
            "t_max",
            format!("must be positive and finite, got {t_max}"),
        ));
    }
    if num_points < 2 {
        return Err(Error::invalid(
            "num_points",
            format!("grid needs at least 2 points, got {num_points}"),
        ));
    }
    let last = (num_points - 1) as f64;
    Ok(match spacing {
        Spacing::Linear => (0..num_points).map(|k| t_max * k as f64 / last).collect(),
        Spacing::Log if num_points == 2 => vec![0.0, t_max],
        Spacing::Log => std::iter::once(0.0)
            .chain((1..num_points).map(|k| {
                let frac = (k - 1) as f64 / (last - 1.0);
                t_max * 10f64.powf(-LOG_GRID_DECADES * (1.0 - frac))
            }))
            .collect(),
    })
}
