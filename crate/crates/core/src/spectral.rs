// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! Reservoir integrals for the parametric form-factor family
//! `h(r, Σ) = r^p e^{-r^m} h'(Σ)`, `p = n - 1/2`, `m ∈ {1, 2}`.
//!
//! Only the angular norm `∫|h'|² dΣ` of the angular part enters any
//! observable, so a form factor is stored as `(n, m, angular_norm_sq)`.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_segments, QuadOptions};

/// Below this argument `coth` is evaluated from its two-term Laurent series.
const COTH_SERIES_BELOW: f64 = 1e-4;

/// Integration domains are cut where the radial envelope has fallen to this
/// fraction of its peak.
const TAIL_CUTOFF: f64 = 1e-16;

/// Upper bound on period-aligned breakpoints for oscillatory integrals.
const MAX_PERIOD_BREAKS: usize = 400_000;

/// Scalar quadrature result with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralResult {
    pub value: f64,
    pub abs_error_estimate: f64,
}

impl SpectralResult {
    pub fn zero() -> Self {
        SpectralResult {
            value: 0.0,
            abs_error_estimate: 0.0,
        }
    }

    fn scaled(self, factor: f64) -> Self {
        SpectralResult {
            value: self.value * factor,
            abs_error_estimate: self.abs_error_estimate * factor.abs(),
        }
    }

    fn plus(self, other: SpectralResult) -> Self {
        SpectralResult {
            value: self.value + other.value,
            abs_error_estimate: self.abs_error_estimate + other.abs_error_estimate,
        }
    }
}

/// Reservoir coupling function `h(r, Σ) = r^{n-1/2} e^{-r^m} h'(Σ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FormFactor {
    n: u32,
    m: u32,
    angular_norm_sq: f64,
}

impl FormFactor {
    pub fn new(n: u32, m: u32, angular_norm_sq: f64) -> Result<Self> {
        if m != 1 && m != 2 {
            return Err(Error::invalid(
                "form factor m",
                format!("cutoff exponent must be 1 or 2, got {m}"),
            ));
        }
        if !(angular_norm_sq.is_finite() && angular_norm_sq > 0.0) {
            return Err(Error::invalid(
                "form factor angular_norm_sq",
                format!("must be positive and finite, got {angular_norm_sq}"),
            ));
        }
        if n > 40 {
            return Err(Error::invalid(
                "form factor n",
                format!("radial exponent index {n} is out of range"),
            ));
        }
        Ok(FormFactor {
            n,
            m,
            angular_norm_sq,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn angular_norm_sq(&self) -> f64 {
        self.angular_norm_sq
    }

    /// Radial exponent `p = n - 1/2`.
    pub fn p(&self) -> f64 {
        self.n as f64 - 0.5
    }

    fn cutoff(&self, u: f64) -> f64 {
        match self.m {
            1 => (-2.0 * u).exp(),
            _ => (-2.0 * u * u).exp(),
        }
    }

    /// `G_h(u) = u^{2p} e^{-2u^m} ∫|h'|²`.
    pub fn angular_density(&self, u: f64) -> f64 {
        u.powi(2 * self.n as i32 - 1) * self.cutoff(u) * self.angular_norm_sq
    }

    /// `γ₊(h) = lim_{u→0⁺} u G_h(u)`.
    pub fn gamma_plus(&self) -> f64 {
        if self.n == 0 {
            self.angular_norm_sq
        } else {
            0.0
        }
    }

    /// `J_h(ω) = π ω² ∫|h(ω, Σ)|² dΣ`.
    pub fn spectral_density(&self, omega: f64) -> f64 {
        PI * omega * omega * self.angular_density(omega)
    }

    /// `J̃_h(0) = lim_{ω→0⁺} J_h(ω)/ω`.
    pub fn spectral_density_slope_zero(&self) -> f64 {
        PI * self.gamma_plus()
    }

    /// `J_h(|u|) coth(β|u|/2)`, continuous through `u = 0`.
    pub fn thermal_density(&self, u: f64, beta: f64) -> f64 {
        let r = u.abs();
        if r == 0.0 {
            return if self.n == 0 {
                2.0 * PI * self.angular_norm_sq / beta
            } else {
                0.0
            };
        }
        // J(r) coth(βr/2) = π r^{2n} e^{-2r^m} norm · r coth(βr/2)
        PI * r.powi(2 * self.n as i32)
            * self.cutoff(r)
            * self.angular_norm_sq
            * r
            * coth(0.5 * beta * r)
    }

    /// `∫₀^∞ r G_h(r) dr`, the bath self-energy integral `∫|h(p)|²/|p| d³p`.
    pub fn bath_coulomb_integral(&self) -> f64 {
        // ∫₀^∞ r^{2n} e^{-2r^m} dr = Γ(s)/(m 2^s), s = (2n+1)/m
        let twice_s = match self.m {
            1 => 2 * (2 * self.n + 1),
            _ => 2 * self.n + 1,
        };
        let s = twice_s as f64 / 2.0;
        gamma_of_half(twice_s) / (self.m as f64 * 2f64.powf(s)) * self.angular_norm_sq
    }

    /// Radius beyond which the envelope `r^{2n+1} e^{-2r^m}` stays below
    /// `TAIL_CUTOFF` times its maximum.
    pub fn cutoff_radius(&self) -> f64 {
        let k = (2 * self.n + 1) as f64;
        let m = self.m as f64;
        let log_env = |r: f64| k * r.ln() - 2.0 * r.powf(m);
        // Envelope peaks at r* = (k/(2m))^{1/m} and decreases afterwards.
        let peak = (k / (2.0 * m)).powf(1.0 / m);
        let target = log_env(peak) + TAIL_CUTOFF.ln();
        let mut lo = peak;
        let mut hi = peak.max(1.0) * 2.0;
        while log_env(hi) > target {
            lo = hi;
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if log_env(mid) > target {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * hi {
                break;
            }
        }
        hi
    }
}

/// `coth(x)`, switching to `1/x + x/3` for `|x| < 1e-4`.
pub fn coth(x: f64) -> f64 {
    if x.abs() < COTH_SERIES_BELOW {
        1.0 / x + x / 3.0
    } else {
        1.0 / x.tanh()
    }
}

/// `Γ(k/2)` for a positive integer `k`.
fn gamma_of_half(k: u32) -> f64 {
    let (mut value, mut x) = if k.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    let target = k as f64 / 2.0;
    while x < target - 0.25 {
        value *= x;
        x += 1.0;
    }
    value
}

pub fn spectral_density(h: &FormFactor, omega: f64) -> f64 {
    h.spectral_density(omega)
}

pub fn spectral_density_slope_zero(h: &FormFactor) -> f64 {
    h.spectral_density_slope_zero()
}

pub fn angular_density(h: &FormFactor, u: f64) -> f64 {
    h.angular_density(u)
}

pub fn gamma_plus(h: &FormFactor) -> f64 {
    h.gamma_plus()
}

pub fn bath_coulomb_integral(h: &FormFactor) -> f64 {
    h.bath_coulomb_integral()
}

/// Unit-coupling dispersion integral
/// `(1/8π) P.V. ∫_ℝ J_h(|u|) coth(β|u|/2) / (u + ω) du`.
///
/// The pole at `u = -ω` is removed on a symmetric window `[-ω-d, -ω+d]` by
/// integrating the odd part `[F(-ω+s) - F(-ω-s)]/s` over `s ∈ (0, d]`.
pub fn unit_dispersion_integral(
    h: &FormFactor,
    omega: f64,
    beta: f64,
    opts: &QuadOptions,
) -> Result<SpectralResult> {
    check_positive("omega", omega)?;
    check_positive("beta", beta)?;
    let cut = h.cutoff_radius();
    let weight = |u: f64| h.thermal_density(u, beta);
    let principal = if omega > cut + 1.0 {
        integrate_segments(|u| weight(u) / (u + omega), &[-cut, 0.0, cut], opts)?
    } else {
        let half = (0.5 * omega).min(0.5);
        let left = -omega - half;
        let right = -omega + half;
        let outer_lo = left.min(-cut);
        let lower = integrate_segments(|u| weight(u) / (u + omega), &[outer_lo, left], opts)?;
        let upper = integrate_segments(
            |u| weight(u) / (u + omega),
            &[right, 0.0, cut.max(right)],
            opts,
        )?;
        let odd = integrate_segments(
            |s| {
                if s == 0.0 {
                    0.0
                } else {
                    (weight(-omega + s) - weight(-omega - s)) / s
                }
            },
            &[0.0, half],
            opts,
        )?;
        lower.plus(upper).plus(odd)
    };
    Ok(principal.scaled(1.0 / (8.0 * PI)))
}

/// `X = (1/8π) P.V. ∫ [λ² J_{g_c}(|u|) + μ² J_{g_ℓ}(|u|)] coth(β|u|/2)/(u + ω) du`.
pub fn pv_dispersion_integral(
    g_c: &FormFactor,
    g_loc: &FormFactor,
    lambda: f64,
    mu: f64,
    omega: f64,
    beta: f64,
    opts: &QuadOptions,
) -> Result<SpectralResult> {
    check_positive("omega", omega)?;
    check_positive("beta", beta)?;
    let mut total = SpectralResult::zero();
    for (coupling, h) in [(lambda, g_c), (mu, g_loc)] {
        if coupling != 0.0 {
            let unit = unit_dispersion_integral(h, omega, beta, opts)
                .map_err(|e| e.in_operation("pv_dispersion_integral"))?;
            total = total.plus(unit.scaled(coupling * coupling));
        }
    }
    Ok(total)
}

/// `Γ(t) = ∫₀^∞ G_h(r) coth(βr/2) sin²(rt/2) dr`.
pub fn decoherence_gamma(
    h: &FormFactor,
    beta: f64,
    t: f64,
    opts: &QuadOptions,
) -> Result<SpectralResult> {
    check_positive("beta", beta)?;
    check_time(t)?;
    if t == 0.0 {
        return Ok(SpectralResult::zero());
    }
    let norm = h.angular_norm_sq;
    let n = h.n as i32;
    let integrand = |r: f64| {
        if r == 0.0 {
            return if n == 0 {
                norm * t * t / (2.0 * beta)
            } else {
                0.0
            };
        }
        let s = (0.5 * r * t).sin() / r;
        // G(r) coth(βr/2) sin² = r^{2n} e^{-2r^m} norm · r coth(βr/2) · (sin/r)²
        r.powi(2 * n) * h.cutoff(r) * norm * (r * coth(0.5 * beta * r)) * s * s
    };
    integrate_segments(integrand, &period_breaks(h.cutoff_radius(), t)?, opts)
        .map_err(|e| e.in_operation("decoherence_gamma"))
}

/// `S(t) = -(1/2) ∫₀^∞ G_h(r) (rt - sin rt) dr`.
pub fn lamb_shift(h: &FormFactor, t: f64, opts: &QuadOptions) -> Result<SpectralResult> {
    check_time(t)?;
    if t == 0.0 {
        return Ok(SpectralResult::zero());
    }
    let breaks = period_breaks(h.cutoff_radius(), t)?;
    if t < 1.0 {
        let integrand = |r: f64| {
            let x = r * t;
            let excess = if x < 1e-2 {
                let x3 = x * x * x;
                x3 / 6.0 * (1.0 - x * x / 20.0 * (1.0 - x * x / 42.0))
            } else {
                x - x.sin()
            };
            if r == 0.0 {
                0.0
            } else {
                h.angular_density(r) * excess
            }
        };
        let r = integrate_segments(integrand, &breaks, opts)
            .map_err(|e| e.in_operation("lamb_shift"))?;
        Ok(r.scaled(-0.5))
    } else {
        // Split into the linear part (closed form) and a bounded oscillatory part.
        let oscillatory = integrate_segments(
            |r: f64| {
                if r == 0.0 {
                    if h.n == 0 {
                        h.angular_norm_sq * t
                    } else {
                        0.0
                    }
                } else {
                    h.angular_density(r) * (r * t).sin()
                }
            },
            &breaks,
            opts,
        )
        .map_err(|e| e.in_operation("lamb_shift"))?;
        let linear = t * h.bath_coulomb_integral();
        Ok(SpectralResult {
            value: -0.5 * (linear - oscillatory.value),
            abs_error_estimate: 0.5 * oscillatory.abs_error_estimate,
        })
    }
}

fn period_breaks(cut: f64, t: f64) -> Result<Vec<f64>> {
    let period = TAU / t;
    let count = (cut / period).ceil() as usize;
    if count > MAX_PERIOD_BREAKS {
        return Err(Error::invalid(
            "t",
            format!("time {t} needs {count} oscillation periods, above the supported {MAX_PERIOD_BREAKS}"),
        ));
    }
    let mut breaks: Vec<f64> = (0..count).map(|k| k as f64 * period).collect();
    breaks.push(cut);
    Ok(breaks)
}

fn check_positive(name: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be positive and finite, got {x}"),
        ))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            "t",
            format!("must be nonnegative and finite, got {t}"),
        ))
    }
}
