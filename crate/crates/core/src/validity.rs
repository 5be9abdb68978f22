// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! Applicability conditions of the perturbative main term.

use crate::model::EnsembleConfig;

/// Default bound on every margin; a condition passes when its margin is below it.
pub const DEFAULT_THRESHOLD: f64 = 0.1;
/// Above this many distinct frequencies `Δ` is estimated instead of enumerated.
pub const MAX_ENUMERATED_FREQUENCIES: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Condition {
    pub margin: f64,
    pub pass: bool,
}

impl Condition {
    fn new(margin: f64, threshold: f64) -> Self {
        Condition {
            margin,
            pass: margin < threshold,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidityReport {
    /// Largest coupling constant of any kind.
    pub alpha_max: f64,
    /// Smallest gap between distinct Bohr energies.
    pub delta: f64,
    /// `false` when `Δ` was estimated from the frequency spread.
    pub delta_exact: bool,
    pub threshold: f64,
    /// `N²λ_max²/Δ` with the exchange collective coupling.
    pub condition_2_11: Condition,
    /// `N²α_max²/Δ`, the same bound with every coupling.
    pub condition_2_11_alpha: Condition,
    /// `α_c²N/ω_min` with `α_c = max(|λ|, |ϰ|)`.
    pub condition_sec5_collective: Condition,
    /// `α_ℓ/ω_min` with `α_ℓ = max(|μ|, |ν|)`.
    pub condition_sec5_local: Condition,
    /// Distinct frequencies across blocks.
    pub assumption_a_ok: bool,
}

impl ValidityReport {
    pub fn all_pass(&self) -> bool {
        self.condition_2_11.pass
            && self.condition_sec5_collective.pass
            && self.condition_sec5_local.pass
    }
}

pub fn check_validity(ens: &EnsembleConfig, threshold: f64) -> ValidityReport {
    let spins: Vec<_> = ens.species().iter().map(|s| &s.spin).collect();
    let fold =
        |f: &dyn Fn(&crate::SpinParams) -> f64| spins.iter().map(|s| f(s)).fold(0.0, f64::max);
    let alpha_max = fold(&|s| s.max_coupling());
    let lambda_max = fold(&|s| s.lambda.abs());
    let alpha_c = fold(&|s| s.lambda.abs().max(s.varkappa.abs()));
    let alpha_l = fold(&|s| s.mu.abs().max(s.nu.abs()));
    let omega_min = spins.iter().map(|s| s.omega).fold(f64::INFINITY, f64::min);

    let mut freqs: Vec<f64> = spins.iter().map(|s| s.omega).collect();
    freqs.sort_by(f64::total_cmp);
    let assumption_a_ok = freqs.windows(2).all(|w| w[0] != w[1]);
    freqs.dedup();
    let (delta, delta_exact) = bohr_gap(&freqs);

    let n = ens.total_spins() as f64;
    ValidityReport {
        alpha_max,
        delta,
        delta_exact,
        threshold,
        condition_2_11: Condition::new(n * n * lambda_max * lambda_max / delta, threshold),
        condition_2_11_alpha: Condition::new(n * n * alpha_max * alpha_max / delta, threshold),
        condition_sec5_collective: Condition::new(alpha_c * alpha_c * n / omega_min, threshold),
        condition_sec5_local: Condition::new(alpha_l / omega_min, threshold),
        assumption_a_ok,
    }
}

/// `Δ = (1/2) min |Σ_j ω_j d_j|` over `d ∈ {−4, −2, 0, 2, 4}^K` with a nonzero
/// sum, for the `K` distinct frequencies. Exact for `K ≤ 10`; above that
/// `min ω − (max ω − min ω)`, floored at `1e-300`.
pub fn bohr_gap(freqs: &[f64]) -> (f64, bool) {
    if freqs.len() > MAX_ENUMERATED_FREQUENCIES {
        let lo = freqs.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = freqs.iter().copied().fold(0.0, f64::max);
        return ((lo - (hi - lo)).max(1e-300), false);
    }
    let scale: f64 = freqs.iter().sum::<f64>() * 4.0;
    let zero_tol = 1e-12 * scale;
    let (left, right) = freqs.split_at(freqs.len() / 2);
    let a = dedup_sorted(half_sums(left), zero_tol);
    let b = dedup_sorted(half_sums(right), zero_tol);
    let mut best = f64::INFINITY;
    for &x in &a {
        let pos = b.partition_point(|&y| y < -x);
        // nearest nonzero totals on either side of −x
        for idx in (0..pos).rev() {
            let s = (x + b[idx]).abs();
            if s > zero_tol {
                best = best.min(s);
                break;
            }
        }
        for &y in &b[pos..] {
            let s = (x + y).abs();
            if s > zero_tol {
                best = best.min(s);
                break;
            }
        }
    }
    (0.5 * best, true)
}

fn half_sums(freqs: &[f64]) -> Vec<f64> {
    let mut sums = vec![0.0];
    for &w in freqs {
        sums = sums
            .iter()
            .flat_map(|&s| [-4.0, -2.0, 0.0, 2.0, 4.0].map(|d| s + d * w))
            .collect();
    }
    sums
}

fn dedup_sorted(mut v: Vec<f64>, tol: f64) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::with_capacity(v.len());
    for x in v {
        if out.last().is_none_or(|&l| x - l > tol) {
            out.push(x);
        }
    }
    out
}
