// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! Globally adaptive Gauss–Kronrod (7/15) quadrature on finite intervals.
//!
//! The integration range is given as an ordered list of breakpoints; every
//! segment starts as one subinterval and the subinterval with the largest
//! error estimate is bisected until the summed error estimate meets
//! `max(abs_tol, rel_tol * |value|)`. Ties are broken by creation order, so
//! the sequence of bisections, and therefore the result, is fully
//! deterministic.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};
use crate::spectral::SpectralResult;

/// Kronrod abscissae on [-1, 1], descending; even indices 1, 3, 5, 7 are the
/// Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and work limit for the adaptive scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Bisections allowed on top of the initial segments.
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-8,
            max_subdivisions: 4000,
        }
    }
}

impl QuadOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol >= 0.0 && self.rel_tol >= 0.0)
            || (self.abs_tol == 0.0 && self.rel_tol == 0.0)
        {
            return Err(Error::invalid(
                "quadrature tolerance",
                "tolerances must be nonnegative and not both zero",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
    seq: usize,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    // Max-heap on error; among equal errors the oldest segment wins.
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// One 15-point Kronrod evaluation with the QUADPACK error heuristic.
fn kronrod15<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> (f64, f64) {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs_sum = kronrod.abs();
    let mut f1 = [0.0; 7];
    let mut f2 = [0.0; 7];
    for k in 0..7 {
        let dx = half * XGK[k];
        let lo_val = f(center - dx);
        let hi_val = f(center + dx);
        f1[k] = lo_val;
        f2[k] = hi_val;
        kronrod += WGK[k] * (lo_val + hi_val);
        abs_sum += WGK[k] * (lo_val.abs() + hi_val.abs());
        if k % 2 == 1 {
            gauss += WG[k / 2] * (lo_val + hi_val);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[7] * (fc - mean).abs();
    for k in 0..7 {
        asc += WGK[k] * ((f1[k] - mean).abs() + (f2[k] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut err = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && err != 0.0 {
        err = res_asc * (200.0 * err / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * res_abs);
    }
    (value, err)
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<SpectralResult> {
    integrate_segments(f, &[a, b], opts)
}

/// Integrates `f` over `[breaks[0], breaks[last]]`, using every breakpoint as
/// an initial segment boundary. Breakpoints must be nondecreasing; empty
/// segments are skipped.
pub fn integrate_segments<F: Fn(f64) -> f64>(
    f: F,
    breaks: &[f64],
    opts: &QuadOptions,
) -> Result<SpectralResult> {
    opts.validate()?;
    if breaks.len() < 2 {
        return Ok(SpectralResult::zero());
    }
    if breaks.iter().any(|x| !x.is_finite()) || breaks.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::invalid(
            "quadrature breakpoints",
            "breakpoints must be finite and nondecreasing",
        ));
    }

    let mut heap = BinaryHeap::new();
    let mut retired: Vec<Segment> = Vec::new();
    let mut seq = 0usize;
    let mut total_value = 0.0;
    let mut total_error = 0.0;
    for w in breaks.windows(2) {
        if w[1] == w[0] {
            continue;
        }
        let (value, error) = kronrod15(&f, w[0], w[1]);
        total_value += value;
        total_error += error;
        heap.push(Segment {
            lo: w[0],
            hi: w[1],
            value,
            error,
            seq,
        });
        seq += 1;
    }

    let mut splits = 0usize;
    loop {
        let tolerance = opts.abs_tol.max(opts.rel_tol * total_value.abs());
        if total_error <= tolerance {
            break;
        }
        let Some(worst) = heap.pop() else {
            // Only unsplittable segments remain.
            let worst = retired
                .iter()
                .max_by(|x, y| x.error.total_cmp(&y.error))
                .copied()
                .expect("nonconverged run has at least one segment");
            return Err(non_convergence(&worst, total_error, tolerance));
        };
        if splits >= opts.max_subdivisions {
            return Err(non_convergence(&worst, total_error, tolerance));
        }
        let mid = 0.5 * (worst.lo + worst.hi);
        let scale = worst.lo.abs().max(worst.hi.abs()).max(f64::MIN_POSITIVE);
        if worst.hi - worst.lo <= 1e3 * f64::EPSILON * scale || mid <= worst.lo || mid >= worst.hi {
            retired.push(worst);
            continue;
        }
        let (v1, e1) = kronrod15(&f, worst.lo, mid);
        let (v2, e2) = kronrod15(&f, mid, worst.hi);
        total_value += v1 + v2 - worst.value;
        total_error += e1 + e2 - worst.error;
        heap.push(Segment {
            lo: worst.lo,
            hi: mid,
            value: v1,
            error: e1,
            seq,
        });
        heap.push(Segment {
            lo: mid,
            hi: worst.hi,
            value: v2,
            error: e2,
            seq: seq + 1,
        });
        seq += 2;
        splits += 1;
    }

    // Re-sum in positional order so rounding does not depend on split history.
    let mut segments: Vec<Segment> = heap.into_vec();
    segments.extend(retired);
    segments.sort_by(|x, y| x.lo.total_cmp(&y.lo));
    let value = segments.iter().map(|s| s.value).sum();
    let abs_error = segments.iter().map(|s| s.error).sum();
    Ok(SpectralResult {
        value,
        abs_error_estimate: abs_error,
    })
}

fn non_convergence(worst: &Segment, total_error: f64, tolerance: f64) -> Error {
    Error::QuadratureNonConvergence {
        operation: "quadrature",
        lo: worst.lo,
        hi: worst.hi,
        error: worst.error,
        total_error,
        tolerance,
    }
}
