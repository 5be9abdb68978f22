// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! Evaluation of one scenario and its output files.

use std::path::{Path, PathBuf};

use serde::Serialize;
use spinbath::dynamics::{
    bloch_coefficients, bloch_limits, magnetization_trajectory, time_grid, Trajectory,
};
use spinbath::oracle::{compare_resonance_vs_exact, OracleConfig, OracleReport};
use spinbath::rates::{
    asymptotic_dephasing_multispecies, ensemble_dephasing_summary, species_ratesets,
    DephasingSummary, RateSet,
};
use spinbath::validity::{check_validity, Condition, ValidityReport};
use spinbath::EnsembleConfig;

use crate::config::{species_suffix, ScenarioConfig};
use crate::error::{CliError, NumericContext, Result};
use crate::output::{to_json, write_atomic, ComplexNum, Num, Table};

pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const RATES_FILE: &str = "rates.json";
pub const BLOCH_FILE: &str = "bloch.csv";
pub const ORACLE_FILE: &str = "oracle.csv";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    /// Refuse to run when a validity condition fails.
    pub strict: bool,
    /// Pass bound on the oracle deviation for `verify`.
    pub tolerance: f64,
    /// Overrides `grid.num_points`.
    pub grid_points: Option<usize>,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            strict: false,
            tolerance: 1e-8,
            grid_points: None,
        }
    }
}

/// A scenario with its rates, grid and validity report evaluated.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub config: ScenarioConfig,
    pub ensemble: EnsembleConfig,
    pub rates: Vec<RateSet>,
    pub times: Vec<f64>,
    pub validity: ValidityReport,
}

impl Prepared {
    pub fn new(config: &ScenarioConfig, opts: &RunOptions) -> Result<Self> {
        let mut config = config.clone();
        if let Some(n) = opts.grid_points {
            config.grid.num_points = n;
            config.validate()?;
        }
        let ensemble = config.ensemble()?;
        let validity = check_validity(&ensemble, config.validity.threshold);
        if opts.strict {
            let failed = failed_conditions(&validity);
            if !failed.is_empty() {
                return Err(CliError::Validity(failed.join("; ")));
            }
        }
        let rates = species_ratesets(&ensemble).during("computing rates")?;
        let times = time_grid(config.grid.t_max, config.grid.num_points, config.spacing())
            .during("building the time grid")?;
        Ok(Prepared {
            config,
            ensemble,
            rates,
            times,
            validity,
        })
    }

    fn multi(&self) -> bool {
        self.rates.len() > 1
    }

    fn suffix(&self, k: usize) -> String {
        if self.multi() {
            format!("_{}", species_suffix(k))
        } else {
            String::new()
        }
    }
}

/// Human-readable list of failed conditions, empty when all pass.
pub fn failed_conditions(v: &ValidityReport) -> Vec<String> {
    let mut out = Vec::new();
    let mut check = |name: &str, c: &Condition| {
        if !c.pass {
            out.push(format!(
                "{name} margin {:.3e} ≥ threshold {:.3e}",
                c.margin, v.threshold
            ));
        }
    };
    check("N²λ²/Δ", &v.condition_2_11);
    check("α_c²N/ω_min", &v.condition_sec5_collective);
    check("α_ℓ/ω_min", &v.condition_sec5_local);
    if !v.assumption_a_ok {
        out.push("two spins share a frequency outside a species block".to_string());
    }
    out
}

#[derive(Debug, Serialize)]
struct SpeciesRates {
    label: String,
    count: usize,
    omega: Num,
    b: Num,
    c: Num,
    #[serde(rename = "Z_beta")]
    z_beta: Num,
    a: Num,
    #[serde(rename = "X")]
    x: Num,
    #[serde(rename = "X_abs_error")]
    x_abs_error: Num,
    #[serde(rename = "Y")]
    y: Num,
    z_plus: ComplexNum,
    z_minus: ComplexNum,
    alpha_plus: Option<ComplexNum>,
    alpha_minus: Option<ComplexNum>,
    zeta: Option<ComplexNum>,
    kappa: ComplexNum,
    gamma_relax: Num,
    gamma_cons: Num,
    r: Option<Num>,
    #[serde(rename = "Gamma_inf")]
    gamma_inf: Num,
    #[serde(rename = "B_inf")]
    b_inf: Num,
    gamma_deph_inf: Num,
}

#[derive(Debug, Serialize)]
struct DephasingJson {
    gamma: Num,
    c_prime: Num,
    gamma_prime: Num,
    gamma_deph: Vec<Num>,
}

impl From<&DephasingSummary> for DephasingJson {
    fn from(d: &DephasingSummary) -> Self {
        DephasingJson {
            gamma: Num(d.gamma),
            c_prime: Num(d.c_prime),
            gamma_prime: Num(d.gamma_prime),
            gamma_deph: d.gamma_deph.iter().copied().map(Num).collect(),
        }
    }
}

#[derive(Debug, Serialize)]
struct ConditionJson {
    margin: Num,
    pass: bool,
}

impl From<Condition> for ConditionJson {
    fn from(c: Condition) -> Self {
        ConditionJson {
            margin: Num(c.margin),
            pass: c.pass,
        }
    }
}

#[derive(Debug, Serialize)]
struct ValidityJson {
    alpha_max: Num,
    #[serde(rename = "Delta")]
    delta: Num,
    delta_exact: bool,
    threshold: Num,
    condition_2_11: ConditionJson,
    condition_2_11_alpha: ConditionJson,
    condition_sec5_collective: ConditionJson,
    condition_sec5_local: ConditionJson,
    assumption_a_ok: bool,
}

impl From<&ValidityReport> for ValidityJson {
    fn from(v: &ValidityReport) -> Self {
        ValidityJson {
            alpha_max: Num(v.alpha_max),
            delta: Num(v.delta),
            delta_exact: v.delta_exact,
            threshold: Num(v.threshold),
            condition_2_11: v.condition_2_11.into(),
            condition_2_11_alpha: v.condition_2_11_alpha.into(),
            condition_sec5_collective: v.condition_sec5_collective.into(),
            condition_sec5_local: v.condition_sec5_local.into(),
            assumption_a_ok: v.assumption_a_ok,
        }
    }
}

#[derive(Debug, Serialize)]
struct RatesReport {
    beta: Num,
    #[serde(rename = "N")]
    n: usize,
    species: Vec<SpeciesRates>,
    dephasing: DephasingJson,
    #[serde(skip_serializing_if = "Option::is_none")]
    validity: Option<ValidityJson>,
}

/// Per-block `(Γ(∞), B(∞))`.
pub fn limits(p: &Prepared) -> Result<Vec<(f64, f64)>> {
    bloch_limits(&p.ensemble, &p.rates).during("computing Bloch limits")
}

pub fn rates_json(p: &Prepared) -> Result<String> {
    let dephasing = ensemble_dephasing_summary(&p.ensemble, &p.rates)
        .during("computing the dephasing summary")?;
    let lim = limits(p)?;
    let blocks: Vec<(usize, RateSet)> = p
        .ensemble
        .species()
        .iter()
        .zip(&p.rates)
        .map(|(s, rs)| (s.count, *rs))
        .collect();
    let deph_inf =
        asymptotic_dephasing_multispecies(&blocks).during("computing asymptotic dephasing")?;
    let species = p
        .ensemble
        .species()
        .iter()
        .zip(&p.rates)
        .enumerate()
        .map(|(k, (s, rs))| SpeciesRates {
            label: species_suffix(k),
            count: s.count,
            omega: Num(rs.omega),
            b: Num(rs.b),
            c: Num(rs.c),
            z_beta: Num(rs.z_beta),
            a: Num(rs.a),
            x: Num(rs.x.value),
            x_abs_error: Num(rs.x.abs_error_estimate),
            y: Num(rs.y),
            z_plus: rs.z_plus.into(),
            z_minus: rs.z_minus.into(),
            alpha_plus: rs.alpha_plus.map(Into::into),
            alpha_minus: rs.alpha_minus.map(Into::into),
            zeta: rs.zeta.map(Into::into),
            kappa: rs.kappa(s.spin.rho0.p11()).into(),
            gamma_relax: Num(rs.gamma_relax),
            gamma_cons: Num(rs.gamma_cons),
            r: rs.r.map(Num),
            gamma_inf: Num(lim[k].0),
            b_inf: Num(lim[k].1),
            gamma_deph_inf: Num(deph_inf[k]),
        })
        .collect();
    to_json(&RatesReport {
        beta: Num(p.ensemble.beta),
        n: p.ensemble.total_spins(),
        species,
        dephasing: (&dephasing).into(),
        validity: p.config.outputs.validity.then(|| (&p.validity).into()),
    })
}

fn push_trajectory(table: &mut Table, tr: &Trajectory, suffix: &str) {
    table.push(format!("sz_total{suffix}"), tr.sz.iter().copied());
    table.push(format!("sminus_re{suffix}"), tr.sminus.iter().map(|z| z.re));
    table.push(format!("sminus_im{suffix}"), tr.sminus.iter().map(|z| z.im));
    table.push_opt(format!("gamma_t{suffix}"), tr.gamma_t.iter().copied());
    table.push_opt(format!("b_t{suffix}"), tr.b_t.iter().copied());
    if let Some(lc) = &tr.log_c_magnitude {
        table.push(format!("log_abs_c{suffix}"), lc.iter().copied());
    }
}

/// Total columns unsuffixed, then one suffixed group per block when there
/// are several.
pub fn trajectory_table(p: &Prepared) -> Result<Table> {
    let tr = magnetization_trajectory(&p.ensemble, &p.rates, &p.times)
        .during("evolving the magnetization")?;
    let mut table = Table::new();
    table.push("t", p.times.iter().copied());
    push_trajectory(&mut table, &tr.total, "");
    if p.multi() {
        for (k, s) in tr.species.iter().enumerate() {
            push_trajectory(&mut table, s, &p.suffix(k));
        }
    }
    Ok(table)
}

pub fn bloch_table(p: &Prepared) -> Result<Table> {
    let coeffs = bloch_coefficients(&p.ensemble, &p.rates, &p.times)
        .during("computing Bloch coefficients")?;
    let mut table = Table::new();
    table.push("t", p.times.iter().copied());
    for (k, c) in coeffs.iter().enumerate() {
        let suffix = p.suffix(k);
        table.push_opt(format!("gamma_t{suffix}"), c.gamma.iter().copied());
        table.push_opt(format!("b_t{suffix}"), c.b.iter().copied());
    }
    Ok(table)
}

/// Exactly solvable counterpart of the scenario for its first spin: no
/// exchange couplings, one frequency and coupling set, and a common
/// population for all other spins.
pub fn oracle_config(p: &Prepared) -> Result<OracleConfig> {
    let spins = p.ensemble.expanded_spins();
    let first = spins[0];
    for (j, s) in spins.iter().enumerate() {
        let path = || format!("spin {j}");
        if s.lambda != 0.0 || s.mu != 0.0 {
            return Err(CliError::config(
                path(),
                "the exact oracle needs lambda = mu = 0",
            ));
        }
        if s.omega != first.omega
            || s.varkappa != first.varkappa
            || s.nu != first.nu
            || s.f_loc != first.f_loc
        {
            return Err(CliError::config(
                path(),
                "the exact oracle needs a common omega, varkappa, nu and f_loc",
            ));
        }
    }
    let p11 = spins.get(1).map_or(0.5, |s| s.rho0.p11());
    if let Some(j) = spins.iter().skip(1).position(|s| s.rho0.p11() != p11) {
        return Err(CliError::config(
            format!("spin {}", j + 1),
            "the exact oracle needs a common population for all spins after the first",
        ));
    }
    let cfg = OracleConfig {
        beta: p.ensemble.beta,
        n: spins.len(),
        p: p11,
        varkappa_c: first.varkappa,
        nu_l: first.nu,
        f_c: p.ensemble.f_c,
        f_l: first.f_loc,
        rho0_j: first.rho0,
        omega: first.omega,
    };
    cfg.validate()
        .map_err(|e| CliError::config("oracle", e.to_string()))?;
    Ok(cfg)
}

pub fn oracle_report(p: &Prepared) -> Result<OracleReport> {
    let cfg = oracle_config(p)?;
    compare_resonance_vs_exact(&cfg, &p.times, &p.ensemble.quad)
        .during("comparing against the exact model")
}

pub fn oracle_table(report: &OracleReport) -> Table {
    let rows = &report.rows;
    let mut table = Table::new();
    table.push("t", rows.iter().map(|r| r.t));
    table.push("exact_re", rows.iter().map(|r| r.exact.re));
    table.push("exact_im", rows.iter().map(|r| r.exact.im));
    table.push("resonance_re", rows.iter().map(|r| r.resonance.re));
    table.push("resonance_im", rows.iter().map(|r| r.resonance.im));
    table.push("deviation", rows.iter().map(|r| r.substituted_deviation()));
    table.push("substituted_re", rows.iter().map(|r| r.substituted.re));
    table.push("substituted_im", rows.iter().map(|r| r.substituted.im));
    table.push("exact_deviation", rows.iter().map(|r| r.exact_deviation()));
    table
}

/// What a command wrote and found.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub oracle_deviation: Option<f64>,
    /// Per-block `Γ(∞)`.
    pub gamma_inf: Vec<f64>,
}

fn write(out: &mut Outcome, dir: &Path, name: &str, contents: &str) -> Result<()> {
    let path = dir.join(name);
    write_atomic(&path, contents)?;
    out.files.push(path);
    Ok(())
}

fn start(p: &Prepared) -> Result<Outcome> {
    let mut out = Outcome {
        gamma_inf: limits(p)?.into_iter().map(|(g, _)| g).collect(),
        ..Outcome::default()
    };
    if p.config.outputs.validity {
        out.warnings = failed_conditions(&p.validity);
    }
    Ok(out)
}

/// `run`: every output selected in the scenario.
pub fn run(config: &ScenarioConfig, dir: &Path, opts: &RunOptions) -> Result<Outcome> {
    let p = Prepared::new(config, opts)?;
    let mut out = start(&p)?;
    let sel = p.config.outputs;
    if sel.trajectory {
        write(
            &mut out,
            dir,
            TRAJECTORY_FILE,
            &trajectory_table(&p)?.render(),
        )?;
    }
    if sel.rates {
        write(&mut out, dir, RATES_FILE, &rates_json(&p)?)?;
    }
    if sel.bloch_coefficients {
        write(&mut out, dir, BLOCH_FILE, &bloch_table(&p)?.render())?;
    }
    if sel.oracle_check {
        let report = oracle_report(&p)?;
        out.oracle_deviation = Some(report.max_substituted_deviation);
        write(&mut out, dir, ORACLE_FILE, &oracle_table(&report).render())?;
    }
    Ok(out)
}

/// `rates`: the rates report only.
pub fn rates(config: &ScenarioConfig, dir: &Path, opts: &RunOptions) -> Result<Outcome> {
    let p = Prepared::new(config, opts)?;
    let mut out = start(&p)?;
    write(&mut out, dir, RATES_FILE, &rates_json(&p)?)?;
    Ok(out)
}

/// `verify`: the oracle comparison, failing above `opts.tolerance`.
pub fn verify(config: &ScenarioConfig, dir: &Path, opts: &RunOptions) -> Result<Outcome> {
    let p = Prepared::new(config, opts)?;
    let mut out = start(&p)?;
    let report = oracle_report(&p)?;
    write(&mut out, dir, ORACLE_FILE, &oracle_table(&report).render())?;
    let dev = report.max_substituted_deviation;
    out.oracle_deviation = Some(dev);
    if dev.is_nan() || dev >= opts.tolerance {
        return Err(CliError::Verification(format!(
            "max deviation {dev:.3e} of the substituted exact solution exceeds tolerance {:.3e}",
            opts.tolerance
        )));
    }
    Ok(out)
}
