// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! Scenario files.
//!
//! ```toml
//! beta = 1.0
//!
//! [collective]
//! g = { n = 0, m = 1, norm = 1.0 }
//! f = { n = 0, m = 2, norm = 1.0 }
//!
//! [[species]]
//! count = 8
//! omega = 1.0
//! lambda = 0.01
//! varkappa = 0.01
//! mu = 0.01
//! nu = 0.01
//! g_loc = { n = 0, m = 1 }
//! bloch = [1.0, 0.0, 0.0]
//!
//! [grid]
//! t_max = 100.0
//! num_points = 1024
//! spacing = "linear"
//! ```

use std::path::Path;

use serde::Deserialize;
use spinbath::dynamics::Spacing;
use spinbath::model::Species;
use spinbath::rates::compute_rateset;
use spinbath::{DensityMatrix, EnsembleConfig, FormFactor, QuadOptions, SpinParams};

use crate::error::{CliError, NumericContext, Result};

/// Slack on `|v| ≤ 1` for Bloch vectors written with rounded decimals.
const BLOCH_NORM_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub beta: f64,
    #[serde(default)]
    pub layout: LayoutKind,
    #[serde(default)]
    pub collective: CollectiveConfig,
    pub species: Vec<SpeciesConfig>,
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub validity: ValidityConfig,
    #[serde(default)]
    pub quadrature: QuadratureConfig,
}

/// `species` keeps blocks of identical spins; `spins` expands every block
/// into individual spins.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayoutKind {
    #[default]
    Species,
    Spins,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormFactorConfig {
    #[serde(default)]
    pub n: u32,
    #[serde(default = "one_u32")]
    pub m: u32,
    #[serde(default = "one_f64")]
    pub norm: f64,
}

impl Default for FormFactorConfig {
    fn default() -> Self {
        FormFactorConfig {
            n: 0,
            m: 1,
            norm: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CollectiveConfig {
    #[serde(default)]
    pub g: FormFactorConfig,
    #[serde(default)]
    pub f: FormFactorConfig,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpeciesConfig {
    #[serde(default = "one_usize")]
    pub count: usize,
    pub omega: f64,
    #[serde(default)]
    pub lambda: f64,
    #[serde(default)]
    pub varkappa: f64,
    #[serde(default)]
    pub mu: f64,
    #[serde(default)]
    pub nu: f64,
    #[serde(default)]
    pub g_loc: FormFactorConfig,
    /// Defaults to `g_loc`.
    pub f_loc: Option<FormFactorConfig>,
    pub bloch: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpacingKind {
    #[default]
    Linear,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "default_t_max")]
    pub t_max: f64,
    #[serde(default = "default_num_points")]
    pub num_points: usize,
    #[serde(default)]
    pub spacing: SpacingKind,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            t_max: default_t_max(),
            num_points: default_num_points(),
            spacing: SpacingKind::Linear,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputsConfig {
    #[serde(default = "yes")]
    pub trajectory: bool,
    #[serde(default = "yes")]
    pub rates: bool,
    #[serde(default)]
    pub bloch_coefficients: bool,
    #[serde(default)]
    pub oracle_check: bool,
    #[serde(default = "yes")]
    pub validity: bool,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        OutputsConfig {
            trajectory: true,
            rates: true,
            bloch_coefficients: false,
            oracle_check: false,
            validity: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub path: String,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValidityConfig {
    #[serde(default = "default_threshold")]
    pub threshold: f64,
}

impl Default for ValidityConfig {
    fn default() -> Self {
        ValidityConfig {
            threshold: default_threshold(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureConfig {
    #[serde(default = "default_abs_tol")]
    pub abs_tol: f64,
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default = "default_max_subdivisions")]
    pub max_subdivisions: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        QuadratureConfig {
            abs_tol: default_abs_tol(),
            rel_tol: default_rel_tol(),
            max_subdivisions: default_max_subdivisions(),
        }
    }
}

fn one_u32() -> u32 {
    1
}
fn one_usize() -> usize {
    1
}
fn one_f64() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_t_max() -> f64 {
    100.0
}
fn default_num_points() -> usize {
    1024
}
fn default_threshold() -> f64 {
    spinbath::validity::DEFAULT_THRESHOLD
}
fn default_abs_tol() -> f64 {
    QuadOptions::default().abs_tol
}
fn default_rel_tol() -> f64 {
    QuadOptions::default().rel_tol
}
fn default_max_subdivisions() -> usize {
    QuadOptions::default().max_subdivisions
}

/// Spreadsheet-style block label: `A`, …, `Z`, `AA`, `AB`, ….
pub fn species_suffix(mut k: usize) -> String {
    let mut out = Vec::new();
    loop {
        out.push(b'A' + (k % 26) as u8);
        if k < 26 {
            break;
        }
        k = k / 26 - 1;
    }
    out.reverse();
    String::from_utf8(out).expect("ASCII letters")
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let de = toml::Deserializer::parse(text)
            .map_err(|e| CliError::config("<config>", e.to_string()))?;
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::config(path, e.into_inner().message().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.beta.is_finite() && self.beta > 0.0) {
            return Err(CliError::config(
                "beta",
                format!("must be positive and finite, got {}", self.beta),
            ));
        }
        form_factor(&self.collective.g, "collective.g")?;
        form_factor(&self.collective.f, "collective.f")?;
        if self.species.is_empty() {
            return Err(CliError::config(
                "species",
                "at least one species block is required",
            ));
        }
        for (k, s) in self.species.iter().enumerate() {
            s.validate(&format!("species[{k}]"))?;
        }
        let g = &self.grid;
        if !(g.t_max.is_finite() && g.t_max > 0.0) {
            return Err(CliError::config(
                "grid.t_max",
                format!("must be positive and finite, got {}", g.t_max),
            ));
        }
        if g.num_points < 2 {
            return Err(CliError::config(
                "grid.num_points",
                format!("grid needs at least 2 points, got {}", g.num_points),
            ));
        }
        if let Some(sweep) = &self.sweep {
            SweepTarget::parse(&sweep.path, self.species.len())?;
            if sweep.values.is_empty() {
                return Err(CliError::config(
                    "sweep.values",
                    "sweep needs at least one value",
                ));
            }
            if let Some(i) = sweep.values.iter().position(|v| !v.is_finite()) {
                return Err(CliError::config(
                    format!("sweep.values[{i}]"),
                    "sweep values must be finite",
                ));
            }
        }
        let th = self.validity.threshold;
        if !(th.is_finite() && th > 0.0) {
            return Err(CliError::config(
                "validity.threshold",
                format!("must be positive, got {th}"),
            ));
        }
        self.quad_options()
            .validate()
            .map_err(|e| CliError::config("quadrature", e.to_string()))
    }

    pub fn quad_options(&self) -> QuadOptions {
        QuadOptions {
            abs_tol: self.quadrature.abs_tol,
            rel_tol: self.quadrature.rel_tol,
            max_subdivisions: self.quadrature.max_subdivisions,
        }
    }

    pub fn spacing(&self) -> Spacing {
        match self.grid.spacing {
            SpacingKind::Linear => Spacing::Linear,
            SpacingKind::Log => Spacing::Log,
        }
    }

    pub fn ensemble(&self) -> Result<EnsembleConfig> {
        let g_c = form_factor(&self.collective.g, "collective.g")?;
        let f_c = form_factor(&self.collective.f, "collective.f")?;
        let mut species = Vec::with_capacity(self.species.len());
        for (k, s) in self.species.iter().enumerate() {
            species.push(Species {
                count: s.count,
                spin: s.spin_params(&format!("species[{k}]"))?,
            });
        }
        let ens = match self.layout {
            LayoutKind::Species => EnsembleConfig::from_species(self.beta, g_c, f_c, species),
            LayoutKind::Spins => {
                let spins = species
                    .into_iter()
                    .flat_map(|s| std::iter::repeat_n(s.spin, s.count))
                    .collect();
                EnsembleConfig::from_spins(self.beta, g_c, f_c, spins)
            }
        }
        .map_err(|e| CliError::config("species", e.to_string()))?;
        Ok(ens.with_quad(self.quad_options()))
    }

    /// Copy of the scenario with one swept parameter replaced.
    pub fn with_parameter(&self, path: &str, value: f64) -> Result<Self> {
        let mut out = self.clone();
        out.sweep = None;
        match SweepTarget::parse(path, self.species.len())? {
            SweepTarget::Beta => out.beta = value,
            SweepTarget::TMax => out.grid.t_max = value,
            SweepTarget::Collective { f, field } => {
                let ff = if f {
                    &mut out.collective.f
                } else {
                    &mut out.collective.g
                };
                set_form_factor(ff, field, value, path)?;
            }
            SweepTarget::Species { index, field } => {
                let s = &mut out.species[index];
                match field {
                    SpeciesField::Count => s.count = integer(value, path)? as usize,
                    SpeciesField::Omega => s.omega = value,
                    SpeciesField::Lambda => s.lambda = value,
                    SpeciesField::Varkappa => s.varkappa = value,
                    SpeciesField::Mu => s.mu = value,
                    SpeciesField::Nu => s.nu = value,
                    SpeciesField::GLoc(f) => set_form_factor(&mut s.g_loc, f, value, path)?,
                    SpeciesField::FLoc(f) => {
                        let mut ff = s.f_loc.unwrap_or(s.g_loc);
                        set_form_factor(&mut ff, f, value, path)?;
                        s.f_loc = Some(ff);
                    }
                    SpeciesField::Ratio => {
                        s.varkappa = self.varkappa_for_ratio(index, value, path)?;
                    }
                }
            }
        }
        out.validate()?;
        Ok(out)
    }

    /// `ϰ ≥ 0` giving `r = |a|/b`, from `|a| = ϰ²C_f/2` at fixed `b`.
    fn varkappa_for_ratio(&self, index: usize, r: f64, path: &str) -> Result<f64> {
        if r < 0.0 {
            return Err(CliError::config(
                path,
                format!("ratio must be nonnegative, got {r}"),
            ));
        }
        let ens = self.ensemble()?;
        let spin = &ens.species()[self.block_of_species(index)].spin;
        let rs = compute_rateset(spin, &ens).during("computing b for the ratio sweep")?;
        let coulomb = ens.f_c.bath_coulomb_integral();
        if r == 0.0 {
            return Ok(0.0);
        }
        if !(rs.b > 0.0 && coulomb > 0.0) {
            return Err(CliError::config(
                path,
                "ratio sweep needs b > 0 and a nonvanishing collective form factor",
            ));
        }
        Ok((2.0 * r * rs.b / coulomb).sqrt())
    }

    fn block_of_species(&self, index: usize) -> usize {
        match self.layout {
            LayoutKind::Species => index,
            LayoutKind::Spins => self.species[..index].iter().map(|s| s.count).sum(),
        }
    }
}

impl SpeciesConfig {
    fn validate(&self, path: &str) -> Result<()> {
        if self.count == 0 {
            return Err(CliError::config(
                format!("{path}.count"),
                "must be at least 1",
            ));
        }
        if !(self.omega.is_finite() && self.omega > 0.0) {
            return Err(CliError::config(
                format!("{path}.omega"),
                format!("must be positive and finite, got {}", self.omega),
            ));
        }
        for (name, v) in [
            ("lambda", self.lambda),
            ("varkappa", self.varkappa),
            ("mu", self.mu),
            ("nu", self.nu),
        ] {
            if !v.is_finite() {
                return Err(CliError::config(format!("{path}.{name}"), "must be finite"));
            }
        }
        if self.bloch.iter().any(|x| !x.is_finite()) {
            return Err(CliError::config(
                format!("{path}.bloch"),
                "components must be finite",
            ));
        }
        let norm = self.bloch.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1.0 + BLOCH_NORM_SLACK {
            return Err(CliError::config(
                format!("{path}.bloch"),
                format!("Bloch vector norm {norm} exceeds 1"),
            ));
        }
        self.spin_params(path).map(|_| ())
    }

    fn spin_params(&self, path: &str) -> Result<SpinParams> {
        let g_loc = form_factor(&self.g_loc, &format!("{path}.g_loc"))?;
        let f_loc = match &self.f_loc {
            Some(f) => form_factor(f, &format!("{path}.f_loc"))?,
            None => g_loc,
        };
        let v = self.bloch;
        let scale = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1.0);
        let rho0 = DensityMatrix::from_bloch([v[0] / scale, v[1] / scale, v[2] / scale])
            .map_err(|e| CliError::config(format!("{path}.bloch"), e.to_string()))?;
        let spin = SpinParams {
            omega: self.omega,
            lambda: self.lambda,
            varkappa: self.varkappa,
            mu: self.mu,
            nu: self.nu,
            g_loc,
            f_loc,
            rho0,
        };
        spin.validate()
            .map_err(|e| CliError::config(path.to_string(), e.to_string()))?;
        Ok(spin)
    }
}

fn form_factor(f: &FormFactorConfig, path: &str) -> Result<FormFactor> {
    FormFactor::new(f.n, f.m, f.norm).map_err(|e| CliError::config(path.to_string(), e.to_string()))
}

fn integer(value: f64, path: &str) -> Result<u32> {
    if value.fract() != 0.0 || !(0.0..=u32::MAX as f64).contains(&value) {
        return Err(CliError::config(
            path,
            format!("expected a nonnegative integer, got {value}"),
        ));
    }
    Ok(value as u32)
}

fn set_form_factor(
    ff: &mut FormFactorConfig,
    field: FormFactorField,
    value: f64,
    path: &str,
) -> Result<()> {
    match field {
        FormFactorField::N => ff.n = integer(value, path)?,
        FormFactorField::M => ff.m = integer(value, path)?,
        FormFactorField::Norm => ff.norm = value,
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum FormFactorField {
    N,
    M,
    Norm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SpeciesField {
    Count,
    Omega,
    Lambda,
    Varkappa,
    Mu,
    Nu,
    GLoc(FormFactorField),
    FLoc(FormFactorField),
    /// `r = |a|/b`, realised through `ϰ`.
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum SweepTarget {
    Beta,
    TMax,
    Collective { f: bool, field: FormFactorField },
    Species { index: usize, field: SpeciesField },
}

impl SweepTarget {
    /// Paths are `beta`, `grid.t_max`, `collective.{g,f}.{n,m,norm}` and
    /// `species.<k>.<field>` with `k` a 0-based index or block letter.
    fn parse(path: &str, n_species: usize) -> Result<Self> {
        let bad = || CliError::config("sweep.path", format!("unknown parameter path `{path}`"));
        let parts: Vec<&str> = path.split('.').collect();
        let ff = |s: &str| match s {
            "n" => Some(FormFactorField::N),
            "m" => Some(FormFactorField::M),
            "norm" => Some(FormFactorField::Norm),
            _ => None,
        };
        Ok(match parts.as_slice() {
            ["beta"] => SweepTarget::Beta,
            ["grid", "t_max"] => SweepTarget::TMax,
            ["collective", which @ ("g" | "f"), field] => SweepTarget::Collective {
                f: *which == "f",
                field: ff(field).ok_or_else(bad)?,
            },
            ["species", k, rest @ ..] => {
                let index = k
                    .parse::<usize>()
                    .ok()
                    .or_else(|| (0..n_species).find(|&i| species_suffix(i) == *k))
                    .ok_or_else(bad)?;
                if index >= n_species {
                    return Err(CliError::config(
                        "sweep.path",
                        format!("species index {index} out of range for {n_species} blocks"),
                    ));
                }
                let field = match rest {
                    ["count"] => SpeciesField::Count,
                    ["omega"] => SpeciesField::Omega,
                    ["lambda"] => SpeciesField::Lambda,
                    ["varkappa"] => SpeciesField::Varkappa,
                    ["mu"] => SpeciesField::Mu,
                    ["nu"] => SpeciesField::Nu,
                    ["r"] => SpeciesField::Ratio,
                    ["g_loc", f] => SpeciesField::GLoc(ff(f).ok_or_else(bad)?),
                    ["f_loc", f] => SpeciesField::FLoc(ff(f).ok_or_else(bad)?),
                    _ => return Err(bad()),
                };
                SweepTarget::Species { index, field }
            }
            _ => return Err(bad()),
        })
    }
}
