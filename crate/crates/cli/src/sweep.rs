// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! Parameter sweeps: one scenario per value, run concurrently.

use std::path::Path;

use rayon::prelude::*;

use crate::config::{species_suffix, ScenarioConfig};
use crate::error::{CliError, Result};
use crate::output::{write_atomic, Table};
use crate::scenario::{run, Outcome, RunOptions};

pub const SWEEP_FILE: &str = "sweep.csv";

pub fn point_dir(index: usize) -> String {
    format!("point_{index:04}")
}

/// Runs every sweep point into its own `point_NNNN` directory and writes
/// `sweep.csv` with the swept value and each block's `Γ(∞)`.
pub fn sweep(config: &ScenarioConfig, dir: &Path, opts: &RunOptions) -> Result<Vec<Outcome>> {
    let spec = config
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::config("sweep", "the sweep command needs a [sweep] table"))?;
    let points: Vec<ScenarioConfig> = spec
        .values
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            config
                .with_parameter(&spec.path, v)
                .map_err(|e| CliError::config(format!("sweep.values[{i}]"), e.to_string()))
        })
        .collect::<Result<_>>()?;
    let outcomes: Vec<Outcome> = points
        .par_iter()
        .enumerate()
        .map(|(i, cfg)| run(cfg, &dir.join(point_dir(i)), opts))
        .collect::<Result<_>>()?;

    let mut table = Table::new();
    table.push("index", (0..outcomes.len()).map(|i| i as f64));
    table.push("value", spec.values.iter().copied());
    let blocks = outcomes[0].gamma_inf.len();
    for k in 0..blocks {
        let name = if blocks > 1 {
            format!("gamma_inf_{}", species_suffix(k))
        } else {
            "gamma_inf".to_string()
        };
        table.push(
            name,
            outcomes
                .iter()
                .map(|o| o.gamma_inf.get(k).copied().unwrap_or(f64::NAN)),
        );
    }
    write_atomic(&dir.join(SWEEP_FILE), &table.render())?;
    Ok(outcomes)
}
