// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

//! Fixed-format CSV and JSON writers.
//!
//! Every real is written as `{:.16e}` (17 significant digits, `.` decimal
//! separator); lines end in LF. Undefined values are empty CSV cells and
//! JSON `null`.

use std::path::Path;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;
use spinbath::C64;

use crate::error::{CliError, Result};

pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// A real serialized with the fixed format; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format_real(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexNum {
    pub re: Num,
    pub im: Num,
}

impl From<C64> for ComplexNum {
    fn from(z: C64) -> Self {
        ComplexNum {
            re: Num(z.re),
            im: Num(z.im),
        }
    }
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::config("<output>", e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Column-oriented CSV table.
#[derive(Debug, Default, Clone, PartialEq)]
pub struct Table {
    header: Vec<String>,
    columns: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, name: impl Into<String>, values: impl IntoIterator<Item = f64>) {
        self.push_opt(name, values.into_iter().map(Some));
    }

    pub fn push_opt(
        &mut self,
        name: impl Into<String>,
        values: impl IntoIterator<Item = Option<f64>>,
    ) {
        self.header.push(name.into());
        self.columns.push(values.into_iter().collect());
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn render(&self) -> String {
        debug_assert!(self.columns.iter().all(|c| c.len() == self.rows()));
        let mut out = self.header.join(",");
        out.push('\n');
        for i in 0..self.rows() {
            let cells: Vec<String> = self
                .columns
                .iter()
                .map(|c| {
                    c[i].filter(|v| v.is_finite())
                        .map(format_real)
                        .unwrap_or_default()
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Writes through a sibling temporary file and a rename, so readers never
/// observe a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = path
        .parent()
        .filter(|p| !p.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let name = path
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let tmp = dir.join(format!(".{name}.tmp"));
    std::fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}
