// Copyright 2026 The spinbath Authors
// SPDX-License-Identifier: Apache-2.0

use clap::Parser;

fn main() {
    let cli = spinbath_cli::Cli::parse();
    std::process::exit(spinbath_cli::main_with(&cli));
}
