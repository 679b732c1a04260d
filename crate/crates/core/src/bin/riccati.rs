// Copyright 2026 riccati-qs Contributors
// SPDX-License-Identifier: Apache-2.0

fn main() {
    let code = riccati_core::cli::run(std::env::args_os(), &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
