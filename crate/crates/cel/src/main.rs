// SPDX-License-Identifier: Apache-2.0

use std::process::ExitCode;

fn main() -> ExitCode {
    cel::cli::main_with(std::env::args_os())
}
