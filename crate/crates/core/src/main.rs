use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    ctxprob::cli::main_with(ctxprob::cli::Cli::parse())
}
