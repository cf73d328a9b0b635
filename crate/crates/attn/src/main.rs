use std::process::ExitCode;

use attn::commands::{emit, execute, INPUT_ERROR};
use attn::RunConfig;
use clap::Parser;

fn main() -> ExitCode {
    let cfg = RunConfig::parse();
    let out = match execute(&cfg) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(INPUT_ERROR);
        }
    };
    if let Err(e) = emit(cfg.out.as_deref(), &out.body) {
        eprintln!("error: {e}");
        return ExitCode::from(INPUT_ERROR);
    }
    ExitCode::from(out.status.code())
}
