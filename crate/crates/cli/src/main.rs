use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use qexp_cli::cli::Cli;
use qexp_cli::commands;
use qexp_cli::error::CliError;
use qexp_cli::output::{self, Obj, SCHEMA_VERSION};
use serde_json::Value;

fn emit(cli: &Cli, report: &Value) -> Result<(), CliError> {
    let mut text = output::to_string(report);
    text.push('\n');
    match &cli.output {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = commands::name(&cli.command);
    let start = Instant::now();
    let outcome = commands::run(&cli.command);
    let elapsed = start.elapsed().as_secs_f64();

    let mut report = Obj::new().set("schema_version", SCHEMA_VERSION).set("command", name);
    let code = match outcome {
        Ok((result, passed)) => {
            report.insert("result", result);
            if passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let mut err = Obj::new().set("kind", e.kind()).set("message", e.to_string());
            if let Some(f) = e.field() {
                err.insert("field", f);
            }
            report.insert("error", err);
            e.exit_code()
        }
    };
    if cli.timing {
        report.insert("wall_time_s", output::num(elapsed));
    }
    if let Err(e) = emit(&cli, &report.into()) {
        eprintln!("error: {e}");
        return ExitCode::from(e.exit_code() as u8);
    }
    ExitCode::from(code as u8)
}
