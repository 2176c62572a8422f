mod args;
mod commands;

use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde_json::{json, Value};

use args::{Cli, RunConfig};
use commands::{exit_code, run, status_code};

pub const SCHEMA_VERSION: u32 = 1;

fn metadata() -> Value {
    let secs = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    json!({
        "generated_unix": secs,
        "tool_version": env!("CARGO_PKG_VERSION"),
    })
}

fn emit(cli: &Cli, report: &Value) -> Result<(), String> {
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    match &cli.opts.out {
        Some(path) => std::fs::write(path, text).map_err(|e| format!("out: cannot write {}: {e}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn execute(cli: &Cli, cfg: &RunConfig) -> i32 {
    let (report, code) = match run(cfg) {
        Ok(outcome) => {
            if let Some(path) = &cli.opts.csv {
                if let Err(e) = std::fs::write(path, &outcome.csv) {
                    eprintln!("error: csv: cannot write {}: {e}", path.display());
                    return 2;
                }
            }
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": cfg.command,
                "config": cfg,
                "status": outcome.status,
                "result": outcome.result,
                "metadata": metadata(),
            });
            (report, status_code(outcome.status))
        }
        Err(err) => {
            eprintln!("error: {err}");
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "command": cfg.command,
                "config": cfg,
                "error": err.to_string(),
                "metadata": metadata(),
            });
            (report, exit_code(&err))
        }
    };
    if let Err(e) = emit(cli, &report) {
        eprintln!("error: {e}");
        return 2;
    }
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.config() {
        Ok(cfg) => execute(&cli, &cfg),
        Err(err) => {
            eprintln!("error: {err}");
            2
        }
    };
    ExitCode::from(code as u8)
}
