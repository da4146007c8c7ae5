use std::io::Write;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use gdos::cli::Cli;
use gdos::CliError;

fn main() -> ExitCode {
    let (cfg, out) = Cli::parse().into_config();
    let start = Instant::now();
    let result = gdos::run(&cfg).and_then(|report| {
        match &out {
            Some(path) => std::fs::write(path, &report.body).map_err(|e| CliError::io(path, e))?,
            None => std::io::stdout().write_all(report.body.as_bytes()).map_err(|e| CliError::io("<stdout>", e))?,
        }
        Ok(report.notes)
    });
    match result {
        Ok(notes) => {
            for n in notes {
                eprintln!("note: {n}");
            }
            eprintln!("wall time: {:.3} s", start.elapsed().as_secs_f64());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error [{}]: {e}", e.module());
            ExitCode::from(e.exit_code())
        }
    }
}
