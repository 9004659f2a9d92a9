use std::process::ExitCode;

use bilip_cli::{execute, render, Cli};
use clap::Parser;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let common = cli.command.common();
    let out = match execute(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    if let (Some(path), Some(csv)) = (&common.csv_dump, &out.csv) {
        if let Err(e) = std::fs::write(path, csv) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(2);
        }
    }
    let body = render(&out.document, common.format);
    match &common.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, body) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{body}"),
    }
    ExitCode::SUCCESS
}
