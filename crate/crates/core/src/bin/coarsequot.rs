use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use coarsequot::cli::{emit, failure_summary, run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match run(&cli) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error {e}");
            return ExitCode::from(2);
        }
    };
    match emit(&outcome, cli.out.as_deref()) {
        Ok(Some(text)) => {
            let _ = std::io::stdout().write_all(text.as_bytes());
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error [output] {e}");
            return ExitCode::from(2);
        }
    }
    for line in failure_summary(&outcome) {
        eprintln!("{line}");
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
