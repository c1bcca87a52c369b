use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use ekrlab_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = cli.config().and_then(|cfg| run(&cfg).map(|r| (cfg.format, r)));
    match outcome {
        Ok((format, report)) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(report.render(format).as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::from(report.status.exit_code())
        }
        Err(e) => {
            eprintln!("ekrlab: error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
