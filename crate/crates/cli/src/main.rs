use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use gwl4_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    // GW_THREADS caps the worker pool; results do not depend on it.
    if let Some(n) = std::env::var("GW_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if n > 0 {
            rayon::ThreadPoolBuilder::new().num_threads(n).build_global().ok();
        }
    }
    match run(&cli.command) {
        Ok(report) => {
            let mut out = std::io::stdout().lock();
            if out.write_all(report.render(cli.format()).as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("gwl4: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
