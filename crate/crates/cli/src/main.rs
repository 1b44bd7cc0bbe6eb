use std::process::ExitCode;

use anisoheat_cli::{run, thread_cap, Cli, THREADS_VAR, USAGE_EXIT};
use clap::Parser;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cap = match thread_cap(std::env::var(THREADS_VAR).ok().as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(USAGE_EXIT);
        }
    };
    if let Some(n) = cap {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start the thread pool: {e}");
            return ExitCode::from(USAGE_EXIT);
        }
    }
    match run(cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_EXIT)
        }
    }
}
