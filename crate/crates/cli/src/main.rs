use std::process::ExitCode;

use clap::Parser;
use feedback_cli::{commands, emit, error_report, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let cmd = &cli.command;
    if let Some(threads) = cmd.common().threads {
        if threads == 0 {
            eprintln!("usage: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("cannot start worker threads: {e}");
            return ExitCode::from(4);
        }
    }
    match commands::run(cmd).and_then(|rec| emit(cmd, &rec)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            eprintln!("{}", error_report(cmd.name(), &e));
            ExitCode::from(e.exit_code())
        }
    }
}
