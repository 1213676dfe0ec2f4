use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use varalg::commands::{run, Cli};

fn emit(text: &str, out: Option<&std::path::PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which would read as "infeasible".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let out = cli.command.out();
    let result = run(&cli.command);
    let text = match &result {
        Ok(text) => Some(text.as_str()),
        Err(e) => e.output(),
    };
    if let Some(text) = text {
        if let Err(e) = emit(text, out) {
            eprintln!("varalg: cannot write output: {e}");
            return ExitCode::from(1);
        }
    }
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("varalg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
