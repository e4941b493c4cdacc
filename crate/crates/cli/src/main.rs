use std::process::ExitCode;

use clap::Parser;

use autorbit_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let obj = serde_json::json!({ "error": { "kind": "UsageError", "message": e.to_string().trim() } });
            eprintln!("{obj}");
            return ExitCode::from(2);
        }
    };
    match run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.exit_code()),
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": e }));
            ExitCode::from(1)
        }
    }
}
