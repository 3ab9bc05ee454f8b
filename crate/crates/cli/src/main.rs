mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use serde_json::json;

use commands::{CliError, Outcome};
use config::{resolve, Cli, Command, RunConfig, SEED_ENV};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<Outcome, CliError> {
    match cmd {
        Command::Lemma212(_) => commands::lemma212(cfg),
        Command::ConeSuite(_) => commands::cone_suite(cfg),
        Command::LocalmodelSuite(_) => commands::localmodel_suite(cfg),
        Command::Kostant(_) => commands::kostant(cfg),
        Command::LeafCheck(_) => commands::leaf_check(cfg),
        Command::ExampleSo14(_) => commands::example(cfg),
        Command::All(_) => commands::all(cfg),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let flags = cli.command.common();
    let env_seed = std::env::var(SEED_ENV).ok();
    let cfg = match resolve(flags, env_seed.as_deref()) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
    };
    let outcome = match dispatch(&cli.command, &cfg) {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_USAGE);
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("computation failed: {msg}");
            return ExitCode::from(EXIT_FAIL);
        }
    };

    let report = json!({
        "command": cli.command.name(),
        "config": cfg,
        "results": outcome.results,
        "pass": outcome.pass,
        "version": env!("CARGO_PKG_VERSION"),
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
    if let Some(path) = &cfg.out {
        if let Err(e) = std::fs::write(path, &text) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_USAGE);
        }
    }
    let mut out = std::io::stdout().lock();
    let written = if flags.json {
        out.write_all(text.as_bytes())
    } else {
        outcome.lines.iter().try_for_each(|l| writeln!(out, "{l}"))
    };
    if written.and_then(|_| out.flush()).is_err() {
        return ExitCode::from(EXIT_FAIL);
    }
    if outcome.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAIL)
    }
}
