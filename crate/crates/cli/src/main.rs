mod commands;
mod config;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use config::{Cli, Command};

/// Failure modes, each with a stable `kind` for the JSON error line.
#[derive(Debug)]
pub enum CliError {
    Core(stabnoise::Error),
    Io(String),
    Json(String),
    Usage(String),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.kind(),
            CliError::Io(_) => "io",
            CliError::Json(_) => "json",
            CliError::Usage(_) => "usage",
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Core(e) => e.to_string(),
            CliError::Io(m) | CliError::Json(m) | CliError::Usage(m) => m.clone(),
        }
    }
}

impl From<stabnoise::Error> for CliError {
    fn from(e: stabnoise::Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn report_error(e: &CliError) {
    let line = serde_json::json!({ "error": { "kind": e.kind(), "message": e.message() } });
    eprintln!("{line}");
}

/// Writes `text` to `out`, or standard output.
pub fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn configure_threads() -> CliResult<()> {
    let Ok(raw) = std::env::var("STABNOISE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("STABNOISE_THREADS must be a positive integer, got {raw:?}")))?;
    if threads == 0 {
        return Err(CliError::Usage("STABNOISE_THREADS must be positive".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(threads).build_global().map_err(|e| CliError::Usage(e.to_string()))
}

fn load_config(path: &Path) -> CliResult<Command> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn run(cmd: Command) -> CliResult<bool> {
    match cmd {
        Command::Gen(a) => commands::gen(&a),
        Command::Reduce(a) => commands::reduce(&a),
        Command::Solve(a) => commands::solve(&a),
        Command::Verify(a) => commands::verify(&a),
        Command::Mix(a) => commands::mix(&a),
        Command::Count(a) => commands::count(&a),
        Command::Run(a) => match load_config(&a.config)? {
            Command::Run(_) => Err(CliError::Usage("a config cannot run another config".into())),
            inner => run(inner),
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report_error(&CliError::Usage(e.to_string().trim().to_string()));
            return ExitCode::from(2);
        }
    };
    let outcome = configure_threads().and_then(|()| run(cli.command));
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            report_error(&e);
            ExitCode::from(2)
        }
    }
}
