mod args;
mod run;

use std::fs;
use std::process::ExitCode;

use clap::Parser;
use supersat::ErrorKind;

use args::Cli;

/// Exit statuses: 0 ok, 2 configuration, 3 budget refusal, 4 invariant violation.
#[derive(Debug)]
pub enum CliError {
    Core(supersat::Error),
    Config(String),
    Io(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e.kind() {
                ErrorKind::Input => 2,
                ErrorKind::Budget => 3,
                ErrorKind::Invariant => 4,
            },
            CliError::Config(_) | CliError::Io(_) => 2,
        }
    }
}

impl From<supersat::Error> for CliError {
    fn from(e: supersat::Error) -> Self {
        CliError::Core(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Config(m) => write!(f, "config: {m}"),
            CliError::Io(m) => write!(f, "io: {m}"),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let outcome = run::dispatch(&cli.command)?;
    let config = match &cli.command {
        args::Command::Replay(r) => {
            let text = fs::read_to_string(&r.report).map_err(|e| CliError::Io(e.to_string()))?;
            let report: serde_json::Value =
                serde_json::from_str(&text).map_err(|e| CliError::Config(e.to_string()))?;
            serde_json::from_value(report["config"].clone())
                .map_err(|e| CliError::Config(e.to_string()))?
        }
        other => other.clone(),
    };
    let report = run::render(&config, &outcome);
    match &cli.out {
        Some(path) => {
            fs::write(path, &report)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            println!("{}", outcome.summary);
        }
        None => print!("{report}"),
    }
    if let Some(path) = &cli.csv {
        run::write_csv(path, &outcome.table)?;
    }
    match outcome.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}
