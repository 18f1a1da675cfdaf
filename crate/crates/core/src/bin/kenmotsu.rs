use std::io::{IsTerminal, Write};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use kenmotsu::workbench::commands::{self, Model, Outcome, RunError, SolitonAction};
use kenmotsu::workbench::fixtures::{fixture_manifest, FIXTURES};
use kenmotsu::workbench::oracle::DEFAULT_TOLERANCE;

/// Symbolic checks for almost contact metric manifolds and eta-Ricci solitons.
///
/// A manifest argument is a file path or `fixture:<name>`.
#[derive(Parser)]
#[command(name = "kenmotsu", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args)]
struct Common {
    manifest: String,
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Almost contact, normality and Kenmotsu checks.
    CheckStructure(Common),
    /// Christoffel symbols, curvature components and derived constants.
    Curvature(Common),
    /// Solve or verify an eta-Ricci soliton.
    Soliton {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        action: ActionFlags,
    },
    /// Compare symbolic curvature with finite differences.
    Oracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_TOLERANCE, allow_negative_numbers = true)]
        tol: f64,
    },
    /// Built-in fixtures.
    Fixtures {
        #[command(subcommand)]
        action: FixtureAction,
    },
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct ActionFlags {
    /// Solve for constant lambda and mu.
    #[arg(long)]
    solve: bool,
    /// Verify the given lambda and mu.
    #[arg(long)]
    verify: bool,
}

#[derive(Subcommand)]
enum FixtureAction {
    List,
    Dump { name: String },
}

fn color_enabled() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stdout().is_terminal()
}

fn emit(outcome: Result<Outcome, RunError>, format: Format, started: Instant) -> ExitCode {
    match outcome {
        Ok(mut o) => {
            o.report.timing_ms = started.elapsed().as_millis() as u64;
            let text = match format {
                Format::Json => o.report.to_json() + "\n",
                Format::Text => o.report.to_text(color_enabled()),
            };
            // a closed pipe is not an error for the run itself
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            ExitCode::from(o.exit_code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let started = Instant::now();
    let run = |common: &Common, f: &dyn Fn(&Model) -> Result<Outcome, RunError>| {
        emit(Model::load(&common.manifest).and_then(|m| f(&m)), common.format, started)
    };
    match cli.command {
        Command::CheckStructure(c) => run(&c, &commands::check_structure),
        Command::Curvature(c) => run(&c, &commands::curvature),
        Command::Soliton { common, action } => {
            let action = if action.solve { SolitonAction::Solve } else { SolitonAction::Verify };
            run(&common, &|m| commands::soliton(m, action))
        }
        Command::Oracle { common, points, tol } => run(&common, &|m| commands::oracle(m, points, tol)),
        Command::Fixtures { action: FixtureAction::List } => {
            let _ = std::io::stdout().lock().write_all((FIXTURES.join("\n") + "\n").as_bytes());
            ExitCode::SUCCESS
        }
        Command::Fixtures { action: FixtureAction::Dump { name } } => match fixture_manifest(&name) {
            Some(text) => {
                let _ = std::io::stdout().lock().write_all(text.as_bytes());
                ExitCode::SUCCESS
            }
            None => {
                eprintln!("error: unknown fixture `{name}`; try `kenmotsu fixtures list`");
                ExitCode::from(2)
            }
        },
    }
}
