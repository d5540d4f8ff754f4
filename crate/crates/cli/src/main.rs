use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use grouplab_cli::{
    comparison_table, emit, parse_config, read_rows, run_experiment, CliError, Settings, CATALOG,
};

/// Experiments on group-based block ciphers and shuffles.
#[derive(Parser)]
#[command(name = "grouplab", version)]
struct Cli {
    /// List experiments and their smoke-test commands.
    #[arg(long)]
    list: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
#[allow(clippy::large_enum_variant)]
enum Command {
    /// List experiments and their smoke-test commands.
    List,
    /// Run one experiment and write its result rows.
    Run {
        /// JSON config file; flags given here override it.
        #[arg(long)]
        config: Option<PathBuf>,
        #[command(flatten)]
        settings: Settings,
    },
    /// Print result files (CSV or JSON) as one aligned table.
    Table {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

fn list() {
    let width = CATALOG.iter().map(|e| e.name.len()).max().unwrap_or(0);
    for e in CATALOG {
        println!("{:<width$}  {}", e.name, e.about);
        println!("{:<width$}  smoke: {}", "", e.smoke_command());
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        None | Some(Command::List) => list(),
        Some(Command::Run { config, settings }) => {
            let text = config.map(fs::read_to_string).transpose()?;
            let cfg = parse_config(text.as_deref(), &settings)?;
            let rows = run_experiment(&cfg)?;
            emit(&rows, cfg.format, cfg.output.as_deref())?;
        }
        Some(Command::Table { files }) => {
            let mut rows = vec![];
            for f in &files {
                rows.extend(
                    read_rows(f).map_err(|e| CliError::Table(format!("{}: {e}", f.display())))?,
                );
            }
            print!("{}", comparison_table(&rows));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list && cli.command.is_some() {
        eprintln!("error: --list cannot be combined with a subcommand");
        return ExitCode::from(2);
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
