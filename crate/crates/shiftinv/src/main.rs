use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use shiftinv::commands::{self, GridFlags, RunFlags};
use shiftinv::config::Format;

/// Completeness criteria for dilates of shift-invariant spaces.
#[derive(Debug, Parser)]
#[command(name = "shiftinv", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that an integer matrix is expansive and print d_A and a digit set.
    Dilation {
        /// Row-major matrix, e.g. "[[1,1],[1,-1]]".
        #[arg(long, short)]
        matrix: String,
        /// `json`, or `csv` for plain text lines.
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
    },
    /// Tabulate the spectral function on a grid (d <= 2) as CSV.
    Spectral {
        #[command(flatten)]
        run: RunFlags,
        #[command(flatten)]
        grid: GridFlags,
    },
    /// Run the completeness criteria C2-C8 and P.
    Criteria {
        #[command(flatten)]
        run: RunFlags,
    },
    /// Run the wavelet checks.
    Wavelet {
        #[command(flatten)]
        run: RunFlags,
    },
    /// Inspect the example registry.
    Registry {
        #[command(subcommand)]
        action: RegistryAction,
    },
}

#[derive(Debug, Subcommand)]
enum RegistryAction {
    List,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Dilation { matrix, format } => commands::dilation(matrix, *format),
        Command::Spectral { run, grid } => commands::spectral(run, grid),
        Command::Criteria { run } => commands::criteria(run),
        Command::Wavelet { run } => commands::wavelet(run),
        Command::Registry { action: RegistryAction::List } => Ok(commands::registry_list()),
    };
    match result {
        Ok(outcome) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(outcome.stdout.as_bytes());
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
