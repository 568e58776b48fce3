//! Command-line front end for `cslab-core`: subcommands emitting JSON and
//! CSV, and the acceptance-suite runner behind `cslab verify`.

pub mod commands;
pub mod config;
pub mod report;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{BlocksArgs, DetzetaArgs, FlowArgs, Outcome, SpecArgs, VerifyArgs};
use config::apply_config;
use report::CliError;

#[derive(Parser, Debug)]
#[command(name = "cslab", version, about = "Genus-one gauge theory laboratory")]
pub struct Cli {
    /// JSON object whose keys override the subcommand flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Dimension of Weyl-invariant level-k theta functions.
    Blocks(BlocksArgs),
    /// Yang–Mills gradient flow from a seeded random connection.
    Flow(FlowArgs),
    /// Kernel and low spectrum of a twisted Dolbeault operator.
    Spec(SpecArgs),
    /// ζ-regularized determinant on the Cartan slice.
    Detzeta(DetzetaArgs),
    /// Run the acceptance suite.
    Verify(VerifyArgs),
}

fn dispatch(cli: &Cli) -> Result<Outcome, CliError> {
    let cfg = cli.config.as_deref();
    match &cli.command {
        Command::Blocks(a) => commands::blocks(&apply_config(a.clone(), cfg)?),
        Command::Flow(a) => commands::flow(&apply_config(a.clone(), cfg)?),
        Command::Spec(a) => commands::spec(&apply_config(a.clone(), cfg)?),
        Command::Detzeta(a) => commands::detzeta(&apply_config(a.clone(), cfg)?),
        Command::Verify(a) => commands::verify(&apply_config(a.clone(), cfg)?),
    }
}

/// Parses `argv`, runs the subcommand and writes its JSON to `out` (or
/// the `--out` file). Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(&cli) {
        Ok(o) => {
            let text = serde_json::to_string_pretty(&o.json).expect("JSON values serialize");
            let written = match &cli.out {
                Some(p) => {
                    std::fs::write(p, text + "\n").map_err(|e| format!("{}: {e}", p.display()))
                }
                None => writeln!(out, "{text}").map_err(|e| e.to_string()),
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return 1;
            }
            o.code
        }
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
