use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};
use subsumption_trie::bench::{run_bench, write_csv, BenchSpec, Program};
use subsumption_trie::script::run_script;
use subsumption_trie::Algorithm;

/// Subgoal tries with evaluation counters.
#[derive(Parser)]
#[command(name = "strie", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a table script and print retrieval results.
    Run { script: PathBuf },
    /// Time one synthetic workload and print a CSV row.
    Bench {
        #[arg(long)]
        program: Program,
        /// Number of subgoals.
        #[arg(long)]
        n: usize,
        #[arg(long)]
        alg: Algorithm,
        #[arg(long, default_value_t = 3)]
        repeats: usize,
        /// Print a header line before the row.
        #[arg(long)]
        csv: bool,
    },
}

const SCRIPT_ERROR: u8 = 1;
const USAGE_ERROR: u8 = 2;

fn run(script: &PathBuf) -> anyhow::Result<()> {
    let text =
        fs::read_to_string(script).with_context(|| format!("cannot read {}", script.display()))?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let result = run_script(&text, &mut out);
    out.flush()?;
    result?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { script } => match run(&script) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("strie: {e:#}");
                ExitCode::from(SCRIPT_ERROR)
            }
        },
        Command::Bench {
            program,
            n,
            alg,
            repeats,
            csv,
        } => {
            let spec = BenchSpec {
                program,
                n,
                algorithm: alg,
                repeats,
            };
            let result = match run_bench(&spec) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("strie: {e}");
                    return ExitCode::from(USAGE_ERROR);
                }
            };
            if let Err(e) = write_csv(&[result], io::stdout().lock(), csv) {
                eprintln!("strie: {e}");
                return ExitCode::FAILURE;
            }
            ExitCode::SUCCESS
        }
    }
}
