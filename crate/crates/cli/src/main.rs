use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use epsilon_cli::{cmd_check, cmd_explain, cmd_run, CliConfig, Format, EXIT_INTERNAL};

#[derive(Parser)]
#[command(name = "epsilon", version, about = "Epsilon-substitution H-process for ID1 problems")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Structured,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run the H-process on a problem file.
    Run {
        problem: PathBuf,
        #[arg(long)]
        max_steps: Option<u64>,
        /// Check correctness and history invariants after every step.
        #[arg(long)]
        check: bool,
        /// Write the structured trace to this file.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        /// Print the report for step K instead of running.
        #[arg(long, value_name = "K")]
        explain: Option<u64>,
    },
    /// Replay a structured trace against its problem.
    Check { trace: PathBuf, problem: PathBuf },
    /// Describe the step taken from the K-th substitution.
    Explain { problem: PathBuf, step: u64 },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match cli.cmd {
        Cmd::Run { problem, max_steps, check, trace, format, explain } => match explain {
            Some(k) => cmd_explain(&problem, k, &mut out),
            None => {
                let format = match format {
                    FormatArg::Text => Format::Text,
                    FormatArg::Structured => Format::Structured,
                };
                let cfg = CliConfig { max_steps, check, trace, format };
                cmd_run(&problem, &cfg, &mut out)
            }
        },
        Cmd::Check { trace, problem } => cmd_check(&trace, &problem, &mut out),
        Cmd::Explain { problem, step } => cmd_explain(&problem, step, &mut out),
    };
    let code = code.unwrap_or_else(|e| {
        eprintln!("error: {}", e);
        EXIT_INTERNAL
    });
    let _ = out.flush();
    ExitCode::from(code as u8)
}
