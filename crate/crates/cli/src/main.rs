use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use frobsplit::order::MonomialOrder;
use frobsplit::paper::paper_examples;
use frobsplit::runner::{run, Format, RunConfig, DEFAULT_SEED};
use frobsplit::scenario::parse_scenario;

#[derive(Parser)]
#[command(name = "frobsplit", version, about = "Frobenius splittings and compatibly split subvarieties over F_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Grevlex,
    Lex,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Tsv,
}

#[derive(Subcommand)]
enum Command {
    /// Run the tasks of a scenario file.
    Run {
        file: PathBuf,
        /// Replace the declared prime.
        #[arg(long)]
        prime: Option<u64>,
        /// Term order used to print ideals.
        #[arg(long, value_enum, default_value = "grevlex")]
        order: OrderArg,
        /// Degree bound for extension solving.
        #[arg(long = "max-degree")]
        max_degree: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
        /// Run independent tasks concurrently.
        #[arg(long)]
        parallel: bool,
    },
    /// Run the bundled reproductions and compare against golden values.
    PaperExamples {
        #[arg(long, value_enum, default_value = "text")]
        format: FormatArg,
    },
}

fn format_of(f: FormatArg) -> Format {
    match f {
        FormatArg::Text => Format::Text,
        FormatArg::Tsv => Format::Tsv,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { file, prime, order, max_degree, seed, format, parallel } => {
            let text = match std::fs::read_to_string(&file) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", file.display());
                    return ExitCode::from(3);
                }
            };
            let sc = match parse_scenario(&text, prime) {
                Ok(sc) => sc,
                Err(e) => {
                    eprintln!("{}: {e}", file.display());
                    return ExitCode::from(3);
                }
            };
            let cfg = RunConfig {
                order: match order {
                    OrderArg::Grevlex => MonomialOrder::GrevLex,
                    OrderArg::Lex => MonomialOrder::Lex,
                },
                max_degree,
                seed,
                parallel,
                ..RunConfig::default()
            };
            let title = file.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let report = run(&sc, &title, &cfg);
            print!("{}", report.render(format_of(format)));
            ExitCode::from(report.exit_code() as u8)
        }
        Command::PaperExamples { format } => {
            let report = paper_examples();
            print!("{}", report.render(format_of(format)));
            ExitCode::from(report.exit_code() as u8)
        }
    }
}
