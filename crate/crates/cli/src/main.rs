use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use lowdup_core::report::{render_corpus, render_report, Style, NO_COLOR_ENV};
use lowdup_core::run::{dump_tokens, run_compare, run_corpus, OutputFormat, RunConfig};
use lowdup_core::similarity::{InvolvedBaseline, Mode};
use lowdup_core::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;

/// Low-level token plagiarism detection for JVM programs.
#[derive(Parser)]
#[command(name = "lowdup", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare two submissions.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[command(flatten)]
        options: Options,
    },
    /// Compare every pair of submissions in a directory.
    Corpus {
        dir: PathBuf,
        #[command(flatten)]
        options: Options,
        /// Worker threads (defaults to one per core).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Print the token sequences of one submission.
    DumpTokens {
        path: PathBuf,
        #[command(flatten)]
        options: Options,
        /// Show sequences after invocation inlining.
        #[arg(long)]
        inline: bool,
    },
}

#[derive(Args)]
struct Options {
    #[arg(long, value_enum, default_value_t = ModeArg::La)]
    mode: ModeArg,
    /// Shortest tile length.
    #[arg(long, default_value_t = 2)]
    min_match: usize,
    /// Minimum signature similarity for two methods to be paired.
    #[arg(long, default_value_t = 0.5)]
    pairing_threshold: f64,
    /// Token count mismatches are measured against.
    #[arg(long, value_enum, default_value_t = InvolvedArg::Min)]
    involved: InvolvedArg,
    #[arg(long, value_enum, default_value_t = FormatArg::Text)]
    format: FormatArg,
    /// Include tile detail in reports.
    #[arg(long)]
    verbose: bool,
    /// Leave out constructors, static initializers, bridge and synthetic methods.
    #[arg(long)]
    exclude_synthetic: bool,
    /// In SLT mode, treat all identifiers as equal.
    #[arg(long)]
    slt_abstract_identifiers: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    La,
    Lam,
    Slt,
}

#[derive(Clone, Copy, ValueEnum)]
enum InvolvedArg {
    Min,
    Max,
    Mean,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Csv,
}

impl Options {
    fn config(&self, jobs: Option<usize>) -> RunConfig {
        RunConfig {
            mode: match self.mode {
                ModeArg::La => Mode::La,
                ModeArg::Lam => Mode::LaM,
                ModeArg::Slt => Mode::Slt,
            },
            min_match: self.min_match,
            pairing_threshold: self.pairing_threshold,
            involved_baseline: match self.involved {
                InvolvedArg::Min => InvolvedBaseline::Min,
                InvolvedArg::Max => InvolvedBaseline::Max,
                InvolvedArg::Mean => InvolvedBaseline::Mean,
            },
            include_synthetic: !self.exclude_synthetic,
            output_format: match self.format {
                FormatArg::Text => OutputFormat::Text,
                FormatArg::Json => OutputFormat::Json,
                FormatArg::Csv => OutputFormat::Csv,
            },
            verbose: self.verbose,
            jobs,
            slt_abstract_identifiers: self.slt_abstract_identifiers,
        }
    }
}

fn run(command: Command) -> Result<String, Error> {
    let color = std::env::var_os(NO_COLOR_ENV).is_none() && std::io::stdout().is_terminal();
    let style = Style { color };
    match command {
        Command::Compare { a, b, options } => {
            let config = options.config(None);
            let report = run_compare(&config, &a, &b)?;
            Ok(render_report(&report, config.output_format, style))
        }
        Command::Corpus { dir, options, jobs } => {
            let config = options.config(jobs);
            let result = run_corpus(&config, &dir)?;
            Ok(render_corpus(&result, config.output_format, style))
        }
        Command::DumpTokens {
            path,
            options,
            inline,
        } => dump_tokens(&options.config(None), &path, inline),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli.command) {
        Ok(output) => {
            let mut stdout = std::io::stdout().lock();
            if stdout
                .write_all(output.as_bytes())
                .and_then(|_| stdout.flush())
                .is_err()
            {
                return ExitCode::from(EXIT_INPUT);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("lowdup: {e}");
            ExitCode::from(if e.is_usage() { EXIT_USAGE } else { EXIT_INPUT })
        }
    }
}
