use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use zm_cli::commands::{self, EvaluateArgs, FitArgs, ScoreArgs, SweepArgs};
use zm_core::synth::SyntheticConfig;

#[derive(Parser)]
#[command(name = "zmrate", version, about = "Nonlinear Z-score credit rating engine")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Layout {
    /// TOML dataset schema; defaults to the five standard ratio columns.
    #[arg(long)]
    schema: Option<PathBuf>,
    /// TOML file of threshold tables.
    #[arg(long)]
    thresholds: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Fit discriminant weights and per-industry distributions on graded data.
    Fit {
        #[arg(long)]
        input: PathBuf,
        /// Where to write the model artifact.
        #[arg(long)]
        model: PathBuf,
        /// Optional scored CSV of the training data.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        layout: Layout,
    },
    /// Rate records with a previously fitted model.
    Score {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        output: PathBuf,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        layout: Layout,
    },
    /// Seeded stratified hold-out evaluation.
    Evaluate {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Optional scored CSV of the held-out records.
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        layout: Layout,
    },
    /// Compare classification under several threshold tables.
    Sweep {
        #[arg(long)]
        input: PathBuf,
        /// Score with this model instead of fitting in-sample.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        report: Option<PathBuf>,
        #[command(flatten)]
        layout: Layout,
    },
    /// Check the embedded ten-firm example against its published figures.
    Toy {
        /// Take the weights from this artifact instead of the published ones.
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        thresholds: Option<PathBuf>,
    },
    /// Write a seeded synthetic dataset.
    Synth {
        #[arg(long)]
        output: PathBuf,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = 4000)]
        records: usize,
        #[arg(long, default_value_t = 12)]
        industries: u32,
        #[arg(long)]
        schema: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = io::stdout().lock();
    let result = match &cli.command {
        Command::Fit { input, model, output, report, layout } => commands::fit(
            FitArgs {
                input,
                model,
                output: output.as_deref(),
                report: report.as_deref(),
                schema: layout.schema.as_deref(),
                thresholds: layout.thresholds.as_deref(),
            },
            &mut out,
        ),
        Command::Score { input, model, output, report, layout } => commands::score(
            ScoreArgs {
                input,
                model,
                output,
                report: report.as_deref(),
                schema: layout.schema.as_deref(),
                thresholds: layout.thresholds.as_deref(),
            },
            &mut out,
        ),
        Command::Evaluate { input, seed, output, report, layout } => commands::evaluate(
            EvaluateArgs {
                input,
                seed: *seed,
                output: output.as_deref(),
                report: report.as_deref(),
                schema: layout.schema.as_deref(),
                thresholds: layout.thresholds.as_deref(),
            },
            &mut out,
        ),
        Command::Sweep { input, model, report, layout } => commands::sweep(
            SweepArgs {
                input,
                model: model.as_deref(),
                report: report.as_deref(),
                schema: layout.schema.as_deref(),
                thresholds: layout.thresholds.as_deref(),
            },
            &mut out,
        ),
        Command::Toy { model, thresholds } => commands::toy_mode(model.as_deref(), thresholds.as_deref(), &mut out),
        Command::Synth { output, seed, records, industries, schema } => {
            let config = SyntheticConfig {
                records: *records,
                industries: *industries,
                seed: *seed,
                ..Default::default()
            };
            commands::synth(output, &config, schema.as_deref(), &mut out)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zmrate: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
