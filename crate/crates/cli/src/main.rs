mod commands;
mod error;
mod io;
mod manifest;

use std::net::SocketAddr;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cognate_core::classify::FeatureScheme;
use cognate_core::exec::Execution;
use cognate_core::extraction::Task;
use cognate_core::project::{ConfigValues, ProjectConfig};

use crate::commands::{AgreeArgs, Ctx, TrainArgs};
use crate::error::{CliError, Result};

/// Cognate and false-friend mining over linked wordnets.
#[derive(Parser)]
#[command(name = "cognate", version)]
struct Cli {
    #[command(flatten)]
    settings: Settings,
    #[command(subcommand)]
    command: Command,
}

/// Project settings. Flags override values from `--config`.
#[derive(Args)]
struct Settings {
    /// Flat `key = value` project file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    wordnet_dir: Option<String>,
    #[arg(long, global = true)]
    source: Option<String>,
    /// Comma-separated target language codes.
    #[arg(long, global = true)]
    targets: Option<String>,
    #[arg(long, global = true)]
    threshold: Option<String>,
    #[arg(long, global = true)]
    shingle_n: Option<String>,
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    output_dir: Option<String>,
    /// Run without worker threads.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Load the wordnets and print per-language counts.
    Ingest,
    /// Write cognate candidates for every language pair.
    GenCognates,
    /// Write false-friend candidates for every language pair.
    GenFalsefriends,
    /// Write annotator worksheets with glosses and examples.
    ExportWorksheet {
        #[arg(long, default_value = "cognates")]
        task: Task,
    },
    /// Import labeled worksheets and compute inter-annotator agreement.
    Agree {
        #[arg(long, default_value = "cognates")]
        task: Task,
        /// A filled worksheet, as ANNOTATOR=FILE. Repeatable.
        #[arg(long = "labels", value_name = "ANNOTATOR=FILE")]
        labels: Vec<String>,
        /// The two annotators to compare, as `a,b`.
        #[arg(long)]
        annotators: Option<String>,
        /// Timestamp recorded for imported labels (RFC 3339).
        #[arg(long)]
        timestamp: Option<String>,
    },
    /// Import an existing cognate-set file as D1 gold data.
    ImportD1 {
        #[arg(long)]
        input: PathBuf,
    },
    /// Merge retained annotations with D1 and other gold files.
    MergeGold {
        #[arg(long, default_value = "cognates")]
        task: Task,
        #[arg(long)]
        d1: Option<PathBuf>,
        /// Additional gold file. Repeatable.
        #[arg(long = "with")]
        with: Vec<PathBuf>,
    },
    /// Train and evaluate a classifier per language pair.
    TrainEval {
        #[arg(long, default_value = "cognates")]
        task: Task,
        /// orthographic, phonetic, combo or all.
        #[arg(long, default_value = "all")]
        scheme: String,
        /// CSV of approach,language_pair,f_score rows to add to the table.
        #[arg(long)]
        external: Option<PathBuf>,
    },
    /// Summarize candidates, gold data and annotations.
    Stats,
    /// Run the annotation service.
    Serve {
        #[arg(long, default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
        #[arg(long)]
        static_dir: Option<PathBuf>,
    },
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn load_config(s: &Settings) -> Result<ProjectConfig> {
    let from_file = match &s.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
            let base = path.parent().unwrap_or(std::path::Path::new("."));
            ConfigValues::parse(&text, base).map_err(|e| usage(format!("{}: {e}", path.display())))?
        }
        None => ConfigValues::default(),
    };
    let mut flags = ConfigValues::default();
    let pairs = [
        ("wordnet_dir", &s.wordnet_dir),
        ("source", &s.source),
        ("targets", &s.targets),
        ("threshold", &s.threshold),
        ("shingle_n", &s.shingle_n),
        ("seed", &s.seed),
        ("output_dir", &s.output_dir),
    ];
    for (key, value) in pairs {
        if let Some(v) = value {
            flags.set(key, v, None).map_err(usage)?;
        }
    }
    from_file.overlay(flags).resolve().map_err(usage)
}

fn run(cli: Cli) -> Result<()> {
    let ctx = Ctx {
        config: load_config(&cli.settings)?,
        execution: if cli.settings.sequential { Execution::Sequential } else { Execution::Parallel },
    };
    match cli.command {
        Command::Ingest => commands::ingest(&ctx),
        Command::GenCognates => commands::generate(&ctx, Task::Cognates),
        Command::GenFalsefriends => commands::generate(&ctx, Task::FalseFriends),
        Command::ExportWorksheet { task } => commands::export_worksheet(&ctx, task),
        Command::Agree { task, labels, annotators, timestamp } => {
            commands::agree(&ctx, AgreeArgs { task, labels, annotators, timestamp })
        }
        Command::ImportD1 { input } => commands::import_d1_cmd(&ctx, &input),
        Command::MergeGold { task, d1, with } => commands::merge_gold_cmd(&ctx, task, d1, with),
        Command::TrainEval { task, scheme, external } => {
            let scheme = match scheme.as_str() {
                "all" => None,
                s => Some(s.parse::<FeatureScheme>().map_err(usage)?),
            };
            commands::train_eval(&ctx, TrainArgs { task, scheme, external })
        }
        Command::Stats => commands::stats(&ctx),
        Command::Serve { addr, static_dir } => commands::serve(&ctx, addr, static_dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
