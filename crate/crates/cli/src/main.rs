//! `chvenrich`: the enrichment pipeline as file-to-file stages.

mod commands;
mod config;
mod error;
mod workspace;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use commands::{Context, Format};
use config::{Overrides, PipelineConfig};
use error::CliResult;

#[derive(Debug, Parser)]
#[command(name = "chvenrich", version, about = "Consumer health vocabulary enrichment with GloVe and WordNet")]
struct Cli {
    /// TOML config file; defaults to ./chvenrich.toml when present.
    #[arg(long, short = 'c', global = true)]
    config: Option<PathBuf>,

    /// Print the effective configuration as TOML and exit.
    #[arg(long, global = true)]
    print_config: bool,

    #[command(flatten)]
    overrides: Overrides,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tokenize, filter and stem the raw corpus into stream.txt.
    Preprocess,
    /// Filter the concept/term table against the stream and assign seeds.
    BuildLexicon,
    /// Insert WordNet relatives around every seed occurrence.
    Augment,
    /// Build (or reuse) the co-occurrence matrix for the variant stream.
    Cooccur,
    /// Train a GloVe model on the cached co-occurrence matrix.
    Train,
    /// Rank the vocabulary against one or more seed terms.
    Query {
        #[arg(required = true)]
        seeds: Vec<String>,
        #[arg(long, value_enum, default_value = "tsv")]
        format: Format,
        /// Model file; defaults to the one `train` writes for the current config.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Score one model against the ground-truth lexicon.
    Evaluate {
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Evaluate every point of the d × window × n × variant grid.
    Sweep,
}

fn run(cli: Cli) -> CliResult<()> {
    let (mut config, source) = PipelineConfig::load(cli.config.as_deref())?;
    if let Some(p) = &source {
        log::debug!("config from {}", p.display());
    }
    config.apply(&cli.overrides)?;
    config.validate()?;
    if cli.print_config {
        let text = toml::to_string_pretty(&config).map_err(|e| error::CliError::config(e.to_string()))?;
        print!("{text}");
        return Ok(());
    }
    let ctx = Context::new(config);
    match cli.command {
        Command::Preprocess => ctx.preprocess(),
        Command::BuildLexicon => ctx.build_lexicon(),
        Command::Augment => ctx.augment(),
        Command::Cooccur => ctx.cooccur(),
        Command::Train => ctx.train(),
        Command::Query { seeds, format, model } => ctx.query(&seeds, model.as_deref(), format),
        Command::Evaluate { model } => ctx.evaluate(model.as_deref()),
        Command::Sweep => ctx.sweep(),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("chvenrich: {e}");
            ExitCode::from(e.code() as u8)
        }
    }
}
