use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use esgkg_cli::commands;
use esgkg_cli::config::{BackendKind, PipelineConfig};
use esgkg_cli::CliError;

#[derive(Parser)]
#[command(
    name = "esgkg",
    about = "Build validated knowledge graphs from page-structured ESG regulatory documents",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Clone, Default)]
struct ConfigOverrides {
    /// Pipeline configuration file (TOML)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Extraction mode: ontology | baseline
    #[arg(long)]
    mode: Option<String>,
    /// Worker threads for extraction / semantic validation
    #[arg(long)]
    parallelism: Option<usize>,
    /// Completion backend: live | replay | oracle
    #[arg(long)]
    backend: Option<String>,
    /// Price table file (JSON), overriding the config's pricing section
    #[arg(long)]
    price_table: Option<PathBuf>,
}

impl ConfigOverrides {
    fn resolve(&self) -> Result<PipelineConfig, CliError> {
        let mut config = match &self.config {
            Some(path) => PipelineConfig::load(path)?,
            None => PipelineConfig::default(),
        };
        if let Some(mode) = &self.mode {
            config.mode = mode.clone();
        }
        if let Some(parallelism) = self.parallelism {
            config.parallelism = parallelism;
        }
        if let Some(backend) = &self.backend {
            config.backend.kind = BackendKind::parse(backend)
                .ok_or_else(|| CliError::Input(format!("unknown backend {backend:?}")))?;
        }
        if let Some(path) = &self.price_table {
            let table = esgkg::artifact::load_price_table(path)
                .map_err(|e| CliError::Input(e.to_string()))?;
            config.pricing.version = table.version;
            config.pricing.models = table.models;
        }
        config.validate()?;
        config.mode()?;
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Stage 1: segment a document bundle along its table of contents
    Segment {
        /// Document bundle (JSON)
        bundle: PathBuf,
        /// Output segment file
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Stage 2: extract entities and relationships from segments
    Extract {
        /// Segment file from `segment`
        segments: PathBuf,
        /// Output extraction file
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Merge per-segment results into one consolidated graph
    Consolidate {
        /// Extraction file from `extract`
        extraction: PathBuf,
        /// Output graph file
        #[arg(long)]
        out: PathBuf,
    },
    /// Stage 3: two-phase validation plus metrics
    Validate {
        /// Consolidated graph file
        graph: PathBuf,
        /// Output directory (validated graph, report, metrics)
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Run segment, extract, consolidate, validate and metrics end to end
    Pipeline {
        /// Document bundle (JSON)
        bundle: PathBuf,
        /// Output directory for all artifacts
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        overrides: ConfigOverrides,
    },
    /// Export a graph artifact
    Export {
        /// Graph file (consolidated or validated)
        graph: PathBuf,
        /// Output format: native | triples
        #[arg(long, default_value = "triples")]
        format: String,
        /// Output file
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a synthetic bundle with oracle ground truth for offline runs
    Synth {
        /// Generator seed
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Segment { bundle, out, overrides } => {
            commands::cmd_segment(&bundle, &out, &overrides.resolve()?)
        }
        Command::Extract { segments, out, overrides } => {
            commands::cmd_extract(&segments, &overrides.resolve()?, &out)
        }
        Command::Consolidate { extraction, out } => commands::cmd_consolidate(&extraction, &out),
        Command::Validate { graph, out, overrides } => {
            commands::cmd_validate(&graph, &overrides.resolve()?, &out)
        }
        Command::Pipeline { bundle, out, overrides } => {
            commands::cmd_pipeline(&bundle, &overrides.resolve()?, &out)
        }
        Command::Export { graph, format, out } => commands::cmd_export(&graph, &format, &out),
        Command::Synth { seed, out } => commands::cmd_synth(seed, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
