//! `verbsense`: build spaces, induce verb senses, train verb matrices and
//! run the evaluations, one subcommand per pipeline stage. Everything that
//! can change a result comes from the config file.

mod artifacts;
mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use verbsense::composition::ModelKind;
use verbsense::{Error, PipelineConfig, Result};

use artifacts::Store;
use commands::{Task, TrainMode};

#[derive(Debug, Parser)]
#[command(name = "verbsense", version, about = "Sense-aware compositional verb matrices")]
struct Cli {
    /// Pipeline config file (TOML with dotted keys).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Worker threads for per-verb work; 1 gives bit-identical reruns.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
    /// Overrides the config's seed.
    #[arg(long, global = true, value_name = "K")]
    seed: Option<u64>,
    /// Load artifacts even when they were made under another config.
    #[arg(long, global = true)]
    force: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a synthetic planted-sense corpus, its datasets and a config.
    Synth {
        #[arg(long, value_name = "DIR")]
        out: PathBuf,
    },
    /// Build the word space from the corpus.
    BuildSpace,
    /// Build holistic verb-object phrase vectors.
    BuildHolistic,
    /// Cluster verb contexts into sense inventories.
    InduceSenses {
        /// Comma-separated verbs; defaults to the similarity dataset's verbs.
        #[arg(long, value_delimiter = ',')]
        verbs: Vec<String>,
    },
    /// Train verb matrices, one per verb or one per induced sense.
    Train {
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long, value_delimiter = ',')]
        verbs: Vec<String>,
    },
    /// Compose phrases listed as `verb<TAB>object` lines.
    Compose {
        #[arg(long)]
        model: ModelKind,
        #[arg(long, value_name = "FILE")]
        phrases: PathBuf,
        /// Defaults to standard output.
        #[arg(long, value_name = "FILE")]
        output: Option<PathBuf>,
    },
    /// Run an evaluation and write JSON and TSV reports.
    Evaluate {
        #[arg(long, value_enum)]
        task: TaskArg,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Mode {
    Ambiguous,
    #[value(name = "per_sense", alias = "per-sense")]
    PerSense,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum TaskArg {
    Supervised,
    Similarity,
}

fn load_config(cli: &Cli) -> Result<PipelineConfig> {
    let mut cfg = match (&cli.config, &cli.command) {
        (Some(path), _) => PipelineConfig::load(path)?,
        (None, Command::Synth { .. }) => PipelineConfig::default(),
        (None, _) => return Err(Error::Config("--config is required".into())),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
        if matches!(cli.command, Command::Synth { .. }) {
            cfg.synth.seed = seed;
        }
    }
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(Error::Config("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    }
    let cfg = load_config(cli)?;
    let store = Store::new(&cfg, cli.force);
    match &cli.command {
        Command::Synth { out } => commands::synth(&cfg, out),
        Command::BuildSpace => commands::build_space(&cfg, &store),
        Command::BuildHolistic => commands::build_holistic(&cfg, &store),
        Command::InduceSenses { verbs } => commands::induce(&cfg, &store, verbs),
        Command::Train { mode, verbs } => {
            let mode = match mode {
                Mode::Ambiguous => TrainMode::Ambiguous,
                Mode::PerSense => TrainMode::PerSense,
            };
            commands::train(&cfg, &store, mode, verbs)
        }
        Command::Compose { model, phrases, output } => commands::compose(&store, *model, phrases, output.as_deref()),
        Command::Evaluate { task } => {
            let task = match task {
                TaskArg::Supervised => Task::Supervised,
                TaskArg::Similarity => Task::Similarity,
            };
            commands::evaluate(&cfg, &store, task)
        }
    }
}

/// 2 for config problems, 3 for missing or mismatched artifacts, 1 otherwise.
fn exit_code(e: &Error) -> u8 {
    match e.root() {
        Error::Config(_) => 2,
        Error::MissingArtifact(_) | Error::ConfigHashMismatch { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
