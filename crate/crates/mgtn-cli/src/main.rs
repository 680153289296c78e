use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mgtn_cli::commands::{tools, trade, train};
use mgtn_cli::config::{apply_overrides, ExperimentConfig, ExperimentKind};
use mgtn_cli::error::{CliError, Result};
use mgtn_cli::report::RunDir;

#[derive(Parser)]
#[command(
    name = "mgtn",
    about = "Multi-graph tensor network experiments: training, trading, decomposition, and parameter counts"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunArgs {
    /// JSON configuration file; defaults are used when only --experiment is given.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Experiment kind (trade|eeg|temperature|airquality) for built-in defaults.
    #[arg(long)]
    experiment: Option<String>,
    /// Seed override (highest precedence).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Dotted-path config overrides, e.g. optimizer.learning_rate=0.005.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Supervised experiments (eeg, temperature, airquality).
    Train(RunArgs),
    /// The value-learning trading experiment.
    Trade(RunArgs),
    /// Tensor-train decomposition of a tensor file.
    Decompose {
        /// Tensor file in the flat text format.
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated rank tuple, boundary entries 1.
        #[arg(long, value_delimiter = ',')]
        ranks: Option<Vec<usize>>,
        /// Relative accuracy in (0, 1); alternative to --ranks.
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, default_value = "runs/decompose")]
        out: PathBuf,
    },
    /// Trainable-parameter report with closed-form cross-checks.
    Paramcount(RunArgs),
    /// Emit synthetic datasets in the documented CSV schemas.
    Synth(RunArgs),
}

fn resolve_config(args: &RunArgs) -> Result<ExperimentConfig> {
    let mut config = match (&args.config, &args.experiment) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Config(format!("reading {}: {e}", path.display())))?;
            ExperimentConfig::from_json(&text)?
        }
        (None, Some(kind)) => ExperimentConfig::default_for(ExperimentKind::parse(kind)?),
        (None, None) => {
            return Err(CliError::Config(
                "pass --config <file> or --experiment <kind>".into(),
            ))
        }
    };
    if !args.overrides.is_empty() {
        config = apply_overrides(&config, &args.overrides)?;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(out) = &args.out {
        config.out_dir = out.display().to_string();
    }
    Ok(config)
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => {
            let config = resolve_config(&args)?;
            let out = RunDir::create(std::path::Path::new(&config.out_dir))?;
            let report = train::run_train(&config, &out)?;
            println!(
                "{}: {} = {:.6} (train) / {:.6} (test), NP = {}",
                report.experiment,
                report.metric,
                report.train_metric,
                report.test_metric,
                report.trainable_parameters
            );
            println!("reports in {}", out.path().display());
        }
        Command::Trade(args) => {
            let config = resolve_config(&args)?;
            let out = RunDir::create(std::path::Path::new(&config.out_dir))?;
            let report = trade::run_trade(&config, &out)?;
            println!(
                "trade: average out-of-sample TR {:.4}% SR {:.4}, NP = {}",
                report.average_out_of_sample_tr_pct,
                report.average_out_of_sample_sharpe,
                report.trainable_parameters
            );
            println!("reports in {}", out.path().display());
        }
        Command::Decompose {
            input,
            ranks,
            tolerance,
            out,
        } => {
            let dir = RunDir::create(&out)?;
            let report = tools::run_decompose(&input, ranks, tolerance, &dir)?;
            println!(
                "ranks {:?}, relative error {:.3e}, {} core parameters ({} dense)",
                report.achieved_ranks,
                report.relative_error,
                report.core_parameters,
                report.dense_parameters
            );
            println!("reports in {}", dir.path().display());
        }
        Command::Paramcount(args) => {
            let config = resolve_config(&args)?;
            let out = RunDir::create(std::path::Path::new(&config.out_dir))?;
            let report = tools::run_paramcount(&config, &out)?;
            println!("{}: NP = {}", report.experiment, report.total);
            for layer in &report.layers {
                match (layer.closed_form, layer.matricized_dense_equivalent) {
                    (Some(cf), Some(md)) => println!(
                        "  {}: {} (closed form {cf}, matricized dense {md})",
                        layer.kind, layer.trainable
                    ),
                    (Some(cf), None) => {
                        println!("  {}: {} (closed form {cf})", layer.kind, layer.trainable)
                    }
                    _ => println!("  {}: {}", layer.kind, layer.trainable),
                }
            }
        }
        Command::Synth(args) => {
            let config = resolve_config(&args)?;
            let out = RunDir::create(std::path::Path::new(&config.out_dir))?;
            tools::run_synth(&config, &out)?;
            println!("synthetic {} data in {}", config.experiment.name(), out.path().display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
