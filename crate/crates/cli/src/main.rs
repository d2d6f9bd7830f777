use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use tmsim_cli::config::{RngSource, VerifyTarget};
use tmsim_cli::{replay, run, CommandSpec, Overrides, RunConfig};
use tmsim_core::Fb2Polarity;

/// Tsetlin Machine simulator: training, dual-rail latency analysis, PRBG
/// statistics and formal checks.
#[derive(Debug, Parser)]
#[command(name = "tmsim", version)]
struct Cli {
    /// TOML configuration file; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    epochs: Option<u64>,
    /// Comma-separated epochs to snapshot (train) or simulate (latency).
    #[arg(long, global = true, value_delimiter = ',')]
    snapshot_epochs: Option<Vec<u64>>,
    #[arg(long, global = true)]
    d_period: Option<u64>,
    /// published | swapped
    #[arg(long, global = true)]
    fb2_polarity: Option<Fb2Polarity>,
    /// TOML or JSON file of per-gate delays.
    #[arg(long, global = true)]
    delay_table: Option<PathBuf>,
    #[arg(long, global = true)]
    target_class: Option<i64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Binary feature table with a label column.
    #[arg(long, global = true)]
    dataset: Option<PathBuf>,
    /// ideal | prbg
    #[arg(long, global = true)]
    rng_source: Option<RngSource>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train on the training split; writes train_epochs.csv and model.json.
    Train,
    /// Accuracy of a trained model and its snapshots.
    Eval {
        /// Defaults to <out-dir>/model.json.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Latency histograms of the dual-rail datapath for each snapshot.
    Latency {
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Bias, correlation and entropy of the ring-oscillator generator.
    Prbg,
    /// Exhaustive feedback, automaton and STG checks; exits 1 on failure.
    Verify {
        /// fb-tables | ta-equivalence | stg (comma-separated); all by default.
        #[arg(long = "target", value_delimiter = ',')]
        targets: Vec<VerifyTarget>,
    },
    /// Re-run a recorded command and compare output digests; exits 1 on difference.
    Replay {
        manifest: PathBuf,
    },
    /// Print the resolved configuration as TOML.
    Config,
}

fn main() -> ExitCode {
    match real_main() {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn real_main() -> anyhow::Result<ExitCode> {
    let cli = Cli::parse();
    let overrides = Overrides {
        seed: cli.seed,
        epochs: cli.epochs,
        snapshot_epochs: cli.snapshot_epochs.clone(),
        d_period: cli.d_period,
        fb2_polarity: cli.fb2_polarity,
        delay_table: cli.delay_table.clone(),
        target_class: cli.target_class,
        out_dir: cli.out_dir.clone(),
        dataset: cli.dataset.clone(),
        rng_source: cli.rng_source,
    };

    if let Command::Replay { manifest } = &cli.command {
        let report = replay(manifest, cli.out_dir.as_deref())?;
        let mut text = String::new();
        for f in &report.files {
            let status = if f.actual.as_deref() == Some(f.expected.as_str()) { "identical" } else { "DIFFERS" };
            text += &format!("{status:9} {}\n", f.name);
        }
        let verdict = if report.identical { "identical" } else { "MISMATCH" };
        text += &format!("replay into {}: {verdict}\n", report.out_dir.display());
        say(&text);
        return Ok(if report.identical { ExitCode::SUCCESS } else { ExitCode::FAILURE });
    }

    let mut cfg = RunConfig::resolve(cli.config.as_deref(), &overrides)?;
    let default_model = || cfg.out_dir.join("model.json");
    let spec = match cli.command {
        Command::Train => CommandSpec::Train,
        Command::Eval { model } => CommandSpec::Eval { model: model.unwrap_or_else(default_model) },
        Command::Latency { model } => CommandSpec::Latency { model: model.unwrap_or_else(default_model) },
        Command::Prbg => CommandSpec::Prbg,
        Command::Verify { targets } => {
            if !targets.is_empty() {
                cfg.verify.targets = targets;
            }
            CommandSpec::Verify
        }
        Command::Config => {
            say(&cfg.to_toml());
            return Ok(ExitCode::SUCCESS);
        }
        Command::Replay { .. } => unreachable!("handled above"),
    };
    let record = run(&spec, &cfg)?;
    say(&format!("{}\nmanifest: {}\n", record.output.summary, record.manifest_path.display()));
    Ok(if record.output.success { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}

/// Writes to stdout, ignoring a closed pipe.
fn say(text: &str) {
    let _ = std::io::stdout().write_all(text.as_bytes());
}
