use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use csom_core::checkpoint::Checkpoint;
use csom_core::config::RunConfig;
use csom_core::experiment::{build_sequence, evaluate_checkpoint, run_trials, write_outputs};
use csom_core::pgm::{prototype_grid, vector_image};
use csom_core::{Error, OnlineModel, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "csom", version, about = "Online SOM and continual SOM benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run seeded trials and write task matrices, checkpoints and a summary.
    Train(RunFlags),
    /// Evaluate a checkpoint on every task of a setting.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[command(flatten)]
        run: RunFlags,
    },
    /// Render all prototypes of a checkpoint as one PGM image.
    ExportPrototypes {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Draw samples from one unit of a continual SOM checkpoint.
    Sample {
        #[arg(long)]
        checkpoint: PathBuf,
        #[arg(long)]
        unit: usize,
        #[arg(long, short = 'n', default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
}

#[derive(Args)]
struct RunFlags {
    /// Flat `key = value` file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    dataset: Option<String>,
    #[arg(long)]
    setting: Option<String>,
    #[arg(long)]
    grid: Option<String>,
    #[arg(long)]
    sigma0: Option<String>,
    #[arg(long)]
    lambda0: Option<String>,
    #[arg(long)]
    var0: Option<String>,
    #[arg(long)]
    lambda_omega0: Option<String>,
    #[arg(long)]
    tau_sigma: Option<String>,
    #[arg(long)]
    tau_lambda: Option<String>,
    #[arg(long)]
    sigma_floor: Option<String>,
    #[arg(long)]
    lambda_floor: Option<String>,
    #[arg(long)]
    var_eps: Option<String>,
    /// Classical SOM schedule: rational or exponential.
    #[arg(long)]
    som_decay: Option<String>,
    /// Continual SOM per-unit decay: from-initial or compounding.
    #[arg(long)]
    bmu_decay: Option<String>,
    #[arg(long)]
    trials: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    #[arg(long)]
    data_dir: Option<String>,
    #[arg(long)]
    out_dir: Option<String>,
    #[arg(long)]
    jobs: Option<String>,
}

impl RunFlags {
    fn resolve(&self) -> Result<RunConfig> {
        let file = match &self.config {
            Some(p) => Some(fs::read_to_string(p).map_err(|e| Error::File {
                path: p.clone(),
                source: e,
            })?),
            None => None,
        };
        let pairs = [
            ("model", &self.model),
            ("dataset", &self.dataset),
            ("setting", &self.setting),
            ("grid", &self.grid),
            ("sigma0", &self.sigma0),
            ("lambda0", &self.lambda0),
            ("var0", &self.var0),
            ("lambda_omega0", &self.lambda_omega0),
            ("tau_sigma", &self.tau_sigma),
            ("tau_lambda", &self.tau_lambda),
            ("sigma_floor", &self.sigma_floor),
            ("lambda_floor", &self.lambda_floor),
            ("var_eps", &self.var_eps),
            ("som_decay", &self.som_decay),
            ("bmu_decay", &self.bmu_decay),
            ("trials", &self.trials),
            ("seed", &self.seed),
            ("data_dir", &self.data_dir),
            ("out_dir", &self.out_dir),
            ("jobs", &self.jobs),
        ];
        let overrides: Vec<(String, String)> = pairs
            .iter()
            .filter_map(|(k, v)| v.as_ref().map(|v| (k.to_string(), v.clone())))
            .collect();
        RunConfig::resolve(file.as_deref(), &overrides)
    }
}

fn load_data(cfg: &RunConfig) -> Result<(csom_core::LabeledDataset, csom_core::LabeledDataset)> {
    cfg.dataset.load(&cfg.data_dir)
}

fn train(flags: &RunFlags) -> Result<()> {
    let cfg = flags.resolve()?;
    let (train, test) = load_data(&cfg)?;
    let results = run_trials(&cfg, &train, &test)?;
    let summary = write_outputs(&cfg, &results, &cfg.out_dir)?;
    print!("{}", fs::read_to_string(&summary).map_err(|e| Error::File { path: summary, source: e })?);
    Ok(())
}

fn eval(checkpoint: &Path, flags: &RunFlags) -> Result<()> {
    let cfg = flags.resolve()?;
    let ck = Checkpoint::load(checkpoint)?;
    let (train, test) = load_data(&cfg)?;
    let seq = build_sequence(cfg.setting, &train, &test, cfg.seed)?;
    let accuracies = evaluate_checkpoint(&ck, &seq)?;
    let mean = accuracies.iter().sum::<f64>() / accuracies.len() as f64;
    let out = serde_json::json!({
        "checkpoint": checkpoint,
        "model": ck.model.kind(),
        "dataset": cfg.dataset,
        "setting": cfg.setting,
        "task_accuracy": accuracies,
        "mean_accuracy": mean,
    });
    println!("{}", serde_json::to_string_pretty(&out).map_err(|e| Error::Config(e.to_string()))?);
    Ok(())
}

fn export_prototypes(checkpoint: &Path, out: &Path) -> Result<()> {
    let ck = Checkpoint::load(checkpoint)?;
    prototype_grid(ck.model.topology(), ck.model.weights())?.save(out)
}

fn sample(checkpoint: &Path, unit: usize, n: usize, seed: u64, out_dir: &Path) -> Result<()> {
    let ck = Checkpoint::load(checkpoint)?;
    let model = ck
        .model
        .as_csom()
        .ok_or_else(|| Error::InvalidParameter("sampling needs a continual SOM checkpoint".into()))?;
    let units = model.topology().unit_count();
    if unit >= units {
        return Err(Error::IndexOutOfRange { index: unit, len: units });
    }
    if n == 0 {
        return Ok(());
    }
    fs::create_dir_all(out_dir).map_err(|e| Error::File {
        path: out_dir.to_path_buf(),
        source: e,
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..n {
        let x = model.sample_prototype(unit, &mut rng)?;
        vector_image(&x)?.save(&out_dir.join(format!("unit{unit}_sample{i}.pgm")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(flags) => train(&flags),
        Command::Eval { checkpoint, run } => eval(&checkpoint, &run),
        Command::ExportPrototypes { checkpoint, out } => export_prototypes(&checkpoint, &out),
        Command::Sample {
            checkpoint,
            unit,
            n,
            seed,
            out_dir,
        } => sample(&checkpoint, unit, n, seed, &out_dir),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let msg = e.to_string().replace('\n', " ");
            eprintln!("error: kind={} msg={msg:?}", e.kind());
            ExitCode::FAILURE
        }
    }
}

