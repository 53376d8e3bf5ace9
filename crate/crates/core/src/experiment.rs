//! Seeded multi-trial benchmark runs and their on-disk outputs.

use std::fs;
use std::path::{Path, PathBuf};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::checkpoint::Checkpoint;
use crate::config::{ModelKind, RunConfig, Setting};
use crate::csom::CsomState;
use crate::data::LabeledDataset;
use crate::error::{Error, Result};
use crate::eval::{continual_metrics, task_accuracy, HitMatrix, Metrics, TaskMatrix};
use crate::model::Model;
use crate::som::SomState;
use crate::streams::{run_continual, split_class_incremental, split_domain_incremental, TaskSequence};
use crate::topology::GridTopology;
use crate::OnlineModel;

/// Fresh model for `cfg`. Weight initialisation draws from a ChaCha8
/// stream separate from the one used to shuffle tasks.
pub fn build_model(cfg: &RunConfig, dim: usize, seed: u64) -> Result<Model> {
    let topology = GridTopology::square(cfg.grid)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(1);
    Ok(match cfg.model {
        ModelKind::Som => SomState::new(topology, dim, cfg.som_params(), &mut rng)?.into(),
        ModelKind::Csom => CsomState::new(topology, dim, cfg.csom_params(), &mut rng)?.into(),
    })
}

pub fn build_sequence<'a>(
    setting: Setting,
    train: &'a LabeledDataset,
    test: &'a LabeledDataset,
    seed: u64,
) -> Result<TaskSequence<'a>> {
    match setting {
        Setting::ClassIncremental => split_class_incremental(train, test, seed),
        Setting::DomainIncremental => split_domain_incremental(train, test, seed),
    }
}

#[derive(Debug, Clone)]
pub struct TrialResult {
    pub seed: u64,
    pub matrix: TaskMatrix,
    pub metrics: Metrics,
    pub checkpoint: Checkpoint,
}

pub fn run_trial(cfg: &RunConfig, train: &LabeledDataset, test: &LabeledDataset, seed: u64) -> Result<TrialResult> {
    let sequence = build_sequence(cfg.setting, train, test, seed)?;
    let mut model = build_model(cfg, train.dim(), seed)?;
    let mut hits = HitMatrix::new(sequence.label_count(), model.weights().units())?;
    let matrix = run_continual(&mut model, &sequence, &mut hits)?;
    // Metrics come from the matrix as exported, so they can be recomputed
    // from the CSV files exactly.
    let metrics = continual_metrics(&matrix.rounded());
    Ok(TrialResult {
        seed,
        matrix,
        metrics,
        checkpoint: Checkpoint::new(model, hits)?,
    })
}

/// Runs `cfg.trials` trials with seeds `cfg.seed, cfg.seed + 1, ...` on a
/// pool of `cfg.jobs` threads. Results come back in seed order.
pub fn run_trials(cfg: &RunConfig, train: &LabeledDataset, test: &LabeledDataset) -> Result<Vec<TrialResult>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| {
        (0..cfg.trials as u64)
            .into_par_iter()
            .map(|i| run_trial(cfg, train, test, cfg.seed + i))
            .collect()
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Stat {
    pub mean: f64,
    /// Sample standard deviation; 0 for a single trial.
    pub std: f64,
}

impl Stat {
    pub fn of(values: &[f64]) -> Stat {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Stat { mean, std }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TrialSummary {
    pub seed: u64,
    #[serde(flatten)]
    pub metrics: Metrics,
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub config: RunConfig,
    pub acc: Stat,
    pub bwt: Stat,
    pub fm: Stat,
    pub la: Stat,
    pub trials: Vec<TrialSummary>,
}

impl Summary {
    pub fn new(cfg: &RunConfig, results: &[TrialResult]) -> Result<Self> {
        if results.is_empty() {
            return Err(Error::Empty("trial results"));
        }
        let stat = |f: fn(&Metrics) -> f64| Stat::of(&results.iter().map(|r| f(&r.metrics)).collect::<Vec<_>>());
        Ok(Summary {
            config: cfg.clone(),
            acc: stat(|m| m.acc),
            bwt: stat(|m| m.bwt),
            fm: stat(|m| m.fm),
            la: stat(|m| m.la),
            trials: results
                .iter()
                .map(|r| TrialSummary {
                    seed: r.seed,
                    metrics: r.metrics,
                })
                .collect(),
        })
    }
}

pub fn trial_stem(cfg: &RunConfig, seed: u64) -> String {
    format!(
        "{}_{}_{}_seed{seed}",
        cfg.model.as_str(),
        cfg.dataset.as_str(),
        cfg.setting.as_str()
    )
}

/// Writes `<stem>.csv` and `<stem>.ckpt` per trial and `summary.json`.
/// Returns the summary path.
pub fn write_outputs(cfg: &RunConfig, results: &[TrialResult], out_dir: &Path) -> Result<PathBuf> {
    fs::create_dir_all(out_dir).map_err(|e| Error::file(out_dir, e))?;
    for r in results {
        let stem = trial_stem(cfg, r.seed);
        let csv = out_dir.join(format!("{stem}.csv"));
        fs::write(&csv, r.matrix.to_csv()).map_err(|e| Error::file(&csv, e))?;
        r.checkpoint.save(&out_dir.join(format!("{stem}.ckpt")))?;
    }
    let summary = Summary::new(cfg, results)?;
    let path = out_dir.join("summary.json");
    let json = serde_json::to_string_pretty(&summary).map_err(|e| Error::Config(e.to_string()))?;
    fs::write(&path, json + "\n").map_err(|e| Error::file(&path, e))?;
    Ok(path)
}

/// Accuracy of a saved model on every task's test set, using the hit
/// matrix stored with it.
pub fn evaluate_checkpoint(checkpoint: &Checkpoint, sequence: &TaskSequence<'_>) -> Result<Vec<f64>> {
    if checkpoint.hits.classes() != sequence.label_count() {
        return Err(Error::InvalidParameter(format!(
            "checkpoint has {} labels, sequence has {}",
            checkpoint.hits.classes(),
            sequence.label_count()
        )));
    }
    (0..sequence.len())
        .map(|k| task_accuracy(checkpoint.model.weights(), &checkpoint.hits, &sequence.test_samples(k)?))
        .collect()
}
