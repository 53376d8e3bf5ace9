//! Run configuration: per-dataset presets, flat `key = value` files, and
//! command-line overrides.

use std::path::PathBuf;

use serde::Serialize;

use crate::csom::{BmuDecay, CsomParams};
use crate::data::DatasetKind;
use crate::error::{Error, Result};
use crate::som::{DecayMode, SomParams};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Som,
    Csom,
}

impl ModelKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ModelKind::Som => "som",
            ModelKind::Csom => "csom",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "som" => Ok(ModelKind::Som),
            "csom" => Ok(ModelKind::Csom),
            other => Err(Error::Config(format!("unknown model '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Setting {
    ClassIncremental,
    DomainIncremental,
}

impl Setting {
    pub fn as_str(&self) -> &'static str {
        match self {
            Setting::ClassIncremental => "class-incremental",
            Setting::DomainIncremental => "domain-incremental",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "class-incremental" | "class" => Ok(Setting::ClassIncremental),
            "domain-incremental" | "domain" => Ok(Setting::DomainIncremental),
            other => Err(Error::Config(format!("unknown setting '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub model: ModelKind,
    pub dataset: DatasetKind,
    pub setting: Setting,
    /// Side of the square unit grid.
    pub grid: usize,
    pub sigma0: f64,
    pub lambda0: f64,
    pub var0: f64,
    pub lambda_omega0: f64,
    pub tau_sigma: f64,
    pub tau_lambda: f64,
    pub sigma_floor: f64,
    pub lambda_floor: f64,
    pub var_eps: f64,
    pub som_decay: DecayMode,
    pub bmu_decay: BmuDecay,
    pub trials: usize,
    /// Trial `i` (0-based) uses seed `seed + i`.
    pub seed: u64,
    pub data_dir: PathBuf,
    pub out_dir: PathBuf,
    /// Worker threads for trials; 0 picks the number of CPUs.
    pub jobs: usize,
}

impl RunConfig {
    /// Published hyperparameters for a model, dataset and setting.
    pub fn preset(model: ModelKind, dataset: DatasetKind, setting: Setting) -> Self {
        use DatasetKind::*;
        let csom = CsomParams::default();
        let som = SomParams::default();
        let mut cfg = RunConfig {
            model,
            dataset,
            setting,
            grid: 15,
            sigma0: csom.sigma0,
            lambda0: csom.lambda0,
            var0: csom.var0,
            lambda_omega0: csom.lambda_omega0,
            tau_sigma: csom.tau_sigma,
            tau_lambda: csom.tau_lambda,
            sigma_floor: csom.sigma_floor,
            lambda_floor: csom.lambda_floor,
            var_eps: csom.var_eps,
            som_decay: som.decay,
            bmu_decay: csom.decay,
            trials: 10,
            seed: 1,
            data_dir: PathBuf::from("data"),
            out_dir: PathBuf::from("runs"),
            jobs: 0,
        };
        cfg.grid = match (dataset, setting) {
            (Mnist, _) => 15,
            (Fmnist, _) => 25,
            (Kmnist, _) => 35,
            (Cifar10, Setting::ClassIncremental) => 100,
            (Cifar10, Setting::DomainIncremental) => 15,
        };
        if dataset == Cifar10 && setting == Setting::ClassIncremental {
            cfg.lambda0 = 0.2;
            cfg.var0 = 0.6;
            cfg.tau_sigma = 6.0;
        }
        if model == ModelKind::Som {
            // No published SOM values for CIFAR-10; it keeps the CSOM grid.
            cfg.grid = match dataset {
                Mnist => 15,
                Fmnist | Kmnist => 20,
                Cifar10 => cfg.grid,
            };
            cfg.sigma0 = som.sigma0;
            cfg.lambda0 = som.lambda0;
            cfg.tau_sigma = som.tau_sigma;
            cfg.tau_lambda = som.tau_lambda;
        }
        cfg
    }

    /// Preset chosen by the `model`, `dataset` and `setting` keys (later
    /// sources win), then every key of `file`, then every override.
    pub fn resolve(file: Option<&str>, overrides: &[(String, String)]) -> Result<Self> {
        let file_pairs = match file {
            Some(text) => parse_key_values(text)?,
            None => Vec::new(),
        };
        let all: Vec<&(String, String)> = file_pairs.iter().chain(overrides).collect();
        let last = |key: &str| all.iter().rev().find(|(k, _)| normalize(k) == key).map(|(_, v)| v.as_str());
        let model = last("model").map_or(Ok(ModelKind::Csom), ModelKind::parse)?;
        let dataset = last("dataset").map_or(Ok(DatasetKind::Mnist), DatasetKind::parse)?;
        let setting = last("setting").map_or(Ok(Setting::ClassIncremental), Setting::parse)?;
        let mut cfg = RunConfig::preset(model, dataset, setting);
        for (k, v) in all {
            cfg.set(k, v)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one field from its textual form. Keys accept `-` or `_`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = normalize(key);
        let value = value.trim();
        let real = || -> Result<f64> {
            value
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("{key}: expected a number, got '{value}'")))
        };
        let int = || -> Result<u64> {
            value
                .parse::<u64>()
                .map_err(|_| Error::Config(format!("{key}: expected a non-negative integer, got '{value}'")))
        };
        match key.as_str() {
            "model" => self.model = ModelKind::parse(value)?,
            "dataset" => self.dataset = DatasetKind::parse(value)?,
            "setting" => self.setting = Setting::parse(value)?,
            "grid" => self.grid = int()? as usize,
            "sigma0" => self.sigma0 = real()?,
            "lambda0" => self.lambda0 = real()?,
            "var0" => self.var0 = real()?,
            "lambda_omega0" => self.lambda_omega0 = real()?,
            "tau_sigma" => self.tau_sigma = real()?,
            "tau_lambda" => self.tau_lambda = real()?,
            "sigma_floor" => self.sigma_floor = real()?,
            "lambda_floor" => self.lambda_floor = real()?,
            "var_eps" => self.var_eps = real()?,
            "som_decay" => self.som_decay = DecayMode::parse(value)?,
            "bmu_decay" => self.bmu_decay = BmuDecay::parse(value)?,
            "trials" => self.trials = int()? as usize,
            "seed" => self.seed = int()?,
            "data_dir" => self.data_dir = PathBuf::from(value),
            "out_dir" => self.out_dir = PathBuf::from(value),
            "jobs" => self.jobs = int()? as usize,
            _ => return Err(Error::Config(format!("unknown key '{key}'"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid == 0 {
            return Err(Error::Config("grid must be positive".into()));
        }
        if self.trials == 0 {
            return Err(Error::Config("trials must be positive".into()));
        }
        match self.model {
            ModelKind::Som => self.som_params().validate(),
            ModelKind::Csom => self.csom_params().validate(),
        }
    }

    pub fn som_params(&self) -> SomParams {
        SomParams {
            sigma0: self.sigma0,
            lambda0: self.lambda0,
            tau_sigma: self.tau_sigma,
            tau_lambda: self.tau_lambda,
            decay: self.som_decay,
        }
    }

    pub fn csom_params(&self) -> CsomParams {
        CsomParams {
            sigma0: self.sigma0,
            lambda0: self.lambda0,
            var0: self.var0,
            lambda_omega0: self.lambda_omega0,
            tau_sigma: self.tau_sigma,
            tau_lambda: self.tau_lambda,
            sigma_floor: self.sigma_floor,
            lambda_floor: self.lambda_floor,
            var_eps: self.var_eps,
            decay: self.bmu_decay,
        }
    }
}

fn normalize(key: &str) -> String {
    key.trim().replace('-', "_")
}

/// Parses `key = value` lines. Blank lines and `#` comments are skipped.
pub fn parse_key_values(text: &str) -> Result<Vec<(String, String)>> {
    let mut out = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected 'key = value'", n + 1)))?;
        if k.trim().is_empty() {
            return Err(Error::Config(format!("line {}: empty key", n + 1)));
        }
        out.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}
