//! Continual self-organizing map.
//!
//! Every unit carries a prototype (column of `weights`), a per-synapse
//! running variance, its own radius and learning rate, and a BMU count.
//! A training step:
//!
//! 1. picks the BMU with a variance-normalised squared distance,
//! 2. builds a hard-masked update field around it from the BMU's radius,
//! 3. pulls masked units toward the input, each at its own learning rate,
//! 4. blends the running variance of masked units with the squared
//!    residual, using a blend factor that grows with grid distance,
//! 5. decays only the BMU's radius and learning rate as a function of its
//!    BMU count.
//!
//! Units outside the mask are never touched, so their prototypes and
//! variances are bit-identical across the step.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check_index, check_input, Error, Result};
use crate::matrix::UnitMatrix;
use crate::som::find_bmu;
use crate::topology::GridTopology;
use crate::OnlineModel;

/// Learning rate at which the update field is considered extinguished.
const FIELD_EXTINCTION: f64 = 1e-8;

/// How the BMU's radius and learning rate shrink with its hit count `n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum BmuDecay {
    /// `sigma_u = sigma0 * exp(-n / tau_sigma)`, same for `lambda_u`.
    #[default]
    FromInitial,
    /// `sigma_u <- sigma_u * exp(-n / tau_sigma)`, compounding across hits.
    Compounding,
}

impl BmuDecay {
    pub fn as_str(&self) -> &'static str {
        match self {
            BmuDecay::FromInitial => "from-initial",
            BmuDecay::Compounding => "compounding",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "from-initial" => Ok(BmuDecay::FromInitial),
            "compounding" => Ok(BmuDecay::Compounding),
            other => Err(Error::Config(format!("unknown bmu decay '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CsomParams {
    pub sigma0: f64,
    pub lambda0: f64,
    /// Initial running variance of every synapse.
    pub var0: f64,
    /// Variance blend factor at the BMU, in (0.5, 1).
    pub lambda_omega0: f64,
    pub tau_sigma: f64,
    pub tau_lambda: f64,
    pub sigma_floor: f64,
    pub lambda_floor: f64,
    /// Lower bound on the standard deviation used as a distance divisor.
    pub var_eps: f64,
    pub decay: BmuDecay,
}

impl Default for CsomParams {
    fn default() -> Self {
        CsomParams {
            sigma0: 1.5,
            lambda0: 0.07,
            var0: 0.5,
            lambda_omega0: 0.9,
            tau_sigma: 8.0,
            tau_lambda: 45.0,
            sigma_floor: 1e-3,
            lambda_floor: 1e-4,
            var_eps: 1e-6,
            decay: BmuDecay::FromInitial,
        }
    }
}

impl CsomParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sigma0", self.sigma0),
            ("tau_sigma", self.tau_sigma),
            ("tau_lambda", self.tau_lambda),
            ("sigma_floor", self.sigma_floor),
            ("var_eps", self.var_eps),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("lambda0", self.lambda0), ("lambda_floor", self.lambda_floor)] {
            if !(v > FIELD_EXTINCTION && v.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must exceed {FIELD_EXTINCTION}, got {v}"
                )));
            }
        }
        if !(self.var0 >= 0.0 && self.var0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "var0 must be non-negative, got {}",
                self.var0
            )));
        }
        if !(self.lambda_omega0 > 0.5 && self.lambda_omega0 < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "lambda_omega0 must lie in (0.5, 1), got {}",
                self.lambda_omega0
            )));
        }
        Ok(())
    }
}

/// `1 / (2 sigma^2)`, the inverse width of the update field.
pub fn compute_delta(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("radius must be positive, got {sigma}")));
    }
    Ok(1.0 / (2.0 * sigma * sigma))
}

/// Grid distance at which the update field `lambda * exp(-d * delta)` would
/// fall to `1e-8`.
pub fn compute_tau1(delta: f64, lambda: f64) -> Result<f64> {
    if !(delta > 0.0) || !(lambda > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tau1 needs positive delta and lambda, got {delta}, {lambda}"
        )));
    }
    Ok(-(FIELD_EXTINCTION / lambda).ln() / delta)
}

/// Variance blend factor for a unit at grid distance `d` from the BMU,
/// clamped to [0, 1].
pub fn blend_rate(lambda_omega0: f64, d: f64, tau1: f64) -> f64 {
    let logistic = if d == 0.0 {
        0.5
    } else {
        1.0 / (1.0 + (-d / tau1).exp())
    };
    ((lambda_omega0 - 0.5) + logistic).clamp(0.0, 1.0)
}

/// The masked update field around one BMU.
///
/// Only units with mask 1 are stored. Each stored coefficient is
/// `lambda_j * exp(-d(u, j) * delta)`; the coefficient is the same for every
/// input dimension, so a single scalar per unit describes the full field.
#[derive(Debug, Clone, PartialEq)]
pub struct UpdateField {
    pub bmu: usize,
    pub delta: f64,
    pub tau1: f64,
    /// Masked-in units in ascending order; always contains `bmu`.
    pub units: Vec<usize>,
    /// Grid distance from `bmu`, aligned with `units`.
    pub distances: Vec<f64>,
    /// Update coefficient, aligned with `units`.
    pub coefficients: Vec<f64>,
    unit_count: usize,
}

impl UpdateField {
    pub fn mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.unit_count];
        for &j in &self.units {
            mask[j] = true;
        }
        mask
    }

    /// Field coefficient for unit `j` (zero when masked out).
    pub fn coefficient(&self, j: usize) -> f64 {
        self.units
            .binary_search(&j)
            .map(|k| self.coefficients[k])
            .unwrap_or(0.0)
    }
}

/// `x - M[:, j]` for every masked unit, taken before any update in the step.
#[derive(Debug, Clone, PartialEq)]
pub struct Residuals {
    dim: usize,
    input: Vec<f64>,
    units: Vec<usize>,
    values: Vec<f64>,
}

impl Residuals {
    pub fn units(&self) -> &[usize] {
        &self.units
    }

    pub fn for_unit(&self, k: usize) -> &[f64] {
        &self.values[k * self.dim..(k + 1) * self.dim]
    }
}

#[derive(Debug, Clone)]
pub struct CsomState {
    topology: GridTopology,
    params: CsomParams,
    weights: UnitMatrix,
    variance: UnitMatrix,
    // max(sqrt(variance), var_eps), kept in sync with `variance`
    spread: UnitMatrix,
    sigma: Vec<f64>,
    lambda: Vec<f64>,
    hits: Vec<u64>,
    step: u64,
}

impl PartialEq for CsomState {
    fn eq(&self, other: &Self) -> bool {
        self.topology == other.topology
            && self.params == other.params
            && self.weights == other.weights
            && self.variance == other.variance
            && self.sigma == other.sigma
            && self.lambda == other.lambda
            && self.hits == other.hits
            && self.step == other.step
    }
}

impl CsomState {
    pub fn new<R: Rng + ?Sized>(
        topology: GridTopology,
        dim: usize,
        params: CsomParams,
        rng: &mut R,
    ) -> Result<Self> {
        let h = topology.unit_count();
        let weights = UnitMatrix::uniform(dim, h, rng);
        let variance = UnitMatrix::filled(dim, h, params.var0);
        Self::from_parts(
            topology,
            params,
            weights,
            variance,
            vec![params.sigma0; h],
            vec![params.lambda0; h],
            vec![0; h],
            0,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        topology: GridTopology,
        params: CsomParams,
        weights: UnitMatrix,
        variance: UnitMatrix,
        sigma: Vec<f64>,
        lambda: Vec<f64>,
        hits: Vec<u64>,
        step: u64,
    ) -> Result<Self> {
        params.validate()?;
        let h = topology.unit_count();
        let dim = weights.dim();
        if dim == 0 {
            return Err(Error::InvalidParameter("input dimension must be positive".into()));
        }
        for len in [weights.units(), variance.units(), sigma.len(), lambda.len(), hits.len()] {
            if len != h {
                return Err(Error::DimensionMismatch {
                    expected: h,
                    actual: len,
                });
            }
        }
        if variance.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: variance.dim(),
            });
        }
        if variance.as_slice().iter().any(|v| !(*v >= 0.0)) {
            return Err(Error::InvalidParameter("running variance must be non-negative".into()));
        }
        if sigma.iter().chain(&lambda).any(|v| !(*v > 0.0)) {
            return Err(Error::InvalidParameter("radii and rates must be positive".into()));
        }
        let mut spread = UnitMatrix::filled(dim, h, 0.0);
        for j in 0..h {
            refresh_spread(spread.column_mut(j), variance.column(j), params.var_eps);
        }
        Ok(CsomState {
            topology,
            params,
            weights,
            variance,
            spread,
            sigma,
            lambda,
            hits,
            step,
        })
    }

    pub fn params(&self) -> &CsomParams {
        &self.params
    }

    pub fn dim(&self) -> usize {
        self.weights.dim()
    }

    pub fn variance(&self) -> &UnitMatrix {
        &self.variance
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Per-unit BMU counts.
    pub fn hits(&self) -> &[u64] {
        &self.hits
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    /// `d_j = sum_i (x_i - M[i,j])^2 / max(sqrt(var[i,j]), eps)`.
    pub fn variance_distance(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_input(x, self.dim())?;
        Ok(self
            .weights
            .columns()
            .zip(self.spread.columns())
            .map(|(m, s)| {
                x.iter()
                    .zip(m)
                    .zip(s)
                    .map(|((xi, mi), si)| {
                        let r = xi - mi;
                        r * r / si
                    })
                    .sum()
            })
            .collect())
    }

    pub fn build_update_field(&self, u: usize) -> Result<UpdateField> {
        check_index(u, self.topology.unit_count())?;
        let sigma_u = self.sigma[u];
        let delta = compute_delta(sigma_u)?;
        let tau1 = compute_tau1(delta, self.lambda[u])?;
        let mut units = Vec::new();
        let mut distances = Vec::new();
        let mut coefficients = Vec::new();
        self.topology.for_each_within(u, sigma_u, |j, d| {
            units.push(j);
            distances.push(d);
            coefficients.push(self.lambda[j] * (-d * delta).exp());
        });
        Ok(UpdateField {
            bmu: u,
            delta,
            tau1,
            units,
            distances,
            coefficients,
            unit_count: self.topology.unit_count(),
        })
    }

    pub fn residuals(&self, x: &[f64], field: &UpdateField) -> Result<Residuals> {
        check_input(x, self.dim())?;
        let mut values = Vec::with_capacity(field.units.len() * x.len());
        for &j in &field.units {
            values.extend(x.iter().zip(self.weights.column(j)).map(|(xi, mi)| xi - mi));
        }
        Ok(Residuals {
            dim: x.len(),
            input: x.to_vec(),
            units: field.units.clone(),
            values,
        })
    }

    /// `M += phi * (x - M)` over the masked units; bumps the BMU's count.
    pub fn weight_update(&mut self, field: &UpdateField, residuals: &Residuals) -> Result<()> {
        self.check_pair(field, residuals)?;
        for (k, (&j, &phi)) in field.units.iter().zip(&field.coefficients).enumerate() {
            if phi == 0.0 {
                continue;
            }
            if phi == 1.0 {
                // a full step lands on the input exactly
                self.weights.column_mut(j).copy_from_slice(&residuals.input);
                continue;
            }
            for (m, r) in self.weights.column_mut(j).iter_mut().zip(residuals.for_unit(k)) {
                *m += phi * r;
            }
        }
        self.hits[field.bmu] += 1;
        Ok(())
    }

    /// Blend factor for every unit: the clamped distance-modulated value
    /// inside the mask, exactly 1 (variance frozen) outside it.
    pub fn variance_blend_rates(&self, field: &UpdateField) -> Vec<f64> {
        let mut rates = vec![1.0; self.topology.unit_count()];
        for (&j, &d) in field.units.iter().zip(&field.distances) {
            rates[j] = blend_rate(self.params.lambda_omega0, d, field.tau1);
        }
        rates
    }

    /// `var = r * var + (1 - r) * residual^2` for masked units.
    pub fn variance_update(&mut self, rates: &[f64], residuals: &Residuals) -> Result<()> {
        if rates.len() != self.topology.unit_count() {
            return Err(Error::DimensionMismatch {
                expected: self.topology.unit_count(),
                actual: rates.len(),
            });
        }
        if residuals.dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: residuals.dim,
            });
        }
        for (k, &j) in residuals.units.iter().enumerate() {
            let r = rates[j];
            if r == 1.0 {
                continue;
            }
            for (v, e) in self.variance.column_mut(j).iter_mut().zip(residuals.for_unit(k)) {
                *v = r * *v + (1.0 - r) * e * e;
            }
            refresh_spread(self.spread.column_mut(j), self.variance.column(j), self.params.var_eps);
        }
        Ok(())
    }

    /// Shrinks the radius and learning rate of unit `u` according to its
    /// current BMU count, never below the configured floors.
    pub fn decay_bmu_params(&mut self, u: usize) -> Result<()> {
        check_index(u, self.topology.unit_count())?;
        let n = self.hits[u] as f64;
        let p = &self.params;
        let (sigma_base, lambda_base) = match p.decay {
            BmuDecay::FromInitial => (p.sigma0, p.lambda0),
            BmuDecay::Compounding => (self.sigma[u], self.lambda[u]),
        };
        let sigma = (sigma_base * (-n / p.tau_sigma).exp()).max(p.sigma_floor);
        let lambda = (lambda_base * (-n / p.tau_lambda).exp()).max(p.lambda_floor);
        self.sigma[u] = sigma.min(self.sigma[u]);
        self.lambda[u] = lambda.min(self.lambda[u]);
        Ok(())
    }

    /// One online update. Returns the BMU.
    pub fn train_step(&mut self, x: &[f64]) -> Result<usize> {
        let distances = self.variance_distance(x)?;
        let u = find_bmu(&distances)?;
        let field = self.build_update_field(u)?;
        let residuals = self.residuals(x, &field)?;
        self.weight_update(&field, &residuals)?;
        let rates = self.variance_blend_rates(&field);
        self.variance_update(&rates, &residuals)?;
        self.decay_bmu_params(u)?;
        self.step += 1;
        Ok(u)
    }

    /// Draws one sample from unit `u`'s diagonal Gaussian, clamped to [0, 1].
    pub fn sample_prototype<R: Rng + ?Sized>(&self, u: usize, rng: &mut R) -> Result<Vec<f64>> {
        check_index(u, self.topology.unit_count())?;
        self.weights
            .column(u)
            .iter()
            .zip(self.variance.column(u))
            .map(|(&mean, &var)| {
                let std = var.sqrt();
                let draw = if std == 0.0 {
                    mean
                } else {
                    Normal::new(mean, std)
                        .map_err(|e| Error::InvalidParameter(e.to_string()))?
                        .sample(rng)
                };
                Ok(draw.clamp(0.0, 1.0))
            })
            .collect()
    }

    fn check_pair(&self, field: &UpdateField, residuals: &Residuals) -> Result<()> {
        check_index(field.bmu, self.topology.unit_count())?;
        if residuals.units != field.units || residuals.dim != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: field.units.len() * self.dim(),
                actual: residuals.values.len(),
            });
        }
        Ok(())
    }
}

fn refresh_spread(spread: &mut [f64], variance: &[f64], eps: f64) {
    for (s, v) in spread.iter_mut().zip(variance) {
        *s = v.sqrt().max(eps);
    }
}

impl OnlineModel for CsomState {
    fn train_step(&mut self, x: &[f64]) -> Result<usize> {
        CsomState::train_step(self, x)
    }

    fn weights(&self) -> &UnitMatrix {
        &self.weights
    }

    fn topology(&self) -> &GridTopology {
        &self.topology
    }
}
