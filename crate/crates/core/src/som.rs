//! Online classical Kohonen map.
//!
//! One global learning rate and radius, both decayed with the step counter.
//! Each step picks the L2 best matching unit and pulls it and its grid
//! neighbours (strictly inside the current radius) toward the input with a
//! Gaussian weight.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_index, check_input, Error, Result};
use crate::matrix::{squared_l2, UnitMatrix};
use crate::topology::GridTopology;
use crate::OnlineModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DecayMode {
    /// `x0 * exp(-t / tau)`
    Exponential,
    /// `x0 / (1 + t * exp(t / tau))`
    #[default]
    Rational,
}

impl DecayMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            DecayMode::Exponential => "exponential",
            DecayMode::Rational => "rational",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "exponential" | "exp" => Ok(DecayMode::Exponential),
            "rational" => Ok(DecayMode::Rational),
            other => Err(Error::Config(format!("unknown decay mode '{other}'"))),
        }
    }

    fn apply(&self, initial: f64, t: u64, tau: f64) -> f64 {
        let t = t as f64;
        match self {
            DecayMode::Exponential => initial * (-t / tau).exp(),
            DecayMode::Rational => {
                if t == 0.0 {
                    return initial;
                }
                // 1 + t*e^{t/tau} overflows long before the quotient stops
                // being representable, so divide in log space.
                let log_growth = t / tau + t.ln();
                let log_denominator = if log_growth > 30.0 {
                    log_growth + (-log_growth).exp().ln_1p()
                } else {
                    log_growth.exp().ln_1p()
                };
                initial * (-log_denominator).exp()
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SomParams {
    pub sigma0: f64,
    pub lambda0: f64,
    pub tau_sigma: f64,
    pub tau_lambda: f64,
    pub decay: DecayMode,
}

impl Default for SomParams {
    fn default() -> Self {
        SomParams {
            sigma0: 0.6,
            lambda0: 0.07,
            tau_sigma: 8.0,
            tau_lambda: 45.0,
            decay: DecayMode::Rational,
        }
    }
}

impl SomParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("sigma0", self.sigma0),
            ("lambda0", self.lambda0),
            ("tau_sigma", self.tau_sigma),
            ("tau_lambda", self.tau_lambda),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(())
    }

    /// Learning rate and radius in effect at step `t`.
    pub fn schedule(&self, t: u64) -> (f64, f64) {
        (
            self.decay.apply(self.lambda0, t, self.tau_lambda),
            self.decay.apply(self.sigma0, t, self.tau_sigma),
        )
    }
}

/// Index of the smallest entry; ties go to the lowest index.
pub fn find_bmu(distances: &[f64]) -> Result<usize> {
    let (first, rest) = distances.split_first().ok_or(Error::Empty("distance vector"))?;
    let mut best = 0;
    let mut best_d = *first;
    for (j, &d) in rest.iter().enumerate() {
        if d < best_d {
            best = j + 1;
            best_d = d;
        }
    }
    Ok(best)
}

/// Gaussian neighbourhood coefficient `exp(-d^2 / (2 sigma^2))`.
pub fn neighborhood_weight(topology: &GridTopology, u: usize, v: usize, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidParameter(format!("sigma must be positive, got {sigma}")));
    }
    topology.grid_distance(u, v)?;
    Ok(gaussian(topology.squared_distance_unchecked(u, v), sigma))
}

#[inline]
fn gaussian(d2: f64, sigma: f64) -> f64 {
    if d2 == 0.0 {
        1.0
    } else {
        (-d2 / (2.0 * sigma * sigma)).exp()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SomState {
    topology: GridTopology,
    weights: UnitMatrix,
    params: SomParams,
    step: u64,
    bmu_counts: Vec<u64>,
}

impl SomState {
    pub fn new<R: Rng + ?Sized>(
        topology: GridTopology,
        dim: usize,
        params: SomParams,
        rng: &mut R,
    ) -> Result<Self> {
        let weights = UnitMatrix::uniform(dim, topology.unit_count(), rng);
        Self::from_parts(topology, weights, params, 0, vec![0; topology.unit_count()])
    }

    pub fn from_parts(
        topology: GridTopology,
        weights: UnitMatrix,
        params: SomParams,
        step: u64,
        bmu_counts: Vec<u64>,
    ) -> Result<Self> {
        params.validate()?;
        if weights.dim() == 0 {
            return Err(Error::InvalidParameter("input dimension must be positive".into()));
        }
        let h = topology.unit_count();
        if weights.units() != h || bmu_counts.len() != h {
            return Err(Error::DimensionMismatch {
                expected: h,
                actual: weights.units(),
            });
        }
        Ok(SomState {
            topology,
            weights,
            params,
            step,
            bmu_counts,
        })
    }

    pub fn params(&self) -> &SomParams {
        &self.params
    }

    pub fn step(&self) -> u64 {
        self.step
    }

    pub fn bmu_counts(&self) -> &[u64] {
        &self.bmu_counts
    }

    pub fn decay_schedule(&self, t: u64) -> (f64, f64) {
        self.params.schedule(t)
    }

    pub fn l2_distances(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_input(x, self.weights.dim())?;
        Ok(self.weights.columns().map(|m| squared_l2(x, m).sqrt()).collect())
    }

    pub fn neighborhood_weight(&self, u: usize, v: usize, sigma: f64) -> Result<f64> {
        check_index(u, self.topology.unit_count())?;
        neighborhood_weight(&self.topology, u, v, sigma)
    }

    /// One online update. Returns the best matching unit.
    pub fn train_step(&mut self, x: &[f64]) -> Result<usize> {
        let distances = self.l2_distances(x)?;
        let u = find_bmu(&distances)?;
        let (lambda_t, sigma_t) = self.params.schedule(self.step);

        let weights = &mut self.weights;
        let topo = self.topology;
        // sigma_t can underflow to zero late in a run; the BMU itself is
        // still updated with coefficient 1.
        topo.for_each_within(u, sigma_t, |v, _| {
            let rate = lambda_t * if v == u { 1.0 } else { gaussian(topo.squared_distance_unchecked(u, v), sigma_t) };
            if rate != 0.0 {
                for (m, &xi) in weights.column_mut(v).iter_mut().zip(x) {
                    *m += rate * (xi - *m);
                }
            }
        });

        self.bmu_counts[u] += 1;
        self.step += 1;
        Ok(u)
    }
}

impl OnlineModel for SomState {
    fn train_step(&mut self, x: &[f64]) -> Result<usize> {
        SomState::train_step(self, x)
    }

    fn weights(&self) -> &UnitMatrix {
        &self.weights
    }

    fn topology(&self) -> &GridTopology {
        &self.topology
    }
}
