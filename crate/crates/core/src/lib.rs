//! Online self-organizing maps for unsupervised continual learning.
//!
//! Two models share one training interface ([`OnlineModel`]): the classical
//! Kohonen map ([`som::SomState`]) and the continual SOM
//! ([`csom::CsomState`]), which keeps a running variance per synapse and a
//! radius and learning rate per unit. The [`streams`] module drives either
//! one through class- or domain-incremental task sequences and fills a
//! [`eval::TaskMatrix`] using PMI label prediction.

// `!(x > 0.0)` is used deliberately so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checkpoint;
pub mod config;
pub mod csom;
pub mod data;
pub mod error;
pub mod eval;
pub mod experiment;
pub mod matrix;
pub mod model;
pub mod pgm;
pub mod som;
pub mod streams;
pub mod topology;

pub use csom::{BmuDecay, CsomParams, CsomState};
pub use data::LabeledDataset;
pub use error::{Error, Result};
pub use eval::{continual_metrics, HitMatrix, Metrics, TaskMatrix};
pub use matrix::UnitMatrix;
pub use model::Model;
pub use som::{DecayMode, SomParams, SomState};
pub use streams::TaskSequence;
pub use topology::GridTopology;

/// A map trained one sample at a time.
///
/// The model only ever sees the input vector; labels and task boundaries
/// stay outside.
pub trait OnlineModel {
    /// Consumes one sample and returns the unit that won it.
    fn train_step(&mut self, x: &[f64]) -> Result<usize>;

    fn weights(&self) -> &UnitMatrix;

    fn topology(&self) -> &GridTopology;
}
