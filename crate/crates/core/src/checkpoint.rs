//! Binary model checkpoints.
//!
//! Layout, all little-endian:
//!
//! ```text
//! "CSOM1"  version:u32  K:u32  L:u32  D:u32  C:u32
//! M            D*H f64, unit-major
//! variance     D*H f64, unit-major
//! sigma        H f64
//! lambda       H f64
//! bmu counts   H u64
//! hits         C*H u64, label-major
//! step         u64
//! kind:u8      0 = classical SOM, 1 = continual SOM
//! parameters   kind-specific f64 fields, then the decay mode as u8
//! ```
//!
//! A classical SOM has no running variance or per-unit schedule; it stores
//! zeros for the variance and its current global radius and rate in every
//! `sigma` and `lambda` slot.

use std::fs;
use std::path::Path;

use crate::csom::{BmuDecay, CsomParams, CsomState};
use crate::error::{Error, Result};
use crate::eval::HitMatrix;
use crate::matrix::UnitMatrix;
use crate::model::Model;
use crate::som::{DecayMode, SomParams, SomState};
use crate::topology::GridTopology;
use crate::OnlineModel;

const MAGIC: &[u8; 5] = b"CSOM1";
pub const FORMAT_VERSION: u32 = 1;

/// A model together with the hit matrix gathered while training it.
#[derive(Debug, Clone, PartialEq)]
pub struct Checkpoint {
    pub model: Model,
    pub hits: HitMatrix,
}

impl Checkpoint {
    pub fn new(model: Model, hits: HitMatrix) -> Result<Self> {
        if hits.units() != model.weights().units() {
            return Err(Error::DimensionMismatch {
                expected: model.weights().units(),
                actual: hits.units(),
            });
        }
        Ok(Checkpoint { model, hits })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let topo = self.model.topology();
        let weights = self.model.weights();
        let h = weights.units();
        let mut w = Writer::default();
        w.0.extend_from_slice(MAGIC);
        for v in [
            FORMAT_VERSION,
            topo.rows() as u32,
            topo.cols() as u32,
            weights.dim() as u32,
            self.hits.classes() as u32,
        ] {
            w.u32(v);
        }
        w.f64s(weights.as_slice());
        match &self.model {
            Model::Csom(m) => {
                w.f64s(m.variance().as_slice());
                w.f64s(m.sigma());
                w.f64s(m.lambda());
                w.u64s(m.hits());
            }
            Model::Som(m) => {
                let (lambda_t, sigma_t) = m.decay_schedule(m.step());
                w.f64s(&vec![0.0; weights.as_slice().len()]);
                w.f64s(&vec![sigma_t; h]);
                w.f64s(&vec![lambda_t; h]);
                w.u64s(m.bmu_counts());
            }
        }
        w.u64s(self.hits.as_slice());
        match &self.model {
            Model::Csom(m) => {
                let p = m.params();
                w.u64(m.step());
                w.0.push(1);
                w.f64s(&[
                    p.sigma0,
                    p.lambda0,
                    p.var0,
                    p.lambda_omega0,
                    p.tau_sigma,
                    p.tau_lambda,
                    p.sigma_floor,
                    p.lambda_floor,
                    p.var_eps,
                ]);
                w.0.push(match p.decay {
                    BmuDecay::FromInitial => 0,
                    BmuDecay::Compounding => 1,
                });
            }
            Model::Som(m) => {
                let p = m.params();
                w.u64(m.step());
                w.0.push(0);
                w.f64s(&[p.sigma0, p.lambda0, p.tau_sigma, p.tau_lambda]);
                w.0.push(match p.decay {
                    DecayMode::Exponential => 0,
                    DecayMode::Rational => 1,
                });
            }
        }
        w.0
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { bytes, pos: 0 };
        if r.take(MAGIC.len())? != MAGIC {
            return Err(Error::BadCheckpoint("missing CSOM1 magic".into()));
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(Error::BadCheckpoint(format!("unsupported version {version}")));
        }
        let rows = r.u32()? as usize;
        let cols = r.u32()? as usize;
        let dim = r.u32()? as usize;
        let classes = r.u32()? as usize;
        let topology = GridTopology::new(rows, cols)?;
        let h = topology.unit_count();
        let n = dim
            .checked_mul(h)
            .ok_or_else(|| Error::BadCheckpoint("dimensions overflow".into()))?;

        let weights = UnitMatrix::from_unit_major(dim, h, r.f64s(n)?)?;
        let variance = UnitMatrix::from_unit_major(dim, h, r.f64s(n)?)?;
        let sigma = r.f64s(h)?;
        let lambda = r.f64s(h)?;
        let bmu_counts = r.u64s(h)?;
        let hits = HitMatrix::from_counts(classes, h, r.u64s(classes * h)?)?;
        let step = r.u64()?;
        let model = match r.u8()? {
            1 => {
                let f = r.f64s(9)?;
                let decay = match r.u8()? {
                    0 => BmuDecay::FromInitial,
                    1 => BmuDecay::Compounding,
                    other => return Err(Error::BadCheckpoint(format!("unknown decay tag {other}"))),
                };
                let params = CsomParams {
                    sigma0: f[0],
                    lambda0: f[1],
                    var0: f[2],
                    lambda_omega0: f[3],
                    tau_sigma: f[4],
                    tau_lambda: f[5],
                    sigma_floor: f[6],
                    lambda_floor: f[7],
                    var_eps: f[8],
                    decay,
                };
                Model::Csom(CsomState::from_parts(
                    topology, params, weights, variance, sigma, lambda, bmu_counts, step,
                )?)
            }
            0 => {
                let f = r.f64s(4)?;
                let decay = match r.u8()? {
                    0 => DecayMode::Exponential,
                    1 => DecayMode::Rational,
                    other => return Err(Error::BadCheckpoint(format!("unknown decay tag {other}"))),
                };
                let params = SomParams {
                    sigma0: f[0],
                    lambda0: f[1],
                    tau_sigma: f[2],
                    tau_lambda: f[3],
                    decay,
                };
                Model::Som(SomState::from_parts(topology, weights, params, step, bmu_counts)?)
            }
            other => return Err(Error::BadCheckpoint(format!("unknown model tag {other}"))),
        };
        if r.pos != bytes.len() {
            return Err(Error::BadCheckpoint(format!(
                "{} trailing bytes",
                bytes.len() - r.pos
            )));
        }
        Checkpoint::new(model, hits)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_bytes()).map_err(|e| Error::file(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::file(path, e))?;
        Self::from_bytes(&bytes)
    }
}

#[derive(Default)]
struct Writer(Vec<u8>);

impl Writer {
    fn u32(&mut self, v: u32) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }

    fn u64s(&mut self, vs: &[u64]) {
        for &v in vs {
            self.u64(v);
        }
    }

    fn f64s(&mut self, vs: &[f64]) {
        for &v in vs {
            self.0.extend_from_slice(&v.to_le_bytes());
        }
    }
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len()).ok_or(Error::Truncated {
            expected: self.pos.saturating_add(n),
            found: self.bytes.len(),
        })?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u8(&mut self) -> Result<u8> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn u64s(&mut self, n: usize) -> Result<Vec<u64>> {
        let raw = self.take(n.checked_mul(8).ok_or(Error::BadCheckpoint("length overflow".into()))?)?;
        Ok(raw.chunks_exact(8).map(|c| u64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<f64>> {
        let raw = self.take(n.checked_mul(8).ok_or(Error::BadCheckpoint("length overflow".into()))?)?;
        Ok(raw.chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect())
    }
}
