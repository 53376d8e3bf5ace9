//! C ABI over `csom-core`.
//!
//! Models live behind an opaque [`CsomModel`] handle. Every fallible call
//! returns a [`CsomStatus`]; on failure, [`csom_last_error`] describes the
//! most recent error on the calling thread. Panics never cross the
//! boundary; they surface as `CSOM_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;
use std::slice;

use csom_core::checkpoint::Checkpoint;
use csom_core::csom::{BmuDecay, CsomParams, CsomState};
use csom_core::eval::{continual_metrics, CosineIndex, HitMatrix, TaskMatrix};
use csom_core::som::{DecayMode, SomParams, SomState};
use csom_core::{Error, GridTopology, Model, OnlineModel};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsomStatus {
    Ok = 0,
    NullPointer = 1,
    Index = 2,
    Dimension = 3,
    NonFinite = 4,
    Parameter = 5,
    Empty = 6,
    Io = 7,
    Format = 8,
    Unsupported = 9,
    Panic = 10,
}

impl From<&Error> for CsomStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::IndexOutOfRange { .. } | Error::BadLabel { .. } => CsomStatus::Index,
            Error::DimensionMismatch { .. } => CsomStatus::Dimension,
            Error::NonFinite => CsomStatus::NonFinite,
            Error::InvalidParameter(_) | Error::Config(_) => CsomStatus::Parameter,
            Error::Empty(_) | Error::UntrainedUnit(_) | Error::MissingClass(_) => CsomStatus::Empty,
            Error::File { .. } | Error::Io(_) => CsomStatus::Io,
            Error::BadMagic { .. }
            | Error::Truncated { .. }
            | Error::CountMismatch { .. }
            | Error::BadShape { .. }
            | Error::BadRecord(_)
            | Error::BadCheckpoint(_) => CsomStatus::Format,
        }
    }
}

/// Continual SOM hyperparameters. `bmu_decay` is 0 for decay from the
/// initial values, 1 for compounding decay.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CsomCsomParams {
    pub sigma0: f64,
    pub lambda0: f64,
    pub var0: f64,
    pub lambda_omega0: f64,
    pub tau_sigma: f64,
    pub tau_lambda: f64,
    pub sigma_floor: f64,
    pub lambda_floor: f64,
    pub var_eps: f64,
    pub bmu_decay: u32,
}

/// Classical SOM hyperparameters. `decay` is 0 for exponential, 1 for
/// rational.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CsomSomParams {
    pub sigma0: f64,
    pub lambda0: f64,
    pub tau_sigma: f64,
    pub tau_lambda: f64,
    pub decay: u32,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct CsomMetrics {
    pub acc: f64,
    pub bwt: f64,
    pub fm: f64,
    pub la: f64,
}

/// Opaque model handle: a map plus its label hit counts.
pub struct CsomModel {
    model: Model,
    hits: HitMatrix,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Fail(CsomStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(CsomStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(CsomStatus::NullPointer, format!("{what} is null"))
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CsomStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsomStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            CsomStatus::Panic
        }
    }
}

unsafe fn model_ref<'a>(m: *const CsomModel) -> Result<&'a CsomModel, Fail> {
    m.as_ref().ok_or_else(|| null("model"))
}

unsafe fn model_mut<'a>(m: *mut CsomModel) -> Result<&'a mut CsomModel, Fail> {
    m.as_mut().ok_or_else(|| null("model"))
}

unsafe fn input<'a>(x: *const f64, len: usize) -> Result<&'a [f64], Fail> {
    if x.is_null() {
        return Err(null("input"));
    }
    Ok(slice::from_raw_parts(x, len))
}

unsafe fn output<'a, T>(p: *mut T, len: usize, needed: usize) -> Result<&'a mut [T], Fail> {
    if p.is_null() {
        return Err(null("output buffer"));
    }
    if len < needed {
        return Err(Fail(CsomStatus::Dimension, format!("output buffer holds {len}, need {needed}")));
    }
    Ok(slice::from_raw_parts_mut(p, needed))
}

unsafe fn write<T>(p: *mut T, v: T) -> Result<(), Fail> {
    if p.is_null() {
        return Err(null("output pointer"));
    }
    p.write(v);
    Ok(())
}

unsafe fn path<'a>(p: *const c_char) -> Result<&'a Path, Fail> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(Path::new)
        .map_err(|_| Fail(CsomStatus::Parameter, "path is not UTF-8".into()))
}

fn publish(out: *mut *mut CsomModel, model: Model, hits: HitMatrix) -> Result<(), Fail> {
    let handle = Box::into_raw(Box::new(CsomModel { model, hits }));
    unsafe { write(out, handle) }.inspect_err(|_| drop(unsafe { Box::from_raw(handle) }))
}

/// Message for the last failed call on this thread, or null. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn csom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub extern "C" fn csom_csom_params_default() -> CsomCsomParams {
    let p = CsomParams::default();
    CsomCsomParams {
        sigma0: p.sigma0,
        lambda0: p.lambda0,
        var0: p.var0,
        lambda_omega0: p.lambda_omega0,
        tau_sigma: p.tau_sigma,
        tau_lambda: p.tau_lambda,
        sigma_floor: p.sigma_floor,
        lambda_floor: p.lambda_floor,
        var_eps: p.var_eps,
        bmu_decay: 0,
    }
}

#[no_mangle]
pub extern "C" fn csom_som_params_default() -> CsomSomParams {
    let p = SomParams::default();
    CsomSomParams {
        sigma0: p.sigma0,
        lambda0: p.lambda0,
        tau_sigma: p.tau_sigma,
        tau_lambda: p.tau_lambda,
        decay: 1,
    }
}

/// Creates a continual SOM on a `rows x cols` grid for `dim`-dimensional
/// inputs and `classes` labels, weights seeded by `seed`.
///
/// # Safety
/// `params` must be null (defaults) or point to a valid struct; `out` must
/// be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn csom_new_csom(
    rows: usize,
    cols: usize,
    dim: usize,
    classes: usize,
    params: *const CsomCsomParams,
    seed: u64,
    out: *mut *mut CsomModel,
) -> CsomStatus {
    guard(|| {
        let p = params.as_ref().copied().unwrap_or_else(|| csom_csom_params_default());
        let decay = match p.bmu_decay {
            0 => BmuDecay::FromInitial,
            1 => BmuDecay::Compounding,
            other => return Err(Fail(CsomStatus::Parameter, format!("unknown bmu_decay {other}"))),
        };
        let params = CsomParams {
            sigma0: p.sigma0,
            lambda0: p.lambda0,
            var0: p.var0,
            lambda_omega0: p.lambda_omega0,
            tau_sigma: p.tau_sigma,
            tau_lambda: p.tau_lambda,
            sigma_floor: p.sigma_floor,
            lambda_floor: p.lambda_floor,
            var_eps: p.var_eps,
            decay,
        };
        let topology = GridTopology::new(rows, cols)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = CsomState::new(topology, dim, params, &mut rng)?;
        publish(out, model.into(), HitMatrix::new(classes, topology.unit_count())?)
    })
}

/// Creates a classical SOM. See [`csom_new_csom`].
///
/// # Safety
/// As for [`csom_new_csom`].
#[no_mangle]
pub unsafe extern "C" fn csom_new_som(
    rows: usize,
    cols: usize,
    dim: usize,
    classes: usize,
    params: *const CsomSomParams,
    seed: u64,
    out: *mut *mut CsomModel,
) -> CsomStatus {
    guard(|| {
        let p = params.as_ref().copied().unwrap_or_else(|| csom_som_params_default());
        let decay = match p.decay {
            0 => DecayMode::Exponential,
            1 => DecayMode::Rational,
            other => return Err(Fail(CsomStatus::Parameter, format!("unknown decay {other}"))),
        };
        let params = SomParams {
            sigma0: p.sigma0,
            lambda0: p.lambda0,
            tau_sigma: p.tau_sigma,
            tau_lambda: p.tau_lambda,
            decay,
        };
        let topology = GridTopology::new(rows, cols)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let model = SomState::new(topology, dim, params, &mut rng)?;
        publish(out, model.into(), HitMatrix::new(classes, topology.unit_count())?)
    })
}

/// Releases a model. Null is ignored.
///
/// # Safety
/// `model` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn csom_free(model: *mut CsomModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `model` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn csom_unit_count(model: *const CsomModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.weights().units())
}

/// # Safety
/// `model` must be a valid handle.
#[no_mangle]
pub unsafe extern "C" fn csom_dim(model: *const CsomModel) -> usize {
    model.as_ref().map_or(0, |m| m.model.dim())
}

/// One unsupervised update with `x[0..len]`; writes the winning unit to
/// `bmu` if it is not null.
///
/// # Safety
/// `model` must be valid and `x` must point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn csom_train_step(model: *mut CsomModel, x: *const f64, len: usize, bmu: *mut usize) -> CsomStatus {
    guard(|| {
        let m = model_mut(model)?;
        let u = m.model.train_step(input(x, len)?)?;
        if !bmu.is_null() {
            bmu.write(u);
        }
        Ok(())
    })
}

/// Counts one co-occurrence of `label` with unit `bmu` for prediction.
///
/// # Safety
/// `model` must be valid.
#[no_mangle]
pub unsafe extern "C" fn csom_record_hit(model: *mut CsomModel, label: usize, bmu: usize) -> CsomStatus {
    guard(|| Ok(model_mut(model)?.hits.record_hit(label, bmu)?))
}

/// Unit whose prototype has the highest cosine similarity to `x`.
///
/// # Safety
/// `model` must be valid, `x` must point to `len` doubles, `out` must be
/// valid.
#[no_mangle]
pub unsafe extern "C" fn csom_cosine_bmu(model: *const CsomModel, x: *const f64, len: usize, out: *mut usize) -> CsomStatus {
    guard(|| {
        let m = model_ref(model)?;
        write(out, CosineIndex::new(m.model.weights()).bmu(input(x, len)?)?)
    })
}

/// Predicted label of `x`: PMI argmax over the hits of its cosine BMU.
///
/// # Safety
/// As for [`csom_cosine_bmu`].
#[no_mangle]
pub unsafe extern "C" fn csom_predict(model: *const CsomModel, x: *const f64, len: usize, out: *mut usize) -> CsomStatus {
    guard(|| {
        let m = model_ref(model)?;
        let u = CosineIndex::new(m.model.weights()).bmu(input(x, len)?)?;
        write(out, m.hits.predict_label(u)?)
    })
}

/// Copies the prototypes, unit-major (`units * dim` doubles).
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn csom_copy_weights(model: *const CsomModel, out: *mut f64, len: usize) -> CsomStatus {
    guard(|| {
        let w = model_ref(model)?.model.weights().as_slice();
        output(out, len, w.len())?.copy_from_slice(w);
        Ok(())
    })
}

/// Copies the running variance, unit-major. Continual SOM only.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn csom_copy_variance(model: *const CsomModel, out: *mut f64, len: usize) -> CsomStatus {
    guard(|| {
        let m = model_ref(model)?;
        let c = m
            .model
            .as_csom()
            .ok_or_else(|| Fail(CsomStatus::Unsupported, "classical SOM has no running variance".into()))?;
        let v = c.variance().as_slice();
        output(out, len, v.len())?.copy_from_slice(v);
        Ok(())
    })
}

/// Draws one sample from unit `unit` of a continual SOM into `out`.
///
/// # Safety
/// `out` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn csom_sample(model: *const CsomModel, unit: usize, seed: u64, out: *mut f64, len: usize) -> CsomStatus {
    guard(|| {
        let m = model_ref(model)?;
        let c = m
            .model
            .as_csom()
            .ok_or_else(|| Fail(CsomStatus::Unsupported, "classical SOM cannot be sampled".into()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = c.sample_prototype(unit, &mut rng)?;
        output(out, len, x.len())?.copy_from_slice(&x);
        Ok(())
    })
}

/// Writes the model and its hits as a checkpoint file.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn csom_save(model: *const CsomModel, path_utf8: *const c_char) -> CsomStatus {
    guard(|| {
        let m = model_ref(model)?;
        Checkpoint::new(m.model.clone(), m.hits.clone())?.save(path(path_utf8)?)?;
        Ok(())
    })
}

/// Loads a checkpoint into a new handle.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn csom_load(path_utf8: *const c_char, out: *mut *mut CsomModel) -> CsomStatus {
    guard(|| {
        let ck = Checkpoint::load(path(path_utf8)?)?;
        publish(out, ck.model, ck.hits)
    })
}

/// ACC, BWT, FM and LA of a `tasks x tasks` accuracy matrix given
/// stage-major: `acc[stage * tasks + task]`.
///
/// # Safety
/// `acc` must point to `tasks * tasks` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn csom_metrics(acc: *const f64, tasks: usize, out: *mut CsomMetrics) -> CsomStatus {
    guard(|| {
        let n = tasks
            .checked_mul(tasks)
            .ok_or_else(|| Fail(CsomStatus::Parameter, "task count overflows".into()))?;
        let values = input(acc, n)?;
        let rows: Vec<Vec<f64>> = values.chunks(tasks.max(1)).map(|r| r.to_vec()).collect();
        let r = continual_metrics(&TaskMatrix::from_stage_rows(&rows)?);
        write(
            out,
            CsomMetrics {
                acc: r.acc,
                bwt: r.bwt,
                fm: r.fm,
                la: r.la,
            },
        )
    })
}
