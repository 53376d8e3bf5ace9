//! Checks shared by the acceptance target and the integration tests. Each
//! returns `Err` with a short reason on failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use csom_core::checkpoint::Checkpoint;
use csom_core::csom::{CsomParams, CsomState};
use csom_core::data::{cifar_from_bytes, load_idx_pair, GrayWeights};
use csom_core::eval::{continual_metrics, HitMatrix, TaskMatrix};
use csom_core::streams::{run_continual, split_class_incremental};
use csom_core::{GridTopology, LabeledDataset, Model, OnlineModel, SomParams, SomState};
use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

pub fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

pub fn uniform(rng: &mut ChaCha8Rng, dim: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(lo..hi)).collect()
}

pub fn csom(rows: usize, cols: usize, dim: usize, seed: u64) -> CsomState {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    CsomState::new(GridTopology::new(rows, cols).unwrap(), dim, CsomParams::default(), &mut rng).unwrap()
}

/// Isotropic blobs around random centres in [0.2, 0.8]^dim, classes
/// interleaved.
pub fn blobs(classes: usize, per_class: usize, dim: usize, spread: f64, seed: u64) -> LabeledDataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centres: Vec<Vec<f64>> = (0..classes).map(|_| uniform(&mut rng, dim, 0.2, 0.8)).collect();
    let mut features = Vec::new();
    let mut labels = Vec::new();
    for i in 0..classes * per_class {
        let c = i % classes;
        features.extend(
            centres[c]
                .iter()
                .map(|&v| (v + rng.random_range(-spread..spread)).clamp(0.0, 1.0)),
        );
        labels.push(c);
    }
    LabeledDataset::new("blobs", dim, classes, features, labels).unwrap()
}

pub fn idx_golden() -> Check {
    let dir = golden_dir();
    let ds = load_idx_pair(&dir.join("train-images-idx3-ubyte"), &dir.join("train-labels-idx1-ubyte"))
        .map_err(|e| e.to_string())?;
    ensure!(ds.len() == 2 && ds.dim() == 784, "shape {}x{}", ds.len(), ds.dim());
    ensure!(ds.labels() == [3, 7], "labels {:?}", ds.labels());
    for r in 0..28 {
        for c in 0..28 {
            let a = ds.features(0)[r * 28 + c];
            ensure!(a == (r * 9) as f64 / 255.0, "image 0 pixel ({r},{c}) = {a}");
            let b = ds.features(1)[r * 28 + c];
            ensure!(b == if r == c { 0.0 } else { 1.0 }, "image 1 pixel ({r},{c}) = {b}");
        }
    }
    Ok("2 images, 784 features, labels [3, 7]".into())
}

pub fn cifar_golden() -> Check {
    let bytes = std::fs::read(golden_dir().join("cifar_batch.bin")).map_err(|e| e.to_string())?;
    let ds = cifar_from_bytes("golden", &bytes, GrayWeights::BT601).map_err(|e| e.to_string())?;
    ensure!(ds.len() == 3 && ds.dim() == 1024, "shape {}x{}", ds.len(), ds.dim());
    ensure!(ds.labels() == [2, 9, 0], "labels {:?}", ds.labels());
    ensure!(ds.features(0).iter().all(|&v| (v - 0.299).abs() < 1e-12), "pure red is not 0.299");
    ensure!(
        ds.features(1).iter().all(|&v| (v - 40.0 / 255.0).abs() < 1e-12),
        "gray 40 does not map to 40/255"
    );
    for (i, &v) in ds.features(2).iter().enumerate() {
        let want = 0.114 * (i % 256) as f64 / 255.0;
        ensure!((v - want).abs() < 1e-12, "blue gradient pixel {i} = {v}, want {want}");
    }
    ensure!(
        cifar_from_bytes("short", &bytes[..bytes.len() - 1], GrayWeights::BT601).is_err(),
        "truncated batch accepted"
    );
    Ok("3 records, BT.601 gray".into())
}

// Exact rational PMI argmax with lowest-index ties and a majority fallback.
fn oracle(h: &HitMatrix, bmu: usize) -> usize {
    let column = h.unit_total(bmu);
    if column == 0 {
        let mut mode = 0;
        for l in 1..h.classes() {
            if h.class_total(l) > h.class_total(mode) {
                mode = l;
            }
        }
        return mode;
    }
    let mut best: Option<(usize, Ratio<u64>)> = None;
    for l in 0..h.classes() {
        let joint = h.get(l, bmu);
        if joint == 0 {
            continue;
        }
        let r = Ratio::new(joint, column) / Ratio::new(h.class_total(l), h.total());
        if best.is_none_or(|(_, b)| r > b) {
            best = Some((l, r));
        }
    }
    best.map_or(0, |(l, _)| l)
}

/// Every C, H <= 4 matrix with counts <= 3, reduced to what a unit's
/// prediction depends on: its own column and the class totals.
pub fn pmi_oracle_exhaustive() -> Check {
    let mut checked = 0u64;
    for classes in 1..=4usize {
        for units in 1..=4usize {
            let max_rest = 3 * (units as u64 - 1);
            let rest_states = (max_rest + 1).pow(classes as u32);
            for code in 0..4u64.pow(classes as u32) {
                for rest_code in 0..rest_states {
                    let mut counts = vec![0u64; classes * units];
                    for l in 0..classes {
                        counts[l * units] = (code / 4u64.pow(l as u32)) % 4;
                        let mut rest = (rest_code / (max_rest + 1).pow(l as u32)) % (max_rest + 1);
                        for h in 1..units {
                            let c = rest.min(3);
                            counts[l * units + h] = c;
                            rest -= c;
                        }
                    }
                    let h = HitMatrix::from_counts(classes, units, counts).unwrap();
                    if h.total() == 0 {
                        continue;
                    }
                    let got = h.predict_label(0).map_err(|e| e.to_string())?;
                    ensure!(got == oracle(&h, 0), "{h:?}: predicted {got}, oracle {}", oracle(&h, 0));
                    checked += 1;
                }
            }
        }
    }
    Ok(format!("{checked} configurations"))
}

pub fn scaling_invariance() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..2000 {
        let counts: Vec<u64> = (0..12).map(|_| rng.random_range(0..6)).collect();
        let a = HitMatrix::from_counts(3, 4, counts.clone()).unwrap();
        if a.total() == 0 {
            continue;
        }
        let k = rng.random_range(2..40);
        let b = HitMatrix::from_counts(3, 4, counts.iter().map(|c| c * k).collect()).unwrap();
        ensure!(a.predictor().unwrap() == b.predictor().unwrap(), "{a:?} scaled by {k}");
    }
    Ok("2000 random matrices".into())
}

pub fn metrics_hand_built() -> Check {
    let m = TaskMatrix::from_stage_rows(&[
        vec![90.0, 0.0, 0.0],
        vec![95.0, 80.0, 0.0],
        vec![60.0, 70.0, 85.0],
    ])
    .unwrap();
    let r = continual_metrics(&m);
    let want = (215.0 / 3.0, -20.0, 15.0, 85.0);
    ensure!(
        (r.acc - want.0).abs() < 1e-12 && (r.bwt - want.1).abs() < 1e-12 && (r.fm - want.2).abs() < 1e-12 && (r.la - want.3).abs() < 1e-12,
        "got {r:?}, want {want:?}"
    );
    let m = TaskMatrix::from_stage_rows(&[
        vec![100.0, 0.0, 0.0],
        vec![100.0, 100.0, 0.0],
        vec![100.0, 100.0, 100.0],
    ])
    .unwrap();
    let r = continual_metrics(&m);
    ensure!((r.acc, r.bwt, r.fm, r.la) == (100.0, 0.0, 0.0, 100.0), "no-forgetting matrix gave {r:?}");
    Ok("two 3x3 matrices".into())
}

pub fn variance_bounded() -> Check {
    for seed in 0..20 {
        let mut m = csom(5, 5, 6, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 100);
        for _ in 0..2000 {
            m.train_step(&uniform(&mut rng, 6, 0.4, 0.6)).unwrap();
        }
        let max = m.variance().as_slice().iter().cloned().fold(0.0, f64::max);
        ensure!(max <= 0.5, "seed {seed}: variance reached {max}");
    }
    Ok("20 streams of 2000 samples, variance <= 0.5".into())
}

pub fn fixed_input_settles() -> Check {
    let mut worst = 0;
    for seed in 0..10 {
        let mut m = csom(15, 15, 4, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 50);
        let x = uniform(&mut rng, 4, 0.0, 1.0);
        let mut prev = m.weights().clone();
        let mut settled = None;
        for t in 1..=10_000 {
            m.train_step(&x).unwrap();
            let d = m.weights().frobenius_distance(&prev);
            prev = m.weights().clone();
            if d < 1e-6 {
                settled = Some(t);
                break;
            }
        }
        let t = settled.ok_or_else(|| format!("seed {seed}: update still >= 1e-6 after 1e4 steps"))?;
        worst = worst.max(t);
    }
    Ok(format!("|dM| < 1e-6 after at most {worst} steps"))
}

pub fn mask_sound_and_single_decay() -> Check {
    for seed in 0..10 {
        let mut m = csom(6, 6, 5, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed + 7);
        for step in 0..1500 {
            let x = uniform(&mut rng, 5, 0.0, 1.0);
            let before = m.clone();
            let u = m.train_step(&x).unwrap();
            let mask = before.build_update_field(u).unwrap().mask();
            for (j, &inside) in mask.iter().enumerate() {
                let bits = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(p, q)| p.to_bits() == q.to_bits());
                ensure!(
                    inside
                        || (bits(m.weights().column(j), before.weights().column(j))
                            && bits(m.variance().column(j), before.variance().column(j))),
                    "seed {seed} step {step}: masked-out unit {j} changed"
                );
            }
            let changed: Vec<usize> = (0..36)
                .filter(|&h| m.sigma()[h] != before.sigma()[h] || m.lambda()[h] != before.lambda()[h])
                .collect();
            ensure!(
                changed.iter().all(|&h| h == u) && (before.hits()[u] >= 20 || changed == [u]),
                "seed {seed} step {step}: decayed {changed:?}, bmu {u}"
            );
        }
    }
    Ok("10 runs of 1500 steps".into())
}

fn run_blobs(model: Model, data: &LabeledDataset, seed: u64) -> (TaskMatrix, Vec<u8>) {
    let seq = split_class_incremental(data, data, seed).unwrap();
    let mut model = model;
    let mut hits = HitMatrix::new(data.classes(), model.weights().units()).unwrap();
    let m = run_continual(&mut model, &seq, &mut hits).unwrap();
    (m, Checkpoint::new(model, hits).unwrap().to_bytes())
}

pub fn determinism() -> Check {
    let data = blobs(4, 80, 9, 0.1, 1);
    let a = run_blobs(csom(5, 5, 9, 42).into(), &data, 3);
    let b = run_blobs(csom(5, 5, 9, 42).into(), &data, 3);
    ensure!(a == b, "continual SOM runs differ");
    let som = || {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        Model::from(SomState::new(GridTopology::square(5).unwrap(), 9, SomParams::default(), &mut rng).unwrap())
    };
    ensure!(run_blobs(som(), &data, 3) == run_blobs(som(), &data, 3), "classical SOM runs differ");
    Ok("identical task matrices and checkpoint bytes".into())
}

pub fn checkpoint_round_trip() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = dir.path().join("m.ckpt");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let stream: Vec<Vec<f64>> = (0..600).map(|_| uniform(&mut rng, 6, 0.0, 1.0)).collect();
    let mut straight = csom(4, 4, 6, 1);
    let mut hits = HitMatrix::new(3, 16).unwrap();
    for (i, x) in stream[..300].iter().enumerate() {
        let u = straight.train_step(x).unwrap();
        hits.record_hit(i % 3, u).unwrap();
    }
    let ck = Checkpoint::new(straight.clone().into(), hits).unwrap();
    ck.save(&path).map_err(|e| e.to_string())?;
    let loaded = Checkpoint::load(&path).map_err(|e| e.to_string())?;
    ensure!(loaded == ck, "loaded state differs");
    ensure!(loaded.to_bytes() == ck.to_bytes(), "re-encoded bytes differ");
    let mut resumed = loaded.model;
    for x in &stream[300..] {
        straight.train_step(x).unwrap();
        resumed.train_step(x).unwrap();
    }
    ensure!(resumed == Model::from(straight), "resumed training diverged");
    Ok("bit-exact state, identical continuation".into())
}

/// Mean per-step update norm over the units that end up owned by task A,
/// measured while training task A and then task B.
pub fn stability_plasticity(seed: u64) -> Result<(f64, f64), String> {
    let data = blobs(2, 1500, 16, 0.08, seed);
    let seq = split_class_incremental(&data, &data, seed).map_err(|e| e.to_string())?;
    let mut m = csom(6, 6, 16, seed);
    let h = 36;
    let mut hits = HitMatrix::new(2, h).unwrap();
    // per task, per step, per unit squared update norm
    let mut per_step: Vec<Vec<Vec<f64>>> = vec![Vec::new(), Vec::new()];
    for (task, steps) in per_step.iter_mut().enumerate() {
        for s in seq.train_samples(task).map_err(|e| e.to_string())? {
            let before = m.weights().clone();
            let u = m.train_step(s.features).map_err(|e| e.to_string())?;
            hits.record_hit(s.label, u).unwrap();
            steps.push(
                (0..h)
                    .map(|j| {
                        let a = before.column(j);
                        let b = m.weights().column(j);
                        a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum()
                    })
                    .collect(),
            );
        }
    }
    let owned: Vec<usize> = (0..h).filter(|&j| hits.get(0, j) > hits.get(1, j)).collect();
    if owned.is_empty() {
        return Err("task A owns no units".into());
    }
    let mean = |steps: &[Vec<f64>]| {
        steps.iter().map(|s| owned.iter().map(|&j| s[j]).sum::<f64>().sqrt()).sum::<f64>() / steps.len() as f64
    };
    Ok((mean(&per_step[0]), mean(&per_step[1])))
}
