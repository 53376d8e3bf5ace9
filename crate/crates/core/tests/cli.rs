use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use csom_core::{continual_metrics, TaskMatrix};

const SIDE: usize = 28;

fn idx_images(images: &[Vec<u8>]) -> Vec<u8> {
    let mut out = vec![0, 0, 8, 3];
    for v in [images.len(), SIDE, SIDE] {
        out.extend_from_slice(&(v as u32).to_be_bytes());
    }
    for img in images {
        out.extend_from_slice(img);
    }
    out
}

fn idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = vec![0, 0, 8, 1];
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

// Class c lights a 10-pixel run starting at 20c with a little per-sample jitter.
fn synthetic(per_class: usize, salt: usize) -> (Vec<Vec<u8>>, Vec<u8>) {
    let mut images = Vec::new();
    let mut labels = Vec::new();
    for i in 0..per_class {
        for c in 0..10u8 {
            let mut img = vec![10u8; SIDE * SIDE];
            for p in 0..10 {
                img[(c as usize * 20 + p) % (SIDE * SIDE)] = 200 + ((i * 7 + p + salt) % 50) as u8;
            }
            images.push(img);
            labels.push(c);
        }
    }
    (images, labels)
}

fn write_dataset(root: &Path) {
    let dir = root.join("mnist");
    fs::create_dir_all(&dir).unwrap();
    let (tr, trl) = synthetic(12, 0);
    let (te, tel) = synthetic(4, 3);
    fs::write(dir.join("train-images-idx3-ubyte"), idx_images(&tr)).unwrap();
    fs::write(dir.join("train-labels-idx1-ubyte"), idx_labels(&trl)).unwrap();
    fs::write(dir.join("t10k-images-idx3-ubyte"), idx_images(&te)).unwrap();
    fs::write(dir.join("t10k-labels-idx1-ubyte"), idx_labels(&tel)).unwrap();
}

fn csom(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_csom")).args(args).output().unwrap()
}

fn train(data: &Path, out: &Path) -> Output {
    let o = csom(&[
        "train",
        "--dataset",
        "mnist",
        "--grid",
        "5",
        "--trials",
        "2",
        "--seed",
        "3",
        "--jobs",
        "2",
        "--data-dir",
        data.to_str().unwrap(),
        "--out-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    o
}

#[test]
fn train_is_deterministic_and_summary_recomputable() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    write_dataset(&data);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    train(&data, &a);
    train(&data, &b);

    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(a.join("summary.json")).unwrap()).unwrap();
    let mut accs = Vec::new();
    for seed in [3, 4] {
        let stem = format!("csom_mnist_class-incremental_seed{seed}");
        let csv = fs::read_to_string(a.join(format!("{stem}.csv"))).unwrap();
        assert_eq!(csv, fs::read_to_string(b.join(format!("{stem}.csv"))).unwrap());
        assert_eq!(
            fs::read(a.join(format!("{stem}.ckpt"))).unwrap(),
            fs::read(b.join(format!("{stem}.ckpt"))).unwrap()
        );
        let m = continual_metrics(&TaskMatrix::from_csv(&csv).unwrap());
        let trial = summary["trials"]
            .as_array()
            .unwrap()
            .iter()
            .find(|t| t["seed"] == seed)
            .unwrap();
        for (key, v) in [("acc", m.acc), ("bwt", m.bwt), ("fm", m.fm), ("la", m.la)] {
            assert!((trial[key].as_f64().unwrap() - v).abs() < 1e-9, "{key}");
        }
        accs.push(m.acc);
    }
    let mean = accs.iter().sum::<f64>() / 2.0;
    assert!((summary["acc"]["mean"].as_f64().unwrap() - mean).abs() < 1e-9);
}

#[test]
fn eval_export_and_sample() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    write_dataset(&data);
    let out = tmp.path().join("runs");
    train(&data, &out);
    let ckpt = out.join("csom_mnist_class-incremental_seed3.ckpt");
    let ckpt = ckpt.to_str().unwrap();

    let o = csom(&["eval", "--checkpoint", ckpt, "--data-dir", data.to_str().unwrap(), "--seed", "3"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["task_accuracy"].as_array().unwrap().len(), 10);

    let pgm = tmp.path().join("protos.pgm");
    let o = csom(&["export-prototypes", "--checkpoint", ckpt, "--out", pgm.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let bytes = fs::read(&pgm).unwrap();
    assert!(bytes.starts_with(b"P5"));

    let s0 = tmp.path().join("s0");
    let o = csom(&["sample", "--checkpoint", ckpt, "--unit", "0", "-n", "0", "--out-dir", s0.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(!s0.exists());

    let (s1, s2) = (tmp.path().join("s1"), tmp.path().join("s2"));
    for dir in [&s1, &s2] {
        let o = csom(&[
            "sample", "--checkpoint", ckpt, "--unit", "7", "-n", "3", "--seed", "9", "--out-dir",
            dir.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for i in 0..3 {
        let name = format!("unit7_sample{i}.pgm");
        assert_eq!(fs::read(s1.join(&name)).unwrap(), fs::read(s2.join(&name)).unwrap());
    }
}

#[test]
fn errors_are_reported_with_kind() {
    let tmp = tempfile::tempdir().unwrap();
    let o = csom(&["train", "--data-dir", tmp.path().to_str().unwrap()]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("error: kind=io msg="), "{err}");

    let o = csom(&["train", "--grid", "0"]);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: kind=config"));

    let bad = tmp.path().join("bad.ckpt");
    fs::write(&bad, b"not a checkpoint").unwrap();
    let o = csom(&["export-prototypes", "--checkpoint", bad.to_str().unwrap(), "--out", "x.pgm"]);
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error: kind=bad_checkpoint"));
}
