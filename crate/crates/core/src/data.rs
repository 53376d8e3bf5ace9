//! Dataset ingestion: IDX pairs (MNIST family) and CIFAR-10 binary batches.
//!
//! Features are stored as one flat `f64` buffer, sample-major, scaled to
//! `[0, 1]`.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::error::{check_index, Error, Result};

const IDX_LABEL_MAGIC: u32 = 2049;
const IDX_IMAGE_MAGIC: u32 = 2051;
const IDX_SIDE: usize = 28;

const CIFAR_SIDE: usize = 32;
const CIFAR_PIXELS: usize = CIFAR_SIDE * CIFAR_SIDE;
const CIFAR_RECORD: usize = 1 + 3 * CIFAR_PIXELS;
const CIFAR_CLASSES: usize = 10;

/// Channel weights for RGB to gray conversion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GrayWeights {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl GrayWeights {
    /// ITU-R BT.601 luma.
    pub const BT601: GrayWeights = GrayWeights {
        r: 0.299,
        g: 0.587,
        b: 0.114,
    };
}

impl Default for GrayWeights {
    fn default() -> Self {
        GrayWeights::BT601
    }
}

/// Borrowed view of one labelled sample.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub features: &'a [f64],
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    name: String,
    dim: usize,
    classes: usize,
    features: Vec<f64>,
    labels: Vec<usize>,
}

impl LabeledDataset {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        classes: usize,
        features: Vec<f64>,
        labels: Vec<usize>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter("feature dimension must be positive".into()));
        }
        if classes == 0 {
            return Err(Error::InvalidParameter("class count must be positive".into()));
        }
        if features.len() != dim * labels.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * labels.len(),
                actual: features.len(),
            });
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        if let Some(&label) = labels.iter().find(|&&l| l >= classes) {
            return Err(Error::BadLabel { label, classes });
        }
        Ok(LabeledDataset {
            name: name.into(),
            dim,
            classes,
            features,
            labels,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.features[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn sample(&self, i: usize) -> Result<Sample<'_>> {
        check_index(i, self.len())?;
        Ok(Sample {
            features: self.features(i),
            label: self.labels[i],
        })
    }

    pub fn iter(&self) -> impl Iterator<Item = Sample<'_>> {
        self.features
            .chunks_exact(self.dim)
            .zip(&self.labels)
            .map(|(features, &label)| Sample { features, label })
    }

    pub fn class_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.classes];
        for &l in &self.labels {
            counts[l] += 1;
        }
        counts
    }
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::file(path, e))
}

fn be_u32(bytes: &[u8], offset: usize) -> Result<u32> {
    let b = bytes.get(offset..offset + 4).ok_or(Error::Truncated {
        expected: offset + 4,
        found: bytes.len(),
    })?;
    Ok(u32::from_be_bytes([b[0], b[1], b[2], b[3]]))
}

fn check_magic(bytes: &[u8], expected: u32) -> Result<()> {
    let found = be_u32(bytes, 0)?;
    if found != expected {
        return Err(Error::BadMagic { expected, found });
    }
    Ok(())
}

fn check_exact_len(bytes: &[u8], expected: usize) -> Result<()> {
    if bytes.len() != expected {
        return Err(Error::Truncated {
            expected,
            found: bytes.len(),
        });
    }
    Ok(())
}

/// Parses an IDX image file (magic 2051, 28x28) into raw pixel bytes.
pub fn parse_idx_images(bytes: &[u8]) -> Result<(usize, &[u8])> {
    check_magic(bytes, IDX_IMAGE_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    let rows = be_u32(bytes, 8)? as usize;
    let cols = be_u32(bytes, 12)? as usize;
    if rows != IDX_SIDE || cols != IDX_SIDE {
        return Err(Error::BadShape { rows, cols });
    }
    check_exact_len(bytes, 16 + count * rows * cols)?;
    Ok((count, &bytes[16..]))
}

/// Parses an IDX label file (magic 2049).
pub fn parse_idx_labels(bytes: &[u8]) -> Result<&[u8]> {
    check_magic(bytes, IDX_LABEL_MAGIC)?;
    let count = be_u32(bytes, 4)? as usize;
    check_exact_len(bytes, 8 + count)?;
    Ok(&bytes[8..])
}

/// Builds a dataset from in-memory IDX image and label files.
pub fn idx_from_bytes(name: &str, images: &[u8], labels: &[u8], classes: usize) -> Result<LabeledDataset> {
    let (count, pixels) = parse_idx_images(images)?;
    let labels = parse_idx_labels(labels)?;
    if count != labels.len() {
        return Err(Error::CountMismatch {
            images: count,
            labels: labels.len(),
        });
    }
    let features = pixels.iter().map(|&p| f64::from(p) / 255.0).collect();
    let labels = labels.iter().map(|&l| usize::from(l)).collect();
    LabeledDataset::new(name, IDX_SIDE * IDX_SIDE, classes, features, labels)
}

/// Loads an IDX image/label file pair with ten classes.
pub fn load_idx_pair(images: &Path, labels: &Path) -> Result<LabeledDataset> {
    let name = images
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    idx_from_bytes(&name, &read(images)?, &read(labels)?, 10)
}

/// Converts CIFAR-10 binary records to gray features.
pub fn cifar_from_bytes(name: &str, bytes: &[u8], weights: GrayWeights) -> Result<LabeledDataset> {
    if !bytes.len().is_multiple_of(CIFAR_RECORD) {
        return Err(Error::BadRecord(format!(
            "length {} is not a multiple of {CIFAR_RECORD}",
            bytes.len()
        )));
    }
    let n = bytes.len() / CIFAR_RECORD;
    let mut features = Vec::with_capacity(n * CIFAR_PIXELS);
    let mut labels = Vec::with_capacity(n);
    for record in bytes.chunks_exact(CIFAR_RECORD) {
        let label = usize::from(record[0]);
        if label >= CIFAR_CLASSES {
            return Err(Error::BadLabel {
                label,
                classes: CIFAR_CLASSES,
            });
        }
        labels.push(label);
        let (r, rest) = record[1..].split_at(CIFAR_PIXELS);
        let (g, b) = rest.split_at(CIFAR_PIXELS);
        features.extend(r.iter().zip(g).zip(b).map(|((&r, &g), &b)| {
            let y = weights.r * f64::from(r) + weights.g * f64::from(g) + weights.b * f64::from(b);
            (y / 255.0).clamp(0.0, 1.0)
        }));
    }
    LabeledDataset::new(name, CIFAR_PIXELS, CIFAR_CLASSES, features, labels)
}

/// Loads and concatenates CIFAR-10 batch files as grayscale.
pub fn load_cifar10_gray<P: AsRef<Path>>(paths: &[P], weights: GrayWeights) -> Result<LabeledDataset> {
    if paths.is_empty() {
        return Err(Error::Empty("CIFAR-10 batch list"));
    }
    let mut bytes = Vec::new();
    for p in paths {
        let chunk = read(p.as_ref())?;
        if chunk.len() % CIFAR_RECORD != 0 {
            return Err(Error::BadRecord(format!(
                "{}: length {} is not a multiple of {CIFAR_RECORD}",
                p.as_ref().display(),
                chunk.len()
            )));
        }
        bytes.extend_from_slice(&chunk);
    }
    cifar_from_bytes("cifar10", &bytes, weights)
}

/// Named datasets with a conventional on-disk layout under a data directory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Mnist,
    Fmnist,
    Kmnist,
    Cifar10,
}

impl DatasetKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            DatasetKind::Mnist => "mnist",
            DatasetKind::Fmnist => "fmnist",
            DatasetKind::Kmnist => "kmnist",
            DatasetKind::Cifar10 => "cifar10",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "mnist" => Ok(DatasetKind::Mnist),
            "fmnist" | "fashion-mnist" => Ok(DatasetKind::Fmnist),
            "kmnist" => Ok(DatasetKind::Kmnist),
            "cifar10" | "cifar-10" => Ok(DatasetKind::Cifar10),
            other => Err(Error::Config(format!("unknown dataset '{other}'"))),
        }
    }

    /// Loads `(train, test)` from `<data_dir>/<name>/`.
    ///
    /// IDX datasets expect `train-images-idx3-ubyte`,
    /// `train-labels-idx1-ubyte`, `t10k-images-idx3-ubyte` and
    /// `t10k-labels-idx1-ubyte`. CIFAR-10 expects `data_batch_1.bin` to
    /// `data_batch_5.bin` and `test_batch.bin`.
    pub fn load(&self, data_dir: &Path) -> Result<(LabeledDataset, LabeledDataset)> {
        let dir = data_dir.join(self.as_str());
        match self {
            DatasetKind::Cifar10 => {
                let train: Vec<_> = (1..=5).map(|i| dir.join(format!("data_batch_{i}.bin"))).collect();
                let w = GrayWeights::default();
                Ok((
                    load_cifar10_gray(&train, w)?,
                    load_cifar10_gray(&[dir.join("test_batch.bin")], w)?,
                ))
            }
            _ => {
                let pair = |prefix: &str| -> Result<LabeledDataset> {
                    let mut ds = load_idx_pair(
                        &dir.join(format!("{prefix}-images-idx3-ubyte")),
                        &dir.join(format!("{prefix}-labels-idx1-ubyte")),
                    )?;
                    ds.name = format!("{}-{prefix}", self.as_str());
                    Ok(ds)
                };
                Ok((pair("train")?, pair("t10k")?))
            }
        }
    }
}
