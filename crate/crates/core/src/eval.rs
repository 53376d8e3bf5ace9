//! Label prediction from BMU hit counts, and continual-learning metrics.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::data::Sample;
use crate::error::{check_index, check_input, Error, Result};
use crate::matrix::{dot, UnitMatrix};

/// Label x unit co-occurrence counts collected during training.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HitMatrix {
    classes: usize,
    units: usize,
    // label-major: counts[l * units + h]
    counts: Vec<u64>,
}

impl HitMatrix {
    pub fn new(classes: usize, units: usize) -> Result<Self> {
        Self::from_counts(classes, units, vec![0; classes * units])
    }

    pub fn from_counts(classes: usize, units: usize, counts: Vec<u64>) -> Result<Self> {
        if classes == 0 || units == 0 {
            return Err(Error::InvalidParameter("hit matrix needs at least one class and one unit".into()));
        }
        if counts.len() != classes * units {
            return Err(Error::DimensionMismatch {
                expected: classes * units,
                actual: counts.len(),
            });
        }
        Ok(HitMatrix { classes, units, counts })
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn units(&self) -> usize {
        self.units
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.counts
    }

    pub fn get(&self, label: usize, unit: usize) -> u64 {
        self.counts[label * self.units + unit]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn unit_total(&self, unit: usize) -> u64 {
        (0..self.classes).map(|l| self.get(l, unit)).sum()
    }

    pub fn class_total(&self, label: usize) -> u64 {
        self.counts[label * self.units..(label + 1) * self.units].iter().sum()
    }

    pub fn record_hit(&mut self, label: usize, bmu: usize) -> Result<()> {
        check_index(label, self.classes)?;
        check_index(bmu, self.units)?;
        self.counts[label * self.units + bmu] += 1;
        Ok(())
    }

    /// `log(P(label | bmu) / P(label))`, or `-inf` if the pair never
    /// co-occurred.
    pub fn pmi(&self, label: usize, bmu: usize) -> Result<f64> {
        check_index(label, self.classes)?;
        check_index(bmu, self.units)?;
        let total = self.total();
        if total == 0 {
            return Err(Error::Empty("hit matrix"));
        }
        let column = self.unit_total(bmu);
        if column == 0 {
            return Err(Error::UntrainedUnit(bmu));
        }
        let joint = self.get(label, bmu);
        if joint == 0 {
            return Ok(f64::NEG_INFINITY);
        }
        let conditional = joint as f64 / column as f64;
        let prior = self.class_total(label) as f64 / total as f64;
        Ok((conditional / prior).ln())
    }

    /// Most frequent label overall, lowest index on ties.
    pub fn majority_label(&self) -> Result<usize> {
        if self.total() == 0 {
            return Err(Error::Empty("hit matrix"));
        }
        let totals: Vec<u64> = (0..self.classes).map(|l| self.class_total(l)).collect();
        Ok(argmax_by(self.classes, |a, b| totals[a].cmp(&totals[b])))
    }

    /// The label with the highest PMI for `bmu`, lowest index on ties.
    /// Units that were never hit get the majority label.
    pub fn predict_label(&self, bmu: usize) -> Result<usize> {
        check_index(bmu, self.units)?;
        let fallback = self.majority_label()?;
        Ok(self.predict_unchecked(bmu, fallback))
    }

    // Within one column, P(l | bmu) / P(l) is proportional to
    // joint(l) / class_total(l), so the argmax is decided exactly in
    // integers.
    fn predict_unchecked(&self, bmu: usize, fallback: usize) -> usize {
        if self.unit_total(bmu) == 0 {
            return fallback;
        }
        let key = |l: usize| (self.get(l, bmu) as u128, self.class_total(l) as u128);
        argmax_by(self.classes, |a, b| {
            let (ja, na) = key(a);
            let (jb, nb) = key(b);
            match (ja, jb) {
                (0, 0) => Ordering::Equal,
                (0, _) => Ordering::Less,
                (_, 0) => Ordering::Greater,
                _ => (ja * nb).cmp(&(jb * na)),
            }
        })
    }

    /// Precomputes the predicted label of every unit.
    pub fn predictor(&self) -> Result<LabelPredictor> {
        let fallback = self.majority_label()?;
        Ok(LabelPredictor {
            labels: (0..self.units).map(|h| self.predict_unchecked(h, fallback)).collect(),
        })
    }
}

fn argmax_by(n: usize, mut cmp: impl FnMut(usize, usize) -> Ordering) -> usize {
    let mut best = 0;
    for i in 1..n {
        if cmp(i, best) == Ordering::Greater {
            best = i;
        }
    }
    best
}

/// Unit to label lookup table built from a [`HitMatrix`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelPredictor {
    labels: Vec<usize>,
}

impl LabelPredictor {
    pub fn label(&self, unit: usize) -> Result<usize> {
        check_index(unit, self.labels.len())?;
        Ok(self.labels[unit])
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }
}

/// Column norms of a weight matrix, for repeated cosine queries.
#[derive(Debug, Clone)]
pub struct CosineIndex<'a> {
    weights: &'a UnitMatrix,
    norms: Vec<f64>,
}

impl<'a> CosineIndex<'a> {
    pub fn new(weights: &'a UnitMatrix) -> Self {
        let norms = weights.columns().map(|m| dot(m, m).sqrt()).collect();
        CosineIndex { weights, norms }
    }

    /// Unit with the highest cosine similarity to `x`. Zero columns never
    /// win unless every column is zero.
    pub fn bmu(&self, x: &[f64]) -> Result<usize> {
        check_input(x, self.weights.dim())?;
        let xn = dot(x, x).sqrt();
        if xn == 0.0 {
            return Err(Error::InvalidParameter("cosine similarity of a zero vector".into()));
        }
        let mut best = 0;
        let mut best_sim = f64::NEG_INFINITY;
        for (j, (m, &n)) in self.weights.columns().zip(&self.norms).enumerate() {
            let sim = if n == 0.0 {
                f64::NEG_INFINITY
            } else {
                dot(x, m) / (xn * n)
            };
            if sim > best_sim {
                best = j;
                best_sim = sim;
            }
        }
        Ok(best)
    }
}

pub fn cosine_bmu(weights: &UnitMatrix, x: &[f64]) -> Result<usize> {
    CosineIndex::new(weights).bmu(x)
}

/// Percentage of `samples` whose cosine BMU predicts the true label.
pub fn task_accuracy(weights: &UnitMatrix, hits: &HitMatrix, samples: &[Sample<'_>]) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::Empty("test set"));
    }
    if hits.units() != weights.units() {
        return Err(Error::DimensionMismatch {
            expected: weights.units(),
            actual: hits.units(),
        });
    }
    let predictor = hits.predictor()?;
    let index = CosineIndex::new(weights);
    let correct = samples
        .par_iter()
        .map(|s| Ok(usize::from(predictor.labels[index.bmu(s.features)?] == s.label)))
        .sum::<Result<usize>>()?;
    Ok(100.0 * correct as f64 / samples.len() as f64)
}

/// `T x T` accuracies: `get(task, stage)` is the accuracy (percent) on
/// `task` after training through `stage`. Entries for tasks not yet seen
/// are 0.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskMatrix {
    tasks: usize,
    // task-major: values[task * tasks + stage]
    values: Vec<f64>,
}

impl TaskMatrix {
    pub fn new(tasks: usize) -> Result<Self> {
        if tasks == 0 {
            return Err(Error::Empty("task matrix"));
        }
        Ok(TaskMatrix {
            tasks,
            values: vec![0.0; tasks * tasks],
        })
    }

    /// From stage-major rows, the layout of the exported CSV.
    pub fn from_stage_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let mut m = TaskMatrix::new(rows.len())?;
        for (stage, row) in rows.iter().enumerate() {
            if row.len() != m.tasks {
                return Err(Error::DimensionMismatch {
                    expected: m.tasks,
                    actual: row.len(),
                });
            }
            for (task, &v) in row.iter().enumerate() {
                m.set(task, stage, v)?;
            }
        }
        Ok(m)
    }

    pub fn tasks(&self) -> usize {
        self.tasks
    }

    pub fn get(&self, task: usize, stage: usize) -> f64 {
        self.values[task * self.tasks + stage]
    }

    pub fn set(&mut self, task: usize, stage: usize, accuracy: f64) -> Result<()> {
        check_index(task, self.tasks)?;
        check_index(stage, self.tasks)?;
        if !(0.0..=100.0).contains(&accuracy) {
            return Err(Error::InvalidParameter(format!("accuracy {accuracy} outside [0, 100]")));
        }
        self.values[task * self.tasks + stage] = accuracy;
        Ok(())
    }

    /// One line per stage, one column per task, two decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for stage in 0..self.tasks {
            for task in 0..self.tasks {
                if task > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{:.2}", self.get(task, stage));
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let rows = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|line| {
                line.split(',')
                    .map(|v| {
                        v.trim()
                            .parse::<f64>()
                            .map_err(|e| Error::BadRecord(format!("task matrix value '{v}': {e}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_stage_rows(&rows)
    }

    /// Copy with every entry rounded as in the CSV export.
    pub fn rounded(&self) -> Self {
        TaskMatrix {
            tasks: self.tasks,
            values: self.values.iter().map(|v| (v * 100.0).round() / 100.0).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    /// Mean final accuracy.
    pub acc: f64,
    /// Backward transfer: mean change from just-learned to final accuracy.
    pub bwt: f64,
    /// Forgetting: mean gap between final and best accuracy.
    pub fm: f64,
    /// Learning accuracy: mean accuracy right after each task.
    pub la: f64,
}

/// ACC, BWT, FM and LA of a task matrix. BWT is reported as 0 for a
/// single task.
pub fn continual_metrics(m: &TaskMatrix) -> Metrics {
    let t = m.tasks;
    let last = t - 1;
    let mean = |f: &dyn Fn(usize) -> f64, n: usize| (0..n).map(f).sum::<f64>() / n as f64;

    let acc = mean(&|i| m.get(i, last), t);
    let la = mean(&|i| m.get(i, i), t);
    let bwt = if t > 1 {
        mean(&|i| m.get(i, last) - m.get(i, i), last)
    } else {
        0.0
    };
    let fm = mean(
        &|i| {
            let best = (0..t).map(|j| m.get(i, j)).fold(f64::NEG_INFINITY, f64::max);
            (m.get(i, last) - best).abs()
        },
        t,
    );
    Metrics { acc, bwt, fm, la }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_rational::Ratio;
    use proptest::prelude::*;

    fn hits(rows: &[&[u64]]) -> HitMatrix {
        let counts = rows.iter().flat_map(|r| r.iter().copied()).collect();
        HitMatrix::from_counts(rows.len(), rows[0].len(), counts).unwrap()
    }

    #[test]
    fn record_hit_counts() {
        let mut h = HitMatrix::new(2, 4).unwrap();
        h.record_hit(0, 3).unwrap();
        assert_eq!(h.get(0, 3), 1);
        assert_eq!(h.total(), 1);
        for _ in 0..4 {
            h.record_hit(1, 3).unwrap();
        }
        h.record_hit(1, 0).unwrap();
        assert_eq!(h.get(1, 3), 4);
        assert_eq!(h.unit_total(3), 5);
        assert_eq!(h.unit_total(0), 1);
        assert!(h.record_hit(2, 0).is_err());
        assert!(h.record_hit(0, 4).is_err());
    }

    #[test]
    fn pmi_hand_values() {
        let h = hits(&[&[8, 1], &[2, 9]]);
        assert!((h.pmi(0, 0).unwrap() - (0.8f64 / 0.45).ln()).abs() < 1e-12);
        assert!((h.pmi(0, 0).unwrap() - 0.5754).abs() < 1e-4);
        assert!((h.pmi(1, 0).unwrap() + 1.0116).abs() < 1e-4);
        assert_eq!(h.predict_label(0).unwrap(), 0);
        assert_eq!(h.predict_label(1).unwrap(), 1);
    }

    #[test]
    fn pmi_zero_under_independence() {
        let h = hits(&[&[2, 4, 6], &[1, 2, 3]]);
        for l in 0..2 {
            for u in 0..3 {
                assert!(h.pmi(l, u).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn pmi_sentinels_and_fallback() {
        let h = hits(&[&[3, 0, 0], &[0, 5, 0]]);
        assert_eq!(h.pmi(1, 0).unwrap(), f64::NEG_INFINITY);
        assert!(matches!(h.pmi(0, 2), Err(Error::UntrainedUnit(2))));
        assert_eq!(h.predict_label(2).unwrap(), 1);
        assert!(matches!(
            HitMatrix::new(2, 2).unwrap().predict_label(0),
            Err(Error::Empty(_))
        ));
    }

    // Exact oracle: PMI ratio as a rational, argmax with lowest-index ties,
    // majority fallback for empty columns.
    fn oracle(h: &HitMatrix, bmu: usize) -> usize {
        let total: u64 = h.total();
        let column: u64 = h.unit_total(bmu);
        let mut best: Option<(usize, Ratio<u64>)> = None;
        if column == 0 {
            let mut mode = 0;
            for l in 1..h.classes() {
                if h.class_total(l) > h.class_total(mode) {
                    mode = l;
                }
            }
            return mode;
        }
        for l in 0..h.classes() {
            let joint = h.get(l, bmu);
            if joint == 0 {
                continue;
            }
            let r = Ratio::new(joint, column) / Ratio::new(h.class_total(l), total);
            if best.is_none_or(|(_, b)| r > b) {
                best = Some((l, r));
            }
        }
        best.map_or(0, |(l, _)| l)
    }

    #[test]
    fn predict_matches_exact_oracle_on_small_matrices() {
        for classes in 1..=3usize {
            for units in 1..=2usize {
                let cells = classes * units;
                for code in 0..4u64.pow(cells as u32) {
                    let counts: Vec<u64> = (0..cells).map(|k| (code / 4u64.pow(k as u32)) % 4).collect();
                    let h = HitMatrix::from_counts(classes, units, counts).unwrap();
                    if h.total() == 0 {
                        continue;
                    }
                    let p = h.predictor().unwrap();
                    for u in 0..units {
                        assert_eq!(p.label(u).unwrap(), oracle(&h, u), "{h:?} unit {u}");
                    }
                }
            }
        }
    }

    // The prediction for a unit depends only on that unit's column and on
    // the class totals. Enumerating every column in {0..3}^C together with
    // every reachable class total covers all C,H <= 4 matrices with counts
    // <= 3, up to the arrangement of the other columns.
    #[test]
    fn predict_matches_exact_oracle_exhaustively() {
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
                        assert_eq!(h.predict_label(0).unwrap(), oracle(&h, 0), "{h:?}");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 2_000_000);
    }

    proptest! {
        #[test]
        fn predict_matches_oracle_on_larger_shapes(
            (c, h, counts) in (3..=4usize, 3..=4usize).prop_flat_map(|(c, h)| {
                (Just(c), Just(h), proptest::collection::vec(0..=3u64, c * h))
            })
        ) {
            let m = HitMatrix::from_counts(c, h, counts).unwrap();
            prop_assume!(m.total() > 0);
            for u in 0..h {
                prop_assert_eq!(m.predict_label(u).unwrap(), oracle(&m, u));
            }
        }

        #[test]
        fn predict_invariant_under_scaling(
            counts in proptest::collection::vec(0..20u64, 12),
            k in 1..50u64,
        ) {
            let a = HitMatrix::from_counts(3, 4, counts.clone()).unwrap();
            prop_assume!(a.total() > 0);
            let b = HitMatrix::from_counts(3, 4, counts.iter().map(|c| c * k).collect()).unwrap();
            prop_assert_eq!(a.predictor().unwrap(), b.predictor().unwrap());
        }
    }

    #[test]
    fn cosine_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let w = UnitMatrix::from_unit_major(2, 2, vec![1.0, 0.0, s, s]).unwrap();
        assert_eq!(cosine_bmu(&w, &[0.9, 0.1]).unwrap(), 0);
        assert_eq!(cosine_bmu(&w, &[2.0, 2.0]).unwrap(), 1);

        let w = UnitMatrix::from_unit_major(3, 3, vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.3, 0.0, 0.2]).unwrap();
        assert_eq!(cosine_bmu(&w, &[1.0, 0.0, 0.0]).unwrap(), 2);
        assert!(cosine_bmu(&w, &[0.0, 0.0, 0.0]).is_err());
        assert!(cosine_bmu(&w, &[1.0]).is_err());
    }

    #[test]
    fn task_accuracy_fixture() {
        // unit 0 points along x, unit 1 along y; unit 0 labelled 0, unit 1 labelled 1
        let w = UnitMatrix::from_unit_major(2, 2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let h = hits(&[&[5, 0], &[0, 5]]);
        let xs = [[0.9, 0.1], [0.2, 0.8], [0.1, 0.7], [0.6, 0.5]];
        let labels = [0, 1, 1, 1];
        let samples: Vec<Sample> = xs
            .iter()
            .zip(labels)
            .map(|(x, label)| Sample { features: x, label })
            .collect();
        assert_eq!(task_accuracy(&w, &h, &samples).unwrap(), 75.0);
        assert_eq!(task_accuracy(&w, &h, &samples[..1]).unwrap(), 100.0);
        let wrong: Vec<Sample> = samples.iter().map(|s| Sample { label: 1 - s.label, ..*s }).collect();
        assert_eq!(task_accuracy(&w, &h, &wrong[1..3]).unwrap(), 0.0);
        assert!(task_accuracy(&w, &h, &[]).is_err());
    }

    #[test]
    fn metrics_without_forgetting() {
        let m = TaskMatrix::from_stage_rows(&[vec![100.0, 0.0], vec![100.0, 100.0]]).unwrap();
        let r = continual_metrics(&m);
        assert_eq!((r.acc, r.bwt, r.fm, r.la), (100.0, 0.0, 0.0, 100.0));
    }

    #[test]
    fn metrics_three_tasks_by_hand() {
        // stage rows; task 0 peaks at stage 1
        let m = TaskMatrix::from_stage_rows(&[
            vec![90.0, 0.0, 0.0],
            vec![95.0, 80.0, 0.0],
            vec![60.0, 70.0, 85.0],
        ])
        .unwrap();
        let r = continual_metrics(&m);
        assert!((r.acc - 215.0 / 3.0).abs() < 1e-12);
        // ((60 - 90) + (70 - 80)) / 2
        assert!((r.bwt + 20.0).abs() < 1e-12);
        // (|60 - 95| + |70 - 80| + 0) / 3
        assert!((r.fm - 15.0).abs() < 1e-12);
        assert!((r.la - 85.0).abs() < 1e-12);

        let flat = TaskMatrix::from_stage_rows(&[
            vec![50.0, 0.0, 0.0],
            vec![50.0, 40.0, 0.0],
            vec![50.0, 40.0, 30.0],
        ])
        .unwrap();
        let r = continual_metrics(&flat);
        assert_eq!(r.fm, 0.0);
        assert_eq!(r.bwt, 0.0);
        assert!((r.acc - 40.0).abs() < 1e-12);
    }

    #[test]
    fn metrics_single_task() {
        let mut m = TaskMatrix::new(1).unwrap();
        m.set(0, 0, 42.0).unwrap();
        let r = continual_metrics(&m);
        assert_eq!((r.acc, r.bwt, r.fm, r.la), (42.0, 0.0, 0.0, 42.0));
    }

    // Published mean task matrix of the continual map on class-incremental
    // MNIST; stages on rows.
    const MNIST_MEAN_MATRIX: [[f64; 10]; 10] = [
        [100.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [99.77, 99.89, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [99.17, 99.41, 96.91, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [98.83, 99.23, 93.31, 96.01, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [98.78, 99.22, 92.26, 94.61, 96.34, 0.0, 0.0, 0.0, 0.0, 0.0],
        [96.78, 99.07, 92.12, 84.99, 96.05, 88.98, 0.0, 0.0, 0.0, 0.0],
        [95.96, 98.5, 89.5, 84.52, 95.39, 86.19, 94.8, 0.0, 0.0, 0.0],
        [95.93, 98.5, 88.33, 83.39, 93.3, 85.32, 94.75, 92.54, 0.0, 0.0],
        [95.93, 98.41, 87.09, 81.73, 93.05, 80.09, 93.6, 92.42, 84.72, 0.0],
        [95.89, 98.41, 87.14, 81.39, 79.17, 79.53, 93.36, 80.64, 82.43, 72.37],
    ];

    #[test]
    fn metrics_on_published_mean_matrix() {
        let rows: Vec<Vec<f64>> = MNIST_MEAN_MATRIX.iter().map(|r| r.to_vec()).collect();
        let r = continual_metrics(&TaskMatrix::from_stage_rows(&rows).unwrap());
        assert!((r.acc - 85.03).abs() < 0.005, "acc {}", r.acc);
        assert!((r.bwt + 8.02).abs() < 0.01, "bwt {}", r.bwt);
        assert!((r.la - 92.26).abs() < 0.005, "la {}", r.la);
    }

    #[test]
    fn csv_round_trip_is_stage_major() {
        let mut m = TaskMatrix::new(2).unwrap();
        m.set(0, 0, 99.5).unwrap();
        m.set(0, 1, 80.123).unwrap();
        m.set(1, 1, 100.0).unwrap();
        let csv = m.to_csv();
        assert_eq!(csv, "99.50,0.00\n80.12,100.00\n");
        assert_eq!(TaskMatrix::from_csv(&csv).unwrap(), m.rounded());
        assert!(TaskMatrix::from_csv("1,2\n3\n").is_err());
        assert!(TaskMatrix::from_csv("1,x\n3,4\n").is_err());
        assert!(m.set(0, 0, 100.5).is_err());
        assert!(m.set(2, 0, 1.0).is_err());
    }

    proptest! {
        #[test]
        fn metric_ranges(values in proptest::collection::vec(0.0..=100.0f64, 16)) {
            let rows: Vec<Vec<f64>> = values.chunks(4).map(|c| c.to_vec()).collect();
            let r = continual_metrics(&TaskMatrix::from_stage_rows(&rows).unwrap());
            prop_assert!((0.0..=100.0).contains(&r.acc));
            prop_assert!((0.0..=100.0).contains(&r.la));
            prop_assert!((0.0..=100.0).contains(&r.fm));
            prop_assert!((-100.0..=100.0).contains(&r.bwt));
        }
    }
}
