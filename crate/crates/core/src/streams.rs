//! Task sequences and the single-pass continual training loop.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::data::{LabeledDataset, Sample};
use crate::error::{check_index, Error, Result};
use crate::eval::{task_accuracy, HitMatrix, TaskMatrix};
use crate::OnlineModel;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Labeling {
    /// Labels are the dataset's own classes.
    Original,
    /// Class `c` becomes `c % 2`.
    Binary,
}

impl Labeling {
    fn map(self, label: usize) -> usize {
        match self {
            Labeling::Original => label,
            Labeling::Binary => label % 2,
        }
    }
}

/// Indices into the train and test datasets that make up one task.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Task {
    pub classes: Vec<usize>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// An ordered list of tasks over borrowed train and test datasets.
#[derive(Debug, Clone)]
pub struct TaskSequence<'a> {
    train: &'a LabeledDataset,
    test: &'a LabeledDataset,
    tasks: Vec<Task>,
    labeling: Labeling,
    seed: u64,
}

impl<'a> TaskSequence<'a> {
    /// Builds a sequence from explicit class groups. Each task's training
    /// indices are shuffled with a generator seeded by `seed`.
    pub fn from_class_groups(
        train: &'a LabeledDataset,
        test: &'a LabeledDataset,
        groups: &[Vec<usize>],
        labeling: Labeling,
        seed: u64,
    ) -> Result<Self> {
        if train.dim() != test.dim() {
            return Err(Error::DimensionMismatch {
                expected: train.dim(),
                actual: test.dim(),
            });
        }
        if train.classes() != test.classes() {
            return Err(Error::InvalidParameter(format!(
                "train has {} classes, test has {}",
                train.classes(),
                test.classes()
            )));
        }
        if groups.is_empty() {
            return Err(Error::Empty("task list"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut tasks = Vec::with_capacity(groups.len());
        for classes in groups {
            for &c in classes {
                check_index(c, train.classes())?;
            }
            let select = |ds: &LabeledDataset| -> Vec<usize> {
                (0..ds.len()).filter(|&i| classes.contains(&ds.label(i))).collect()
            };
            let mut train_idx = select(train);
            let test_idx = select(test);
            for &c in classes {
                let present = |ds: &LabeledDataset, idx: &[usize]| idx.iter().any(|&i| ds.label(i) == c);
                if !present(train, &train_idx) || !present(test, &test_idx) {
                    return Err(Error::MissingClass(c));
                }
            }
            train_idx.shuffle(&mut rng);
            tasks.push(Task {
                classes: classes.clone(),
                train: train_idx,
                test: test_idx,
            });
        }
        Ok(TaskSequence {
            train,
            test,
            tasks,
            labeling,
            seed,
        })
    }

    pub fn tasks(&self) -> &[Task] {
        &self.tasks
    }

    pub fn len(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tasks.is_empty()
    }

    pub fn labeling(&self) -> Labeling {
        self.labeling
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dim(&self) -> usize {
        self.train.dim()
    }

    /// Number of distinct labels the model is evaluated on.
    pub fn label_count(&self) -> usize {
        match self.labeling {
            Labeling::Original => self.train.classes(),
            Labeling::Binary => 2,
        }
    }

    /// Training samples of task `k`, in stream order, with mapped labels.
    pub fn train_samples(&self, k: usize) -> Result<Vec<Sample<'a>>> {
        check_index(k, self.tasks.len())?;
        Ok(self.view(self.train, &self.tasks[k].train))
    }

    pub fn test_samples(&self, k: usize) -> Result<Vec<Sample<'a>>> {
        check_index(k, self.tasks.len())?;
        Ok(self.view(self.test, &self.tasks[k].test))
    }

    fn view(&self, ds: &'a LabeledDataset, idx: &[usize]) -> Vec<Sample<'a>> {
        idx.iter()
            .map(|&i| Sample {
                features: ds.features(i),
                label: self.labeling.map(ds.label(i)),
            })
            .collect()
    }
}

/// One task per class, in ascending class order.
pub fn split_class_incremental<'a>(
    train: &'a LabeledDataset,
    test: &'a LabeledDataset,
    seed: u64,
) -> Result<TaskSequence<'a>> {
    let groups: Vec<Vec<usize>> = (0..train.classes()).map(|c| vec![c]).collect();
    TaskSequence::from_class_groups(train, test, &groups, Labeling::Original, seed)
}

/// Five tasks of class pairs `(2k, 2k+1)`, relabelled to 0 and 1.
pub fn split_domain_incremental<'a>(
    train: &'a LabeledDataset,
    test: &'a LabeledDataset,
    seed: u64,
) -> Result<TaskSequence<'a>> {
    if train.classes() != 10 {
        return Err(Error::InvalidParameter(format!(
            "domain-incremental split needs 10 classes, got {}",
            train.classes()
        )));
    }
    let groups: Vec<Vec<usize>> = (0..5).map(|k| vec![2 * k, 2 * k + 1]).collect();
    TaskSequence::from_class_groups(train, test, &groups, Labeling::Binary, seed)
}

/// Streams every task once through `model`, recording hits, and evaluates
/// all tasks seen so far after each one.
pub fn run_continual<M: OnlineModel + ?Sized>(
    model: &mut M,
    sequence: &TaskSequence<'_>,
    hits: &mut HitMatrix,
) -> Result<TaskMatrix> {
    run_continual_with(model, sequence, hits, |_, _| {})
}

/// Like [`run_continual`], calling `after_stage(stage, matrix)` once each
/// task has been trained and evaluated.
pub fn run_continual_with<M: OnlineModel + ?Sized>(
    model: &mut M,
    sequence: &TaskSequence<'_>,
    hits: &mut HitMatrix,
    mut after_stage: impl FnMut(usize, &TaskMatrix),
) -> Result<TaskMatrix> {
    if model.weights().dim() != sequence.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.weights().dim(),
            actual: sequence.dim(),
        });
    }
    if hits.units() != model.weights().units() || hits.classes() != sequence.label_count() {
        return Err(Error::InvalidParameter(format!(
            "hit matrix is {}x{}, expected {}x{}",
            hits.classes(),
            hits.units(),
            sequence.label_count(),
            model.weights().units()
        )));
    }
    let tests = (0..sequence.len())
        .map(|k| sequence.test_samples(k))
        .collect::<Result<Vec<_>>>()?;
    let mut matrix = TaskMatrix::new(sequence.len())?;
    for stage in 0..sequence.len() {
        for sample in sequence.train_samples(stage)? {
            let bmu = model.train_step(sample.features)?;
            hits.record_hit(sample.label, bmu)?;
        }
        for (task, test) in tests.iter().enumerate().take(stage + 1) {
            matrix.set(task, stage, task_accuracy(model.weights(), hits, test)?)?;
        }
        after_stage(stage, &matrix);
    }
    Ok(matrix)
}
