//! Dataset model shared by every pipeline stage.
//!
//! A [`Dataset`] bundles a static feature matrix, a temporal feature tensor,
//! optional label/action tensors produced by problem construction, feature
//! names, and per-instance fold assignments. Values are `f64`; missing cells
//! hold a non-finite sentinel (`NaN`) and are flagged by the observation
//! masks, which are authoritative — the sentinel is never compared
//! arithmetically.

mod loader;
mod split;

pub mod contract;

pub use loader::{load_csv, write_csv, StaticTable, TemporalRecord};
pub use split::largest_remainder_counts;

use ndarray::{Array2, Array3};

use crate::error::{Error, Result};

/// Missing-value sentinel. Masks decide observedness; this is only a marker.
pub const MISSING: f64 = f64::NAN;

/// Per-instance fold tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Fold {
    Train,
    Val,
    Test,
    Unassigned,
}

impl std::fmt::Display for Fold {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Fold::Train => "train",
            Fold::Val => "val",
            Fold::Test => "test",
            Fold::Unassigned => "unassigned",
        };
        f.write_str(s)
    }
}

/// One-shot predicts a single label vector per instance; online predicts a
/// target at every time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    OneShot,
    Online,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Classification,
    Regression,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Auc,
    Apr,
    Mse,
    Mae,
    Rmse,
}

impl Metric {
    /// auc/apr are maximized, error metrics minimized.
    pub fn maximize(self) -> bool {
        matches!(self, Metric::Auc | Metric::Apr)
    }

    pub fn is_classification(self) -> bool {
        matches!(self, Metric::Auc | Metric::Apr)
    }

    pub fn parse(name: &str) -> Result<Metric> {
        match name {
            "auc" => Ok(Metric::Auc),
            "apr" => Ok(Metric::Apr),
            "mse" => Ok(Metric::Mse),
            "mae" => Ok(Metric::Mae),
            "rmse" => Ok(Metric::Rmse),
            other => Err(Error::Parameter(format!("unknown metric '{other}'"))),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Auc => "auc",
            Metric::Apr => "apr",
            Metric::Mse => "mse",
            Metric::Mae => "mae",
            Metric::Rmse => "rmse",
        }
    }
}

/// Supervised-problem definition attached to a dataset by the problem maker.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    pub problem: ProblemKind,
    pub label_names: Vec<String>,
    pub max_seq_len: usize,
    /// Horizon window τ in recording intervals: the online label at step t is
    /// the source value at t + τ.
    pub window: usize,
    pub treatment_names: Vec<String>,
    pub task: Task,
    pub metric: Metric,
}

impl ProblemSpec {
    pub fn validate(&self) -> Result<()> {
        if self.max_seq_len == 0 {
            return Err(Error::Parameter("max_seq_len must be positive".into()));
        }
        if self.window >= self.max_seq_len {
            return Err(Error::Parameter(format!(
                "window ({}) must be smaller than max_seq_len ({})",
                self.window, self.max_seq_len
            )));
        }
        if self.label_names.is_empty() {
            return Err(Error::Parameter("at least one label name is required".into()));
        }
        let classification_metric = self.metric.is_classification();
        match self.task {
            Task::Classification if !classification_metric => Err(Error::Parameter(format!(
                "classification requires auc or apr, got {}",
                self.metric.name()
            ))),
            Task::Regression if classification_metric => Err(Error::Parameter(format!(
                "regression requires mse, mae, or rmse, got {}",
                self.metric.name()
            ))),
            _ => Ok(()),
        }
    }
}

/// Temporal feature block: values, observation mask, timestamps, and valid
/// sequence lengths. Shape `[instance][step][feature]`.
///
/// Padding steps (`t >= seq_len[n]`) are unobserved by construction; their
/// values and times hold the missing sentinel.
#[derive(Debug, Clone, PartialEq)]
pub struct TemporalTensor {
    pub values: Array3<f64>,
    pub observed: Array3<u8>,
    /// Timestamps per instance and step, in the source record's units.
    pub time: Array2<f64>,
    pub seq_len: Vec<usize>,
}

impl TemporalTensor {
    pub fn n_instances(&self) -> usize {
        self.values.shape()[0]
    }

    pub fn n_steps(&self) -> usize {
        self.values.shape()[1]
    }

    pub fn n_features(&self) -> usize {
        self.values.shape()[2]
    }

    /// Count of observed cells, i.e. mask-1 entries.
    pub fn observed_count(&self) -> usize {
        self.observed.iter().filter(|&&m| m == 1).count()
    }
}

/// Static feature block, one row per instance.
#[derive(Debug, Clone, PartialEq)]
pub struct StaticMatrix {
    pub values: Array2<f64>,
    pub observed: Array2<u8>,
}

impl StaticMatrix {
    pub fn n_instances(&self) -> usize {
        self.values.shape()[0]
    }

    pub fn n_features(&self) -> usize {
        self.values.shape()[1]
    }

    /// Static block with zero features, for datasets that are purely temporal.
    pub fn empty(n_instances: usize) -> StaticMatrix {
        StaticMatrix {
            values: Array2::zeros((n_instances, 0)),
            observed: Array2::zeros((n_instances, 0)),
        }
    }
}

/// Labels produced by problem construction. Stored `[instance][step][label]`;
/// one-shot problems use a single step.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelTensor {
    pub values: Array3<f64>,
    pub valid: Array3<u8>,
}

impl LabelTensor {
    pub fn n_labels(&self) -> usize {
        self.values.shape()[2]
    }
}

/// Interventional actions extracted from the temporal features.
///
/// Unobserved action cells are filled with 0 at extraction time (actions are
/// typically given/not-given indicators and never pass through imputation).
#[derive(Debug, Clone, PartialEq)]
pub struct ActionTensor {
    pub values: Array3<f64>,
    pub names: Vec<String>,
}

/// Category table for a static feature loaded from non-numeric strings:
/// the stored value is the index into this list.
pub type CategoryTable = Vec<String>;

/// The single object flowing through every pipeline stage.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub static_data: StaticMatrix,
    pub temporal: TemporalTensor,
    pub labels: Option<LabelTensor>,
    pub actions: Option<ActionTensor>,
    pub static_names: Vec<String>,
    pub temporal_names: Vec<String>,
    pub label_names: Vec<String>,
    /// Per static feature: the code → string table if the column was
    /// categorical in the source file.
    pub static_categories: Vec<Option<CategoryTable>>,
    pub fold: Vec<Fold>,
    pub spec: Option<ProblemSpec>,
}

impl Dataset {
    pub fn n_instances(&self) -> usize {
        self.temporal.n_instances()
    }

    pub fn n_steps(&self) -> usize {
        self.temporal.n_steps()
    }

    /// Structural invariants: matching instance counts, name-list lengths,
    /// and mask/padding consistency.
    pub fn validate(&self) -> Result<()> {
        let n = self.n_instances();
        if self.static_data.n_instances() != n {
            return Err(Error::Data(format!(
                "static rows ({}) do not match temporal instances ({n})",
                self.static_data.n_instances()
            )));
        }
        if self.static_names.len() != self.static_data.n_features() {
            return Err(Error::Data("static name list does not match feature count".into()));
        }
        if self.temporal_names.len() != self.temporal.n_features() {
            return Err(Error::Data("temporal name list does not match feature count".into()));
        }
        if self.static_categories.len() != self.static_data.n_features() {
            return Err(Error::Data("static category tables do not match feature count".into()));
        }
        if self.fold.len() != n {
            return Err(Error::Data("fold assignment does not cover every instance".into()));
        }
        if self.temporal.seq_len.len() != n {
            return Err(Error::Data("seq_len does not cover every instance".into()));
        }
        let t_max = self.n_steps();
        for (i, &len) in self.temporal.seq_len.iter().enumerate() {
            if len > t_max {
                return Err(Error::Data(format!("seq_len[{i}] = {len} exceeds step count {t_max}")));
            }
            for t in len..t_max {
                if self.temporal.observed.slice(ndarray::s![i, t, ..]).iter().any(|&m| m != 0) {
                    return Err(Error::Data(format!(
                        "instance {i} has an observed cell in padding step {t}"
                    )));
                }
            }
            let times: Vec<f64> =
                (0..len).map(|t| self.temporal.time[[i, t]]).collect();
            if times.windows(2).any(|w| !(w[0] < w[1])) {
                return Err(Error::Data(format!(
                    "instance {i} timestamps are not strictly increasing"
                )));
            }
        }
        if let Some(labels) = &self.labels {
            if self.label_names.len() != labels.n_labels() {
                return Err(Error::Data("label name list does not match label count".into()));
            }
        }
        Ok(())
    }

    /// Indices of instances with the given fold tag.
    pub fn fold_indices(&self, fold: Fold) -> Vec<usize> {
        self.fold
            .iter()
            .enumerate()
            .filter(|(_, f)| **f == fold)
            .map(|(i, _)| i)
            .collect()
    }

    /// Instances whose data may inform fitted statistics: the train fold, or
    /// every instance when no train fold has been assigned yet.
    pub fn fitting_indices(&self) -> Vec<usize> {
        let train = self.fold_indices(Fold::Train);
        if train.is_empty() {
            (0..self.n_instances()).collect()
        } else {
            train
        }
    }

    /// Materialized restriction to the given instances (in the given order).
    pub fn select_instances(&self, indices: &[usize]) -> Dataset {
        let t = self.n_steps();
        let d_t = self.temporal.n_features();
        let d_s = self.static_data.n_features();
        let m = indices.len();

        let mut values = Array3::from_elem((m, t, d_t), MISSING);
        let mut observed = Array3::zeros((m, t, d_t));
        let mut time = Array2::from_elem((m, t), MISSING);
        let mut seq_len = Vec::with_capacity(m);
        let mut s_values = Array2::from_elem((m, d_s), MISSING);
        let mut s_observed = Array2::zeros((m, d_s));
        let mut fold = Vec::with_capacity(m);

        for (row, &i) in indices.iter().enumerate() {
            values
                .slice_mut(ndarray::s![row, .., ..])
                .assign(&self.temporal.values.slice(ndarray::s![i, .., ..]));
            observed
                .slice_mut(ndarray::s![row, .., ..])
                .assign(&self.temporal.observed.slice(ndarray::s![i, .., ..]));
            time.slice_mut(ndarray::s![row, ..])
                .assign(&self.temporal.time.slice(ndarray::s![i, ..]));
            seq_len.push(self.temporal.seq_len[i]);
            s_values
                .slice_mut(ndarray::s![row, ..])
                .assign(&self.static_data.values.slice(ndarray::s![i, ..]));
            s_observed
                .slice_mut(ndarray::s![row, ..])
                .assign(&self.static_data.observed.slice(ndarray::s![i, ..]));
            fold.push(self.fold[i]);
        }

        let labels = self.labels.as_ref().map(|l| {
            let steps = l.values.shape()[1];
            let n_l = l.n_labels();
            let mut lv = Array3::from_elem((m, steps, n_l), MISSING);
            let mut lm = Array3::zeros((m, steps, n_l));
            for (row, &i) in indices.iter().enumerate() {
                lv.slice_mut(ndarray::s![row, .., ..])
                    .assign(&l.values.slice(ndarray::s![i, .., ..]));
                lm.slice_mut(ndarray::s![row, .., ..])
                    .assign(&l.valid.slice(ndarray::s![i, .., ..]));
            }
            LabelTensor { values: lv, valid: lm }
        });

        let actions = self.actions.as_ref().map(|a| {
            let d_a = a.values.shape()[2];
            let mut av = Array3::zeros((m, t, d_a));
            for (row, &i) in indices.iter().enumerate() {
                av.slice_mut(ndarray::s![row, .., ..])
                    .assign(&a.values.slice(ndarray::s![i, .., ..]));
            }
            ActionTensor { values: av, names: a.names.clone() }
        });

        Dataset {
            static_data: StaticMatrix { values: s_values, observed: s_observed },
            temporal: TemporalTensor { values, observed, time, seq_len },
            labels,
            actions,
            static_names: self.static_names.clone(),
            temporal_names: self.temporal_names.clone(),
            label_names: self.label_names.clone(),
            static_categories: self.static_categories.clone(),
            fold,
            spec: self.spec.clone(),
        }
    }

    /// Restriction to instances tagged with `fold`. An empty fold yields an
    /// empty dataset, not an error.
    pub fn slice_fold(&self, fold: Fold) -> Dataset {
        self.select_instances(&self.fold_indices(fold))
    }

    /// Assign folds by an instance-level seeded random partition. Errors if
    /// folds were already assigned; use [`Dataset::force_train_val_test_split`]
    /// to reassign.
    pub fn train_val_test_split(&mut self, prob_val: f64, prob_test: f64, seed: u64) -> Result<()> {
        if self.fold.iter().any(|f| *f != Fold::Unassigned) {
            return Err(Error::Parameter(
                "folds already assigned; reassignment must be explicitly forced".into(),
            ));
        }
        self.force_train_val_test_split(prob_val, prob_test, seed)
    }

    /// Fold assignment without the previously-unassigned check.
    pub fn force_train_val_test_split(
        &mut self,
        prob_val: f64,
        prob_test: f64,
        seed: u64,
    ) -> Result<()> {
        self.fold = split::assign_folds(self.n_instances(), prob_val, prob_test, seed)?;
        Ok(())
    }
}
