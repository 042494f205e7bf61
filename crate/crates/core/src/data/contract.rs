//! The behavioral contract every pipeline stage satisfies.
//!
//! Stage components expose `fit` / `transform` (dataset in, dataset out);
//! model components expose `fit` / `predict` plus persistence. Both flavors
//! publish a [`HyperparameterSpace`] describing their searchable dimensions.
//! Calling `transform` or `predict` before `fit` is a contract error, and
//! `fit_transform(train)` must equal `fit(train)` followed by
//! `transform(train)` elementwise.
//!
//! External methods integrate by implementing one of these traits in a
//! wrapper type; nothing else in the pipeline needs to know about them.

use std::collections::BTreeMap;
use std::path::Path;

use ndarray::Array3;

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Kind and domain of one searchable dimension.
#[derive(Debug, Clone, PartialEq)]
pub enum DimensionKind {
    /// Finite ordered numeric domain.
    Discrete { domain: Vec<f64> },
    /// Interval domain; `log_scale` searches in log10 space.
    Continuous { lo: f64, hi: f64, log_scale: bool },
    /// Unordered named choices.
    Categorical { choices: Vec<String> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dimension {
    pub name: String,
    pub kind: DimensionKind,
    pub dimensionality: usize,
}

impl Dimension {
    pub fn discrete(name: &str, domain: &[f64]) -> Dimension {
        Dimension {
            name: name.to_string(),
            kind: DimensionKind::Discrete { domain: domain.to_vec() },
            dimensionality: 1,
        }
    }

    pub fn continuous(name: &str, lo: f64, hi: f64, log_scale: bool) -> Dimension {
        Dimension {
            name: name.to_string(),
            kind: DimensionKind::Continuous { lo, hi, log_scale },
            dimensionality: 1,
        }
    }

    pub fn categorical(name: &str, choices: &[&str]) -> Dimension {
        Dimension {
            name: name.to_string(),
            kind: DimensionKind::Categorical {
                choices: choices.iter().map(|c| c.to_string()).collect(),
            },
            dimensionality: 1,
        }
    }
}

/// Named searchable dimensions of a component.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HyperparameterSpace {
    pub dimensions: Vec<Dimension>,
}

impl HyperparameterSpace {
    pub fn empty() -> HyperparameterSpace {
        HyperparameterSpace { dimensions: Vec::new() }
    }

    pub fn new(dimensions: Vec<Dimension>) -> HyperparameterSpace {
        HyperparameterSpace { dimensions }
    }

    pub fn is_empty(&self) -> bool {
        self.dimensions.is_empty()
    }

    /// Domain invariants: discrete/categorical domains nonempty and
    /// duplicate-free, continuous intervals proper, dimensionality positive.
    pub fn validate(&self) -> Result<()> {
        let mut seen = std::collections::HashSet::new();
        for dim in &self.dimensions {
            if !seen.insert(dim.name.clone()) {
                return Err(Error::Parameter(format!("duplicate dimension name '{}'", dim.name)));
            }
            if dim.dimensionality == 0 {
                return Err(Error::Parameter(format!(
                    "dimension '{}' has zero dimensionality",
                    dim.name
                )));
            }
            match &dim.kind {
                DimensionKind::Discrete { domain } => {
                    if domain.is_empty() {
                        return Err(Error::Parameter(format!("dimension '{}' has empty domain", dim.name)));
                    }
                    for (a, v) in domain.iter().enumerate() {
                        if domain[..a].contains(v) {
                            return Err(Error::Parameter(format!(
                                "dimension '{}' has duplicate domain value {v}",
                                dim.name
                            )));
                        }
                    }
                }
                DimensionKind::Continuous { lo, hi, .. } => {
                    if !(lo < hi) {
                        return Err(Error::Parameter(format!(
                            "dimension '{}' interval [{lo}, {hi}] is not increasing",
                            dim.name
                        )));
                    }
                }
                DimensionKind::Categorical { choices } => {
                    if choices.is_empty() {
                        return Err(Error::Parameter(format!("dimension '{}' has no choices", dim.name)));
                    }
                    for (a, c) in choices.iter().enumerate() {
                        if choices[..a].contains(c) {
                            return Err(Error::Parameter(format!(
                                "dimension '{}' has duplicate choice '{c}'",
                                dim.name
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// One resolved hyperparameter value.
#[derive(Debug, Clone, PartialEq)]
pub enum ConfigValue {
    Number(f64),
    Choice(String),
}

impl ConfigValue {
    pub fn as_number(&self) -> Result<f64> {
        match self {
            ConfigValue::Number(v) => Ok(*v),
            ConfigValue::Choice(c) => {
                Err(Error::Parameter(format!("expected a numeric value, got choice '{c}'")))
            }
        }
    }

    pub fn as_choice(&self) -> Result<&str> {
        match self {
            ConfigValue::Choice(c) => Ok(c),
            ConfigValue::Number(v) => {
                Err(Error::Parameter(format!("expected a categorical choice, got {v}")))
            }
        }
    }
}

/// A full configuration: dimension name → value. Ordered for deterministic
/// iteration and serialization.
pub type ConfigValues = BTreeMap<String, ConfigValue>;

/// Common surface of every pipeline component.
pub trait Component {
    /// Stable component name for error messages and registries.
    fn name(&self) -> &str;

    fn is_fitted(&self) -> bool;

    /// Searchable dimensions; empty for components with nothing to tune.
    fn hyperparameter_space(&self) -> HyperparameterSpace {
        HyperparameterSpace::empty()
    }

    fn require_fitted(&self) -> Result<()> {
        if self.is_fitted() {
            Ok(())
        } else {
            Err(Error::Contract(format!("{} used before fit", self.name())))
        }
    }
}

/// Stage flavor of the contract: dataset-to-dataset transforms.
pub trait TransformComponent: Component {
    fn fit(&mut self, data: &Dataset) -> Result<()>;

    fn transform(&self, data: &Dataset) -> Result<Dataset>;

    fn fit_transform(&mut self, data: &Dataset) -> Result<Dataset> {
        self.fit(data)?;
        self.transform(data)
    }
}

/// Model flavor of the contract: dataset-to-prediction components.
///
/// Predictions are `[instance][step][label]`; one-shot problems use a single
/// step. Classification outputs are probabilities in [0, 1]; padding steps
/// emit 0 with no validity claim.
pub trait PredictorComponent: Component {
    fn fit(&mut self, data: &Dataset) -> Result<()>;

    fn predict(&self, data: &Dataset) -> Result<Array3<f64>>;

    /// Fresh unfitted clone with the same hyperparameters and a new id.
    fn clone_unfitted(&self, model_id: &str) -> Box<dyn PredictorComponent>;

    /// Same hyperparameters, new id, and a different training seed — used by
    /// ensembles that need independently-seeded members.
    fn clone_reseeded(&self, model_id: &str, seed: u64) -> Box<dyn PredictorComponent>;

    fn save(&self, path: &Path) -> Result<()>;
}
