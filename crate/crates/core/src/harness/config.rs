use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fusion::StrategyKind;
use crate::model::{CrowdModel, DistributionSpec};

/// A Monte Carlo experiment, read from TOML.
///
/// ```toml
/// trials = 100000
/// seed = 42
///
/// [model]
/// workers = 20
/// microtasks = 3
/// classes = 8
/// skip = { kind = "fixed", value = 0.5 }
/// reliability = { kind = "fixed", value = 0.8 }
///
/// [method]
/// mv_baseline = true
///
/// [sweep]
/// parameter = "skip"
/// values = [0.1, 0.5, 0.9]
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub trials: usize,
    pub seed: u64,
    pub model: CrowdModel,
    #[serde(default)]
    pub method: MethodConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeKind {
    Uniform,
    #[default]
    RejectWeighted,
    /// Chair–Varshney with each worker's true per-bit reliabilities.
    ChairVarshney,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategySelector {
    #[default]
    Honest,
    Oblivious,
    Expurgation,
    /// Chooses between Oblivious and Expurgation from estimated parameters.
    Adaptive,
}

impl StrategySelector {
    pub fn fixed(self) -> Option<StrategyKind> {
        match self {
            StrategySelector::Honest => Some(StrategyKind::Honest),
            StrategySelector::Oblivious => Some(StrategyKind::Oblivious),
            StrategySelector::Expurgation => Some(StrategyKind::Expurgation),
            StrategySelector::Adaptive => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self.fixed() {
            Some(kind) => kind.label(),
            None => "adaptive",
        }
    }
}

/// Where the `μ` used for the weights comes from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MuSource {
    /// Mean of the configured reliability distribution.
    #[default]
    Known,
    /// Each worker also answers `questions` gold-standard microtasks.
    Training { questions: usize },
    /// Majority vote of the task answers serves as the reference.
    Benchmark,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MethodConfig {
    pub scheme: SchemeKind,
    pub strategy: StrategySelector,
    pub mu_source: MuSource,
    /// Also score forced-response majority voting on the same crowds.
    pub mv_baseline: bool,
    /// Trials per cell used to estimate `(μ, m, α)` for the adaptive strategy.
    pub calibration_trials: usize,
    /// Fill `analytic_pc` with the exact value where one is available.
    pub analytic: bool,
    /// Method label in the report; derived from the method when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Default for MethodConfig {
    fn default() -> Self {
        Self {
            scheme: SchemeKind::default(),
            strategy: StrategySelector::default(),
            mu_source: MuSource::default(),
            mv_baseline: false,
            calibration_trials: 100,
            analytic: true,
            label: None,
        }
    }
}

impl MethodConfig {
    pub fn label(&self) -> String {
        if let Some(label) = &self.label {
            return label.clone();
        }
        match self.scheme {
            SchemeKind::Uniform => "uniform".into(),
            SchemeKind::ChairVarshney => "chair_varshney".into(),
            SchemeKind::RejectWeighted => self.strategy.label().into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    /// Fixed skip probability `p`.
    Skip,
    /// Fixed reliability `ρ`.
    Reliability,
    Workers,
    GreedyFraction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    pub values: Vec<f64>,
}

impl ExperimentConfig {
    pub fn new(model: CrowdModel, trials: usize, seed: u64) -> Self {
        Self { trials, seed, model, method: MethodConfig::default(), sweep: None }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.method.strategy == StrategySelector::Adaptive && self.method.calibration_trials == 0 {
            return Err(Error::Config("adaptive strategy needs calibration_trials >= 1".into()));
        }
        if let MuSource::Training { questions: 0 } = self.method.mu_source {
            return Err(Error::Config("training needs at least one question".into()));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(Error::Config("sweep has no values".into()));
            }
        }
        for (_, model) in self.cells()? {
            model.validate().map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// One crowd model per sweep value, in sweep order.
    pub fn cells(&self) -> Result<Vec<(Option<f64>, CrowdModel)>> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![(None, self.model.clone())]);
        };
        sweep
            .values
            .iter()
            .map(|&v| {
                let mut model = self.model.clone();
                match sweep.parameter {
                    SweepParameter::Skip => model.skip = DistributionSpec::fixed(v),
                    SweepParameter::Reliability => model.reliability = DistributionSpec::fixed(v),
                    SweepParameter::GreedyFraction => model.greedy_fraction = v,
                    SweepParameter::Workers => {
                        if v < 1.0 || v.fract() != 0.0 {
                            return Err(Error::Config(format!("worker count {v} is not a positive integer")));
                        }
                        model.workers = v as usize;
                    }
                }
                Ok((Some(v), model))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
trials = 1000
seed = 42

[model]
workers = 20
microtasks = 3
classes = 8
skip = { kind = "fixed", value = 0.5 }
reliability = { kind = "uniform", lo = 0.6, hi = 1.0 }

[method]
mv_baseline = true
mu_source = { kind = "training", questions = 5 }

[sweep]
parameter = "workers"
values = [10, 20]
"#;

    #[test]
    fn parses_and_round_trips() {
        let config = ExperimentConfig::from_toml_str(EXAMPLE).unwrap();
        assert_eq!(config.method.mu_source, MuSource::Training { questions: 5 });
        assert_eq!(config.cells().unwrap()[1].1.workers, 20);
        let again = ExperimentConfig::from_toml_str(&config.to_toml_string()).unwrap();
        assert_eq!(config, again);
    }

    #[test]
    fn rejects_unknown_fields_and_bad_values() {
        let unknown = EXAMPLE.replace("seed = 42", "seed = 42\ncolour = 1");
        assert!(matches!(ExperimentConfig::from_toml_str(&unknown), Err(Error::Config(_))));
        let bad = EXAMPLE.replace("values = [10, 20]", "values = [10.5]");
        assert!(ExperimentConfig::from_toml_str(&bad).is_err());
        let zero = EXAMPLE.replace("trials = 1000", "trials = 0");
        assert!(ExperimentConfig::from_toml_str(&zero).is_err());
        let skip = EXAMPLE.replace("value = 0.5", "value = 1.5");
        assert!(ExperimentConfig::from_toml_str(&skip).is_err());
    }
}
