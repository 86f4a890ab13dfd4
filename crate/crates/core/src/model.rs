//! Tasks, workers and answers, and the stochastic crowd that produces them.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::greedy_count;

/// One response to a binary microtask. `Skip` is the reject symbol λ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AnswerSymbol {
    Zero,
    One,
    Skip,
}

impl AnswerSymbol {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            AnswerSymbol::Zero
        } else {
            AnswerSymbol::One
        }
    }

    pub fn bit(self) -> Option<u8> {
        match self {
            AnswerSymbol::Zero => Some(0),
            AnswerSymbol::One => Some(1),
            AnswerSymbol::Skip => None,
        }
    }

    pub fn is_definitive(self) -> bool {
        self != AnswerSymbol::Skip
    }
}

/// A worker's ordered responses to the `N` microtasks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnswerWord {
    pub worker_id: usize,
    pub symbols: Vec<AnswerSymbol>,
}

impl AnswerWord {
    pub fn new(worker_id: usize, symbols: Vec<AnswerSymbol>) -> Self {
        Self { worker_id, symbols }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Number of non-skip symbols.
    pub fn n_definitive(&self) -> usize {
        self.symbols.iter().filter(|s| s.is_definitive()).count()
    }

    /// True when the word has no skips at all.
    pub fn is_full_length(&self) -> bool {
        self.symbols.iter().all(|s| s.is_definitive())
    }
}

/// Per-microtask skip and reliability probabilities of one worker.
#[derive(Clone, Debug, PartialEq)]
pub struct WorkerProfile {
    pub skip_probs: Vec<f64>,
    pub reliabilities: Vec<f64>,
    pub greedy: bool,
}

impl WorkerProfile {
    /// A greedy worker answers everything and is right half the time.
    pub fn greedy(microtasks: usize) -> Self {
        Self {
            skip_probs: vec![0.0; microtasks],
            reliabilities: vec![0.5; microtasks],
            greedy: true,
        }
    }

    pub fn honest(skip_probs: Vec<f64>, reliabilities: Vec<f64>) -> Self {
        Self {
            skip_probs,
            reliabilities,
            greedy: false,
        }
    }

    pub fn microtasks(&self) -> usize {
        self.skip_probs.len()
    }
}

/// Distribution of a per-microtask probability across the crowd.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSpec {
    Fixed { value: f64 },
    Uniform { lo: f64, hi: f64 },
}

impl DistributionSpec {
    pub fn fixed(value: f64) -> Self {
        DistributionSpec::Fixed { value }
    }

    pub fn uniform(lo: f64, hi: f64) -> Self {
        DistributionSpec::Uniform { lo, hi }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            DistributionSpec::Fixed { value } => value,
            DistributionSpec::Uniform { lo, hi } => 0.5 * (lo + hi),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DistributionSpec::Fixed { value } if !(0.0..=1.0).contains(&value) => Err(
                Error::InvalidModel(format!("fixed probability {value} outside [0, 1]")),
            ),
            DistributionSpec::Uniform { lo, hi } if !(0.0 <= lo && lo <= hi && hi <= 1.0) => Err(
                Error::InvalidModel(format!("uniform bounds ({lo}, {hi}) must satisfy 0 <= lo <= hi <= 1")),
            ),
            _ => Ok(()),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            DistributionSpec::Fixed { value } => value,
            DistributionSpec::Uniform { lo, hi } => {
                if hi > lo {
                    lo + (hi - lo) * rng.random::<f64>()
                } else {
                    lo
                }
            }
        }
    }
}

/// Population parameters of a crowd.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CrowdModel {
    /// Number of workers `W`.
    pub workers: usize,
    /// Number of binary microtasks `N`.
    pub microtasks: usize,
    /// Number of classes `M`.
    pub classes: usize,
    /// Skip probability distribution; its mean is `m`.
    pub skip: DistributionSpec,
    /// Reliability distribution of definitive answers; its mean is `μ`.
    pub reliability: DistributionSpec,
    /// Fraction `α` of greedy workers.
    #[serde(default)]
    pub greedy_fraction: f64,
}

impl CrowdModel {
    pub fn new(workers: usize, classes: usize, skip: DistributionSpec, reliability: DistributionSpec) -> Self {
        Self {
            workers,
            microtasks: min_microtasks(classes),
            classes,
            skip,
            reliability,
            greedy_fraction: 0.0,
        }
    }

    pub fn with_greedy_fraction(mut self, alpha: f64) -> Self {
        self.greedy_fraction = alpha;
        self
    }

    pub fn with_microtasks(mut self, microtasks: usize) -> Self {
        self.microtasks = microtasks;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.workers == 0 {
            return Err(Error::InvalidModel("at least one worker is required".into()));
        }
        if self.classes < 2 {
            return Err(Error::InvalidModel("at least two classes are required".into()));
        }
        let needed = min_microtasks(self.classes);
        if self.microtasks < needed {
            return Err(Error::InvalidModel(format!(
                "{} classes need at least {needed} microtasks, got {}",
                self.classes, self.microtasks
            )));
        }
        if self.microtasks > 63 {
            return Err(Error::InvalidModel("at most 63 microtasks are supported".into()));
        }
        if !(0.0..=1.0).contains(&self.greedy_fraction) {
            return Err(Error::InvalidModel(format!(
                "greedy fraction {} outside [0, 1]",
                self.greedy_fraction
            )));
        }
        self.skip.validate()?;
        self.reliability.validate()
    }

    /// `round(W·α)`; these are the first workers of every sampled crowd.
    pub fn greedy_workers(&self) -> usize {
        greedy_count(self.workers, self.greedy_fraction)
    }

    pub fn mean_skip(&self) -> f64 {
        self.skip.mean()
    }

    pub fn mean_reliability(&self) -> f64 {
        self.reliability.mean()
    }
}

/// `ceil(log2 M)`, at least 1.
pub fn min_microtasks(classes: usize) -> usize {
    let mut n = 1;
    while (1usize << n) < classes {
        n += 1;
    }
    n
}

/// The ground-truth class and its binary code (most significant bit first).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthWord {
    pub class_index: usize,
    pub bits: Vec<u8>,
}

/// A fused class decision. Codewords whose value is `>= M` name no class
/// and always count as misclassification.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassDecision {
    Class(usize),
    InvalidCodeword,
}

impl ClassDecision {
    pub fn class(self) -> Option<usize> {
        match self {
            ClassDecision::Class(c) => Some(c),
            ClassDecision::InvalidCodeword => None,
        }
    }
}

pub fn encode_class(class_index: usize, microtasks: usize) -> Result<TruthWord> {
    if microtasks == 0 || microtasks > 63 || class_index >= (1usize << microtasks) {
        return Err(Error::InvalidParameter(format!(
            "class {class_index} does not fit in {microtasks} bits"
        )));
    }
    let bits = (0..microtasks)
        .map(|i| ((class_index >> (microtasks - 1 - i)) & 1) as u8)
        .collect();
    Ok(TruthWord { class_index, bits })
}

pub fn decode_class(bits: &[u8], classes: usize) -> ClassDecision {
    let value = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b as usize & 1));
    if value < classes {
        ClassDecision::Class(value)
    } else {
        ClassDecision::InvalidCodeword
    }
}

/// Draws the true class uniformly over the `M` valid codewords.
pub fn draw_truth<R: Rng + ?Sized>(model: &CrowdModel, rng: &mut R) -> TruthWord {
    let class_index = rng.random_range(0..model.classes);
    encode_class(class_index, model.microtasks).expect("validated model")
}

/// Samples `W` worker profiles; the first `round(W·α)` are greedy.
pub fn sample_profiles<R: Rng + ?Sized>(model: &CrowdModel, rng: &mut R) -> Vec<WorkerProfile> {
    let n = model.microtasks;
    let greedy = model.greedy_workers();
    (0..model.workers)
        .map(|w| {
            if w < greedy {
                WorkerProfile::greedy(n)
            } else {
                let mut skip_probs = Vec::with_capacity(n);
                let mut reliabilities = Vec::with_capacity(n);
                for _ in 0..n {
                    skip_probs.push(model.skip.sample(rng));
                    reliabilities.push(model.reliability.sample(rng));
                }
                WorkerProfile::honest(skip_probs, reliabilities)
            }
        })
        .collect()
}

/// Draws one answer per worker and microtask, independently.
pub fn generate_answers<R: Rng + ?Sized>(
    profiles: &[WorkerProfile],
    truth: &TruthWord,
    rng: &mut R,
) -> Vec<AnswerWord> {
    profiles
        .iter()
        .enumerate()
        .map(|(w, profile)| {
            let symbols = truth
                .bits
                .iter()
                .zip(profile.skip_probs.iter().zip(&profile.reliabilities))
                .map(|(&bit, (&p, &rho))| {
                    if rng.random::<f64>() < p {
                        AnswerSymbol::Skip
                    } else if rng.random::<f64>() < rho {
                        AnswerSymbol::from_bit(bit)
                    } else {
                        AnswerSymbol::from_bit(1 - bit)
                    }
                })
                .collect();
            AnswerWord::new(w, symbols)
        })
        .collect()
}
