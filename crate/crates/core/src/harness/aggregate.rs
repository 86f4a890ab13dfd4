use serde::Serialize;

use super::config::StrategySelector;
use super::monte_carlo::{MU_WEIGHT_RANGE, M_WEIGHT_FLOOR};
use super::rng::{stream, StreamTag};
use crate::error::{Error, Result};
use crate::estimation::{
    estimate_m_alpha, estimate_mu_benchmark, estimate_mu_benchmark_partial, select_strategy, LengthHistogram,
    SwitchingThreshold, THRESHOLD_M_RANGE,
};
use crate::fusion::{apply_strategy, fuse_weighted, StrategyKind, StrategyParams};
use crate::model::{AnswerWord, ClassDecision};

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateOptions {
    pub strategy: StrategySelector,
    /// Known `μ`; estimated against the majority benchmark when absent.
    pub mu: Option<f64>,
    /// Number of classes; `2^N` when absent.
    pub classes: Option<usize>,
    pub seed: u64,
}

impl Default for AggregateOptions {
    fn default() -> Self {
        Self { strategy: StrategySelector::Adaptive, mu: None, classes: None, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AggregateReport {
    pub workers: usize,
    pub microtasks: usize,
    pub classes: usize,
    /// `None` when the fused word names no class.
    pub decided_class: Option<usize>,
    pub decided_bits: Vec<u8>,
    /// 0-based positions settled by a coin.
    pub tie_bits: Vec<usize>,
    pub strategy: StrategyKind,
    pub retained_workers: usize,
    pub mu_hat: f64,
    pub m_hat: f64,
    pub alpha_hat: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub threshold: Option<SwitchingThreshold>,
    /// Every bit was decided by a coin.
    pub low_confidence: bool,
}

/// Full offline pipeline: estimate `μ`, fit `(m, α)` from word lengths,
/// pick a strategy, filter and weight, then fuse.
pub fn aggregate_offline(microtasks: usize, answers: &[AnswerWord], options: &AggregateOptions) -> Result<AggregateReport> {
    if answers.is_empty() {
        return Err(Error::EmptyAnswers);
    }
    if microtasks == 0 || microtasks > 63 {
        return Err(Error::InvalidParameter(format!("unsupported number of microtasks {microtasks}")));
    }
    let max_classes = 1usize << microtasks;
    let classes = options.classes.unwrap_or(max_classes);
    if classes < 2 || classes > max_classes {
        return Err(Error::InvalidParameter(format!("{classes} classes do not fit in {microtasks} bits")));
    }
    let mut rng = stream(options.seed, 0, 0, StreamTag::Aggregate);
    let greedy_aware = matches!(options.strategy, StrategySelector::Adaptive | StrategySelector::Expurgation);
    let mu_hat = match options.mu {
        Some(mu) => mu,
        None if greedy_aware => estimate_mu_benchmark_partial(answers, &mut rng)?.mu_hat,
        None => estimate_mu_benchmark(answers, &mut rng)?.mu_hat,
    };
    let workers = answers.len();
    let hist = LengthHistogram::from_answers(answers, microtasks)?;
    let fit = estimate_m_alpha(&hist, workers, microtasks)?;

    let (strategy, threshold, m_used) = match options.strategy.fixed() {
        Some(kind) => (kind, None, fit.m.clamp(THRESHOLD_M_RANGE.0, THRESHOLD_M_RANGE.1)),
        None => {
            let decision = select_strategy(mu_hat.clamp(0.0, 1.0), fit.m, fit.alpha, microtasks)?;
            (decision.chosen, Some(decision.threshold), decision.m_used)
        }
    };
    let params = StrategyParams {
        mu: mu_hat.clamp(MU_WEIGHT_RANGE.0, MU_WEIGHT_RANGE.1),
        m: m_used.max(M_WEIGHT_FLOOR),
    };
    let retained = apply_strategy(answers, strategy, params)?;
    let fused = fuse_weighted(&retained.answers, &retained.weights, microtasks, classes, &mut rng)?;
    let low_confidence = fused.all_tied();
    Ok(AggregateReport {
        workers,
        microtasks,
        classes,
        decided_class: match fused.class {
            ClassDecision::Class(c) => Some(c),
            ClassDecision::InvalidCodeword => None,
        },
        decided_bits: fused.decided_bits,
        tie_bits: fused.tie_bits,
        strategy,
        retained_workers: retained.answers.len(),
        mu_hat,
        m_hat: fit.m,
        alpha_hat: fit.alpha,
        threshold,
        low_confidence,
    })
}
