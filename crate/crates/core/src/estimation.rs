//! Crowd parameter estimation from submitted answers, and the threshold on
//! the greedy fraction that decides between the two greedy-worker strategies.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion::{solve_x, StrategyKind};
use crate::model::{AnswerSymbol, AnswerWord};
use crate::numeric::{greedy_count, ln_factorials, xlny};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EstimationResult {
    pub mu_hat: f64,
    pub m_hat: Option<f64>,
    pub alpha_hat: Option<f64>,
    /// Workers whose every relevant answer was a skip (ε).
    pub excluded_workers: usize,
}

/// Fallback when no worker gave a single definitive answer.
pub const MU_FALLBACK: f64 = 0.5;

fn mu_from_ratios(ratios: impl Iterator<Item = Option<f64>>) -> EstimationResult {
    let (mut total, mut workers, mut excluded) = (0.0, 0usize, 0usize);
    for r in ratios {
        workers += 1;
        match r {
            Some(r) => total += r,
            None => excluded += 1,
        }
    }
    let mu_hat = if excluded == workers { MU_FALLBACK } else { total / (workers - excluded) as f64 };
    EstimationResult { mu_hat, m_hat: None, alpha_hat: None, excluded_workers: excluded }
}

// Fraction of a word's definitive answers matching the reference;
// `None` when the word has no definitive answers.
fn match_ratio(word: &AnswerWord, reference: &[Option<u8>]) -> Option<f64> {
    let definitive = word.n_definitive();
    if definitive == 0 {
        return None;
    }
    let matches = word
        .symbols
        .iter()
        .zip(reference)
        .filter(|(s, r)| s.bit().is_some() && s.bit() == **r)
        .count();
    Some(matches as f64 / definitive as f64)
}

/// Gold-standard estimate of μ from answers to `T` training questions.
pub fn estimate_mu_training(answers: &[AnswerWord], gold: &[u8]) -> Result<EstimationResult> {
    if gold.is_empty() {
        return Err(Error::InvalidParameter("at least one training question is required".into()));
    }
    if answers.is_empty() {
        return Err(Error::EmptyAnswers);
    }
    if let Some(bad) = answers.iter().find(|w| w.len() != gold.len()) {
        return Err(Error::Misaligned { expected: gold.len(), found: bad.len() });
    }
    let reference: Vec<Option<u8>> = gold.iter().map(|&b| Some(b)).collect();
    Ok(mu_from_ratios(answers.iter().map(|w| match_ratio(w, &reference))))
}

/// Unweighted majority over definitive answers per bit. `None` marks a bit
/// every worker skipped; split votes are settled by a fair coin.
pub fn majority_benchmark<R: Rng + ?Sized>(answers: &[AnswerWord], rng: &mut R) -> Vec<Option<u8>> {
    let n = answers.first().map_or(0, AnswerWord::len);
    (0..n)
        .map(|i| {
            let (mut ones, mut zeros) = (0usize, 0usize);
            for word in answers {
                match word.symbols[i] {
                    AnswerSymbol::One => ones += 1,
                    AnswerSymbol::Zero => zeros += 1,
                    AnswerSymbol::Skip => {}
                }
            }
            if ones + zeros == 0 {
                None
            } else if ones == zeros {
                Some(u8::from(rng.random_bool(0.5)))
            } else {
                Some(u8::from(ones > zeros))
            }
        })
        .collect()
}

/// Estimates μ against a majority-vote benchmark of the task answers.
///
/// With a single worker the benchmark is that worker's own word, so the
/// estimate degenerates to 1.
pub fn estimate_mu_benchmark<R: Rng + ?Sized>(answers: &[AnswerWord], rng: &mut R) -> Result<EstimationResult> {
    let first = answers.first().ok_or(Error::EmptyAnswers)?;
    if let Some(bad) = answers.iter().find(|w| w.len() != first.len()) {
        return Err(Error::Misaligned { expected: first.len(), found: bad.len() });
    }
    let benchmark = majority_benchmark(answers, rng);
    Ok(mu_from_ratios(answers.iter().map(|w| match_ratio(w, &benchmark))))
}

/// Benchmark estimate computed without full-length words, which may come
/// from greedy workers. With nothing left the fallback value is returned.
pub fn estimate_mu_benchmark_partial<R: Rng + ?Sized>(
    answers: &[AnswerWord],
    rng: &mut R,
) -> Result<EstimationResult> {
    let kept: Vec<AnswerWord> = answers.iter().filter(|w| !w.is_full_length()).cloned().collect();
    if kept.is_empty() {
        if answers.is_empty() {
            return Err(Error::EmptyAnswers);
        }
        return Ok(EstimationResult { mu_hat: MU_FALLBACK, m_hat: None, alpha_hat: None, excluded_workers: 0 });
    }
    estimate_mu_benchmark(&kept, rng)
}

/// Number of workers submitting exactly `n` definitive answers, `n = 0..=N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LengthHistogram {
    pub counts: Vec<usize>,
}

impl LengthHistogram {
    pub fn from_answers(answers: &[AnswerWord], microtasks: usize) -> Result<Self> {
        let mut counts = vec![0usize; microtasks + 1];
        for word in answers {
            if word.len() != microtasks {
                return Err(Error::Misaligned { expected: microtasks, found: word.len() });
            }
            counts[word.n_definitive()] += 1;
        }
        Ok(Self { counts })
    }

    pub fn workers(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn microtasks(&self) -> usize {
        self.counts.len() - 1
    }
}

/// Likelihood used for the joint `(m, α)` fit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MleObjective {
    /// Full-length honest count `q_N - Wα` is binomial over the `W - Wα`
    /// honest workers, with success probability `(1-m)^N`.
    #[default]
    Binomial,
    /// As `Binomial`, but the factor `1 - (1-m)^N` enters with exponent
    /// one.
    SingleFactor,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MleEstimate {
    pub m: f64,
    pub alpha: f64,
    pub log_likelihood: f64,
}

pub const MLE_COARSE_STEP: f64 = 0.01;
pub const MLE_FINE_STEP: f64 = 0.001;

struct LengthLikelihood<'a> {
    counts: &'a [usize],
    workers: usize,
    microtasks: usize,
    ln_fact: Vec<f64>,
    objective: MleObjective,
}

impl LengthLikelihood<'_> {
    fn ln_choose(&self, n: usize, k: usize) -> f64 {
        self.ln_fact[n] - self.ln_fact[k] - self.ln_fact[n - k]
    }

    /// Sum over `n` of the log pmf of each length count, treated as
    /// independent observations.
    fn eval(&self, m: f64, alpha: f64) -> f64 {
        let n_tasks = self.microtasks;
        let greedy = greedy_count(self.workers, alpha);
        let honest = self.workers - greedy;
        let mut total = 0.0;
        for n in 0..n_tasks {
            let c = self.counts[n];
            if c > honest {
                return f64::NEG_INFINITY;
            }
            let a = crate::numeric::binomial(n_tasks as u64, n as u64)
                * (1.0 - m).powi(n as i32)
                * m.powi((n_tasks - n) as i32);
            total += self.ln_choose(honest, c) + xlny(c as f64, a) + xlny((honest - c) as f64, 1.0 - a);
            if total == f64::NEG_INFINITY {
                return total;
            }
        }
        let full = self.counts[n_tasks];
        if full < greedy || full - greedy > honest {
            return f64::NEG_INFINITY;
        }
        let k = full - greedy;
        let all_answer = (1.0 - m).powi(n_tasks as i32);
        total += self.ln_choose(honest, k) + xlny((n_tasks * k) as f64, 1.0 - m);
        total += match self.objective {
            MleObjective::Binomial => xlny((honest - k) as f64, 1.0 - all_answer),
            MleObjective::SingleFactor => (1.0 - all_answer).ln(),
        };
        total
    }
}

/// Joint maximum-likelihood estimate of the mean skip probability `m` and
/// the greedy fraction `α` from the distribution of word lengths.
pub fn estimate_m_alpha(hist: &LengthHistogram, workers: usize, microtasks: usize) -> Result<MleEstimate> {
    estimate_m_alpha_with(hist, workers, microtasks, MleObjective::default())
}

pub fn estimate_m_alpha_with(
    hist: &LengthHistogram,
    workers: usize,
    microtasks: usize,
    objective: MleObjective,
) -> Result<MleEstimate> {
    if hist.counts.len() != microtasks + 1 {
        return Err(Error::Misaligned { expected: microtasks + 1, found: hist.counts.len() });
    }
    if hist.workers() != workers {
        return Err(Error::InvalidParameter(format!(
            "histogram counts {} workers, expected {workers}",
            hist.workers()
        )));
    }
    let likelihood = LengthLikelihood {
        counts: &hist.counts,
        workers,
        microtasks,
        ln_fact: ln_factorials(workers),
        objective,
    };

    // Grid points are integer multiples of the step; ties keep the earlier
    // point, so smaller α wins first and then smaller m.
    let search = |alpha_range: (i64, i64), m_range: (i64, i64), scale: f64| {
        let mut best = MleEstimate { m: m_range.0 as f64 / scale, alpha: alpha_range.0 as f64 / scale, log_likelihood: f64::NEG_INFINITY };
        for ia in alpha_range.0..=alpha_range.1 {
            let alpha = ia as f64 / scale;
            for im in m_range.0..=m_range.1 {
                let m = im as f64 / scale;
                let l = likelihood.eval(m, alpha);
                if l > best.log_likelihood {
                    best = MleEstimate { m, alpha, log_likelihood: l };
                }
            }
        }
        best
    };

    let coarse = search((0, 100), (0, 100), 100.0);
    let window = |v: f64| {
        let centre = (v * 1000.0).round() as i64;
        ((centre - 10).max(0), (centre + 10).min(1000))
    };
    let fine = search(window(coarse.alpha), window(coarse.m), 1000.0);
    Ok(if fine.log_likelihood > coarse.log_likelihood { fine } else { coarse })
}

/// Switching threshold `α*` on the greedy fraction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SwitchingThreshold {
    /// `α*` clamped to `[0, 1]`.
    pub value: f64,
    pub unclamped: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    /// Coefficient of `α` in the switching inequality.
    pub coefficient: f64,
}

pub fn switching_threshold(mu: f64, m: f64, microtasks: usize) -> Result<SwitchingThreshold> {
    if !(mu > 0.5 && mu <= 1.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} outside (0.5, 1]")));
    }
    if !(m > 0.0 && m < 1.0) {
        if m == 0.0 {
            return Err(Error::LimitUndefined { m });
        }
        return Err(Error::InvalidParameter(format!("m = {m} outside (0, 1)")));
    }
    let x = solve_x(m, microtasks)?;
    let n = microtasks as i32;
    let base = (1.0 - m) / mu;
    let gamma1 = (base + 2.0 * m * x).powi(n) - base.powi(n);
    let gamma2 = (base + 2.0 * m).powi(n);
    let coefficient = mu.powi(-n) - gamma1 * (2.0 * mu).powi(-n) - gamma2 + gamma1;
    let unclamped = (gamma1 - gamma2) / coefficient;
    if !unclamped.is_finite() {
        return Err(Error::InvalidParameter(format!("threshold undefined at mu = {mu}, m = {m}")));
    }
    Ok(SwitchingThreshold { value: unclamped.clamp(0.0, 1.0), unclamped, gamma1, gamma2, coefficient })
}

/// Estimates are pulled into this range before the threshold is evaluated,
/// where the closed form is defined.
pub const THRESHOLD_MU_RANGE: (f64, f64) = (0.51, 1.0);
pub const THRESHOLD_M_RANGE: (f64, f64) = (0.01, 0.99);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StrategyDecision {
    pub threshold: SwitchingThreshold,
    pub chosen: StrategyKind,
    pub mu_hat: f64,
    pub m_hat: f64,
    pub alpha_hat: f64,
    pub microtasks: usize,
    /// `(μ, m)` actually used for the threshold after range limiting.
    pub mu_used: f64,
    pub m_used: f64,
}

/// Expurgation when `α̂ > α*`, otherwise Oblivious (ties keep every word).
pub fn select_strategy(mu_hat: f64, m_hat: f64, alpha_hat: f64, microtasks: usize) -> Result<StrategyDecision> {
    for (name, v) in [("mu", mu_hat), ("m", m_hat), ("alpha", alpha_hat)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!("{name} estimate {v} outside [0, 1]")));
        }
    }
    let mu_used = mu_hat.clamp(THRESHOLD_MU_RANGE.0, THRESHOLD_MU_RANGE.1);
    let m_used = m_hat.clamp(THRESHOLD_M_RANGE.0, THRESHOLD_M_RANGE.1);
    let threshold = switching_threshold(mu_used, m_used, microtasks)?;
    let chosen = if alpha_hat > threshold.value { StrategyKind::Expurgation } else { StrategyKind::Oblivious };
    Ok(StrategyDecision { threshold, chosen, mu_hat, m_hat, alpha_hat, microtasks, mu_used, m_used })
}
