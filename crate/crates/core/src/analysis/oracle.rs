//! Brute-force expectation over every joint worker outcome.
//!
//! Each honest worker skips a bit with probability `m` and otherwise answers
//! correctly with probability `μ`; each greedy worker answers every bit with
//! a fair guess. Each tuple of words goes through the library's strategy and
//! weighting code, and a tied bit counts as correct with probability 1/2.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion::{apply_strategy, StrategyKind, StrategyParams};
use crate::model::{AnswerSymbol, AnswerWord};
use crate::numeric::{compare_votes, greedy_count, CompensatedSum, Comparison};

pub const DEFAULT_ORACLE_CAP: u128 = 100_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    /// Probability every bit is decided correctly.
    pub pc: f64,
    /// Marginal probability each bit is decided correctly.
    pub per_bit: Vec<f64>,
    pub outcomes: u128,
}

// One possible answer word: its probability and, per bit, the weight it adds
// to the correct and to the wrong value.
struct Outcome {
    prob: f64,
    votes: Vec<(f64, f64)>,
}

fn outcome_table(
    symbols: impl Iterator<Item = (f64, Vec<AnswerSymbol>)>,
    strategy: StrategyKind,
    params: StrategyParams,
) -> Result<Vec<Outcome>> {
    symbols
        .map(|(prob, word)| {
            let word = AnswerWord::new(0, word);
            let retained = apply_strategy(std::slice::from_ref(&word), strategy, params)?;
            let weight = retained.weights.first().copied();
            let votes = word
                .symbols
                .iter()
                .map(|s| match (weight, s) {
                    (Some(w), AnswerSymbol::One) => (w, 0.0),
                    (Some(w), AnswerSymbol::Zero) => (0.0, w),
                    _ => (0.0, 0.0),
                })
                .collect();
            Ok(Outcome { prob, votes })
        })
        .collect()
}

// The truth word is all ones; by symmetry of every rule under relabelling
// a bit, this loses no generality.
fn honest_words(microtasks: usize, mu: f64, m: f64) -> impl Iterator<Item = (f64, Vec<AnswerSymbol>)> {
    let count = 3usize.pow(microtasks as u32);
    (0..count).map(move |mut code| {
        let mut prob = 1.0;
        let mut word = Vec::with_capacity(microtasks);
        for _ in 0..microtasks {
            let (p, s) = match code % 3 {
                0 => (m, AnswerSymbol::Skip),
                1 => ((1.0 - m) * mu, AnswerSymbol::One),
                _ => ((1.0 - m) * (1.0 - mu), AnswerSymbol::Zero),
            };
            prob *= p;
            word.push(s);
            code /= 3;
        }
        (prob, word)
    })
}

fn greedy_words(microtasks: usize) -> impl Iterator<Item = (f64, Vec<AnswerSymbol>)> {
    let p = 0.5f64.powi(microtasks as i32);
    (0..1usize << microtasks).map(move |code| {
        let word = (0..microtasks).map(|i| AnswerSymbol::from_bit((code >> i & 1) as u8)).collect();
        (p, word)
    })
}

struct Accumulator {
    pc: CompensatedSum,
    per_bit: Vec<CompensatedSum>,
}

impl Accumulator {
    fn new(microtasks: usize) -> Self {
        Self { pc: CompensatedSum::new(), per_bit: vec![CompensatedSum::new(); microtasks] }
    }

    fn merge(&mut self, other: &Accumulator) {
        self.pc.merge(&other.pc);
        for (a, b) in self.per_bit.iter_mut().zip(&other.per_bit) {
            a.merge(b);
        }
    }
}

struct Walker<'a> {
    workers: Vec<&'a [Outcome]>,
    microtasks: usize,
}

impl Walker<'_> {
    fn walk(&self, depth: usize, prob: f64, sums: &[(f64, f64)], acc: &mut Accumulator) {
        if prob == 0.0 {
            return;
        }
        if depth == self.workers.len() {
            let mut joint = prob;
            for (i, &(correct, wrong)) in sums.iter().enumerate() {
                let factor = match compare_votes(correct, wrong) {
                    Comparison::One => 1.0,
                    Comparison::Tie => 0.5,
                    Comparison::Zero => 0.0,
                };
                acc.per_bit[i].add(prob * factor);
                joint *= factor;
            }
            acc.pc.add(joint);
            return;
        }
        let mut next = vec![(0.0, 0.0); self.microtasks];
        for outcome in self.workers[depth] {
            for ((n, s), v) in next.iter_mut().zip(sums).zip(&outcome.votes) {
                *n = (s.0 + v.0, s.1 + v.1);
            }
            self.walk(depth + 1, prob * outcome.prob, &next, acc);
        }
    }
}

pub fn oracle_pc(
    workers: usize,
    microtasks: usize,
    mu: f64,
    m: f64,
    alpha: f64,
    strategy: StrategyKind,
) -> Result<f64> {
    Ok(oracle_evaluate(workers, microtasks, mu, m, alpha, strategy, DEFAULT_ORACLE_CAP)?.pc)
}

pub fn oracle_evaluate(
    workers: usize,
    microtasks: usize,
    mu: f64,
    m: f64,
    alpha: f64,
    strategy: StrategyKind,
    cap: u128,
) -> Result<OracleResult> {
    if workers == 0 || microtasks == 0 {
        return Err(Error::InvalidParameter("W and N must be at least 1".into()));
    }
    for (name, v) in [("mu", mu), ("m", m), ("alpha", alpha)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!("{name} = {v} outside [0, 1]")));
        }
    }
    let greedy = greedy_count(workers, alpha);
    let honest = workers - greedy;
    let outcomes = 3u128
        .checked_pow((honest * microtasks) as u32)
        .and_then(|a| 2u128.checked_pow((greedy * microtasks) as u32).and_then(|b| a.checked_mul(b)))
        .unwrap_or(u128::MAX);
    if outcomes > cap {
        return Err(Error::EnumerationTooLarge { required: outcomes, cap });
    }

    let params = StrategyParams { mu, m };
    let honest_table = outcome_table(honest_words(microtasks, mu, m), strategy, params)?;
    let greedy_table = outcome_table(greedy_words(microtasks), strategy, params)?;
    let mut tables: Vec<&[Outcome]> = vec![&greedy_table; greedy];
    tables.extend(std::iter::repeat_n(honest_table.as_slice(), honest));
    let walker = Walker { workers: tables, microtasks };

    let first = walker.workers[0];
    let chunks: Vec<Accumulator> = first
        .par_iter()
        .map(|outcome| {
            let mut acc = Accumulator::new(microtasks);
            walker.walk(1, outcome.prob, &outcome.votes, &mut acc);
            acc
        })
        .collect();
    let mut acc = Accumulator::new(microtasks);
    for chunk in &chunks {
        acc.merge(chunk);
    }
    Ok(OracleResult {
        pc: acc.pc.value(),
        per_bit: acc.per_bit.iter().map(CompensatedSum::value).collect(),
        outcomes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_enumerations() {
        let one = oracle_pc(1, 1, 0.7, 0.0, 0.0, StrategyKind::Honest).unwrap();
        assert!((one - 0.7).abs() < 1e-15);
        let two = oracle_pc(2, 1, 0.8, 0.0, 0.0, StrategyKind::Honest).unwrap();
        assert!((two - 0.8).abs() < 1e-15);
        assert_eq!(oracle_pc(3, 2, 0.8, 1.0, 0.0, StrategyKind::Honest).unwrap(), 0.25);
    }

    #[test]
    fn greedy_only_crowd_is_random() {
        let pc = oracle_pc(3, 2, 0.8, 0.3, 1.0, StrategyKind::Oblivious).unwrap();
        assert!((pc - 0.25).abs() < 1e-15);
        let pc = oracle_pc(3, 2, 0.8, 0.3, 1.0, StrategyKind::Expurgation).unwrap();
        assert!((pc - 0.25).abs() < 1e-15);
    }

    #[test]
    fn expurgation_loses_signal_as_skips_vanish() {
        let a = oracle_pc(3, 2, 0.8, 0.3, 0.0, StrategyKind::Expurgation).unwrap();
        let b = oracle_pc(3, 2, 0.8, 0.05, 0.0, StrategyKind::Expurgation).unwrap();
        assert!(b < a);
        assert!(b - 0.25 < 0.1);
    }

    #[test]
    fn cap_enforced() {
        let err = oracle_evaluate(6, 3, 0.8, 0.3, 0.0, StrategyKind::Honest, 1000).unwrap_err();
        assert!(matches!(err, Error::EnumerationTooLarge { .. }));
    }
}
