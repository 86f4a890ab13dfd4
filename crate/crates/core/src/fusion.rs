//! Weight schemes and aggregation rules.
//!
//! Every rule reduces to comparing, per microtask, the total weight behind
//! "1" against the total weight behind "0". Weights are used in normalized
//! form: any common positive factor leaves all decisions unchanged, so the
//! normalization constants of the weight optimization are dropped.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{decode_class, AnswerSymbol, AnswerWord, ClassDecision};
use crate::numeric::{compare_votes, Comparison, TIE_RELATIVE_TOLERANCE};

/// How a worker's weight is derived from its answer word.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightScheme {
    /// Conventional majority voting.
    Uniform,
    /// `μ^-n` for a word with `n` definitive answers.
    RejectWeighted { mu: f64 },
    /// `(μx)^-n`, used once full-length words have been discarded.
    Expurgation { mu: f64, x: f64 },
    /// Chair–Varshney log-odds weights from known per-worker, per-bit
    /// reliabilities. Applied bit by bit in [`chair_varshney_fuse`].
    Oracle { reliabilities: Vec<Vec<f64>> },
}

impl WeightScheme {
    pub fn reject_weighted(mu: f64) -> Result<Self> {
        check_mu(mu)?;
        Ok(WeightScheme::RejectWeighted { mu })
    }

    /// Builds the expurgation scheme with `x` solved from `m` and `N`.
    pub fn expurgation(mu: f64, m: f64, microtasks: usize) -> Result<Self> {
        check_mu(mu)?;
        let x = solve_x(m, microtasks)?;
        Ok(WeightScheme::Expurgation { mu, x })
    }

    fn name(&self) -> &'static str {
        match self {
            WeightScheme::Uniform => "uniform",
            WeightScheme::RejectWeighted { .. } => "reject-weighted",
            WeightScheme::Expurgation { .. } => "expurgation",
            WeightScheme::Oracle { .. } => "oracle",
        }
    }
}

// μ = 0.5 is accepted: it is the boundary where definitive answers carry no
// information, and it gives exactly representable weights 2^n.
fn check_mu(mu: f64) -> Result<()> {
    if mu > 0.0 && mu <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("mu = {mu} outside (0, 1]")))
    }
}

/// How greedy workers are handled before fusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    /// Honest crowd; reject-weighted fusion of every word.
    Honest,
    /// Same weights as `Honest`, ignoring that greedy workers exist.
    Oblivious,
    /// Drops every full-length word, then weights the rest by `(μx)^-n`.
    Expurgation,
}

impl StrategyKind {
    pub fn label(self) -> &'static str {
        match self {
            StrategyKind::Honest => "honest",
            StrategyKind::Oblivious => "oblivious",
            StrategyKind::Expurgation => "expurgation",
        }
    }
}

/// Bitwise fusion outcome. `tie_bits` holds 0-based bit positions that were
/// settled by a fair coin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionResult {
    pub decided_bits: Vec<u8>,
    pub tie_bits: Vec<usize>,
    pub class: ClassDecision,
}

impl FusionResult {
    pub fn all_tied(&self) -> bool {
        self.tie_bits.len() == self.decided_bits.len()
    }
}

pub fn compute_weight(scheme: &WeightScheme, word: &AnswerWord) -> Result<f64> {
    let n = word.n_definitive() as i32;
    match *scheme {
        WeightScheme::Uniform => Ok(1.0),
        WeightScheme::RejectWeighted { mu } => Ok(mu.powi(-n)),
        WeightScheme::Expurgation { mu, x } => Ok((mu * x).powi(-n)),
        WeightScheme::Oracle { .. } => Err(Error::UnsupportedScheme(scheme.name())),
    }
}

/// Root of `(1 - m + m x)^N - (1 - m)^N = 1`, the normalization that makes the
/// length distribution of non-full-length words sum to one.
pub fn solve_x(m: f64, microtasks: usize) -> Result<f64> {
    if microtasks == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::InvalidParameter(format!("m = {m} outside [0, 1]")));
    }
    if m == 0.0 {
        return Err(Error::LimitUndefined { m });
    }
    let n = microtasks as f64;
    let q = 1.0 - m;
    Ok(((1.0 + q.powf(n)).powf(1.0 / n) - q) / m)
}

fn check_lengths(answers: &[AnswerWord]) -> Result<usize> {
    let first = answers.first().ok_or(Error::EmptyAnswers)?;
    let n = first.len();
    for word in answers {
        if word.len() != n {
            return Err(Error::Misaligned { expected: n, found: word.len() });
        }
    }
    Ok(n)
}

/// Weighted bitwise vote with explicit per-word weights. An empty answer set
/// ties every bit.
pub fn fuse_weighted<R: Rng + ?Sized>(
    answers: &[AnswerWord],
    weights: &[f64],
    microtasks: usize,
    classes: usize,
    rng: &mut R,
) -> Result<FusionResult> {
    if answers.len() != weights.len() {
        return Err(Error::Misaligned { expected: answers.len(), found: weights.len() });
    }
    if let Some(bad) = answers.iter().find(|w| w.len() != microtasks) {
        return Err(Error::Misaligned { expected: microtasks, found: bad.len() });
    }
    let mut ones = vec![0.0; microtasks];
    let mut zeros = vec![0.0; microtasks];
    for (word, &weight) in answers.iter().zip(weights) {
        for (i, symbol) in word.symbols.iter().enumerate() {
            match symbol {
                AnswerSymbol::One => ones[i] += weight,
                AnswerSymbol::Zero => zeros[i] += weight,
                AnswerSymbol::Skip => {}
            }
        }
    }
    Ok(decide_bits(&ones, &zeros, classes, rng))
}

fn decide_bits<R: Rng + ?Sized>(ones: &[f64], zeros: &[f64], classes: usize, rng: &mut R) -> FusionResult {
    let mut decided_bits = Vec::with_capacity(ones.len());
    let mut tie_bits = Vec::new();
    for (i, (&one, &zero)) in ones.iter().zip(zeros).enumerate() {
        let bit = match compare_votes(one, zero) {
            Comparison::One => 1,
            Comparison::Zero => 0,
            Comparison::Tie => {
                tie_bits.push(i);
                u8::from(rng.random_bool(0.5))
            }
        };
        decided_bits.push(bit);
    }
    let class = decode_class(&decided_bits, classes);
    FusionResult { decided_bits, tie_bits, class }
}

/// Bit-by-bit weighted majority vote.
pub fn fuse_bitwise<R: Rng + ?Sized>(
    answers: &[AnswerWord],
    scheme: &WeightScheme,
    classes: usize,
    rng: &mut R,
) -> Result<FusionResult> {
    let n = check_lengths(answers)?;
    if let WeightScheme::Oracle { reliabilities } = scheme {
        return chair_varshney_fuse(answers, reliabilities, classes, rng);
    }
    let weights = answers
        .iter()
        .map(|w| compute_weight(scheme, w))
        .collect::<Result<Vec<_>>>()?;
    fuse_weighted(answers, &weights, n, classes, rng)
}

/// Per-class totals `Σ_w W_w · [class consistent with word w]`.
pub fn class_scores(answers: &[AnswerWord], weights: &[f64], classes: usize) -> Vec<f64> {
    let mut scores = vec![0.0; classes];
    for (word, &weight) in answers.iter().zip(weights) {
        let n = word.len();
        for (class, score) in scores.iter_mut().enumerate() {
            let consistent = word.symbols.iter().enumerate().all(|(i, s)| match s.bit() {
                Some(b) => ((class >> (n - 1 - i)) & 1) as u8 == b,
                None => true,
            });
            if consistent {
                *score += weight;
            }
        }
    }
    scores
}

/// Indices of the classes sharing the top score (within the tie tolerance).
pub fn top_classes(scores: &[f64]) -> Vec<usize> {
    let best = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    scores
        .iter()
        .enumerate()
        .filter(|(_, &s)| (best - s).abs() <= TIE_RELATIVE_TOLERANCE * best.abs())
        .map(|(j, _)| j)
        .collect()
}

/// Class-level weighted vote over the subsets of classes each word allows.
/// Ties among top-scoring classes are broken uniformly.
pub fn fuse_classwise<R: Rng + ?Sized>(
    answers: &[AnswerWord],
    scheme: &WeightScheme,
    classes: usize,
    rng: &mut R,
) -> Result<ClassDecision> {
    let n = check_lengths(answers)?;
    if n > 63 || classes > (1usize << n) {
        return Err(Error::InvalidParameter(format!("{classes} classes do not fit in {n} bits")));
    }
    let weights = answers
        .iter()
        .map(|w| compute_weight(scheme, w))
        .collect::<Result<Vec<_>>>()?;
    let top = top_classes(&class_scores(answers, &weights, classes));
    let pick = if top.len() == 1 { 0 } else { rng.random_range(0..top.len()) };
    Ok(ClassDecision::Class(top[pick]))
}

/// Optimal fusion with known reliabilities: per bit, the log-odds
/// `ln(ρ/(1-ρ))` of the workers voting 1 against those voting 0.
pub fn chair_varshney_fuse<R: Rng + ?Sized>(
    answers: &[AnswerWord],
    reliabilities: &[Vec<f64>],
    classes: usize,
    rng: &mut R,
) -> Result<FusionResult> {
    let n = check_lengths(answers)?;
    if reliabilities.len() != answers.len() {
        return Err(Error::Misaligned { expected: answers.len(), found: reliabilities.len() });
    }
    let mut ones = vec![0.0; n];
    let mut zeros = vec![0.0; n];
    for (w, (word, rhos)) in answers.iter().zip(reliabilities).enumerate() {
        if rhos.len() != n {
            return Err(Error::Misaligned { expected: n, found: rhos.len() });
        }
        for (i, (symbol, &rho)) in word.symbols.iter().zip(rhos).enumerate() {
            if !symbol.is_definitive() {
                continue;
            }
            if !(rho > 0.0 && rho < 1.0) {
                return Err(Error::DegenerateReliability { worker: w, bit: i, value: rho });
            }
            let log_odds = (rho / (1.0 - rho)).ln();
            match symbol {
                AnswerSymbol::One => ones[i] += log_odds,
                AnswerSymbol::Zero => zeros[i] += log_odds,
                AnswerSymbol::Skip => {}
            }
        }
    }
    Ok(decide_bits(&ones, &zeros, classes, rng))
}

/// Words kept by a strategy and their weights, index-aligned.
#[derive(Clone, Debug, PartialEq)]
pub struct Retained {
    pub answers: Vec<AnswerWord>,
    pub weights: Vec<f64>,
}

/// Crowd parameters a strategy needs to weight answers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StrategyParams {
    pub mu: f64,
    pub m: f64,
}

pub fn apply_strategy(answers: &[AnswerWord], kind: StrategyKind, params: StrategyParams) -> Result<Retained> {
    let (scheme, keep_full_length) = match kind {
        StrategyKind::Honest | StrategyKind::Oblivious => (WeightScheme::reject_weighted(params.mu)?, true),
        StrategyKind::Expurgation => {
            let n = answers.first().map_or(1, AnswerWord::len);
            (WeightScheme::expurgation(params.mu, params.m, n)?, false)
        }
    };
    let mut retained = Retained { answers: Vec::new(), weights: Vec::new() };
    for word in answers {
        if keep_full_length || !word.is_full_length() {
            retained.weights.push(compute_weight(&scheme, word)?);
            retained.answers.push(word.clone());
        }
    }
    Ok(retained)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AnswerSymbol::{One, Skip, Zero};
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn word(id: usize, symbols: &[AnswerSymbol]) -> AnswerWord {
        AnswerWord::new(id, symbols.to_vec())
    }

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn reject_weights() {
        let none = word(0, &[Skip, Skip, Skip]);
        let two = word(0, &[One, Zero, Skip]);
        assert_eq!(compute_weight(&WeightScheme::RejectWeighted { mu: 0.8 }, &none).unwrap(), 1.0);
        assert_eq!(compute_weight(&WeightScheme::RejectWeighted { mu: 0.5 }, &two).unwrap(), 4.0);
        assert_eq!(compute_weight(&WeightScheme::Uniform, &two).unwrap(), 1.0);
        let oracle = WeightScheme::Oracle { reliabilities: vec![] };
        assert!(matches!(compute_weight(&oracle, &two), Err(Error::UnsupportedScheme(_))));
    }

    #[test]
    fn expurgation_weight_uses_solved_x() {
        let scheme = WeightScheme::expurgation(0.8, 0.5, 3).unwrap();
        let WeightScheme::Expurgation { x, .. } = scheme else { unreachable!() };
        // (1 - m + m x)^N - (1 - m)^N = 1
        let residual = (0.5 + 0.5 * x).powi(3) - 0.125 - 1.0;
        assert!(residual.abs() < 1e-12);
        let w = compute_weight(&scheme, &word(0, &[One, Zero, Skip])).unwrap();
        assert!((w - (0.8 * x).powi(-2)).abs() < 1e-15);
    }

    #[test]
    fn solve_x_values() {
        assert!((solve_x(1.0, 3).unwrap() - 1.0).abs() < 1e-15);
        assert!((solve_x(0.5, 1).unwrap() - 2.0).abs() < 1e-15);
        for &(m, n) in &[(0.5, 3), (0.1, 2), (0.9, 10), (0.05, 6)] {
            let x = solve_x(m, n).unwrap();
            let residual = (1.0 - m + m * x).powi(n as i32) - (1.0 - m).powi(n as i32) - 1.0;
            assert!(residual.abs() < 1e-12, "m={m} N={n} residual={residual}");
        }
        assert!(matches!(solve_x(0.0, 3), Err(Error::LimitUndefined { .. })));
        assert!(solve_x(1.5, 3).is_err());
    }

    #[test]
    fn unanimous_bit() {
        let answers = vec![word(0, &[One, Zero]), word(1, &[One, Skip]), word(2, &[One, One])];
        let r = fuse_bitwise(&answers, &WeightScheme::RejectWeighted { mu: 0.7 }, 4, &mut rng()).unwrap();
        assert_eq!(r.decided_bits[0], 1);
        assert!(!r.tie_bits.contains(&0));
    }

    #[test]
    fn all_skip_bit_is_a_tie() {
        let answers = vec![word(0, &[Skip, One]), word(1, &[Skip, One])];
        let r = fuse_bitwise(&answers, &WeightScheme::RejectWeighted { mu: 0.7 }, 4, &mut rng()).unwrap();
        assert_eq!(r.tie_bits, vec![0]);
        assert_eq!(r.decided_bits[1], 1);
    }

    #[test]
    fn weighted_count_example() {
        // A = (1, λ) has weight 2; B, C = (0, 0) have weight 4 each.
        let answers = vec![word(0, &[One, Skip]), word(1, &[Zero, Zero]), word(2, &[Zero, Zero])];
        let r = fuse_bitwise(&answers, &WeightScheme::RejectWeighted { mu: 0.5 }, 4, &mut rng()).unwrap();
        assert_eq!(r.decided_bits, vec![0, 0]);
        assert!(r.tie_bits.is_empty());
        assert_eq!(r.class, ClassDecision::Class(0));
    }

    #[test]
    fn exact_rational_tie() {
        // 2 + 2 against 4 with μ = 0.5: one-definitive words against a two-definitive word.
        let answers = vec![word(0, &[One, Skip]), word(1, &[One, Skip]), word(2, &[Zero, One])];
        let r = fuse_bitwise(&answers, &WeightScheme::RejectWeighted { mu: 0.5 }, 4, &mut rng()).unwrap();
        assert_eq!(r.tie_bits, vec![0]);
    }

    #[test]
    fn classwise_singleton_and_all_skip() {
        let scheme = WeightScheme::RejectWeighted { mu: 0.8 };
        let single = vec![word(0, &[One, Zero, One])];
        assert_eq!(fuse_classwise(&single, &scheme, 8, &mut rng()).unwrap(), ClassDecision::Class(5));

        let skipper = vec![word(0, &[Skip, Skip, Skip])];
        let mut counts = [0usize; 8];
        let mut r = rng();
        for _ in 0..8000 {
            let c = fuse_classwise(&skipper, &scheme, 8, &mut r).unwrap().class().unwrap();
            counts[c] += 1;
        }
        for c in counts {
            assert!((c as f64 - 1000.0).abs() < 150.0, "{counts:?}");
        }
    }

    #[test]
    fn classwise_and_bitwise_differ_on_plurality_splits() {
        // Plurality over words is not per-bit majority: "01" wins the class
        // vote 3/2/2 while each bit has a 4-3 majority for "1".
        let words = [[Zero, One], [Zero, One], [Zero, One], [One, Zero], [One, Zero], [One, One], [One, One]];
        let answers: Vec<_> = words.iter().enumerate().map(|(i, w)| word(i, w)).collect();
        let bitwise = fuse_bitwise(&answers, &WeightScheme::Uniform, 4, &mut rng()).unwrap();
        assert!(bitwise.tie_bits.is_empty());
        assert_eq!(bitwise.class, ClassDecision::Class(3));
        let scores = class_scores(&answers, &[1.0; 7], 4);
        assert_eq!(top_classes(&scores), vec![1]);
    }

    #[test]
    fn chair_varshney_examples() {
        let answers = vec![word(0, &[One]), word(1, &[Zero]), word(2, &[Zero]), word(3, &[Zero])];
        let rel = vec![vec![0.99], vec![0.51], vec![0.51], vec![0.51]];
        let r = chair_varshney_fuse(&answers, &rel, 2, &mut rng()).unwrap();
        assert_eq!(r.decided_bits, vec![1]);

        let bad = vec![vec![1.0], vec![0.51], vec![0.51], vec![0.51]];
        assert!(matches!(
            chair_varshney_fuse(&answers, &bad, 2, &mut rng()),
            Err(Error::DegenerateReliability { worker: 0, .. })
        ));
        // a degenerate reliability on a skipped answer is never used
        let skipped = vec![word(0, &[Skip]), word(1, &[Zero])];
        assert!(chair_varshney_fuse(&skipped, &[vec![1.0], vec![0.7]], 2, &mut rng()).is_ok());
    }

    #[test]
    fn chair_varshney_matches_posterior_argmax() {
        // Brute-force posterior ratio from the per-answer likelihoods.
        let mut r = ChaCha8Rng::seed_from_u64(99);
        for _ in 0..200 {
            let w = r.random_range(1..6);
            let answers: Vec<AnswerWord> = (0..w)
                .map(|i| {
                    let s = match r.random_range(0..3) {
                        0 => Zero,
                        1 => One,
                        _ => Skip,
                    };
                    word(i, &[s])
                })
                .collect();
            let p: Vec<f64> = (0..w).map(|_| r.random_range(0.0..0.9)).collect();
            let rel: Vec<Vec<f64>> = (0..w).map(|_| vec![r.random_range(0.05..0.95)]).collect();
            let (mut l1, mut l0) = (1.0f64, 1.0f64);
            for (i, a) in answers.iter().enumerate() {
                let (pi, rho) = (p[i], rel[i][0]);
                match a.symbols[0] {
                    One => {
                        l1 *= (1.0 - pi) * rho;
                        l0 *= (1.0 - pi) * (1.0 - rho);
                    }
                    Zero => {
                        l1 *= (1.0 - pi) * (1.0 - rho);
                        l0 *= (1.0 - pi) * rho;
                    }
                    Skip => {
                        l1 *= pi;
                        l0 *= pi;
                    }
                }
            }
            let ratio = (l1 / l0).ln();
            if ratio.abs() < 1e-9 {
                continue;
            }
            let fused = chair_varshney_fuse(&answers, &rel, 2, &mut r).unwrap();
            assert_eq!(fused.decided_bits[0], u8::from(ratio > 0.0));
        }
    }

    #[test]
    fn chair_varshney_equal_reliabilities_is_majority() {
        let answers = vec![word(0, &[One, Zero]), word(1, &[One, Skip]), word(2, &[Zero, Zero])];
        let rel = vec![vec![0.7; 2]; 3];
        let cv = chair_varshney_fuse(&answers, &rel, 4, &mut rng()).unwrap();
        let mv = fuse_bitwise(&answers, &WeightScheme::Uniform, 4, &mut rng()).unwrap();
        assert_eq!(cv.decided_bits, mv.decided_bits);
    }

    #[test]
    fn strategies_filter_and_weight() {
        let answers = vec![word(0, &[One, Zero, One]), word(1, &[One, Skip, Zero]), word(2, &[Skip, Skip, Skip])];
        let params = StrategyParams { mu: 0.8, m: 0.5 };
        let exp = apply_strategy(&answers, StrategyKind::Expurgation, params).unwrap();
        assert_eq!(exp.answers.iter().map(|w| w.worker_id).collect::<Vec<_>>(), vec![1, 2]);
        let x = solve_x(0.5, 3).unwrap();
        assert!((exp.weights[0] - (0.8 * x).powi(-2)).abs() < 1e-15);
        assert_eq!(exp.weights[1], 1.0);

        let honest = apply_strategy(&answers, StrategyKind::Honest, params).unwrap();
        let oblivious = apply_strategy(&answers, StrategyKind::Oblivious, params).unwrap();
        assert_eq!(honest, oblivious);
        assert_eq!(honest.answers.len(), 3);

        let full = vec![word(0, &[One, Zero, One]), word(1, &[Zero, Zero, One])];
        let empty = apply_strategy(&full, StrategyKind::Expurgation, params).unwrap();
        assert!(empty.answers.is_empty());
        let fused = fuse_weighted(&empty.answers, &empty.weights, 3, 8, &mut rng()).unwrap();
        assert!(fused.all_tied());
    }

    fn arb_words(max_w: usize, n: usize) -> impl Strategy<Value = Vec<AnswerWord>> {
        prop::collection::vec(prop::collection::vec(0u8..3, n), 1..=max_w).prop_map(|rows| {
            rows.into_iter()
                .enumerate()
                .map(|(i, row)| {
                    let symbols = row
                        .into_iter()
                        .map(|v| match v {
                            0 => Zero,
                            1 => One,
                            _ => Skip,
                        })
                        .collect();
                    AnswerWord::new(i, symbols)
                })
                .collect()
        })
    }

    proptest! {
        #[test]
        fn scale_invariance(answers in arb_words(8, 3), c in 1e-3f64..1e3, seed in 0u64..100) {
            let weights: Vec<f64> = answers.iter().map(|w| 0.8f64.powi(-(w.n_definitive() as i32))).collect();
            let scaled: Vec<f64> = weights.iter().map(|w| w * c).collect();
            let a = fuse_weighted(&answers, &weights, 3, 8, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let b = fuse_weighted(&answers, &scaled, 3, 8, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            prop_assert_eq!(a, b);
            let sa = top_classes(&class_scores(&answers, &weights, 8));
            let sb = top_classes(&class_scores(&answers, &scaled, 8));
            prop_assert_eq!(sa, sb);
        }

        #[test]
        fn expurgation_weight_forms_agree(answers in arb_words(8, 3), mu in 0.55f64..1.0, m in 0.05f64..0.95, seed in 0u64..100) {
            let x = solve_x(m, 3).unwrap();
            let kept: Vec<AnswerWord> = answers.into_iter().filter(|w| !w.is_full_length()).collect();
            let practical: Vec<f64> = kept.iter().map(|w| (mu * x).powi(-(w.n_definitive() as i32))).collect();
            let derived: Vec<f64> = kept.iter().map(|w| {
                let n = w.n_definitive() as i32;
                mu.powi(-n) * x.powi(3 - n)
            }).collect();
            let a = fuse_weighted(&kept, &practical, 3, 8, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let b = fuse_weighted(&kept, &derived, 3, 8, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn uniform_without_skips_is_majority(rows in prop::collection::vec(prop::collection::vec(0u8..2, 3), 1..9)) {
            let answers: Vec<AnswerWord> = rows.iter().enumerate()
                .map(|(i, r)| AnswerWord::new(i, r.iter().map(|&b| AnswerSymbol::from_bit(b)).collect()))
                .collect();
            let fused = fuse_bitwise(&answers, &WeightScheme::Uniform, 8, &mut rng()).unwrap();
            for i in 0..3 {
                let ones = rows.iter().filter(|r| r[i] == 1).count();
                let zeros = rows.len() - ones;
                if ones != zeros {
                    prop_assert_eq!(fused.decided_bits[i], u8::from(ones > zeros));
                } else {
                    prop_assert!(fused.tie_bits.contains(&i));
                }
            }
        }
    }
}
