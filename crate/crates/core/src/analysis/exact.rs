//! Exact per-bit accuracy by enumerating vote profiles.
//!
//! A profile counts, for one reference bit, how many workers voted each way
//! with each number of definitive answers. The per-bit accuracy is
//! `1/2 + 1/2 Σ_S c(F - F') + 1/4 Σ_S' c(F - F')`, where `S` holds the
//! profiles won by the correct value, `S'` the tied ones, `c` the
//! multinomial coefficient and `F`, `F'` the profile probabilities under the
//! two hypotheses. The class accuracy is reported as `(per-bit)^N`.

use rayon::prelude::*;
use serde::Serialize;

use super::tw::tw_pmf;
use crate::error::{Error, Result};
use crate::fusion::solve_x;
use crate::numeric::{binomial_u128, compare_votes, greedy_count, ln_factorials, xlny, CompensatedSum, Comparison};

pub const DEFAULT_PROFILE_CAP: u128 = 10_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ExactPc {
    pub per_bit: f64,
    pub pc: f64,
    /// Number of profiles enumerated.
    pub profiles: u128,
    /// `Σ c·F` over all profiles; 1 for the honest crowd.
    pub mass: f64,
}

#[derive(Clone, Copy, Debug)]
enum Side {
    One,
    Zero,
    Skip,
}

#[derive(Clone, Copy, Debug)]
struct Part {
    side: Side,
    p1: f64,
    p0: f64,
    weight: f64,
    int_weight: u64,
}

#[derive(Clone, Copy, Debug)]
enum Total {
    Exactly(usize),
    AtMost(usize),
}

struct ProfileSpec {
    parts: Vec<Part>,
    ln_numerator: usize,
    total: Total,
    ones_offset: f64,
    ones_offset_int: u64,
    integer_weights: bool,
    ln_fact: Vec<f64>,
    ln_scale: f64,
}

#[derive(Clone, Copy, Default)]
struct Sums {
    win: CompensatedSum,
    tie: CompensatedSum,
    mass: CompensatedSum,
}

impl Sums {
    fn merge(&mut self, other: &Sums) {
        self.win.merge(&other.win);
        self.tie.merge(&other.tie);
        self.mass.merge(&other.mass);
    }
}

#[derive(Clone, Copy)]
struct State {
    ln1: f64,
    ln0: f64,
    ones: f64,
    zeros: f64,
    ones_int: u64,
    zeros_int: u64,
}

impl State {
    fn with(self, part: &Part, q: usize, ln_fact: &[f64]) -> State {
        let qf = q as f64;
        let mut next = self;
        next.ln1 += xlny(qf, part.p1) - ln_fact[q];
        next.ln0 += xlny(qf, part.p0) - ln_fact[q];
        match part.side {
            Side::One => {
                next.ones += qf * part.weight;
                next.ones_int += q as u64 * part.int_weight;
            }
            Side::Zero => {
                next.zeros += qf * part.weight;
                next.zeros_int += q as u64 * part.int_weight;
            }
            Side::Skip => {}
        }
        next
    }
}

impl ProfileSpec {
    fn profile_count(&self) -> u128 {
        let k = self.parts.len() as u128;
        match self.total {
            Total::Exactly(t) => binomial_u128(t as u128 + k - 1, k - 1),
            Total::AtMost(t) => binomial_u128(t as u128 + k, k),
        }
    }

    fn leaf(&self, s: State, sums: &mut Sums) {
        let base = self.ln_fact[self.ln_numerator] + self.ln_scale;
        let f1 = (base + s.ln1).exp();
        let f0 = (base + s.ln0).exp();
        let outcome = if self.integer_weights {
            let ones = s.ones_int + self.ones_offset_int;
            match ones.cmp(&s.zeros_int) {
                std::cmp::Ordering::Greater => Comparison::One,
                std::cmp::Ordering::Equal => Comparison::Tie,
                std::cmp::Ordering::Less => Comparison::Zero,
            }
        } else {
            compare_votes(s.ones + self.ones_offset, s.zeros)
        };
        match outcome {
            Comparison::One => sums.win.add(f1 - f0),
            Comparison::Tie => sums.tie.add(f1 - f0),
            Comparison::Zero => {}
        }
        sums.mass.add(f1);
    }

    fn walk(&self, index: usize, remaining: usize, s: State, sums: &mut Sums) {
        let part = &self.parts[index];
        if index + 1 == self.parts.len() {
            match self.total {
                Total::Exactly(_) => self.leaf(s.with(part, remaining, &self.ln_fact), sums),
                Total::AtMost(_) => {
                    for q in 0..=remaining {
                        self.leaf(s.with(part, q, &self.ln_fact), sums);
                    }
                }
            }
            return;
        }
        for q in 0..=remaining {
            self.walk(index + 1, remaining - q, s.with(part, q, &self.ln_fact), sums);
        }
    }

    fn enumerate(&self) -> Sums {
        let total = match self.total {
            Total::Exactly(t) | Total::AtMost(t) => t,
        };
        let start = State { ln1: 0.0, ln0: 0.0, ones: 0.0, zeros: 0.0, ones_int: 0, zeros_int: 0 };
        if self.parts.len() == 1 {
            let mut sums = Sums::default();
            self.walk(0, total, start, &mut sums);
            return sums;
        }
        // Split on the first part's count; chunks are merged in index order.
        let first = &self.parts[0];
        let chunks: Vec<Sums> = (0..=total)
            .into_par_iter()
            .map(|q| {
                let mut sums = Sums::default();
                self.walk(1, total - q, start.with(first, q, &self.ln_fact), &mut sums);
                sums
            })
            .collect();
        let mut sums = Sums::default();
        for chunk in &chunks {
            sums.merge(chunk);
        }
        sums
    }
}

fn check_common(workers: usize, microtasks: usize, mu: f64, m: f64) -> Result<()> {
    if workers == 0 {
        return Err(Error::InvalidParameter("W must be at least 1".into()));
    }
    if microtasks == 0 {
        return Err(Error::InvalidParameter("N must be at least 1".into()));
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} outside (0, 1]")));
    }
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::InvalidParameter(format!("m = {m} outside [0, 1]")));
    }
    Ok(())
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} outside [0, 1]")));
    }
    Ok(())
}

// Parts for n = -max..=max with the skip part in the middle. Vote weights
// are `base^-|n|`.
fn vote_parts(mu: f64, m: f64, microtasks: usize, max: usize, base: f64, integer_weights: bool) -> Vec<Part> {
    let pmf = tw_pmf(mu, m, microtasks);
    let part = |side: Side, n: usize| {
        let (p1, p0) = match side {
            Side::One => (pmf.vote_prob(1, 1, n), pmf.vote_prob(0, 1, n)),
            Side::Zero => (pmf.vote_prob(1, 0, n), pmf.vote_prob(0, 0, n)),
            Side::Skip => (m, m),
        };
        Part {
            side,
            p1,
            p0,
            weight: base.powi(-(n as i32)),
            int_weight: if integer_weights { 1u64 << n } else { 0 },
        }
    };
    let mut parts: Vec<Part> = (1..=max).rev().map(|n| part(Side::Zero, n)).collect();
    parts.push(part(Side::Skip, 0));
    parts.extend((1..=max).map(|n| part(Side::One, n)));
    parts
}

/// Profile enumerator with a configurable cap on the number of profiles.
#[derive(Clone, Copy, Debug)]
pub struct ProfileEnumerator {
    pub cap: u128,
}

impl Default for ProfileEnumerator {
    fn default() -> Self {
        Self { cap: DEFAULT_PROFILE_CAP }
    }
}

impl ProfileEnumerator {
    pub fn new(cap: u128) -> Self {
        Self { cap }
    }

    fn run(&self, spec: ProfileSpec, microtasks: usize) -> Result<ExactPc> {
        let profiles = spec.profile_count();
        if profiles > self.cap {
            return Err(Error::EnumerationTooLarge { required: profiles, cap: self.cap });
        }
        let sums = spec.enumerate();
        let per_bit = 0.5 + 0.5 * sums.win.value() + 0.25 * sums.tie.value();
        Ok(ExactPc { per_bit, pc: per_bit.powi(microtasks as i32), profiles, mass: sums.mass.value() })
    }

    pub fn honest(&self, workers: usize, microtasks: usize, mu: f64, m: f64) -> Result<ExactPc> {
        self.oblivious(workers, microtasks, mu, m, 0.0)
    }

    /// Oblivious-strategy closed form: honest profiles sum to
    /// `W - Wα`, the multinomial keeps `W!`, both profile probabilities carry
    /// `2^-Wα`, and the greedy votes enter as a fixed `μ^-N Wα` in favour of
    /// the correct value.
    pub fn oblivious(&self, workers: usize, microtasks: usize, mu: f64, m: f64, alpha: f64) -> Result<ExactPc> {
        check_common(workers, microtasks, mu, m)?;
        check_alpha(alpha)?;
        let greedy = greedy_count(workers, alpha);
        let integer_weights = mu == 0.5 && microtasks < 48;
        let spec = ProfileSpec {
            parts: vote_parts(mu, m, microtasks, microtasks, mu, integer_weights),
            ln_numerator: workers,
            total: Total::Exactly(workers - greedy),
            ones_offset: mu.powi(-(microtasks as i32)) * greedy as f64,
            ones_offset_int: if integer_weights { (1u64 << microtasks) * greedy as u64 } else { 0 },
            integer_weights,
            ln_fact: ln_factorials(workers),
            ln_scale: -(greedy as f64) * std::f64::consts::LN_2,
        };
        self.run(spec, microtasks)
    }

    /// Expurgation-strategy closed form: profiles over the
    /// retained lengths `|n| ≤ N - 1` with at most `W - Wα` workers,
    /// multinomial `W!`, and weights `(μx)^-n`.
    pub fn expurgation(&self, workers: usize, microtasks: usize, mu: f64, m: f64, alpha: f64) -> Result<ExactPc> {
        check_common(workers, microtasks, mu, m)?;
        check_alpha(alpha)?;
        let x = solve_x(m, microtasks)?;
        let greedy = greedy_count(workers, alpha);
        let spec = ProfileSpec {
            parts: vote_parts(mu, m, microtasks, microtasks - 1, mu * x, false),
            ln_numerator: workers,
            total: Total::AtMost(workers - greedy),
            ones_offset: 0.0,
            ones_offset_int: 0,
            integer_weights: false,
            ln_fact: ln_factorials(workers),
            ln_scale: 0.0,
        };
        self.run(spec, microtasks)
    }
}

pub fn exact_pc_honest(workers: usize, microtasks: usize, mu: f64, m: f64) -> Result<f64> {
    Ok(ProfileEnumerator::default().honest(workers, microtasks, mu, m)?.pc)
}

pub fn exact_pc_oblivious(workers: usize, microtasks: usize, mu: f64, m: f64, alpha: f64) -> Result<f64> {
    Ok(ProfileEnumerator::default().oblivious(workers, microtasks, mu, m, alpha)?.pc)
}

pub fn exact_pc_expurgation(workers: usize, microtasks: usize, mu: f64, m: f64, alpha: f64) -> Result<f64> {
    Ok(ProfileEnumerator::default().expurgation(workers, microtasks, mu, m, alpha)?.pc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trivial_crowds() {
        assert_eq!(exact_pc_honest(1, 1, 0.8, 1.0).unwrap(), 0.5);
        assert!((exact_pc_honest(1, 1, 0.7, 0.0).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(exact_pc_honest(20, 3, 0.8, 1.0).unwrap(), 0.125);
    }

    #[test]
    fn honest_mass_is_one() {
        for (w, n, mu, m) in [(5, 3, 0.8, 0.4), (20, 3, 0.75, 0.5), (7, 2, 0.5, 0.2)] {
            let r = ProfileEnumerator::default().honest(w, n, mu, m).unwrap();
            assert!((r.mass - 1.0).abs() < 1e-10, "{r:?}");
        }
    }

    #[test]
    fn profile_counts() {
        let r = ProfileEnumerator::default().honest(20, 3, 0.8, 0.5).unwrap();
        assert_eq!(r.profiles, 230_230);
        let r = ProfileEnumerator::default().expurgation(4, 2, 0.8, 0.5, 0.25).unwrap();
        assert_eq!(r.profiles, binomial_u128(3 + 3, 3));
    }

    #[test]
    fn cap_is_checked_first() {
        let err = ProfileEnumerator::new(1000).honest(20, 3, 0.8, 0.5).unwrap_err();
        assert!(matches!(err, Error::EnumerationTooLarge { required: 230_230, cap: 1000 }));
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn no_underflow_at_desk_scale() {
        let pc = exact_pc_honest(20, 3, 0.8, 0.5).unwrap();
        assert!(pc.is_finite() && pc > 0.125 && pc < 1.0);
    }

    #[test]
    fn oblivious_reductions() {
        for (w, n, mu, m) in [(4, 2, 0.8, 0.3), (6, 3, 0.5, 0.5), (3, 1, 0.65, 0.9)] {
            let honest = exact_pc_honest(w, n, mu, m).unwrap();
            let oblivious = exact_pc_oblivious(w, n, mu, m, 0.0).unwrap();
            assert_eq!(honest.to_bits(), oblivious.to_bits());
        }
        assert_eq!(exact_pc_oblivious(5, 3, 0.8, 0.3, 1.0).unwrap(), 0.125);
        assert_eq!(exact_pc_expurgation(5, 3, 0.8, 0.3, 1.0).unwrap(), 0.125);
    }

    #[test]
    fn integer_path_agrees_with_tolerance_path() {
        // nudging μ off 0.5 by less than the tie band must not change ties
        let a = exact_pc_honest(6, 3, 0.5, 0.4).unwrap();
        assert!((a - 0.125).abs() < 1e-12);
        let b = exact_pc_honest(6, 3, 0.5 + 1e-13, 0.4).unwrap();
        assert!((a - b).abs() < 1e-9);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]
        #[test]
        fn honest_is_bounded(w in 1usize..8, n in 1usize..4, mu in 0.5f64..1.0, m in 0.0f64..1.0) {
            let pc = exact_pc_honest(w, n, mu, m).unwrap();
            let floor = 0.5f64.powi(n as i32);
            prop_assert!(pc >= floor - 1e-12 && pc <= 1.0 + 1e-12);
        }
    }
}
