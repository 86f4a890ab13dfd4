use serde::Serialize;

use crate::numeric::binomial;

/// Distribution of one worker's signed contribution `T_w` to a single bit's
/// test statistic, at mean parameters. `T_w = 0` for a skip, otherwise
/// `±μ^-n` where `n` counts the worker's definitive answers and the sign is
/// the vote.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TwPmf {
    pub mu: f64,
    pub m: f64,
    pub microtasks: usize,
    /// `φ_n` for `n = 1..=N` (index `n - 1`): the bit is answered and `n`
    /// answers are definitive in total.
    pub phi: Vec<f64>,
}

impl TwPmf {
    pub fn skip_prob(&self) -> f64 {
        self.m
    }

    /// `P(T = (-1)^(vote+1) μ^-n | H_hypothesis)`.
    pub fn vote_prob(&self, hypothesis: u8, vote: u8, n: usize) -> f64 {
        if n == 0 || n > self.microtasks {
            return 0.0;
        }
        let p = if hypothesis == vote { self.mu } else { 1.0 - self.mu };
        p * self.phi[n - 1]
    }

    pub fn value(&self, vote: u8, n: usize) -> f64 {
        let magnitude = self.mu.powi(-(n as i32));
        if vote == 1 {
            magnitude
        } else {
            -magnitude
        }
    }

    pub fn total_mass(&self, hypothesis: u8) -> f64 {
        let votes: f64 = (1..=self.microtasks)
            .map(|n| self.vote_prob(hypothesis, 0, n) + self.vote_prob(hypothesis, 1, n))
            .sum();
        self.skip_prob() + votes
    }
}

pub fn tw_pmf(mu: f64, m: f64, microtasks: usize) -> TwPmf {
    let n_tasks = microtasks as u64;
    let phi = (1..=microtasks)
        .map(|n| {
            binomial(n_tasks - 1, n as u64 - 1) * (1.0 - m).powi(n as i32) * m.powi((microtasks - n) as i32)
        })
        .collect();
    TwPmf { mu, m, microtasks, phi }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Probability the bit is answered with the given vote and exactly `n`
    // answers are definitive, summed over every skip pattern of the other
    // N - 1 bits.
    fn enumerate(mu: f64, m: f64, microtasks: usize, hypothesis: u8, vote: u8, n: usize) -> f64 {
        let others = microtasks - 1;
        let answer = if hypothesis == vote { mu } else { 1.0 - mu };
        (0u32..1 << others)
            .filter(|pattern| pattern.count_ones() as usize + 1 == n)
            .map(|pattern| {
                let mut p = (1.0 - m) * answer;
                for j in 0..others {
                    p *= if pattern >> j & 1 == 1 { 1.0 - m } else { m };
                }
                p
            })
            .sum()
    }

    #[test]
    fn skip_mass_is_m() {
        for mu in [0.6, 0.9] {
            for n in [1, 3, 5] {
                assert_eq!(tw_pmf(mu, 0.35, n).skip_prob(), 0.35);
            }
        }
    }

    #[test]
    fn normalized_and_symmetric() {
        let pmf = tw_pmf(0.8, 0.5, 3);
        for h in [0, 1] {
            assert!((pmf.total_mass(h) - 1.0).abs() < 1e-12);
        }
        for n in 1..=3 {
            assert_eq!(pmf.vote_prob(1, 1, n), pmf.vote_prob(0, 0, n));
            assert_eq!(pmf.vote_prob(1, 0, n), pmf.vote_prob(0, 1, n));
        }
    }

    #[test]
    fn matches_skip_pattern_enumeration() {
        let pmf = tw_pmf(0.8, 0.5, 3);
        let direct = enumerate(0.8, 0.5, 3, 1, 1, 2);
        assert!((pmf.vote_prob(1, 1, 2) - direct).abs() < 1e-15);
        assert_eq!(pmf.value(1, 2), 0.8f64.powi(-2));
        for (mu, m, n_tasks) in [(0.7, 0.2, 4), (0.95, 0.8, 5), (0.55, 0.5, 1)] {
            let pmf = tw_pmf(mu, m, n_tasks);
            for n in 1..=n_tasks {
                for (h, v) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                    assert!((pmf.vote_prob(h, v, n) - enumerate(mu, m, n_tasks, h, v, n)).abs() < 1e-14);
                }
            }
        }
    }
}
