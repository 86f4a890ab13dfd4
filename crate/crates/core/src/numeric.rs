//! Small numerical helpers shared by the fusion rules and the closed forms.

/// Relative tolerance used to classify weighted vote sums as tied.
pub const TIE_RELATIVE_TOLERANCE: f64 = 1e-9;

/// Outcome of comparing the weight behind "1" against the weight behind "0".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Comparison {
    One,
    Zero,
    Tie,
}

/// Compares two nonnegative vote totals with a relative tie band.
pub fn compare_votes(ones: f64, zeros: f64) -> Comparison {
    let scale = ones.abs().max(zeros.abs());
    let diff = ones - zeros;
    if diff.abs() <= TIE_RELATIVE_TOLERANCE * scale {
        Comparison::Tie
    } else if diff > 0.0 {
        Comparison::One
    } else {
        Comparison::Zero
    }
}

/// Gaussian tail probability `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `k * ln(p)` with the convention `0 * ln(0) = 0`.
pub fn xlny(k: f64, p: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * p.ln()
    }
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Exact binomial coefficient in `u128`, saturating on overflow.
pub fn binomial_u128(n: u128, k: u128) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = match acc.checked_mul(n - i) {
            Some(v) => v / (i + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Table of `ln(k!)` for `k = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut table = Vec::with_capacity(n + 1);
    let mut acc = 0.0f64;
    table.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        table.push(acc);
    }
    table
}

/// Neumaier compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if self.sum.abs() >= value.abs() {
            self.compensation += (self.sum - t) + value;
        } else {
            self.compensation += (value - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.compensation);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

/// Rounds `W * alpha` to the nearest integer count (halves away from zero).
pub fn greedy_count(workers: usize, alpha: f64) -> usize {
    let g = (workers as f64 * alpha).round();
    (g.max(0.0) as usize).min(workers)
}

/// Rounds to 12 significant digits and prints the shortest representation
/// that reads back to the rounded value.
pub fn format_sig12(value: f64) -> String {
    if !value.is_finite() {
        return format!("{value}");
    }
    if value == 0.0 {
        return "0".to_string();
    }
    let rounded: f64 = format!("{value:.11e}").parse().unwrap_or(value);
    format!("{rounded}")
}
