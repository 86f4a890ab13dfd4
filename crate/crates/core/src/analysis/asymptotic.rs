//! Large-crowd Gaussian approximations.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::q_function;

/// Variances at or below this are treated as a point mass.
pub const DEGENERATE_VARIANCE: f64 = 1e-15;

/// Mean and variance of the per-bit test statistic under the correct
/// hypothesis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AsymptoticMoments {
    pub mean: f64,
    pub variance: f64,
}

fn check(workers: usize, microtasks: usize, mu: f64, m: f64) -> Result<()> {
    if workers == 0 || microtasks == 0 {
        return Err(Error::InvalidParameter("W and N must be at least 1".into()));
    }
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::InvalidParameter(format!("mu = {mu} outside (0, 1]")));
    }
    if !(0.0..=1.0).contains(&m) {
        return Err(Error::InvalidParameter(format!("m = {m} outside [0, 1]")));
    }
    Ok(())
}

pub fn asymptotic_moments(workers: usize, microtasks: usize, mu: f64, m: f64) -> Result<AsymptoticMoments> {
    check(workers, microtasks, mu, m)?;
    let w = workers as f64;
    let k = microtasks as i32 - 1;
    let mean = w * (2.0 * mu - 1.0) * (1.0 - m) / mu * (1.0 / mu - (1.0 / mu - 1.0) * m).powi(k);
    let mu2 = mu * mu;
    let variance = w * (1.0 - m) / mu2 * (1.0 / mu2 - (1.0 / mu2 - 1.0) * m).powi(k) - mean * mean / w;
    let slack = 1e-12 * (mean * mean / w).max(1.0);
    let variance = if variance < 0.0 && variance >= -slack { 0.0 } else { variance };
    Ok(AsymptoticMoments { mean, variance })
}

fn pc_from_moments(moments: AsymptoticMoments, microtasks: usize) -> Result<f64> {
    let n = microtasks as i32;
    if moments.variance <= DEGENERATE_VARIANCE {
        if moments.mean > 0.0 {
            return Ok(1.0);
        }
        if moments.mean == 0.0 {
            return Ok(0.5f64.powi(n));
        }
        return Err(Error::InvalidParameter("statistic concentrates on the wrong value".into()));
    }
    Ok(q_function(-moments.mean / moments.variance.sqrt()).powi(n))
}

/// Class accuracy of reject-weighted voting as `W` grows.
pub fn asymptotic_pc(workers: usize, microtasks: usize, mu: f64, m: f64) -> Result<f64> {
    pc_from_moments(asymptotic_moments(workers, microtasks, mu, m)?, microtasks)
}

/// Exponent used in the conventional majority-vote approximation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MvForm {
    /// `Q(-W(2l-1) / √(4Wl(1-l)))`.
    #[default]
    Clt,
    /// `Q(-√(W²(2l-1) / (4l - 4l²)))`.
    SquaredWorkers,
}

/// Forced-response majority vote: a would-be skip becomes a fair guess, so
/// every answer is correct with probability `l = μ + m(1/2 - μ)`.
pub fn asymptotic_pc_mv(workers: usize, microtasks: usize, mu: f64, m: f64) -> Result<f64> {
    asymptotic_pc_mv_with(workers, microtasks, mu, m, MvForm::Clt)
}

pub fn asymptotic_pc_mv_with(workers: usize, microtasks: usize, mu: f64, m: f64, form: MvForm) -> Result<f64> {
    check(workers, microtasks, mu, m)?;
    let w = workers as f64;
    let l = mu + m * (0.5 - mu);
    let denominator = 4.0 * l * (1.0 - l);
    let n = microtasks as i32;
    if denominator <= DEGENERATE_VARIANCE {
        return pc_from_moments(AsymptoticMoments { mean: 2.0 * l - 1.0, variance: 0.0 }, microtasks);
    }
    let argument = match form {
        MvForm::Clt => w * (2.0 * l - 1.0) / (w * denominator).sqrt(),
        MvForm::SquaredWorkers => {
            let inner = w * w * (2.0 * l - 1.0) / denominator;
            if inner < 0.0 {
                return Err(Error::InvalidParameter(format!("squared-workers form undefined for l = {l}")));
            }
            inner.sqrt()
        }
    };
    Ok(q_function(-argument).powi(n))
}

/// Quality scalars `(f, g)` with `f = (1-m)(2μ-1)² g^(N-1)` and
/// `g = (1-(1-μ)m)² / (1-(1-μ²)m)`, so that `M²/V = W / (1/f - 1)`.
pub fn f_g_metrics(mu: f64, m: f64, microtasks: usize) -> (f64, f64) {
    let g = (1.0 - (1.0 - mu) * m).powi(2) / (1.0 - (1.0 - mu * mu) * m);
    let f = (1.0 - m) * (2.0 * mu - 1.0).powi(2) * g.powi(microtasks as i32 - 1);
    (f, g)
}
