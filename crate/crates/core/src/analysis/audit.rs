//! Side-by-side comparison of the closed forms against the brute-force
//! oracle on small crowds.

use serde::Serialize;

use super::exact::ProfileEnumerator;
use super::oracle::{oracle_evaluate, DEFAULT_ORACLE_CAP};
use crate::error::Result;
use crate::fusion::StrategyKind;

pub const AUDIT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AuditRow {
    pub strategy: StrategyKind,
    pub workers: usize,
    pub microtasks: usize,
    pub mu: f64,
    pub m: f64,
    pub alpha: f64,
    pub formula_pc: f64,
    pub oracle_pc: f64,
    /// Closed-form per-bit value and the oracle's first-bit marginal.
    pub formula_per_bit: f64,
    pub oracle_per_bit: f64,
}

impl AuditRow {
    pub fn difference(&self) -> f64 {
        self.formula_pc - self.oracle_pc
    }

    pub fn agrees(&self) -> bool {
        self.difference().abs() <= AUDIT_TOLERANCE
    }
}

pub const AUDIT_MUS: [f64; 2] = [0.6, 0.8];
pub const AUDIT_MS: [f64; 3] = [0.3, 0.5, 0.7];
pub const AUDIT_ALPHAS: [f64; 5] = [0.0, 0.25, 0.5, 0.75, 1.0];

/// Oblivious and expurgation closed forms against the oracle over
/// `μ × m × α` at fixed `W` and `N`.
pub fn formula_audit(workers: usize, microtasks: usize) -> Result<Vec<AuditRow>> {
    let enumerator = ProfileEnumerator::default();
    let mut rows = Vec::new();
    for strategy in [StrategyKind::Oblivious, StrategyKind::Expurgation] {
        for &mu in &AUDIT_MUS {
            for &m in &AUDIT_MS {
                for &alpha in &AUDIT_ALPHAS {
                    let formula = match strategy {
                        StrategyKind::Expurgation => enumerator.expurgation(workers, microtasks, mu, m, alpha)?,
                        _ => enumerator.oblivious(workers, microtasks, mu, m, alpha)?,
                    };
                    let oracle = oracle_evaluate(workers, microtasks, mu, m, alpha, strategy, DEFAULT_ORACLE_CAP)?;
                    rows.push(AuditRow {
                        strategy,
                        workers,
                        microtasks,
                        mu,
                        m,
                        alpha,
                        formula_pc: formula.pc,
                        oracle_pc: oracle.pc,
                        formula_per_bit: formula.per_bit,
                        oracle_per_bit: oracle.per_bit[0],
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Markdown rendering of an audit, one table row per grid point.
pub fn render_audit(rows: &[AuditRow]) -> String {
    let mut out = String::new();
    out.push_str("# Closed-form audit against exhaustive enumeration\n\n");
    out.push_str("Generated by the `acceptance` test target; do not edit by hand.\n\n");
    out.push_str(&format!(
        "`formula` is the closed form for the strategy, `oracle` the exhaustive expectation over \
         every joint worker outcome under the same strategy, with ties counted as half correct. \
         Rows agree when the class accuracies differ by at most {AUDIT_TOLERANCE:e}.\n\n"
    ));
    for strategy in [StrategyKind::Oblivious, StrategyKind::Expurgation] {
        let subset: Vec<&AuditRow> = rows.iter().filter(|r| r.strategy == strategy).collect();
        let agree = subset.iter().filter(|r| r.agrees()).count();
        out.push_str(&format!("## {}\n\n{agree} of {} grid points agree.\n\n", strategy.label(), subset.len()));
        out.push_str("| W | N | mu | m | alpha | formula P_c | oracle P_c | difference | formula per-bit | oracle per-bit | agrees |\n");
        out.push_str("|---|---|---|---|---|---|---|---|---|---|---|\n");
        for r in subset {
            out.push_str(&format!(
                "| {} | {} | {} | {} | {} | {:.12} | {:.12} | {:+.3e} | {:.12} | {:.12} | {} |\n",
                r.workers,
                r.microtasks,
                r.mu,
                r.m,
                r.alpha,
                r.formula_pc,
                r.oracle_pc,
                r.difference(),
                r.formula_per_bit,
                r.oracle_per_bit,
                if r.agrees() { "yes" } else { "no" }
            ));
        }
        out.push('\n');
    }
    out
}
