//! Closed-form and brute-force accuracy of the fusion rules.

mod asymptotic;
mod audit;
mod exact;
mod oracle;
mod tw;

pub use asymptotic::{
    asymptotic_moments, asymptotic_pc, asymptotic_pc_mv, asymptotic_pc_mv_with, f_g_metrics, AsymptoticMoments,
    MvForm, DEGENERATE_VARIANCE,
};
pub use audit::{formula_audit, render_audit, AuditRow, AUDIT_ALPHAS, AUDIT_MS, AUDIT_MUS, AUDIT_TOLERANCE};
pub use exact::{
    exact_pc_expurgation, exact_pc_honest, exact_pc_oblivious, ExactPc, ProfileEnumerator, DEFAULT_PROFILE_CAP,
};
pub use oracle::{oracle_evaluate, oracle_pc, OracleResult, DEFAULT_ORACLE_CAP};
pub use tw::{tw_pmf, TwPmf};
