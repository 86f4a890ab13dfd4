//! Crowdsourced M-ary classification from binary microtasks with a reject
//! option.
//!
//! Workers answer `N` yes/no microtasks and may skip any of them. Their
//! answer words are fused bit by bit with weights that depend on how many
//! definitive answers each worker gave. The crate also covers crowds with
//! greedy workers (full-length random answers), estimation of the crowd
//! parameters, closed-form and asymptotic performance, and a seeded Monte
//! Carlo harness.

pub mod analysis;
pub mod error;
pub mod estimation;
pub mod fusion;
pub mod harness;
pub mod model;
pub mod numeric;

pub use error::{Error, Result};
pub use fusion::{FusionResult, StrategyKind, WeightScheme};
pub use model::{AnswerSymbol, AnswerWord, ClassDecision, CrowdModel, DistributionSpec, TruthWord, WorkerProfile};
