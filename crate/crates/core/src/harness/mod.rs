//! Seeded Monte Carlo experiments, figure scenarios, answer files and the
//! offline aggregation pipeline.

mod aggregate;
mod answers;
mod config;
mod figures;
mod monte_carlo;
mod report;
mod rng;

pub use aggregate::{aggregate_offline, AggregateOptions, AggregateReport};
pub use answers::{
    answers_to_string, parse_answer_file, parse_answers_str, parse_gold_file, parse_gold_str, parse_symbol,
    symbol_token, write_answer_file,
};
pub use config::{ExperimentConfig, MethodConfig, MuSource, SchemeKind, StrategySelector, SweepConfig, SweepParameter};
pub use figures::{figure_points, reproduce_figure, CurvePoint, FigureId, FigureOptions, CURVE_COLUMNS};
pub use monte_carlo::{
    run_monte_carlo, run_monte_carlo_with, RunOptions, MU_WEIGHT_RANGE, MV_LABEL, M_WEIGHT_FLOOR, RELIABILITY_CLAMP,
};
pub use report::{
    artifact_version, emit_report, metadata_path, standard_error, write_csv, ExperimentReport, ReportMetadata,
    ReportRow, REPORT_COLUMNS,
};
pub use rng::{stream, stream_id, StreamTag};
