//! Fixed scenarios that regenerate the data behind each performance figure.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use super::config::{ExperimentConfig, MuSource, StrategySelector, SweepConfig, SweepParameter};
use super::monte_carlo::{run_monte_carlo_with, RunOptions, MV_LABEL};
use super::report::{write_csv, ExperimentReport};
use crate::analysis::{asymptotic_pc, asymptotic_pc_mv};
use crate::error::{Error, Result};
use crate::estimation::switching_threshold;
use crate::model::{CrowdModel, DistributionSpec};
use crate::numeric::format_sig12;

pub const CURVE_COLUMNS: [&str; 5] = ["x", "method", "pc", "stderr", "analytic_pc"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FigureId {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
}

impl FigureId {
    pub const ALL: [FigureId; 7] =
        [FigureId::Fig2, FigureId::Fig3, FigureId::Fig4, FigureId::Fig5, FigureId::Fig6, FigureId::Fig7, FigureId::Fig8];
}

impl fmt::Display for FigureId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = FigureId::ALL.iter().position(|id| id == self).expect("listed") + 2;
        write!(f, "fig{n}")
    }
}

impl FromStr for FigureId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        FigureId::ALL
            .into_iter()
            .find(|id| id.to_string() == s)
            .ok_or_else(|| Error::Config(format!("unknown figure `{s}`, expected fig2..fig8")))
    }
}

/// One point of one curve.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvePoint {
    pub x: f64,
    pub method: String,
    pub pc: Option<f64>,
    pub stderr: Option<f64>,
    pub analytic_pc: Option<f64>,
}

#[derive(Clone, Copy, Debug)]
pub struct FigureOptions {
    pub trials: usize,
    pub seed: u64,
    pub threads: Option<usize>,
}

impl Default for FigureOptions {
    fn default() -> Self {
        Self { trials: 10_000, seed: 1, threads: None }
    }
}

fn grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let n = ((hi - lo) / step).round() as usize;
    (0..=n).map(|i| ((lo + step * i as f64) * 1e9).round() / 1e9).collect()
}

struct Builder {
    options: FigureOptions,
    points: Vec<CurvePoint>,
    notes: Vec<String>,
}

impl Builder {
    fn run(&mut self, mut config: ExperimentConfig, label: &str) -> Result<ExperimentReport> {
        config.trials = self.options.trials;
        config.seed = self.options.seed;
        config.method.label = Some(label.into());
        let report = run_monte_carlo_with(&config, RunOptions { threads: self.options.threads, timings: false })?;
        for row in &report.rows {
            self.points.push(CurvePoint {
                x: row.sweep.unwrap_or(0.0),
                method: row.method.clone(),
                pc: Some(row.pc),
                stderr: Some(row.stderr),
                analytic_pc: row.analytic_pc,
            });
        }
        self.notes.extend(report.metadata.notes.iter().map(|n| format!("{label}: {n}")));
        Ok(report)
    }

    fn formula(&mut self, x: f64, method: &str, value: f64) {
        self.points.push(CurvePoint { x, method: method.into(), pc: Some(value), stderr: Some(0.0), analytic_pc: Some(value) });
    }
}

fn sweep(parameter: SweepParameter, values: Vec<f64>) -> Option<SweepConfig> {
    Some(SweepConfig { parameter, values })
}

fn experiment(model: CrowdModel, sweep: Option<SweepConfig>) -> ExperimentConfig {
    let mut config = ExperimentConfig::new(model, 1, 0);
    config.sweep = sweep;
    config
}

fn fixed_crowd(workers: usize, p: f64, rho: f64) -> CrowdModel {
    CrowdModel::new(workers, 8, DistributionSpec::fixed(p), DistributionSpec::fixed(rho))
}

fn greedy_sweep(b: &mut Builder, adaptive: bool) -> Result<()> {
    let model = CrowdModel::new(15, 8, DistributionSpec::uniform(0.0, 1.0), DistributionSpec::uniform(0.5, 1.0));
    let alphas = grid(0.0, 1.0, 0.05);
    for strategy in [StrategySelector::Oblivious, StrategySelector::Expurgation] {
        let mut config = experiment(model.clone(), sweep(SweepParameter::GreedyFraction, alphas.clone()));
        config.method.strategy = strategy;
        b.run(config, strategy.label())?;
    }
    if adaptive {
        let mut config = experiment(model.clone(), sweep(SweepParameter::GreedyFraction, alphas));
        config.method.strategy = StrategySelector::Adaptive;
        config.method.mu_source = MuSource::Benchmark;
        b.run(config, "adaptive")?;
    }
    let t = switching_threshold(model.mean_reliability(), model.mean_skip(), model.microtasks)?;
    b.points.push(CurvePoint { x: t.value, method: "threshold".into(), pc: None, stderr: None, analytic_pc: None });
    Ok(())
}

fn build(id: FigureId, b: &mut Builder) -> Result<()> {
    match id {
        FigureId::Fig2 | FigureId::Fig3 => {
            let (model, parameter, values) = if id == FigureId::Fig2 {
                (fixed_crowd(20, 0.5, 0.8), SweepParameter::Skip, grid(0.0, 1.0, 0.1))
            } else {
                (fixed_crowd(20, 0.5, 0.8), SweepParameter::Reliability, grid(0.5, 1.0, 0.05))
            };
            let mut config = experiment(model, sweep(parameter, values));
            config.method.mv_baseline = true;
            b.run(config, "proposed")?;
        }
        FigureId::Fig4 => {
            let model = CrowdModel::new(20, 8, DistributionSpec::uniform(0.0, 1.0), DistributionSpec::uniform(0.6, 1.0));
            let sizes = [5.0, 10.0, 20.0, 40.0, 60.0, 80.0, 100.0, 150.0, 200.0];
            let mut config = experiment(model.clone(), sweep(SweepParameter::Workers, sizes.to_vec()));
            config.method.mv_baseline = true;
            b.run(config, "proposed")?;
            let (mu, m) = (model.mean_reliability(), model.mean_skip());
            for w in sizes {
                let w_count = w as usize;
                b.formula(w, "asymptotic", asymptotic_pc(w_count, model.microtasks, mu, m)?);
                b.formula(w, "asymptotic_majority_vote", asymptotic_pc_mv(w_count, model.microtasks, mu, m)?);
            }
        }
        FigureId::Fig5 => greedy_sweep(b, false)?,
        FigureId::Fig8 => greedy_sweep(b, true)?,
        FigureId::Fig6 => {
            b.notes.push("pc holds the clamped threshold alpha*, analytic_pc the unclamped value; x is mu; N = 3".into());
            for m in grid(0.1, 0.9, 0.1) {
                let method = format!("threshold_m{m}");
                for mu in grid(0.55, 1.0, 0.05) {
                    let t = switching_threshold(mu, m, 3)?;
                    b.points.push(CurvePoint { x: mu, method: method.clone(), pc: Some(t.value), stderr: Some(0.0), analytic_pc: Some(t.unclamped) });
                }
            }
        }
        FigureId::Fig7 => {
            b.notes.push("x is the number T of extra gold-standard microtasks per worker; benchmark, known and majority_vote do not depend on T".into());
            let overheads = [1.0, 2.0, 3.0, 5.0, 10.0, 20.0];
            for n in [3usize, 6, 10] {
                let model = CrowdModel::new(20, 1 << n, DistributionSpec::uniform(0.0, 1.0), DistributionSpec::uniform(0.5, 1.0));
                for &t in &overheads {
                    let mut config = experiment(model.clone(), None);
                    config.method.mu_source = MuSource::Training { questions: t as usize };
                    b.run(config, &format!("training_N{n}"))?;
                    b.points.last_mut().expect("one row").x = t;
                }
                let mut flat = Vec::new();
                for (label, source, mv) in [("benchmark", MuSource::Benchmark, false), ("known", MuSource::Known, true)] {
                    let mut config = experiment(model.clone(), None);
                    config.method.mu_source = source;
                    config.method.mv_baseline = mv;
                    let before = b.points.len();
                    b.run(config, &format!("{label}_N{n}"))?;
                    flat.extend(b.points.drain(before..));
                }
                for point in flat {
                    let method = if point.method == MV_LABEL { format!("majority_vote_N{n}") } else { point.method.clone() };
                    for &t in &overheads {
                        b.points.push(CurvePoint { x: t, method: method.clone(), ..point.clone() });
                    }
                }
            }
        }
    }
    Ok(())
}

/// Runs one figure's scenarios and writes `<fig>_<method>.csv` per curve
/// plus `<fig>.meta.toml`. Returns the written CSV paths.
pub fn reproduce_figure(id: FigureId, out_dir: &Path, options: FigureOptions) -> Result<Vec<PathBuf>> {
    let points = figure_points(id, options)?;
    std::fs::create_dir_all(out_dir)?;
    let mut curves: BTreeMap<String, Vec<&CurvePoint>> = BTreeMap::new();
    for point in &points.0 {
        curves.entry(point.method.clone()).or_default().push(point);
    }
    let mut written = Vec::new();
    for (method, curve) in curves {
        let path = out_dir.join(format!("{id}_{method}.csv"));
        let text = write_csv(
            &CURVE_COLUMNS,
            curve.iter().map(|p| {
                let f = |v: Option<f64>| v.map(format_sig12).unwrap_or_default();
                vec![format_sig12(p.x), p.method.clone(), f(p.pc), f(p.stderr), f(p.analytic_pc)]
            }),
        )?;
        std::fs::write(&path, text)?;
        written.push(path);
    }
    let meta = toml::to_string(&FigureMeta {
        figure: id.to_string(),
        trials: options.trials,
        seed: options.seed,
        version: super::report::artifact_version(),
        notes: points.1,
    })
    .expect("metadata serializes");
    std::fs::write(out_dir.join(format!("{id}.meta.toml")), meta)?;
    Ok(written)
}

#[derive(serde::Serialize)]
struct FigureMeta {
    figure: String,
    trials: usize,
    seed: u64,
    version: String,
    notes: Vec<String>,
}

/// Curve points of a figure without writing anything, with run notes.
pub fn figure_points(id: FigureId, options: FigureOptions) -> Result<(Vec<CurvePoint>, Vec<String>)> {
    if options.trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    let mut b = Builder { options, points: Vec::new(), notes: Vec::new() };
    build(id, &mut b)?;
    Ok((b.points, b.notes))
}
