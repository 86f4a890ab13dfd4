use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{ExperimentConfig, MethodConfig, MuSource, SchemeKind, StrategySelector};
use super::report::{artifact_version, standard_error, ExperimentReport, ReportMetadata, ReportRow};
use super::rng::{stream, StreamTag};
use crate::analysis::exact_pc_honest;
use crate::error::{Error, Result};
use crate::estimation::{
    estimate_m_alpha, estimate_mu_benchmark, estimate_mu_benchmark_partial, estimate_mu_training, select_strategy,
    LengthHistogram, StrategyDecision,
};
use crate::fusion::{apply_strategy, fuse_bitwise, fuse_weighted, StrategyKind, StrategyParams, WeightScheme};
use crate::model::{
    draw_truth, generate_answers, sample_profiles, AnswerSymbol, AnswerWord, ClassDecision, CrowdModel, TruthWord,
    WorkerProfile,
};

pub const MV_LABEL: &str = "majority_vote";

/// Reliabilities passed to the Chair–Varshney rule are kept this far from
/// 0 and 1 so that every log-odds weight is finite.
pub const RELIABILITY_CLAMP: f64 = 1e-9;

/// `μ` estimates are confined to this range before weighting.
pub const MU_WEIGHT_RANGE: (f64, f64) = (0.5, 1.0);

/// Lower bound on the `m` used to solve for the expurgation weight base.
pub const M_WEIGHT_FLOOR: f64 = 0.01;

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Worker threads; the global pool is used when absent.
    pub threads: Option<usize>,
    /// Record per-cell wall time in `runtime_ms`. Off by default so that
    /// reports are byte-stable.
    pub timings: bool,
}

// How each trial of a cell is weighted and filtered.
struct CellPlan {
    strategy: StrategyKind,
    m: f64,
    // Greedy workers are expected, so the benchmark skips full-length words.
    greedy_aware: bool,
    decision: Option<StrategyDecision>,
}

struct Runner<'a> {
    config: &'a ExperimentConfig,
    method: &'a MethodConfig,
}

struct Crowd {
    truth: TruthWord,
    profiles: Vec<WorkerProfile>,
    answers: Vec<AnswerWord>,
}

fn draw_crowd(model: &CrowdModel, rng: &mut ChaCha8Rng) -> Crowd {
    let truth = draw_truth(model, rng);
    let profiles = sample_profiles(model, rng);
    let answers = generate_answers(&profiles, &truth, rng);
    Crowd { truth, profiles, answers }
}

fn training_answers(model: &CrowdModel, profiles: &[WorkerProfile], questions: usize, rng: &mut ChaCha8Rng) -> (Vec<u8>, Vec<AnswerWord>) {
    let gold: Vec<u8> = (0..questions).map(|_| rng.random_range(0..2)).collect();
    let truth = TruthWord { class_index: 0, bits: gold.clone() };
    let training_profiles: Vec<WorkerProfile> = profiles
        .iter()
        .map(|p| {
            if p.greedy {
                WorkerProfile::greedy(questions)
            } else {
                let skip = (0..questions).map(|_| model.skip.sample(rng)).collect();
                let rho = (0..questions).map(|_| model.reliability.sample(rng)).collect();
                WorkerProfile::honest(skip, rho)
            }
        })
        .collect();
    let answers = generate_answers(&training_profiles, &truth, rng);
    (gold, answers)
}

impl Runner<'_> {
    fn mu_for(
        &self,
        model: &CrowdModel,
        crowd: &Crowd,
        greedy_aware: bool,
        training_rng: &mut ChaCha8Rng,
        rng: &mut ChaCha8Rng,
    ) -> Result<f64> {
        let mu = match self.method.mu_source {
            MuSource::Known => model.mean_reliability(),
            MuSource::Training { questions } => {
                let (gold, answers) = training_answers(model, &crowd.profiles, questions, training_rng);
                estimate_mu_training(&answers, &gold)?.mu_hat
            }
            MuSource::Benchmark if greedy_aware => estimate_mu_benchmark_partial(&crowd.answers, rng)?.mu_hat,
            MuSource::Benchmark => estimate_mu_benchmark(&crowd.answers, rng)?.mu_hat,
        };
        Ok(mu.clamp(MU_WEIGHT_RANGE.0, MU_WEIGHT_RANGE.1))
    }

    fn plan(&self, model: &CrowdModel, cell: u64) -> Result<CellPlan> {
        let m = model.mean_skip().max(M_WEIGHT_FLOOR);
        if let Some(strategy) = self.method.strategy.fixed() {
            let greedy_aware = strategy == StrategyKind::Expurgation;
            return Ok(CellPlan { strategy, m, greedy_aware, decision: None });
        }
        let seed = self.config.seed;
        let estimates = (0..self.method.calibration_trials as u64)
            .into_par_iter()
            .map(|k| {
                let mut rng = stream(seed, cell, k, StreamTag::Calibration);
                let crowd = draw_crowd(model, &mut rng);
                let mut training = stream(seed, cell, k, StreamTag::Training);
                let mu = self.mu_for(model, &crowd, true, &mut training, &mut rng)?;
                let hist = LengthHistogram::from_answers(&crowd.answers, model.microtasks)?;
                let fit = estimate_m_alpha(&hist, model.workers, model.microtasks)?;
                Ok((mu, fit.m, fit.alpha))
            })
            .collect::<Result<Vec<_>>>()?;
        let k = estimates.len() as f64;
        let mean = |f: fn(&(f64, f64, f64)) -> f64| estimates.iter().map(f).sum::<f64>() / k;
        let (mu, m_hat, alpha) = (mean(|e| e.0), mean(|e| e.1), mean(|e| e.2));
        let decision = select_strategy(mu, m_hat, alpha, model.microtasks)?;
        Ok(CellPlan { strategy: decision.chosen, m: decision.m_used, greedy_aware: true, decision: Some(decision) })
    }

    fn trial(&self, model: &CrowdModel, plan: &CellPlan, cell: u64, t: u64) -> Result<(bool, bool)> {
        let seed = self.config.seed;
        let mut rng = stream(seed, cell, t, StreamTag::Trial);
        let crowd = draw_crowd(model, &mut rng);
        let target = ClassDecision::Class(crowd.truth.class_index);
        let (n, classes) = (model.microtasks, model.classes);

        let fused = match self.method.scheme {
            SchemeKind::Uniform => fuse_bitwise(&crowd.answers, &WeightScheme::Uniform, classes, &mut rng)?,
            SchemeKind::ChairVarshney => {
                let lo = RELIABILITY_CLAMP;
                let reliabilities = crowd
                    .profiles
                    .iter()
                    .map(|p| p.reliabilities.iter().map(|r| r.clamp(lo, 1.0 - lo)).collect())
                    .collect();
                fuse_bitwise(&crowd.answers, &WeightScheme::Oracle { reliabilities }, classes, &mut rng)?
            }
            SchemeKind::RejectWeighted => {
                let mut training = stream(seed, cell, t, StreamTag::Training);
                let mu = self.mu_for(model, &crowd, plan.greedy_aware, &mut training, &mut rng)?;
                let retained = apply_strategy(&crowd.answers, plan.strategy, StrategyParams { mu, m: plan.m })?;
                fuse_weighted(&retained.answers, &retained.weights, n, classes, &mut rng)?
            }
        };

        let mv_correct = if self.method.mv_baseline {
            let mut baseline = stream(seed, cell, t, StreamTag::Baseline);
            let forced: Vec<AnswerWord> = crowd
                .answers
                .iter()
                .map(|w| {
                    let symbols = w
                        .symbols
                        .iter()
                        .map(|&s| match s {
                            AnswerSymbol::Skip => AnswerSymbol::from_bit(u8::from(baseline.random_bool(0.5))),
                            s => s,
                        })
                        .collect();
                    AnswerWord::new(w.worker_id, symbols)
                })
                .collect();
            fuse_bitwise(&forced, &WeightScheme::Uniform, classes, &mut baseline)?.class == target
        } else {
            false
        };
        Ok((fused.class == target, mv_correct))
    }

    fn analytic(&self, model: &CrowdModel, plan: &CellPlan) -> Option<f64> {
        let exact_applies = self.method.analytic
            && self.method.scheme == SchemeKind::RejectWeighted
            && self.method.mu_source == MuSource::Known
            && plan.strategy == StrategyKind::Honest
            && model.greedy_workers() == 0
            && model.microtasks < usize::BITS as usize
            && model.classes == 1usize << model.microtasks;
        if !exact_applies {
            return None;
        }
        exact_pc_honest(model.workers, model.microtasks, model.mean_reliability(), model.mean_skip()).ok()
    }
}

pub fn run_monte_carlo(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_monte_carlo_with(config, RunOptions::default())
}

/// Runs every cell of the experiment. Each trial draws from its own stream,
/// and per-cell results are integer counts, so the report does not depend on
/// the number of threads.
pub fn run_monte_carlo_with(config: &ExperimentConfig, options: RunOptions) -> Result<ExperimentReport> {
    config.validate()?;
    match options.threads {
        Some(threads) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
            pool.install(|| run_cells(config, options))
        }
        None => run_cells(config, options),
    }
}

fn run_cells(config: &ExperimentConfig, options: RunOptions) -> Result<ExperimentReport> {
    let runner = Runner { config, method: &config.method };
    let label = config.method.label();
    let mut rows = Vec::new();
    let mut notes = Vec::new();
    for (cell, (sweep, model)) in config.cells()?.into_iter().enumerate() {
        let started = Instant::now();
        let cell = cell as u64;
        let plan = runner.plan(&model, cell)?;
        let outcomes = (0..config.trials as u64)
            .into_par_iter()
            .map(|t| runner.trial(&model, &plan, cell, t))
            .collect::<Result<Vec<_>>>()?;
        let correct = outcomes.iter().filter(|o| o.0).count();
        let mv_correct = outcomes.iter().filter(|o| o.1).count();
        let runtime_ms = options.timings.then(|| started.elapsed().as_secs_f64() * 1e3);

        if let Some(d) = &plan.decision {
            notes.push(format!(
                "cell {cell}: adaptive chose {} from calibration estimates mu={:.4} m={:.4} alpha={:.4} (threshold {:.4}) over {} trials",
                d.chosen.label(),
                d.mu_hat,
                d.m_hat,
                d.alpha_hat,
                d.threshold.value,
                config.method.calibration_trials
            ));
        }
        let pc = correct as f64 / config.trials as f64;
        rows.push(ReportRow {
            sweep,
            method: label.clone(),
            pc,
            stderr: standard_error(pc, config.trials),
            analytic_pc: runner.analytic(&model, &plan),
            runtime_ms,
        });
        if config.method.mv_baseline {
            let pc = mv_correct as f64 / config.trials as f64;
            rows.push(ReportRow {
                sweep,
                method: MV_LABEL.into(),
                pc,
                stderr: standard_error(pc, config.trials),
                analytic_pc: None,
                runtime_ms,
            });
        }
    }
    if config.method.strategy == StrategySelector::Adaptive {
        notes.push("adaptive estimates are pooled per sweep cell over a calibration batch, not per task".into());
    }
    Ok(ExperimentReport {
        rows,
        metadata: ReportMetadata {
            version: artifact_version(),
            seed: config.seed,
            trials: config.trials,
            notes,
            config: config.to_toml_string(),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::DistributionSpec;

    fn config(p: f64, rho: f64, trials: usize) -> ExperimentConfig {
        let model = CrowdModel::new(5, 4, DistributionSpec::fixed(p), DistributionSpec::fixed(rho));
        let mut c = ExperimentConfig::new(model, trials, 9);
        c.method.mv_baseline = true;
        c
    }

    #[test]
    fn perfect_crowd_is_always_right() {
        let report = run_monte_carlo(&config(0.0, 1.0, 500)).unwrap();
        for row in &report.rows {
            assert_eq!(row.pc, 1.0, "{row:?}");
        }
        assert_eq!(report.rows[0].analytic_pc, Some(1.0));
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let c = config(0.4, 0.7, 2000);
        let one = run_monte_carlo_with(&c, RunOptions { threads: Some(1), timings: false }).unwrap();
        let many = run_monte_carlo_with(&c, RunOptions { threads: Some(8), timings: false }).unwrap();
        assert_eq!(one.to_csv().unwrap(), many.to_csv().unwrap());
    }

    #[test]
    fn adaptive_records_its_choice() {
        let model = CrowdModel::new(20, 8, DistributionSpec::uniform(0.0, 1.0), DistributionSpec::uniform(0.5, 1.0))
            .with_greedy_fraction(0.8);
        let mut c = ExperimentConfig::new(model, 200, 3);
        c.method.strategy = StrategySelector::Adaptive;
        c.method.mu_source = MuSource::Benchmark;
        c.method.calibration_trials = 20;
        let report = run_monte_carlo(&c).unwrap();
        assert!(report.metadata.notes[0].contains("adaptive chose expurgation"), "{:?}", report.metadata.notes);
    }

    #[test]
    fn every_scheme_and_source_runs() {
        for scheme in [SchemeKind::Uniform, SchemeKind::ChairVarshney, SchemeKind::RejectWeighted] {
            for source in [MuSource::Known, MuSource::Benchmark, MuSource::Training { questions: 4 }] {
                let mut c = config(0.3, 0.8, 200);
                c.method.scheme = scheme;
                c.method.mu_source = source;
                let pc = run_monte_carlo(&c).unwrap().rows[0].pc;
                assert!(pc > 0.5, "{scheme:?} {source:?} {pc}");
            }
        }
    }
}
