use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use skipvote::analysis::{asymptotic_pc, asymptotic_pc_mv_with, MvForm, ProfileEnumerator, DEFAULT_PROFILE_CAP};
use skipvote::estimation::{
    estimate_m_alpha, estimate_mu_benchmark, estimate_mu_training, switching_threshold, LengthHistogram,
};
use skipvote::harness::{
    aggregate_offline, emit_report, parse_answer_file, parse_gold_file, reproduce_figure, run_monte_carlo_with,
    stream, AggregateOptions, ExperimentConfig, FigureId, FigureOptions, RunOptions, StrategySelector, StreamTag,
};
use skipvote::numeric::format_sig12;
use skipvote::{Error, Result};

#[derive(Parser)]
#[command(name = "skipvote", version, about = "Fusion of crowd answers with a skip option")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExactStrategy {
    Honest,
    Oblivious,
    Expurgation,
}

#[derive(Clone, Copy, ValueEnum)]
enum AggregateStrategy {
    Adaptive,
    Honest,
    Oblivious,
    Expurgation,
}

impl From<AggregateStrategy> for StrategySelector {
    fn from(s: AggregateStrategy) -> Self {
        match s {
            AggregateStrategy::Adaptive => StrategySelector::Adaptive,
            AggregateStrategy::Honest => StrategySelector::Honest,
            AggregateStrategy::Oblivious => StrategySelector::Oblivious,
            AggregateStrategy::Expurgation => StrategySelector::Expurgation,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment described by a TOML config.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        threads: Option<usize>,
        /// Fill the runtime_ms column (makes the report time-dependent).
        #[arg(long)]
        timings: bool,
    },
    /// Exact class accuracy from profile enumeration.
    Exact {
        #[arg(long, value_enum)]
        strategy: ExactStrategy,
        #[arg(long = "W")]
        workers: usize,
        #[arg(long = "N")]
        microtasks: usize,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        m: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = DEFAULT_PROFILE_CAP)]
        cap: u128,
    },
    /// Large-crowd approximation of the class accuracy.
    Asymptotic {
        #[arg(long = "W")]
        workers: usize,
        #[arg(long = "N")]
        microtasks: usize,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        m: f64,
        /// Forced-response majority voting instead of reject weighting.
        #[arg(long)]
        mv: bool,
        /// With --mv, use the `W²` numerator under the square root.
        #[arg(long, requires = "mv")]
        squared: bool,
    },
    /// Estimate crowd parameters from an answer file.
    Estimate {
        #[arg(long)]
        answers: PathBuf,
        /// Gold bits for training questions; the answers are then read as
        /// answers to those questions.
        #[arg(long)]
        gold: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Switching threshold on the greedy fraction.
    Threshold {
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        m: f64,
        #[arg(long = "N")]
        microtasks: usize,
    },
    /// Fuse an answer file end to end.
    Aggregate {
        #[arg(long)]
        answers: PathBuf,
        #[arg(long = "M")]
        classes: Option<usize>,
        #[arg(long, value_enum, default_value = "adaptive")]
        strategy: AggregateStrategy,
        /// Known mean reliability; estimated from the answers otherwise.
        #[arg(long)]
        mu: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Regenerate the curve data of one figure.
    Reproduce {
        #[arg(long)]
        figure: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        threads: Option<usize>,
    },
}

fn print_fields(out: &mut impl Write, fields: &[(&str, String)]) -> Result<()> {
    for (key, value) in fields {
        writeln!(out, "{key} = {value}")?;
    }
    Ok(())
}

fn num(v: f64) -> String {
    format_sig12(v)
}

fn run(cli: Cli, out: &mut impl Write) -> Result<()> {
    match cli.command {
        Command::Simulate { config, out: report_path, threads, timings } => {
            let config = ExperimentConfig::load(&config).map_err(|e| match e {
                Error::Io(io) => Error::Config(format!("cannot read config: {io}")),
                other => other,
            })?;
            let report = run_monte_carlo_with(&config, RunOptions { threads, timings })?;
            emit_report(&report, &report_path)?;
        }
        Command::Exact { strategy, workers, microtasks, mu, m, alpha, cap } => {
            let enumerator = ProfileEnumerator::new(cap);
            let r = match strategy {
                ExactStrategy::Honest => enumerator.honest(workers, microtasks, mu, m)?,
                ExactStrategy::Oblivious => enumerator.oblivious(workers, microtasks, mu, m, alpha)?,
                ExactStrategy::Expurgation => enumerator.expurgation(workers, microtasks, mu, m, alpha)?,
            };
            print_fields(
                out,
                &[
                    ("pc", num(r.pc)),
                    ("per_bit", num(r.per_bit)),
                    ("profiles", r.profiles.to_string()),
                    ("mass", num(r.mass)),
                ],
            )?;
        }
        Command::Asymptotic { workers, microtasks, mu, m, mv, squared } => {
            let pc = if mv {
                let form = if squared { MvForm::SquaredWorkers } else { MvForm::Clt };
                asymptotic_pc_mv_with(workers, microtasks, mu, m, form)?
            } else {
                asymptotic_pc(workers, microtasks, mu, m)?
            };
            print_fields(out, &[("pc", num(pc))])?;
        }
        Command::Estimate { answers, gold, seed } => {
            let (n, words) = parse_answer_file(&answers)?;
            match gold {
                Some(gold) => {
                    let gold = parse_gold_file(&gold)?;
                    let r = estimate_mu_training(&words, &gold)?;
                    print_fields(out, &[("mu_hat", num(r.mu_hat)), ("excluded_workers", r.excluded_workers.to_string())])?;
                }
                None => {
                    let mut rng = stream(seed, 0, 0, StreamTag::Aggregate);
                    let r = estimate_mu_benchmark(&words, &mut rng)?;
                    let hist = LengthHistogram::from_answers(&words, n)?;
                    let fit = estimate_m_alpha(&hist, words.len(), n)?;
                    print_fields(out, &[
                        ("mu_hat", num(r.mu_hat)),
                        ("excluded_workers", r.excluded_workers.to_string()),
                        ("m_hat", num(fit.m)),
                        ("alpha_hat", num(fit.alpha)),
                    ])?;
                }
            }
        }
        Command::Threshold { mu, m, microtasks } => {
            let t = switching_threshold(mu, m, microtasks)?;
            print_fields(out, &[
                ("alpha_star", num(t.value)),
                ("unclamped", num(t.unclamped)),
                ("gamma1", num(t.gamma1)),
                ("gamma2", num(t.gamma2)),
            ])?;
        }
        Command::Aggregate { answers, classes, strategy, mu, seed } => {
            let (n, words) = parse_answer_file(&answers)?;
            let options = AggregateOptions { strategy: strategy.into(), mu, classes, seed };
            let r = aggregate_offline(n, &words, &options)?;
            let bits: String = r.decided_bits.iter().map(|b| b.to_string()).collect();
            let ties: Vec<String> = r.tie_bits.iter().map(usize::to_string).collect();
            let mut fields = vec![
                ("decided_class", r.decided_class.map_or("none".into(), |c| c.to_string())),
                ("decided_bits", bits),
                ("tie_bits", format!("[{}]", ties.join(","))),
                ("strategy", r.strategy.label().into()),
                ("retained_workers", r.retained_workers.to_string()),
                ("mu_hat", num(r.mu_hat)),
                ("m_hat", num(r.m_hat)),
                ("alpha_hat", num(r.alpha_hat)),
            ];
            if let Some(t) = r.threshold {
                fields.push(("alpha_star", num(t.value)));
            }
            fields.push(("low_confidence", r.low_confidence.to_string()));
            print_fields(out, &fields)?;
        }
        Command::Reproduce { figure, out: dir, trials, seed, threads } => {
            let id: FigureId = figure.parse()?;
            for path in reproduce_figure(id, &dir, FigureOptions { trials, seed, threads })? {
                writeln!(out, "{}", path.display())?;
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse(), &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

#[cfg(test)]
mod tests {
    use std::path::Path;

    use super::*;

    fn invoke(args: &[&str]) -> Result<String> {
        let cli = Cli::try_parse_from(std::iter::once("skipvote").chain(args.iter().copied())).unwrap();
        let mut out = Vec::new();
        run(cli, &mut out)?;
        Ok(String::from_utf8(out).unwrap())
    }

    fn exit_code(args: &[&str]) -> i32 {
        invoke(args).unwrap_err().exit_code()
    }

    fn field<'a>(text: &'a str, key: &str) -> &'a str {
        text.lines()
            .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(" = ")))
            .unwrap_or_else(|| panic!("no `{key}` in {text}"))
    }

    fn write(dir: &Path, name: &str, text: &str) -> String {
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        path.to_str().unwrap().to_owned()
    }

    #[test]
    fn threshold_prints_the_golden_value() {
        let text = invoke(&["threshold", "--mu", "0.75", "--m", "0.5", "--N", "3"]).unwrap();
        assert_eq!(field(&text, "alpha_star"), "0.314692859617");
    }

    #[test]
    fn exact_and_its_cap() {
        let text = invoke(&["exact", "--strategy", "honest", "--W", "20", "--N", "3", "--mu", "0.8", "--m", "1"]).unwrap();
        assert_eq!(field(&text, "pc"), "0.125");
        let capped = ["exact", "--strategy", "oblivious", "--W", "20", "--N", "3", "--mu", "0.8", "--m", "0.5", "--alpha", "0.2", "--cap", "100"];
        assert_eq!(exit_code(&capped), 3);
    }

    #[test]
    fn invalid_parameters_exit_with_two() {
        assert_eq!(exit_code(&["asymptotic", "--W", "10", "--N", "3", "--mu", "1.5", "--m", "0.5"]), 2);
        assert_eq!(exit_code(&["threshold", "--mu", "0.75", "--m", "0", "--N", "3"]), 2);
        assert_eq!(exit_code(&["simulate", "--config", "/nonexistent/config.toml", "--out", "/tmp/never.csv"]), 2);
        assert_eq!(exit_code(&["reproduce", "--figure", "fig9", "--out", "/tmp"]), 2);
        assert!(Cli::try_parse_from(["skipvote", "asymptotic", "--W", "10", "--N", "3", "--mu", "0.8", "--m", "0.5", "--squared"]).is_err());
    }

    #[test]
    fn asymptotic_forms() {
        let base = ["asymptotic", "--W", "100", "--N", "3", "--mu", "0.8", "--m", "0.5", "--mv"];
        let clt: f64 = field(&invoke(&base).unwrap(), "pc").parse().unwrap();
        let squared: f64 = field(&invoke(&[&base[..], &["--squared"]].concat()).unwrap(), "pc").parse().unwrap();
        assert!(clt < 1.0 && squared > clt);
    }

    #[test]
    fn simulate_writes_report_and_metadata() {
        let dir = tempfile::tempdir().unwrap();
        let config = write(
            dir.path(),
            "c.toml",
            "trials = 500\nseed = 4\n[model]\nworkers = 5\nmicrotasks = 2\nclasses = 4\nskip = { kind = \"fixed\", value = 0.3 }\nreliability = { kind = \"fixed\", value = 0.8 }\n",
        );
        let report = dir.path().join("r.csv");
        invoke(&["simulate", "--config", &config, "--out", report.to_str().unwrap()]).unwrap();
        let csv = std::fs::read_to_string(&report).unwrap();
        assert!(csv.starts_with("sweep,method,pc,stderr,analytic_pc,runtime_ms\n,honest,"));
        let meta = std::fs::read_to_string(dir.path().join("r.csv.meta.toml")).unwrap();
        assert!(meta.contains("seed = 4") && meta.contains("trials = 500"));

        let bad = write(dir.path(), "bad.toml", "trials = 5\nseed = 1\ncolour = 3\n");
        assert_eq!(exit_code(&["simulate", "--config", &bad, "--out", report.to_str().unwrap()]), 2);
    }

    #[test]
    fn aggregate_and_estimate() {
        let dir = tempfile::tempdir().unwrap();
        let answers = write(dir.path(), "a.csv", "worker,b1,b2,b3\n0,0,1,1\n1,0,1,λ\n2,1,1,1\n3,0,-,1\n4,0,1,1\n");
        let text = invoke(&["aggregate", "--answers", &answers, "--strategy", "honest", "--mu", "0.8"]).unwrap();
        assert_eq!(field(&text, "decided_class"), "3");
        assert_eq!(field(&text, "decided_bits"), "011");
        assert_eq!(field(&text, "tie_bits"), "[]");

        let text = invoke(&["aggregate", "--answers", &answers]).unwrap();
        assert!(["oblivious", "expurgation"].contains(&field(&text, "strategy")));

        let gold = write(dir.path(), "g.csv", "b1,b2,b3\n0,1,1\n");
        let text = invoke(&["estimate", "--answers", &answers, "--gold", &gold]).unwrap();
        // mean of the per-worker ratios 1, 1, 2/3, 1, 1
        let mu: f64 = field(&text, "mu_hat").parse().unwrap();
        assert!((mu - 14.0 / 15.0).abs() < 1e-9);

        let text = invoke(&["estimate", "--answers", &answers]).unwrap();
        for key in ["mu_hat", "m_hat", "alpha_hat"] {
            field(&text, key);
        }
    }

    #[test]
    fn malformed_answers_report_the_position() {
        let dir = tempfile::tempdir().unwrap();
        let answers = write(dir.path(), "a.csv", "worker,b1,b2\n0,0,1\n1,0,x\n");
        let err = invoke(&["aggregate", "--answers", &answers]).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(matches!(err, Error::Parse { line: 3, column: 3, .. }), "{err}");
    }

    #[test]
    fn reproduce_threshold_figure() {
        let dir = tempfile::tempdir().unwrap();
        let text = invoke(&["reproduce", "--figure", "fig6", "--out", dir.path().to_str().unwrap()]).unwrap();
        assert_eq!(text.lines().count(), 9);
        assert!(dir.path().join("fig6.meta.toml").exists());
    }
}
