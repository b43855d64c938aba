use std::fmt::Display;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use bwdecomp::characters::{AdditiveCharacter, MultiplicativeCharacter};
use bwdecomp::charsums::{kloosterman_k, sum_mixed, sum_s, sum_t, SumResult, WeightVector};
use bwdecomp::decompose::{partition_with, ThresholdParams};
use bwdecomp::energy::{additive_energy, f_energy, multiplicative_energy};
use bwdecomp::harness::{run_experiment, run_suite, ExperimentConfig, VerificationRecord, SUITES};
use bwdecomp::ratfunc::is_exceptional;
use bwdecomp::sets::{product_set, sumset};
use bwdecomp::setspec::parse_set;
use bwdecomp::{FSubset, FieldCtx, RationalFunction};

/// Energy decompositions and trilinear character sums over GF(p^n).
#[derive(Parser)]
#[command(name = "bwdecomp", version)]
struct Cli {
    /// Field characteristic.
    #[arg(long, global = true, default_value_t = 1009)]
    p: u64,
    /// Extension degree.
    #[arg(long, global = true, default_value_t = 1)]
    n: u32,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Describe the field: modulus, generator, sizes.
    Field,
    /// Additive and multiplicative energy of a set.
    Energy {
        #[arg(long)]
        set: String,
    },
    /// Split a set into a low-energy part and a part with low-energy image.
    Decompose {
        #[arg(long)]
        set: String,
        /// Rational function, e.g. "1/0,1" for X^-1.
        #[arg(long = "fn", default_value = "1/0,1")]
        function: String,
        /// Use this value in place of M(A).
        #[arg(long)]
        m: Option<f64>,
    },
    /// Evaluate one of the trilinear sums over three sets.
    Charsum {
        #[arg(long, value_enum)]
        kind: SumKind,
        /// Three set specs A B C.
        #[arg(long, num_args = 3, value_names = ["A", "B", "C"])]
        sets: Vec<String>,
        /// Multiplicative character index j.
        #[arg(long, default_value_t = 1)]
        chi: u64,
        /// Additive character index a.
        #[arg(long, default_value_t = 1)]
        psi: u64,
    },
    /// Run one verification suite on the selected field.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write records as CSV.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a batch described by a JSON config.
    Experiment {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SumKind {
    #[value(name = "S")]
    S,
    #[value(name = "T")]
    T,
    #[value(name = "mixed")]
    Mixed,
    #[value(name = "K")]
    K,
}

/// Bad input of any kind; exit code 2.
struct ConfigError(String);

impl<E: Display> From<E> for ConfigError {
    fn from(e: E) -> Self {
        ConfigError(e.to_string())
    }
}

type Outcome = Result<bool, ConfigError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = FieldCtx::new(cli.p, cli.n)
        .map_err(ConfigError::from)
        .and_then(|ctx| run(&ctx, cli.command));
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn run(ctx: &FieldCtx, command: Command) -> Outcome {
    match command {
        Command::Field => field(ctx),
        Command::Energy { set } => energy(ctx, &set),
        Command::Decompose { set, function, m } => decompose(ctx, &set, &function, m),
        Command::Charsum {
            kind,
            sets,
            chi,
            psi,
        } => charsum(ctx, kind, &sets, chi, psi),
        Command::Verify {
            suite,
            trials,
            seed,
            output,
        } => {
            let mut cfg =
                ExperimentConfig::new(u64::from(ctx.p()), ctx.n(), &[suite.as_str()], seed);
            cfg.trials = trials;
            cfg.output = output;
            if !SUITES.contains(&suite.as_str()) {
                return Err(ConfigError(format!(
                    "unknown suite {suite:?}; expected one of {}",
                    SUITES.join(", ")
                )));
            }
            cfg.validate()?;
            let records = run_suite(&suite, &cfg)?;
            if let Some(path) = &cfg.output {
                bwdecomp::harness::emit_csv(&records, path)?;
            }
            Ok(summarize(&records))
        }
        Command::Experiment { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let (records, summaries) = run_experiment(&cfg).map_err(|e| {
                if e.is_config() {
                    ConfigError(e.to_string())
                } else {
                    ConfigError(format!("run aborted: {e}"))
                }
            })?;
            for s in &summaries {
                let ratio = s
                    .max_ratio
                    .map(|r| format!("{r:.4}"))
                    .unwrap_or_else(|| "-".into());
                println!(
                    "{:<15} records={:<5} hard_failures={:<3} max_report_ratio={ratio}",
                    s.suite, s.records, s.hard_failures
                );
            }
            if let Some(path) = &cfg.output {
                println!("wrote {} records to {}", records.len(), path.display());
            }
            Ok(summaries.iter().all(|s| s.hard_failures == 0))
        }
    }
}

fn summarize(records: &[VerificationRecord]) -> bool {
    let failed: Vec<_> = records.iter().filter(|r| r.failed()).collect();
    for r in &failed {
        println!(
            "FAIL {} | {} | lhs={} rhs={}",
            r.suite, r.instance, r.lhs, r.rhs
        );
    }
    let hard = records.iter().filter(|r| r.hard).count();
    println!(
        "{} records: {hard} hard ({} failed), {} report-only",
        records.len(),
        failed.len(),
        records.len() - hard
    );
    failed.is_empty()
}

fn field(ctx: &FieldCtx) -> Outcome {
    println!("q = {} = {}^{}", ctx.q(), ctx.p(), ctx.n());
    match ctx.params().modulus() {
        Some(m) => {
            let poly = bwdecomp::ratfunc::Polynomial::new(
                m.iter().map(|&c| bwdecomp::FieldElement(c)).collect(),
            );
            println!("modulus = {poly}  (coefficients low degree first)");
        }
        None => println!("modulus = (prime field)"),
    }
    println!("generator = {}", ctx.generator());
    println!("generator digits = {:?}", ctx.digits(ctx.generator()));
    Ok(true)
}

fn energy(ctx: &FieldCtx, spec: &str) -> Outcome {
    let a = parse_set(ctx, spec)?;
    let n = a.len() as f64;
    let e = additive_energy(ctx, &a).value;
    let em = multiplicative_energy(ctx, &a).value;
    println!("|A| = {}", a.len());
    println!("|A+A| = {}", sumset(ctx, &a, &a).len());
    println!("|AA| = {}", product_set(ctx, &a, &a).len());
    println!("E(A) = {e}  (E/A^3 = {:.6})", e as f64 / n.powi(3).max(1.0));
    println!(
        "Ex(A) = {em}  (Ex/A^3 = {:.6})",
        em as f64 / n.powi(3).max(1.0)
    );
    Ok(true)
}

fn decompose(ctx: &FieldCtx, spec: &str, function: &str, m: Option<f64>) -> Outcome {
    let a = parse_set(ctx, spec)?;
    let f = RationalFunction::parse(ctx, function)?;
    if let Some(l) = is_exceptional(ctx, &f)? {
        return Err(ConfigError(format!(
            "f = {f} has the excluded form g^p - g + lambda X + mu (lambda = {l})"
        )));
    }
    let params = match m {
        Some(m) => ThresholdParams::with_m(m),
        None => ThresholdParams::default(),
    };
    let r = partition_with(ctx, &a, &f, &params)?;
    println!("|A| = {}, f = {f}", a.len());
    println!("M = {:.6}, threshold A^3/M = {:.3}", r.m_value, r.threshold);
    if r.trivial {
        println!("M <= 1: trivial split S = A (pass --m to force a threshold)");
    }
    println!("iterations = {}", r.iterations.len());
    println!(
        "|S| = {}, E(S) = {}, c1 = {:.6}",
        r.s_final.len(),
        r.s_energy,
        r.c1()
    );
    println!(
        "|T| = {}, E(f(T)) = {}, c2 = {:.6}",
        r.t_final.len(),
        r.f_t_energy,
        r.c2()
    );
    println!(
        "aggregate bound (sum E(f(Q_i))^1/4)^4 = {:.3}",
        r.aggregate_bound
    );
    let valid = r.s_final.is_disjoint(&r.t_final) && r.s_final.union(&r.t_final) == a;
    let under = r.trivial || r.s_energy as f64 <= r.threshold;
    let check = f_energy(ctx, &f, &r.t_final).value == r.f_t_energy;
    Ok(valid && under && check)
}

fn charsum(ctx: &FieldCtx, kind: SumKind, specs: &[String], chi: u64, psi: u64) -> Outcome {
    let sets = specs
        .iter()
        .map(|s| parse_set(ctx, s))
        .collect::<Result<Vec<FSubset>, _>>()?;
    let (a, b, c) = (&sets[0], &sets[1], &sets[2]);
    if psi == 0 || psi >= u64::from(ctx.q()) {
        return Err(ConfigError(format!("--psi must lie in 1..{}", ctx.q())));
    }
    let psi = AdditiveCharacter::new(ctx.element(psi)?);
    let chi = MultiplicativeCharacter::new(ctx, chi);
    let r: SumResult = match kind {
        SumKind::S => sum_s(ctx, a, b, c, psi),
        SumKind::T => sum_t(ctx, a, b, c, chi),
        SumKind::Mixed => sum_mixed(ctx, a, b, c, chi, psi),
        SumKind::K => kloosterman_k(
            ctx,
            &WeightVector::ones(a),
            &WeightVector::ones(b),
            &WeightVector::ones(c),
            psi,
        )?,
    };
    println!(
        "A = {}, B = {}, C = {}, terms = {}",
        a.len(),
        b.len(),
        c.len(),
        r.terms
    );
    println!("value = {:.9} {:+.9}i", r.value.re, r.value.im);
    println!("|value| = {:.9}", r.magnitude);
    for e in &r.bound_report {
        println!(
            "bound {:<14} {:>16.6}  ratio {:.6}",
            e.name, e.value, e.ratio
        );
    }
    Ok(true)
}
