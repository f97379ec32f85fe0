//! `logspace`: batch front end for the logspace library.
//!
//! Results go to stdout as JSON (CSV for `nev-sweep`), diagnostics to
//! stderr. Exit status is 0 on success, 1 when a re-checked invariant fails
//! and 2 on malformed input or parameters.

use std::fs;
use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use logspace::fnorm::{decreasing_rearrangement, dlog, lognorm, orlicz_fnorm};
use logspace::nevanlinna::{
    boundary_distance, class_norm, smirnov_defect, HoloFunction, SweepOptions, DEFAULT_SMIRNOV_TOL,
};
use logspace::operator::{
    dlog_op, dtau, embed_diagonal, fk_determinant, lognorm_op, operator_norm, singular_numbers, spectral_project,
    split_at, MatrixOperator,
};
use logspace::selftest::{self, DEFAULT_SEED};
use logspace::witness::{cauchy_limit, convex_split, separation_sequence, unboundedness_witness};
use logspace::{Complex64, StepFunction};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "logspace", version, about = "Log-integrable spaces, Nevanlinna functionals and witnesses")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Input: a file path, `-` for stdin, or inline JSON.
    #[arg(long, global = true)]
    input: Option<String>,
    /// Quadrature grid size.
    #[arg(long, global = true, default_value_t = 4096)]
    m: usize,
    /// Tolerance for sweeps, classification and Cauchy tests.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// ‖f‖_log of a step function.
    Norm,
    /// d_log(f, g) for a pair `[f, g]`.
    Dist,
    /// Orlicz F-norm of a step function.
    Orlicz,
    /// Decreasing rearrangement of a step function.
    Rearrange,
    /// ‖T‖_log and singular numbers of a matrix.
    OpNorm,
    /// d_log and d_τ for a pair of matrices `[S, T]`.
    OpDist,
    /// Measure-topology distance d_τ for `[A, B]`.
    Dtau,
    /// Spectral projection of |T| onto `[lo, hi]` (or `[lo, ∞)`).
    Project {
        #[arg(long, default_value_t = 0.0)]
        lo: f64,
        #[arg(long)]
        hi: Option<f64>,
    },
    /// Split T at a cutoff K into bounded and tail parts.
    Split {
        #[arg(long)]
        cutoff: f64,
    },
    /// Fuglede–Kadison determinant.
    Fkdet,
    /// Embed a step function on [0,1) as a diagonal n×n matrix.
    Embed {
        #[arg(long)]
        n: usize,
    },
    /// Evaluate a disk function at z = re + i·im.
    NevEval {
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        re: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        im: f64,
    },
    /// Radial means along r_k = 1 − 2^{−k}.
    NevSweep,
    /// Smirnov defect L(f) − ‖Φ(f)‖_log.
    NevSmirnov,
    /// Boundary distance d_N for a pair `[f, g]`.
    NevDist,
    /// Counterexample constructions.
    Witness {
        #[command(subcommand)]
        kind: WitnessKind,
    },
    /// Cauchy test and limit for a sequence of step functions.
    Cauchy,
    /// Run the invariant suites.
    Selftest,
}

#[derive(Subcommand)]
enum WitnessKind {
    /// f ∈ V_eps with f ∉ N·V_{eps/2}.
    Unbounded {
        #[arg(long)]
        eps: f64,
        #[arg(long = "n")]
        n: u32,
    },
    /// Split f into n pieces of log-norm < eps whose average is f.
    Nonconvex {
        #[arg(long)]
        eps: f64,
    },
    /// f_k with vanishing support and diverging log-norm, for k = 1..=k.
    Separation {
        #[arg(long, default_value_t = 20)]
        k: u32,
    },
}

enum Failure {
    Malformed(&'static str, String),
    Invariant(String),
}

impl From<logspace::Error> for Failure {
    fn from(e: logspace::Error) -> Self {
        Failure::Malformed(e.code(), e.to_string())
    }
}

type Outcome = Result<Output, Failure>;

enum Output {
    Json(Value),
    Csv(String),
}

fn read_input(input: Option<&str>) -> Result<String, Failure> {
    let malformed = |msg: String| Failure::Malformed("E_MALFORMED", msg);
    match input {
        None => Err(malformed("this verb needs --input".into())),
        Some("-") => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| malformed(format!("stdin: {e}")))?;
            Ok(s)
        }
        Some(s) if s.trim_start().starts_with(['{', '[']) => Ok(s.to_string()),
        Some(path) => fs::read_to_string(path).map_err(|e| malformed(format!("{path}: {e}"))),
    }
}

fn parse<T: DeserializeOwned>(input: Option<&str>) -> Result<T, Failure> {
    let text = read_input(input)?;
    serde_json::from_str(&text).map_err(|e| Failure::Malformed("E_MALFORMED", e.to_string()))
}

fn pair<T: DeserializeOwned>(input: Option<&str>) -> Result<(T, T), Failure> {
    let [a, b]: [T; 2] = parse(input)?;
    Ok((a, b))
}

/// Rounds every float to 15 significant digits.
fn round15(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            let r: f64 = format!("{x:.14e}").parse().expect("formatted float parses");
            json!(r)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round15).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round15(v))).collect()),
        other => other,
    }
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("library types serialize")
}

fn positive(name: &str, x: f64) -> Result<f64, Failure> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Failure::Malformed("E_PARAM", format!("--{name} must be positive, got {x}")))
    }
}

fn run(cli: &Cli) -> Outcome {
    let input = cli.input.as_deref();
    let tol = |default: f64| positive("tol", cli.tol.unwrap_or(default));
    let out = match &cli.command {
        Command::Norm => {
            let f: StepFunction = parse(input)?;
            json!({ "lognorm": lognorm(&f) })
        }
        Command::Dist => {
            let (f, g): (StepFunction, StepFunction) = pair(input)?;
            json!({ "dlog": dlog(&f, &g)? })
        }
        Command::Orlicz => {
            let f: StepFunction = parse(input)?;
            let phi = orlicz_fnorm(&f);
            json!({ "orlicz": phi, "lognorm": lognorm(&f) })
        }
        Command::Rearrange => {
            let f: StepFunction = parse(input)?;
            to_json(&decreasing_rearrangement(&f))
        }
        Command::OpNorm => {
            let t: MatrixOperator = parse(input)?;
            json!({
                "lognorm": lognorm_op(&t),
                "operator_norm": operator_norm(&t),
                "singular_numbers": to_json(&singular_numbers(&t)),
            })
        }
        Command::OpDist => {
            let (s, t): (MatrixOperator, MatrixOperator) = pair(input)?;
            json!({ "dlog": dlog_op(&s, &t)?, "dtau": dtau(&s, &t)? })
        }
        Command::Dtau => {
            let (a, b): (MatrixOperator, MatrixOperator) = pair(input)?;
            json!({ "dtau": dtau(&a, &b)? })
        }
        Command::Project { lo, hi } => {
            let t: MatrixOperator = parse(input)?;
            let p = match hi {
                Some(hi) => spectral_project(&t, *lo..=*hi)?,
                None => spectral_project(&t, *lo..)?,
            };
            to_json(&p)
        }
        Command::Split { cutoff } => {
            let t: MatrixOperator = parse(input)?;
            let split = split_at(&t, positive("cutoff", *cutoff)?)?;
            let scale = 1.0 + operator_norm(&t);
            let residual = split.bounded_part.try_add(&split.tail_part)?.max_abs_diff(&t)?;
            if residual > 1e-12 * scale || operator_norm(&split.bounded_part) > cutoff + 1e-10 {
                return Err(Failure::Invariant(format!("split check failed: reconstruction residual {residual:e}")));
            }
            to_json(&split)
        }
        Command::Fkdet => {
            let t: MatrixOperator = parse(input)?;
            json!({ "fk_determinant": fk_determinant(&t) })
        }
        Command::Embed { n } => {
            let f: StepFunction = parse(input)?;
            to_json(&embed_diagonal(&f, *n)?)
        }
        Command::NevEval { re, im } => {
            let f: HoloFunction = parse(input)?;
            let z = Complex64::new(*re, *im);
            let v = f.eval(z)?;
            json!({ "re": v.re, "im": v.im, "log1p_abs": f.log1p_abs(z)? })
        }
        Command::NevSweep => {
            let f: HoloFunction = parse(input)?;
            let cn = class_norm(&f, SweepOptions::new(tol(DEFAULT_SMIRNOV_TOL)?))?;
            if cli.format == Some(Format::Json) {
                to_json(&cn)
            } else {
                let mut csv = String::from("k,r,L,grid,resolved\n");
                for (k, m) in cn.sweep.iter().enumerate() {
                    csv.push_str(&format!("{k},{:.15e},{:.15e},{},{}\n", m.radius, m.value, m.grid, m.resolved));
                }
                return Ok(Output::Csv(csv));
            }
        }
        Command::NevSmirnov => {
            let f: HoloFunction = parse(input)?;
            to_json(&smirnov_defect(&f, tol(DEFAULT_SMIRNOV_TOL)?)?)
        }
        Command::NevDist => {
            let (f, g): (HoloFunction, HoloFunction) = pair(input)?;
            json!({ "d_N": boundary_distance(&f, &g, cli.m)?, "m": cli.m })
        }
        Command::Witness { kind } => return witness(kind, input),
        Command::Cauchy => {
            let seq: Vec<StepFunction> = parse(input)?;
            let (limit, report) = cauchy_limit(&seq, tol(1e-9)?)?;
            json!({ "report": to_json(&report), "limit": limit.map(|l| to_json(&l)) })
        }
        Command::Selftest => {
            let report = selftest::run(cli.seed);
            for c in report.failures() {
                eprintln!("selftest: {} / {} failed (worst excess {:e})", c.suite, c.name, c.worst);
            }
            if !report.passed {
                emit(&Output::Json(to_json(&report)));
                return Err(Failure::Invariant("selftest failed".into()));
            }
            to_json(&report)
        }
    };
    Ok(Output::Json(out))
}

fn witness(kind: &WitnessKind, input: Option<&str>) -> Outcome {
    let out = match kind {
        WitnessKind::Unbounded { eps, n } => {
            let w = unboundedness_witness(*eps, *n)?;
            let verified = w.verify()?;
            let mut v = to_json(&w);
            v["verified"] = json!(verified);
            if !verified {
                return Err(Failure::Invariant(format!("witness failed verification: {v}")));
            }
            v
        }
        WitnessKind::Nonconvex { eps } => {
            let f: StepFunction = parse(input)?;
            let split = convex_split(&f, *eps)?;
            let exact = split.average()? == f;
            let below = split.pieces.iter().all(|p| lognorm(p) < *eps);
            let mut v = to_json(&split);
            v["reconstruction_exact"] = json!(exact);
            v["reconstruction_error"] = json!(dlog(&split.average()?, &f)?);
            if !below {
                return Err(Failure::Invariant("a piece has log-norm >= eps".into()));
            }
            v
        }
        WitnessKind::Separation { k } => {
            let seq = (1..=*k).map(separation_sequence).collect::<logspace::Result<Vec<_>>>()?;
            to_json(&seq)
        }
    };
    Ok(Output::Json(out))
}

/// Writes to stdout; a closed pipe is not an error for a batch tool.
fn emit(out: &Output) {
    let text = match out {
        Output::Json(v) => serde_json::to_string(&round15(v.clone())).expect("json") + "\n",
        Output::Csv(s) => s.clone(),
    };
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            emit(&out);
            ExitCode::SUCCESS
        }
        Err(Failure::Invariant(msg)) => {
            eprintln!("E_INVARIANT: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Malformed(code, msg)) => {
            eprintln!("{code}: {msg}");
            ExitCode::from(2)
        }
    }
}
