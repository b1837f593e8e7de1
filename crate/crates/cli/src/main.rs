use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use nctheta::io::{GraphFile, ResultJson, WeightFile};
use nctheta::theta::{antiblocker_support, theta_body_membership, theta_psi_support};
use nctheta::{run_suite, theta, Error, Form, S0Algebra, SdpOptions, Suite, VerifyConfig, WeightMatrix};

/// Environment variable overriding the default solver tolerance.
const TOL_ENV: &str = "NCTHETA_TOL";

#[derive(Parser, Debug)]
#[command(name = "nctheta", version, about = "Weighted theta of non-commutative graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compute θ̃(S, W) with one of the equivalent programs.
    Compute {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        weight: PathBuf,
        #[arg(long, default_value = "min_Y")]
        form: String,
        /// Solver tolerance.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Run a named verification suite on seeded random instances.
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 3)]
        n: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        trials: Option<usize>,
        /// S0 block spec such as "1x2,2x1".
        #[arg(long)]
        blocks: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        /// Print a human-readable table instead of JSON lines.
        #[arg(long)]
        summary: bool,
    },
    /// Query the theta body.
    Body {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        weight: PathBuf,
        #[arg(long, value_enum)]
        mode: BodyMode,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum BodyMode {
    Member,
    Support,
    PsiSupport,
}

/// Failure with its exit code: 1 for input or usage, 2 for numerics.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_numerical() { 2 } else { 1 };
        Self { code, message: e.to_string() }
    }
}

fn input_error(message: String) -> Failure {
    Failure { code: 1, message }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| input_error(format!("cannot read {}: {e}", path.display())))
}

fn env_tol() -> Result<Option<f64>, Failure> {
    match std::env::var(TOL_ENV) {
        Ok(s) => match s.trim().parse::<f64>() {
            Ok(t) if t > 0.0 && t.is_finite() => Ok(Some(t)),
            _ => Err(input_error(format!("{TOL_ENV} must be a positive number, got '{s}'"))),
        },
        Err(_) => Ok(None),
    }
}

fn options(flag: Option<f64>, env: Option<f64>) -> Result<SdpOptions, Failure> {
    let tol = flag.or(env).unwrap_or(SdpOptions::default().tol);
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(input_error(format!("tolerance must be positive, got {tol}")));
    }
    Ok(SdpOptions::with_tol(tol))
}

fn load(graph: &Path, weight: &Path) -> Result<(nctheta::NcGraph, nctheta::CMat), Failure> {
    let g = GraphFile::parse(&read(graph)?)?.to_graph()?;
    let w = WeightFile::parse(&read(weight)?)?.matrix()?;
    if w.nrows() != g.n() {
        return Err(input_error(format!("weight has dimension {}, graph has {}", w.nrows(), g.n())));
    }
    Ok((g, w))
}

fn print_json(v: &impl serde::Serialize) {
    println!("{}", serde_json::to_string(v).expect("serializable"));
}

fn run(cli: Cli, env: Option<f64>) -> Result<u8, Failure> {
    match cli.command {
        Command::Compute { graph, weight, form, tol } => {
            let form: Form = form.parse()?;
            let opts = options(tol, env)?;
            let (g, w) = load(&graph, &weight)?;
            let r = theta(&g, &WeightMatrix::new(w)?, form, &opts)?;
            print_json(&ResultJson::from(&r));
            Ok(0)
        }
        Command::Verify { suite, n, seed, trials, blocks, tol, summary } => {
            let suite: Suite = suite.parse()?;
            let blocks = blocks.as_deref().map(S0Algebra::parse).transpose()?;
            let cfg = VerifyConfig { n, seed, trials, blocks, solver: options(tol, env)? };
            let report = run_suite(suite, &cfg)?;
            if summary {
                print!("{}", report.summary_table());
            } else {
                print!("{}", report.to_json_lines());
            }
            Ok(if report.pass() { 0 } else { 2 })
        }
        Command::Body { graph, weight, mode } => {
            let opts = options(None, env)?;
            let (g, w) = load(&graph, &weight)?;
            match mode {
                BodyMode::Member => {
                    let m = theta_body_membership(&g, &w, &opts)?;
                    print_json(&json!({ "member": m.member, "margin": m.margin }));
                }
                BodyMode::Support => {
                    let s = antiblocker_support(&g, &w, &opts)?;
                    print_json(&json!({ "value": s.value }));
                }
                BodyMode::PsiSupport => {
                    let s = theta_psi_support(&g, &w, &opts)?;
                    print_json(&json!({ "value": s.value }));
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = env_tol().and_then(|env| run(cli, env));
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
