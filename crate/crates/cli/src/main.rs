use std::fs;
use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use chowred::bounds::{format_sweep, sweep, total_bound, BoundParams};
use chowred::decomposition::{decompose_traced, PolySystem};
use chowred::modp::{check_prime, scan_primes};
use chowred::ChowError;

#[derive(Parser)]
#[command(name = "chowred", version, about = "Chow forms of equidimensional components, bad primes and height bounds")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Seed for the random changes of coordinates.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent random transforms to try.
    #[arg(long, default_value_t = 8)]
    retries: usize,
    /// Write the text report here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Also write a JSON dump of the result.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct Sizes {
    #[arg(short = 'n', long)]
    n: Option<u32>,
    #[arg(short = 's', long)]
    s: Option<u32>,
    #[arg(short = 'd', long)]
    d: Option<u32>,
    #[arg(long)]
    height: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Chow forms C_0..C_n of the equidimensional components.
    Decompose {
        /// System file (`-` for standard input).
        input: String,
        /// Dump every intermediate form of the main loop.
        #[arg(long)]
        trace: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Classify one odd prime.
    CheckPrime {
        input: String,
        #[arg(long)]
        prime: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Classify every odd prime up to a limit.
    ScanPrimes {
        input: String,
        #[arg(long)]
        max_prime: u64,
        /// Worker threads (default: available parallelism).
        #[arg(long)]
        workers: Option<usize>,
        #[command(flatten)]
        common: Common,
    },
    /// Height bound for the bad-prime integer.
    Bound {
        #[command(flatten)]
        sizes: Sizes,
        #[command(flatten)]
        common: Common,
    },
    /// Bound over a range of one parameter, next to the published A values.
    Sweep {
        /// One of n, s, d, h.
        #[arg(long)]
        param: String,
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<f64>,
        #[command(flatten)]
        sizes: Sizes,
        #[command(flatten)]
        common: Common,
    },
}

enum Failure {
    Input(String),
    Compute(String),
}

impl From<ChowError> for Failure {
    fn from(e: ChowError) -> Self {
        match e {
            ChowError::Undefined { .. } | ChowError::RetriesExhausted { .. } => Failure::Compute(e.to_string()),
            ChowError::Parse { .. }
            | ChowError::EvenPrime
            | ChowError::InvalidModulus(_)
            | ChowError::InvalidParameter(_)
            | ChowError::UnknownKind(_)
            | ChowError::UnknownParam(_)
            | ChowError::OrderMismatch(_)
            | ChowError::ZeroPolynomial => Failure::Input(e.to_string()),
            other => Failure::Compute(other.to_string()),
        }
    }
}

fn read_system(path: &str) -> Result<PolySystem, Failure> {
    let text = if path == "-" {
        let mut s = String::new();
        io::stdin().read_to_string(&mut s).map_err(|e| Failure::Input(format!("stdin: {e}")))?;
        s
    } else {
        fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))?
    };
    PolySystem::parse(&text).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn emit(common: &Common, text: &str, data: serde_json::Value) -> Result<(), Failure> {
    let io_err = |p: &PathBuf, e: io::Error| Failure::Input(format!("{}: {e}", p.display()));
    match &common.output {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e))?,
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes()).map_err(|e| Failure::Compute(e.to_string()))?;
        }
    }
    if let Some(p) = &common.json {
        let body = serde_json::to_string_pretty(&data).expect("json values serialize");
        fs::write(p, body + "\n").map_err(|e| io_err(p, e))?;
    }
    Ok(())
}

/// Published table parameters for the swept quantity, overridden by flags.
fn sweep_defaults(param: &str, sizes: &Sizes) -> Result<BoundParams, Failure> {
    let (n, s, d, h) = match param {
        "n" => (1, 5, 2, 10.0),
        "s" => (5, 1, 2, 10.0),
        "d" => (3, 5, 1, 10.0),
        "h" => (3, 5, 3, 1.0),
        other => return Err(ChowError::UnknownParam(other.to_string()).into()),
    };
    Ok(BoundParams::new(
        sizes.n.unwrap_or(n),
        sizes.s.unwrap_or(s),
        sizes.d.unwrap_or(d),
        sizes.height.unwrap_or(h),
    )?)
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Decompose { input, trace, common } => {
            let sys = read_system(&input)?;
            let r = decompose_traced(&sys, common.seed, common.retries, trace)?;
            let mut text = String::new();
            for (k, c) in r.chow_forms.iter().enumerate() {
                text.push_str(&format!("C{k} = {}\n", c.primitive().poly()));
            }
            for t in &r.trace {
                text.push_str(&format!("{t}\n"));
            }
            let b: Vec<Vec<String>> = r.transform.b.iter().map(|row| row.iter().map(|x| x.to_string()).collect()).collect();
            let data = json!({
                "n": sys.n,
                "attempts": r.attempts,
                "transform": b,
                "forms": r.chow_forms.iter().map(|c| c.primitive().record()).collect::<Vec<_>>(),
                "trace": r.trace.iter().map(|t| t.to_string()).collect::<Vec<_>>(),
            });
            emit(&common, &text, data)
        }
        Command::CheckPrime { input, prime, common } => {
            let sys = read_system(&input)?;
            let v = check_prime(&sys, prime, common.seed)?;
            emit(&common, &format!("{v}\n"), json!(v.record()))
        }
        Command::ScanPrimes {
            input,
            max_prime,
            workers,
            common,
        } => {
            let sys = read_system(&input)?;
            let vs = scan_primes(&sys, max_prime, common.seed, workers)?;
            let text: String = vs.iter().map(|v| format!("{v}\n")).collect();
            let data = json!(vs.iter().map(|v| v.record()).collect::<Vec<_>>());
            emit(&common, &text, data)
        }
        Command::Bound { sizes, common } => {
            let need = |v: Option<u32>, name: &str| v.ok_or_else(|| Failure::Input(format!("bound needs -{name}")));
            let p = BoundParams::new(
                need(sizes.n, "n")?,
                need(sizes.s, "s")?,
                need(sizes.d, "d")?,
                sizes.height.ok_or_else(|| Failure::Input("bound needs --height".into()))?,
            )?;
            let report = total_bound(&p);
            emit(&common, &format!("{report}\n"), json!(report))
        }
        Command::Sweep {
            param,
            values,
            sizes,
            common,
        } => {
            let fixed = sweep_defaults(&param, &sizes)?;
            let rows = sweep(&param, &values, &fixed)?;
            emit(&common, &format_sweep(&param, &rows), json!(rows))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Compute(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Input(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}
