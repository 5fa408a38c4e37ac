//! `shtuka`: construct, verify and classify points of the Rapoport–Zink space, print Carlitz
//! tables and compute periods. All output is JSON with sorted keys.
//!
//! Exit codes: 0 pass, 1 check failure, 2 usage or parse error, 3 precision undecidable.

mod config;
mod hspec;

use std::io::{Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use shtuka_core::carlitz::{exp_coeffs, log_coeffs};
use shtuka_core::fq::Fq;
use shtuka_core::hodge_pink::{compute_q_x_with, fil1, period, HodgePinkError, QxOptions};
use shtuka_core::json;
use shtuka_core::selfcheck::{self, SelfcheckConfig};
use shtuka_core::shtuka::{
    classify, j_act, make_universal_point, random_integral_unit, twist_by_unit, verify_point, FixedDatum, RZCoords,
    ShtukaError, ShtukaTriple,
};
use shtuka_core::trunc::TruncRing;

use config::Config;

#[derive(Parser)]
#[command(name = "shtuka", version, about = "Local GL2-shtukas over truncated rings")]
struct Cli {
    /// JSON config file with defaults (q, e, modulus, z_prec, zeta_prec, seed).
    #[arg(long, global = true, env = "SHTUKA_CONFIG")]
    config: Option<PathBuf>,
    /// Pretty-print the JSON output.
    #[arg(long, global = true)]
    pretty: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the universal point x_n(h) at (i, j) and verify it.
    Universal {
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        n: u32,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        i: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0)]
        j: i64,
        /// Polynomial in zeta and h lying in the ideal (zeta, h), e.g. "h + zeta*h^2".
        #[arg(long, default_value = "h")]
        h: String,
    },
    /// Verify a triple: the τ identity, boundedness and the reduction mod I.
    Verify { input: Option<PathBuf> },
    /// Canonical coordinates (i, j, h, n) of a triple.
    Classify { input: Option<PathBuf> },
    /// Apply diag(z^a, z^b) to the quasi-isogeny.
    Jact {
        #[arg(long, allow_hyphen_values = true)]
        a: i64,
        #[arg(long, allow_hyphen_values = true)]
        b: i64,
        input: Option<PathBuf>,
    },
    /// Replace a triple by an isomorphic one using a random integral unit.
    Twist {
        #[arg(long)]
        seed: Option<u64>,
        input: Option<PathBuf>,
    },
    /// Coefficients of the Carlitz exponential or logarithm.
    Carlitz {
        kind: Kind,
        #[arg(long)]
        q: Option<u32>,
        #[arg(long)]
        terms: usize,
    },
    /// l₀·ζ^(l−k)·log(h) in F_q((ζ))[h]/(h^D).
    Period {
        #[arg(long)]
        q: Option<u32>,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, allow_hyphen_values = true)]
        l: i64,
        /// ζ-precision.
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        prec: Option<i64>,
        /// h-degree bound D.
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        deg: u64,
    },
    /// The Hodge-Pink line Fil¹ of a triple.
    Fil1 {
        #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
        prec: Option<i64>,
        input: Option<PathBuf>,
    },
    /// Randomized invariant suites over a grid of (q, n).
    Selfcheck {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 10)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_values_t = [2, 3])]
        q: Vec<u32>,
        #[arg(long, value_delimiter = ',', default_values_t = [1, 2])]
        n: Vec<u32>,
        /// Flip one coefficient inside the suites; the run must then fail.
        #[arg(long)]
        sabotage: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Exp,
    Log,
}

enum Failure {
    Usage(String),
    Check(String),
    Undecidable(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Check(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Undecidable(_) => 3,
        }
    }
    fn message(&self) -> &str {
        match self {
            Failure::Usage(s) | Failure::Check(s) | Failure::Undecidable(s) => s,
        }
    }
}

impl From<ShtukaError> for Failure {
    fn from(e: ShtukaError) -> Self {
        match e {
            ShtukaError::PrecisionUndecidable(_) => Failure::Undecidable(e.to_string()),
            ShtukaError::BadLevel { .. } | ShtukaError::NotQPower(_) | ShtukaError::HNotInIdeal | ShtukaError::Trunc(_) => {
                Failure::Usage(e.to_string())
            }
            _ => Failure::Check(e.to_string()),
        }
    }
}

impl From<HodgePinkError> for Failure {
    fn from(e: HodgePinkError) -> Self {
        match e {
            HodgePinkError::Shtuka(s) => s.into(),
            HodgePinkError::Undecidable(_) => Failure::Undecidable(e.to_string()),
            HodgePinkError::Unsupported(_) => Failure::Usage(e.to_string()),
            _ => Failure::Check(e.to_string()),
        }
    }
}

/// JSON to print plus whether the command's checks passed.
struct Output {
    value: Value,
    failure: Option<Failure>,
}

impl From<Value> for Output {
    fn from(value: Value) -> Self {
        Output { value, failure: None }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = Config::load(cli.config.as_deref()).map_err(Failure::Usage).and_then(|cfg| run(&cli.command, &cfg));
    match result {
        Ok(out) => {
            let text = if cli.pretty { serde_json::to_string_pretty(&out.value) } else { serde_json::to_string(&out.value) };
            let mut stdout = std::io::stdout().lock();
            if let Err(e) = writeln!(stdout, "{}", text.expect("JSON values always serialize")) {
                if e.kind() != std::io::ErrorKind::BrokenPipe {
                    eprintln!("shtuka: cannot write output: {e}");
                    return ExitCode::from(2);
                }
            }
            match out.failure {
                None => ExitCode::SUCCESS,
                Some(f) => {
                    eprintln!("shtuka: {}", f.message());
                    ExitCode::from(f.code())
                }
            }
        }
        Err(f) => {
            eprintln!("shtuka: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn run(cmd: &Command, cfg: &Config) -> Result<Output, Failure> {
    match cmd {
        Command::Universal { q, n, i, j, h } => {
            let f = field(cfg, *q)?;
            let order = (f.q() as u64).checked_pow(*n).filter(|&o| o <= 1 << 12).ok_or_else(|| Failure::Usage("q^n is too large".into()))?;
            let ring = TruncRing::new(&f, order as usize).map_err(|e| Failure::Usage(e.to_string()))?;
            let h = hspec::parse(h, &ring).map_err(Failure::Usage)?;
            let c = RZCoords::new(*i, *j, h, *n)?;
            let t = make_universal_point(&c)?;
            let report = verify_point(&t, &FixedDatum::standard(&f))?;
            let failure = verify_failure(&report);
            Ok(Output { value: json!({"coords": json::coords(&c), "triple": json::triple(&t), "report": json::verify_report(&report)}), failure })
        }
        Command::Verify { input } => {
            let t = read_triple(input)?;
            let report = verify_point(&t, &FixedDatum::standard(t.ring().field()))?;
            let failure = verify_failure(&report);
            Ok(Output { value: json::verify_report(&report), failure })
        }
        Command::Classify { input } => {
            let t = read_triple(input)?;
            Ok(json::coords(&classify(&t, &FixedDatum::standard(t.ring().field()))?).into())
        }
        Command::Jact { a, b, input } => Ok(json::triple(&j_act(*a, *b, &read_triple(input)?)).into()),
        Command::Twist { seed, input } => {
            let t = read_triple(input)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed.unwrap_or(cfg.seed));
            let k = random_integral_unit(t.ring(), &mut rng, 2, 3);
            Ok(json::triple(&twist_by_unit(&t, &k, t.ring().order() as i64 + cfg.z_prec)?).into())
        }
        Command::Carlitz { kind, q, terms } => {
            let f = field(cfg, *q)?;
            let (name, coeffs) = match kind {
                Kind::Exp => ("exp", exp_coeffs(&f, *terms)),
                Kind::Log => ("log", log_coeffs(&f, *terms)),
            };
            Ok(json!({"kind": name, "q": f.q(), "coeffs": coeffs.iter().map(json::rat_zeta).collect::<Vec<_>>()}).into())
        }
        Command::Period { q, k, l, prec, deg } => {
            let f = field(cfg, *q)?;
            let prec = prec.unwrap_or(cfg.zeta_prec);
            let p = period(&f, *k, *l, prec, *deg as usize);
            Ok(json!({"q": f.q(), "k": k, "l": l, "deg": deg, "zeta_prec": prec, "value": json::period_value(&p)}).into())
        }
        Command::Fil1 { prec, input } => {
            let t = read_triple(input)?;
            let opts = QxOptions { zeta_prec: prec.unwrap_or(cfg.zeta_prec), ..QxOptions::default() };
            let lattice = compute_q_x_with(&t, &FixedDatum::standard(t.ring().field()), opts)?;
            Ok(json::grass_line(&fil1(&lattice)?).into())
        }
        Command::Selfcheck { seed, trials, q, n, sabotage } => {
            let report = selfcheck::run(&SelfcheckConfig {
                qs: q.clone(),
                levels: n.clone(),
                seed: seed.unwrap_or(cfg.seed),
                trials: *trials,
                sabotage: *sabotage,
            });
            let failure = (!report.passed()).then(|| Failure::Check("self-check failed".into()));
            Ok(Output { value: report.to_json(), failure })
        }
    }
}

fn field(cfg: &Config, q: Option<u32>) -> Result<Arc<Fq>, Failure> {
    cfg.field(q.unwrap_or(cfg.q)).map_err(Failure::Usage)
}

fn verify_failure(report: &shtuka_core::shtuka::VerifyReport) -> Option<Failure> {
    if report.all_passed() {
        None
    } else if report.undecidable() {
        Some(Failure::Undecidable("verification is undecidable at the available precision".into()))
    } else {
        Some(Failure::Check("point fails verification".into()))
    }
}

/// Reads a triple from a file or stdin; the output of `universal` is accepted as well.
fn read_triple(input: &Option<PathBuf>) -> Result<ShtukaTriple, Failure> {
    let text = match input {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?
        }
        _ => {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(|e| Failure::Usage(format!("cannot read stdin: {e}")))?;
            s
        }
    };
    let v: Value = serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("input is not JSON: {e}")))?;
    let v = v.get("triple").unwrap_or(&v);
    json::triple_from(v).map_err(|e| Failure::Usage(e.to_string()))
}
