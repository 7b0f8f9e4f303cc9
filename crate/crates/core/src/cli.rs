//! `schmidt` command line. Output is JSON except `orbit`, which writes CSV.
//!
//! Exit codes: 0 success, 1 certificate violated or property failures,
//! 2 invalid flags or input, 3 enumeration budget exceeded, 4 internal error.

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::attachments::attach_report;
use crate::diophantine::{bad_certificate, Certificate, RationalPoint, Weight};
use crate::dynamics::{csv_line, orbit_trace, time_grid, UnipotentParams, DEFAULT_PRECISION, MAX_PRECISION};
use crate::error::Error;
use crate::exact::{fmt_rational, Ball, Rational};
use crate::strategy::setup::{parse_scalar, PlaySetup};
use crate::strategy::{derive_params, ParamMode};
use crate::verify::{run_suite, SUITES};

#[derive(Parser, Debug)]
#[command(name = "schmidt", version, about = "Exact hyperplane games and weighted Diophantine certificates")]
struct Cli {
    /// Write the result here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Strategy constants κ, R, ε and the level schedule.
    Params(ParamsArgs),
    /// Checks that no `P` with `q ≤ Q` approximates a point to quality `ε`.
    Certify(CertifyArgs),
    /// Systoles along the diagonal-flow orbit of a point, as CSV.
    Orbit(OrbitArgs),
    /// Dual vector, height, hyperplane and line attached to a ball and a point.
    Attach(AttachArgs),
    /// Plays one game from a TOML setup; flags override the file.
    Play(PlayArgs),
    /// Runs randomized property suites.
    VerifyLemmas(VerifyArgs),
}

#[derive(Args, Debug)]
struct WeightArg {
    /// Weight as `d:λ:μ`.
    #[arg(long, default_value = "2:1/2:1/2")]
    weight: String,
}

#[derive(Args, Debug)]
struct ParamsArgs {
    #[command(flatten)]
    w: WeightArg,
    #[arg(long, default_value = "paper")]
    mode: String,
    #[arg(long, default_value = "1/3")]
    beta: String,
    #[arg(long, default_value = "1")]
    gamma: String,
    /// `σ₀`, the square root of the first radius.
    #[arg(long, default_value = "1/2")]
    sigma0: String,
    /// Comma-separated center of the first ball; defaults to the origin.
    #[arg(long)]
    center: Option<String>,
    /// Relaxed mode only.
    #[arg(long)]
    r: Option<String>,
    /// Relaxed mode only; accepts `2^-k`.
    #[arg(long)]
    eps: Option<String>,
}

#[derive(Args, Debug)]
struct CertifyArgs {
    #[command(flatten)]
    w: WeightArg,
    /// Comma-separated coordinates `x, y, z`.
    #[arg(long)]
    point: String,
    #[arg(long)]
    eps: String,
    #[arg(long = "q")]
    max_q: u64,
    #[arg(long, default_value_t = 10_000_000)]
    budget: u64,
}

#[derive(Args, Debug)]
struct OrbitArgs {
    #[command(flatten)]
    w: WeightArg,
    #[arg(long)]
    point: String,
    #[arg(long, default_value = "15")]
    horizon: String,
    /// Number of sample times, endpoints included.
    #[arg(long, default_value_t = 151)]
    steps: usize,
    #[arg(long, default_value_t = DEFAULT_PRECISION)]
    precision: u32,
}

#[derive(Args, Debug)]
struct AttachArgs {
    #[command(flatten)]
    w: WeightArg,
    /// Comma-separated ball center.
    #[arg(long)]
    center: String,
    /// Rational radius `ρ`, or give `--sigma`.
    #[arg(long, conflicts_with = "sigma")]
    rho: Option<String>,
    #[arg(long)]
    sigma: Option<String>,
    /// Rational point as `p1,..;s;q`.
    #[arg(long)]
    rational: String,
}

#[derive(Args, Debug)]
struct PlayArgs {
    /// TOML file with `PlaySetup` fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    variant: Option<String>,
    #[arg(long)]
    alice: Option<String>,
    #[arg(long)]
    bob: Option<String>,
    #[arg(long)]
    weight: Option<String>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    beta: Option<String>,
    #[arg(long)]
    gamma: Option<String>,
    #[arg(long)]
    sigma0: Option<String>,
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    eps: Option<String>,
    #[arg(long)]
    levels: Option<u64>,
    #[arg(long)]
    max_turns: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    budget: Option<u64>,
    /// Comma-separated chaser target.
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    q_cert: Option<u64>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Trials per suite.
    #[arg(long, default_value_t = 10_000)]
    budget: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

/// Failure with its exit code and a one-line diagnostic.
struct Fail(i32, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::BudgetExceeded(_) => 3,
            Error::Invariant(_) | Error::PrecisionExhausted(_) | Error::SingularBasis => 4,
            _ => 2,
        };
        Fail(code, e.to_string())
    }
}

fn bad_input(msg: impl Into<String>) -> Fail {
    Fail(2, msg.into())
}

fn list(s: &str) -> Result<Vec<Rational>, Fail> {
    s.split(',').map(|t| parse_scalar(t).map_err(Fail::from)).collect()
}

fn json(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn cmd_params(a: &ParamsArgs) -> Result<(String, i32), Fail> {
    let w = Weight::parse(&a.w.weight)?;
    let center = match &a.center {
        Some(c) => list(c)?,
        None => vec![Rational::from_integer(0.into()); w.space_dim()],
    };
    if center.len() != w.space_dim() {
        return Err(Error::DimensionMismatch { expected: w.space_dim(), got: center.len() }.into());
    }
    let b0 = Ball::from_sqrt_radius(center, parse_scalar(&a.sigma0)?)?;
    let mode = match (a.mode.as_str(), &a.r, &a.eps) {
        ("paper", None, None) => ParamMode::Strict,
        ("paper", _, _) => return Err(bad_input("--r and --eps apply to relaxed mode only")),
        ("relaxed", Some(r), Some(e)) => {
            let r = parse_scalar(r)?;
            if !r.is_integer() {
                return Err(bad_input("R must be an integer"));
            }
            ParamMode::Relaxed { r: r.to_integer(), eps: parse_scalar(e)? }
        }
        ("relaxed", _, _) => return Err(bad_input("relaxed mode needs --r and --eps")),
        (m, _, _) => return Err(bad_input(format!("unknown mode {m:?}"))),
    };
    let beta = parse_scalar(&a.beta)?;
    let p = derive_params(&b0, &beta, &parse_scalar(&a.gamma)?, mode)?;
    let mut v = p.to_json();
    v["weight"] = serde_json::json!({"d": w.d, "lambda": fmt_rational(&w.lambda), "mu": fmt_rational(&w.mu)});
    Ok((json(&v), 0))
}

fn cmd_certify(a: &CertifyArgs) -> Result<(String, i32), Fail> {
    let w = Weight::parse(&a.w.weight)?;
    let pt = list(&a.point)?;
    let eps = parse_scalar(&a.eps)?;
    match bad_certificate(&pt, &w, &eps, a.max_q, a.budget)? {
        Certificate::Holds => Ok((json(&serde_json::json!({"verdict": "holds", "Q": a.max_q, "eps": fmt_rational(&eps)})), 0)),
        Certificate::ViolatedBy(q) => Ok((
            json(&serde_json::json!({"verdict": "violated", "Q": a.max_q, "eps": fmt_rational(&eps), "witness": q.to_json()})),
            1,
        )),
    }
}

fn cmd_orbit(a: &OrbitArgs) -> Result<(String, i32), Fail> {
    let w = Weight::parse(&a.w.weight)?;
    let p = UnipotentParams::from_point(&list(&a.point)?)?;
    if p.d() != w.d {
        return Err(Error::DimensionMismatch { expected: w.d, got: p.d() }.into());
    }
    if a.steps < 2 || !(8..=MAX_PRECISION).contains(&a.precision) {
        return Err(bad_input(format!("need --steps >= 2 and --precision in 8..={MAX_PRECISION}")));
    }
    let horizon = parse_scalar(&a.horizon)?;
    if horizon < Rational::from_integer(0.into()) {
        return Err(bad_input("horizon must be nonnegative"));
    }
    let trace = orbit_trace(&p, &w, &time_grid(&horizon, a.steps), a.precision)?;
    let mut out = String::from("t,systole");
    for i in 1..=w.d + 1 {
        out.push_str(&format!(",v{i}"));
    }
    out.push_str(",bits\n");
    for s in &trace.samples {
        out.push_str(&csv_line(s, trace.precision));
        out.push('\n');
    }
    Ok((out, 0))
}

fn cmd_attach(a: &AttachArgs) -> Result<(String, i32), Fail> {
    let w = Weight::parse(&a.w.weight)?;
    let center = list(&a.center)?;
    let ball = match (&a.rho, &a.sigma) {
        (Some(r), None) => Ball::new(center, parse_scalar(r)?)?,
        (None, Some(s)) => Ball::from_sqrt_radius(center, parse_scalar(s)?)?,
        _ => return Err(bad_input("give exactly one of --rho, --sigma")),
    };
    let pt = RationalPoint::parse(&a.rational)?;
    Ok((json(&attach_report(&ball, &pt, &w)?), 0))
}

fn cmd_play(a: &PlayArgs) -> Result<(String, i32), Fail> {
    let mut s = match &a.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| bad_input(format!("{}: {e}", path.display())))?;
            toml::from_str::<PlaySetup>(&text).map_err(|e| bad_input(format!("{}: {e}", path.display())))?
        }
        None => PlaySetup::default(),
    };
    macro_rules! over {
        ($($f:ident),*) => { $( if let Some(v) = &a.$f { s.$f = v.clone(); } )* };
    }
    over!(variant, alice, bob, weight, mode, beta, gamma, sigma0, r, eps, levels, max_turns, seed, budget);
    if let Some(t) = &a.target {
        s.target = Some(t.split(',').map(|x| x.trim().to_string()).collect());
    }
    if a.q_cert.is_some() {
        s.q_cert = a.q_cert;
    }
    let trace = s.play()?;
    let mut text = trace.to_json();
    text.push('\n');
    Ok((text, 0))
}

fn cmd_verify(a: &VerifyArgs) -> Result<(String, i32), Fail> {
    let names: Vec<&str> = if a.suite == "all" { SUITES.to_vec() } else { vec![a.suite.as_str()] };
    let reports = names.iter().map(|n| run_suite(n, a.budget, a.seed)).collect::<Result<Vec<_>, _>>()?;
    let code = if reports.iter().any(|r| r.failures > 0) { 1 } else { 0 };
    let text = if reports.len() == 1 { json(&reports[0]) } else { json(&reports) };
    Ok((text, code))
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code. Results go to `out` or the `--out` file, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return 0;
            }
            let _ = write!(err, "{}", e.render());
            return 2;
        }
    };
    let result = match &cli.cmd {
        Command::Params(a) => cmd_params(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Orbit(a) => cmd_orbit(a),
        Command::Attach(a) => cmd_attach(a),
        Command::Play(a) => cmd_play(a),
        Command::VerifyLemmas(a) => cmd_verify(a),
    };
    match result {
        Ok((text, code)) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &text).map_err(|e| format!("{}: {e}", path.display())),
                None => out.write_all(text.as_bytes()).map_err(|e| e.to_string()),
            };
            match written {
                Ok(()) => code,
                Err(e) => {
                    let _ = writeln!(err, "error: {e}");
                    2
                }
            }
        }
        Err(Fail(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}
