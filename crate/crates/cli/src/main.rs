mod report;

use std::fs::File;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use padic_cf::arith::parse_rational;
use padic_cf::{
    convergents, expand, hensel_orbit, run_census, verify_convergence, Algorithm, CensusConfig,
    Element, Error, HenselState, Prime, QuadraticElement, RationalElement, Valuation,
    DEFAULT_EXPAND_CAP, DEFAULT_SCHNEIDER_CAP,
};

use report::ExpansionOut;

#[derive(Parser)]
#[command(name = "padic-cf", version, about = "p-adic continued fractions of rational and quadratic elements")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Expand a rational or quadratic element.
    Expand(ExpandArgs),
    /// Print the orbit of a Hensel state.
    Orbit(OrbitArgs),
    /// Sweep a box of Hensel states and check orbit shapes against the reduced sets.
    Census(CensusArgs),
    /// Check the error valuation of each convergent.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    p: u64,
    /// A, B, C or schneider.
    #[arg(long)]
    algorithm: Algorithm,
    #[arg(long, env = "PADIC_CF_MAX_STEPS")]
    max_steps: Option<usize>,
}

impl Common {
    fn prime(&self) -> Result<Prime, Error> {
        Prime::new(self.p)
    }

    fn cap(&self) -> usize {
        self.max_steps.unwrap_or(match self.algorithm {
            Algorithm::Schneider => DEFAULT_SCHNEIDER_CAP,
            _ => DEFAULT_EXPAND_CAP,
        })
    }
}

#[derive(Args)]
struct InputArgs {
    /// A rational `n/d`.
    #[arg(long, allow_hyphen_values = true, conflicts_with = "poly", required_unless_present = "poly")]
    rational: Option<String>,
    /// Integer coefficients `a,b,c` of `aX^2 + bX + c`.
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Rational approximation selecting the root.
    #[arg(long, allow_hyphen_values = true, requires = "prec", requires = "poly")]
    approx: Option<String>,
    /// Exponent to which `--approx` is accurate.
    #[arg(long, requires = "approx")]
    prec: Option<i64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args)]
struct ExpandArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    input: InputArgs,
    /// Print this many terms, unrolling a period.
    #[arg(long)]
    terms: Option<usize>,
    /// Also print convergents up to this index.
    #[arg(long)]
    convergents: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
}

#[derive(Args)]
struct OrbitArgs {
    #[command(flatten)]
    common: Common,
    /// The state `b,c`.
    #[arg(long, allow_hyphen_values = true)]
    state: String,
}

#[derive(Args)]
struct CensusArgs {
    #[command(flatten)]
    common: Common,
    /// `lo:hi`, inclusive.
    #[arg(long, allow_hyphen_values = true)]
    b_range: String,
    #[arg(long, allow_hyphen_values = true)]
    c_range: String,
    /// Worker threads; 0 uses every core.
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// CSV destination; stdout if absent.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 5)]
    upto: usize,
}

enum Failure {
    Core(Error),
    Io(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CapExceeded { .. } => 3,
        Error::VerificationFailed { .. } => 4,
        _ => 2,
    }
}

fn invalid(msg: String) -> Error {
    Error::InvalidInput(msg)
}

fn parse_ints(s: &str, count: usize, what: &str) -> Result<Vec<BigInt>, Error> {
    let parts: Result<Vec<BigInt>, _> = s.split(',').map(|x| x.trim().parse::<BigInt>()).collect();
    match parts {
        Ok(v) if v.len() == count => Ok(v),
        _ => Err(invalid(format!("{what} must be {count} comma-separated integers, got {s:?}"))),
    }
}

fn parse_range(s: &str) -> Result<(i64, i64), Error> {
    let bad = || invalid(format!("range must be lo:hi, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    Ok((lo.trim().parse().map_err(|_| bad())?, hi.trim().parse().map_err(|_| bad())?))
}

fn build_element(input: &InputArgs, p: Prime) -> Result<Element, Error> {
    if let Some(r) = &input.rational {
        return Ok(RationalElement::new(parse_rational(r)?, p).into());
    }
    let poly = input.poly.as_deref().unwrap_or_default();
    let [a, b, c]: [BigInt; 3] = parse_ints(poly, 3, "--poly")?.try_into().unwrap();
    if a == BigInt::ZERO {
        if b == BigInt::ZERO {
            return Err(invalid("polynomial is constant".into()));
        }
        let root = padic_cf::Rational::new(-c, b);
        return Ok(RationalElement::new(root, p).into());
    }
    let x = match (&input.approx, input.prec) {
        (Some(approx), Some(m)) => QuadraticElement::new(a, b, c, p, parse_rational(approx)?, m)?,
        _ => QuadraticElement::default_root(a, b, c, p)?,
    };
    Ok(x.into())
}

fn cmd_expand(args: &ExpandArgs) -> Result<(), Failure> {
    let p = args.common.prime()?;
    let x = build_element(&args.input, p)?;
    let e = expand(&x, args.common.algorithm, args.common.cap())?;
    let convs = args.convergents.map(|n| convergents(&e, n));
    let out = ExpansionOut::new(&e, &args.common.algorithm.to_string(), args.terms, convs.as_deref());
    match args.format {
        Format::Json => println!("{}", serde_json::to_string(&out).expect("serializable")),
        Format::Text => print!("{}", out.to_text()),
    }
    Ok(())
}

fn cmd_orbit(args: &OrbitArgs) -> Result<(), Failure> {
    let p = args.common.prime()?;
    let [b, c]: [BigInt; 2] = parse_ints(&args.state, 2, "--state")?.try_into().unwrap();
    let start = HenselState::new(b, c, p)?;
    let orbit = hensel_orbit(&start, args.common.algorithm, args.common.cap())?;
    let mut out = io::stdout().lock();
    for (i, (s, which)) in orbit.states.iter().zip(&orbit.maps).enumerate() {
        let mark = if i == orbit.preperiod { "  <- cycle entry" } else { "" };
        writeln!(
            out,
            "{i}: {s} {which} disc {} {}{mark}",
            s.discriminant(),
            s.quadrant()
        )?;
    }
    writeln!(out, "preperiod {}, period {}", orbit.preperiod, orbit.period)?;
    Ok(())
}

fn cmd_census(args: &CensusArgs) -> Result<u8, Failure> {
    let cfg = CensusConfig {
        p: args.common.prime()?,
        algorithm: args.common.algorithm,
        b_range: parse_range(&args.b_range)?,
        c_range: parse_range(&args.c_range)?,
        jobs: args.jobs,
        max_steps: args.common.cap(),
    };
    let report = run_census(&cfg)?;
    let sink: Box<dyn Write> = match &args.out {
        Some(path) => Box::new(File::create(path)?),
        None => Box::new(io::stdout().lock()),
    };
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["b", "c", "quadrant", "preperiod", "period", "pure", "closed_form_pure"])?;
    for row in &report.rows {
        w.write_record([
            row.b.to_string(),
            row.c.to_string(),
            row.quadrant.to_string(),
            row.preperiod.to_string(),
            row.period.to_string(),
            row.pure.to_string(),
            row.closed_form_pure.to_string(),
        ])?;
    }
    w.flush()?;

    let mut err = io::stderr().lock();
    writeln!(err, "{} states, longest orbit {}", report.rows.len(), report.max_orbit_len)?;
    for ((pre, per), n) in &report.counts {
        writeln!(err, "preperiod {pre}, period {per}: {n}")?;
    }
    for v in &report.violations {
        writeln!(err, "violation at ({}, {}): {}", v.b, v.c, v.reason)?;
    }
    Ok(if report.violations.is_empty() { 0 } else { 4 })
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let p = args.common.prime()?;
    let x = build_element(&args.input, p)?;
    let e = expand(&x, args.common.algorithm, args.common.cap())?;
    let upto = e.available().map_or(args.upto, |len| args.upto.min(len));
    for n in 1..=upto {
        let r = verify_convergence(&x, &e, n)?;
        match r.predicted {
            Valuation::Infinity => println!("n={n} exact"),
            _ => println!("n={n} predicted {} computed {}", r.predicted, r.computed),
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Expand(a) => cmd_expand(a).map(|_| 0),
        Command::Orbit(a) => cmd_orbit(a).map(|_| 0),
        Command::Census(a) => cmd_census(a),
        Command::Verify(a) => cmd_verify(a).map(|_| 0),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
