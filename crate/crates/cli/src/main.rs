use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nnnchain::chain::{coupling_profile, format_rational, parse_rational};
use nnnchain::export::{self, amplitude_rows, fmt_f64};
use nnnchain::oracle::propagate_oracle;
use nnnchain::revival::{
    self, predict_balanced_fr, predict_pst, verify_prediction, RevivalKind, RevivalPrediction,
    VERIFICATION_TOL,
};
use nnnchain::{ChainSpec, RationalRatio, SpectralData, TOLERANCE_N};
use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

mod output;

use output::{emit, Format};

#[derive(Parser, Debug)]
#[command(name = "nnnchain", version, about = "Krawtchouk spin chains with next-to-nearest-neighbour couplings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write the coupling profile (n, j1, j2, b).
    Export {
        #[command(flatten)]
        chain: ChainArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Propagate a basis state and write its amplitudes.
    Simulate {
        #[command(flatten)]
        chain: ChainArgs,
        /// Initially excited site.
        #[arg(long, default_value_t = 0)]
        site: usize,
        /// Evolution time.
        #[arg(long = "t", allow_negative_numbers = true)]
        t: f64,
        /// `abs` for plain time, `pi-over-beta` for multiples of π/|β|.
        #[arg(long, value_enum, default_value_t = TimeUnits::PiOverBeta)]
        time_units: TimeUnits,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Sample |μ|², |ν|² and leakage on a uniform grid over [0, t-max].
    Scan {
        #[command(flatten)]
        chain: ChainArgs,
        /// End of the time window, in the chosen time units.
        #[arg(long, allow_negative_numbers = true)]
        t_max: f64,
        /// Number of grid points, endpoints included.
        #[arg(long)]
        steps: usize,
        /// `abs` for plain time, `pi-over-beta` for multiples of π/|β|.
        #[arg(long, value_enum, default_value_t = TimeUnits::Abs)]
        time_units: TimeUnits,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Predict PST or balanced fractional revival from the parity rules.
    Predict {
        #[command(flatten)]
        chain: ChainArgs,
        /// Revival to predict: perfect state transfer or balanced fractional revival.
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Machine-readable output instead of text.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Predict, then check the prediction against the simulated dynamics.
    Verify {
        #[command(flatten)]
        chain: ChainArgs,
        /// Revival to predict: perfect state transfer or balanced fractional revival.
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Allowed deviation of the end-site populations from their targets.
        #[arg(long, default_value_t = VERIFICATION_TOL)]
        tol: f64,
        /// Machine-readable output instead of text.
        #[arg(long, value_enum)]
        format: Option<Format>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the spectral propagator with the matrix-exponential oracle on random chains.
    Selftest {
        /// Seed for the random chain generator.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random chains to compare.
        #[arg(long, default_value_t = 200)]
        count: usize,
        /// Largest chain length index drawn.
        #[arg(long = "n-max", default_value_t = 20)]
        n_max: usize,
    },
}

#[derive(Args, Debug)]
struct ChainArgs {
    /// Chain length index N (sites 0..=N).
    #[arg(long = "N")]
    n: usize,
    /// Next-to-nearest-neighbour strength, "p/q" or an integer.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    alpha: String,
    /// Nearest-neighbour strength, "p/q" or an integer.
    #[arg(long, default_value = "1", allow_hyphen_values = true)]
    beta: String,
}

#[derive(Args, Debug)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum TimeUnits {
    Abs,
    PiOverBeta,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum KindArg {
    Pst,
    Fr,
}

#[derive(Debug)]
enum Outcome {
    Ok,
    Failed,
}

type CliResult<T> = Result<T, String>;

impl ChainArgs {
    fn spec(&self) -> CliResult<ChainSpec> {
        let alpha = parse_rational(&self.alpha).map_err(|e| e.to_string())?;
        let beta = parse_rational(&self.beta).map_err(|e| e.to_string())?;
        let spec = ChainSpec::new(self.n, alpha, beta).map_err(|e| e.to_string())?;
        if spec.n_max > TOLERANCE_N {
            eprintln!("warning: N = {} > {TOLERANCE_N}; stated tolerances do not apply", spec.n_max);
        }
        Ok(spec)
    }
}

fn absolute_time(value: f64, units: TimeUnits, spec: &ChainSpec) -> CliResult<f64> {
    let t = match units {
        TimeUnits::Abs => value,
        TimeUnits::PiOverBeta => {
            let beta = spec.beta_f64().abs();
            if beta == 0.0 {
                return Err("--time-units pi-over-beta needs a nonzero beta".into());
            }
            value * PI / beta
        }
    };
    if t.is_finite() {
        Ok(t)
    } else {
        Err(format!("time {value} is not finite"))
    }
}

fn predict(spec: &ChainSpec, kind: KindArg) -> CliResult<RevivalPrediction> {
    let ratio = RationalRatio::from_spec(spec).map_err(|e| e.to_string())?;
    Ok(match kind {
        KindArg::Pst => predict_pst(ratio, spec.n_max),
        KindArg::Fr => predict_balanced_fr(ratio, spec.n_max),
    })
}

#[derive(Serialize)]
struct SimulateResult {
    site: usize,
    t: f64,
    norm_sqr: f64,
    amplitudes: Vec<export::AmplitudeRow>,
}

#[derive(Serialize)]
struct PredictResult<'a> {
    prediction: &'a RevivalPrediction,
    summary: String,
    time: Option<f64>,
    time_over_pi: Option<String>,
}

fn run(cli: Cli) -> CliResult<Outcome> {
    match cli.command {
        Command::Export { chain, out } => {
            let spec = chain.spec()?;
            let profile = coupling_profile(&spec);
            let text = match out.format {
                Format::Csv => export::profile_csv(&profile),
                Format::Json => export::to_json(&spec, &profile),
            };
            emit(out.out.as_deref(), &text)?;
        }
        Command::Simulate { chain, site, t, time_units, out } => {
            let spec = chain.spec()?;
            let t = absolute_time(t, time_units, &spec)?;
            let state = SpectralData::new(&spec)
                .and_then(|d| d.propagate(site, t))
                .map_err(|e| e.to_string())?;
            let text = match out.format {
                Format::Csv => export::state_csv(&state),
                Format::Json => export::to_json(
                    &spec,
                    &SimulateResult { site, t, norm_sqr: state.norm_sqr(), amplitudes: amplitude_rows(&state) },
                ),
            };
            emit(out.out.as_deref(), &text)?;
        }
        Command::Scan { chain, t_max, steps, time_units, out } => {
            let spec = chain.spec()?;
            let t_max = absolute_time(t_max, time_units, &spec)?;
            let scan = revival::scan(&spec, t_max, steps).map_err(|e| e.to_string())?;
            let text = match out.format {
                Format::Csv => export::scan_csv(&scan),
                Format::Json => export::to_json(&spec, &scan),
            };
            emit(out.out.as_deref(), &text)?;
        }
        Command::Predict { chain, kind, format } => {
            let spec = chain.spec()?;
            let prediction = predict(&spec, kind)?;
            let text = match format {
                None => prediction_text(&spec, &prediction),
                Some(Format::Json) => export::to_json(
                    &spec,
                    &PredictResult {
                        prediction: &prediction,
                        summary: prediction.describe(spec.beta),
                        time: prediction.time(spec.beta),
                        time_over_pi: prediction.time_over_pi(spec.beta).map(format_rational),
                    },
                ),
                Some(Format::Csv) => prediction_csv(&spec, &prediction),
            };
            emit(None, &text)?;
        }
        Command::Verify { chain, kind, tol, format, out } => {
            let spec = chain.spec()?;
            let prediction = predict(&spec, kind)?;
            if prediction.kind == RevivalKind::None {
                return Err(format!("nothing to verify: {}", prediction.describe(spec.beta)));
            }
            let report = verify_prediction(&spec, &prediction, tol).map_err(|e| e.to_string())?;
            let text = match format {
                None => verify_text(&spec, &prediction, &report),
                Some(Format::Json) => export::to_json(&spec, &report),
                Some(Format::Csv) => export::report_csv(&report),
            };
            emit(out.as_deref(), &text)?;
            if !report.pass {
                return Ok(Outcome::Failed);
            }
        }
        Command::Selftest { seed, count, n_max } => return selftest(seed, count, n_max),
    }
    Ok(Outcome::Ok)
}

fn prediction_text(spec: &ChainSpec, p: &RevivalPrediction) -> String {
    let c = &p.certificate;
    let mut s = String::new();
    writeln!(s, "{}", p.describe(spec.beta)).unwrap();
    writeln!(s, "ratio alpha/beta = {}/{}, N = {}", c.p, c.q, c.n_max).unwrap();
    writeln!(
        s,
        "parity: p {}, q {}, N {}",
        parity(c.p_odd),
        parity(c.q_odd),
        parity(c.n_odd)
    )
    .unwrap();
    writeln!(s, "rule: {}", c.rule).unwrap();
    writeln!(s, "phase: {}", p.phase_note).unwrap();
    s
}

fn prediction_csv(spec: &ChainSpec, p: &RevivalPrediction) -> String {
    let c = &p.certificate;
    format!(
        "kind,time,p,q,N,p_odd,q_odd,N_odd,parity_match\n{},{},{},{},{},{},{},{},{}\n",
        p.kind,
        p.time(spec.beta).map(fmt_f64).unwrap_or_default(),
        c.p,
        c.q,
        c.n_max,
        c.p_odd,
        c.q_odd,
        c.n_odd,
        c.parity_match
    )
}

fn parity(odd: bool) -> &'static str {
    if odd {
        "odd"
    } else {
        "even"
    }
}

fn verify_text(spec: &ChainSpec, p: &RevivalPrediction, r: &revival::VerificationReport) -> String {
    let mut s = String::new();
    let verdict = if r.pass { "pass" } else { "FAIL" };
    writeln!(s, "{verdict}: {}", p.describe(spec.beta)).unwrap();
    writeln!(s, "t = {}", r.predicted_time).unwrap();
    writeln!(s, "|μ|² = {:.10}", r.mu_sq).unwrap();
    writeln!(s, "|ν|² = {:.10}", r.nu_sq).unwrap();
    writeln!(s, "leakage = {:.3e}", r.leakage).unwrap();
    if let Some(q) = r.phase_quadrature {
        writeln!(s, "Re(ν·conj(μ))/|μν| = {q:.3e}").unwrap();
    }
    writeln!(s, "tol = {:e}", r.tol).unwrap();
    s
}

fn selftest(seed: u64, count: usize, n_max: usize) -> CliResult<Outcome> {
    const TOL: f64 = 1e-9;
    if n_max == 0 || n_max > nnnchain::MAX_N {
        return Err(format!("--n-max must lie in 1..={}", nnnchain::MAX_N));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst_diff = 0.0f64;
    let mut worst_norm = 0.0f64;
    for _ in 0..count {
        let n = rng.gen_range(1..=n_max);
        let alpha = Rational64::new(rng.gen_range(-8..=8), rng.gen_range(1..=4));
        let beta = Rational64::new(rng.gen_range(-8..=8), rng.gen_range(1..=4));
        let spec = ChainSpec::new(n, alpha, beta).map_err(|e| e.to_string())?;
        let site = rng.gen_range(0..=n);
        let t = rng.gen_range(-10.0 * PI..=10.0 * PI);
        let fast = SpectralData::new(&spec)
            .and_then(|d| d.propagate(site, t))
            .map_err(|e| e.to_string())?;
        let slow = propagate_oracle(&spec, site, t).map_err(|e| e.to_string())?;
        worst_diff = worst_diff.max(fast.max_abs_diff(&slow));
        for psi in [&fast, &slow] {
            worst_norm = worst_norm.max((psi.norm_sqr() - 1.0).abs());
        }
    }
    let pass = worst_diff < TOL;
    let mut s = String::new();
    writeln!(s, "{}: {count} draws, seed {seed}", if pass { "pass" } else { "FAIL" }).unwrap();
    writeln!(s, "max amplitude deviation = {worst_diff:.3e} (tol {TOL:e})").unwrap();
    writeln!(s, "max |norm² - 1| = {worst_norm:.3e}").unwrap();
    emit(None, &s)?;
    Ok(if pass { Outcome::Ok } else { Outcome::Failed })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(msg) => {
            let _ = writeln!(std::io::stderr(), "error: {msg}");
            ExitCode::from(2)
        }
    }
}
