//! Perfect state transfer and balanced fractional revival: exact predictors
//! driven by the ratio `α/β = p/q`, fidelity scans of the end amplitudes, and
//! the loop that checks one against the other.
//!
//! Predictor rules:
//!
//! - PST happens whenever `α/β` is rational, first at `T = qπ/β`, except that
//!   for odd `p` the parities of `q` and `N` must agree. `p = 0` is the plain
//!   Krawtchouk chain with `T = π/β`.
//! - Balanced revival (`|μ|² = |ν|² = ½`) needs odd `p` and matching parities
//!   of `q` and `N`; it first appears at `τ = qπ/(2β)`. It never happens for
//!   `p = 0`.
//!
//! Every time here is a rational multiple of `π/|β|`. Flipping the sign of
//! both couplings maps `H` to `-H`, and because `H` is real the end
//! populations are even in `t`, so a negative `β` only changes phases.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::chain::{format_rational, ChainSpec};
use crate::error::{Error, Result};
use crate::spectral::SpectralData;

/// Default tolerance for [`detect_revivals`].
pub const DETECTION_TOL: f64 = 1e-6;
/// Default tolerance for [`verify_prediction`].
pub const VERIFICATION_TOL: f64 = 1e-7;
/// Leakage is never allowed below this (rounding slack on `1 - |μ|² - |ν|²`).
pub const LEAKAGE_FLOOR: f64 = -1e-12;

/// `α/β = p/q` in lowest terms with `q >= 1`; `α = 0` is `0/1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct RationalRatio {
    pub p: i64,
    pub q: i64,
}

impl RationalRatio {
    pub fn new(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidRational(format!("{p}/{q}")));
        }
        let r = Rational64::new(p, q);
        Ok(Self { p: *r.numer(), q: *r.denom() })
    }

    pub fn from_spec(spec: &ChainSpec) -> Result<Self> {
        if spec.beta.is_zero() {
            return Err(Error::ZeroBeta);
        }
        let r = spec.alpha / spec.beta;
        Ok(Self { p: *r.numer(), q: *r.denom() })
    }

    pub fn p_odd(&self) -> bool {
        self.p.is_odd()
    }
}

impl fmt::Display for RationalRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.p, self.q)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum RevivalKind {
    #[serde(rename = "PST")]
    Pst,
    #[serde(rename = "BalancedFR")]
    BalancedFr,
    None,
}

impl fmt::Display for RevivalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RevivalKind::Pst => "PST",
            RevivalKind::BalancedFr => "BalancedFR",
            RevivalKind::None => "None",
        })
    }
}

/// The parity facts a prediction rests on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParityCertificate {
    pub p: i64,
    pub q: i64,
    #[serde(rename = "N")]
    pub n_max: usize,
    pub p_odd: bool,
    pub q_odd: bool,
    pub n_odd: bool,
    pub parity_match: bool,
    pub rule: String,
}

impl ParityCertificate {
    fn new(ratio: RationalRatio, n_max: usize, rule: impl Into<String>) -> Self {
        let q_odd = ratio.q.is_odd();
        let n_odd = n_max % 2 == 1;
        Self {
            p: ratio.p,
            q: ratio.q,
            n_max,
            p_odd: ratio.p_odd(),
            q_odd,
            n_odd,
            parity_match: q_odd == n_odd,
            rule: rule.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RevivalPrediction {
    pub kind: RevivalKind,
    pub ratio: RationalRatio,
    #[serde(rename = "N")]
    pub n_max: usize,
    /// First occurrence as a multiple of `π/|β|`; absent for `None`.
    #[serde(serialize_with = "ser_opt_rational")]
    pub time_over_pi_beta: Option<Rational64>,
    pub phase_note: String,
    pub certificate: ParityCertificate,
}

fn ser_opt_rational<S: serde::Serializer>(
    r: &Option<Rational64>,
    ser: S,
) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => ser.serialize_some(&format_rational(*r)),
        None => ser.serialize_none(),
    }
}

const PHASE_NOTE: &str = "global phase left free; only populations are predicted";

impl RevivalPrediction {
    /// Absolute time for a given `β`.
    pub fn time(&self, beta: Rational64) -> Option<f64> {
        let c = self.time_over_pi(beta)?;
        Some(PI * c.to_f64()?)
    }

    /// Time as a multiple of `π` for a given `β`.
    pub fn time_over_pi(&self, beta: Rational64) -> Option<Rational64> {
        if beta.is_zero() {
            return None;
        }
        self.time_over_pi_beta.map(|c| c / beta.abs())
    }

    /// One-line summary, e.g. `PST at T = π (q=1)`.
    pub fn describe(&self, beta: Rational64) -> String {
        match (self.kind, self.time_over_pi(beta)) {
            (RevivalKind::Pst, Some(c)) => {
                format!("PST at T = {} (q={})", format_pi_multiple(c), self.ratio.q)
            }
            (RevivalKind::BalancedFr, Some(c)) => {
                format!("BalancedFR at τ = {} (q={})", format_pi_multiple(c), self.ratio.q)
            }
            _ => format!("None: {}", self.certificate.rule),
        }
    }
}

/// Render `c·π` as `π`, `3π`, `π/2`, `3π/4`, `-π`, …
pub fn format_pi_multiple(c: Rational64) -> String {
    let (num, den) = (*c.numer(), *c.denom());
    let head = match num {
        0 => return "0".to_string(),
        1 => "π".to_string(),
        -1 => "-π".to_string(),
        k => format!("{k}π"),
    };
    if den == 1 {
        head
    } else {
        format!("{head}/{den}")
    }
}

pub fn predict_pst(ratio: RationalRatio, n_max: usize) -> RevivalPrediction {
    let (kind, rule) = if ratio.p == 0 {
        (RevivalKind::Pst, "p = 0: nearest-neighbour chain, PST at pi/beta")
    } else if !ratio.p_odd() {
        (RevivalKind::Pst, "p even: no parity restriction")
    } else if ratio.q.is_odd() == (n_max % 2 == 1) {
        (RevivalKind::Pst, "p odd and q, N of equal parity")
    } else {
        (RevivalKind::None, "p odd and q, N of different parity")
    };
    let time = (kind == RevivalKind::Pst).then(|| Rational64::from_integer(ratio.q));
    RevivalPrediction {
        kind,
        ratio,
        n_max,
        time_over_pi_beta: time,
        phase_note: PHASE_NOTE.to_string(),
        certificate: ParityCertificate::new(ratio, n_max, rule),
    }
}

pub fn predict_balanced_fr(ratio: RationalRatio, n_max: usize) -> RevivalPrediction {
    let (kind, rule) = if ratio.p == 0 {
        (RevivalKind::None, "p = 0: no two-site revival in the nearest-neighbour chain")
    } else if !ratio.p_odd() {
        (RevivalKind::None, "p even: balanced revival requires p odd")
    } else if ratio.q.is_odd() == (n_max % 2 == 1) {
        (RevivalKind::BalancedFr, "p odd and q, N of equal parity")
    } else {
        (RevivalKind::None, "p odd and q, N of different parity")
    };
    let time = (kind == RevivalKind::BalancedFr).then(|| Rational64::new(ratio.q, 2));
    RevivalPrediction {
        kind,
        ratio,
        n_max,
        time_over_pi_beta: time,
        phase_note: PHASE_NOTE.to_string(),
        certificate: ParityCertificate::new(ratio, n_max, rule),
    }
}

/// End populations sampled on a uniform time grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FidelityScan {
    pub times: Vec<f64>,
    pub mu_sq: Vec<f64>,
    pub nu_sq: Vec<f64>,
    /// `1 - |μ|² - |ν|²`.
    pub leakage: Vec<f64>,
}

impl FidelityScan {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Evaluate the end amplitudes at `t_i = t_max·i/(n_steps − 1)`, `i = 0..n_steps`.
pub fn scan(spec: &ChainSpec, t_max: f64, n_steps: usize) -> Result<FidelityScan> {
    if !(t_max.is_finite() && t_max > 0.0) {
        return Err(Error::InvalidScan(format!("t_max must be positive and finite, got {t_max}")));
    }
    if n_steps < 2 {
        return Err(Error::InvalidScan(format!("need at least 2 grid points, got {n_steps}")));
    }
    let data = SpectralData::new(spec)?;
    let last = (n_steps - 1) as f64;
    let rows: Vec<(f64, f64, f64)> = (0..n_steps)
        .into_par_iter()
        .map(|i| {
            let t = t_max * i as f64 / last;
            // t is finite by construction.
            let (mu, nu) = data.end_amplitudes(t).expect("finite time");
            (t, mu.norm_sqr(), nu.norm_sqr())
        })
        .collect();

    let mut out = FidelityScan {
        times: Vec::with_capacity(n_steps),
        mu_sq: Vec::with_capacity(n_steps),
        nu_sq: Vec::with_capacity(n_steps),
        leakage: Vec::with_capacity(n_steps),
    };
    for (t, m, n) in rows {
        out.times.push(t);
        out.mu_sq.push(m);
        out.nu_sq.push(n);
        out.leakage.push(1.0 - m - n);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EventKind {
    #[serde(rename = "PST")]
    Pst,
    #[serde(rename = "BalancedFR")]
    BalancedFr,
    Return,
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventKind::Pst => "PST",
            EventKind::BalancedFr => "BalancedFR",
            EventKind::Return => "Return",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RevivalEvent {
    pub time: f64,
    pub kind: EventKind,
    /// Grid index of the reported point.
    pub index: usize,
    pub mu_sq: f64,
    pub nu_sq: f64,
    pub leakage: f64,
}

fn classify(mu_sq: f64, nu_sq: f64, leakage: f64, tol: f64) -> Option<EventKind> {
    if leakage >= tol {
        return None;
    }
    if nu_sq > 1.0 - tol {
        Some(EventKind::Pst)
    } else if mu_sq > 1.0 - tol {
        Some(EventKind::Return)
    } else if (mu_sq - 0.5).abs() < tol && (nu_sq - 0.5).abs() < tol {
        Some(EventKind::BalancedFr)
    } else {
        None
    }
}

/// Larger is better within a run of one kind.
fn quality(kind: EventKind, mu_sq: f64, nu_sq: f64) -> f64 {
    match kind {
        EventKind::Pst => nu_sq,
        EventKind::Return => mu_sq,
        EventKind::BalancedFr => -(mu_sq - 0.5).abs().max((nu_sq - 0.5).abs()),
    }
}

/// Flag revival instants in a scan. The starting point `t = 0` is the initial
/// condition, not an event, and is skipped. Runs of consecutive flagged points
/// of one kind collapse to their best point.
pub fn detect_revivals(scan: &FidelityScan, tol: f64) -> Result<Vec<RevivalEvent>> {
    if !(tol > 0.0 && tol <= 0.1) {
        return Err(Error::InvalidTolerance(tol));
    }
    let mut events: Vec<RevivalEvent> = Vec::new();
    let mut prev: Option<(usize, EventKind)> = None;
    for i in 0..scan.len() {
        let t = scan.times[i];
        let (m, n, l) = (scan.mu_sq[i], scan.nu_sq[i], scan.leakage[i]);
        let kind = if t == 0.0 { None } else { classify(m, n, l, tol) };
        let Some(kind) = kind else {
            prev = None;
            continue;
        };
        let candidate = RevivalEvent { time: t, kind, index: i, mu_sq: m, nu_sq: n, leakage: l };
        match (prev, events.last_mut()) {
            (Some((j, k)), Some(last)) if j + 1 == i && k == kind => {
                if quality(kind, m, n) > quality(kind, last.mu_sq, last.nu_sq) {
                    *last = candidate;
                }
            }
            _ => events.push(candidate),
        }
        prev = Some((i, kind));
    }
    Ok(events)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub kind: RevivalKind,
    pub predicted_time: f64,
    /// `|ν|²` for PST; `1 - leakage` for balanced revival.
    pub achieved_fidelity: f64,
    pub mu_sq: f64,
    pub nu_sq: f64,
    pub leakage: f64,
    /// `Re(ν·μ̄)/|μν|`; zero when the end amplitudes are in quadrature.
    pub phase_quadrature: Option<f64>,
    pub tol: f64,
    pub pass: bool,
}

/// `Re(ν·μ̄)/|μν|`, or `None` when either amplitude vanishes.
pub fn phase_quadrature(mu: Complex64, nu: Complex64) -> Option<f64> {
    let denom = mu.norm() * nu.norm();
    (denom > 0.0).then(|| (nu * mu.conj()).re / denom)
}

/// Evaluate the end amplitudes at the predicted time and apply the pass rule.
pub fn verify_prediction(
    spec: &ChainSpec,
    prediction: &RevivalPrediction,
    tol: f64,
) -> Result<VerificationReport> {
    if !(tol > 0.0 && tol <= 0.1) {
        return Err(Error::InvalidTolerance(tol));
    }
    if prediction.kind == RevivalKind::None {
        return Err(Error::NothingToVerify);
    }
    let ratio = RationalRatio::from_spec(spec)?;
    if ratio != prediction.ratio || spec.n_max != prediction.n_max {
        return Err(Error::Inconsistent {
            expected: format!("N={} alpha/beta={}", prediction.n_max, prediction.ratio),
            actual: format!("N={} alpha/beta={}", spec.n_max, ratio),
        });
    }
    let t = prediction.time(spec.beta).ok_or(Error::NothingToVerify)?;
    let (mu, nu) = SpectralData::new(spec)?.end_amplitudes(t)?;
    let (mu_sq, nu_sq) = (mu.norm_sqr(), nu.norm_sqr());
    let leakage = 1.0 - mu_sq - nu_sq;

    let (achieved_fidelity, pass) = match prediction.kind {
        RevivalKind::Pst => (nu_sq, nu_sq > 1.0 - tol),
        _ => (1.0 - leakage, leakage < tol && (mu_sq - 0.5).abs() < tol),
    };
    Ok(VerificationReport {
        kind: prediction.kind,
        predicted_time: t,
        achieved_fidelity,
        mu_sq,
        nu_sq,
        leakage,
        phase_quadrature: phase_quadrature(mu, nu),
        tol,
        pass,
    })
}
