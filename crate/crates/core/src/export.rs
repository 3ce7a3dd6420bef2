//! CSV and JSON renderings of profiles, states, scans and reports.
//!
//! CSV floats carry 17 significant digits so every value round-trips through
//! `f64` parsing. JSON documents share one envelope:
//! `{"spec": {"N", "alpha", "beta"}, "result": ...}` with `alpha`/`beta` as
//! rational strings.

use std::fmt::Write;

use serde::Serialize;

use crate::chain::{ChainSpec, CouplingProfile};
use crate::revival::{FidelityScan, VerificationReport};
use crate::spectral::StateVector;

pub const PROFILE_HEADER: &str = "n,j1,j2,b";
pub const STATE_HEADER: &str = "n,re,im,abs_sq";
pub const SCAN_HEADER: &str = "t,mu_sq,nu_sq,leakage";
pub const REPORT_HEADER: &str =
    "kind,predicted_time,achieved_fidelity,mu_sq,nu_sq,leakage,phase_quadrature,tol,pass";

/// 17 significant digits in scientific notation.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn csv<I: IntoIterator<Item = String>>(header: &str, rows: I) -> String {
    let mut out = String::new();
    out.push_str(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row);
        out.push('\n');
    }
    out
}

pub fn profile_csv(profile: &CouplingProfile) -> String {
    csv(
        PROFILE_HEADER,
        (0..profile.b.len()).map(|n| {
            let (j1, j2, b) = profile.row(n);
            format!("{n},{},{},{}", fmt_f64(j1), fmt_f64(j2), fmt_f64(b))
        }),
    )
}

pub fn state_csv(state: &StateVector) -> String {
    csv(
        STATE_HEADER,
        state.amplitudes.iter().enumerate().map(|(n, a)| {
            format!("{n},{},{},{}", fmt_f64(a.re), fmt_f64(a.im), fmt_f64(a.norm_sqr()))
        }),
    )
}

pub fn scan_csv(scan: &FidelityScan) -> String {
    csv(
        SCAN_HEADER,
        (0..scan.len()).map(|i| {
            format!(
                "{},{},{},{}",
                fmt_f64(scan.times[i]),
                fmt_f64(scan.mu_sq[i]),
                fmt_f64(scan.nu_sq[i]),
                fmt_f64(scan.leakage[i])
            )
        }),
    )
}

pub fn report_csv(report: &VerificationReport) -> String {
    let mut row = String::new();
    write!(
        row,
        "{},{},{},{},{},{},{},{},{}",
        report.kind,
        fmt_f64(report.predicted_time),
        fmt_f64(report.achieved_fidelity),
        fmt_f64(report.mu_sq),
        fmt_f64(report.nu_sq),
        fmt_f64(report.leakage),
        report.phase_quadrature.map(fmt_f64).unwrap_or_default(),
        fmt_f64(report.tol),
        report.pass
    )
    .unwrap();
    csv(REPORT_HEADER, [row])
}

/// JSON row of a state vector.
#[derive(Debug, Clone, Serialize)]
pub struct AmplitudeRow {
    pub n: usize,
    pub re: f64,
    pub im: f64,
    pub abs_sq: f64,
}

pub fn amplitude_rows(state: &StateVector) -> Vec<AmplitudeRow> {
    state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(n, a)| AmplitudeRow { n, re: a.re, im: a.im, abs_sq: a.norm_sqr() })
        .collect()
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    spec: &'a ChainSpec,
    result: &'a T,
}

/// `{"spec": …, "result": …}`, pretty-printed with a trailing newline.
pub fn to_json<T: Serialize>(spec: &ChainSpec, result: &T) -> String {
    let mut out = serde_json::to_string_pretty(&Envelope { spec, result })
        .expect("serializing plain data cannot fail");
    out.push('\n');
    out
}
