//! Chain parameters and the single-excitation matrices built from them.

use std::fmt;

use ndarray::Array2;
use num_rational::Rational64;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::MAX_N;

/// Defining parameters of a chain with `N + 1` sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ChainSpec {
    /// Length index `N`; sites are `0..=N`.
    #[serde(rename = "N")]
    pub n_max: usize,
    /// Next-to-nearest-neighbour strength `α`.
    #[serde(serialize_with = "ser_rational")]
    pub alpha: Rational64,
    /// Nearest-neighbour strength `β`.
    #[serde(serialize_with = "ser_rational")]
    pub beta: Rational64,
}

fn ser_rational<S: Serializer>(r: &Rational64, ser: S) -> std::result::Result<S::Ok, S::Error> {
    ser.collect_str(&DisplayRational(*r))
}

struct DisplayRational(Rational64);

impl fmt::Display for DisplayRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl ChainSpec {
    pub fn new(n_max: usize, alpha: Rational64, beta: Rational64) -> Result<Self> {
        if n_max == 0 || n_max > MAX_N {
            return Err(Error::ChainLength(n_max));
        }
        Ok(Self { n_max, alpha, beta })
    }

    /// Convenience constructor from integer couplings.
    pub fn from_ints(n_max: usize, alpha: i64, beta: i64) -> Result<Self> {
        Self::new(n_max, Rational64::from_integer(alpha), Rational64::from_integer(beta))
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    pub fn alpha_f64(&self) -> f64 {
        self.alpha.to_f64().unwrap_or(f64::NAN)
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta.to_f64().unwrap_or(f64::NAN)
    }
}

impl fmt::Display for ChainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "N={} alpha={} beta={}",
            self.n_max,
            DisplayRational(self.alpha),
            DisplayRational(self.beta)
        )
    }
}

/// Parse `"p/q"` or `"p"` into a reduced rational.
pub fn parse_rational(text: &str) -> Result<Rational64> {
    let bad = || Error::InvalidRational(text.to_string());
    let trimmed = text.trim();
    let (num, den) = match trimmed.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (trimmed, "1"),
    };
    let num: i64 = num.parse().map_err(|_| bad())?;
    let den: i64 = den.parse().map_err(|_| bad())?;
    if den == 0 {
        return Err(bad());
    }
    Ok(Rational64::new(num, den))
}

/// Format a rational the way [`parse_rational`] reads it.
pub fn format_rational(r: Rational64) -> String {
    DisplayRational(r).to_string()
}

/// `J_n = ½√(n(N − n + 1))` without range checks; zero at `n = 0` and `n = N + 1`.
pub(crate) fn hopping(n_max: usize, n: usize) -> f64 {
    if n == 0 || n > n_max {
        return 0.0;
    }
    0.5 * ((n * (n_max - n + 1)) as f64).sqrt()
}

/// Krawtchouk nearest-neighbour coupling `J_n`, defined for `0 <= n <= N + 1`.
pub fn nn_coupling(n_max: usize, n: usize) -> Result<f64> {
    if n > n_max + 1 {
        return Err(Error::IndexOutOfRange { name: "n", index: n, max: n_max + 1 });
    }
    Ok(hopping(n_max, n))
}

/// Realized couplings and fields of a chain.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CouplingProfile {
    /// `J_n^(1) = βJ_n` for `n = 1..=N`.
    pub j1: Vec<f64>,
    /// `J_n^(2) = αJ_{n-1}J_n` for `n = 2..=N`.
    pub j2: Vec<f64>,
    /// `B_n = α(J_n² + J_{n+1}²)` for `n = 0..=N`.
    pub b: Vec<f64>,
}

impl CouplingProfile {
    /// Row `n` of the tabular view: `(J_n^(1), J_n^(2), B_n)`, with the
    /// couplings that reach past the left edge reported as zero.
    pub fn row(&self, n: usize) -> (f64, f64, f64) {
        let j1 = if n >= 1 { self.j1[n - 1] } else { 0.0 };
        let j2 = if n >= 2 { self.j2[n - 2] } else { 0.0 };
        (j1, j2, self.b[n])
    }
}

/// `4J_n² = n(N − n + 1)` as an exact integer, zero outside `1..=N`.
fn hopping_sq4(n_max: usize, n: usize) -> usize {
    if n == 0 || n > n_max {
        0
    } else {
        n * (n_max - n + 1)
    }
}

pub fn coupling_profile(spec: &ChainSpec) -> CouplingProfile {
    let n_max = spec.n_max;
    let (alpha, beta) = (spec.alpha_f64(), spec.beta_f64());
    let sq4 = |n| hopping_sq4(n_max, n);
    CouplingProfile {
        j1: (1..=n_max).map(|n| beta * hopping(n_max, n)).collect(),
        // J_{n-1}J_n = ¼√(4J_{n-1}² · 4J_n²), one rounding.
        j2: (2..=n_max).map(|n| alpha * (0.25 * ((sq4(n - 1) * sq4(n)) as f64).sqrt())).collect(),
        b: (0..=n_max).map(|n| alpha * ((sq4(n) + sq4(n + 1)) as f64 / 4.0)).collect(),
    }
}

/// Real symmetric matrix in the occupation basis `|0⟩ … |N⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix(pub Array2<f64>);

impl HamiltonianMatrix {
    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    /// Largest `|row - col|` with a nonzero entry.
    pub fn bandwidth(&self) -> usize {
        self.0
            .indexed_iter()
            .filter(|(_, v)| **v != 0.0)
            .map(|((r, c), _)| r.abs_diff(c))
            .max()
            .unwrap_or(0)
    }

    pub fn max_abs_diff(&self, other: &Array2<f64>) -> f64 {
        (&self.0 - other).iter().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// The pentadiagonal single-excitation Hamiltonian, assembled from the
/// coupling profile.
pub fn build_hamiltonian(spec: &ChainSpec) -> HamiltonianMatrix {
    let profile = coupling_profile(spec);
    let dim = spec.dim();
    let mut h = Array2::zeros((dim, dim));
    for (n, b) in profile.b.iter().enumerate() {
        h[[n, n]] = *b;
    }
    // j1[k] couples sites k and k + 1; j2[k] couples k and k + 2.
    for (k, c) in profile.j1.iter().enumerate() {
        h[[k, k + 1]] = *c;
        h[[k + 1, k]] = *c;
    }
    for (k, c) in profile.j2.iter().enumerate() {
        h[[k, k + 2]] = *c;
        h[[k + 2, k]] = *c;
    }
    HamiltonianMatrix(h)
}

/// The Krawtchouk hopping operator `J|n⟩ = J_{n+1}|n+1⟩ + J_n|n−1⟩`.
pub fn build_j_operator(n_max: usize) -> Result<HamiltonianMatrix> {
    if n_max == 0 || n_max > MAX_N {
        return Err(Error::ChainLength(n_max));
    }
    let mut j = Array2::zeros((n_max + 1, n_max + 1));
    for n in 1..=n_max {
        let c = hopping(n_max, n);
        j[[n - 1, n]] = c;
        j[[n, n - 1]] = c;
    }
    Ok(HamiltonianMatrix(j))
}

/// `αJ² + βJ` by explicit matrix products.
pub fn operator_polynomial(spec: &ChainSpec) -> Result<Array2<f64>> {
    let j = build_j_operator(spec.n_max)?.0;
    let j2 = j.dot(&j);
    Ok(j2 * spec.alpha_f64() + j * spec.beta_f64())
}
