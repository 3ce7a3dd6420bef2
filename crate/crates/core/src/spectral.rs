//! Exact spectral decomposition of `H = αJ² + βJ` and time propagation.
//!
//! Every eigenvector of `J` is an eigenvector of `H`, so `H` is diagonalized
//! analytically by the Krawtchouk matrix with energies `E_s = αx_s² + βx_s`.
//! Propagation uses `e^{-iHt}` throughout.

use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::chain::{build_hamiltonian, ChainSpec};
use crate::error::{Error, Result};
use crate::krawtchouk::KrawtchoukTable;

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    pub spec: ChainSpec,
    /// `x_s = s - N/2`.
    pub grid: Vec<f64>,
    /// `E_s = αx_s² + βx_s`.
    pub energies: Vec<f64>,
    pub weights: Vec<f64>,
    /// Orthogonal matrix whose column `s` is the eigenvector for `E_s`.
    pub eigvecs: Array2<f64>,
}

/// Complex amplitudes over the occupation basis `|0⟩ … |N⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn basis(dim: usize, site: usize) -> Result<Self> {
        if site >= dim {
            return Err(Error::IndexOutOfRange { name: "site", index: site, max: dim.saturating_sub(1) });
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[site] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes })
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Largest componentwise `|a_n - b_n|`.
    pub fn max_abs_diff(&self, other: &StateVector) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFiniteTime(t))
    }
}

impl SpectralData {
    pub fn new(spec: &ChainSpec) -> Result<Self> {
        let table = KrawtchoukTable::new(spec.n_max)?;
        let (alpha, beta) = (spec.alpha_f64(), spec.beta_f64());
        let energies = table.grid.iter().map(|x| alpha * x * x + beta * x).collect();
        let eigvecs = table.eigenvector_matrix();
        Ok(Self { spec: *spec, grid: table.grid, energies, weights: table.weights, eigvecs })
    }

    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    fn phases(&self, t: f64) -> Vec<Complex64> {
        self.energies.iter().map(|e| Complex64::from_polar(1.0, -e * t)).collect()
    }

    /// `‖H·O − O·diag(E)‖_max` against the assembled Hamiltonian.
    pub fn residual(&self) -> f64 {
        let h = build_hamiltonian(&self.spec).0;
        let lhs = h.dot(&self.eigvecs);
        let rhs = &self.eigvecs * &Array1::from(self.energies.clone());
        (&lhs - &rhs).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `e^{-iHt}|site⟩`.
    pub fn propagate(&self, site: usize, t: f64) -> Result<StateVector> {
        check_time(t)?;
        if site >= self.dim() {
            return Err(Error::IndexOutOfRange { name: "site", index: site, max: self.dim() - 1 });
        }
        let phases = self.phases(t);
        // Coefficients of |site⟩ in the eigenbasis, already rotated.
        let coeffs: Vec<Complex64> = phases
            .iter()
            .enumerate()
            .map(|(s, ph)| ph * self.eigvecs[[site, s]])
            .collect();
        Ok(self.synthesize(&coeffs))
    }

    /// `e^{-iHt}|ψ⟩` for an arbitrary state.
    pub fn evolve(&self, state: &StateVector, t: f64) -> Result<StateVector> {
        check_time(t)?;
        if state.dim() != self.dim() {
            return Err(Error::IndexOutOfRange { name: "state dimension", index: state.dim(), max: self.dim() });
        }
        let phases = self.phases(t);
        let coeffs: Vec<Complex64> = (0..self.dim())
            .map(|s| {
                let overlap: Complex64 = state
                    .amplitudes
                    .iter()
                    .enumerate()
                    .map(|(n, a)| a * self.eigvecs[[n, s]])
                    .sum();
                overlap * phases[s]
            })
            .collect();
        Ok(self.synthesize(&coeffs))
    }

    fn synthesize(&self, coeffs: &[Complex64]) -> StateVector {
        let amplitudes = self
            .eigvecs
            .rows()
            .into_iter()
            .map(|row| row.iter().zip(coeffs).map(|(o, c)| c * o).sum())
            .collect();
        StateVector { amplitudes }
    }

    /// Amplitudes `(μ, ν)` of `e^{-iHt}|0⟩` on sites `0` and `N`:
    /// `μ = Σ ω_s e^{-iE_s t}`, `ν = Σ ω_s (−1)^{N+s} e^{-iE_s t}`.
    pub fn end_amplitudes(&self, t: f64) -> Result<(Complex64, Complex64)> {
        check_time(t)?;
        let n_max = self.dim() - 1;
        let mut mu = Complex64::new(0.0, 0.0);
        let mut nu = Complex64::new(0.0, 0.0);
        for (s, (w, e)) in self.weights.iter().zip(&self.energies).enumerate() {
            let term = Complex64::from_polar(*w, -e * t);
            mu += term;
            if (n_max + s) % 2 == 0 {
                nu += term;
            } else {
                nu -= term;
            }
        }
        Ok((mu, nu))
    }
}

pub fn spectral_decomposition(spec: &ChainSpec) -> Result<SpectralData> {
    SpectralData::new(spec)
}

pub fn propagate(spec: &ChainSpec, initial_site: usize, t: f64) -> Result<StateVector> {
    SpectralData::new(spec)?.propagate(initial_site, t)
}

pub fn end_amplitudes(spec: &ChainSpec, t: f64) -> Result<(Complex64, Complex64)> {
    SpectralData::new(spec)?.end_amplitudes(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_rational::Rational64;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_8, PI};

    fn assert_c(got: Complex64, expected: Complex64, eps: f64) {
        assert!((got - expected).norm() < eps, "{got} vs {expected}");
    }

    #[test]
    fn decomposition_examples() {
        let d = spectral_decomposition(&ChainSpec::from_ints(2, 0, 1).unwrap()).unwrap();
        assert_eq!(d.energies, vec![-1.0, 0.0, 1.0]);
        let d = spectral_decomposition(&ChainSpec::from_ints(1, 1, 1).unwrap()).unwrap();
        assert_eq!(d.energies, vec![-0.25, 0.75]);
        let d = spectral_decomposition(&ChainSpec::from_ints(6, 0, 0).unwrap()).unwrap();
        assert!(d.energies.iter().all(|e| *e == 0.0));
    }

    #[test]
    fn residual_is_small() {
        for (n, a, b) in [(1, 1, 1), (7, -3, 2), (40, 5, -8), (40, 8, 8)] {
            let spec = ChainSpec::from_ints(n, a, b).unwrap();
            assert!(SpectralData::new(&spec).unwrap().residual() < 1e-9);
        }
    }

    #[test]
    fn propagate_at_zero_is_identity() {
        let spec = ChainSpec::new(6, Rational64::new(3, 2), Rational64::from_integer(1)).unwrap();
        let d = SpectralData::new(&spec).unwrap();
        for site in 0..=6 {
            let got = d.propagate(site, 0.0).unwrap();
            assert!(got.max_abs_diff(&StateVector::basis(7, site).unwrap()) < 1e-14);
        }
    }

    #[test]
    fn two_site_closed_forms() {
        let psi = propagate(&ChainSpec::from_ints(1, 0, 1).unwrap(), 0, PI).unwrap();
        assert_c(psi.amplitudes[0], Complex64::new(0.0, 0.0), 1e-15);
        assert_c(psi.amplitudes[1], Complex64::new(0.0, -1.0), 1e-15);

        let psi = propagate(&ChainSpec::from_ints(1, 1, 1).unwrap(), 0, FRAC_PI_2).unwrap();
        let phase = Complex64::from_polar(FRAC_1_SQRT_2, -FRAC_PI_8);
        assert_c(psi.amplitudes[0], phase, 1e-15);
        assert_c(psi.amplitudes[1], phase * Complex64::new(0.0, -1.0), 1e-15);
        assert_abs_diff_eq!(psi.amplitudes[0].norm_sqr(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn end_amplitude_examples() {
        let spec = ChainSpec::from_ints(1, 1, 1).unwrap();
        let (mu, nu) = end_amplitudes(&spec, 0.0).unwrap();
        assert_c(mu, Complex64::new(1.0, 0.0), 1e-15);
        assert_c(nu, Complex64::new(0.0, 0.0), 1e-15);
        let (mu, nu) = end_amplitudes(&spec, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(mu.norm_sqr(), 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(nu.norm_sqr(), 0.5, epsilon = 1e-12);
        for n in [1, 2, 5, 11] {
            let (_, nu) = end_amplitudes(&ChainSpec::from_ints(n, 0, 1).unwrap(), PI).unwrap();
            assert_abs_diff_eq!(nu.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn end_amplitudes_match_full_state() {
        let spec = ChainSpec::new(9, Rational64::new(-5, 3), Rational64::new(7, 4)).unwrap();
        let d = SpectralData::new(&spec).unwrap();
        for t in [0.3, 2.0, -7.5, 31.0] {
            let psi = d.propagate(0, t).unwrap();
            let (mu, nu) = d.end_amplitudes(t).unwrap();
            assert_c(mu, psi.amplitudes[0], 1e-13);
            assert_c(nu, psi.amplitudes[9], 1e-13);
        }
    }

    #[test]
    fn errors() {
        let d = SpectralData::new(&ChainSpec::from_ints(3, 1, 1).unwrap()).unwrap();
        assert!(matches!(d.propagate(4, 1.0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(d.propagate(0, f64::NAN), Err(Error::NonFiniteTime(_))));
        assert!(matches!(d.end_amplitudes(f64::INFINITY), Err(Error::NonFiniteTime(_))));
        let short = StateVector::basis(2, 0).unwrap();
        assert!(d.evolve(&short, 1.0).is_err());
        assert!(StateVector::basis(2, 2).is_err());
    }
}
