//! Normalized Krawtchouk polynomials for the symmetric (p = 1/2) binomial
//! weight, evaluated on the grid `x_s = s - N/2`.
//!
//! `χ_n(x_s)` is the `n`-th component of the (unnormalized) eigenvector of the
//! hopping operator `J` with eigenvalue `x_s`, scaled so that `χ_0 ≡ 1`. The
//! matrix `O[n][s] = √ω_s · χ_n(x_s)` is orthogonal and diagonalizes `J`.
//!
//! Values come from the three-term recurrence
//! `J_{n+1} χ_{n+1}(x) + J_n χ_{n-1}(x) = x χ_n(x)`, run forward from `n = 0`
//! and backward from `n = N` and stitched together in the middle of the chain.
//! A one-sided sweep has to cross a region where the wanted solution decays
//! and loses about `1e-5` of accuracy by `N = 40`; the two-sided sweep only
//! ever runs each branch in its growing direction.

use ndarray::Array2;

use crate::chain::hopping;
use crate::error::{Error, Result};
use crate::{MAX_N, TOLERANCE_N};

#[derive(Debug, Clone, PartialEq)]
pub struct KrawtchoukTable {
    pub n_max: usize,
    /// Binomial weights `ω_s = C(N, s) / 2^N`.
    pub weights: Vec<f64>,
    /// `values[[n, s]] = χ_n(x_s)`.
    pub values: Array2<f64>,
    /// `x_s = s - N/2`.
    pub grid: Vec<f64>,
}

impl KrawtchoukTable {
    pub fn new(n_max: usize) -> Result<Self> {
        if n_max == 0 || n_max > MAX_N {
            return Err(Error::ChainLength(n_max));
        }
        if n_max > TOLERANCE_N {
            log::warn!(
                "N = {n_max} exceeds {TOLERANCE_N}; accuracy guarantees are stated for N <= {TOLERANCE_N}"
            );
        }

        let dim = n_max + 1;
        let mut values = Array2::zeros((dim, dim));
        for s in 0..dim {
            for (n, v) in column(n_max, s).into_iter().enumerate() {
                values[[n, s]] = v;
            }
        }

        Ok(Self {
            n_max,
            weights: weights(n_max)?,
            values,
            grid: grid(n_max),
        })
    }

    pub fn dim(&self) -> usize {
        self.n_max + 1
    }

    /// The orthogonal matrix `O[n][s] = √ω_s χ_n(x_s)`; column `s` is the unit
    /// eigenvector of `J` for eigenvalue `x_s`.
    pub fn eigenvector_matrix(&self) -> Array2<f64> {
        let mut o = self.values.clone();
        for (s, mut col) in o.columns_mut().into_iter().enumerate() {
            let scale = self.weights[s].sqrt();
            col.mapv_inplace(|v| v * scale);
        }
        o
    }
}

/// Eigenvalues of `J`: `x_s = s - N/2`.
pub fn grid(n_max: usize) -> Vec<f64> {
    (0..=n_max).map(|s| s as f64 - n_max as f64 / 2.0).collect()
}

/// All binomial weights for chain length index `n_max`.
///
/// Seeded at `ω_0 = 2^-N` and advanced with `ω_{s+1}/ω_s = (N - s)/(s + 1)`,
/// so no factorial is ever formed.
pub fn weights(n_max: usize) -> Result<Vec<f64>> {
    if n_max > MAX_N {
        return Err(Error::ChainLength(n_max));
    }
    // 2^-N is exact in binary floating point for any N we accept.
    let mut w = 0.5f64.powi(n_max as i32);
    let mut out = Vec::with_capacity(n_max + 1);
    for s in 0..=n_max {
        out.push(w);
        w *= (n_max - s) as f64 / (s + 1) as f64;
    }
    Ok(out)
}

/// Binomial weight `ω_s = C(N, s) / 2^N`.
pub fn weight(n_max: usize, s: usize) -> Result<f64> {
    if n_max > MAX_N {
        return Err(Error::ChainLength(n_max));
    }
    check_index("s", s, n_max)?;
    // ω_s = ω_{N-s}; walk the shorter side.
    let k = s.min(n_max - s);
    let mut w = 0.5f64.powi(n_max as i32);
    for j in 0..k {
        w *= (n_max - j) as f64 / (j + 1) as f64;
    }
    Ok(w)
}

/// Normalized Krawtchouk polynomial `χ_n(x_s)`.
pub fn chi(n_max: usize, n: usize, s: usize) -> Result<f64> {
    if n_max > MAX_N {
        return Err(Error::ChainLength(n_max));
    }
    check_index("n", n, n_max)?;
    check_index("s", s, n_max)?;
    if n_max == 0 {
        return Ok(1.0);
    }
    Ok(column(n_max, s)[n])
}

/// The orthogonal eigenvector matrix of `J` for chain length index `n_max`.
pub fn eigenvector_matrix(n_max: usize) -> Result<Array2<f64>> {
    Ok(KrawtchoukTable::new(n_max)?.eigenvector_matrix())
}

fn check_index(name: &'static str, index: usize, max: usize) -> Result<()> {
    if index > max {
        Err(Error::IndexOutOfRange { name, index, max })
    } else {
        Ok(())
    }
}

/// `χ_0(x_s), …, χ_N(x_s)` for `N >= 1`.
fn column(n_max: usize, s: usize) -> Vec<f64> {
    let x = s as f64 - n_max as f64 / 2.0;
    let mid = n_max / 2;

    // Forward branch: χ_{-1} = 0, χ_0 = 1, filled through index mid + 1.
    let mut fwd = vec![0.0; mid + 2];
    fwd[0] = 1.0;
    for n in 0..=mid {
        let prev = if n == 0 { 0.0 } else { fwd[n - 1] };
        fwd[n + 1] = (x * fwd[n] - hopping(n_max, n) * prev) / hopping(n_max, n + 1);
    }

    // Backward branch with an arbitrary unit seed at n = N (J_{N+1} = 0).
    let mut bwd = vec![0.0; n_max + 2];
    bwd[n_max] = 1.0;
    for n in (mid + 1..=n_max).rev() {
        bwd[n - 1] = (x * bwd[n] - hopping(n_max, n + 1) * bwd[n + 1]) / hopping(n_max, n);
    }

    // Least-squares scale on the overlap {mid, mid + 1}; two consecutive
    // entries of a nonzero solution never vanish together.
    let num = fwd[mid] * bwd[mid] + fwd[mid + 1] * bwd[mid + 1];
    let den = bwd[mid] * bwd[mid] + bwd[mid + 1] * bwd[mid + 1];
    let scale = num / den;

    let mut out = Vec::with_capacity(n_max + 1);
    out.extend_from_slice(&fwd[..=mid]);
    out.extend(bwd[mid + 1..=n_max].iter().map(|b| scale * b));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{One, ToPrimitive, Zero};
    use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

    /// Terminating 2F1(-n, -s; -N; 2) in exact arithmetic, times the
    /// `(-1)^n √C(N, n)` prefactor.
    fn chi_hypergeometric(n_max: usize, n: usize, s: usize) -> f64 {
        let (n_i, s_i, big_n) = (n as i64, s as i64, n_max as i64);
        let mut term = BigRational::one();
        let mut sum = BigRational::zero();
        for k in 0..=n.min(s) as i64 {
            if k > 0 {
                let num = (-n_i + k - 1) * (-s_i + k - 1) * 2;
                let den = (-big_n + k - 1) * k;
                term *= BigRational::new(BigInt::from(num), BigInt::from(den));
            }
            sum += &term;
        }
        let binom: f64 = (0..n).map(|j| (n_max - j) as f64 / (j + 1) as f64).product();
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        sign * binom.sqrt() * sum.to_f64().unwrap()
    }

    #[test]
    fn weight_examples() {
        assert_abs_diff_eq!(weight(2, 1).unwrap(), 0.5, epsilon = 1e-15);
        assert_eq!(weight(0, 0).unwrap(), 1.0);
        let total: f64 = (0..=4).map(|s| weight(4, s).unwrap()).sum();
        assert_abs_diff_eq!(total, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn weight_matches_table_and_stays_finite() {
        for n_max in [1, 7, 40, 100] {
            let ws = weights(n_max).unwrap();
            for (s, w) in ws.iter().enumerate() {
                assert!(w.is_finite() && *w > 0.0);
                assert_abs_diff_eq!(weight(n_max, s).unwrap(), *w, epsilon = 1e-13 * w);
            }
            assert_abs_diff_eq!(ws.iter().sum::<f64>(), 1.0, epsilon = 1e-13);
        }
    }

    #[test]
    fn out_of_range_is_rejected() {
        assert!(matches!(weight(3, 4), Err(Error::IndexOutOfRange { name: "s", .. })));
        assert!(matches!(chi(3, 4, 0), Err(Error::IndexOutOfRange { name: "n", .. })));
        assert!(matches!(chi(3, 0, 9), Err(Error::IndexOutOfRange { name: "s", .. })));
        assert_eq!(KrawtchoukTable::new(0), Err(Error::ChainLength(0)));
        assert_eq!(KrawtchoukTable::new(101), Err(Error::ChainLength(101)));
        assert!(eigenvector_matrix(0).is_err());
    }

    #[test]
    fn chi_examples() {
        for n_max in 1..=6 {
            for s in 0..=n_max {
                assert_eq!(chi(n_max, 0, s).unwrap(), 1.0);
                let expected = if (n_max + s) % 2 == 0 { 1.0 } else { -1.0 };
                assert_abs_diff_eq!(chi(n_max, n_max, s).unwrap(), expected, epsilon = 1e-12);
            }
        }
        assert_abs_diff_eq!(chi(2, 1, 0).unwrap(), -SQRT_2, epsilon = 1e-12);
        assert_eq!(chi(0, 0, 0).unwrap(), 1.0);
    }

    #[test]
    fn eigenvector_matrix_examples() {
        let o = eigenvector_matrix(1).unwrap();
        let expected = [[FRAC_1_SQRT_2, FRAC_1_SQRT_2], [-FRAC_1_SQRT_2, FRAC_1_SQRT_2]];
        for n in 0..2 {
            for s in 0..2 {
                assert_abs_diff_eq!(o[[n, s]], expected[n][s], epsilon = 1e-15);
            }
        }
        let o2 = eigenvector_matrix(2).unwrap();
        assert_abs_diff_eq!(o2[[2, 1]], -0.707_106_78, epsilon = 1e-8);
        for n_max in [1, 2, 9, 40] {
            let o = eigenvector_matrix(n_max).unwrap();
            for col in o.columns() {
                assert_abs_diff_eq!(col.dot(&col), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn recurrence_agrees_with_hypergeometric_sum() {
        let mut worst = 0.0f64;
        for n_max in 1..=25 {
            let table = KrawtchoukTable::new(n_max).unwrap();
            for n in 0..=n_max {
                for s in 0..=n_max {
                    let exact = chi_hypergeometric(n_max, n, s);
                    let got = table.values[[n, s]];
                    worst = worst.max((got - exact).abs() / exact.abs().max(1.0));
                }
            }
        }
        assert!(worst < 1e-10, "worst relative deviation {worst:e}");
    }

    #[test]
    fn recurrence_relation_holds() {
        for n_max in [3, 12, 40] {
            let t = KrawtchoukTable::new(n_max).unwrap();
            for s in 0..=n_max {
                let x = t.grid[s];
                for n in 0..=n_max {
                    let up = if n < n_max { hopping(n_max, n + 1) * t.values[[n + 1, s]] } else { 0.0 };
                    let down = if n > 0 { hopping(n_max, n) * t.values[[n - 1, s]] } else { 0.0 };
                    let lhs = up + down;
                    let rhs = x * t.values[[n, s]];
                    let scale = rhs.abs().max(lhs.abs()).max(1.0);
                    assert!((lhs - rhs).abs() / scale < 1e-10, "N={n_max} n={n} s={s}");
                }
            }
        }
    }

    #[test]
    fn stable_up_to_the_cap() {
        let t = KrawtchoukTable::new(100).unwrap();
        for s in 0..=100 {
            let expected = if s % 2 == 0 { 1.0 } else { -1.0 };
            assert_abs_diff_eq!(t.values[[100, s]], expected, epsilon = 1e-9);
        }
    }
}
