//! Independent propagator: `e^{-iHt}` on the dense Hamiltonian by scaling and
//! squaring a truncated Taylor series. Nothing here touches the Krawtchouk
//! decomposition.
//!
//! Each squaring doubles whatever non-unitarity the previous step carried, so
//! in plain `f64` the result drifts by roughly `2^k` ulps after `k` squarings
//! (about `1e-11` for the largest chains and times we test). The series and
//! the squarings are therefore carried out in double-double arithmetic and
//! only rounded to `f64` at the end.

use ndarray::Array2;
use num_complex::Complex64;

use crate::chain::{build_hamiltonian, ChainSpec};
use crate::error::{Error, Result};
use crate::spectral::StateVector;

/// Scaled matrix must satisfy `‖Ht / 2^k‖₁ < SCALE_THRESHOLD`.
pub const SCALE_THRESHOLD: f64 = 0.5;
/// Last Taylor term kept.
pub const TAYLOR_ORDER: u32 = 20;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    #[cfg(test)]
    fn from_f64(hi: f64) -> Self {
        Dd { hi, lo: 0.0 }
    }

    fn add(self, other: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, other.hi);
        let (t, f) = two_sum(self.lo, other.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (hi, lo) = quick_two_sum(s, e + f);
        Dd { hi, lo }
    }

    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    fn sub(self, other: Dd) -> Dd {
        self.add(other.neg())
    }

    fn mul(self, other: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, other.hi);
        let e = e + (self.hi * other.lo + self.lo * other.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Dd { hi, lo }
    }

    fn div_f64(self, d: f64) -> Dd {
        let q1 = self.hi / d;
        let (p, e) = two_prod(q1, d);
        let r = (self.hi - p - e + self.lo) / d;
        let (hi, lo) = quick_two_sum(q1, r);
        Dd { hi, lo }
    }

    fn to_f64(self) -> f64 {
        self.hi + self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct CDd {
    re: Dd,
    im: Dd,
}

impl CDd {
    const ZERO: CDd = CDd { re: Dd::ZERO, im: Dd::ZERO };
    const ONE: CDd = CDd { re: Dd::ONE, im: Dd::ZERO };

    fn add(self, o: CDd) -> CDd {
        CDd { re: self.re.add(o.re), im: self.im.add(o.im) }
    }

    fn mul(self, o: CDd) -> CDd {
        CDd {
            re: self.re.mul(o.re).sub(self.im.mul(o.im)),
            im: self.re.mul(o.im).add(self.im.mul(o.re)),
        }
    }

    fn div_f64(self, d: f64) -> CDd {
        CDd { re: self.re.div_f64(d), im: self.im.div_f64(d) }
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }
}

/// Dense square matrix, row-major.
#[derive(Debug, Clone)]
struct Mat {
    n: usize,
    data: Vec<CDd>,
}

impl Mat {
    fn identity(n: usize) -> Self {
        let mut data = vec![CDd::ZERO; n * n];
        for i in 0..n {
            data[i * n + i] = CDd::ONE;
        }
        Mat { n, data }
    }

    fn matmul(&self, other: &Mat) -> Mat {
        let n = self.n;
        let mut data = vec![CDd::ZERO; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == CDd::ZERO {
                    continue;
                }
                for j in 0..n {
                    let idx = i * n + j;
                    data[idx] = data[idx].add(a.mul(other.data[k * n + j]));
                }
            }
        }
        Mat { n, data }
    }
}

/// Number of halvings `k` such that `norm / 2^k < SCALE_THRESHOLD`.
pub fn squaring_count(norm: f64) -> u32 {
    let mut k = 0;
    let mut scaled = norm;
    while scaled >= SCALE_THRESHOLD {
        scaled /= 2.0;
        k += 1;
    }
    k
}

fn one_norm(h: &Array2<f64>) -> f64 {
    h.columns().into_iter().map(|c| c.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `e^{-iHt}` for a real symmetric (or any real square) `H`.
pub fn evolution_operator(h: &Array2<f64>, t: f64) -> Result<Array2<Complex64>> {
    if !t.is_finite() {
        return Err(Error::NonFiniteTime(t));
    }
    let n = h.nrows();
    let k = squaring_count(one_norm(h) * t.abs());
    let scale = 2f64.powi(k as i32);

    // B = -iHt / 2^k. Dividing by a power of two is exact; Ht is rounded once.
    let mut b = Mat { n, data: vec![CDd::ZERO; n * n] };
    for ((i, j), v) in h.indexed_iter() {
        let (p, e) = two_prod(*v, t);
        let ht = Dd { hi: p, lo: e };
        b.data[i * n + j] = CDd { re: Dd::ZERO, im: ht.neg().div_f64(scale) };
    }

    let mut sum = Mat::identity(n);
    let mut term = Mat::identity(n);
    for j in 1..=TAYLOR_ORDER {
        // B on the left: it is banded, and the zero-skip in matmul applies to the left factor.
        term = b.matmul(&term);
        for v in term.data.iter_mut() {
            *v = v.div_f64(j as f64);
        }
        for (s, v) in sum.data.iter_mut().zip(&term.data) {
            *s = s.add(*v);
        }
    }
    for _ in 0..k {
        sum = sum.matmul(&sum);
    }

    Ok(Array2::from_shape_fn((n, n), |(i, j)| sum.data[i * n + j].to_c64()))
}

/// `e^{-iHt}|initial_site⟩` from the dense matrix exponential.
pub fn propagate_oracle(spec: &ChainSpec, initial_site: usize, t: f64) -> Result<StateVector> {
    if initial_site > spec.n_max {
        return Err(Error::IndexOutOfRange { name: "site", index: initial_site, max: spec.n_max });
    }
    let h = build_hamiltonian(spec);
    let u = evolution_operator(h.as_array(), t)?;
    Ok(StateVector { amplitudes: u.column(initial_site).to_vec() })
}
