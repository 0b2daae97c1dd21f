//! Periodic first-order differences and the weighted smoothness operator.
//!
//! `D_h`, `D_v` and `D_t` are circular forward differences along the first,
//! second and third axis. The weighted operator stacks them,
//! `D_w(A) = [w1 D_h A; w2 D_v A; w3 D_t A]`, so the smoothness penalty is
//! `(mu / 2) ||D_w(A)||_F^2`.
//!
//! Because every difference wraps around, `D_w* D_w` is a sum of circulant
//! operators and is diagonalized by the 3D DFT. Its eigenvalue at frequency
//! `(p, q, r)` is
//!
//! ```text
//! w1^2 (2 - 2 cos(2 pi p / I1)) + w2^2 (2 - 2 cos(2 pi q / I2)) + w3^2 (2 - 2 cos(2 pi r / I3))
//! ```
//!
//! which is what [`dw_spectrum`] returns.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// Difference direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// First index.
    H,
    /// Second index.
    V,
    /// Third index.
    T,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::H, Axis::V, Axis::T];

    pub fn index(self) -> usize {
        match self {
            Axis::H => 0,
            Axis::V => 1,
            Axis::T => 2,
        }
    }
}

/// Direction weights `w` and overall strength `mu` of the smoothness term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothWeights {
    pub w: [f64; 3],
    pub mu: f64,
}

impl SmoothWeights {
    pub fn new(w: [f64; 3], mu: f64) -> Result<Self> {
        let sw = Self { w, mu };
        sw.validate()?;
        Ok(sw)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: f64| v.is_finite() && v >= 0.0;
        if !self.w.iter().all(|&v| ok(v)) || !ok(self.mu) {
            return Err(Error::InvalidConfig(format!(
                "smoothness weights must be finite and nonnegative, got w={:?} mu={}",
                self.w, self.mu
            )));
        }
        Ok(())
    }
}

/// Visits every entry with its circular successor along `axis`.
fn shifted(a: &Tensor3, axis: Axis, step: isize, f: impl Fn(f64, f64) -> f64) -> Tensor3 {
    let dims = a.dims();
    let n = dims[axis.index()] as isize;
    let wrap = |x: usize| ((x as isize + step).rem_euclid(n)) as usize;
    Tensor3::from_fn(dims, |i, j, s| {
        let here = a.get(i, j, s);
        let there = match axis {
            Axis::H => a.get(wrap(i), j, s),
            Axis::V => a.get(i, wrap(j), s),
            Axis::T => a.get(i, j, wrap(s)),
        };
        f(here, there)
    })
}

/// Circular forward difference: `out(i) = A(i + 1) - A(i)`, with `A(I + 1) = A(1)`.
pub fn diff(a: &Tensor3, axis: Axis) -> Tensor3 {
    shifted(a, axis, 1, |here, next| next - here)
}

/// Adjoint of [`diff`]: `out(i) = B(i - 1) - B(i)`, with `B(0) = B(I)`.
pub fn diff_adjoint(b: &Tensor3, axis: Axis) -> Tensor3 {
    shifted(b, axis, -1, |here, prev| prev - here)
}

/// The three weighted parts `(w1 D_h A, w2 D_v A, w3 D_t A)`.
pub fn dw_apply(a: &Tensor3, sw: &SmoothWeights) -> [Tensor3; 3] {
    Axis::ALL.map(|axis| {
        let mut d = diff(a, axis);
        d.scale(sw.w[axis.index()]);
        d
    })
}

/// `||D_w(A)||_F^2`.
pub fn dw_norm_sq(a: &Tensor3, sw: &SmoothWeights) -> f64 {
    dw_apply(a, sw).iter().map(|d| d.fro_norm().powi(2)).sum()
}

/// `D_w* D_w (A) = sum_u w_u^2 D_u* D_u (A)`.
pub fn dw_gram(a: &Tensor3, sw: &SmoothWeights) -> Tensor3 {
    let mut out = Tensor3::zeros(a.dims());
    for axis in Axis::ALL {
        let w = sw.w[axis.index()];
        if w != 0.0 {
            let g = diff_adjoint(&diff(a, axis), axis);
            out.axpy(w * w, &g).expect("same dims");
        }
    }
    out
}

/// Eigenvalues of `D_w* D_w` on the DFT grid of a tensor with dimensions `dims`.
pub fn dw_spectrum(dims: [usize; 3], sw: &SmoothWeights) -> Tensor3 {
    let axis_eigs = |n: usize, w: f64| -> Vec<f64> {
        (0..n)
            .map(|k| w * w * (2.0 - 2.0 * (2.0 * PI * k as f64 / n as f64).cos()))
            .collect()
    };
    let h = axis_eigs(dims[0], sw.w[0]);
    let v = axis_eigs(dims[1], sw.w[1]);
    let t = axis_eigs(dims[2], sw.w[2]);
    Tensor3::from_fn(dims, |p, q, r| (h[p] + v[q] + t[r]).max(0.0))
}
