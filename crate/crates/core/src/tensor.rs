//! Dense third-order tensors.
//!
//! Entries are stored with the first index varying fastest, then the second,
//! then the third: entry `(i, j, s)` of an `I1 x I2 x I3` tensor lives at
//! offset `i + I1 * (j + I2 * s)`. All indices in this crate are zero-based.
//!
//! Unfoldings, slices and permutations are defined against this layout:
//!
//! * `permute(A, k)` reindexes so that the mode-`k` slices of `A` become the
//!   mode-2 slices of the result: `A(i,j,s) = P1(s,i,j) = P2(i,j,s) = P3(j,s,i)`.
//! * `matricize(A, n)` puts mode `n` on the rows; the remaining two indices
//!   index the columns with the lower-numbered mode varying fastest.
//! * `mode_slice(A, k, i)` is the `i`-th mode-2 slice of `permute(A, k)`,
//!   which has shape `I3 x I2` (k = 1), `I1 x I3` (k = 2) or `I2 x I1` (k = 3).

use std::fmt;
use std::ops::{Index, IndexMut};

use nalgebra::DMatrix;
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

use crate::error::{Error, Result};

pub type Matrix = DMatrix<f64>;

/// One of the three tensor modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    One,
    Two,
    Three,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::One, Mode::Two, Mode::Three];

    /// Builds a mode from its one-based number.
    pub fn new(k: usize) -> Result<Mode> {
        match k {
            1 => Ok(Mode::One),
            2 => Ok(Mode::Two),
            3 => Ok(Mode::Three),
            _ => Err(Error::InvalidMode(k)),
        }
    }

    /// One-based mode number.
    pub fn number(self) -> usize {
        self.index() + 1
    }

    /// Zero-based position, handy for indexing `[T; 3]`.
    pub fn index(self) -> usize {
        match self {
            Mode::One => 0,
            Mode::Two => 1,
            Mode::Three => 2,
        }
    }

    /// Dimensions of `permute(A, self)` for a tensor of dimensions `dims`.
    pub fn permuted_dims(self, dims: [usize; 3]) -> [usize; 3] {
        let [i1, i2, i3] = dims;
        match self {
            Mode::One => [i3, i1, i2],
            Mode::Two => [i1, i2, i3],
            Mode::Three => [i2, i3, i1],
        }
    }

    /// Inverse of [`Mode::permuted_dims`].
    pub fn unpermuted_dims(self, pdims: [usize; 3]) -> [usize; 3] {
        let [j1, j2, j3] = pdims;
        match self {
            Mode::One => [j2, j3, j1],
            Mode::Two => [j1, j2, j3],
            Mode::Three => [j3, j1, j2],
        }
    }
}

impl TryFrom<usize> for Mode {
    type Error = Error;

    fn try_from(k: usize) -> Result<Mode> {
        Mode::new(k)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "mode-{}", self.number())
    }
}

#[inline]
fn offset(dims: [usize; 3], i: usize, j: usize, s: usize) -> usize {
    i + dims[0] * (j + dims[1] * s)
}

fn checked_len(dims: [usize; 3]) -> Result<usize> {
    dims[0]
        .checked_mul(dims[1])
        .and_then(|n| n.checked_mul(dims[2]))
        .ok_or(Error::DimOverflow(dims.map(|d| d as u64)))
}

/// Dense real tensor of order three.
#[derive(Clone, PartialEq)]
pub struct Tensor3 {
    dims: [usize; 3],
    data: Vec<f64>,
}

impl fmt::Debug for Tensor3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tensor3")
            .field("dims", &self.dims)
            .field("fro_norm", &self.fro_norm())
            .finish()
    }
}

impl Tensor3 {
    /// Wraps `data` laid out first-index-fastest.
    pub fn new(dims: [usize; 3], data: Vec<f64>) -> Result<Self> {
        let len = checked_len(dims)?;
        if data.len() != len {
            return Err(Error::dims(len, data.len()));
        }
        Ok(Self { dims, data })
    }

    pub fn zeros(dims: [usize; 3]) -> Self {
        Self::filled(dims, 0.0)
    }

    pub fn filled(dims: [usize; 3], value: f64) -> Self {
        let len = dims.iter().product();
        Self {
            dims,
            data: vec![value; len],
        }
    }

    /// Builds a tensor by evaluating `f(i, j, s)` at every index.
    pub fn from_fn(dims: [usize; 3], mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(dims.iter().product());
        for s in 0..dims[2] {
            for j in 0..dims[1] {
                for i in 0..dims[0] {
                    data.push(f(i, j, s));
                }
            }
        }
        Self { dims, data }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, i: usize, j: usize, s: usize) -> f64 {
        self.data[offset(self.dims, i, j, s)]
    }

    pub fn set(&mut self, i: usize, j: usize, s: usize, value: f64) {
        let o = offset(self.dims, i, j, s);
        self.data[o] = value;
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub(crate) fn check_same_dims(&self, other: &Tensor3) -> Result<()> {
        if self.dims != other.dims {
            return Err(Error::dims(self.dims, other.dims));
        }
        Ok(())
    }

    /// Mode-`k` permutation.
    pub fn permute(&self, mode: Mode) -> Tensor3 {
        let a = self;
        match mode {
            Mode::Two => a.clone(),
            Mode::One => Tensor3::from_fn(mode.permuted_dims(a.dims), |s, i, j| a.get(i, j, s)),
            Mode::Three => Tensor3::from_fn(mode.permuted_dims(a.dims), |j, s, i| a.get(i, j, s)),
        }
    }

    /// Inverse of [`Tensor3::permute`].
    pub fn ipermute(&self, mode: Mode) -> Tensor3 {
        let p = self;
        match mode {
            Mode::Two => p.clone(),
            Mode::One => Tensor3::from_fn(mode.unpermuted_dims(p.dims), |i, j, s| p.get(s, i, j)),
            Mode::Three => Tensor3::from_fn(mode.unpermuted_dims(p.dims), |i, j, s| p.get(j, s, i)),
        }
    }

    /// Mode-`n` unfolding `A_(n)`.
    pub fn matricize(&self, mode: Mode) -> Matrix {
        let [i1, i2, i3] = self.dims;
        match mode {
            Mode::One => Matrix::from_fn(i1, i2 * i3, |i, c| self.get(i, c % i2, c / i2)),
            Mode::Two => Matrix::from_fn(i2, i1 * i3, |j, c| self.get(c % i1, j, c / i1)),
            // With s slowest in storage, A_(3) is the storage vector reshaped.
            Mode::Three => Matrix::from_fn(i3, i1 * i2, |s, c| self.data[c + i1 * i2 * s]),
        }
    }

    /// The `i`-th mode-`k` slice.
    pub fn mode_slice(&self, mode: Mode, index: usize) -> Result<Matrix> {
        let len = self.dims[mode.index()];
        if index >= len {
            return Err(Error::IndexOutOfRange {
                mode: mode.number(),
                index,
                len,
            });
        }
        let [i1, i2, i3] = self.dims;
        Ok(match mode {
            Mode::One => Matrix::from_fn(i3, i2, |s, j| self.get(index, j, s)),
            Mode::Two => Matrix::from_fn(i1, i3, |i, s| self.get(i, index, s)),
            Mode::Three => Matrix::from_fn(i2, i1, |j, i| self.get(i, j, index)),
        })
    }

    /// All lateral (mode-2) slices `A(:, j, :)`, each `I1 x I3`.
    pub fn lateral_slices(&self) -> Vec<Matrix> {
        let [i1, i2, i3] = self.dims;
        (0..i2)
            .map(|j| Matrix::from_fn(i1, i3, |i, s| self.get(i, j, s)))
            .collect()
    }

    /// Inverse of [`Tensor3::lateral_slices`].
    pub fn from_lateral_slices(slices: &[Matrix]) -> Result<Tensor3> {
        let first = slices
            .first()
            .ok_or_else(|| Error::dims("at least one slice", 0))?;
        let (i1, i3) = first.shape();
        if let Some(bad) = slices.iter().find(|m| m.shape() != (i1, i3)) {
            return Err(Error::dims((i1, i3), bad.shape()));
        }
        Ok(Tensor3::from_fn([i1, slices.len(), i3], |i, j, s| {
            slices[j][(i, s)]
        }))
    }

    pub fn fro_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn l1_norm(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).sum()
    }

    /// Largest absolute entry, zero for an empty tensor.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Standard inner product `sum A(i,j,s) B(i,j,s)`.
    pub fn inner(&self, other: &Tensor3) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum())
    }

    /// `||self - other||_F`.
    pub fn distance(&self, other: &Tensor3) -> Result<f64> {
        self.check_same_dims(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Tensor3 {
        Tensor3 {
            dims: self.dims,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn zip_map(&self, other: &Tensor3, f: impl Fn(f64, f64) -> f64) -> Result<Tensor3> {
        self.check_same_dims(other)?;
        Ok(Tensor3 {
            dims: self.dims,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    /// `self += alpha * x`.
    pub fn axpy(&mut self, alpha: f64, x: &Tensor3) -> Result<()> {
        self.check_same_dims(x)?;
        for (y, v) in self.data.iter_mut().zip(&x.data) {
            *y += alpha * v;
        }
        Ok(())
    }

    pub fn scale(&mut self, alpha: f64) {
        self.data.iter_mut().for_each(|v| *v *= alpha);
    }

    /// Forward unnormalized 3D DFT (the `fftn` convention).
    pub fn dft3(&self) -> ComplexTensor3 {
        let mut c = ComplexTensor3 {
            dims: self.dims,
            data: self.data.iter().map(|&v| Complex64::new(v, 0.0)).collect(),
        };
        c.transform(FftDirection::Forward);
        c
    }
}

impl Index<(usize, usize, usize)> for Tensor3 {
    type Output = f64;

    fn index(&self, (i, j, s): (usize, usize, usize)) -> &f64 {
        &self.data[offset(self.dims, i, j, s)]
    }
}

impl IndexMut<(usize, usize, usize)> for Tensor3 {
    fn index_mut(&mut self, (i, j, s): (usize, usize, usize)) -> &mut f64 {
        &mut self.data[offset(self.dims, i, j, s)]
    }
}

/// Complex third-order tensor, same layout as [`Tensor3`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexTensor3 {
    dims: [usize; 3],
    data: Vec<Complex64>,
}

impl ComplexTensor3 {
    pub fn new(dims: [usize; 3], data: Vec<Complex64>) -> Result<Self> {
        let len = checked_len(dims)?;
        if data.len() != len {
            return Err(Error::dims(len, data.len()));
        }
        Ok(Self { dims, data })
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn get(&self, i: usize, j: usize, s: usize) -> Complex64 {
        self.data[offset(self.dims, i, j, s)]
    }

    /// Forward unnormalized 3D DFT.
    pub fn dft3(&self) -> ComplexTensor3 {
        let mut c = self.clone();
        c.transform(FftDirection::Forward);
        c
    }

    /// Inverse 3D DFT, carrying the `1 / (I1 I2 I3)` factor (the `ifftn`
    /// convention).
    pub fn idft3(&self) -> ComplexTensor3 {
        let mut c = self.clone();
        c.transform(FftDirection::Inverse);
        let n = c.data.len() as f64;
        c.data.iter_mut().for_each(|v| *v /= n);
        c
    }

    /// Real parts.
    pub fn re(&self) -> Tensor3 {
        Tensor3 {
            dims: self.dims,
            data: self.data.iter().map(|v| v.re).collect(),
        }
    }

    /// Largest absolute imaginary part.
    pub fn max_imag(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.im.abs()))
    }

    fn transform(&mut self, direction: FftDirection) {
        let mut planner = FftPlanner::new();
        for axis in 0..3 {
            let n = self.dims[axis];
            if n > 1 {
                let fft = planner.plan_fft(n, direction);
                fft_along_axis(&mut self.data, self.dims, axis, fft.as_ref());
            }
        }
    }
}

fn fft_along_axis(data: &mut [Complex64], dims: [usize; 3], axis: usize, fft: &dyn Fft<f64>) {
    let n = dims[axis];
    let stride: usize = dims[..axis].iter().product();
    let block = stride * n;
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    if axis == 0 {
        for line in data.chunks_exact_mut(n) {
            fft.process_with_scratch(line, &mut scratch);
        }
        return;
    }
    let mut line = vec![Complex64::default(); n];
    for chunk in data.chunks_exact_mut(block) {
        for inner in 0..stride {
            for (t, v) in line.iter_mut().enumerate() {
                *v = chunk[inner + t * stride];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (t, v) in line.iter().enumerate() {
                chunk[inner + t * stride] = *v;
            }
        }
    }
}
