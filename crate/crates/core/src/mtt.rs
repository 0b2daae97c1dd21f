//! Mode-`k` tensor-train factorizations and multi-mode TT ranks.
//!
//! A mode-`u` factorization of `A` is stored in the mode-2 form of
//! `P = permute(A, u)`: every lateral slice satisfies
//! `P(:, i, :) = X * Y[i] * Z` with `X: J1 x r1`, `Y[i]: r1 x r2` and
//! `Z: r2 x J3`, where `(J1, J2, J3)` are the dimensions of `P`. The mode-`u`
//! TT rank of `A` is the mode-2 TT rank of `P`, so one representation serves
//! all three modes.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tensor::{Matrix, Mode, Tensor3};

/// Relative threshold used when counting numerical ranks.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

/// Cores `(X, Y, Z)` of one mode-`u` TT factorization.
#[derive(Debug, Clone, PartialEq)]
pub struct MttFactor {
    mode: Mode,
    pub x: Matrix,
    pub y: Vec<Matrix>,
    pub z: Matrix,
}

impl MttFactor {
    pub fn new(mode: Mode, x: Matrix, y: Vec<Matrix>, z: Matrix) -> Result<Self> {
        let (j1, r1) = x.shape();
        let (r2, j3) = z.shape();
        let j2 = y.len();
        if j2 == 0 {
            return Err(Error::dims("at least one Y slice", 0));
        }
        if let Some(bad) = y.iter().find(|s| s.shape() != (r1, r2)) {
            return Err(Error::dims((r1, r2), bad.shape()));
        }
        let (max_r1, max_r2) = (j1.min(j2 * j3), j3.min(j1 * j2));
        if r1 > max_r1 || r2 > max_r2 {
            return Err(Error::RankBounds {
                mode: mode.number(),
                r1,
                r2,
                max_r1,
                max_r2,
            });
        }
        Ok(Self { mode, x, y, z })
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// `(r1, r2)`.
    pub fn ranks(&self) -> (usize, usize) {
        (self.x.ncols(), self.z.nrows())
    }

    /// Dimensions `(J1, J2, J3)` of the permuted tensor.
    pub fn permuted_dims(&self) -> [usize; 3] {
        [self.x.nrows(), self.y.len(), self.z.ncols()]
    }

    /// Dimensions of the tensor this factor reconstructs.
    pub fn dims(&self) -> [usize; 3] {
        self.mode.unpermuted_dims(self.permuted_dims())
    }

    /// The products `X * Y[i] * Z`, i.e. the lateral slices of the permuted
    /// reconstruction.
    pub fn permuted_slices(&self) -> Vec<Matrix> {
        self.y.iter().map(|yi| &self.x * yi * &self.z).collect()
    }

    /// Reconstruction of the permuted tensor `P`.
    pub fn reconstruct_permuted(&self) -> Tensor3 {
        Tensor3::from_lateral_slices(&self.permuted_slices()).expect("consistent cores")
    }

    /// `[[X; Y; Z]]_u`, in the original index order.
    pub fn reconstruct(&self) -> Tensor3 {
        self.reconstruct_permuted().ipermute(self.mode)
    }

    /// Squared Frobenius norm of all cores.
    pub fn norm_sq(&self) -> f64 {
        self.x.norm_squared()
            + self.y.iter().map(|s| s.norm_squared()).sum::<f64>()
            + self.z.norm_squared()
    }

    /// Squared distance between two factorizations with identical core shapes.
    pub fn distance_sq(&self, other: &MttFactor) -> f64 {
        (&self.x - &other.x).norm_squared()
            + self
                .y
                .iter()
                .zip(&other.y)
                .map(|(a, b)| (a - b).norm_squared())
                .sum::<f64>()
            + (&self.z - &other.z).norm_squared()
    }
}

/// The three rank pairs `(r1^u, r2^u)`, indexed by mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MttRank(pub [(usize, usize); 3]);

impl MttRank {
    /// Assembles rank pairs from the ranks `[rank A_(1), rank A_(2), rank A_(3)]`
    /// of the three unfoldings.
    pub fn from_unfolding_ranks(n: [usize; 3]) -> Self {
        MttRank([(n[2], n[1]), (n[0], n[2]), (n[1], n[0])])
    }

    pub fn pair(&self, mode: Mode) -> (usize, usize) {
        self.0[mode.index()]
    }
}

/// Thin SVD with singular values in decreasing order and each left singular
/// vector signed so that its largest-magnitude entry is nonnegative.
///
/// Backed by faer: nalgebra 0.35 can return factors that do not recompose the
/// input when it is exactly rank deficient.
pub(crate) fn svd_sorted(m: &Matrix) -> (Matrix, DVector<f64>, Matrix) {
    let (rows, cols) = m.shape();
    let k = rows.min(cols);
    if k == 0 {
        return (
            Matrix::zeros(rows, 0),
            DVector::zeros(0),
            Matrix::zeros(0, cols),
        );
    }
    let fm = faer::Mat::<f64>::from_fn(rows, cols, |i, j| m[(i, j)]);
    let svd = fm.thin_svd().expect("SVD of a finite matrix");
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]));

    let mut u_out = Matrix::zeros(rows, k);
    let mut vt_out = Matrix::zeros(k, cols);
    let mut s_out = DVector::zeros(k);
    for (dst, &src) in order.iter().enumerate() {
        let pivot = (0..rows).map(|i| u[(i, src)]).fold(0.0f64, |best, v| {
            if v.abs() > best.abs() {
                v
            } else {
                best
            }
        });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for i in 0..rows {
            u_out[(i, dst)] = sign * u[(i, src)];
        }
        for j in 0..cols {
            vt_out[(dst, j)] = sign * v[(j, src)];
        }
        s_out[dst] = s[src];
    }
    (u_out, s_out, vt_out)
}

pub(crate) fn singular_values_sorted(m: &Matrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let fm = faer::Mat::<f64>::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)]);
    let mut s = fm.singular_values().expect("SVD of a finite matrix");
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

fn numerical_rank(sv: &[f64], tol: f64) -> usize {
    match sv.first() {
        Some(&top) if top > 0.0 => sv.iter().filter(|&&s| s > tol * top).count(),
        _ => 0,
    }
}

/// Two-step TT-SVD of `permute(a, mode)` truncated at `ranks = (r1, r2)`.
pub fn tt_svd(a: &Tensor3, mode: Mode, ranks: (usize, usize)) -> Result<MttFactor> {
    let p = a.permute(mode);
    let [j1, j2, j3] = p.dims();
    let (r1, r2) = ranks;
    let (max_r1, max_r2) = (j1.min(j2 * j3), j3.min(r1 * j2));
    if r1 == 0 || r2 == 0 || r1 > max_r1 || r2 > max_r2 {
        return Err(Error::RankBounds {
            mode: mode.number(),
            r1,
            r2,
            max_r1,
            max_r2,
        });
    }

    let (u1, s1, vt1) = svd_sorted(&p.matricize(Mode::One));
    let x = u1.columns(0, r1).into_owned();
    // Remainder S V^T, an r1 x (J2 J3) matrix with column index j + J2 * s.
    let rem = DMatrix::from_fn(r1, j2 * j3, |a, c| s1[a] * vt1[(a, c)]);
    let stacked = DMatrix::from_fn(r1 * j2, j3, |row, s| rem[(row % r1, row / r1 + j2 * s)]);

    let (u2, s2, vt2) = svd_sorted(&stacked);
    let y = (0..j2)
        .map(|j| DMatrix::from_fn(r1, r2, |a, b| u2[(a + r1 * j, b)]))
        .collect();
    let z = DMatrix::from_fn(r2, j3, |b, s| s2[b] * vt2[(b, s)]);
    MttFactor::new(mode, x, y, z)
}

/// Numerical MTT rank: unfolding ranks at `tol * sigma_max`, assembled into
/// the three mode pairs.
pub fn mtt_rank(a: &Tensor3, tol: f64) -> MttRank {
    let n = Mode::ALL.map(|m| numerical_rank(&singular_values_sorted(&a.matricize(m)), tol));
    MttRank::from_unfolding_ranks(n)
}

/// Smallest ranks capturing `energy` of the squared singular-value mass of
/// each unfolding, capped at the numerical rank.
pub fn estimate_ranks(m: &Tensor3, energy: f64) -> Result<MttRank> {
    if !(energy > 0.0 && energy <= 1.0) {
        return Err(Error::InvalidConfig(format!(
            "energy must lie in (0, 1], got {energy}"
        )));
    }
    let n = Mode::ALL.map(|mode| {
        let sv = singular_values_sorted(&m.matricize(mode));
        let full = numerical_rank(&sv, DEFAULT_RANK_TOL);
        if full == 0 {
            return 0;
        }
        let total: f64 = sv.iter().map(|s| s * s).sum();
        let mut acc = 0.0;
        for (k, s) in sv[..full].iter().enumerate() {
            acc += s * s;
            if acc >= energy * total {
                return k + 1;
            }
        }
        full
    });
    Ok(MttRank::from_unfolding_ranks(n))
}
