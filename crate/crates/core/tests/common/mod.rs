#![allow(dead_code)]

use std::f64::consts::PI;

use mttd3r::diffops::{diff, diff_adjoint, Axis};
use mttd3r::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform_matrix(r: &mut impl Rng, rows: usize, cols: usize) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| r.random_range(-1.0..1.0))
}

pub fn uniform_tensor(r: &mut impl Rng, dims: [usize; 3]) -> Tensor3 {
    Tensor3::from_fn(dims, |_, _, _| r.random_range(-1.0..1.0))
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let den: f64 = b.iter().map(|y| y * y).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Sum of `rank` random outer products.
pub fn cp_tensor(r: &mut impl Rng, dims: [usize; 3], rank: usize) -> Tensor3 {
    let f: Vec<Matrix> = dims.iter().map(|&n| uniform_matrix(r, n, rank)).collect();
    Tensor3::from_fn(dims, |i, j, s| {
        (0..rank)
            .map(|c| f[0][(i, c)] * f[1][(j, c)] * f[2][(s, c)])
            .sum()
    })
}

fn smooth_axis(a: &Tensor3, axis: Axis) -> Tensor3 {
    let mut out = a.clone();
    out.axpy(-0.25, &diff_adjoint(&diff(a, axis), axis))
        .unwrap();
    out
}

/// Smooth tensor in `[0, 1]` with multilinear rank `(rank, rank, rank)`.
///
/// Factor columns are a constant plus low-frequency sinusoids; the core is
/// random. Each axis is then filtered by `I - D*D / 4`, which acts on one
/// factor at a time and so keeps the multilinear rank.
pub fn smooth_low_rank(r: &mut impl Rng, dims: [usize; 3], rank: usize) -> Tensor3 {
    let u: Vec<Matrix> = dims
        .iter()
        .map(|&n| {
            Matrix::from_fn(n, rank, |i, c| {
                if c == 0 {
                    1.0
                } else {
                    let t = i as f64 / n as f64;
                    (2.0 * PI * c as f64 * t + r.random_range(0.0..2.0 * PI)).sin()
                        + 0.3 * r.random_range(-1.0..1.0)
                }
            })
        })
        .collect();
    let g: Vec<f64> = (0..rank * rank * rank)
        .map(|_| r.random_range(-1.0..1.0))
        .collect();
    let mut a = Tensor3::from_fn(dims, |i, j, s| {
        let mut acc = 0.0;
        for c in 0..rank {
            for b in 0..rank {
                for q in 0..rank {
                    acc +=
                        g[q + rank * (b + rank * c)] * u[0][(i, q)] * u[1][(j, b)] * u[2][(s, c)];
                }
            }
        }
        acc
    });
    for axis in Axis::ALL {
        a = smooth_axis(&a, axis);
    }
    let lo = a.as_slice().iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = a
        .as_slice()
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    a.map(|v| (v - lo) / (hi - lo))
}

/// `F_{k+1} + (rho/2) step_k - F_k`, maximized over the run.
pub fn worst_decrease_excess(objective: &[f64], step_sq: &[f64], rho: f64) -> f64 {
    step_sq
        .iter()
        .enumerate()
        .map(|(k, s)| objective[k + 1] + 0.5 * rho * s - objective[k])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// `P_Omega(a) == P_Omega(m)` bit for bit and `a` inside `[0, 1]`.
pub fn is_feasible(a: &Tensor3, m: &Tensor3, mask: &ObservationMask) -> bool {
    a.as_slice()
        .iter()
        .zip(m.as_slice())
        .zip(mask.as_slice())
        .all(|((&x, &y), &obs)| {
            if obs {
                x.to_bits() == y.to_bits()
            } else {
                (0.0..=1.0).contains(&x)
            }
        })
}
