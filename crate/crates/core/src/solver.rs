//! Proximal alternating minimization for MTT completion with smoothness.
//!
//! The solver minimizes
//!
//! ```text
//! F(A, x, y, z) = sum_u (alpha_u / 2) ||A - [[X_u; Y_u; Z_u]]_u||_F^2 + (mu / 2) ||D_w(A)||_F^2
//! ```
//!
//! over tensors `A` that agree with the observations on the mask and lie in
//! `[0, 1]` elsewhere. Each sweep updates, in order, the tensor `A`, then for
//! every active mode the cores `X`, `Y` and `Z`. Every block update adds a
//! proximal term `(rho / 2) ||block - previous||^2`, which makes each
//! subproblem strongly convex with a closed-form solution:
//!
//! * `A`: a linear system diagonalized by the 3D DFT, followed by
//!   re-imposing the observations and clipping to `[0, 1]`;
//! * `X`, `Z`: small symmetric positive definite solves;
//! * `Y`: one Sylvester-type equation per slice, solved through the
//!   eigendecompositions of `X^T X` and `Z Z^T`.

use std::time::{Duration, Instant};

use nalgebra::{Cholesky, DVector, SymmetricEigen};
use rayon::prelude::*;

use crate::diffops::{dw_gram, dw_norm_sq, dw_spectrum, SmoothWeights};
use crate::error::{Error, Result};
use crate::io::mask::ObservationMask;
use crate::mtt::{estimate_ranks, tt_svd, MttFactor, MttRank};
use crate::tensor::{Matrix, Mode, Tensor3};

pub const DEFAULT_RHO: f64 = 5e-6;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITER: usize = 500;

/// How missing entries are filled before the TT-SVD initialization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitFill {
    #[default]
    Zero,
    ObservedMean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub alphas: [f64; 3],
    pub smooth: SmoothWeights,
    pub rho: f64,
    pub ranks: MttRank,
    pub tol: f64,
    pub max_iter: usize,
    pub record_objective: bool,
    pub init_fill: InitFill,
    /// Reject tensor steps that increase the tensor subproblem objective and
    /// fall back to the best point on the segment towards the projected
    /// solution. Off, the tensor step is always the plain projection.
    pub monotone_a: bool,
}

impl SolverConfig {
    /// Equal mode weights, unit smoothness weights, `mu = 0.005`.
    pub fn new(ranks: MttRank) -> Self {
        Self {
            alphas: [1.0 / 3.0; 3],
            smooth: SmoothWeights {
                w: [1.0; 3],
                mu: 0.005,
            },
            rho: DEFAULT_RHO,
            ranks,
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            record_objective: true,
            init_fill: InitFill::Zero,
            monotone_a: true,
        }
    }

    /// Color-image setting: low rank along the channel mode only, spatial
    /// smoothness only, `mu = 0.05`.
    pub fn color_image(ranks: MttRank) -> Self {
        Self {
            alphas: [0.0, 0.0, 1.0],
            smooth: SmoothWeights {
                w: [1.0, 1.0, 0.0],
                mu: 0.05,
            },
            ..Self::new(ranks)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !self.alphas.iter().all(|a| a.is_finite() && *a >= 0.0) {
            return bad(format!(
                "alphas must be finite and nonnegative, got {:?}",
                self.alphas
            ));
        }
        self.smooth.validate()?;
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return bad(format!("rho must be positive, got {}", self.rho));
        }
        if !(self.tol.is_finite() && self.tol > 0.0) {
            return bad(format!("tol must be positive, got {}", self.tol));
        }
        if self.max_iter == 0 {
            return bad("max_iter must be at least 1".into());
        }
        if self.alphas.iter().sum::<f64>() == 0.0 && self.smooth.mu == 0.0 {
            return bad("alphas and mu are all zero: the objective is identically zero".into());
        }
        Ok(())
    }

    /// Validates and rescales the mode weights to sum to one.
    pub fn normalized(mut self) -> Result<Self> {
        self.validate()?;
        let sum: f64 = self.alphas.iter().sum();
        if sum > 0.0 {
            self.alphas = self.alphas.map(|a| a / sum);
        }
        Ok(self)
    }

    pub fn is_active(&self, mode: Mode) -> bool {
        self.alphas[mode.index()] > 0.0
    }
}

/// Observations `M` on the mask, with `[0, 1]` bounds elsewhere.
#[derive(Debug, Clone)]
pub struct FeasibleSet {
    mask: ObservationMask,
    observed: Tensor3,
}

impl FeasibleSet {
    pub fn new(m: &Tensor3, mask: ObservationMask) -> Result<Self> {
        mask.check_dims(m)?;
        if mask.count_observed() == 0 {
            return Err(Error::EmptyObservedSet);
        }
        let observed = mask.project(m)?;
        if !observed.as_slice().iter().all(|v| (0.0..=1.0).contains(v)) {
            return Err(Error::InvalidConfig(
                "observed values must be normalized into [0, 1]".into(),
            ));
        }
        Ok(Self { mask, observed })
    }

    pub fn mask(&self) -> &ObservationMask {
        &self.mask
    }

    /// `P_Omega(M)`.
    pub fn observed(&self) -> &Tensor3 {
        &self.observed
    }

    /// Observed entries from `M`, the rest clipped into `[0, 1]`.
    pub fn project(&self, a: &mut Tensor3) {
        let obs = self.observed.as_slice();
        for ((v, &o), &m) in a
            .as_mut_slice()
            .iter_mut()
            .zip(self.mask.as_slice())
            .zip(obs)
        {
            *v = if o { m } else { v.clamp(0.0, 1.0) };
        }
    }

    pub fn contains(&self, a: &Tensor3) -> bool {
        a.dims() == self.observed.dims()
            && a.as_slice()
                .iter()
                .zip(self.mask.as_slice())
                .zip(self.observed.as_slice())
                .all(|((v, &o), m)| {
                    if o {
                        v.to_bits() == m.to_bits()
                    } else {
                        (0.0..=1.0).contains(v)
                    }
                })
    }
}

/// Per-mode factorizations; `None` for modes with zero weight.
pub type ModeFactors = [Option<MttFactor>; 3];

/// Objective value and its parts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Objective {
    pub total: f64,
    /// `(alpha_u / 2) ||A - [[X_u; Y_u; Z_u]]_u||_F^2` per mode.
    pub fit: [f64; 3],
    /// `(mu / 2) ||D_w(A)||_F^2`.
    pub smooth: f64,
}

fn objective_from_recs(
    a: &Tensor3,
    recs: &[Option<Tensor3>; 3],
    cfg: &SolverConfig,
) -> Result<Objective> {
    let mut fit = [0.0; 3];
    for mode in Mode::ALL {
        if let Some(rec) = &recs[mode.index()] {
            let d = a.distance(rec)?;
            fit[mode.index()] = 0.5 * cfg.alphas[mode.index()] * d * d;
        }
    }
    let smooth = if cfg.smooth.mu > 0.0 {
        0.5 * cfg.smooth.mu * dw_norm_sq(a, &cfg.smooth)
    } else {
        0.0
    };
    Ok(Objective {
        total: fit.iter().sum::<f64>() + smooth,
        fit,
        smooth,
    })
}

fn reconstructions(factors: &ModeFactors) -> [Option<Tensor3>; 3] {
    std::array::from_fn(|u| factors[u].as_ref().map(MttFactor::reconstruct))
}

/// Objective at a feasible `a` (the indicator term contributes zero).
pub fn objective(a: &Tensor3, factors: &ModeFactors, cfg: &SolverConfig) -> Result<Objective> {
    for f in factors.iter().flatten() {
        if f.dims() != a.dims() {
            return Err(Error::dims(a.dims(), f.dims()));
        }
    }
    objective_from_recs(a, &reconstructions(factors), cfg)
}

fn solve_a_from_recs(
    a_k: &Tensor3,
    recs: &[Option<Tensor3>; 3],
    cfg: &SolverConfig,
) -> Result<Tensor3> {
    let mut rhs = a_k.clone();
    rhs.scale(cfg.rho);
    for mode in Mode::ALL {
        if let Some(rec) = &recs[mode.index()] {
            rhs.axpy(cfg.alphas[mode.index()], rec)?;
        }
    }
    let diag = cfg.alphas.iter().sum::<f64>() + cfg.rho;
    let lam = dw_spectrum(a_k.dims(), &cfg.smooth);
    let mut spec = rhs.dft3();
    for (v, &l) in spec.as_mut_slice().iter_mut().zip(lam.as_slice()) {
        *v /= diag + cfg.smooth.mu * l;
    }
    Ok(spec.idft3().re())
}

/// Unconstrained minimizer of the tensor subproblem, before projection.
///
/// Solves `[(sum_u alpha_u + rho) I + mu D_w* D_w] A = sum_u alpha_u [[X_u; Y_u; Z_u]]_u + rho A_k`
/// in the Fourier domain. With normalized weights the diagonal shift is
/// `1 + rho`.
pub fn solve_a_system(a_k: &Tensor3, factors: &ModeFactors, cfg: &SolverConfig) -> Result<Tensor3> {
    for f in factors.iter().flatten() {
        if f.dims() != a_k.dims() {
            return Err(Error::dims(a_k.dims(), f.dims()));
        }
    }
    solve_a_from_recs(a_k, &reconstructions(factors), cfg)
}

/// Tensor update: [`solve_a_system`] followed by projection onto the
/// feasible set.
pub fn update_a(
    a_k: &Tensor3,
    factors: &ModeFactors,
    cfg: &SolverConfig,
    set: &FeasibleSet,
) -> Result<Tensor3> {
    let mut a = solve_a_system(a_k, factors, cfg)?;
    set.project(&mut a);
    Ok(a)
}

/// Value of the tensor subproblem `h + g + (rho/2) ||A - A_k||^2` at `a`.
fn a_subproblem(
    a: &Tensor3,
    a_k: &Tensor3,
    recs: &[Option<Tensor3>; 3],
    cfg: &SolverConfig,
) -> Result<f64> {
    let d = a.distance(a_k)?;
    Ok(objective_from_recs(a, recs, cfg)?.total + 0.5 * cfg.rho * d * d)
}

/// Keeps the projected step when it does not increase the tensor
/// subproblem; otherwise moves to the minimizer of that quadratic on the
/// segment from `a_k` to the projected step. Both endpoints are feasible, so
/// every point of the segment is.
fn safeguard_a_step(
    a_k: &Tensor3,
    candidate: Tensor3,
    recs: &[Option<Tensor3>; 3],
    cfg: &SolverConfig,
    set: &FeasibleSet,
) -> Result<(Tensor3, bool)> {
    // Increases at the rounding level of the objective itself are accepted.
    let q_k = a_subproblem(a_k, a_k, recs, cfg)?;
    let limit = q_k + 1e-13 * q_k.abs();
    if a_subproblem(&candidate, a_k, recs, cfg)? <= limit {
        return Ok((candidate, false));
    }
    let dir = candidate.zip_map(a_k, |c, a| c - a)?;
    // Gradient of the subproblem at a_k; the proximal term contributes nothing there.
    let mut grad = Tensor3::zeros(a_k.dims());
    for (u, rec) in recs.iter().enumerate() {
        if let Some(rec) = rec {
            grad.axpy(cfg.alphas[u], &a_k.zip_map(rec, |a, r| a - r)?)?;
        }
    }
    if cfg.smooth.mu > 0.0 {
        grad.axpy(cfg.smooth.mu, &dw_gram(a_k, &cfg.smooth))?;
    }
    let curvature = (cfg.alphas.iter().sum::<f64>() + cfg.rho) * dir.fro_norm().powi(2)
        + cfg.smooth.mu * dw_norm_sq(&dir, &cfg.smooth);
    let slope = grad.inner(&dir)?;
    let t = if curvature > 0.0 {
        (-slope / curvature).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let mut next = a_k.clone();
    next.axpy(t, &dir)?;
    set.project(&mut next);
    if a_subproblem(&next, a_k, recs, cfg)? <= limit {
        Ok((next, true))
    } else {
        Ok((a_k.clone(), true))
    }
}

fn check_slices(f: &MttFactor, slices: &[Matrix]) -> Result<()> {
    let [j1, j2, j3] = f.permuted_dims();
    if slices.len() != j2 {
        return Err(Error::dims(j2, slices.len()));
    }
    if let Some(bad) = slices.iter().find(|s| s.shape() != (j1, j3)) {
        return Err(Error::dims((j1, j3), bad.shape()));
    }
    Ok(())
}

/// Solves `G * out = rhs` for symmetric positive semidefinite `G`, falling
/// back to the pseudo-inverse when `G` is singular.
fn spd_solve(g: Matrix, rhs: &Matrix) -> Matrix {
    match Cholesky::new(g.clone()) {
        Some(ch) => ch.solve(rhs),
        None => {
            let eig = SymmetricEigen::new(g);
            let top = eig.eigenvalues.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            let inv = eig
                .eigenvalues
                .map(|l| if l > 1e-14 * top { 1.0 / l } else { 0.0 });
            &eig.eigenvectors * Matrix::from_diagonal(&inv) * eig.eigenvectors.transpose() * rhs
        }
    }
}

/// Closed-form `X` update for one mode.
///
/// Minimizes `(alpha/2) sum_i ||A_i - X Y_i Z||^2 + (rho/2) ||X - X_k||^2`:
/// `X = [rho X_k + alpha sum_i A_i (Y_i Z)^T] [rho I + alpha sum_i (Y_i Z)(Y_i Z)^T]^{-1}`.
pub fn update_x(f: &MttFactor, slices: &[Matrix], alpha: f64, rho: f64) -> Result<Matrix> {
    check_slices(f, slices)?;
    if alpha == 0.0 {
        return Ok(f.x.clone());
    }
    let (r1, _) = f.ranks();
    let zt = f.z.transpose();
    let mut gram = Matrix::identity(r1, r1) * rho;
    let mut rhs = &f.x * rho;
    for (a_i, y_i) in slices.iter().zip(&f.y) {
        let b = y_i * &f.z;
        gram += (&b * b.transpose()) * alpha;
        rhs += (a_i * &zt) * y_i.transpose() * alpha;
    }
    // X G = R  <=>  G X^T = R^T.
    Ok(spd_solve(gram, &rhs.transpose()).transpose())
}

/// Closed-form `Z` update for one mode, using the already-updated `X` and `Y`.
///
/// `Z = [rho I + alpha sum_i (X Y_i)^T (X Y_i)]^{-1} [rho Z_k + alpha sum_i (X Y_i)^T A_i]`.
pub fn update_z(f: &MttFactor, slices: &[Matrix], alpha: f64, rho: f64) -> Result<Matrix> {
    check_slices(f, slices)?;
    if alpha == 0.0 {
        return Ok(f.z.clone());
    }
    let (_, r2) = f.ranks();
    let xt = f.x.transpose();
    let mut gram = Matrix::identity(r2, r2) * rho;
    let mut rhs = &f.z * rho;
    for (a_i, y_i) in slices.iter().zip(&f.y) {
        let c = &f.x * y_i;
        gram += (c.transpose() * &c) * alpha;
        rhs += y_i.transpose() * (&xt * a_i) * alpha;
    }
    Ok(spd_solve(gram, &rhs))
}

/// Eigendecompositions `X^T X = Q1 L1 Q1^T` and `Z Z^T = Q2 L2 Q2^T` shared by
/// all slice solves of one `Y` update.
#[derive(Debug, Clone)]
pub struct YUpdateWorkspace {
    pub q1: Matrix,
    pub lambda1: DVector<f64>,
    pub q2: Matrix,
    pub lambda2: DVector<f64>,
}

impl YUpdateWorkspace {
    pub fn new(x: &Matrix, z: &Matrix) -> Self {
        let e1 = SymmetricEigen::new(x.transpose() * x);
        let e2 = SymmetricEigen::new(z * z.transpose());
        // Gram matrices are PSD; rounding can leave eigenvalues a hair below zero.
        Self {
            q1: e1.eigenvectors,
            lambda1: e1.eigenvalues.map(|v| v.max(0.0)),
            q2: e2.eigenvectors,
            lambda2: e2.eigenvalues.map(|v| v.max(0.0)),
        }
    }

    /// Solves `alpha (X^T X) Y (Z Z^T) + rho Y = gamma`.
    pub fn solve(&self, gamma: &Matrix, alpha: f64, rho: f64) -> Matrix {
        let mut hat = self.q1.transpose() * gamma * &self.q2;
        for n in 0..hat.ncols() {
            for m in 0..hat.nrows() {
                let denom = rho + alpha * self.lambda1[m] * self.lambda2[n];
                hat[(m, n)] = if denom > 0.0 {
                    hat[(m, n)] / denom
                } else {
                    0.0
                };
            }
        }
        &self.q1 * hat * self.q2.transpose()
    }
}

/// Per-slice `Y` update for one mode, with `X` already updated and `Z` from
/// the previous sweep.
///
/// Each slice minimizes `(alpha/2) ||A_i - X Y_i Z||^2 + (rho/2) ||Y_i - Y_i^k||^2`,
/// whose optimality condition is `alpha X^T X Y_i Z Z^T + rho Y_i = Gamma_i`
/// with `Gamma_i = alpha X^T A_i Z^T + rho Y_i^k`.
pub fn update_y(f: &MttFactor, slices: &[Matrix], alpha: f64, rho: f64) -> Result<Vec<Matrix>> {
    check_slices(f, slices)?;
    if alpha == 0.0 {
        return Ok(f.y.clone());
    }
    let ws = YUpdateWorkspace::new(&f.x, &f.z);
    let xt = f.x.transpose();
    let zt = f.z.transpose();
    Ok(slices
        .par_iter()
        .zip(&f.y)
        .map(|(a_i, y_i)| {
            let gamma = (&xt * a_i * &zt) * alpha + y_i * rho;
            ws.solve(&gamma, alpha, rho)
        })
        .collect())
}

/// One full `X`, `Y`, `Z` sweep for mode `f.mode()` against the lateral
/// slices of `permute(A_{k+1}, u)`. Returns the new factor and the squared
/// step length of its cores.
pub fn update_factor(
    f: &MttFactor,
    slices: &[Matrix],
    alpha: f64,
    rho: f64,
) -> Result<(MttFactor, f64)> {
    let mut next = f.clone();
    next.x = update_x(&next, slices, alpha, rho)?;
    next.y = update_y(&next, slices, alpha, rho)?;
    next.z = update_z(&next, slices, alpha, rho)?;
    let step = next.distance_sq(f);
    Ok((next, step))
}

/// Read-only view of solver progress handed to callbacks.
#[derive(Debug)]
pub struct Progress<'a> {
    pub iteration: usize,
    pub iterate: &'a Tensor3,
    pub objective: Option<Objective>,
    pub stop_stat: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub recovered: Tensor3,
    pub factors: ModeFactors,
    pub iterations: usize,
    pub converged: bool,
    /// `F` at the initial point followed by one value per sweep (when
    /// `record_objective` is set).
    pub objective_history: Vec<f64>,
    /// Per-mode fit terms, aligned with `objective_history`.
    pub fit_history: Vec<[f64; 3]>,
    /// `||theta_{k+1} - theta_k||^2` over all blocks, one per sweep.
    pub step_sq_history: Vec<f64>,
    /// `||A_{k+1} - A_k||_F / ||P_Omega(M)||_F`, one per sweep.
    pub stop_stat_history: Vec<f64>,
    /// Sweeps whose projected tensor step was replaced by the segment search.
    pub safeguarded_steps: usize,
    pub wall_time: Duration,
}

/// Initial iterate: observations on the mask, fill value elsewhere.
pub fn initial_iterate(set: &FeasibleSet, fill: InitFill) -> Tensor3 {
    let value = match fill {
        InitFill::Zero => 0.0,
        InitFill::ObservedMean => {
            set.observed().as_slice().iter().sum::<f64>() / set.mask().count_observed() as f64
        }
    };
    let mut a = Tensor3::filled(set.observed().dims(), value);
    set.project(&mut a);
    a
}

/// TT-SVD initialization of every active mode.
pub fn initial_factors(a0: &Tensor3, cfg: &SolverConfig) -> Result<ModeFactors> {
    let mut out: ModeFactors = [None, None, None];
    for mode in Mode::ALL {
        if cfg.is_active(mode) {
            out[mode.index()] = Some(tt_svd(a0, mode, cfg.ranks.pair(mode))?);
        }
    }
    Ok(out)
}

/// Ranks covering `energy` of the spectral mass of the zero-filled observations.
pub fn ranks_from_energy(m: &Tensor3, mask: &ObservationMask, energy: f64) -> Result<MttRank> {
    estimate_ranks(&mask.project(m)?, energy)
}

pub fn solve(m: &Tensor3, mask: &ObservationMask, cfg: &SolverConfig) -> Result<SolveReport> {
    solve_with_progress(m, mask, cfg, |_| {})
}

/// Runs the solver, invoking `progress` once per sweep.
pub fn solve_with_progress(
    m: &Tensor3,
    mask: &ObservationMask,
    cfg: &SolverConfig,
    mut progress: impl FnMut(&Progress<'_>),
) -> Result<SolveReport> {
    let start = Instant::now();
    let cfg = cfg.clone().normalized()?;
    if !m.is_finite() {
        return Err(Error::NonFinite {
            iteration: 0,
            block: "input",
        });
    }
    let set = FeasibleSet::new(m, mask.clone())?;
    let denom = match set.observed().fro_norm() {
        n if n > 0.0 => n,
        _ => 1.0,
    };

    let mut a = initial_iterate(&set, cfg.init_fill);
    let mut factors = initial_factors(&a, &cfg)?;
    let mut recs = reconstructions(&factors);

    let mut objective_history = Vec::new();
    let mut fit_history = Vec::new();
    if cfg.record_objective {
        let obj = objective_from_recs(&a, &recs, &cfg)?;
        objective_history.push(obj.total);
        fit_history.push(obj.fit);
    }
    let mut step_sq_history = Vec::new();
    let mut stop_stat_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    let mut safeguarded_steps = 0;

    for k in 1..=cfg.max_iter {
        iterations = k;
        let mut a_next = solve_a_from_recs(&a, &recs, &cfg)?;
        set.project(&mut a_next);
        if cfg.monotone_a {
            let (next, fell_back) = safeguard_a_step(&a, a_next, &recs, &cfg, &set)?;
            a_next = next;
            safeguarded_steps += fell_back as usize;
        }
        if !a_next.is_finite() {
            return Err(Error::NonFinite {
                iteration: k,
                block: "tensor",
            });
        }
        let a_step = a_next.distance(&a)?;

        let updated = factors
            .par_iter()
            .enumerate()
            .map(|(u, f)| -> Result<Option<(MttFactor, f64, Tensor3)>> {
                let Some(f) = f else { return Ok(None) };
                let slices = a_next.permute(f.mode()).lateral_slices();
                let (next, step) = update_factor(f, &slices, cfg.alphas[u], cfg.rho)?;
                let rec = next.reconstruct();
                if !rec.is_finite() {
                    return Err(Error::NonFinite {
                        iteration: k,
                        block: "factor",
                    });
                }
                Ok(Some((next, step, rec)))
            })
            .collect::<Result<Vec<_>>>()?;

        let mut step_sq = a_step * a_step;
        for (u, item) in updated.into_iter().enumerate() {
            if let Some((f, step, rec)) = item {
                factors[u] = Some(f);
                recs[u] = Some(rec);
                step_sq += step;
            }
        }

        let stop = a_step / denom;
        let obj = if cfg.record_objective {
            let obj = objective_from_recs(&a_next, &recs, &cfg)?;
            objective_history.push(obj.total);
            fit_history.push(obj.fit);
            Some(obj)
        } else {
            None
        };
        step_sq_history.push(step_sq);
        stop_stat_history.push(stop);
        a = a_next;
        progress(&Progress {
            iteration: k,
            iterate: &a,
            objective: obj,
            stop_stat: stop,
        });
        if stop <= cfg.tol {
            converged = true;
            break;
        }
    }

    Ok(SolveReport {
        recovered: a,
        factors,
        iterations,
        converged,
        objective_history,
        fit_history,
        step_sq_history,
        stop_stat_history,
        safeguarded_steps,
        wall_time: start.elapsed(),
    })
}
