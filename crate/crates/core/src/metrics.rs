//! PSNR and SSIM, per band and band-averaged.

use crate::error::{Error, Result};
use crate::tensor::{Matrix, Tensor3};

pub const SSIM_WINDOW: usize = 8;
pub const SSIM_C1: f64 = 0.01 * 0.01;
pub const SSIM_C2: f64 = 0.03 * 0.03;

fn psnr_from(count: usize, peak: f64, err_sq: f64) -> f64 {
    if err_sq == 0.0 {
        return f64::INFINITY;
    }
    10.0 * (count as f64 * peak * peak / err_sq).log10()
}

/// `10 log10(N ||truth||_inf^2 / ||a - truth||_F^2)` over the whole tensor.
///
/// Returns `f64::INFINITY` when the two tensors are identical.
pub fn psnr(a: &Tensor3, truth: &Tensor3) -> Result<f64> {
    let err = a.distance(truth)?;
    Ok(psnr_from(truth.len(), truth.max_abs(), err * err))
}

/// Mean SSIM over all `8 x 8` windows at stride 1, with dynamic range 1.
///
/// Window statistics use population (1/N) moments. Images smaller than the
/// window in either direction are scored as one global window.
pub fn ssim_band(x: &Matrix, truth: &Matrix) -> Result<f64> {
    if x.shape() != truth.shape() {
        return Err(Error::dims(truth.shape(), x.shape()));
    }
    let (rows, cols) = x.shape();
    if rows == 0 || cols == 0 {
        return Err(Error::dims("non-empty image", (rows, cols)));
    }
    let (wr, wc) = if rows < SSIM_WINDOW || cols < SSIM_WINDOW {
        (rows, cols)
    } else {
        (SSIM_WINDOW, SSIM_WINDOW)
    };
    let mut total = 0.0;
    let mut windows = 0usize;
    for c0 in 0..=cols - wc {
        for r0 in 0..=rows - wr {
            let wx = x.view((r0, c0), (wr, wc));
            let wy = truth.view((r0, c0), (wr, wc));
            let n = (wr * wc) as f64;
            let mx = wx.sum() / n;
            let my = wy.sum() / n;
            let (mut vx, mut vy, mut cov) = (0.0, 0.0, 0.0);
            for (a, b) in wx.iter().zip(wy.iter()) {
                let (da, db) = (a - mx, b - my);
                vx += da * da;
                vy += db * db;
                cov += da * db;
            }
            let (vx, vy, cov) = (vx / n, vy / n, cov / n);
            total += ((2.0 * mx * my + SSIM_C1) * (2.0 * cov + SSIM_C2))
                / ((mx * mx + my * my + SSIM_C1) * (vx + vy + SSIM_C2));
            windows += 1;
        }
    }
    Ok(total / windows as f64)
}

/// Per-band PSNR/SSIM and their means over the third mode.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub psnr_per_band: Vec<f64>,
    pub ssim_per_band: Vec<f64>,
    pub mpsnr: f64,
    pub mssim: f64,
}

impl QualityReport {
    pub fn band_count(&self) -> usize {
        self.psnr_per_band.len()
    }
}

fn band(t: &Tensor3, s: usize) -> Matrix {
    let [rows, cols, _] = t.dims();
    Matrix::from_fn(rows, cols, |i, j| t.get(i, j, s))
}

pub fn quality_report(a: &Tensor3, truth: &Tensor3) -> Result<QualityReport> {
    truth.check_same_dims(a)?;
    let [rows, cols, bands] = truth.dims();
    let mut psnr_per_band = Vec::with_capacity(bands);
    let mut ssim_per_band = Vec::with_capacity(bands);
    for s in 0..bands {
        let (x, y) = (band(a, s), band(truth, s));
        let peak = y.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        psnr_per_band.push(psnr_from(rows * cols, peak, (&x - &y).norm_squared()));
        ssim_per_band.push(ssim_band(&x, &y)?);
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(QualityReport {
        mpsnr: mean(&psnr_per_band),
        mssim: mean(&ssim_per_band),
        psnr_per_band,
        ssim_per_band,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{random_tensor, rng};
    use rand::Rng;

    #[test]
    fn psnr_by_hand() {
        let truth = Tensor3::filled([2, 2, 1], 1.0);
        let a = Tensor3::filled([2, 2, 1], 0.5);
        assert!((psnr(&a, &truth).unwrap() - 10.0 * 4f64.log10()).abs() < 1e-12);
        assert!((psnr(&a, &truth).unwrap() - 6.0206).abs() < 1e-4);
        assert_eq!(psnr(&truth, &truth).unwrap(), f64::INFINITY);
    }

    #[test]
    fn psnr_decreases_with_error() {
        let mut r = rng(1);
        let truth = random_tensor(&mut r, [4, 4, 2]);
        let noise = random_tensor(&mut r, [4, 4, 2]);
        let mut last = f64::INFINITY;
        for k in 1..6 {
            let mut a = truth.clone();
            a.axpy(0.1 * k as f64, &noise).unwrap();
            let p = psnr(&a, &truth).unwrap();
            assert!(p < last);
            last = p;
        }
    }

    #[test]
    fn ssim_identity_and_constants() {
        let mut r = rng(2);
        let x = Matrix::from_fn(16, 16, |_, _| r.random::<f64>());
        assert_eq!(ssim_band(&x, &x).unwrap(), 1.0);

        let zero = Matrix::zeros(8, 8);
        let one = Matrix::from_element(8, 8, 1.0);
        let expected = (SSIM_C1 * SSIM_C2) / ((1.0 + SSIM_C1) * SSIM_C2);
        assert!((ssim_band(&zero, &one).unwrap() - expected).abs() < 1e-15);
        assert!((expected - 1e-4).abs() < 1e-7);
    }

    #[test]
    fn ssim_symmetric_and_bounded() {
        let mut r = rng(3);
        for _ in 0..10 {
            let x = Matrix::from_fn(12, 9, |_, _| r.random::<f64>());
            let y = Matrix::from_fn(12, 9, |_, _| r.random::<f64>());
            let a = ssim_band(&x, &y).unwrap();
            assert!((a - ssim_band(&y, &x).unwrap()).abs() < 1e-15);
            assert!(a < 1.0);
        }
    }

    #[test]
    fn small_images_use_one_window() {
        let x = Matrix::from_row_slice(2, 3, &[0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        let y = Matrix::from_row_slice(2, 3, &[0.1, 0.25, 0.3, 0.35, 0.5, 0.7]);
        let v = ssim_band(&x, &y).unwrap();
        assert!(v > 0.0 && v < 1.0);
    }

    #[test]
    fn report_means() {
        let mut r = rng(4);
        let truth = random_tensor(&mut r, [9, 10, 3]).map(f64::abs);
        let a = truth.map(|v| (v * 0.9).min(1.0));
        let rep = quality_report(&a, &truth).unwrap();
        assert_eq!(rep.band_count(), 3);
        assert_eq!(rep.mpsnr, rep.psnr_per_band.iter().sum::<f64>() / 3.0);
        assert_eq!(rep.mssim, rep.ssim_per_band.iter().sum::<f64>() / 3.0);

        let same = quality_report(&truth, &truth).unwrap();
        assert!(same.ssim_per_band.iter().all(|&s| s == 1.0));
        assert_eq!(same.mssim, 1.0);

        let one = Tensor3::filled([2, 2, 1], 1.0);
        let half = Tensor3::filled([2, 2, 1], 0.5);
        let rep = quality_report(&half, &one).unwrap();
        assert_eq!(rep.mpsnr, rep.psnr_per_band[0]);
        assert_eq!(rep.mpsnr, psnr(&half, &one).unwrap());
    }
}
