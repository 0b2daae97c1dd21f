//! Observation masks: the index set of known entries.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// Membership of every entry of an `I1 x I2 x I3` tensor in the observed set,
/// stored in tensor layout.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationMask {
    dims: [usize; 3],
    observed: Vec<bool>,
}

impl ObservationMask {
    pub fn new(dims: [usize; 3], observed: Vec<bool>) -> Result<Self> {
        let len: usize = dims.iter().product();
        if observed.len() != len {
            return Err(Error::dims(len, observed.len()));
        }
        Ok(Self { dims, observed })
    }

    pub fn full(dims: [usize; 3]) -> Self {
        Self {
            dims,
            observed: vec![true; dims.iter().product()],
        }
    }

    pub fn empty(dims: [usize; 3]) -> Self {
        Self {
            dims,
            observed: vec![false; dims.iter().product()],
        }
    }

    pub fn from_fn(dims: [usize; 3], f: impl Fn(usize, usize, usize) -> bool) -> Self {
        let t = Tensor3::from_fn(dims, |i, j, s| if f(i, j, s) { 1.0 } else { 0.0 });
        Self {
            dims,
            observed: t.as_slice().iter().map(|&v| v != 0.0).collect(),
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.observed
    }

    pub fn is_observed(&self, i: usize, j: usize, s: usize) -> bool {
        self.observed[i + self.dims[0] * (j + self.dims[1] * s)]
    }

    pub fn count_observed(&self) -> usize {
        self.observed.iter().filter(|&&o| o).count()
    }

    pub fn observed_fraction(&self) -> f64 {
        if self.observed.is_empty() {
            return 0.0;
        }
        self.count_observed() as f64 / self.observed.len() as f64
    }

    pub(crate) fn check_dims(&self, t: &Tensor3) -> Result<()> {
        if self.dims != t.dims() {
            return Err(Error::dims(self.dims, t.dims()));
        }
        Ok(())
    }

    /// `P_Omega(t)`: keeps observed entries and zeroes the rest.
    pub fn project(&self, t: &Tensor3) -> Result<Tensor3> {
        self.check_dims(t)?;
        let mut out = t.clone();
        for (v, &o) in out.as_mut_slice().iter_mut().zip(&self.observed) {
            if !o {
                *v = 0.0;
            }
        }
        Ok(out)
    }
}

/// Uniform draw in `[0, 1)` from the top 53 bits of one 64-bit output.
fn unit_f64(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Bernoulli(`p`) sampling mask.
///
/// The generator is ChaCha8 (`rand_chacha::ChaCha8Rng::seed_from_u64(seed)`).
/// Entries are visited in storage order, one `next_u64` per entry; the entry
/// is observed when `(x >> 11) * 2^-53 < p`.
pub fn random_mask(dims: [usize; 3], p: f64, seed: u64) -> Result<ObservationMask> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidConfig(format!(
            "sampling rate must lie in [0, 1], got {p}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len: usize = dims.iter().product();
    let observed = (0..len).map(|_| unit_f64(&mut rng) < p).collect();
    ObservationMask::new(dims, observed)
}

/// Opaque region in pixel coordinates. A pixel `(i, j)` is represented by
/// its center `(i + 0.5, j + 0.5)`; `row` runs along the first tensor index
/// and `col` along the second.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    Ellipse {
        center: (f64, f64),
        radii: (f64, f64),
    },
    /// Closed polygon with vertices `(row, col)`; even-odd fill rule.
    Polygon(Vec<(f64, f64)>),
}

impl Region {
    pub fn contains(&self, row: f64, col: f64) -> bool {
        match self {
            Region::Ellipse { center, radii } => {
                let dr = (row - center.0) / radii.0;
                let dc = (col - center.1) / radii.1;
                dr * dr + dc * dc <= 1.0
            }
            Region::Polygon(vertices) => {
                let mut inside = false;
                let n = vertices.len();
                for k in 0..n {
                    let (r1, c1) = vertices[k];
                    let (r2, c2) = vertices[(k + 1) % n];
                    if (r1 > row) != (r2 > row) {
                        let cross = c1 + (row - r1) / (r2 - r1) * (c2 - c1);
                        if col < cross {
                            inside = !inside;
                        }
                    }
                }
                inside
            }
        }
    }

    fn within(&self, rows: usize, cols: usize) -> bool {
        let ok = |(r, c): (f64, f64)| {
            (0.0..=rows as f64).contains(&r) && (0.0..=cols as f64).contains(&c)
        };
        match self {
            Region::Ellipse { center, radii } => ok(*center) && radii.0 > 0.0 && radii.1 > 0.0,
            Region::Polygon(v) => v.len() >= 3 && v.iter().all(|&p| ok(p)),
        }
    }
}

/// Simulated cloud-cover layouts.
///
/// Geometry is expressed as fractions of the image height and width so the
/// presets scale to any image size.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CloudPreset {
    /// Several small clouds scattered over the scene.
    Case1,
    /// One medium cloud in the middle of the scene.
    Case2,
    /// One large irregular cloud.
    Case3,
}

impl CloudPreset {
    pub fn regions(self, rows: usize, cols: usize) -> Vec<Region> {
        let (h, w) = (rows as f64, cols as f64);
        let ellipse = |cr: f64, cc: f64, rr: f64, rc: f64| Region::Ellipse {
            center: (cr * h, cc * w),
            radii: (rr * h, rc * w),
        };
        match self {
            CloudPreset::Case1 => vec![
                ellipse(0.18, 0.20, 0.07, 0.09),
                ellipse(0.25, 0.70, 0.06, 0.08),
                ellipse(0.50, 0.45, 0.08, 0.06),
                ellipse(0.72, 0.15, 0.05, 0.07),
                ellipse(0.80, 0.62, 0.07, 0.10),
                ellipse(0.55, 0.88, 0.06, 0.05),
            ],
            CloudPreset::Case2 => vec![ellipse(0.5, 0.5, 0.18, 0.22)],
            CloudPreset::Case3 => vec![Region::Polygon(
                [
                    (0.15, 0.30),
                    (0.10, 0.55),
                    (0.22, 0.80),
                    (0.50, 0.88),
                    (0.78, 0.75),
                    (0.88, 0.50),
                    (0.75, 0.22),
                    (0.45, 0.12),
                ]
                .iter()
                .map(|&(r, c)| (r * h, c * w))
                .collect(),
            )],
        }
    }
}

impl std::str::FromStr for CloudPreset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "case1" => Ok(CloudPreset::Case1),
            "case2" => Ok(CloudPreset::Case2),
            "case3" => Ok(CloudPreset::Case3),
            other => Err(Error::InvalidConfig(format!(
                "unknown cloud preset {other:?} (expected case1, case2 or case3)"
            ))),
        }
    }
}

/// Marks every pixel covered by any region as missing in all bands.
pub fn cloud_mask(dims: [usize; 3], regions: &[Region]) -> Result<ObservationMask> {
    let [rows, cols, _] = dims;
    if let Some(index) = regions.iter().position(|r| !r.within(rows, cols)) {
        return Err(Error::RegionOutOfBounds { index, rows, cols });
    }
    let covered: Vec<bool> = (0..rows * cols)
        .map(|k| {
            let (i, j) = (k % rows, k / rows);
            let (r, c) = (i as f64 + 0.5, j as f64 + 0.5);
            regions.iter().any(|reg| reg.contains(r, c))
        })
        .collect();
    let mask = ObservationMask::from_fn(dims, |i, j, _| !covered[i + rows * j]);
    if mask.count_observed() == 0 {
        return Err(Error::EmptyObservedSet);
    }
    Ok(mask)
}

pub fn cloud_preset_mask(dims: [usize; 3], preset: CloudPreset) -> Result<ObservationMask> {
    cloud_mask(dims, &preset.regions(dims[0], dims[1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn extreme_rates() {
        let dims = [5, 4, 3];
        assert_eq!(random_mask(dims, 0.0, 1).unwrap().count_observed(), 0);
        assert_eq!(random_mask(dims, 1.0, 1).unwrap().count_observed(), 60);
        assert!(random_mask(dims, 1.2, 1).is_err());
    }

    #[test]
    fn seeded_determinism() {
        let dims = [20, 20, 3];
        let a = random_mask(dims, 0.3, 42).unwrap();
        assert_eq!(a, random_mask(dims, 0.3, 42).unwrap());
        assert_ne!(a, random_mask(dims, 0.3, 43).unwrap());
    }

    #[test]
    fn sampling_rate_concentrates() {
        for seed in 0..5 {
            let f = random_mask([100, 100, 3], 0.1, seed)
                .unwrap()
                .observed_fraction();
            assert!((0.09..=0.11).contains(&f), "seed {seed}: {f}");
        }
    }

    #[test]
    fn projection_keeps_observed_entries() {
        let t = Tensor3::from_fn([3, 3, 2], |i, j, s| (i + 3 * j + 9 * s) as f64 + 0.25);
        let m = random_mask(t.dims(), 0.5, 9).unwrap();
        let p = m.project(&t).unwrap();
        for (k, &o) in m.as_slice().iter().enumerate() {
            let expect = if o { t.as_slice()[k] } else { 0.0 };
            assert_eq!(p.as_slice()[k].to_bits(), expect.to_bits());
        }
    }

    #[test]
    fn empty_region_list_observes_everything() {
        let m = cloud_mask([8, 8, 2], &[]).unwrap();
        assert_eq!(m.count_observed(), 128);
    }

    #[test]
    fn full_cover_is_rejected() {
        let cover = Region::Polygon(vec![(0.0, 0.0), (0.0, 8.0), (8.0, 8.0), (8.0, 0.0)]);
        assert!(matches!(
            cloud_mask([8, 8, 2], &[cover]),
            Err(Error::EmptyObservedSet)
        ));
    }

    #[test]
    fn out_of_bounds_region_rejected() {
        let r = Region::Ellipse {
            center: (20.0, 2.0),
            radii: (1.0, 1.0),
        };
        assert!(matches!(
            cloud_mask([8, 8, 1], &[r]),
            Err(Error::RegionOutOfBounds { index: 0, .. })
        ));
    }

    #[test]
    fn clouds_cover_all_bands_alike() {
        let m = cloud_preset_mask([64, 48, 4], CloudPreset::Case2).unwrap();
        for i in 0..64 {
            for j in 0..48 {
                let first = m.is_observed(i, j, 0);
                assert!((1..4).all(|s| m.is_observed(i, j, s) == first));
            }
        }
        assert!(!m.is_observed(32, 24, 0));
        assert!(m.is_observed(0, 0, 0));
    }

    #[test]
    fn polygon_even_odd() {
        let sq = Region::Polygon(vec![(1.0, 1.0), (1.0, 3.0), (3.0, 3.0), (3.0, 1.0)]);
        assert!(sq.contains(2.0, 2.0));
        assert!(!sq.contains(0.5, 2.0));
        assert!(!sq.contains(2.0, 3.5));
    }
}
