//! Binary PGM (P5) / PPM (P6) import and export.
//!
//! An image stack becomes a tensor with rows on the first index, columns on
//! the second and bands on the third. A P6 file contributes three bands in
//! R, G, B order; a P5 file contributes one.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::tensor::Tensor3;

/// Maps stored values into `[0, 1]` and back: `x -> (x - min) / (max - min)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizationRecord {
    pub min: f64,
    pub max: f64,
}

impl NormalizationRecord {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min.is_finite() && max.is_finite() && max > min) {
            return Err(Error::InvalidConfig(format!(
                "normalization needs max > min, got [{min}, {max}]"
            )));
        }
        Ok(Self { min, max })
    }

    /// Scale by the global maximum of `t`, keeping zero fixed.
    pub fn global_max(t: &Tensor3) -> Result<Self> {
        let lo = t.as_slice().iter().copied().fold(0.0, f64::min);
        let hi = t
            .as_slice()
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        Self::new(lo, hi)
    }

    pub fn normalize(&self, t: &Tensor3) -> Tensor3 {
        let span = self.max - self.min;
        t.map(|v| (v - self.min) / span)
    }

    pub fn denormalize(&self, t: &Tensor3) -> Tensor3 {
        let span = self.max - self.min;
        t.map(|v| self.min + v * span)
    }
}

/// A decoded P5/P6 image.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NetpbmImage {
    pub width: usize,
    pub height: usize,
    /// 1 for P5, 3 for P6.
    pub channels: usize,
    pub maxval: u16,
    /// Interleaved samples, row-major.
    pub samples: Vec<u16>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Image(format!("missing or malformed {what}")))
    }
}

pub fn decode_netpbm(bytes: &[u8]) -> Result<NetpbmImage> {
    let channels = match bytes.get(..2) {
        Some(b"P5") => 1,
        Some(b"P6") => 3,
        other => {
            return Err(Error::Image(format!(
                "unsupported magic {:?} (expected P5 or P6)",
                other.map(String::from_utf8_lossy)
            )))
        }
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 || maxval == 0 || maxval > 65535 {
        return Err(Error::Image(format!(
            "invalid header: {width}x{height}, maxval {maxval}"
        )));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if !bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(Error::Image("missing whitespace after maxval".into()));
    }
    let raster = &bytes[cur.pos + 1..];
    let count = width * height * channels;
    let wide = maxval > 255;
    let need = if wide { 2 * count } else { count };
    if raster.len() < need {
        return Err(Error::Truncated {
            missing: need - raster.len(),
            context: "netpbm raster",
        });
    }
    let samples: Vec<u16> = if wide {
        raster[..need]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]))
            .collect()
    } else {
        raster[..need].iter().map(|&b| b as u16).collect()
    };
    let maxval = maxval as u16;
    if let Some(bad) = samples.iter().find(|&&s| s > maxval) {
        return Err(Error::Image(format!(
            "sample {bad} exceeds maxval {maxval}"
        )));
    }
    Ok(NetpbmImage {
        width,
        height,
        channels,
        maxval,
        samples,
    })
}

pub fn encode_netpbm(img: &NetpbmImage) -> Vec<u8> {
    let magic = if img.channels == 3 { "P6" } else { "P5" };
    let mut out = format!("{magic}\n{} {}\n{}\n", img.width, img.height, img.maxval).into_bytes();
    if img.maxval > 255 {
        for s in &img.samples {
            out.extend_from_slice(&s.to_be_bytes());
        }
    } else {
        out.extend(img.samples.iter().map(|&s| s as u8));
    }
    out
}

pub fn read_netpbm(path: impl AsRef<Path>) -> Result<NetpbmImage> {
    decode_netpbm(&fs::read(path)?)
}

pub fn write_netpbm(path: impl AsRef<Path>, img: &NetpbmImage) -> Result<()> {
    fs::write(path, encode_netpbm(img))?;
    Ok(())
}

/// Loads P5/P6 files as consecutive bands scaled by their declared maxval.
pub fn import_image_stack<P: AsRef<Path>>(paths: &[P]) -> Result<(Tensor3, NormalizationRecord)> {
    let images = paths.iter().map(read_netpbm).collect::<Result<Vec<_>>>()?;
    images_to_tensor(&images)
}

pub fn images_to_tensor(images: &[NetpbmImage]) -> Result<(Tensor3, NormalizationRecord)> {
    let first = images
        .first()
        .ok_or_else(|| Error::Image("empty image list".into()))?;
    let (rows, cols, maxval) = (first.height, first.width, first.maxval);
    for img in images {
        if (img.height, img.width) != (rows, cols) {
            return Err(Error::dims((rows, cols), (img.height, img.width)));
        }
        if img.maxval != maxval {
            return Err(Error::Image(format!(
                "mixed maxval {} and {maxval} in one stack",
                img.maxval
            )));
        }
    }
    let mut bands: Vec<(&NetpbmImage, usize)> = Vec::new();
    for img in images {
        bands.extend((0..img.channels).map(|c| (img, c)));
    }
    let record = NormalizationRecord::new(0.0, maxval as f64)?;
    let scale = maxval as f64;
    let t = Tensor3::from_fn([rows, cols, bands.len()], |i, j, s| {
        let (img, c) = bands[s];
        img.samples[(i * cols + j) * img.channels + c] as f64 / scale
    });
    Ok((t, record))
}

fn quantize(v: f64, record: &NormalizationRecord, maxval: u16) -> u16 {
    let x = record.min + v * (record.max - record.min);
    x.round().clamp(0.0, maxval as f64) as u16
}

fn record_maxval(record: &NormalizationRecord) -> Result<u16> {
    let m = record.max.round();
    if !(1.0..=65535.0).contains(&m) {
        return Err(Error::Image(format!(
            "normalization max {} is not a valid maxval",
            record.max
        )));
    }
    Ok(m as u16)
}

/// Band `s` as a grayscale image, rescaled by `record` and clamped.
pub fn band_to_pgm(a: &Tensor3, s: usize, record: &NormalizationRecord) -> Result<NetpbmImage> {
    let [rows, cols, bands] = a.dims();
    if s >= bands {
        return Err(Error::IndexOutOfRange {
            mode: 3,
            index: s,
            len: bands,
        });
    }
    let maxval = record_maxval(record)?;
    let samples = (0..rows * cols)
        .map(|k| quantize(a.get(k / cols, k % cols, s), record, maxval))
        .collect();
    Ok(NetpbmImage {
        width: cols,
        height: rows,
        channels: 1,
        maxval,
        samples,
    })
}

/// A three-band tensor as one color image.
pub fn color_to_ppm(a: &Tensor3, record: &NormalizationRecord) -> Result<NetpbmImage> {
    let [rows, cols, bands] = a.dims();
    if bands != 3 {
        return Err(Error::dims("3 bands", bands));
    }
    let maxval = record_maxval(record)?;
    let samples = (0..rows * cols * 3)
        .map(|k| {
            let (px, c) = (k / 3, k % 3);
            quantize(a.get(px / cols, px % cols, c), record, maxval)
        })
        .collect();
    Ok(NetpbmImage {
        width: cols,
        height: rows,
        channels: 3,
        maxval,
        samples,
    })
}

/// Writes one `band_NNN.pgm` per band into `dir` and returns the paths.
pub fn export_image_stack(
    a: &Tensor3,
    record: &NormalizationRecord,
    dir: impl AsRef<Path>,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    (0..a.dims()[2])
        .map(|s| {
            let path = dir.join(format!("band_{s:03}.pgm"));
            write_netpbm(&path, &band_to_pgm(a, s, record)?)?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn p5_scaling() {
        let mut bytes = b"P5\n# comment\n2 2\n255\n".to_vec();
        bytes.extend_from_slice(&[0, 255, 128, 64]);
        let img = decode_netpbm(&bytes).unwrap();
        let (t, rec) = images_to_tensor(&[img]).unwrap();
        assert_eq!(t.dims(), [2, 2, 1]);
        assert_eq!(
            rec,
            NormalizationRecord {
                min: 0.0,
                max: 255.0
            }
        );
        assert_eq!(t.get(0, 0, 0), 0.0);
        assert_eq!(t.get(0, 1, 0), 1.0);
        assert_eq!(t.get(1, 0, 0), 128.0 / 255.0);
        assert_eq!(t.get(1, 1, 0), 64.0 / 255.0);
    }

    #[test]
    fn p6_band_order() {
        let mut bytes = b"P6 1 2 255\n".to_vec();
        bytes.extend_from_slice(&[10, 20, 30, 40, 50, 60]);
        let (t, _) = images_to_tensor(&[decode_netpbm(&bytes).unwrap()]).unwrap();
        assert_eq!(t.dims(), [2, 1, 3]);
        let px: Vec<f64> = (0..3).map(|s| t.get(1, 0, s) * 255.0).collect();
        assert!((px[0] - 40.0).abs() < 1e-12 && (px[2] - 60.0).abs() < 1e-12);
    }

    #[test]
    fn sixteen_bit_roundtrip() {
        let img = NetpbmImage {
            width: 3,
            height: 1,
            channels: 1,
            maxval: 1000,
            samples: vec![0, 999, 1000],
        };
        assert_eq!(decode_netpbm(&encode_netpbm(&img)).unwrap(), img);
    }

    #[test]
    fn rejects_unsupported_and_mixed() {
        assert!(matches!(
            decode_netpbm(b"P2\n1 1\n255\n0"),
            Err(Error::Image(_))
        ));
        let a = NetpbmImage {
            width: 2,
            height: 2,
            channels: 1,
            maxval: 255,
            samples: vec![0; 4],
        };
        let b = NetpbmImage {
            width: 3,
            height: 2,
            channels: 1,
            maxval: 255,
            samples: vec![0; 6],
        };
        assert!(matches!(
            images_to_tensor(&[a, b]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn truncated_raster() {
        assert!(matches!(
            decode_netpbm(b"P5 2 2 255\n\x00\x01"),
            Err(Error::Truncated { missing: 2, .. })
        ));
    }

    #[test]
    fn export_clamps_out_of_range() {
        let t = Tensor3::new([1, 2, 1], vec![-0.2, 1.3]).unwrap();
        let rec = NormalizationRecord::new(0.0, 255.0).unwrap();
        assert_eq!(band_to_pgm(&t, 0, &rec).unwrap().samples, vec![0, 255]);
    }

    #[test]
    fn normalization_roundtrip() {
        let t = Tensor3::new([2, 1, 1], vec![3.0, 12.0]).unwrap();
        let rec = NormalizationRecord::global_max(&t).unwrap();
        let n = rec.normalize(&t);
        assert_eq!(n.as_slice(), &[0.25, 1.0]);
        assert_eq!(rec.denormalize(&n), t);
        assert!(NormalizationRecord::global_max(&Tensor3::zeros([2, 2, 2])).is_err());
    }
}
