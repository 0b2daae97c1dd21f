//! T3B binary container.
//!
//! ```text
//! offset  size  field
//! 0       4     magic "T3B1"
//! 4       1     payload kind: 0 = f64 tensor, 1 = u8 mask
//! 5       12    dims I1, I2, I3 as little-endian u32
//! 17      ...   payload in tensor layout (first index fastest):
//!               kind 0: one little-endian f64 per entry
//!               kind 1: one byte per entry, 1 = observed, 0 = missing
//! ```

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::mask::ObservationMask;
use crate::tensor::Tensor3;

pub const MAGIC: &[u8; 4] = b"T3B1";
pub const KIND_TENSOR: u8 = 0;
pub const KIND_MASK: u8 = 1;
const HEADER_LEN: usize = 17;

/// Decoded container contents.
#[derive(Debug, Clone, PartialEq)]
pub enum T3b {
    Tensor(Tensor3),
    Mask(ObservationMask),
}

fn header(kind: u8, dims: [usize; 3]) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(HEADER_LEN);
    out.extend_from_slice(MAGIC);
    out.push(kind);
    for d in dims {
        let d = u32::try_from(d).map_err(|_| Error::DimOverflow(dims.map(|d| d as u64)))?;
        out.extend_from_slice(&d.to_le_bytes());
    }
    Ok(out)
}

pub fn encode_tensor(t: &Tensor3) -> Result<Vec<u8>> {
    let mut out = header(KIND_TENSOR, t.dims())?;
    out.reserve(8 * t.len());
    for v in t.as_slice() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    Ok(out)
}

pub fn encode_mask(m: &ObservationMask) -> Result<Vec<u8>> {
    let mut out = header(KIND_MASK, m.dims())?;
    out.extend(m.as_slice().iter().map(|&o| o as u8));
    Ok(out)
}

pub fn decode(bytes: &[u8]) -> Result<T3b> {
    if bytes.len() < HEADER_LEN {
        if bytes.len() >= 4 && &bytes[..4] != MAGIC {
            return Err(Error::BadMagic {
                expected: "T3B1",
                found: bytes[..4].to_vec(),
            });
        }
        return Err(Error::Truncated {
            missing: HEADER_LEN - bytes.len(),
            context: "header",
        });
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::BadMagic {
            expected: "T3B1",
            found: bytes[..4].to_vec(),
        });
    }
    let kind = bytes[4];
    let raw: [u64; 3] = std::array::from_fn(|k| {
        let o = 5 + 4 * k;
        u32::from_le_bytes(bytes[o..o + 4].try_into().expect("4 bytes")) as u64
    });
    if raw.contains(&0) {
        return Err(Error::dims("positive dimensions", raw));
    }
    let width: u64 = match kind {
        KIND_TENSOR => 8,
        KIND_MASK => 1,
        other => {
            return Err(Error::PayloadKind {
                expected: KIND_TENSOR,
                found: other,
            })
        }
    };
    let payload_len = raw[0]
        .checked_mul(raw[1])
        .and_then(|n| n.checked_mul(raw[2]))
        .and_then(|n| n.checked_mul(width))
        .and_then(|n| usize::try_from(n).ok())
        .ok_or(Error::DimOverflow(raw))?;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() < payload_len {
        return Err(Error::Truncated {
            missing: payload_len - payload.len(),
            context: "payload",
        });
    }
    if payload.len() > payload_len {
        return Err(Error::TrailingBytes(payload.len() - payload_len));
    }
    let dims = raw.map(|d| d as usize);
    match kind {
        KIND_TENSOR => {
            let data = payload
                .chunks_exact(8)
                .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
                .collect();
            Ok(T3b::Tensor(Tensor3::new(dims, data)?))
        }
        _ => {
            let observed = payload
                .iter()
                .map(|&b| match b {
                    0 => Ok(false),
                    1 => Ok(true),
                    other => Err(Error::MaskByte(other)),
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(T3b::Mask(ObservationMask::new(dims, observed)?))
        }
    }
}

pub fn read_t3b(path: impl AsRef<Path>) -> Result<T3b> {
    decode(&fs::read(path)?)
}

pub fn read_t3b_tensor(path: impl AsRef<Path>) -> Result<Tensor3> {
    match read_t3b(path)? {
        T3b::Tensor(t) => Ok(t),
        T3b::Mask(_) => Err(Error::PayloadKind {
            expected: KIND_TENSOR,
            found: KIND_MASK,
        }),
    }
}

pub fn read_t3b_mask(path: impl AsRef<Path>) -> Result<ObservationMask> {
    match read_t3b(path)? {
        T3b::Mask(m) => Ok(m),
        T3b::Tensor(_) => Err(Error::PayloadKind {
            expected: KIND_MASK,
            found: KIND_TENSOR,
        }),
    }
}

pub fn write_t3b_tensor(path: impl AsRef<Path>, t: &Tensor3) -> Result<()> {
    fs::write(path, encode_tensor(t)?)?;
    Ok(())
}

pub fn write_t3b_mask(path: impl AsRef<Path>, m: &ObservationMask) -> Result<()> {
    fs::write(path, encode_mask(m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_layout() {
        let t = Tensor3::new([1, 2, 1], vec![1.0, -0.5]).unwrap();
        let bytes = encode_tensor(&t).unwrap();
        let mut expected = b"T3B1\x00".to_vec();
        expected.extend_from_slice(&[1, 0, 0, 0, 2, 0, 0, 0, 1, 0, 0, 0]);
        expected.extend_from_slice(&1.0f64.to_le_bytes());
        expected.extend_from_slice(&(-0.5f64).to_le_bytes());
        assert_eq!(bytes, expected);
    }

    #[test]
    fn truncation_names_missing_bytes() {
        let t = Tensor3::filled([2, 2, 2], 0.5);
        let bytes = encode_tensor(&t).unwrap();
        let err = decode(&bytes[..bytes.len() - 3]).unwrap_err();
        assert!(matches!(
            err,
            Error::Truncated {
                missing: 3,
                context: "payload"
            }
        ));
        assert!(err.to_string().contains("3 more bytes"));
        let err = decode(&bytes[..10]).unwrap_err();
        assert!(matches!(
            err,
            Error::Truncated {
                missing: 7,
                context: "header"
            }
        ));
    }

    #[test]
    fn bad_magic_and_kind() {
        let mut bytes = encode_mask(&ObservationMask::full([1, 1, 2])).unwrap();
        bytes[4] = 7;
        assert!(matches!(
            decode(&bytes),
            Err(Error::PayloadKind { found: 7, .. })
        ));
        bytes[0] = b'X';
        assert!(matches!(decode(&bytes), Err(Error::BadMagic { .. })));
    }

    #[test]
    fn dim_overflow_detected() {
        let mut bytes = b"T3B1\x00".to_vec();
        for _ in 0..3 {
            bytes.extend_from_slice(&u32::MAX.to_le_bytes());
        }
        assert!(matches!(decode(&bytes), Err(Error::DimOverflow(_))));
    }

    #[test]
    fn mask_payload_is_validated() {
        let mut bytes = encode_mask(&ObservationMask::full([1, 1, 2])).unwrap();
        *bytes.last_mut().unwrap() = 2;
        assert!(matches!(decode(&bytes), Err(Error::MaskByte(2))));
    }

    #[test]
    fn trailing_bytes_rejected() {
        let mut bytes = encode_mask(&ObservationMask::full([1, 1, 2])).unwrap();
        bytes.push(0);
        assert!(matches!(decode(&bytes), Err(Error::TrailingBytes(1))));
    }
}
