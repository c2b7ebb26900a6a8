//! JSON wire formats.
//!
//! Files that exchange matrices (single operators, pulse sequences, net
//! caches) write every real with 17 significant digits, enough to reproduce
//! the exact binary double on parse. Writers build the JSON by hand so field
//! order and float text are fully deterministic; readers go through serde and
//! report malformed input with a byte offset.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex;
use serde::de::DeserializeOwned;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::mat::{CMat, UnitaryMatrix};
use crate::scalar::{sc, Scalar};

/// Version stamp shared by all file formats this crate writes.
pub const FORMAT_VERSION: u64 = 1;

/// Render a real with 17 significant digits, round-trip exact for doubles.
pub fn fmt_real<T: Scalar>(x: T) -> String {
    format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN))
}

/// Append `"dim":..,"re":[[..]],"im":[[..]]` for a matrix.
pub fn push_matrix_fields<T: Scalar>(buf: &mut String, m: &CMat<T>) {
    let d = m.dim();
    let _ = write!(buf, "\"dim\":{d},\"re\":[");
    for r in 0..d {
        if r > 0 {
            buf.push(',');
        }
        buf.push('[');
        for c in 0..d {
            if c > 0 {
                buf.push(',');
            }
            buf.push_str(&fmt_real(m.at(r, c).re));
        }
        buf.push(']');
    }
    buf.push_str("],\"im\":[");
    for r in 0..d {
        if r > 0 {
            buf.push(',');
        }
        buf.push('[');
        for c in 0..d {
            if c > 0 {
                buf.push(',');
            }
            buf.push_str(&fmt_real(m.at(r, c).im));
        }
        buf.push(']');
    }
    buf.push(']');
}

/// Single-matrix JSON document.
pub fn matrix_to_json<T: Scalar>(m: &CMat<T>) -> String {
    let mut buf = String::from("{");
    push_matrix_fields(&mut buf, m);
    buf.push('}');
    buf.push('\n');
    buf
}

/// Matrix payload as parsed from JSON.
#[derive(Deserialize)]
pub struct WireMatrix {
    pub dim: usize,
    pub re: Vec<Vec<f64>>,
    pub im: Vec<Vec<f64>>,
}

impl WireMatrix {
    /// Validate shape and entries, producing a dense matrix.
    pub fn into_mat<T: Scalar>(self) -> Result<CMat<T>> {
        let d = self.dim;
        let shape_err = || Error::Parse {
            offset: 0,
            line: 0,
            column: 0,
            msg: format!("matrix arrays must be {d}x{d}"),
        };
        if self.re.len() != d || self.im.len() != d {
            return Err(shape_err());
        }
        for row in self.re.iter().chain(self.im.iter()) {
            if row.len() != d {
                return Err(shape_err());
            }
        }
        let m = CMat::from_fn(d, |r, c| {
            Complex::new(sc::<T>(self.re[r][c]), sc::<T>(self.im[r][c]))
        });
        if !m.is_finite() {
            return Err(Error::NotFinite);
        }
        Ok(m)
    }
}

/// Parse a JSON document, mapping syntax errors to a byte offset.
pub fn parse_json<D: DeserializeOwned>(text: &str) -> Result<D> {
    serde_json::from_str(text).map_err(|e| {
        let line = e.line();
        let column = e.column();
        let offset = byte_offset(text, line, column);
        Error::Parse {
            offset,
            line,
            column,
            msg: e.to_string(),
        }
    })
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    if line == 0 {
        return 0;
    }
    let mut off = 0usize;
    for (i, l) in text.split('\n').enumerate() {
        if i + 1 == line {
            return off + column.saturating_sub(1).min(l.len());
        }
        off += l.len() + 1;
    }
    off
}

/// Parse a matrix document.
pub fn matrix_from_json<T: Scalar>(text: &str) -> Result<CMat<T>> {
    parse_json::<WireMatrix>(text)?.into_mat()
}

/// Read a unitary matrix from a JSON file, running the unitarity check.
pub fn load_unitary<T: Scalar>(path: &Path) -> Result<UnitaryMatrix<T>> {
    let text = fs::read_to_string(path)?;
    let m = matrix_from_json(&text)?;
    UnitaryMatrix::new(m)
}

/// Write a unitary matrix to a JSON file.
pub fn save_unitary<T: Scalar>(path: &Path, u: &UnitaryMatrix<T>) -> Result<()> {
    write_atomic(path, matrix_to_json(u.mat()).as_bytes())
}

/// Write a file through a temporary sibling and rename, so readers never see
/// a half-written payload.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp-write");
    fs::write(&tmp, bytes)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn real_formatting_has_17_significant_digits() {
        assert_eq!(fmt_real(0.25f64), "2.5000000000000000e-1");
        assert_eq!(fmt_real(1.0f64), "1.0000000000000000e0");
        assert_eq!(fmt_real(-0.0f64), "-0.0000000000000000e0");
    }

    #[test]
    fn matrix_roundtrip_is_bit_exact() {
        let m = CMat::from_flat(
            2,
            vec![
                Complex64::new(1.0 / 3.0, -2.0e-17),
                Complex64::new(0.1, 0.2),
                Complex64::new(-0.7071067811865476, 1.0),
                Complex64::new(f64::MIN_POSITIVE, -0.0),
            ],
        )
        .unwrap();
        let text = matrix_to_json(&m);
        let back: CMat<f64> = matrix_from_json(&text).unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert_eq!(m.at(r, c).re.to_bits(), back.at(r, c).re.to_bits());
                assert_eq!(m.at(r, c).im.to_bits(), back.at(r, c).im.to_bits());
            }
        }
    }

    #[test]
    fn parse_error_carries_byte_offset() {
        let bad = "{\"dim\":2,\n\"re\": nope}";
        match matrix_from_json::<f64>(bad) {
            Err(Error::Parse { offset, line, .. }) => {
                assert_eq!(line, 2);
                assert!(offset >= 10, "offset {offset} should point into line 2");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn shape_mismatch_rejected() {
        let bad = r#"{"dim":2,"re":[[1.0,0.0]],"im":[[0.0,0.0],[0.0,0.0]]}"#;
        assert!(matrix_from_json::<f64>(bad).is_err());
    }

    #[test]
    fn nonfinite_rejected() {
        let bad = r#"{"dim":1,"re":[[1e999]],"im":[[0.0]]}"#;
        // 1e999 overflows to infinity during parse.
        assert!(matches!(
            matrix_from_json::<f64>(bad),
            Err(Error::NotFinite) | Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn file_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("u.json");
        let u = UnitaryMatrix::<f64>::identity(3);
        save_unitary(&path, &u).unwrap();
        let back = load_unitary::<f64>(&path).unwrap();
        assert_eq!(back.mat(), u.mat());
    }
}
