//! NPY v1.0 reader and writer for 2-D real matrices.
//!
//! Reading accepts little-endian f4/f8 payloads in C or Fortran order and
//! widens everything to f64. Writing always produces `<f8`, C-order, with the
//! header padded to the format's 64-byte alignment rule, so write-then-read
//! round trips are bit-exact.

use std::fs;
use std::path::Path;

use crate::error::{Error, FormatError, Result};
use crate::repcore::Matrix;

const MAGIC: &[u8; 6] = b"\x93NUMPY";

/// Whether the file's rows are neurons (our native layout) or data points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// Shape `(p, n)`: rows are neurons. The layout this tool writes.
    #[default]
    NeuronsRows,
    /// Shape `(n, p)`: rows are data points; the matrix is transposed on load.
    NeuronsColumns,
}

impl std::str::FromStr for Orientation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "neurons-rows" | "neurons_rows" | "rows" => Ok(Orientation::NeuronsRows),
            "neurons-columns" | "neurons_columns" | "columns" => Ok(Orientation::NeuronsColumns),
            other => Err(Error::InvalidConfig(format!(
                "unknown orientation {other:?}; expected neurons-rows or neurons-columns"
            ))),
        }
    }
}

/// Read a 2-D matrix, transposing if the stored orientation has neurons in
/// columns.
pub fn read_matrix(path: &Path, orientation: Orientation) -> Result<Matrix> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let matrix = parse_npy(&bytes)?;
    Ok(match orientation {
        Orientation::NeuronsRows => matrix,
        Orientation::NeuronsColumns => matrix.transpose(),
    })
}

/// Write `matrix` as NPY v1.0, `<f8`, C-order, shape `(p, n)`. The write is
/// atomic: a temp file in the same directory is renamed into place.
pub fn write_matrix(path: &Path, matrix: &Matrix) -> Result<()> {
    let bytes = encode_npy(matrix);
    super::atomic_write(path, &bytes)
}

pub(crate) fn parse_npy(bytes: &[u8]) -> Result<Matrix> {
    if bytes.len() < 10 || &bytes[..6] != MAGIC {
        return Err(FormatError::BadMagic { offset: 0 }.into());
    }
    let (major, minor) = (bytes[6], bytes[7]);
    if (major, minor) != (1, 0) {
        return Err(FormatError::UnsupportedVersion {
            major,
            minor,
            offset: 6,
        }
        .into());
    }
    let header_len = u16::from_le_bytes([bytes[8], bytes[9]]) as usize;
    let data_offset = 10 + header_len;
    if bytes.len() < data_offset {
        return Err(FormatError::BadHeader {
            offset: 10,
            message: format!("declared header length {header_len} overruns the file"),
        }
        .into());
    }
    let header = std::str::from_utf8(&bytes[10..data_offset]).map_err(|_| {
        Error::from(FormatError::BadHeader {
            offset: 10,
            message: "header is not valid ascii".into(),
        })
    })?;

    let descr = extract_str_value(header, "descr").ok_or_else(|| {
        Error::from(FormatError::BadHeader {
            offset: 10,
            message: "missing 'descr' key".into(),
        })
    })?;
    let item_size = match descr.as_str() {
        "<f8" => 8,
        "<f4" => 4,
        _ => {
            return Err(FormatError::UnsupportedDtype {
                descr,
                offset: 10,
            }
            .into())
        }
    };
    let fortran_order = extract_bool_value(header, "fortran_order").ok_or_else(|| {
        Error::from(FormatError::BadHeader {
            offset: 10,
            message: "missing 'fortran_order' key".into(),
        })
    })?;
    let shape = extract_shape(header).ok_or_else(|| {
        Error::from(FormatError::BadHeader {
            offset: 10,
            message: "missing or malformed 'shape' key".into(),
        })
    })?;
    if shape.len() != 2 {
        return Err(FormatError::NotTwoDimensional {
            ndim: shape.len(),
            offset: 10,
        }
        .into());
    }
    let (rows, cols) = (shape[0], shape[1]);
    if rows == 0 || cols == 0 {
        return Err(FormatError::BadHeader {
            offset: 10,
            message: format!("empty shape ({rows}, {cols})"),
        }
        .into());
    }

    let expected = rows * cols * item_size;
    let payload = &bytes[data_offset..];
    if payload.len() != expected {
        return Err(FormatError::Truncated {
            expected,
            found: payload.len(),
        }
        .into());
    }

    let read_value = |index: usize| -> f64 {
        let at = index * item_size;
        if item_size == 8 {
            f64::from_le_bytes(payload[at..at + 8].try_into().unwrap())
        } else {
            f32::from_le_bytes(payload[at..at + 4].try_into().unwrap()) as f64
        }
    };
    let matrix = if fortran_order {
        Matrix::from_fn(rows, cols, |i, j| read_value(j * rows + i))
    } else {
        Matrix::from_fn(rows, cols, |i, j| read_value(i * cols + j))
    };
    Ok(matrix)
}

pub(crate) fn encode_npy(matrix: &Matrix) -> Vec<u8> {
    let dict = format!(
        "{{'descr': '<f8', 'fortran_order': False, 'shape': ({}, {}), }}",
        matrix.nrows(),
        matrix.ncols()
    );
    // Total header (magic + version + length field + dict + padding + '\n')
    // must be a multiple of 64.
    let unpadded = 10 + dict.len() + 1;
    let padding = (64 - unpadded % 64) % 64;
    let header_len = dict.len() + padding + 1;

    let mut bytes = Vec::with_capacity(10 + header_len + matrix.len() * 8);
    bytes.extend_from_slice(MAGIC);
    bytes.push(1);
    bytes.push(0);
    bytes.extend_from_slice(&(header_len as u16).to_le_bytes());
    bytes.extend_from_slice(dict.as_bytes());
    bytes.extend(std::iter::repeat_n(b' ', padding));
    bytes.push(b'\n');
    for i in 0..matrix.nrows() {
        for j in 0..matrix.ncols() {
            bytes.extend_from_slice(&matrix[(i, j)].to_le_bytes());
        }
    }
    bytes
}

fn extract_str_value(header: &str, key: &str) -> Option<String> {
    let at = find_key(header, key)?;
    let rest = header[at..].trim_start();
    let quote = rest.chars().next().filter(|&c| c == '\'' || c == '"')?;
    let inner = &rest[1..];
    let end = inner.find(quote)?;
    Some(inner[..end].to_string())
}

fn extract_bool_value(header: &str, key: &str) -> Option<bool> {
    let at = find_key(header, key)?;
    let rest = header[at..].trim_start();
    if rest.starts_with("True") {
        Some(true)
    } else if rest.starts_with("False") {
        Some(false)
    } else {
        None
    }
}

fn extract_shape(header: &str) -> Option<Vec<usize>> {
    let at = find_key(header, "shape")?;
    let rest = header[at..].trim_start();
    let open = rest.find('(')?;
    let close = rest.find(')')?;
    let inner = &rest[open + 1..close];
    let mut dims = Vec::new();
    for part in inner.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        dims.push(part.parse::<usize>().ok()?);
    }
    Some(dims)
}

/// Position just past `'key':` in the header dict, tolerating either quote
/// style and arbitrary spacing.
fn find_key(header: &str, key: &str) -> Option<usize> {
    for quote in ['\'', '"'] {
        let pattern = format!("{quote}{key}{quote}");
        if let Some(pos) = header.find(&pattern) {
            let after = &header[pos + pattern.len()..];
            let colon = after.find(':')?;
            return Some(pos + pattern.len() + colon + 1);
        }
    }
    None
}
