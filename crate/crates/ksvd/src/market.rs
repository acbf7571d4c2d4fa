//! Matrix Market ingestion (coordinate and array formats, real field,
//! general or symmetric) into dense storage, and the JSON writer for
//! computed spectra.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseSymMatrix, Spectrum};

/// A parsed Matrix Market file: symmetric files come back as
/// [`DenseSymMatrix`] (mirrored exactly), general files as [`DenseMatrix`]
/// for the asymmetric entry points.
#[derive(Debug, Clone)]
pub enum LoadedMatrix {
    Symmetric(DenseSymMatrix),
    General(DenseMatrix),
}

impl LoadedMatrix {
    pub fn rows(&self) -> usize {
        match self {
            LoadedMatrix::Symmetric(m) => m.dim(),
            LoadedMatrix::General(m) => m.rows(),
        }
    }

    pub fn cols(&self) -> usize {
        match self {
            LoadedMatrix::Symmetric(m) => m.dim(),
            LoadedMatrix::General(m) => m.cols(),
        }
    }
}

pub fn load_matrix_market(path: &Path) -> Result<LoadedMatrix> {
    let file = File::open(path)?;
    parse_matrix_market(BufReader::new(file))
}

#[derive(PartialEq, Eq, Clone, Copy)]
enum MmFormat {
    Coordinate,
    Array,
}

pub fn parse_matrix_market(reader: impl BufRead) -> Result<LoadedMatrix> {
    let mut lines = reader.lines().enumerate();

    // Header line.
    let (line_no, header) = match lines.next() {
        Some((i, l)) => (i + 1, l?),
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "empty file: missing MatrixMarket header".into(),
            })
        }
    };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_lowercase).collect();
    if tokens.len() < 5 || tokens[0] != "%%matrixmarket" {
        return Err(Error::Parse {
            line: line_no,
            msg: "header must read '%%MatrixMarket matrix <format> <field> <symmetry>'".into(),
        });
    }
    if tokens[1] != "matrix" {
        return Err(Error::UnsupportedFormat(format!(
            "object '{}' (only 'matrix' is supported)",
            tokens[1]
        )));
    }
    let format = match tokens[2].as_str() {
        "coordinate" => MmFormat::Coordinate,
        "array" => MmFormat::Array,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "format '{other}' (coordinate or array)"
            )))
        }
    };
    match tokens[3].as_str() {
        "real" => {}
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "field '{other}' (only real is supported)"
            )))
        }
    }
    let symmetric = match tokens[4].as_str() {
        "general" => false,
        "symmetric" => true,
        other => {
            return Err(Error::UnsupportedFormat(format!(
                "symmetry '{other}' (general or symmetric)"
            )))
        }
    };

    // Size line: first non-comment, non-blank line.
    let mut size_line = None;
    for (i, line) in lines.by_ref() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        size_line = Some((i + 1, line));
        break;
    }
    let (size_no, size_line) = size_line.ok_or(Error::Parse {
        line: line_no + 1,
        msg: "missing size line".into(),
    })?;
    let dims: Vec<usize> = size_line
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>().map_err(|_| Error::Parse {
                line: size_no,
                msg: format!("bad size token '{t}'"),
            })
        })
        .collect::<Result<_>>()?;

    match format {
        MmFormat::Coordinate => {
            if dims.len() != 3 {
                return Err(Error::Parse {
                    line: size_no,
                    msg: "coordinate size line must be 'rows cols nnz'".into(),
                });
            }
            let (rows, cols, nnz) = (dims[0], dims[1], dims[2]);
            if symmetric && rows != cols {
                return Err(Error::Parse {
                    line: size_no,
                    msg: "symmetric matrix must be square".into(),
                });
            }
            let mut data = vec![0.0f64; rows * cols];
            let mut seen = 0usize;
            for (i, line) in lines {
                let line = line?;
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('%') {
                    continue;
                }
                let line_no = i + 1;
                let toks: Vec<&str> = trimmed.split_whitespace().collect();
                if toks.len() != 3 {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: "coordinate entry must be 'i j value'".into(),
                    });
                }
                let r: usize = toks[0].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad row index '{}'", toks[0]),
                })?;
                let c: usize = toks[1].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad column index '{}'", toks[1]),
                })?;
                let v: f64 = toks[2].parse().map_err(|_| Error::Parse {
                    line: line_no,
                    msg: format!("bad value '{}'", toks[2]),
                })?;
                if r == 0 || r > rows || c == 0 || c > cols {
                    return Err(Error::Parse {
                        line: line_no,
                        msg: format!("index ({r}, {c}) out of bounds for {rows}x{cols}"),
                    });
                }
                // Duplicate entries accumulate (assembly semantics).
                data[(r - 1) * cols + (c - 1)] += v;
                if symmetric && r != c {
                    data[(c - 1) * cols + (r - 1)] += v;
                }
                seen += 1;
            }
            if seen != nnz {
                return Err(Error::Parse {
                    line: size_no,
                    msg: format!("expected {nnz} entries, found {seen}"),
                });
            }
            if symmetric {
                Ok(LoadedMatrix::Symmetric(DenseSymMatrix::new(rows, data)?))
            } else {
                Ok(LoadedMatrix::General(DenseMatrix::new(rows, cols, data)?))
            }
        }
        MmFormat::Array => {
            if dims.len() != 2 {
                return Err(Error::Parse {
                    line: size_no,
                    msg: "array size line must be 'rows cols'".into(),
                });
            }
            let (rows, cols) = (dims[0], dims[1]);
            if symmetric && rows != cols {
                return Err(Error::Parse {
                    line: size_no,
                    msg: "symmetric matrix must be square".into(),
                });
            }
            let expected = if symmetric {
                rows * (rows + 1) / 2
            } else {
                rows * cols
            };
            let mut values = Vec::with_capacity(expected);
            let mut last_line = size_no;
            for (i, line) in lines {
                let line = line?;
                let trimmed = line.trim();
                if trimmed.is_empty() || trimmed.starts_with('%') {
                    continue;
                }
                last_line = i + 1;
                for tok in trimmed.split_whitespace() {
                    let v: f64 = tok.parse().map_err(|_| Error::Parse {
                        line: last_line,
                        msg: format!("bad value '{tok}'"),
                    })?;
                    values.push(v);
                }
            }
            if values.len() != expected {
                return Err(Error::Parse {
                    line: last_line,
                    msg: format!("expected {expected} values, found {}", values.len()),
                });
            }
            // Array data is column-major; symmetric files store the lower
            // triangle of each column.
            let mut data = vec![0.0f64; rows * cols];
            let mut it = values.into_iter();
            if symmetric {
                for j in 0..cols {
                    for i in j..rows {
                        let v = it.next().unwrap();
                        data[i * cols + j] = v;
                        data[j * cols + i] = v;
                    }
                }
                Ok(LoadedMatrix::Symmetric(DenseSymMatrix::new(rows, data)?))
            } else {
                for j in 0..cols {
                    for i in 0..rows {
                        data[i * cols + j] = it.next().unwrap();
                    }
                }
                Ok(LoadedMatrix::General(DenseMatrix::new(rows, cols, data)?))
            }
        }
    }
}

/// Writes a spectrum as `{"values": [...], "vectors": [[...]]}`.
pub fn write_spectrum_json(spectrum: &Spectrum, mut writer: impl Write) -> Result<()> {
    serde_json::to_writer(&mut writer, spectrum)
        .map_err(|e| Error::InvalidConfig(format!("spectrum serialization failed: {e}")))?;
    writer.write_all(b"\n")?;
    Ok(())
}

pub fn save_spectrum_json(spectrum: &Spectrum, path: &Path) -> Result<()> {
    write_spectrum_json(spectrum, File::create(path)?)
}
