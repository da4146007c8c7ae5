//! Matrix Market coordinate files.
//!
//! Only real (or integer) square matrices in `symmetric` or `general`
//! storage are accepted. Symmetric files are mirrored, duplicates are
//! summed and general files must have symmetric content.

use std::fs;
use std::io::Write;
use std::path::Path;

use gdos_core::CsrMatrix;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

fn perr(path: &str, line: usize, msg: impl Into<String>) -> CliError {
    CliError::Parse { path: path.to_string(), line, msg: msg.into() }
}

pub fn read_matrix_market(path: impl AsRef<Path>) -> Result<CsrMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_matrix_market(&text, &path.display().to_string())
}

/// Parses file contents; `name` is used in error messages.
pub fn parse_matrix_market(text: &str, name: &str) -> Result<CsrMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (hline, header) = lines.next().ok_or_else(|| perr(name, 1, "empty file"))?;
    let symmetry = parse_header(header).map_err(|m| perr(name, hline, m))?;

    let mut size = None;
    let mut triplets = Vec::new();
    let mut declared = 0usize;
    for (ln, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let mut it = line.split_whitespace();
        match size {
            None => {
                let mut field = |what: &str| -> Result<usize> {
                    it.next()
                        .ok_or_else(|| perr(name, ln, format!("missing {what} in size line")))?
                        .parse()
                        .map_err(|_| perr(name, ln, format!("invalid {what} in size line")))
                };
                let (r, c, nnz) = (field("row count")?, field("column count")?, field("entry count")?);
                if r != c {
                    return Err(perr(name, ln, format!("matrix is not square ({r} x {c})")));
                }
                size = Some(r);
                declared = nnz;
                triplets.reserve(if symmetry == Symmetry::Symmetric { 2 * nnz } else { nnz });
            }
            Some(n) => {
                let idx = |s: Option<&str>, what: &str| -> Result<usize> {
                    let v: usize = s
                        .ok_or_else(|| perr(name, ln, format!("missing {what} index")))?
                        .parse()
                        .map_err(|_| perr(name, ln, format!("invalid {what} index")))?;
                    if v == 0 || v > n {
                        return Err(perr(name, ln, format!("{what} index {v} out of range 1..={n}")));
                    }
                    Ok(v - 1)
                };
                let i = idx(it.next(), "row")?;
                let j = idx(it.next(), "column")?;
                let v: f64 = it
                    .next()
                    .ok_or_else(|| perr(name, ln, "missing value"))?
                    .parse()
                    .map_err(|_| perr(name, ln, "invalid value"))?;
                if !v.is_finite() {
                    return Err(perr(name, ln, "value is not finite"));
                }
                if it.next().is_some() {
                    return Err(perr(name, ln, "trailing fields after value"));
                }
                triplets.push((i, j, v));
                if symmetry == Symmetry::Symmetric && i != j {
                    triplets.push((j, i, v));
                }
            }
        }
    }
    let n = size.ok_or_else(|| perr(name, hline, "missing size line"))?;
    // mirrored entries come in pairs
    let stored = if symmetry == Symmetry::Symmetric {
        triplets.len() - triplets.iter().filter(|(i, j, _)| i != j).count() / 2
    } else {
        triplets.len()
    };
    if stored != declared {
        return Err(perr(name, hline, format!("size line declares {declared} entries, found {stored}")));
    }
    let m = CsrMatrix::from_triplets(n, &triplets)?;
    m.validate_symmetric()?;
    Ok(m)
}

fn parse_header(line: &str) -> std::result::Result<Symmetry, String> {
    let f: Vec<String> = line.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if f.len() != 5 || f[0] != "%%matrixmarket" || f[1] != "matrix" {
        return Err("not a Matrix Market matrix header".into());
    }
    if f[2] != "coordinate" {
        return Err(format!("unsupported format '{}', expected coordinate", f[2]));
    }
    match f[3].as_str() {
        "real" | "integer" | "double" => {}
        other => return Err(format!("unsupported field '{other}', only real matrices are accepted")),
    }
    match f[4].as_str() {
        "symmetric" => Ok(Symmetry::Symmetric),
        "general" => Ok(Symmetry::General),
        other => Err(format!("unsupported symmetry '{other}'")),
    }
}

/// Writes `m` in symmetric storage (lower triangle), values with 17
/// significant digits so that a read reproduces them exactly.
pub fn write_matrix_market(path: impl AsRef<Path>, m: &CsrMatrix) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    to_writer(&mut out, m).map_err(|e| CliError::io(path, e))?;
    fs::write(path, out).map_err(|e| CliError::io(path, e))
}

pub fn to_writer(w: &mut impl Write, m: &CsrMatrix) -> std::io::Result<()> {
    let lower: Vec<(usize, usize, f64)> = m.triplets().filter(|&(i, j, _)| i >= j).collect();
    writeln!(w, "%%MatrixMarket matrix coordinate real symmetric")?;
    writeln!(w, "{} {} {}", m.n(), m.n(), lower.len())?;
    for (i, j, v) in lower {
        writeln!(w, "{} {} {:.16e}", i + 1, j + 1, v)?;
    }
    Ok(())
}
