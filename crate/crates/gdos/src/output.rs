//! Curve and table serialization.
//!
//! CSV files start with `# key: value` metadata lines, then a header row.
//! Numbers are written with 17 significant digits.

use std::fmt::Write as _;
use std::path::Path;

use gdos_core::{CurveMeta, DosCurve, Method};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Formats a float with 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T: ToString>(x: Option<T>) -> Option<String> {
    x.map(|v| v.to_string())
}

/// Metadata lines describing a curve, in a fixed order.
pub fn meta_lines(meta: &CurveMeta) -> Vec<(String, String)> {
    let mut out = vec![("method".to_string(), meta.method.name().to_string()), ("n".to_string(), meta.n.to_string())];
    let fields = [
        ("m", opt(meta.m)),
        ("n_vec", opt(meta.n_vec)),
        ("seed", opt(meta.seed)),
        ("sigma", meta.sigma.map(num)),
        ("tau", meta.tau.map(num)),
        ("k1", opt(meta.k1)),
        ("k2", opt(meta.k2)),
    ];
    out.extend(fields.into_iter().filter_map(|(k, v)| v.map(|v| (k.to_string(), v))));
    out
}

/// Writes `# key: value` lines followed by a CSV table.
pub fn csv_table(meta: &[(String, String)], header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = String::new();
    for (k, v) in meta {
        let _ = writeln!(s, "# {k}: {v}");
    }
    let _ = writeln!(s, "{}", header.join(","));
    for r in rows {
        let _ = writeln!(s, "{}", r.join(","));
    }
    s
}

pub fn curve_csv(curve: &DosCurve, extra: &[(String, String)]) -> String {
    let mut meta = meta_lines(curve.meta());
    meta.extend_from_slice(extra);
    let rows: Vec<Vec<String>> = curve.grid().iter().zip(curve.values()).map(|(&t, &p)| vec![num(t), num(p)]).collect();
    csv_table(&meta, &["t", "phi"], &rows)
}

/// Pretty JSON with a trailing newline.
pub fn json_string(v: &impl serde::Serialize) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v).map_err(|e| CliError::Config(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

/// Reads a curve written by [`curve_csv`]. The dimension `n` must appear
/// in the metadata since slicing scales counts by it.
pub fn read_curve_csv(path: impl AsRef<Path>) -> Result<DosCurve> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    parse_curve_csv(&text, &path.display().to_string())
}

pub fn parse_curve_csv(text: &str, name: &str) -> Result<DosCurve> {
    let err = |line: usize, msg: String| CliError::Parse { path: name.to_string(), line, msg };
    let mut meta = CurveMeta::new(Method::Lanczos, 0);
    let mut have_n = false;
    let mut header_seen = false;
    let (mut grid, mut values) = (Vec::new(), Vec::new());
    for (i, line) in text.lines().enumerate() {
        let ln = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            let Some((k, v)) = rest.split_once(':') else { continue };
            let v = v.trim();
            let bad = |_: std::num::ParseIntError| err(ln, format!("invalid value for '{}'", k.trim()));
            let badf = |_: std::num::ParseFloatError| err(ln, format!("invalid value for '{}'", k.trim()));
            match k.trim() {
                "n" => {
                    meta.n = v.parse().map_err(bad)?;
                    have_n = true;
                }
                "method" => {
                    meta.method = match v {
                        "kpm" => Method::Kpm,
                        "lanczos" => Method::Lanczos,
                        "exact" => Method::Exact,
                        _ => return Err(err(ln, format!("unknown method '{v}'"))),
                    }
                }
                "m" => meta.m = Some(v.parse().map_err(bad)?),
                "n_vec" => meta.n_vec = Some(v.parse().map_err(bad)?),
                "seed" => meta.seed = Some(v.parse().map_err(bad)?),
                "sigma" => meta.sigma = Some(v.parse().map_err(badf)?),
                "tau" => meta.tau = Some(v.parse().map_err(badf)?),
                "k1" => meta.k1 = Some(v.parse().map_err(bad)?),
                "k2" => meta.k2 = Some(v.parse().map_err(bad)?),
                _ => {}
            }
            continue;
        }
        if !header_seen {
            if line != "t,phi" {
                return Err(err(ln, "expected header 't,phi'".into()));
            }
            header_seen = true;
            continue;
        }
        let (t, p) = line.split_once(',').ok_or_else(|| err(ln, "expected two columns".into()))?;
        grid.push(t.trim().parse().map_err(|_| err(ln, "invalid t".into()))?);
        values.push(p.trim().parse().map_err(|_| err(ln, "invalid phi".into()))?);
    }
    if !have_n {
        return Err(err(1, "missing '# n:' metadata line".into()));
    }
    Ok(DosCurve::new(grid, values, meta)?)
}
