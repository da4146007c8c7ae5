//! The five subcommands. Each returns its rendered output; the binary
//! decides where it goes.

use std::path::PathBuf;

use gdos_core::bounds::{pencil_bounds, DEFAULT_STEPS};
use gdos_core::cheb::{bernstein_bound, cheb_coeffs, cheb_fit, grid_size_for, sup_error_rel};
use gdos_core::dos::{
    exact_dos, l1_error, midpoint_grid, sigma_heuristic, slice_spectrum, uniform_grid, DEFAULT_SLICE_GRID,
};
use gdos_core::kpm::kpm_eval_masked;
use gdos_core::oracle::{dense_pencil_eigs, DenseSym, ORACLE_LIMIT};
use gdos_core::sparse::ApproxOptions;
use gdos_core::{ChebInterval, DosCurve, FnKind, Pencil, SpectrumBounds};
use serde_json::json;

use crate::error::{CliError, Result};
use crate::output::{self, csv_table, num, Format};
use crate::{mtx, parallel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    Bounds,
    Dos,
    Slice,
    Compare,
    Chebtest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Estimator {
    Kpm,
    Lanczos,
}

/// Everything a run depends on. Two runs with equal configs produce
/// byte-identical output, whatever the thread count.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub matrix_a: Option<PathBuf>,
    /// `None` selects the standard problem `B = I`.
    pub matrix_b: Option<PathBuf>,
    pub method: Estimator,
    pub m: usize,
    pub n_vec: usize,
    pub tau: f64,
    /// Smoothing width; defaults to the heuristic on the estimated bounds.
    pub sigma: Option<f64>,
    pub grid: usize,
    pub interval: Option<(f64, f64)>,
    pub slices: usize,
    pub seed: u64,
    /// Worker count; `None` uses every core.
    pub threads: Option<usize>,
    pub scale: bool,
    pub oracle: bool,
    pub format: Format,
    /// Lanczos/KPM steps compared by `compare`.
    pub ladder: Vec<usize>,
    /// Degrees tabulated by `chebtest`.
    pub degrees: Vec<usize>,
    /// `chebtest` on the constant function instead of `1/λ`, `1/√λ`.
    pub constant: bool,
    /// Saved curve for `slice`, instead of running Lanczos.
    pub curve: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            matrix_a: None,
            matrix_b: None,
            method: Estimator::Lanczos,
            m: 30,
            n_vec: 50,
            tau: 1e-3,
            sigma: None,
            grid: 1000,
            interval: None,
            slices: 5,
            seed: 0,
            threads: None,
            scale: true,
            oracle: false,
            format: Format::Csv,
            ladder: vec![20, 30, 40, 50, 60],
            degrees: vec![6, 8, 10, 12],
            constant: false,
            curve: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.m == 0 {
            return bad("-m must be at least 1".into());
        }
        if self.n_vec == 0 {
            return bad("--nvec must be at least 1".into());
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return bad(format!("--tau must lie in (0, 1), got {}", self.tau));
        }
        if self.slices == 0 {
            return bad("--slices must be at least 1".into());
        }
        if self.grid < 2 {
            return bad("--grid must be at least 2".into());
        }
        if self.threads == Some(0) {
            return bad("--threads must be at least 1".into());
        }
        if let Some(s) = self.sigma {
            if !(s > 0.0 && s.is_finite()) {
                return bad(format!("--sigma must be positive, got {s}"));
            }
        }
        if let Some((lo, hi)) = self.interval {
            if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                return bad(format!("--interval needs LO < HI, got {lo},{hi}"));
            }
        }
        if self.ladder.is_empty() || self.ladder.contains(&0) {
            return bad("--ladder needs positive step counts".into());
        }
        if self.degrees.is_empty() {
            return bad("--degrees needs at least one degree".into());
        }
        let needs_matrix = match self.command {
            Command::Chebtest => false,
            Command::Slice => self.curve.is_none(),
            _ => true,
        };
        if needs_matrix && self.matrix_a.is_none() {
            return bad("--matrix-a is required".into());
        }
        if self.command == Command::Chebtest && self.interval.is_none() {
            return bad("chebtest needs --interval LO,HI".into());
        }
        Ok(())
    }
}

/// Rendered output plus diagnostics meant for stderr.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: String,
    pub notes: Vec<String>,
}

/// Validates `cfg` and runs its command on a pool of `cfg.threads` workers.
pub fn run(cfg: &RunConfig) -> Result<Report> {
    cfg.validate()?;
    parallel::with_threads(cfg.threads, || {
        let mut notes = Vec::new();
        let body = match cfg.command {
            Command::Bounds => cmd_bounds(cfg, &mut notes),
            Command::Dos => cmd_dos(cfg, &mut notes),
            Command::Slice => cmd_slice(cfg, &mut notes),
            Command::Compare => cmd_compare(cfg, &mut notes),
            Command::Chebtest => cmd_chebtest(cfg),
        }?;
        Ok(Report { body, notes })
    })?
}

/// Reads, scales and approximates the pencil.
fn load_pencil(cfg: &RunConfig) -> Result<Pencil> {
    let pa = cfg.matrix_a.as_ref().ok_or_else(|| CliError::Config("--matrix-a is required".into()))?;
    let a = mtx::read_matrix_market(pa)?;
    let mut p = match &cfg.matrix_b {
        Some(pb) => Pencil::new(a, mtx::read_matrix_market(pb)?)?,
        None => Pencil::standard(a),
    };
    if cfg.scale {
        p = p.diag_scale()?;
    }
    let opts = ApproxOptions { tau: cfg.tau, seed: cfg.seed, ..ApproxOptions::default() };
    Ok(p.approximate(&opts)?)
}

fn degrees(p: &Pencil) -> (usize, usize) {
    (p.g_approx().map_or(0, |g| g.degree()), p.q_approx().map_or(0, |q| q.degree()))
}

fn estimate_bounds(cfg: &RunConfig, p: &Pencil) -> Result<SpectrumBounds> {
    Ok(pencil_bounds(&p.ops()?, DEFAULT_STEPS, cfg.seed)?)
}

fn exact_eigs(p: &Pencil) -> Result<Vec<f64>> {
    if p.n() > ORACLE_LIMIT {
        return Err(gdos_core::Error::OracleTooLarge { n: p.n(), limit: ORACLE_LIMIT }.into());
    }
    Ok(dense_pencil_eigs(&DenseSym::from_csr(p.a()), &DenseSym::from_csr(p.b()))?)
}

/// Oracle eigenvalues when requested and affordable.
fn oracle_eigs(cfg: &RunConfig, p: &Pencil, notes: &mut Vec<String>) -> Result<Option<Vec<f64>>> {
    if !cfg.oracle {
        return Ok(None);
    }
    if p.n() > ORACLE_LIMIT {
        notes.push(format!("oracle skipped: n = {} exceeds {ORACLE_LIMIT}", p.n()));
        return Ok(None);
    }
    exact_eigs(p).map(Some)
}

fn kv(k: &str, v: impl ToString) -> (String, String) {
    (k.to_string(), v.to_string())
}

fn bounds_lines(b: &SpectrumBounds) -> Vec<(String, String)> {
    vec![kv("bounds_lo", num(b.lo)), kv("bounds_hi", num(b.hi))]
}

fn cmd_bounds(cfg: &RunConfig, notes: &mut Vec<String>) -> Result<String> {
    let p = load_pencil(cfg)?;
    let b = estimate_bounds(cfg, &p)?;
    let (k1, k2) = degrees(&p);
    let iv = p.b_interval().expect("approximated pencil has an interval");
    let exact = oracle_eigs(cfg, &p, notes)?.map(|e| (e[0], e[e.len() - 1]));
    match cfg.format {
        Format::Json => output::json_string(&json!({
            "n": p.n(),
            "scaled": p.is_scaled(),
            "tau": cfg.tau,
            "k1": k1,
            "k2": k2,
            "b_interval": [iv.a(), iv.b()],
            "b_bounds": p.b_bounds(),
            "bounds": b,
            "exact": exact.map(|(lo, hi)| [lo, hi]),
        })),
        Format::Csv => {
            let mut rows = vec![
                vec!["lo".into(), num(b.lo)],
                vec!["hi".into(), num(b.hi)],
                vec!["ritz_lo".into(), num(b.ritz_lo)],
                vec!["ritz_hi".into(), num(b.ritz_hi)],
                vec!["residual_lo".into(), num(b.residual_lo)],
                vec!["residual_hi".into(), num(b.residual_hi)],
                vec!["b_lo".into(), num(iv.a())],
                vec!["b_hi".into(), num(iv.b())],
            ];
            if let Some((lo, hi)) = exact {
                rows.push(vec!["exact_lo".into(), num(lo)]);
                rows.push(vec!["exact_hi".into(), num(hi)]);
            }
            let meta = vec![kv("n", p.n()), kv("scaled", p.is_scaled()), kv("tau", num(cfg.tau)), kv("k1", k1), kv("k2", k2)];
            Ok(csv_table(&meta, &["quantity", "value"], &rows))
        }
    }
}

/// Estimated bounds, smoothing width and output grid of one run.
struct Setup {
    bounds: SpectrumBounds,
    sigma: f64,
    grid: Vec<f64>,
}

/// Runs an estimator with `m` steps on the setup grid.
fn estimate(cfg: &RunConfig, p: &Pencil, method: Estimator, m: usize, s: &Setup, notes: &mut Vec<String>) -> Result<DosCurve> {
    let ops = p.ops()?;
    let mut curve = match method {
        Estimator::Lanczos => parallel::lanczos_dos(&ops, m, cfg.n_vec, cfg.seed, s.sigma, &s.grid)?,
        Estimator::Kpm => {
            let e = parallel::kpm_pencil(&ops, m, cfg.n_vec, cfg.seed, s.bounds)?;
            let (c, excluded) = kpm_eval_masked(&e, &s.grid)?;
            if !excluded.is_empty() {
                notes.push(format!("kpm: {} grid points outside the estimated bounds were set to 0", excluded.len()));
            }
            c
        }
    };
    let (k1, k2) = degrees(p);
    let meta = curve.meta().clone().with_approximants(cfg.tau, k1, k2);
    *curve.meta_mut() = meta;
    Ok(curve)
}

fn cmd_dos(cfg: &RunConfig, notes: &mut Vec<String>) -> Result<String> {
    let p = load_pencil(cfg)?;
    let b = estimate_bounds(cfg, &p)?;
    let (lo, hi) = cfg.interval.unwrap_or((b.lo, b.hi));
    let sigma = cfg.sigma.unwrap_or_else(|| sigma_heuristic(b.lo, b.hi));
    let setup = Setup { bounds: b, sigma, grid: midpoint_grid(lo, hi, cfg.grid) };
    let curve = estimate(cfg, &p, cfg.method, cfg.m, &setup, notes)?;
    let l1 = match oracle_eigs(cfg, &p, notes)? {
        Some(eigs) => Some(l1_error(&curve, &exact_dos(&eigs, sigma, &setup.grid)?)?),
        None => None,
    };
    match cfg.format {
        Format::Json => output::json_string(&json!({
            "meta": curve.meta(),
            "bounds": b,
            "reference_sigma": sigma,
            "l1_error": l1,
            "t": curve.grid(),
            "phi": curve.values(),
        })),
        Format::Csv => {
            let mut extra = bounds_lines(&b);
            extra.push(kv("reference_sigma", num(sigma)));
            if let Some(e) = l1 {
                extra.push(kv("l1_error", num(e)));
            }
            Ok(output::curve_csv(&curve, &extra))
        }
    }
}

fn cmd_slice(cfg: &RunConfig, notes: &mut Vec<String>) -> Result<String> {
    let (curve, eigs, (a, b)) = match &cfg.curve {
        Some(path) => {
            let curve = output::read_curve_csv(path)?;
            let eigs = match (&cfg.matrix_a, cfg.oracle) {
                (Some(_), true) => oracle_eigs(cfg, &load_pencil(cfg)?, notes)?,
                (None, true) => {
                    notes.push("oracle skipped: no matrix given".into());
                    None
                }
                _ => None,
            };
            let span = cfg.interval.unwrap_or((curve.lo(), curve.hi()));
            (curve, eigs, span)
        }
        None => {
            let p = load_pencil(cfg)?;
            let bounds = estimate_bounds(cfg, &p)?;
            let span = cfg.interval.unwrap_or((bounds.lo, bounds.hi));
            let sigma = cfg.sigma.unwrap_or_else(|| sigma_heuristic(bounds.lo, bounds.hi));
            let setup = Setup { bounds, sigma, grid: uniform_grid(span.0, span.1, cfg.grid) };
            let curve = estimate(cfg, &p, Estimator::Lanczos, cfg.m, &setup, notes)?;
            (curve, oracle_eigs(cfg, &p, notes)?, span)
        }
    };
    let big_n = DEFAULT_SLICE_GRID.max(10 * cfg.slices);
    let mut set = slice_spectrum(&curve, a, b, cfg.slices, big_n)?;
    if let Some(e) = &eigs {
        set = set.with_true_counts(e);
    }
    match cfg.format {
        Format::Json => output::json_string(&json!({
            "breakpoints": set.breakpoints,
            "est_counts": set.est_counts,
            "total_est": set.total_est,
            "true_counts": set.true_counts,
            "meta": curve.meta(),
        })),
        Format::Csv => {
            let mut header = vec!["slice", "lo", "hi", "est_count"];
            if set.true_counts.is_some() {
                header.push("true_count");
            }
            let rows: Vec<Vec<String>> = (0..set.n_slices())
                .map(|i| {
                    let mut r = vec![i.to_string(), num(set.breakpoints[i]), num(set.breakpoints[i + 1]), num(set.est_counts[i])];
                    if let Some(tc) = &set.true_counts {
                        r.push(tc[i].to_string());
                    }
                    r
                })
                .collect();
            let mut meta = output::meta_lines(curve.meta());
            meta.push(kv("total_est", num(set.total_est)));
            Ok(csv_table(&meta, &header, &rows))
        }
    }
}

fn cmd_compare(cfg: &RunConfig, notes: &mut Vec<String>) -> Result<String> {
    let p = load_pencil(cfg)?;
    let eigs = exact_eigs(&p)?;
    let b = estimate_bounds(cfg, &p)?;
    let (lo, hi) = cfg.interval.unwrap_or((b.lo, b.hi));
    let sigma = cfg.sigma.unwrap_or_else(|| sigma_heuristic(b.lo, b.hi));
    let setup = Setup { bounds: b, sigma, grid: midpoint_grid(lo, hi, cfg.grid) };
    let exact = exact_dos(&eigs, sigma, &setup.grid)?;
    let mut rows = Vec::with_capacity(cfg.ladder.len());
    for &m in &cfg.ladder {
        let ek = l1_error(&estimate(cfg, &p, Estimator::Kpm, m, &setup, notes)?, &exact)?;
        let el = l1_error(&estimate(cfg, &p, Estimator::Lanczos, m, &setup, notes)?, &exact)?;
        rows.push((m, ek, el));
    }
    let (k1, k2) = degrees(&p);
    match cfg.format {
        Format::Json => output::json_string(&json!({
            "n": p.n(),
            "n_vec": cfg.n_vec,
            "seed": cfg.seed,
            "sigma": sigma,
            "tau": cfg.tau,
            "k1": k1,
            "k2": k2,
            "rows": rows.iter().map(|&(m, k, l)| json!({"m": m, "kpm_error": k, "lanczos_error": l})).collect::<Vec<_>>(),
        })),
        Format::Csv => {
            let meta = vec![
                kv("n", p.n()),
                kv("n_vec", cfg.n_vec),
                kv("seed", cfg.seed),
                kv("sigma", num(sigma)),
                kv("tau", num(cfg.tau)),
                kv("k1", k1),
                kv("k2", k2),
            ];
            let rows: Vec<Vec<String>> = rows.iter().map(|&(m, k, l)| vec![m.to_string(), num(k), num(l)]).collect();
            Ok(csv_table(&meta, &["m", "kpm_error", "lanczos_error"], &rows))
        }
    }
}

/// One `chebtest` row.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct ChebRow {
    pub k: usize,
    pub g_error: f64,
    pub q_error: f64,
    /// Ellipse bounds turned into relative bounds by dividing by `f(b)`.
    pub g_bound_rel: Option<f64>,
    pub q_bound_rel: Option<f64>,
}

/// Relative sup errors of the degree-`k` fits of `1/λ` and `1/√λ`.
pub fn cheb_table(iv: ChebInterval, degrees: &[usize]) -> Result<Vec<ChebRow>> {
    degrees
        .iter()
        .map(|&k| {
            let n_grid = grid_size_for(k);
            let g = cheb_fit(FnKind::Inverse, iv, k)?;
            let q = cheb_fit(FnKind::InverseSqrt, iv, k)?;
            let rel = |kind: FnKind, fb: f64| bernstein_bound(iv, k, kind, None).ok().map(|r| r.bound_sup / fb);
            Ok(ChebRow {
                k,
                g_error: sup_error_rel(&g, |x| 1.0 / x, n_grid)?,
                q_error: sup_error_rel(&q, |x| 1.0 / x.sqrt(), n_grid)?,
                g_bound_rel: rel(FnKind::Inverse, 1.0 / iv.b()),
                q_bound_rel: rel(FnKind::InverseSqrt, 1.0 / iv.b().sqrt()),
            })
        })
        .collect()
}

fn cmd_chebtest(cfg: &RunConfig) -> Result<String> {
    let (a, b) = cfg.interval.ok_or_else(|| CliError::Config("chebtest needs --interval LO,HI".into()))?;
    let iv = ChebInterval::new(a, b)?;
    let meta = vec![kv("interval_lo", num(a)), kv("interval_hi", num(b))];
    if cfg.constant {
        let rows = cfg
            .degrees
            .iter()
            .map(|&k| {
                let e = cheb_coeffs(|_| 1.0, iv, k, FnKind::Custom)?;
                Ok((k, sup_error_rel(&e, |_| 1.0, grid_size_for(k))?))
            })
            .collect::<Result<Vec<_>>>()?;
        return match cfg.format {
            Format::Json => output::json_string(&json!({
                "interval": [a, b],
                "rows": rows.iter().map(|&(k, e)| json!({"k": k, "const_error": e})).collect::<Vec<_>>(),
            })),
            Format::Csv => {
                let rows: Vec<Vec<String>> = rows.iter().map(|&(k, e)| vec![k.to_string(), num(e)]).collect();
                Ok(csv_table(&meta, &["k", "const_error"], &rows))
            }
        };
    }
    let rows = cheb_table(iv, &cfg.degrees)?;
    match cfg.format {
        Format::Json => output::json_string(&json!({ "interval": [a, b], "rows": rows })),
        Format::Csv => {
            let opt = |x: Option<f64>| x.map_or_else(String::new, num);
            let rows: Vec<Vec<String>> = rows
                .iter()
                .map(|r| vec![r.k.to_string(), num(r.g_error), num(r.q_error), opt(r.g_bound_rel), opt(r.q_bound_rel)])
                .collect();
            Ok(csv_table(&meta, &["k", "g_error", "q_error", "g_bound_rel", "q_bound_rel"], &rows))
        }
    }
}
