//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
//! and exits nonzero if any fails.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use gdos::commands::cheb_table;
use gdos::{parallel, Command, Estimator, RunConfig};
use gdos_core::bounds::pencil_bounds;
use gdos_core::cheb::{gauss_chebyshev_integrate, grid_size_for, rho1, sup_error_abs};
use gdos_core::dos::{exact_dos, l1_error, midpoint_grid, sigma_heuristic, slice_spectrum, uniform_grid};
use gdos_core::kpm::kpm_eval_masked;
use gdos_core::lanczos::{combine_rules, lanczos_pencil, lanczos_sample, lanczos_std, QuadratureRule};
use gdos_core::oracle::{dense_pencil_eigs, perturbed_eigs, weyl_bound, DenseSym, ExactPencilOps, StartMode};
use gdos_core::rng::{gaussian_vector, sample_rng};
use gdos_core::sparse::ApproxOptions;
use gdos_core::synth::{self, Cluster};
use gdos_core::{ChebInterval, CurveMeta, Method, Pencil, PencilOps};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rel(got: f64, want: f64) -> f64 {
    (got - want).abs() / want.abs()
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v[v.len() / 2]
}

fn table(lo: f64, hi: f64, ks: &[usize], g_want: &[f64], q_want: &[f64]) -> Outcome {
    let t0 = Instant::now();
    let rows = cheb_table(ChebInterval::new(lo, hi).unwrap(), ks).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let mut worst = 0.0f64;
    let mut misses = Vec::new();
    for (r, (&gw, &qw)) in rows.iter().zip(g_want.iter().zip(q_want)) {
        for (name, got, want) in [("g", r.g_error, gw), ("q", r.q_error, qw)] {
            let d = rel(got, want);
            worst = worst.max(d);
            if d > 0.02 {
                misses.push(format!("{name}@k={}: {got:.4e} vs {want:.2e} ({:.1}%)", r.k, 100.0 * d));
            }
        }
    }
    let detail = format!("worst deviation {:.2}%, {secs:.3} s{}", 100.0 * worst, if misses.is_empty() { String::new() } else { format!("; off: {}", misses.join(", ")) });
    check(misses.is_empty() && secs < 1.0, detail)
}

fn table2() -> Outcome {
    table(
        0.5479,
        2.5,
        &[6, 8, 10, 12],
        &[2.60e-2, 3.36e-4, 4.42e-5, 5.80e-6],
        &[3.73e-4, 4.32e-5, 5.13e-6, 6.19e-7],
    )
}

fn table1() -> Outcome {
    table(
        3.8017e7,
        1.4557e10,
        &[30, 40, 50, 60],
        &[8.62e-1, 3.10e-1, 1.12e-1, 4.01e-2],
        &[1.92e-2, 6.00e-3, 2.00e-3, 6.45e-4],
    )
}

fn rho_values() -> Outcome {
    let r_a = rho1(ChebInterval::new(1.0, 382.91).unwrap());
    let r_b = rho1(ChebInterval::new(1.0, 4.5629).unwrap());
    let ok = (r_a - 1.0750).abs() <= 1e-3 && (r_b - 1.9988).abs() <= 1e-3;
    check(ok, format!("rho1(382.91) = {r_a:.6}, rho1(4.5629) = {r_b:.6}"))
}

/// Dense pencil with uneven scales, well conditioned enough for exact ops.
fn desk_pencil(n: usize, seed: u64) -> (DenseSym, DenseSym) {
    let (a, b) = synth::random_dense_pencil(n, seed);
    (DenseSym::from_csr(&a), DenseSym::from_csr(&b))
}

fn quadrature() -> Outcome {
    // Gauss-Chebyshev on monomial polynomials; exact moments of the weight
    let mut worst_gc = 0.0f64;
    for nu in 1..=16usize {
        for trial in 0..8u64 {
            let deg = 2 * nu - 1;
            let c = gaussian_vector(&mut sample_rng(1000 + trial, nu as u64), deg + 1);
            let mut moment = vec![0.0; deg + 1];
            moment[0] = std::f64::consts::PI;
            for j in 2..=deg {
                moment[j] = moment[j - 2] * (j - 1) as f64 / j as f64;
            }
            let want: f64 = c.iter().zip(&moment).map(|(a, b)| a * b).sum();
            let got = gauss_chebyshev_integrate(|s| c.iter().rev().fold(0.0, |acc, &cj| acc * s + cj), nu);
            worst_gc = worst_gc.max((got - want).abs());
        }
    }
    // Lanczos moments against powers of B^{-1}A in the B-inner product
    let mut worst_lz = 0.0f64;
    let mut worst_w = 0.0f64;
    for (i, (n, m)) in [(40, 5), (80, 10), (120, 15), (60, 12)].into_iter().enumerate() {
        let (a, b) = desk_pencil(n, 70 + i as u64);
        let ops = ExactPencilOps::new(&a, &b, StartMode::Cholesky).unwrap();
        let v = gaussian_vector(&mut sample_rng(5, i as u64), n);
        let (t, _) = lanczos_pencil(&ops, &v, m, false).unwrap();
        let rule = QuadratureRule::from_tridiag(&t).unwrap();
        worst_w = worst_w.max((rule.weight.iter().sum::<f64>() - 1.0).abs());
        let mut w1 = vec![0.0; n];
        ops.start_transform(&v, &mut w1);
        let bw = b.matvec(&w1);
        let nb = w1.iter().zip(&bw).map(|(x, y)| x * y).sum::<f64>().sqrt();
        w1.iter_mut().for_each(|x| *x /= nb);
        let bw1: Vec<f64> = bw.iter().map(|x| x / nb).collect();
        let scale = rule.theta.iter().fold(1.0f64, |acc, x| acc.max(x.abs()));
        let mut x = w1.clone();
        let (mut ax, mut y) = (vec![0.0; n], vec![0.0; n]);
        for p in 0..2 * m {
            let exact: f64 = bw1.iter().zip(&x).map(|(a, b)| a * b).sum();
            let quad = rule.integrate(|th| th.powi(p as i32));
            worst_lz = worst_lz.max((quad - exact).abs() / scale.powi(p as i32));
            ops.apply_a(&x, &mut ax);
            ops.solve_b(&ax, &mut y);
            std::mem::swap(&mut x, &mut y);
        }
    }
    check(
        worst_gc <= 1e-12 && worst_lz <= 1e-8 && worst_w <= 1e-12,
        format!("Gauss-Chebyshev max error {worst_gc:.1e}, Lanczos moment max scaled error {worst_lz:.1e}, |Σa-1| {worst_w:.1e}"),
    )
}

fn equivalence() -> Outcome {
    let mut worst = 0.0f64;
    for (i, n) in [60usize, 95, 130, 165, 200].into_iter().enumerate() {
        let (a, b) = desk_pencil(n, 300 + i as u64);
        let ops = ExactPencilOps::new(&a, &b, StartMode::Cholesky).unwrap();
        let v = gaussian_vector(&mut sample_rng(11, i as u64), n);
        let (tp, _) = lanczos_pencil(&ops, &v, 20, false).unwrap();
        // w₁ = L⁻ᵀv maps to Lᵀw₁ = v in the symmetrized problem
        let ts = lanczos_std(&ops.symmetrized(), &v, 20).unwrap();
        if tp.alpha.len() != ts.alpha.len() || tp.beta.len() != ts.beta.len() {
            return Err(format!("pencil {i}: different step counts"));
        }
        for (x, y) in tp.alpha.iter().zip(&ts.alpha).chain(tp.beta.iter().zip(&ts.beta)) {
            worst = worst.max((x - y).abs());
        }
        worst = worst.max((tp.beta_next - ts.beta_next).abs());
    }
    check(worst <= 1e-8, format!("max |Δα|, |Δβ| = {worst:.1e} over 5 pencils, n = 60..200, m = 20"))
}

/// A clustered test problem with its approximated pencil and the known spectrum.
struct Problem {
    pencil: Pencil,
    eigs: Vec<f64>,
}

fn clustered(n: usize, seed: u64, tau: f64) -> Problem {
    let spec = synth::clustered_spectrum(n, Cluster::default());
    let (a, b, eigs) = synth::congruence_pencil(&spec, seed);
    let pencil = Pencil::new(a, b)
        .unwrap()
        .diag_scale()
        .unwrap()
        .approximate(&ApproxOptions { tau, seed, ..ApproxOptions::default() })
        .unwrap();
    Problem { pencil, eigs }
}

/// Relative L¹ errors of (KPM, Lanczos) at each `m`.
fn dos_errors(p: &Problem, seed: u64, ms: &[usize], n_vec: usize, kpm: bool) -> Vec<(f64, f64)> {
    let ops = p.pencil.ops().unwrap();
    let bounds = pencil_bounds(&ops, 30, seed).unwrap();
    let grid = midpoint_grid(bounds.lo, bounds.hi, 1000);
    let sigma = sigma_heuristic(bounds.lo, bounds.hi);
    let exact = exact_dos(&p.eigs, sigma, &grid).unwrap();
    ms.iter()
        .map(|&m| {
            let el = l1_error(&parallel::lanczos_dos(&ops, m, n_vec, seed, sigma, &grid).unwrap(), &exact).unwrap();
            let ek = if kpm {
                let e = parallel::kpm_pencil(&ops, m, n_vec, seed, bounds).unwrap();
                l1_error(&kpm_eval_masked(&e, &grid).unwrap().0, &exact).unwrap()
            } else {
                f64::NAN
            };
            (ek, el)
        })
        .collect()
}

fn dos_accuracy() -> Outcome {
    let t0 = Instant::now();
    let ms = [20, 30, 40, 50, 60];
    let runs: Vec<Vec<(f64, f64)>> = (1..=3u64).map(|s| dos_errors(&clustered(200, s, 1e-3), s, &ms, 50, true)).collect();
    let secs = t0.elapsed().as_secs_f64();
    let med: Vec<(f64, f64)> = (0..ms.len())
        .map(|j| (median(runs.iter().map(|r| r[j].0).collect()), median(runs.iter().map(|r| r[j].1).collect())))
        .collect();
    let (k30, l30) = med[1];
    let ordered = med.iter().all(|&(k, l)| k > l);
    let table: Vec<String> = ms.iter().zip(&med).map(|(m, (k, l))| format!("m={m}: kpm {k:.4} lanczos {l:.4}")).collect();
    check(
        l30 <= 0.03 && k30 > l30 && ordered && secs < 30.0,
        format!("{}; {secs:.1} s", table.join(", ")),
    )
}

fn tau_ladder() -> Outcome {
    let taus = [1e-1, 1e-2, 1e-3, 1e-4];
    let med: Vec<f64> =
        taus.iter().map(|&tau| median((1..=3u64).map(|s| dos_errors(&clustered(200, s, tau), s, &[30], 50, false)[0].1).collect())).collect();
    let ok = med.windows(2).all(|w| w[1] <= 1.1 * w[0]);
    let detail: Vec<String> = taus.iter().zip(&med).map(|(t, e)| format!("tau={t:.0e}: {e:.4}")).collect();
    check(ok, detail.join(", "))
}

fn slicing() -> Outcome {
    let (a, b, n_s) = (0.2, 0.8, 5);
    let p = clustered(1000, 1, 1e-3);
    let ops = p.pencil.ops().unwrap();
    let bounds = pencil_bounds(&ops, 30, 1).unwrap();
    let sigma = sigma_heuristic(bounds.lo, bounds.hi);
    let curve = parallel::lanczos_dos(&ops, 30, 10, 1, sigma, &uniform_grid(a, b, 1000)).unwrap();
    let set = slice_spectrum(&curve, a, b, n_s, 1000).unwrap().with_true_counts(&p.eigs);
    let counts = set.true_counts.clone().unwrap();
    let ideal = counts.iter().sum::<usize>() as f64 / n_s as f64;
    let worst = counts.iter().map(|&c| (c as f64 - ideal).abs() / ideal).fold(0.0, f64::max);
    check(worst <= 0.25, format!("true counts {counts:?}, ideal {ideal:.1}, worst deviation {:.1}%", 100.0 * worst))
}

fn perturbation() -> Outcome {
    let mut worst_product = 0.0f64;
    let mut worst_surrogate = 0.0f64;
    for (i, n) in [40usize, 50, 60, 70, 80].into_iter().enumerate() {
        let (a, b) = synth::random_dense_pencil(n, 500 + i as u64);
        let scaled = Pencil::new(a, b).unwrap().diag_scale().unwrap();
        let (ad, bd) = (DenseSym::from_csr(scaled.a()), DenseSym::from_csr(scaled.b()));
        for tau in [1e-2, 1e-3, 1e-4] {
            let p = scaled.clone().approximate(&ApproxOptions { tau, seed: i as u64, ..ApproxOptions::default() }).map_err(|e| e.to_string())?;
            let (g, q) = (p.g_approx().unwrap(), p.q_approx().unwrap());
            let tau_abs = sup_error_abs(g, |x| 1.0 / x, grid_size_for(g.degree())).unwrap();
            let bound = weyl_bound(&ad, &bd, tau_abs).map_err(|e| format!("pencil {i}, tau {tau:e}: {e}"))?;
            let pe = perturbed_eigs(&ad, &bd, g, q).unwrap();
            for j in 0..n {
                let bj = bound.per_eigenvalue[j].max(f64::MIN_POSITIVE);
                worst_product = worst_product.max((pe.product[j] - bound.lambda[j]).abs() / bj);
                worst_surrogate = worst_surrogate.max((pe.surrogate[j] - bound.lambda[j]).abs() / (2.0 * bj));
            }
        }
    }
    check(
        worst_product <= 1.0 && worst_surrogate <= 1.0,
        format!("max error/bound: product {worst_product:.3}, surrogate (2x slack) {worst_surrogate:.3}"),
    )
}

fn invariants() -> Outcome {
    let mut fails = Vec::new();
    let mut note = |name: &str, ok: bool| {
        if !ok {
            fails.push(name.to_string());
        }
    };

    // matvec symmetry and linearity
    let m = synth::random_sparse_symmetric(80, 0.1, 3);
    let x = gaussian_vector(&mut sample_rng(1, 0), 80);
    let y = gaussian_vector(&mut sample_rng(1, 1), 80);
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(a, b)| a * b).sum::<f64>();
    let (mx, my) = (m.matvec(&x).unwrap(), m.matvec(&y).unwrap());
    let xy: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 2.5 * a + b).collect();
    let mxy = m.matvec(&xy).unwrap();
    let lin = mxy.iter().zip(mx.iter().zip(&my)).all(|(l, (a, b))| (l - (2.5 * a + b)).abs() <= 1e-12 * (1.0 + l.abs()));
    note("matvec symmetry/linearity", (dot(&x, &my) - dot(&y, &mx)).abs() <= 1e-12 * dot(&x, &x).max(1.0) && lin);

    // diag_scale preserves eigenvalues
    let spec = synth::uniform_spectrum(40, -1.0, 2.0);
    let (a, b, eigs) = synth::congruence_pencil(&spec, 4);
    let s = Pencil::new(a, b).unwrap().diag_scale().unwrap();
    let got = dense_pencil_eigs(&DenseSym::from_csr(s.a()), &DenseSym::from_csr(s.b())).unwrap();
    note("diag_scale eigenvalues", got.iter().zip(&eigs).all(|(g, e)| (g - e).abs() <= 1e-8 * (1.0 + e.abs())));
    note("diag_scale unit diagonal", s.b().diag().iter().all(|&d| d == 1.0));

    // quadrature weights and B-orthogonality with exact B operations
    let (ad, bd) = desk_pencil(100, 9);
    let ops = ExactPencilOps::new(&ad, &bd, StartMode::Cholesky).unwrap();
    let rules: Vec<QuadratureRule> = (0..10).map(|i| lanczos_sample(&ops, 30, 2, i).unwrap()).collect();
    note("weights sum to one", rules.iter().all(|r| (r.weight.iter().sum::<f64>() - 1.0).abs() <= 1e-12));
    let v = gaussian_vector(&mut sample_rng(2, 99), 100);
    let (_, basis) = lanczos_pencil(&ops, &v, 30, true).unwrap();
    let w = basis.unwrap().w;
    let mut orth = 0.0f64;
    for i in 0..w.len() {
        let bwi = bd.matvec(&w[i]);
        for (j, wj) in w.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            orth = orth.max((dot(&bwi, wj) - want).abs());
        }
    }
    note("B-orthogonality", orth <= 1e-8);

    // mass conservation of the smoothed curve on a padded span
    let lam = dense_pencil_eigs(&ad, &bd).unwrap();
    let sigma = sigma_heuristic(lam[0], lam[99]);
    let grid = uniform_grid(lam[0] - 8.0 * sigma, lam[99] + 8.0 * sigma, 4000);
    let curve = combine_rules(&rules, sigma, &grid, CurveMeta::new(Method::Lanczos, 100)).unwrap();
    note("DOS mass conservation", (curve.trapezoid() - 1.0).abs() <= 0.01);

    // slicing depends on mass ratios only
    let c = &curve;
    let (lo, hi) = (lam[0], lam[99]);
    let s1 = slice_spectrum(c, lo, hi, 4, 1000).unwrap();
    let s2 = slice_spectrum(&c.scaled(3.7), lo, hi, 4, 1000).unwrap();
    note("slicing scale invariance", s1.breakpoints == s2.breakpoints);

    // byte-identical output across thread counts
    let dir = tempfile::tempdir().unwrap();
    let spec = synth::clustered_spectrum(120, Cluster::default());
    let (a, b, _) = synth::congruence_pencil(&spec, 8);
    let (pa, pb) = (dir.path().join("a.mtx"), dir.path().join("b.mtx"));
    gdos::mtx::write_matrix_market(&pa, &a).unwrap();
    gdos::mtx::write_matrix_market(&pb, &b).unwrap();
    let mut same = true;
    for (cmd, method) in [(Command::Dos, Estimator::Lanczos), (Command::Dos, Estimator::Kpm), (Command::Slice, Estimator::Lanczos)] {
        let mut cfg = RunConfig::new(cmd);
        cfg.matrix_a = Some(pa.clone());
        cfg.matrix_b = Some(pb.clone());
        cfg.method = method;
        cfg.n_vec = 12;
        let out: Vec<String> = [1, 4, 4]
            .into_iter()
            .map(|t| {
                cfg.threads = Some(t);
                gdos::run(&cfg).unwrap().body
            })
            .collect();
        same &= out[0] == out[1] && out[1] == out[2];
    }
    note("determinism across threads {1, 4}", same);

    check(fails.is_empty(), if fails.is_empty() { "all invariant suites hold".into() } else { format!("failed: {}", fails.join(", ")) })
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("Chebyshev error table on [0.5479, 2.5]", table2),
        ("Chebyshev error table on [3.8017e7, 1.4557e10]", table1),
        ("rho1 values", rho_values),
        ("quadrature exactness", quadrature),
        ("pencil Lanczos equals standard Lanczos", equivalence),
        ("DOS accuracy, Lanczos vs KPM", dos_accuracy),
        ("tau ladder monotonicity", tau_ladder),
        ("slicing balance", slicing),
        ("perturbation bound", perturbation),
        ("invariant suites", invariants),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let t0 = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = t0.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {name}: {d} [{secs:.2} s]"),
            Err(d) => {
                failed += 1;
                println!("FAIL {name}: {d} [{secs:.2} s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
