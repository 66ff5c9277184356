//! Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any failure.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lagspec::duistermaat::{
    duistermaat_index, robin_map, verify_identities, verify_krein, verify_one_sided_limits, verify_oracle, VerifyReport,
};
use lagspec::linalg::{from_real_rows, hermitian_part, spectral_norm, ToleranceConfig};
use lagspec::maslov::{find_crossings, hormander_check, verify_hormander};
use lagspec::models::checks::{
    eigenvalue_derivative_check, greens_identity_check, interlacing_check, morse_index, pinned_deviation,
    sharpness_demo, sweep, SweepFamily,
};
use lagspec::models::no_ucp::{no_ucp_check, no_ucp_spectra};
use lagspec::models::spectrum::{eigenvalues, shift_direct_one_sided, sigma_bounds, Extension};
use lagspec::models::{
    bc_catalog, fundamental_solutions, BcName, CauchyDataPath, IntervalProblem, Potential,
};
use lagspec::symplectic::{plane_from_projector_theta, random_hermitian, random_unitary, LagrangianPlane, ProjectorTheta};
use num_complex::Complex64;

type Outcome = Result<(), String>;
type Criterion = (&'static str, fn() -> Outcome);

fn tol() -> ToleranceConfig {
    ToleranceConfig::default()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Outcome {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn line(theta: f64) -> LagrangianPlane {
    LagrangianPlane::graph(&from_real_rows(&[&[theta]]), &tol()).unwrap()
}

fn catalog(name: BcName, s: f64) -> LagrangianPlane {
    bc_catalog(name, s).unwrap()
}

fn ext(p: &IntervalProblem, name: BcName, s: f64) -> Extension {
    Extension::catalog(p.clone(), name, s).unwrap()
}

/// Splits `total` trials as evenly as possible over n = 1..=6.
fn per_dimension(total: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=6).map(move |n| (n, total / 6 + usize::from(n <= total % 6)))
}

fn clean(reports: impl Iterator<Item = (usize, VerifyReport)>) -> Outcome {
    let mut bad = Vec::new();
    for (n, r) in reports {
        if !r.is_clean() {
            bad.push(format!("n={n}: {} failures", r.total_failures()));
        }
    }
    ensure(bad.is_empty(), || bad.join("; "))
}

fn close_list(got: &[f64], want: &[f64], eps: f64) -> Outcome {
    ensure(got.len() == want.len() && got.iter().zip(want).all(|(g, w)| (g - w).abs() <= eps), || {
        format!("got {got:?}, want {want:?}")
    })
}

/// The three-lines table written out case by case.
fn line_table(t1: f64, t2: f64, t3: f64) -> usize {
    let zero = (t1 <= t2 && t2 <= t3) || (t3 < t1 && t1 <= t2) || (t2 <= t3 && t3 < t1);
    let one = (t1 <= t3 && t3 < t2) || (t2 < t1 && t1 <= t3) || (t3 < t2 && t2 < t1);
    assert!(zero != one, "table cases overlap or miss ({t1}, {t2}, {t3})");
    usize::from(one)
}

fn c1_lines() -> Outcome {
    let triples: [[f64; 3]; 3] = [[-1.0, 0.5, 3.0], [0.0, 1.0, 2.0], [-7.25, -2.0, 11.5]];
    let orderings = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
    for base in triples {
        for ord in orderings {
            let th = [base[ord[0]], base[ord[1]], base[ord[2]]];
            let got = duistermaat_index(&line(th[0]), &line(th[1]), &line(th[2]), &tol()).map_err(err)?;
            let want = line_table(th[0], th[1], th[2]);
            ensure(got == want, || format!("θ = {th:?}: iD = {got}, table = {want}"))?;
        }
    }
    Ok(())
}

fn c2_periodic_robin() -> Outcome {
    let per = catalog(BcName::Periodic, 0.0);
    for eps in [0.25, 1.0 / 16.0] {
        let r = robin_map(&per, eps).map_err(err)?.r;
        let c = 1.0 / (2.0 * eps);
        let want = [[c, -c], [-c, c]];
        for i in 0..2 {
            for j in 0..2 {
                let d = (r[(i, j)] - Complex64::new(want[i][j], 0.0)).norm();
                ensure(d <= 1e-12, || format!("ε = {eps}: entry ({i},{j}) off by {d:e}"))?;
            }
        }
    }
    for (s, want) in [(0.5, (0, 1)), (3.0, (0, 1)), (-0.5, (1, 0)), (-3.0, (1, 0))] {
        let got = sigma_bounds(&per, &catalog(BcName::Delta, s), &tol()).map_err(err)?;
        ensure(got == want, || format!("s = {s}: (σ₋, σ₊) = {got:?}"))?;
    }
    Ok(())
}

fn c3_per_aper() -> Outcome {
    let p = IntervalProblem::free(1.0);
    let (per, aper) = (ext(&p, BcName::Periodic, 0.0), ext(&p, BcName::Antiperiodic, 0.0));
    let r = interlacing_check(&per, &aper, 20, &tol()).map_err(err)?;
    ensure((r.sigma_minus, r.sigma_plus) == (1, 1), || format!("bounds {:?}", (r.sigma_minus, r.sigma_plus)))?;
    ensure(r.passed(), || format!("violations at k = {:?}", r.violations))?;
    // Resolution check against the closed forms (2πk)² and ((2k+1)π)².
    let ev = eigenvalues(&per, -1.0, 450.0, &tol()).map_err(err)?.flattened();
    let want: Vec<f64> = [0.0].into_iter().chain((1..=3).flat_map(|k| [(2.0 * PI * k as f64).powi(2); 2])).collect();
    close_list(&ev, &want, 1e-8)
}

fn c4_aper_delta_prime() -> Outcome {
    let p = IntervalProblem::free(1.0);
    let aper = ext(&p, BcName::Antiperiodic, 0.0);
    for s in [0.5, -0.5, 2.0, -2.0] {
        let dp = ext(&p, BcName::DeltaPrime, s);
        let bounds = sigma_bounds(&aper.plane, &dp.plane, &tol()).map_err(err)?;
        ensure(bounds == (1, 0), || format!("s = {s}: (σ₋, σ₊) = {bounds:?}"))?;
        let r = interlacing_check(&aper, &dp, 15, &tol()).map_err(err)?;
        ensure(r.passed(), || format!("s = {s}: violations at k = {:?}", r.violations))?;
    }
    let grid = [-3.0, -1.0, -0.3, -0.05, 0.0, 0.3, 1.0, 3.0];
    let rows = sweep(&p, SweepFamily::DeltaPrime, &grid, 6, &tol()).map_err(err)?;
    let dev = pinned_deviation(&p, &rows, &tol()).map_err(err)?;
    ensure(dev <= 1e-6, || format!("even branches moved by {dev:e}"))?;
    let l1 = rows[3].eigenvalues[0];
    ensure(l1 < -1e3, || format!("λ₁(-0.05) = {l1}"))
}

fn c5_neumann_dirichlet() -> Outcome {
    let p = IntervalProblem::free(PI);
    let (n, d) = (ext(&p, BcName::Neumann, 0.0), ext(&p, BcName::Dirichlet, 0.0));
    close_list(&eigenvalues(&n, -0.5, 20.0, &tol()).map_err(err)?.flattened(), &[0.0, 1.0, 4.0, 9.0, 16.0], 1e-8)?;
    close_list(&eigenvalues(&d, -0.5, 20.0, &tol()).map_err(err)?.flattened(), &[1.0, 4.0, 9.0, 16.0], 1e-8)?;
    let bounds = sigma_bounds(&n.plane, &d.plane, &tol()).map_err(err)?;
    ensure(bounds == (0, 2), || format!("(σ₋, σ₊) = {bounds:?}"))?;
    let mut seen = Vec::new();
    for i in 0..=82 {
        let lambda = -0.5 + 0.25 * i as f64;
        let (left, right) = shift_direct_one_sided(&n, &d, lambda, &tol()).map_err(err)?;
        seen.extend([left, right]);
    }
    ensure(seen.iter().all(|v| *v == 0 || *v == 1), || format!("shift values {seen:?}"))?;
    let max = *seen.iter().max().unwrap();
    ensure(max < 2, || "upper bound σ₊ = 2 was attained".into())
}

fn c6_no_ucp() -> Outcome {
    let (hf, h1) = no_ucp_spectra(0.5, 37.0, &tol()).map_err(err)?;
    let want_hf: Vec<f64> = (1..=6).flat_map(|k| [(k * k) as f64; 2]).collect();
    close_list(&hf, &want_hf, 1e-8)?;
    let want_h1: Vec<f64> = (2..=12).map(|k| (k as f64 / 2.0).powi(2)).collect();
    close_list(&h1, &want_h1, 1e-8)?;
    let (_, h1_low) = no_ucp_spectra(0.1, 0.5, &tol()).map_err(err)?;
    close_list(&h1_low, &[0.25], 1e-8)?;
    let r = no_ucp_check(0.1, 9.5, &tol()).map_err(err)?;
    ensure(r.count_hf == 6 && r.inner_solutions == 3, || format!("{r:?}"))?;
    ensure(r.count_hf - r.maslov_count_f == r.inner_solutions, || format!("undercount mismatch: {r:?}"))?;
    ensure(r.interval_formula_exact, || format!("interval formula: {r:?}"))
}

fn c7_identities() -> Outcome {
    clean((1..=6).map(|n| (n, verify_identities(n, 1000, 7000 + n as u64, &tol()))))
}

fn c8_oracle() -> Outcome {
    clean(per_dimension(500).map(|(n, t)| (n, verify_oracle(n, t, 8000 + n as u64, &tol()))))
}

fn c9_limits() -> Outcome {
    clean(per_dimension(200).map(|(n, t)| (n, verify_one_sided_limits(n, t, 9000 + n as u64, &tol()))))
}

fn c10_krein() -> Outcome {
    clean(per_dimension(500).map(|(n, t)| (n, verify_krein(n, t, 10_000 + n as u64, &tol()))))
}

fn c11_hormander() -> Outcome {
    clean(per_dimension(200).map(|(n, t)| (n, verify_hormander(n, t, 11_000 + n as u64, &tol()))))?;
    let sampled = Potential::sampled(vec![0.0, 0.4, 1.0], vec![3.0, -2.0, 1.5]).map_err(err)?;
    let problems = [IntervalProblem::free(1.0), IntervalProblem::new(1.0, sampled).map_err(err)?];
    let pairs = [
        (BcName::Periodic, 0.0, BcName::Antiperiodic, 0.0),
        (BcName::Neumann, 0.0, BcName::Dirichlet, 0.0),
        (BcName::Delta, 1.0, BcName::DeltaPrime, 2.0),
        (BcName::Periodic, 0.0, BcName::Delta, -3.0),
        (BcName::Antiperiodic, 0.0, BcName::DeltaPrime, -0.5),
    ];
    for p in &problems {
        let path = CauchyDataPath::new(p, -20.3, 61.7);
        for (n1, s1, n2, s2) in pairs {
            let r = hormander_check(&path, &catalog(n1, s1), &catalog(n2, s2), &tol()).map_err(err)?;
            ensure(r.holds, || format!("{n1:?}({s1}) vs {n2:?}({s2}): {r:?}"))?;
        }
    }
    Ok(())
}

fn random_pt(rng: &mut ChaCha8Rng) -> ProjectorTheta {
    let r = rng.random_range(0..=2);
    let q = random_unitary(2, rng).columns(0, r).into_owned();
    let p = &q * q.adjoint();
    let theta = hermitian_part(&(&p * random_hermitian(2, rng) * Complex64::new(3.0, 0.0) * &p));
    ProjectorTheta { p, theta }
}

fn c12_morse() -> Outcome {
    let p = IntervalProblem::free(1.0);
    let mut planes: Vec<(String, LagrangianPlane)> =
        [-10.0, -1.0, -0.1].iter().map(|&s| (format!("δ({s})"), catalog(BcName::Delta, s))).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for i in 0..20 {
        let pt = random_pt(&mut rng);
        planes.push((format!("random #{i}"), plane_from_projector_theta(&pt, &tol()).map_err(err)?));
    }
    let want_m0 = from_real_rows(&[&[-1.0, 1.0], &[1.0, -1.0]]);
    for (name, plane) in planes {
        let r = morse_index(&Extension::new(p.clone(), plane).map_err(err)?, &tol()).map_err(err)?;
        ensure(r.route_b == Some(r.route_a), || format!("{name}: route A {} vs route B {:?}", r.route_a, r.route_b))?;
        let m0 = r.m0.ok_or("missing M₀")?;
        let d = spectral_norm(&(m0 - &want_m0));
        ensure(d <= 1e-6, || format!("{name}: M₀ off by {d:e}"))?;
    }
    Ok(())
}

fn c13_sharpness() -> Outcome {
    let p = IntervalProblem::free(1.0);
    for (sm, sp) in [(0, 1), (1, 0), (1, 1), (2, 0), (0, 2)] {
        let r = sharpness_demo(&p, sm, sp, &tol()).map_err(err)?;
        ensure(r.attained(), || format!("{r:?}"))?;
    }
    Ok(())
}

fn c14_numerics() -> Outcome {
    let sampled = Potential::sampled(vec![0.0, 0.3, 0.7, 1.0], vec![4.0, -6.0, 2.0, 0.5]).map_err(err)?;
    let p = IntervalProblem::new(1.0, sampled).map_err(err)?;
    for lambda in [-200.0, -5.0, 0.0, 3.7, 40.0, 400.0] {
        let fs = fundamental_solutions(&p, Complex64::new(lambda, 0.0)).map_err(err)?;
        ensure(fs.wronskian_drift <= 1e-8, || format!("λ = {lambda}: drift {:e}", fs.wronskian_drift))?;
    }
    for (l1, l2) in [(-5.0, 30.0), (1.0, 2.0), (-50.0, 200.0)] {
        let res = greens_identity_check(&p, l1, l2, &tol()).map_err(err)?;
        ensure(res <= 1e-6, || format!("Green residual {res:e} at ({l1}, {l2})"))?;
    }
    let path = CauchyDataPath::new(&p, -30.3, 150.9);
    let refs = [
        catalog(BcName::Dirichlet, 0.0),
        catalog(BcName::Neumann, 0.0),
        catalog(BcName::Periodic, 0.0),
        catalog(BcName::DeltaPrime, 1.5),
        LagrangianPlane::vertical(2),
    ];
    let mut located = 0;
    for plane in &refs {
        for c in find_crossings(&path, plane, &tol()).map_err(err)? {
            located += 1;
            ensure(c.form_inertia.is_positive_definite(), || format!("crossing at {}: {:?}", c.t, c.form_inertia))?;
        }
    }
    ensure(located >= 10, || format!("only {located} crossings located"))?;
    for branch in [1, 3] {
        let r = eigenvalue_derivative_check(&IntervalProblem::free(1.0), branch, &[-2.0, -0.7, 0.5, 1.5], &tol())
            .map_err(err)?;
        ensure(r.passed(1e-3), || format!("branch {branch}: max rel error {:e}", r.max_rel_error()))?;
    }
    Ok(())
}

fn main() {
    let criteria: [Criterion; 14] = [
        ("three-line index table", c1_lines),
        ("periodic Robin map and δ bounds", c2_periodic_robin),
        ("periodic vs antiperiodic interlacing", c3_per_aper),
        ("antiperiodic vs δ′ bounds, interlacing and sweep", c4_aper_delta_prime),
        ("Neumann vs Dirichlet spectra and shift", c5_neumann_dirichlet),
        ("no-UCP spectra and counts", c6_no_ucp),
        ("identity suite", c7_identities),
        ("Q-form oracle agreement", c8_oracle),
        ("one-sided limits", c9_limits),
        ("resolvent-difference relation", c10_krein),
        ("Hörmander identity", c11_hormander),
        ("Morse index routes", c12_morse),
        ("sharpness of shift bounds", c13_sharpness),
        ("numerical guards", c14_numerics),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {:2} PASS ({secs:.2}s) {name}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {:2} FAIL ({secs:.2}s) {name}: {msg}", i + 1);
            }
        }
    }
    println!("{} of 14 criteria passed in {:.1}s", 14 - failed, start.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
