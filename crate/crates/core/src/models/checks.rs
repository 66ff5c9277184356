//! End-to-end numerical checks on the interval model.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::interval::{
    bc_catalog, cauchy_data_frame, fundamental_solutions, solution_profile, BcName, CauchyDataPath, IntervalProblem,
    Potential,
};
use super::quadrature::composite_rule;
use super::spectrum::{
    first_eigenvalues, friedrichs_plane, interval_count_difference_predicted, sigma_bounds, Extension, SpectrumCache,
};
use super::ModelError;
use crate::duistermaat::{bl_index, duistermaat_index, run_trials, TrialOutcome, VerifyReport};
use crate::linalg::{c64, spectral_norm, zeros, ComplexMatrix, ToleranceConfig};
use crate::maslov::intersection_coordinates;
use crate::symplectic::{graph_operator, projector_theta_from_plane, random_lagrangian_with, LagrangianPlane};

type Result<T> = std::result::Result<T, ModelError>;

fn slack(l: f64) -> f64 {
    1e-8 * (1.0 + l.abs())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InterlacingReport {
    pub sigma_minus: usize,
    pub sigma_plus: usize,
    pub intersection_dim: usize,
    pub rank_formula_holds: bool,
    pub k_max: usize,
    /// Indices `k` where one of the two inequalities fails.
    pub violations: Vec<usize>,
}

impl InterlacingReport {
    pub fn passed(&self) -> bool {
        self.rank_formula_holds && self.violations.is_empty()
    }
}

/// Checks `λ_{k-σ₋}(H₁) ≤ λ_k(H₂) ≤ λ_{k+σ₊}(H₁)` on given sorted spectra
/// (repeated by multiplicity). `ev1` needs `k_max + σ₊` entries.
pub fn interlacing_from_spectra(
    l1: &LagrangianPlane,
    l2: &LagrangianPlane,
    ev1: &[f64],
    ev2: &[f64],
    k_max: usize,
    tol: &ToleranceConfig,
) -> Result<InterlacingReport> {
    let (sm, sp) = sigma_bounds(l1, l2, tol)?;
    let dim = l1.intersection_dim(l2, tol)?;
    if ev2.len() < k_max || ev1.len() < k_max + sp {
        return Err(ModelError::Unavailable("not enough eigenvalues for the interlacing check".into()));
    }
    let violations = (1..=k_max)
        .filter(|&k| {
            let mid = ev2[k - 1];
            let low_ok = k <= sm || ev1[k - sm - 1] <= mid + slack(mid);
            let high_ok = mid <= ev1[k + sp - 1] + slack(mid);
            !(low_ok && high_ok)
        })
        .collect();
    Ok(InterlacingReport {
        sigma_minus: sm,
        sigma_plus: sp,
        intersection_dim: dim,
        rank_formula_holds: sm + sp == l1.n() - dim,
        k_max,
        violations,
    })
}

pub fn interlacing_check(e1: &Extension, e2: &Extension, k_max: usize, tol: &ToleranceConfig) -> Result<InterlacingReport> {
    if k_max == 0 {
        return Err(ModelError::InvalidProblem("k_max must be at least 1".into()));
    }
    let (_, sp) = sigma_bounds(&e1.plane, &e2.plane, tol)?;
    let ev1 = first_eigenvalues(e1, k_max + sp, tol)?;
    let ev2 = first_eigenvalues(e2, k_max, tol)?;
    interlacing_from_spectra(&e1.plane, &e2.plane, &ev1, &ev2, k_max, tol)
}

/// Negative eigenvalue count by scanning (route A) and from the
/// Dirichlet-to-Neumann map at `0⁻` (route B).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MorseReport {
    pub route_a: usize,
    pub route_b: Option<usize>,
    #[serde(skip)]
    pub m0: Option<ComplexMatrix>,
    /// Why route B is unavailable, if it is.
    pub note: Option<String>,
}

impl MorseReport {
    pub fn agree(&self) -> bool {
        self.route_b.is_none_or(|b| b == self.route_a)
    }
}

const MORSE_DELTAS: [f64; 2] = [1e-4, 1e-6];

/// `M(0⁻)` by linear extrapolation of the Dirichlet-to-Neumann map from
/// `λ = -δ₁, -δ₂`.
pub fn dtn_at_zero(p: &IntervalProblem, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let [d1, d2] = MORSE_DELTAS;
    let at = |d: f64| -> Result<ComplexMatrix> {
        let m = LagrangianPlane::from_frame(cauchy_data_frame(p, -d)?, tol)?;
        Ok(graph_operator(&m, tol)?)
    };
    let (m1, m2) = (at(d1)?, at(d2)?);
    let m0 = (&m2 * c64(d1, 0.0) - &m1 * c64(d2, 0.0)) / c64(d1 - d2, 0.0);
    if spectral_norm(&(&m0 - &m2)) > 1e-3 * (1.0 + spectral_norm(&m0)) {
        return Err(ModelError::Unavailable("M(0-) is not the graph of an operator".into()));
    }
    Ok(m0)
}

pub fn morse_index(e: &Extension, tol: &ToleranceConfig) -> Result<MorseReport> {
    let route_a = SpectrumCache::new(e, 0.0, tol)?.count_lt(0.0)?;
    match dtn_at_zero(&e.problem, tol) {
        Ok(m0) => {
            let pt = projector_theta_from_plane(&e.plane, tol);
            let b = bl_index(&m0, &pt, tol)?;
            Ok(MorseReport { route_a, route_b: Some(b), m0: Some(m0), note: None })
        }
        Err(ModelError::Unavailable(msg)) => Ok(MorseReport { route_a, route_b: None, m0: None, note: Some(msg) }),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessReport {
    pub lambda0: f64,
    pub target: (usize, usize),
    /// `(iD(L₁, L₂, F), iD(L₂, L₁, F))`.
    pub sigma: (usize, usize),
    /// `(σ(λ₀ - 0), σ(λ₀ + 0))` from eigenvalue counts.
    pub shift: (i64, i64),
}

impl SharpnessReport {
    pub fn attained(&self) -> bool {
        self.sigma == self.target && self.shift == (-(self.target.0 as i64), self.target.1 as i64)
    }
}

fn coordinate_projector(n: usize, idx: impl Iterator<Item = usize>) -> ComplexMatrix {
    let mut p = zeros(n, n);
    for i in idx {
        p[(i, i)] = c64(1.0, 0.0);
    }
    p
}

/// Builds `L₁ = M(λ₀)` and `L₂ = graph(M₀ - P₋ + P₊)` and measures the
/// one-sided shifts at `λ₀`.
pub fn sharpness_demo(p: &IntervalProblem, sigma_minus: usize, sigma_plus: usize, tol: &ToleranceConfig) -> Result<SharpnessReport> {
    let n = p.n();
    if sigma_minus + sigma_plus > n {
        return Err(ModelError::InvalidProblem(format!("σ₋ + σ₊ must not exceed {n}")));
    }
    let base = p.potential().lower_bound() + 5.0 / (p.length() * p.length());
    let vertical = LagrangianPlane::vertical(n);
    for attempt in 0..8 {
        let lambda0 = base + 0.37 * attempt as f64;
        let m = LagrangianPlane::from_frame(cauchy_data_frame(p, lambda0)?, tol)?;
        if m.intersection_dim(&vertical, tol)? != 0 {
            continue;
        }
        let m0 = graph_operator(&m, tol)?;
        let pm = coordinate_projector(n, 0..sigma_minus);
        let pp = coordinate_projector(n, n - sigma_plus..n);
        let l2 = LagrangianPlane::graph(&(&m0 - pm + pp), tol)?;
        let e1 = Extension::new(p.clone(), m)?;
        let e2 = Extension::new(p.clone(), l2)?;
        let sigma = sigma_bounds(&e1.plane, &e2.plane, tol)?;
        let c1 = SpectrumCache::new(&e1, lambda0 + 1.0, tol)?;
        let c2 = SpectrumCache::new(&e2, lambda0 + 1.0, tol)?;
        let left = c1.count_lt(lambda0)? as i64 - c2.count_lt(lambda0)? as i64;
        let right = c1.count_le(lambda0)? as i64 - c2.count_le(lambda0)? as i64;
        return Ok(SharpnessReport { lambda0, target: (sigma_minus, sigma_plus), sigma, shift: (left, right) });
    }
    Err(ModelError::Unavailable("no λ₀ with M(λ₀) transversal to the Friedrichs plane".into()))
}

fn quadrature_for(p: &IntervalProblem, lambdas: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut breaks = vec![0.0];
    if let Potential::Sampled { x, .. } = p.potential() {
        breaks.extend(x.iter().copied().filter(|&v| v > 0.0 && v < p.length()));
    }
    breaks.push(p.length());
    let q_span = match p.potential() {
        Potential::Sampled { q, .. } => q.iter().fold(0.0f64, |m, v| m.max(v.abs())),
        Potential::Constant(c) => c.abs(),
        Potential::Zero => 0.0,
    };
    let freq = lambdas.iter().fold(q_span, |m, l| m.max(l.abs() + q_span)).sqrt();
    let panels = ((freq * p.length()).ceil() as usize).clamp(2, 400);
    composite_rule(&breaks, panels, 20)
}

/// `max |(λ₂ - λ₁)⟨f, g⟩ - ω(Γf, Γg)|` over `f, g` in the `{c, s}` bases at
/// `λ₁`, `λ₂`.
pub fn greens_identity_check(p: &IntervalProblem, lambda1: f64, lambda2: f64, _tol: &ToleranceConfig) -> Result<f64> {
    let (nodes, weights) = quadrature_for(p, &[lambda1, lambda2]);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let basis = |lambda: f64| -> Result<Vec<(Vec<Complex64>, [Complex64; 4])>> {
        let fs = fundamental_solutions(p, c64(lambda, 0.0))?;
        let c_vals = solution_profile(p, lambda, one, zero, &nodes)?;
        let s_vals = solution_profile(p, lambda, zero, one, &nodes)?;
        // Traces (f(0), f(ℓ), f'(0), -f'(ℓ)).
        Ok(vec![
            (c_vals.into_iter().map(|v| v.0).collect(), [one, fs.c_l, zero, -fs.cp_l]),
            (s_vals.into_iter().map(|v| v.0).collect(), [zero, fs.s_l, one, -fs.sp_l]),
        ])
    };
    let (b1, b2) = (basis(lambda1)?, basis(lambda2)?);
    let mut worst = 0.0f64;
    for (f, tf) in &b1 {
        for (g, tg) in &b2 {
            let inner: Complex64 = f.iter().zip(g).zip(&weights).map(|((a, b), w)| a.conj() * b * *w).sum();
            let lhs = inner * (lambda2 - lambda1);
            let omega = tf[0].conj() * tg[2] + tf[1].conj() * tg[3] - tf[2].conj() * tg[0] - tf[3].conj() * tg[1];
            worst = worst.max((lhs - omega).norm());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativePoint {
    pub s: f64,
    pub lambda: f64,
    pub finite_difference: f64,
    pub formula: f64,
    pub rel_error: f64,
    /// Set when the eigenvalue is not simple.
    pub skipped: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeReport {
    pub branch: usize,
    pub points: Vec<DerivativePoint>,
}

impl DerivativeReport {
    pub fn max_rel_error(&self) -> f64 {
        self.points.iter().filter(|p| !p.skipped).map(|p| p.rel_error).fold(0.0, f64::max)
    }

    pub fn passed(&self, bound: f64) -> bool {
        self.max_rel_error() <= bound
    }
}

const HFLS_STEP: f64 = 1e-3;

/// `dλ_k/ds` for the `δ'(s)` family: central difference against
/// `-|f'(0)|² / ‖f‖²`.
pub fn eigenvalue_derivative_check(
    p: &IntervalProblem,
    branch: usize,
    s_values: &[f64],
    tol: &ToleranceConfig,
) -> Result<DerivativeReport> {
    if branch == 0 {
        return Err(ModelError::InvalidProblem("branches are numbered from 1".into()));
    }
    let lam = |s: f64, k: usize| -> Result<Vec<f64>> { first_eigenvalues(&Extension::catalog(p.clone(), BcName::DeltaPrime, s)?, k, tol) };
    let points = s_values
        .par_iter()
        .map(|&s| -> Result<DerivativePoint> {
            let ev = lam(s, branch + 1)?;
            let l = ev[branch - 1];
            let sep = 1e-4 * (1.0 + l.abs());
            let simple = (branch < 2 || l - ev[branch - 2] > sep) && ev[branch] - l > sep;
            if !simple {
                return Ok(DerivativePoint { s, lambda: l, finite_difference: 0.0, formula: 0.0, rel_error: 0.0, skipped: true });
            }
            let fd = (lam(s + HFLS_STEP, branch)?[branch - 1] - lam(s - HFLS_STEP, branch)?[branch - 1]) / (2.0 * HFLS_STEP);
            let plane = bc_catalog(BcName::DeltaPrime, s)?;
            let path = CauchyDataPath::new(p, l - 1.0, l + 1.0);
            let kappa = intersection_coordinates(&path, &plane, l, tol)?;
            let frame = cauchy_data_frame(p, l)?;
            let f0 = (frame.x() * &kappa)[(0, 0)];
            let fp0 = (frame.y() * &kappa)[(0, 0)];
            let (nodes, weights) = quadrature_for(p, &[l]);
            let vals = solution_profile(p, l, f0, fp0, &nodes)?;
            let norm2: f64 = vals.iter().zip(&weights).map(|(v, w)| v.0.norm_sqr() * w).sum();
            let formula = -fp0.norm_sqr() / norm2;
            let rel_error = (fd - formula).abs() / formula.abs().max(1.0);
            Ok(DerivativePoint { s, lambda: l, finite_difference: fd, formula, rel_error, skipped: false })
        })
        .collect::<Result<_>>()?;
    Ok(DerivativeReport { branch, points })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepFamily {
    Delta,
    DeltaPrime,
}

impl std::str::FromStr for SweepFamily {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        match s.parse::<BcName>()? {
            BcName::Delta => Ok(Self::Delta),
            BcName::DeltaPrime => Ok(Self::DeltaPrime),
            other => Err(ModelError::InvalidProblem(format!("{other:?} is not a one-parameter family"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub s: f64,
    pub eigenvalues: Vec<f64>,
}

/// The first `k_max` eigenvalues along `s_grid`.
pub fn sweep(p: &IntervalProblem, family: SweepFamily, s_grid: &[f64], k_max: usize, tol: &ToleranceConfig) -> Result<Vec<SweepRow>> {
    let name = match family {
        SweepFamily::Delta => BcName::Delta,
        SweepFamily::DeltaPrime => BcName::DeltaPrime,
    };
    s_grid
        .par_iter()
        .map(|&s| {
            let e = Extension::catalog(p.clone(), name, s)?;
            Ok(SweepRow { s, eigenvalues: first_eigenvalues(&e, k_max, tol)? })
        })
        .collect()
}

/// CSV with header `s,lambda_1,...,lambda_k`.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let k = rows.first().map_or(0, |r| r.eigenvalues.len());
    let mut w = csv::Writer::from_writer(Vec::new());
    let header: Vec<String> = std::iter::once("s".to_string()).chain((1..=k).map(|i| format!("lambda_{i}"))).collect();
    w.write_record(&header).expect("in-memory write");
    for r in rows {
        let rec: Vec<String> = std::iter::once(r.s).chain(r.eigenvalues.iter().copied()).map(|v| v.to_string()).collect();
        w.write_record(&rec).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

/// `max |λ_{2k}(δ'(s)) - λ_{2k}(aper)|` over the sweep.
pub fn pinned_deviation(p: &IntervalProblem, rows: &[SweepRow], tol: &ToleranceConfig) -> Result<f64> {
    let k = rows.iter().map(|r| r.eigenvalues.len()).max().unwrap_or(0);
    let aper = first_eigenvalues(&Extension::catalog(p.clone(), BcName::Antiperiodic, 0.0)?, k, tol)?;
    Ok(rows
        .iter()
        .flat_map(|r| r.eigenvalues.iter().enumerate().skip(1).step_by(2).map(|(i, l)| (l - aper[i]).abs()))
        .fold(0.0, f64::max))
}

pub const MODEL_CHECKS: [&str; 4] = ["shift_agreement", "interval_formula", "interlacing", "rank_formula"];

fn random_potential<R: Rng>(rng: &mut R) -> Potential {
    if rng.random_bool(0.5) {
        return Potential::Zero;
    }
    let x: Vec<f64> = (0..=5).map(|i| i as f64 / 5.0).collect();
    let q = x.iter().map(|_| rng.random_range(-5.0..5.0)).collect();
    Potential::sampled(x, q).expect("valid samples")
}

fn random_boundary_plane<R: Rng>(rng: &mut R) -> Result<LagrangianPlane> {
    let catalog = [BcName::Periodic, BcName::Antiperiodic, BcName::Delta, BcName::DeltaPrime, BcName::Dirichlet, BcName::Neumann];
    if rng.random_bool(0.3) {
        return Ok(random_lagrangian_with(2, rng));
    }
    let name = catalog[rng.random_range(0..catalog.len())];
    let s = rng.random_range(-3.0..3.0);
    bc_catalog(name, s)
}

const MODEL_UPPER: f64 = 250.0;
const MODEL_K: usize = 3;

fn model_trial(seed: u64, tol: &ToleranceConfig, shifts_per_trial: usize) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = IntervalProblem::new(1.0, random_potential(&mut rng))?;
    let e1 = Extension::new(p.clone(), random_boundary_plane(&mut rng)?)?;
    let e2 = Extension::new(p.clone(), random_boundary_plane(&mut rng)?)?;
    let c1 = SpectrumCache::new(&e1, MODEL_UPPER, tol)?;
    let c2 = SpectrumCache::new(&e2, MODEL_UPPER, tol)?;
    let f = friedrichs_plane();
    let id_f = duistermaat_index(&e1.plane, &e2.plane, &f, tol)? as i64;
    let lo = c1.lower.min(c2.lower);

    let mut shifts_ok = true;
    for _ in 0..shifts_per_trial {
        let lambda = rng.random_range(lo..MODEL_UPPER - 1.0);
        let m = LagrangianPlane::from_frame(cauchy_data_frame(&p, lambda)?, tol)?;
        let predicted = duistermaat_index(&e1.plane, &e2.plane, &m, tol)? as i64 - id_f;
        let direct = c1.count_le(lambda)? as i64 - c2.count_le(lambda)? as i64;
        shifts_ok &= predicted == direct;
    }

    let a = rng.random_range(lo..MODEL_UPPER / 2.0);
    let b = rng.random_range(a..MODEL_UPPER - 1.0);
    let direct = c1.slice.count_in(a, b) as i64 - c2.slice.count_in(a, b) as i64;
    let interval_ok = interval_count_difference_predicted(&e1, &e2, a, b, tol)? == direct;

    let (ev1, ev2) = (c1.slice.flattened(), c2.slice.flattened());
    let (_, sp) = sigma_bounds(&e1.plane, &e2.plane, tol)?;
    let k = MODEL_K.min(ev2.len()).min(ev1.len().saturating_sub(sp));
    let (interlacing_ok, rank_ok) = if k == 0 {
        (false, false)
    } else {
        let r = interlacing_from_spectra(&e1.plane, &e2.plane, &ev1, &ev2, k, tol)?;
        (r.violations.is_empty(), r.rank_formula_holds)
    };
    Ok(vec![
        ("shift_agreement", shifts_ok),
        ("interval_formula", interval_ok),
        ("interlacing", interlacing_ok),
        ("rank_formula", rank_ok),
    ])
}

/// Randomized check of the shift formula, the interval count formula and
/// eigenvalue interlacing on random potentials and boundary planes.
pub fn verify_models(trials: usize, seed: u64, tol: &ToleranceConfig) -> VerifyReport {
    verify_models_with(trials, seed, 5, tol)
}

pub fn verify_models_with(trials: usize, seed: u64, shifts_per_trial: usize, tol: &ToleranceConfig) -> VerifyReport {
    run_trials(&MODEL_CHECKS, trials, seed, tol, |s, t| model_trial(s, t, shifts_per_trial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real_rows;
    use std::f64::consts::PI;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn free(l: f64, name: BcName, s: f64) -> Extension {
        Extension::catalog(IntervalProblem::free(l), name, s).unwrap()
    }

    #[test]
    fn per_delta_bounds() {
        let per = free(1.0, BcName::Periodic, 0.0);
        for (s, want) in [(0.5, (0, 1)), (3.0, (0, 1)), (-0.5, (1, 0)), (-3.0, (1, 0))] {
            let r = interlacing_check(&per, &free(1.0, BcName::Delta, s), 6, &tol()).unwrap();
            assert_eq!((r.sigma_minus, r.sigma_plus), want, "s = {s}");
            assert!(r.passed(), "{r:?}");
        }
    }

    #[test]
    fn per_aper_interlacing() {
        let r = interlacing_check(&free(1.0, BcName::Periodic, 0.0), &free(1.0, BcName::Antiperiodic, 0.0), 8, &tol()).unwrap();
        assert_eq!((r.sigma_minus, r.sigma_plus), (1, 1));
        assert!(r.passed(), "{r:?}");
    }

    #[test]
    fn morse_routes() {
        let m0 = dtn_at_zero(&IntervalProblem::free(1.0), &tol()).unwrap();
        assert!(spectral_norm(&(m0 - from_real_rows(&[&[-1.0, 1.0], &[1.0, -1.0]]))) < 1e-6);
        let d = morse_index(&free(1.0, BcName::Dirichlet, 0.0), &tol()).unwrap();
        assert_eq!((d.route_a, d.route_b), (0, Some(0)));
        for s in [-1.0, -10.0] {
            let r = morse_index(&free(1.0, BcName::Delta, s), &tol()).unwrap();
            assert_eq!(r.route_a, 1);
            assert!(r.agree(), "{r:?}");
        }
        // q = -1 on (0, π): 0 is a Dirichlet eigenvalue and M(0-) is multivalued.
        let p = IntervalProblem::new(PI, Potential::Constant(-1.0)).unwrap();
        let r = morse_index(&Extension::catalog(p, BcName::Neumann, 0.0).unwrap(), &tol()).unwrap();
        assert!(r.route_b.is_none() && r.route_a == 1, "{r:?}");
    }

    #[test]
    fn sharpness() {
        let p = IntervalProblem::free(1.0);
        for (sm, sp) in [(0, 0), (1, 1), (2, 0), (0, 1)] {
            let r = sharpness_demo(&p, sm, sp, &tol()).unwrap();
            assert!(r.attained(), "{r:?}");
        }
    }

    #[test]
    fn greens_identity() {
        let p = IntervalProblem::free(1.0);
        assert!(greens_identity_check(&p, 1.0, 4.0, &tol()).unwrap() <= 1e-8);
        assert!(greens_identity_check(&p, 3.0, 3.0, &tol()).unwrap() <= 1e-10);
        let ps = IntervalProblem::new(1.0, Potential::sampled(vec![0.0, 0.5, 1.0], vec![2.0, -3.0, 1.0]).unwrap()).unwrap();
        assert!(greens_identity_check(&ps, -5.0, 30.0, &tol()).unwrap() <= 1e-6);
    }

    #[test]
    fn hfls_second_branch_is_flat() {
        let r = eigenvalue_derivative_check(&IntervalProblem::free(1.0), 2, &[1.0], &tol()).unwrap();
        let pt = &r.points[0];
        assert!(!pt.skipped);
        assert!((pt.lambda - PI * PI).abs() < 1e-6);
        assert!(pt.formula.abs() < 1e-8 && pt.finite_difference.abs() < 1e-6);
    }

    #[test]
    fn hfls_first_branch() {
        let r = eigenvalue_derivative_check(&IntervalProblem::free(1.0), 1, &[0.5, 1.5], &tol()).unwrap();
        assert!(r.points.iter().all(|p| !p.skipped));
        assert!(r.passed(1e-3), "{r:?}");
        assert!(r.points.iter().all(|p| p.formula < 0.0));
    }

    #[test]
    fn sweep_pins_even_branches() {
        let p = IntervalProblem::free(1.0);
        let rows = sweep(&p, SweepFamily::DeltaPrime, &[-1.0, 0.0, 1.0], 4, &tol()).unwrap();
        assert!(pinned_deviation(&p, &rows, &tol()).unwrap() < 1e-6);
        let zero_row = &rows[1].eigenvalues;
        assert!((zero_row[0] - PI * PI).abs() < 1e-6 && (zero_row[2] - 9.0 * PI * PI).abs() < 1e-6);
        let csv = sweep_csv(&rows);
        assert!(csv.starts_with("s,lambda_1,lambda_2,lambda_3,lambda_4\n"));
        assert_eq!(csv.lines().count(), 4);
    }

    #[test]
    fn models_suite_small() {
        let r = verify_models_with(4, 7, 3, &tol());
        assert!(r.is_clean(), "{r:?}");
    }
}
