//! Crossing forms and Maslov indices of Lagrangian paths.
//!
//! Crossings with a fixed reference plane are located by scanning
//! `g(t) = σ_min([Q(t) | Q_ref])`, where `Q(t)` and `Q_ref` are orthonormal
//! bases. `g` vanishes exactly at crossings; the number of singular values
//! near zero is the intersection dimension.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::duistermaat::{
    duistermaat_index, random_configuration, random_map, run_trials, DuistermaatError, TrialOutcome, VerifyReport,
};
use crate::linalg::{
    hcat, hermitian_inertia, hermitian_part, identity, is_finite, singular_values, vcat, zeros,
    ComplexMatrix, Inertia, LinalgError, ToleranceConfig,
};
use crate::symplectic::{random_hermitian, Frame, LagrangianPlane, SymplecticError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MaslovError {
    #[error("ambiguous crossing near t = {t}: sigma = {sigma:e} lies in the unresolved band")]
    UnresolvedCrossing { t: f64, sigma: f64 },
    #[error("path meets the reference on a set with interior near t = {t}")]
    NonIsolated { t: f64 },
    #[error("no intersection with the reference at t = {t}")]
    EmptyIntersection { t: f64 },
    #[error("crossing form at t = {t} is not positive definite: {inertia:?}")]
    MonotonicityViolated { t: f64, inertia: Inertia },
    #[error("degenerate crossing at t = {t}: {inertia:?}")]
    DegenerateCrossing { t: f64, inertia: Inertia },
    #[error("non-finite frame or derivative at t = {t}")]
    NonFinite { t: f64 },
    #[error("invalid path domain [{0}, {1}]")]
    InvalidDomain(f64, f64),
    #[error("path evaluation failed: {0}")]
    Path(String),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Duistermaat(#[from] DuistermaatError),
}

type Result<T> = std::result::Result<T, MaslovError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Increasing,
    Unknown,
}

/// A differentiable path of Lagrangian frames on a closed interval.
///
/// Implementations must be callable from several threads at once.
pub trait PlanePath: Sync {
    fn domain(&self) -> (f64, f64);

    fn frame_at(&self, t: f64) -> Result<Frame>;

    /// `(X'(t), Y'(t))` for the same frame family as `frame_at`.
    fn derivative_at(&self, _t: f64) -> Option<Result<(ComplexMatrix, ComplexMatrix)>> {
        None
    }

    fn monotone_hint(&self) -> Monotonicity {
        Monotonicity::Unknown
    }

    /// Points of the coarse scan, including both endpoints.
    fn scan_grid(&self, steps: usize) -> Vec<f64> {
        let (a, b) = self.domain();
        uniform_grid(a, b, steps)
    }
}

pub fn uniform_grid(a: f64, b: f64, steps: usize) -> Vec<f64> {
    let steps = steps.max(1);
    let mut v: Vec<f64> = (0..=steps).map(|i| a + (b - a) * i as f64 / steps as f64).collect();
    v[steps] = b;
    v
}

type FrameFn = dyn Fn(f64) -> (ComplexMatrix, ComplexMatrix) + Send + Sync;

/// Path given by closures returning `(X(t), Y(t))`.
pub struct FnPath {
    a: f64,
    b: f64,
    frame: Box<FrameFn>,
    derivative: Option<Box<FrameFn>>,
    hint: Monotonicity,
    tol: ToleranceConfig,
}

impl FnPath {
    pub fn new<F>(a: f64, b: f64, frame: F) -> Self
    where
        F: Fn(f64) -> (ComplexMatrix, ComplexMatrix) + Send + Sync + 'static,
    {
        Self { a, b, frame: Box::new(frame), derivative: None, hint: Monotonicity::Unknown, tol: ToleranceConfig::default() }
    }

    pub fn with_derivative<F>(mut self, d: F) -> Self
    where
        F: Fn(f64) -> (ComplexMatrix, ComplexMatrix) + Send + Sync + 'static,
    {
        self.derivative = Some(Box::new(d));
        self
    }

    pub fn increasing(mut self) -> Self {
        self.hint = Monotonicity::Increasing;
        self
    }

    pub fn with_domain(mut self, a: f64, b: f64) -> Self {
        self.a = a;
        self.b = b;
        self
    }
}

impl PlanePath for FnPath {
    fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn frame_at(&self, t: f64) -> Result<Frame> {
        let (x, y) = (self.frame)(t);
        if !is_finite(&x) || !is_finite(&y) {
            return Err(MaslovError::NonFinite { t });
        }
        Ok(Frame::new(x, y, &self.tol)?)
    }

    fn derivative_at(&self, t: f64) -> Option<Result<(ComplexMatrix, ComplexMatrix)>> {
        self.derivative.as_ref().map(|d| Ok(d(t)))
    }

    fn monotone_hint(&self) -> Monotonicity {
        self.hint
    }
}

/// A located crossing with the inertia of its restricted crossing form.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossingReport {
    pub t: f64,
    pub intersection_dim: usize,
    pub form_inertia: Inertia,
}

/// Coarse grid size and the maximal bisection depth used near suspicious cells.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanOptions {
    pub steps: usize,
    pub max_depth: u32,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self { steps: 2000, max_depth: 12 }
    }
}

fn check_domain(path: &dyn PlanePath) -> Result<(f64, f64)> {
    let (a, b) = path.domain();
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(MaslovError::InvalidDomain(a, b));
    }
    Ok((a, b))
}

fn fd_step(t: f64) -> f64 {
    1e-6 * (1.0 + t.abs())
}

fn frame_derivative(path: &dyn PlanePath, t: f64) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if let Some(d) = path.derivative_at(t) {
        let (dx, dy) = d?;
        if !is_finite(&dx) || !is_finite(&dy) {
            return Err(MaslovError::NonFinite { t });
        }
        return Ok((dx, dy));
    }
    let (a, b) = path.domain();
    let h = fd_step(t);
    let at = |s: f64| -> Result<(ComplexMatrix, ComplexMatrix)> {
        let f = path.frame_at(s)?;
        Ok((f.x().clone(), f.y().clone()))
    };
    let (dx, dy) = if t - h >= a && t + h <= b || b - a < 2.0 * h {
        let (xp, yp) = at(t + h)?;
        let (xm, ym) = at(t - h)?;
        let s = 1.0 / (2.0 * h);
        ((xp - xm) * c(s), (yp - ym) * c(s))
    } else {
        // One-sided second-order stencil pointing into the domain.
        let sgn = if t - h < a { 1.0 } else { -1.0 };
        let (x0, y0) = at(t)?;
        let (x1, y1) = at(t + sgn * h)?;
        let (x2, y2) = at(t + sgn * 2.0 * h)?;
        let s = sgn / (2.0 * h);
        ((x1 * c(4.0) - x0 * c(3.0) - x2) * c(s), (y1 * c(4.0) - y0 * c(3.0) - y2) * c(s))
    };
    if !is_finite(&dx) || !is_finite(&dy) {
        return Err(MaslovError::NonFinite { t });
    }
    Ok((dx, dy))
}

fn c(v: f64) -> num_complex::Complex64 {
    num_complex::Complex64::new(v, 0.0)
}

/// Crossing form `X*Y' - Y*X'` in the coordinates of `frame_at(t0)`.
pub fn crossing_form(path: &dyn PlanePath, t0: f64, _tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let f = path.frame_at(t0)?;
    let (dx, dy) = frame_derivative(path, t0)?;
    let q = f.x().adjoint() * dy - f.y().adjoint() * dx;
    Ok(hermitian_part(&q))
}

/// Orthonormal basis `Q` and triangular `R` with `Z = Q R`.
fn thin_qr(z: &ComplexMatrix) -> (ComplexMatrix, ComplexMatrix) {
    let qr = z.clone().qr();
    (qr.q(), qr.r())
}

fn g_value(q: &ComplexMatrix, qref: &ComplexMatrix) -> f64 {
    *singular_values(&hcat(q, qref)).last().unwrap_or(&0.0)
}

/// Intersection of `range(q)` with `range(qref)` as coefficients in `q`,
/// using singular values below `τ`. Fails when a singular value sits in `(τ, 10τ]`.
fn intersection_coefficients(q: &ComplexMatrix, qref: &ComplexMatrix, t: f64, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    let tau = tol.crossing_tol();
    let m = hcat(q, qref);
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V");
    let mut idx: Vec<usize> = (0..svd.singular_values.len()).collect();
    idx.sort_by(|&i, &j| svd.singular_values[i].total_cmp(&svd.singular_values[j]));
    let mut cols = Vec::new();
    for &i in &idx {
        let s = svd.singular_values[i];
        if s <= tau {
            cols.push(v_t.row(i).adjoint().rows(0, q.ncols()).into_owned());
        } else if s <= 10.0 * tau {
            return Err(MaslovError::UnresolvedCrossing { t, sigma: s });
        } else {
            break;
        }
    }
    if cols.is_empty() {
        return Err(MaslovError::EmptyIntersection { t });
    }
    let a = ComplexMatrix::from_columns(&cols.to_vec());
    Ok(a.qr().q())
}

/// Coordinates `κ` (n x d) with `frame_at(t0) κ` an orthonormal basis of
/// `path(t0) ∩ reference`.
pub fn intersection_coordinates(
    path: &dyn PlanePath,
    reference: &LagrangianPlane,
    t0: f64,
    tol: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    let f = path.frame_at(t0)?;
    if f.n() != reference.n() {
        return Err(SymplecticError::DimensionMismatch(format!("path n = {}, reference n = {}", f.n(), reference.n())).into());
    }
    let (q, r) = thin_qr(&f.stacked());
    let a = intersection_coefficients(&q, &reference.stacked(), t0, tol)?;
    Ok(r.try_inverse().ok_or(MaslovError::NonFinite { t: t0 })? * a)
}

/// Crossing form compressed to an orthonormal basis of `path(t0) ∩ reference`.
pub fn restricted_crossing_form(
    path: &dyn PlanePath,
    reference: &LagrangianPlane,
    t0: f64,
    tol: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    let kappa = intersection_coordinates(path, reference, t0, tol)?;
    let form = crossing_form(path, t0, tol)?;
    Ok(hermitian_part(&(kappa.adjoint() * form * kappa)))
}

struct Sample {
    t: f64,
    g: f64,
    p: ComplexMatrix,
}

fn sample(path: &dyn PlanePath, qref: &ComplexMatrix, t: f64) -> Result<Sample> {
    let f = path.frame_at(t)?;
    let (q, _) = thin_qr(&f.stacked());
    let g = g_value(&q, qref);
    Ok(Sample { t, g, p: &q * q.adjoint() })
}

/// Upper bound on `|P_s - P_u|_2`: for equal-rank projectors the difference
/// has eigenvalues `±sin θ_i`, so `|.|_F / √2` dominates the spectral norm.
fn gap(s: &Sample, u: &Sample) -> f64 {
    (&s.p - &u.p).norm() * std::f64::consts::FRAC_1_SQRT_2
}

/// Bisects cells where two nearby zeros of `g` cannot be excluded.
fn refine_cell(path: &dyn PlanePath, qref: &ComplexMatrix, l: Sample, r: &Sample, depth: u32, out: &mut Vec<Sample>) -> Result<()> {
    if depth == 0 || l.g + r.g > 2.0 * gap(&l, r) {
        out.push(l);
        return Ok(());
    }
    let m = sample(path, qref, 0.5 * (l.t + r.t))?;
    let mut left = Vec::new();
    refine_cell(path, qref, l, &m, depth - 1, &mut left)?;
    out.extend(left);
    refine_cell(path, qref, m, r, depth - 1, out)
}

fn golden_min(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..200 {
        if hi - lo <= 1e-12 * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// All crossings of `path` with `reference`, using the default scan.
pub fn find_crossings(path: &dyn PlanePath, reference: &LagrangianPlane, tol: &ToleranceConfig) -> Result<Vec<CrossingReport>> {
    find_crossings_with(path, reference, tol, &ScanOptions::default())
}

pub fn find_crossings_with(
    path: &dyn PlanePath,
    reference: &LagrangianPlane,
    tol: &ToleranceConfig,
    opts: &ScanOptions,
) -> Result<Vec<CrossingReport>> {
    let (a, b) = check_domain(path)?;
    let tau = tol.crossing_tol();
    let qref = reference.stacked();
    let f0 = path.frame_at(a)?;
    if f0.n() != reference.n() {
        return Err(SymplecticError::DimensionMismatch(format!("path n = {}, reference n = {}", f0.n(), reference.n())).into());
    }
    let gv = |t: f64| -> Result<f64> {
        let f = path.frame_at(t)?;
        Ok(g_value(&thin_qr(&f.stacked()).0, &qref))
    };

    let grid = path.scan_grid(opts.steps);
    let coarse: Vec<Sample> = grid.par_iter().map(|&t| sample(path, &qref, t)).collect::<Result<_>>()?;
    // Two adjacent samples on the reference are fine when the grid is merely
    // fine there: a nondegenerate crossing form makes the crossing isolated.
    for w in coarse.windows(2).filter(|w| w[0].g <= tau && w[1].g <= tau) {
        let t = if w[0].g <= w[1].g { w[0].t } else { w[1].t };
        let regular = restricted_crossing_form(path, reference, t, tol)
            .ok()
            .and_then(|form| hermitian_inertia(&form, tol).ok())
            .is_some_and(|i| i.is_nondegenerate());
        if !regular {
            return Err(MaslovError::NonIsolated { t: w[0].t });
        }
    }
    let last = coarse.len() - 1;
    let cells: Vec<Vec<Sample>> = (0..last)
        .into_par_iter()
        .map(|i| {
            let l = Sample { t: coarse[i].t, g: coarse[i].g, p: coarse[i].p.clone() };
            let mut out = Vec::new();
            refine_cell(path, &qref, l, &coarse[i + 1], opts.max_depth, &mut out)?;
            Ok(out)
        })
        .collect::<Result<_>>()?;
    let mut samples: Vec<Sample> = cells.into_iter().flatten().collect();
    samples.push(coarse.into_iter().last().expect("non-empty grid"));

    // Local minima that could dip into the crossing band.
    let k = samples.len();
    let mut brackets = Vec::new();
    for i in 0..k {
        let gl = if i > 0 { samples[i - 1].g } else { f64::INFINITY };
        let gr = if i + 1 < k { samples[i + 1].g } else { f64::INFINITY };
        if samples[i].g > gl || samples[i].g > gr {
            continue;
        }
        let lo = if i > 0 { i - 1 } else { i };
        let hi = if i + 1 < k { i + 1 } else { i };
        let reach = 2.0 * gap(&samples[lo], &samples[i]).max(gap(&samples[i], &samples[hi]));
        if samples[i].g > reach + 10.0 * tau {
            continue;
        }
        brackets.push((samples[lo].t, samples[hi].t));
    }

    let ga = samples[0].g;
    let gb = samples[k - 1].g;
    let minima: Vec<(f64, f64)> = brackets
        .par_iter()
        .map(|&(lo, hi)| {
            let (mut t, mut g) = if hi > lo { golden_min(gv, lo, hi)? } else { (lo, gv(lo)?) };
            if lo == a && ga <= tau && ga <= g.max(tau) {
                t = a;
                g = ga;
            } else if hi == b && gb <= tau && gb <= g.max(tau) {
                t = b;
                g = gb;
            }
            Ok((t, g))
        })
        .collect::<Result<_>>()?;

    let mut found: Vec<(f64, f64)> = Vec::new();
    for (t, g) in minima {
        if g > 10.0 * tau {
            continue;
        }
        if g > tau {
            return Err(MaslovError::UnresolvedCrossing { t, sigma: g });
        }
        match found.iter_mut().find(|(s, _)| (s - t).abs() <= 1e-8 * (1.0 + t.abs())) {
            Some(prev) => {
                if g < prev.1 || t == a || t == b {
                    *prev = (t, g);
                }
            }
            None => found.push((t, g)),
        }
    }
    found.sort_by(|x, y| x.0.total_cmp(&y.0));

    found
        .par_iter()
        .map(|&(t, _)| {
            let form = restricted_crossing_form(path, reference, t, tol)?;
            let form_inertia = hermitian_inertia(&form, tol)?;
            Ok(CrossingReport { t, intersection_dim: form.nrows(), form_inertia })
        })
        .collect()
}

fn require_increasing(crossings: &[CrossingReport]) -> Result<()> {
    match crossings.iter().find(|c| !c.form_inertia.is_positive_definite()) {
        Some(c) => Err(MaslovError::MonotonicityViolated { t: c.t, inertia: c.form_inertia }),
        None => Ok(()),
    }
}

/// Path-first index of an increasing path: `Σ_{t ∈ [a,b)} dim(path(t) ∩ L)`.
pub fn maslov_increasing(path: &dyn PlanePath, reference: &LagrangianPlane, tol: &ToleranceConfig) -> Result<i64> {
    let (_, b) = check_domain(path)?;
    let cr = find_crossings(path, reference, tol)?;
    require_increasing(&cr)?;
    Ok(cr.iter().filter(|c| c.t < b).map(|c| c.intersection_dim as i64).sum())
}

/// Reference-first index of an increasing path: `-Σ_{t ∈ (a,b]} dim(path(t) ∩ L)`.
pub fn maslov_reference_first(path: &dyn PlanePath, reference: &LagrangianPlane, tol: &ToleranceConfig) -> Result<i64> {
    let (a, _) = check_domain(path)?;
    let cr = find_crossings(path, reference, tol)?;
    require_increasing(&cr)?;
    Ok(-cr.iter().filter(|c| c.t > a).map(|c| c.intersection_dim as i64).sum::<i64>())
}

/// Signed count from already located regular crossings on `[a,b]`.
pub fn maslov_from_crossings(crossings: &[CrossingReport], a: f64, b: f64) -> Result<i64> {
    let mut total = 0i64;
    for c in crossings {
        let i = c.form_inertia;
        if i.n_zero > 0 {
            return Err(MaslovError::DegenerateCrossing { t: c.t, inertia: i });
        }
        if c.t == a {
            total += i.n_plus as i64;
        } else if c.t == b {
            total -= i.n_minus as i64;
        } else {
            total += i.n_plus as i64 - i.n_minus as i64;
        }
    }
    Ok(total)
}

/// Path-first index for paths with regular crossings:
/// `n+(m_a) + Σ_{(a,b)} (n+ - n-) - n-(m_b)`.
pub fn maslov_regular(path: &dyn PlanePath, reference: &LagrangianPlane, tol: &ToleranceConfig) -> Result<i64> {
    let (a, b) = check_domain(path)?;
    maslov_from_crossings(&find_crossings(path, reference, tol)?, a, b)
}

fn endpoint_dims(crossings: &[CrossingReport], a: f64, b: f64) -> (i64, i64) {
    let dim_at = |s: f64| crossings.iter().filter(|c| c.t == s).map(|c| c.intersection_dim as i64).sum::<i64>();
    (dim_at(a), dim_at(b))
}

/// Reference-first index for paths with regular crossings, through
/// `Mas(L, M) = -Mas(M, L) + h(a) - h(b)`.
pub fn maslov_reference_first_general(path: &dyn PlanePath, reference: &LagrangianPlane, tol: &ToleranceConfig) -> Result<i64> {
    let (a, b) = check_domain(path)?;
    let cr = find_crossings(path, reference, tol)?;
    let (ha, hb) = endpoint_dims(&cr, a, b);
    Ok(ha - hb - maslov_from_crossings(&cr, a, b)?)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HormanderReport {
    pub crossings_l1: Vec<CrossingReport>,
    pub crossings_l2: Vec<CrossingReport>,
    /// `Mas(L1, path)`, reference first.
    pub mas_l1: i64,
    pub mas_l2: i64,
    pub id_at_a: usize,
    pub id_at_b: usize,
    pub holds: bool,
}

/// Compares `Mas(L2, M) - Mas(L1, M)` with `iD(L1, L2, M(b)) - iD(L1, L2, M(a))`.
pub fn hormander_check(
    path: &dyn PlanePath,
    l1: &LagrangianPlane,
    l2: &LagrangianPlane,
    tol: &ToleranceConfig,
) -> Result<HormanderReport> {
    let (a, b) = check_domain(path)?;
    let crossings_l1 = find_crossings(path, l1, tol)?;
    let crossings_l2 = find_crossings(path, l2, tol)?;
    let reference_first = |cr: &[CrossingReport]| -> Result<i64> {
        let (ha, hb) = endpoint_dims(cr, a, b);
        Ok(ha - hb - maslov_from_crossings(cr, a, b)?)
    };
    let mas_l1 = reference_first(&crossings_l1)?;
    let mas_l2 = reference_first(&crossings_l2)?;
    let ma = LagrangianPlane::from_frame(path.frame_at(a)?, tol)?;
    let mb = LagrangianPlane::from_frame(path.frame_at(b)?, tol)?;
    let id_at_a = duistermaat_index(l1, l2, &ma, tol)?;
    let id_at_b = duistermaat_index(l1, l2, &mb, tol)?;
    let holds = mas_l2 - mas_l1 == id_at_b as i64 - id_at_a as i64;
    Ok(HormanderReport { crossings_l1, crossings_l2, mas_l1, mas_l2, id_at_a, id_at_b, holds })
}

pub const HORMANDER_CHECKS: [&str; 2] = ["zwz_identity", "increasing_forms"];

/// ZWZ identity on random increasing paths `G graph(M0 + tI)`, `t ∈ [-2, 2]`,
/// against pairs of random reference planes with controlled intersections.
pub fn verify_hormander(n: usize, trials: usize, seed: u64, tol: &ToleranceConfig) -> VerifyReport {
    run_trials(&HORMANDER_CHECKS, trials, seed, tol, |s, t| -> Result<TrialOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let m0 = random_hermitian(n, &mut rng);
        let g = random_map(n, &mut rng);
        let refs = random_configuration(n, 2, &mut rng);
        let (g1, g2) = (g.clone(), g.clone());
        let path = FnPath::new(-2.0, 2.0, move |t| {
            let z = &g1 * vcat(&identity(n), &(&m0 + identity(n) * c(t)));
            (z.rows(0, n).into_owned(), z.rows(n, n).into_owned())
        })
        .with_derivative(move |_| {
            let z = &g2 * vcat(&zeros(n, n), &identity(n));
            (z.rows(0, n).into_owned(), z.rows(n, n).into_owned())
        })
        .increasing();
        let rep = hormander_check(&path, &refs[0], &refs[1], t)?;
        let forms_ok =
            rep.crossings_l1.iter().chain(&rep.crossings_l2).all(|c| c.form_inertia.is_positive_definite());
        Ok(vec![("zwz_identity", rep.holds), ("increasing_forms", forms_ok)])
    })
}

#[derive(Serialize)]
struct CrossingRow {
    t: f64,
    intersection_dim: usize,
    n_minus: usize,
    n_zero: usize,
    n_plus: usize,
}

/// CSV with header `t,intersection_dim,n_minus,n_zero,n_plus`.
pub fn crossings_to_csv(crossings: &[CrossingReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    if crossings.is_empty() {
        w.write_record(["t", "intersection_dim", "n_minus", "n_zero", "n_plus"]).expect("in-memory write");
    }
    for c in crossings {
        w.serialize(CrossingRow {
            t: c.t,
            intersection_dim: c.intersection_dim,
            n_minus: c.form_inertia.n_minus,
            n_zero: c.form_inertia.n_zero,
            n_plus: c.form_inertia.n_plus,
        })
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("ascii csv")
}
