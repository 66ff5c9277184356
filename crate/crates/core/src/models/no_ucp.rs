//! Two intervals of length π joined at a vertex, with Dirichlet conditions at
//! the outer ends and the vertex traces `(f(π⁻) = f(π⁺), f'(π⁻) - f'(π⁺))`.
//!
//! `M(λ)` is one dimensional for every λ, and at `λ = k²` the solution
//! `sin(kx)` on both edges has vanishing traces.

use serde::Serialize;

use super::interval::{trig_fundamentals, BcName, IntervalProblem};
use super::spectrum::{eigenvalues, Extension};
use super::ModelError;
use crate::duistermaat::duistermaat_index;
use crate::linalg::{c64, ComplexMatrix, ToleranceConfig};
use crate::maslov::{find_crossings, FnPath};
use crate::symplectic::{Frame, LagrangianPlane};

type Result<T> = std::result::Result<T, ModelError>;

#[derive(Debug, Clone, PartialEq)]
pub struct NoUcpPoint {
    pub cauchy_frame: Frame,
    pub inner_solution_dim: usize,
}

fn frame_entries(lambda: f64) -> (f64, f64) {
    if lambda < -1.0 {
        // Divided through by cosh(π√-λ).
        let k = (-lambda).sqrt();
        ((std::f64::consts::PI * k).tanh() / k, -2.0)
    } else {
        let (v, _) = trig_fundamentals(c64(lambda, 0.0), std::f64::consts::PI);
        (v[2].re, -2.0 * v[0].re)
    }
}

fn scalar(v: f64) -> ComplexMatrix {
    ComplexMatrix::from_element(1, 1, c64(v, 0.0))
}

pub fn no_ucp_model(lambda: f64, tol: &ToleranceConfig) -> Result<NoUcpPoint> {
    if !lambda.is_finite() {
        return Err(ModelError::InvalidProblem("non-finite spectral parameter".into()));
    }
    let (x, y) = frame_entries(lambda);
    let k = lambda.max(0.0).sqrt().round();
    let inner = usize::from(k >= 1.0 && (lambda - k * k).abs() <= tol.root_tol * (1.0 + lambda.abs()));
    Ok(NoUcpPoint { cauchy_frame: Frame::new(scalar(x), scalar(y), tol)?, inner_solution_dim: inner })
}

/// `λ ↦ M(λ)` on `[a, b]`.
pub fn no_ucp_path(a: f64, b: f64) -> FnPath {
    FnPath::new(a, b, |l| {
        let (x, y) = frame_entries(l);
        (scalar(x), scalar(y))
    })
    .increasing()
}

/// Vertex condition of `H₁`: continuity and Kirchhoff.
pub fn kirchhoff_plane() -> LagrangianPlane {
    LagrangianPlane::horizontal(1)
}

/// Spectra of `H_F` (Dirichlet at the vertex) and `H₁` in `[a, b]`, with
/// multiplicity, from the single-interval Dirichlet problems on `(0, π)` and
/// `(0, 2π)`.
pub fn no_ucp_spectra(a: f64, b: f64, tol: &ToleranceConfig) -> Result<(Vec<f64>, Vec<f64>)> {
    let half = Extension::catalog(IntervalProblem::free(std::f64::consts::PI), BcName::Dirichlet, 0.0)?;
    let whole = Extension::catalog(IntervalProblem::free(2.0 * std::f64::consts::PI), BcName::Dirichlet, 0.0)?;
    let hf: Vec<f64> = eigenvalues(&half, a, b, tol)?.flattened().into_iter().flat_map(|l| [l, l]).collect();
    let h1 = eigenvalues(&whole, a, b, tol)?.flattened();
    Ok((hf, h1))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoUcpReport {
    pub window: (f64, f64),
    /// Crossings of `M(λ)` with `F` in `(a, b]`, counted with intersection dimension.
    pub maslov_count_f: usize,
    pub count_hf: usize,
    pub count_h1: usize,
    pub inner_solutions: usize,
    /// `iD(L₁, F, M(b)) - iD(L₁, F, M(a))`.
    pub predicted_difference: i64,
    pub undercount_matches_inner: bool,
    pub interval_formula_exact: bool,
}

pub fn no_ucp_check(a: f64, b: f64, tol: &ToleranceConfig) -> Result<NoUcpReport> {
    let f = LagrangianPlane::vertical(1);
    let l1 = kirchhoff_plane();
    let crossings = find_crossings(&no_ucp_path(a, b), &f, tol)?;
    let maslov_count_f: usize = crossings.iter().filter(|c| c.t > a).map(|c| c.intersection_dim).sum();
    let inner_solutions: usize = crossings
        .iter()
        .filter(|c| c.t > a)
        .map(|c| no_ucp_model(c.t, tol).map(|p| p.inner_solution_dim))
        .sum::<Result<usize>>()?;
    let (hf, h1) = no_ucp_spectra(a, b, tol)?;
    let in_window = |v: &[f64]| v.iter().filter(|&&l| l > a && l <= b).count();
    let (count_hf, count_h1) = (in_window(&hf), in_window(&h1));
    let plane_at = |l: f64| -> Result<LagrangianPlane> { Ok(LagrangianPlane::from_frame(no_ucp_model(l, tol)?.cauchy_frame, tol)?) };
    let predicted_difference = duistermaat_index(&l1, &f, &plane_at(b)?, tol)? as i64 - duistermaat_index(&l1, &f, &plane_at(a)?, tol)? as i64;
    Ok(NoUcpReport {
        window: (a, b),
        maslov_count_f,
        count_hf,
        count_h1,
        inner_solutions,
        predicted_difference,
        undercount_matches_inner: count_hf == maslov_count_f + inner_solutions,
        interval_formula_exact: count_h1 as i64 - count_hf as i64 == predicted_difference,
    })
}
