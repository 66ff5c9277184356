//! Dense complex linear algebra with an explicit tolerance policy.
//!
//! Everything here works on [`ComplexMatrix`] (an `nalgebra` dynamic matrix of
//! `Complex64`). Rank decisions, zero eigenvalues and root locations are all
//! driven by one [`ToleranceConfig`] value, passed explicitly.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Dense complex matrix, the carrier for frames, Robin maps and forms.
pub type ComplexMatrix = DMatrix<Complex64>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian: |A - A*| = {defect:e} exceeds {allowed:e}")]
    NotHermitian { defect: f64, allowed: f64 },
    #[error("column set is rank deficient: expected rank {expected}, found {found}")]
    RankDeficient { expected: usize, found: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),
    #[error("matrix has non-finite entries")]
    NonFinite,
}

/// Tolerances used by every numerical decision in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ToleranceConfig {
    /// Singular values below `rank_rel_tol * sigma_max` count as zero.
    pub rank_rel_tol: f64,
    /// Eigenvalues within `inertia_zero_tol * max(1, |A|)` of zero count as zero.
    pub inertia_zero_tol: f64,
    /// Target accuracy for located crossings and eigenvalues.
    pub root_tol: f64,
    /// Relative residual allowed in `X*Y = Y*X` when accepting a Lagrangian frame.
    pub lagrangian_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            rank_rel_tol: 1e-10,
            inertia_zero_tol: 1e-9,
            root_tol: 1e-10,
            lagrangian_tol: 1e-8,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<(), LinalgError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.rank_rel_tol) {
            return Err(LinalgError::InvalidTolerance("rank_rel_tol must be positive"));
        }
        if !ok(self.inertia_zero_tol) {
            return Err(LinalgError::InvalidTolerance("inertia_zero_tol must be positive"));
        }
        if !ok(self.root_tol) {
            return Err(LinalgError::InvalidTolerance("root_tol must be positive"));
        }
        if !ok(self.lagrangian_tol) {
            return Err(LinalgError::InvalidTolerance("lagrangian_tol must be positive"));
        }
        Ok(())
    }

    /// Threshold on the smallest singular value of a stacked pair of
    /// orthonormal frames below which the planes are declared to intersect.
    pub fn crossing_tol(&self) -> f64 {
        1e3 * self.root_tol
    }

    pub fn with_inertia_zero_tol(mut self, tol: f64) -> Self {
        self.inertia_zero_tol = tol;
        self
    }
}

/// Counts of negative, zero and positive eigenvalues of a Hermitian matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct Inertia {
    pub n_minus: usize,
    pub n_zero: usize,
    pub n_plus: usize,
}

impl Inertia {
    pub fn dim(&self) -> usize {
        self.n_minus + self.n_zero + self.n_plus
    }

    /// Number of non-negative eigenvalues.
    pub fn n_zero_plus(&self) -> usize {
        self.n_zero + self.n_plus
    }

    pub fn is_positive_definite(&self) -> bool {
        self.n_minus == 0 && self.n_zero == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.n_plus == 0 && self.n_zero == 0
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.n_zero == 0
    }
}

pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Builds a real-valued complex matrix from row slices.
pub fn from_real_rows(rows: &[&[f64]]) -> ComplexMatrix {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    DMatrix::from_fn(nrows, ncols, |i, j| c64(rows[i][j], 0.0))
}

pub fn identity(n: usize) -> ComplexMatrix {
    DMatrix::identity(n, n)
}

pub fn zeros(rows: usize, cols: usize) -> ComplexMatrix {
    DMatrix::zeros(rows, cols)
}

pub fn scaled_identity(n: usize, s: f64) -> ComplexMatrix {
    DMatrix::from_diagonal_element(n, n, c64(s, 0.0))
}

pub fn is_finite(a: &ComplexMatrix) -> bool {
    a.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// `[a | b]`
pub fn hcat(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.nrows(), b.nrows(), "hcat: row counts differ");
    let mut out = zeros(a.nrows(), a.ncols() + b.ncols());
    out.columns_mut(0, a.ncols()).copy_from(a);
    out.columns_mut(a.ncols(), b.ncols()).copy_from(b);
    out
}

/// `[a ; b]`
pub fn vcat(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    assert_eq!(a.ncols(), b.ncols(), "vcat: column counts differ");
    let mut out = zeros(a.nrows() + b.nrows(), a.ncols());
    out.rows_mut(0, a.nrows()).copy_from(a);
    out.rows_mut(a.nrows(), b.nrows()).copy_from(b);
    out
}

/// `(A + A*) / 2`
pub fn hermitian_part(a: &ComplexMatrix) -> ComplexMatrix {
    (a + a.adjoint()) * c64(0.5, 0.0)
}

/// Singular values sorted in decreasing order.
pub fn singular_values(a: &ComplexMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let mut s: Vec<f64> = a.clone().singular_values().iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

pub fn spectral_norm(a: &ComplexMatrix) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Smallest singular value; zero for an empty matrix.
pub fn sigma_min(a: &ComplexMatrix) -> f64 {
    singular_values(a).last().copied().unwrap_or(0.0)
}

/// Eigenvalues of the Hermitian part of `a`, ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let h = hermitian_part(a);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

fn check_square(a: &ComplexMatrix) -> Result<(), LinalgError> {
    if a.nrows() != a.ncols() {
        return Err(LinalgError::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(())
}

/// Inertia of a Hermitian matrix.
///
/// The input is symmetrized before decomposition. Eigenvalues within
/// `tau = inertia_zero_tol * max(1, |A|)` of zero are counted as zero.
pub fn hermitian_inertia(a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Inertia, LinalgError> {
    hermitian_inertia_scaled(a, 0.0, tol)
}

/// As [`hermitian_inertia`], with `tau = inertia_zero_tol * max(1, |A|, scale)`.
///
/// Use `scale` when `A` is a difference of larger matrices, so that
/// cancellation noise is not mistaken for a signed eigenvalue.
pub fn hermitian_inertia_scaled(a: &ComplexMatrix, scale: f64, tol: &ToleranceConfig) -> Result<Inertia, LinalgError> {
    check_square(a)?;
    if !is_finite(a) {
        return Err(LinalgError::NonFinite);
    }
    if a.is_empty() {
        return Ok(Inertia::default());
    }
    let norm = spectral_norm(a);
    let defect = spectral_norm(&(a - a.adjoint()));
    let allowed = tol.inertia_zero_tol * norm.max(scale);
    if defect > allowed {
        return Err(LinalgError::NotHermitian { defect, allowed });
    }
    let ev = hermitian_eigenvalues(a);
    Ok(inertia_from_eigenvalues(&ev, tol.inertia_zero_tol * norm.max(scale).max(1.0)))
}

pub fn inertia_from_eigenvalues(ev: &[f64], tau: f64) -> Inertia {
    let mut out = Inertia::default();
    for &v in ev {
        if v < -tau {
            out.n_minus += 1;
        } else if v > tau {
            out.n_plus += 1;
        } else {
            out.n_zero += 1;
        }
    }
    out
}

fn rank_threshold(s: &[f64], tol: &ToleranceConfig) -> f64 {
    tol.rank_rel_tol * s.first().copied().unwrap_or(0.0)
}

/// Number of singular values above `rank_rel_tol * sigma_max`.
pub fn rank_with_tol(a: &ComplexMatrix, tol: &ToleranceConfig) -> usize {
    let s = singular_values(a);
    let thr = rank_threshold(&s, tol);
    s.iter().filter(|&&v| v > thr && v > 0.0).count()
}

/// SVD with singular values sorted decreasingly, returning (U, sigma, V).
///
/// `U` is thin (m x min(m,n)); `V` is n x min(m,n).
fn sorted_svd(a: &ComplexMatrix) -> (ComplexMatrix, Vec<f64>, ComplexMatrix) {
    let svd = a.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v = svd.v_t.expect("requested V^T").adjoint();
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]));
    let s = order.iter().map(|&i| svd.singular_values[i]).collect();
    let u_sorted = ComplexMatrix::from_columns(&order.iter().map(|&i| u.column(i)).collect::<Vec<_>>());
    let v_sorted = ComplexMatrix::from_columns(&order.iter().map(|&i| v.column(i)).collect::<Vec<_>>());
    (u_sorted, s, v_sorted)
}

/// Full right singular basis of `a` (n x n, columns ordered by decreasing
/// singular value, padded singular values are zero).
fn right_singular_basis(a: &ComplexMatrix) -> (Vec<f64>, ComplexMatrix) {
    let (m, n) = a.shape();
    let padded = if m < n { vcat(a, &zeros(n - m, n)) } else { a.clone() };
    let (_, s, v) = sorted_svd(&padded);
    (s, v)
}

/// Orthonormal basis of `ker a`, one column per null direction.
pub fn nullspace(a: &ComplexMatrix, tol: &ToleranceConfig) -> ComplexMatrix {
    let n = a.ncols();
    if n == 0 {
        return zeros(0, 0);
    }
    if a.nrows() == 0 {
        return identity(n);
    }
    let (s, v) = right_singular_basis(a);
    let thr = rank_threshold(&s, tol);
    let cols: Vec<_> = (0..n).filter(|&i| !(s[i] > thr && s[i] > 0.0)).map(|i| v.column(i)).collect();
    if cols.is_empty() {
        zeros(n, 0)
    } else {
        ComplexMatrix::from_columns(&cols)
    }
}

/// Right singular vectors for the `d` smallest singular values (n x d).
pub fn smallest_right_singular_vectors(a: &ComplexMatrix, d: usize) -> ComplexMatrix {
    let n = a.ncols();
    let d = d.min(n);
    if d == 0 {
        return zeros(n, 0);
    }
    let (_, v) = right_singular_basis(a);
    v.columns(n - d, d).into_owned()
}

/// Orthonormal basis of the column space of `a`.
pub fn orthonormal_basis(a: &ComplexMatrix, tol: &ToleranceConfig) -> ComplexMatrix {
    if a.ncols() == 0 || a.nrows() == 0 {
        return zeros(a.nrows(), 0);
    }
    let (u, s, _) = sorted_svd(a);
    let thr = rank_threshold(&s, tol);
    let r = s.iter().filter(|&&v| v > thr && v > 0.0).count();
    u.columns(0, r).into_owned()
}

fn full_column_rank_basis(z: &ComplexMatrix, tol: &ToleranceConfig) -> Result<ComplexMatrix, LinalgError> {
    let q = orthonormal_basis(z, tol);
    if q.ncols() != z.ncols() {
        return Err(LinalgError::RankDeficient { expected: z.ncols(), found: q.ncols() });
    }
    Ok(q)
}

/// `dim range(za) ∩ range(zb)`, computed as `dim A + dim B - rank [A | B]`
/// after orthonormalizing both column sets.
pub fn subspace_intersection_dim(
    za: &ComplexMatrix,
    zb: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<usize, LinalgError> {
    if za.nrows() != zb.nrows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "ambient dimensions {} and {}",
            za.nrows(),
            zb.nrows()
        )));
    }
    let qa = full_column_rank_basis(za, tol)?;
    let qb = full_column_rank_basis(zb, tol)?;
    let r = rank_with_tol(&hcat(&qa, &qb), tol);
    Ok(qa.ncols() + qb.ncols() - r)
}

/// Orthonormal basis of `range(za) ∩ range(zb)`.
pub fn intersection_basis(
    za: &ComplexMatrix,
    zb: &ComplexMatrix,
    tol: &ToleranceConfig,
) -> Result<ComplexMatrix, LinalgError> {
    if za.nrows() != zb.nrows() {
        return Err(LinalgError::DimensionMismatch(format!(
            "ambient dimensions {} and {}",
            za.nrows(),
            zb.nrows()
        )));
    }
    let qa = orthonormal_basis(za, tol);
    let qb = orthonormal_basis(zb, tol);
    if qa.ncols() == 0 || qb.ncols() == 0 {
        return Ok(zeros(za.nrows(), 0));
    }
    let null = nullspace(&hcat(&qa, &(-&qb)), tol);
    if null.ncols() == 0 {
        return Ok(zeros(za.nrows(), 0));
    }
    let top = null.rows(0, qa.ncols()).into_owned();
    Ok(orthonormal_basis(&(&qa * top), tol))
}

/// Orthogonal projector onto the column space of an orthonormal `q`.
pub fn projector(q: &ComplexMatrix) -> ComplexMatrix {
    q * q.adjoint()
}
