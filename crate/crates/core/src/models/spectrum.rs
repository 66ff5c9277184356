//! Eigenvalues of self-adjoint extensions as crossings of `λ ↦ M(λ)`, and
//! spectral shifts computed directly or from Duistermaat indices.

use serde::Serialize;

use super::interval::{bc_catalog, cauchy_data, cauchy_data_frame, BcName, CauchyDataPath, IntervalProblem};
use super::ModelError;
use crate::duistermaat::duistermaat_index;
use crate::linalg::{hermitian_inertia, hermitian_part, orthonormal_basis, ToleranceConfig};
use crate::maslov::find_crossings;
use crate::symplectic::{graph_operator, projector_theta_from_plane, LagrangianPlane};

type Result<T> = std::result::Result<T, ModelError>;

/// A self-adjoint extension: the interval problem with boundary plane `plane`.
#[derive(Debug, Clone, PartialEq)]
pub struct Extension {
    pub problem: IntervalProblem,
    pub plane: LagrangianPlane,
}

impl Extension {
    pub fn new(problem: IntervalProblem, plane: LagrangianPlane) -> Result<Self> {
        if plane.n() != problem.n() {
            return Err(ModelError::InvalidProblem(format!("boundary plane has n = {}, expected 2", plane.n())));
        }
        Ok(Self { problem, plane })
    }

    pub fn catalog(problem: IntervalProblem, name: BcName, s: f64) -> Result<Self> {
        Self::new(problem, bc_catalog(name, s)?)
    }
}

/// The Friedrichs plane of the interval model.
pub fn friedrichs_plane() -> LagrangianPlane {
    LagrangianPlane::vertical(2)
}

/// Eigenvalues in a closed window, with multiplicities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSlice {
    pub eigenvalues: Vec<(f64, usize)>,
    pub window: (f64, f64),
    pub resolved_to: f64,
}

/// Slack for deciding whether a located eigenvalue lies at or below `λ`.
pub fn count_slack(lambda: f64) -> f64 {
    1e-9 * (1.0 + lambda.abs())
}

impl SpectrumSlice {
    /// Eigenvalues repeated by multiplicity.
    pub fn flattened(&self) -> Vec<f64> {
        self.eigenvalues.iter().flat_map(|&(l, m)| std::iter::repeat_n(l, m)).collect()
    }

    pub fn total(&self) -> usize {
        self.eigenvalues.iter().map(|e| e.1).sum()
    }

    /// Number of eigenvalues in `(a, b]`.
    pub fn count_in(&self, a: f64, b: f64) -> usize {
        self.eigenvalues
            .iter()
            .filter(|&&(l, _)| l > a + count_slack(a) && l <= b + count_slack(b))
            .map(|e| e.1)
            .sum()
    }

    pub fn count_le(&self, lambda: f64) -> usize {
        self.eigenvalues.iter().filter(|&&(l, _)| l <= lambda + count_slack(lambda)).map(|e| e.1).sum()
    }

    pub fn count_lt(&self, lambda: f64) -> usize {
        self.eigenvalues.iter().filter(|&&(l, _)| l < lambda - count_slack(lambda)).map(|e| e.1).sum()
    }
}

/// All eigenvalues of `e` in `[a, b]`.
pub fn eigenvalues(e: &Extension, a: f64, b: f64, tol: &ToleranceConfig) -> Result<SpectrumSlice> {
    if !(a.is_finite() && b.is_finite() && a <= b) {
        return Err(ModelError::InvalidProblem(format!("invalid window [{a}, {b}]")));
    }
    let path = CauchyDataPath::new(&e.problem, a, b);
    let crossings = find_crossings(&path, &e.plane, tol)?;
    Ok(SpectrumSlice {
        eigenvalues: crossings.iter().map(|c| (c.t, c.intersection_dim)).collect(),
        window: (a, b),
        resolved_to: tol.root_tol,
    })
}

/// `N(H; (a, b])`.
pub fn counting_function(e: &Extension, a: f64, b: f64, tol: &ToleranceConfig) -> Result<usize> {
    if a >= b {
        return Ok(0);
    }
    Ok(eigenvalues(e, a, b, tol)?.count_in(a, b))
}

/// A `λ` with no eigenvalue of `e` at or below it.
///
/// Below the Dirichlet threshold `M(λ)` is the graph of the Dirichlet-to-Neumann
/// map `D(λ)`, and eigenvalues `≤ λ` correspond to nonnegative directions of
/// `P D(λ) P - Θ` on `range(P)`; the window is widened until that form is
/// negative definite.
pub fn certified_lower_bound(e: &Extension, tol: &ToleranceConfig) -> Result<f64> {
    let p = &e.problem;
    let pt = projector_theta_from_plane(&e.plane, tol);
    let q = orthonormal_basis(&pt.p, tol);
    let base = p.potential().lower_bound();
    let mut d = 1.0 / (p.length() * p.length());
    for _ in 0..200 {
        let lambda = base - d;
        if q.ncols() == 0 {
            return Ok(lambda);
        }
        let data = cauchy_data(p, lambda)?;
        let form = q.adjoint() * (&pt.p * &data.y * &pt.p - &pt.theta) * &q;
        if hermitian_inertia(&hermitian_part(&form), tol)?.is_negative_definite() {
            return Ok(lambda);
        }
        d *= 2.0;
    }
    Err(ModelError::NoLowerBound)
}

/// Every eigenvalue of an extension up to a fixed `upper`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumCache {
    pub lower: f64,
    pub slice: SpectrumSlice,
}

impl SpectrumCache {
    pub fn new(e: &Extension, upper: f64, tol: &ToleranceConfig) -> Result<Self> {
        let lower = certified_lower_bound(e, tol)?;
        let slice = if upper <= lower {
            SpectrumSlice { eigenvalues: Vec::new(), window: (lower, lower), resolved_to: tol.root_tol }
        } else {
            eigenvalues(e, lower, upper, tol)?
        };
        Ok(Self { lower, slice })
    }

    pub fn upper(&self) -> f64 {
        self.slice.window.1
    }

    fn check(&self, lambda: f64) -> Result<()> {
        if lambda > self.upper() && lambda > self.lower {
            return Err(ModelError::InvalidProblem(format!("λ = {lambda} lies above the cached window")));
        }
        Ok(())
    }

    /// `N(H; (-∞, λ])`.
    pub fn count_le(&self, lambda: f64) -> Result<usize> {
        self.check(lambda)?;
        Ok(self.slice.count_le(lambda))
    }

    /// `N(H; (-∞, λ))`.
    pub fn count_lt(&self, lambda: f64) -> Result<usize> {
        self.check(lambda)?;
        Ok(self.slice.count_lt(lambda))
    }
}

/// The first `k` eigenvalues, repeated by multiplicity.
pub fn first_eigenvalues(e: &Extension, k: usize, tol: &ToleranceConfig) -> Result<Vec<f64>> {
    let lower = certified_lower_bound(e, tol)?;
    if k == 0 {
        return Ok(Vec::new());
    }
    let p = &e.problem;
    let q_top = match p.potential() {
        super::Potential::Zero => 0.0,
        super::Potential::Constant(c) => *c,
        super::Potential::Sampled { q, .. } => q.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    let weyl = (std::f64::consts::PI * (k + 1) as f64 / p.length()).powi(2);
    let mut upper = (q_top + weyl).max(lower + 1.0);
    for _ in 0..40 {
        let slice = eigenvalues(e, lower, upper, tol)?;
        let flat = slice.flattened();
        if flat.len() >= k {
            return Ok(flat[..k].to_vec());
        }
        upper = lower + 2.0 * (upper - lower);
    }
    Err(ModelError::Unavailable(format!("fewer than {k} eigenvalues found")))
}

/// `N(H1; (-∞, λ]) - N(H2; (-∞, λ])` by eigenvalue counting.
pub fn spectral_shift_direct(e1: &Extension, e2: &Extension, lambda: f64, tol: &ToleranceConfig) -> Result<i64> {
    Ok(shift_direct_one_sided(e1, e2, lambda, tol)?.1)
}

/// `(σ(λ - 0), σ(λ + 0))` by eigenvalue counting.
pub fn shift_direct_one_sided(e1: &Extension, e2: &Extension, lambda: f64, tol: &ToleranceConfig) -> Result<(i64, i64)> {
    let top = lambda + 1.0;
    let c1 = SpectrumCache::new(e1, top, tol)?;
    let c2 = SpectrumCache::new(e2, top, tol)?;
    let left = c1.count_lt(lambda)? as i64 - c2.count_lt(lambda)? as i64;
    let right = c1.count_le(lambda)? as i64 - c2.count_le(lambda)? as i64;
    Ok((left, right))
}

/// Spectral shift predicted from Duistermaat indices at `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct PredictedShift {
    /// `σ(λ) = σ(λ + 0)`.
    pub right: i64,
    /// `σ(λ - 0)`.
    pub left: i64,
    /// Whether `λ` is an eigenvalue of either extension.
    pub on_spectrum: bool,
}

/// `iD(L1, L2, M(λ)) - iD(L1, L2, F)`, with the left limit corrected by the
/// intersection dimensions at `λ`.
pub fn spectral_shift_predicted(e1: &Extension, e2: &Extension, lambda: f64, tol: &ToleranceConfig) -> Result<PredictedShift> {
    let m = LagrangianPlane::from_frame(cauchy_data_frame(&e1.problem, lambda)?, tol)?;
    let f = friedrichs_plane();
    let right = duistermaat_index(&e1.plane, &e2.plane, &m, tol)? as i64 - duistermaat_index(&e1.plane, &e2.plane, &f, tol)? as i64;
    let d1 = e1.plane.intersection_dim(&m, tol)? as i64;
    let d2 = e2.plane.intersection_dim(&m, tol)? as i64;
    Ok(PredictedShift { right, left: right - d1 + d2, on_spectrum: d1 + d2 > 0 })
}

/// `N(H1; (a, b]) - N(H2; (a, b]) = iD(L1, L2, M(b)) - iD(L1, L2, M(a))`.
pub fn interval_count_difference_predicted(
    e1: &Extension,
    e2: &Extension,
    a: f64,
    b: f64,
    tol: &ToleranceConfig,
) -> Result<i64> {
    let at = |l: f64| -> Result<i64> {
        let m = LagrangianPlane::from_frame(cauchy_data_frame(&e1.problem, l)?, tol)?;
        Ok(duistermaat_index(&e1.plane, &e2.plane, &m, tol)? as i64)
    };
    Ok(at(b)? - at(a)?)
}

/// `(σ₋, σ₊) = (iD(L1, L2, F), iD(L2, L1, F))`.
pub fn sigma_bounds(l1: &LagrangianPlane, l2: &LagrangianPlane, tol: &ToleranceConfig) -> Result<(usize, usize)> {
    let f = friedrichs_plane();
    Ok((duistermaat_index(l1, l2, &f, tol)?, duistermaat_index(l2, l1, &f, tol)?))
}

/// `n₀ + n₊` of the Dirichlet-to-Neumann map at `λ`, which equals the
/// Neumann-minus-Dirichlet spectral shift.
pub fn friedlander_count(p: &IntervalProblem, lambda: f64, tol: &ToleranceConfig) -> Result<usize> {
    let m = LagrangianPlane::from_frame(cauchy_data_frame(p, lambda)?, tol)?;
    let d = graph_operator(&m, tol)?;
    Ok(hermitian_inertia(&d, tol)?.n_zero_plus())
}
