//! The complex symplectic space `K ⊕ K` with `ω(u, v) = <u0, v1> - <u1, v0>`,
//! Lagrangian planes in several parametrizations, and linear relations.

use nalgebra::DVector;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{
    c64, hcat, hermitian_part, identity, intersection_basis, is_finite, nullspace, orthonormal_basis,
    rank_with_tol, spectral_norm, subspace_intersection_dim, vcat, zeros, ComplexMatrix, LinalgError,
    ToleranceConfig,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymplecticError {
    #[error("frame stack has rank {found}, expected {expected}")]
    RankDeficientFrame { expected: usize, found: usize },
    #[error("frame is not Lagrangian: residual {residual:e} exceeds {allowed:e}")]
    NotLagrangian { residual: f64, allowed: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid projector/Theta pair: {0}")]
    InvalidProjector(String),
    #[error("matrix is not symplectic: |G*JG - J| = {defect:e}")]
    NotSymplectic { defect: f64 },
    #[error("relation has a nontrivial multivalued part of dimension {0}")]
    MultivaluedRelation(usize),
    #[error("malformed plane description: {0}")]
    Malformed(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

type Result<T> = std::result::Result<T, SymplecticError>;

/// A pair `(X, Y)` of n x n matrices whose 2n x n stack has rank n.
#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    x: ComplexMatrix,
    y: ComplexMatrix,
}

impl Frame {
    pub fn new(x: ComplexMatrix, y: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let n = x.ncols();
        if x.shape() != (n, n) || y.shape() != (n, n) {
            return Err(SymplecticError::DimensionMismatch(format!(
                "X is {:?}, Y is {:?}; both must be n x n",
                x.shape(),
                y.shape()
            )));
        }
        if !is_finite(&x) || !is_finite(&y) {
            return Err(LinalgError::NonFinite.into());
        }
        let found = rank_with_tol(&vcat(&x, &y), tol);
        if found != n {
            return Err(SymplecticError::RankDeficientFrame { expected: n, found });
        }
        Ok(Self { x, y })
    }

    /// Splits a 2n x n stack into a frame.
    pub fn from_stacked(z: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let n = z.ncols();
        if z.nrows() != 2 * n {
            return Err(SymplecticError::DimensionMismatch(format!(
                "stack is {}x{}, expected {}x{}",
                z.nrows(),
                n,
                2 * n,
                n
            )));
        }
        Self::new(z.rows(0, n).into_owned(), z.rows(n, n).into_owned(), tol)
    }

    pub fn n(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &ComplexMatrix {
        &self.x
    }

    pub fn y(&self) -> &ComplexMatrix {
        &self.y
    }

    /// `Z = (X; Y)`
    pub fn stacked(&self) -> ComplexMatrix {
        vcat(&self.x, &self.y)
    }

    /// `|X*Y - Y*X|` relative to `|X| |Y| + 1`.
    pub fn lagrangian_residual(&self) -> f64 {
        let d = self.x.adjoint() * &self.y - self.y.adjoint() * &self.x;
        spectral_norm(&d) / (spectral_norm(&self.x) * spectral_norm(&self.y) + 1.0)
    }
}

/// True iff `|X*Y - Y*X| <= lagrangian_tol * (|X| |Y| + 1)`.
pub fn is_lagrangian(f: &Frame, tol: &ToleranceConfig) -> bool {
    f.lagrangian_residual() <= tol.lagrangian_tol
}

/// `J = [[0, I], [-I, 0]]`, so that `ω(u, v) = u* J v`.
pub fn symplectic_j(n: usize) -> ComplexMatrix {
    let mut j = zeros(2 * n, 2 * n);
    for i in 0..n {
        j[(i, n + i)] = c64(1.0, 0.0);
        j[(n + i, i)] = c64(-1.0, 0.0);
    }
    j
}

pub fn omega(u: &DVector<Complex64>, v: &DVector<Complex64>) -> Result<Complex64> {
    if u.len() != v.len() || !u.len().is_multiple_of(2) {
        return Err(SymplecticError::DimensionMismatch(format!(
            "vectors of length {} and {}",
            u.len(),
            v.len()
        )));
    }
    let n = u.len() / 2;
    let (u0, u1) = (u.rows(0, n), u.rows(n, n));
    let (v0, v1) = (v.rows(0, n), v.rows(n, n));
    Ok(u0.dotc(&v1) - u1.dotc(&v0))
}

/// A Lagrangian subspace, stored through an orthonormal frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LagrangianPlane {
    frame: Frame,
}

impl LagrangianPlane {
    /// Accepts any Lagrangian frame and stores the QR-orthonormalized stack.
    pub fn from_frame(frame: Frame, tol: &ToleranceConfig) -> Result<Self> {
        let residual = frame.lagrangian_residual();
        if residual > tol.lagrangian_tol {
            return Err(SymplecticError::NotLagrangian { residual, allowed: tol.lagrangian_tol });
        }
        let q = frame.stacked().qr().q();
        let n = frame.n();
        let canonical = Frame { x: q.rows(0, n).into_owned(), y: q.rows(n, n).into_owned() };
        Ok(Self { frame: canonical })
    }

    pub fn from_xy(x: ComplexMatrix, y: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        Self::from_frame(Frame::new(x, y, tol)?, tol)
    }

    /// `K ⊕ 0`
    pub fn horizontal(n: usize) -> Self {
        Self { frame: Frame { x: identity(n), y: zeros(n, n) } }
    }

    /// `0 ⊕ K`
    pub fn vertical(n: usize) -> Self {
        Self { frame: Frame { x: zeros(n, n), y: identity(n) } }
    }

    /// Graph of a Hermitian matrix, frame `(I, H)`.
    pub fn graph(h: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let n = h.nrows();
        Self::from_xy(identity(n), h.clone(), tol)
    }

    pub fn n(&self) -> usize {
        self.frame.n()
    }

    pub fn frame(&self) -> &Frame {
        &self.frame
    }

    pub fn x(&self) -> &ComplexMatrix {
        &self.frame.x
    }

    pub fn y(&self) -> &ComplexMatrix {
        &self.frame.y
    }

    /// Orthonormal 2n x n stack.
    pub fn stacked(&self) -> ComplexMatrix {
        self.frame.stacked()
    }

    /// Orthogonal projector onto the plane.
    pub fn projector(&self) -> ComplexMatrix {
        let z = self.stacked();
        &z * z.adjoint()
    }

    pub fn intersection_dim(&self, other: &Self, tol: &ToleranceConfig) -> Result<usize> {
        self.check_same_n(other)?;
        Ok(subspace_intersection_dim(&self.stacked(), &other.stacked(), tol)?)
    }

    /// Orthonormal basis (2n x d) of the intersection with another plane.
    pub fn intersection(&self, other: &Self, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
        self.check_same_n(other)?;
        Ok(intersection_basis(&self.stacked(), &other.stacked(), tol)?)
    }

    /// Equality as subspaces.
    pub fn same_plane(&self, other: &Self, tol: &ToleranceConfig) -> bool {
        self.n() == other.n() && self.intersection_dim(other, tol).is_ok_and(|d| d == self.n())
    }

    pub fn check_same_n(&self, other: &Self) -> Result<()> {
        if self.n() != other.n() {
            return Err(SymplecticError::DimensionMismatch(format!(
                "planes in dimensions {} and {}",
                self.n(),
                other.n()
            )));
        }
        Ok(())
    }
}

/// Kernel description `{(u, v) : A u + B v = 0}` of a plane.
#[derive(Debug, Clone, PartialEq)]
pub struct CoFrame {
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
}

impl CoFrame {
    /// The plane is spanned by the frame `(B*, -A*)`.
    pub fn to_plane(&self, tol: &ToleranceConfig) -> Result<LagrangianPlane> {
        LagrangianPlane::from_xy(self.b.adjoint(), -self.a.adjoint(), tol)
    }

    pub fn from_plane(l: &LagrangianPlane) -> Self {
        Self { a: -l.y().adjoint(), b: l.x().adjoint() }
    }
}

/// Boundary-condition form: `(I - P) u = 0`, `P v = Θ P u`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorTheta {
    pub p: ComplexMatrix,
    pub theta: ComplexMatrix,
}

impl ProjectorTheta {
    pub fn new(p: ComplexMatrix, theta: ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        let pt = Self { p, theta };
        pt.validate(tol)?;
        Ok(pt)
    }

    pub fn validate(&self, tol: &ToleranceConfig) -> Result<()> {
        let n = self.p.nrows();
        if self.p.shape() != (n, n) || self.theta.shape() != (n, n) {
            return Err(SymplecticError::InvalidProjector("P and Theta must be n x n".into()));
        }
        let eps = tol.lagrangian_tol;
        if spectral_norm(&(&self.p * &self.p - &self.p)) > eps || spectral_norm(&(&self.p - self.p.adjoint())) > eps {
            return Err(SymplecticError::InvalidProjector("P is not an orthogonal projector".into()));
        }
        let scale = spectral_norm(&self.theta).max(1.0);
        if spectral_norm(&(&self.theta - self.theta.adjoint())) > eps * scale {
            return Err(SymplecticError::InvalidProjector("Theta is not Hermitian".into()));
        }
        if spectral_norm(&(&self.p * &self.theta * &self.p - &self.theta)) > eps * scale {
            return Err(SymplecticError::InvalidProjector("Theta does not act on range(P)".into()));
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.p.nrows()
    }

    pub fn rank(&self) -> usize {
        self.p.trace().re.round() as usize
    }
}

/// Plane with frame `(P, PΘP + P - I)`.
pub fn plane_from_projector_theta(pt: &ProjectorTheta, tol: &ToleranceConfig) -> Result<LagrangianPlane> {
    pt.validate(tol)?;
    let n = pt.n();
    let y = &pt.p * &pt.theta * &pt.p + &pt.p - identity(n);
    LagrangianPlane::from_xy(pt.p.clone(), y, tol)
}

/// Inverse of [`plane_from_projector_theta`].
///
/// `range(P)` is the column space of the canonical `X`; the directions
/// classified as Dirichlet are those whose singular value falls under
/// `rank_rel_tol` relative to the whole frame.
pub fn projector_theta_from_plane(l: &LagrangianPlane, tol: &ToleranceConfig) -> ProjectorTheta {
    let n = l.n();
    let x = l.x();
    let svd = x.clone().svd(true, true);
    let u = svd.u.expect("U");
    let v = svd.v_t.expect("V^T").adjoint();
    let s = &svd.singular_values;
    let scale = spectral_norm(&l.stacked());
    let keep: Vec<usize> = (0..s.len()).filter(|&i| s[i] > tol.rank_rel_tol * scale && s[i] > 0.0).collect();
    if keep.is_empty() {
        return ProjectorTheta { p: zeros(n, n), theta: zeros(n, n) };
    }
    let ur = ComplexMatrix::from_columns(&keep.iter().map(|&i| u.column(i)).collect::<Vec<_>>());
    let vr = ComplexMatrix::from_columns(&keep.iter().map(|&i| v.column(i)).collect::<Vec<_>>());
    let sinv = ComplexMatrix::from_diagonal(&DVector::from_iterator(
        keep.len(),
        keep.iter().map(|&i| c64(1.0 / s[i], 0.0)),
    ));
    let p = &ur * ur.adjoint();
    let theta = &p * l.y() * vr * sinv * ur.adjoint();
    let theta = hermitian_part(&(&p * theta * &p));
    ProjectorTheta { p, theta }
}

/// `U = (X + iY)(X - iY)^{-1}`.
pub fn unitary_param(l: &LagrangianPlane) -> ComplexMatrix {
    let i = c64(0.0, 1.0);
    let num = l.x() + l.y() * i;
    let den = l.x() - l.y() * i;
    // For an orthonormal Lagrangian frame X - iY is unitary.
    num * den.adjoint()
}

/// Plane with frame `(U + I, -i(U - I))`.
pub fn plane_from_unitary(u: &ComplexMatrix, tol: &ToleranceConfig) -> Result<LagrangianPlane> {
    let n = u.nrows();
    let x = u + identity(n);
    let y = (u - identity(n)) * c64(0.0, -1.0);
    LagrangianPlane::from_xy(x, y, tol)
}

pub fn random_complex_gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c64(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// Haar unitary via QR of a complex Gaussian with the phase of `diag(R)` removed.
pub fn random_unitary<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let qr = random_complex_gaussian(n, n, rng).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c64(1.0, 0.0) };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

pub fn random_hermitian<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    hermitian_part(&random_complex_gaussian(n, n, rng))
}

pub fn random_lagrangian_with<R: Rng + ?Sized>(n: usize, rng: &mut R) -> LagrangianPlane {
    let u = random_unitary(n, rng);
    plane_from_unitary(&u, &ToleranceConfig::default()).expect("unitary parametrization is always Lagrangian")
}

/// Random Lagrangian plane from an explicit seed.
pub fn random_lagrangian(n: usize, seed: u64) -> LagrangianPlane {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_lagrangian_with(n, &mut rng)
}

/// A random symplectic matrix: product of a block-diagonal map, a shear and a
/// unitary rotation of both components. Entries stay O(1).
pub fn random_symplectic<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    let a = identity(n) + random_complex_gaussian(n, n, rng) * c64(0.3, 0.0);
    let (a, a_inv) = match a.clone().try_inverse() {
        Some(inv) => (a, inv),
        None => (identity(n), identity(n)),
    };
    let mut diag = zeros(2 * n, 2 * n);
    diag.view_mut((0, 0), (n, n)).copy_from(&a);
    diag.view_mut((n, n), (n, n)).copy_from(&a_inv.adjoint());

    let s = random_hermitian(n, rng) * c64(0.5, 0.0);
    let mut shear = identity(2 * n);
    shear.view_mut((n, 0), (n, n)).copy_from(&s);

    unitary_symplectic(&random_unitary(n, rng), &random_unitary(n, rng)) * shear * diag
}

/// Unitary symplectic map `[[A, B], [-B, A]] · diag(V, V)` where
/// `A = (U + U*)/2`, `B = (U - U*)/(2i)`.
fn unitary_symplectic(u: &ComplexMatrix, v: &ComplexMatrix) -> ComplexMatrix {
    let n = u.nrows();
    let mut d = zeros(2 * n, 2 * n);
    d.view_mut((0, 0), (n, n)).copy_from(v);
    d.view_mut((n, n), (n, n)).copy_from(v);
    // A, B Hermitian, commuting, A^2 + B^2 = I.
    let a = (u + u.adjoint()) * c64(0.5, 0.0);
    let b = (u - u.adjoint()) * c64(0.0, -0.5);
    let mut r = zeros(2 * n, 2 * n);
    r.view_mut((0, 0), (n, n)).copy_from(&a);
    r.view_mut((0, n), (n, n)).copy_from(&b);
    r.view_mut((n, 0), (n, n)).copy_from(&(-&b));
    r.view_mut((n, n), (n, n)).copy_from(&a);
    r * d
}

/// `|G*JG - J|` relative to `max(1, |G|^2)`.
pub fn symplectic_defect(g: &ComplexMatrix) -> f64 {
    let n = g.nrows() / 2;
    let j = symplectic_j(n);
    let norm = spectral_norm(g);
    spectral_norm(&(g.adjoint() * &j * g - &j)) / norm.powi(2).max(1.0)
}

pub fn symplectic_apply(g: &ComplexMatrix, l: &LagrangianPlane, tol: &ToleranceConfig) -> Result<LagrangianPlane> {
    if g.shape() != (2 * l.n(), 2 * l.n()) {
        return Err(SymplecticError::DimensionMismatch(format!(
            "G is {:?}, plane has n = {}",
            g.shape(),
            l.n()
        )));
    }
    let defect = symplectic_defect(g);
    if defect > tol.lagrangian_tol {
        return Err(SymplecticError::NotSymplectic { defect });
    }
    let z = g * l.stacked();
    LagrangianPlane::from_frame(Frame::from_stacked(&z, tol)?, tol)
}

/// A subspace of `K ⊕ K` viewed as a multivalued operator on `K`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearRelation {
    n: usize,
    basis: ComplexMatrix,
}

impl LinearRelation {
    /// Relation spanned by the columns of a 2n x k matrix.
    pub fn new(n: usize, spanning: &ComplexMatrix, tol: &ToleranceConfig) -> Result<Self> {
        if spanning.nrows() != 2 * n {
            return Err(SymplecticError::DimensionMismatch(format!(
                "spanning set has {} rows, expected {}",
                spanning.nrows(),
                2 * n
            )));
        }
        Ok(Self { n, basis: orthonormal_basis(spanning, tol) })
    }

    pub fn from_plane(l: &LagrangianPlane) -> Self {
        Self { n: l.n(), basis: l.stacked() }
    }

    pub fn zero(n: usize) -> Self {
        Self { n, basis: zeros(2 * n, 0) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }

    pub fn basis(&self) -> &ComplexMatrix {
        &self.basis
    }

    fn top(&self) -> ComplexMatrix {
        self.basis.rows(0, self.n).into_owned()
    }

    fn bottom(&self) -> ComplexMatrix {
        self.basis.rows(self.n, self.n).into_owned()
    }

    pub fn inverse(&self) -> Self {
        Self { n: self.n, basis: vcat(&self.bottom(), &self.top()) }
    }

    /// `{u : (u, 0) ∈ W}`
    pub fn kernel(&self, tol: &ToleranceConfig) -> ComplexMatrix {
        let h = LagrangianPlane::horizontal(self.n).stacked();
        let b = intersection_basis(&self.basis, &h, tol).expect("same ambient dimension");
        orthonormal_basis(&b.rows(0, self.n).into_owned(), tol)
    }

    /// `{v : (0, v) ∈ W}`
    pub fn mul(&self, tol: &ToleranceConfig) -> ComplexMatrix {
        let v = LagrangianPlane::vertical(self.n).stacked();
        let b = intersection_basis(&self.basis, &v, tol).expect("same ambient dimension");
        orthonormal_basis(&b.rows(self.n, self.n).into_owned(), tol)
    }

    /// `{(u, v - w) : (u, v) ∈ self, (u, w) ∈ other}`
    pub fn difference(&self, other: &Self, tol: &ToleranceConfig) -> Result<Self> {
        self.check_same_n(other)?;
        let (ua, va) = (self.top(), self.bottom());
        let (ub, vb) = (other.top(), other.bottom());
        if self.dim() == 0 || other.dim() == 0 {
            return Ok(Self::zero(self.n));
        }
        let null = nullspace(&hcat(&ua, &(-&ub)), tol);
        if null.ncols() == 0 {
            return Ok(Self::zero(self.n));
        }
        let a = null.rows(0, self.dim()).into_owned();
        let b = null.rows(self.dim(), other.dim()).into_owned();
        let spanning = vcat(&(&ua * &a), &(&va * &a - &vb * &b));
        Self::new(self.n, &spanning, tol)
    }

    /// `(J W)^⊥`
    pub fn symplectic_complement(&self, tol: &ToleranceConfig) -> Self {
        let jw = symplectic_j(self.n) * &self.basis;
        let basis = nullspace(&jw.adjoint(), tol);
        Self { n: self.n, basis }
    }

    pub fn same_subspace(&self, other: &Self, tol: &ToleranceConfig) -> bool {
        if self.n != other.n || self.dim() != other.dim() {
            return false;
        }
        if self.dim() == 0 {
            return true;
        }
        rank_with_tol(&hcat(&self.basis, &other.basis), tol) == self.dim()
    }

    /// Dimension n and isotropic.
    pub fn is_lagrangian(&self, tol: &ToleranceConfig) -> bool {
        if self.dim() != self.n {
            return false;
        }
        let w = self.basis.adjoint() * symplectic_j(self.n) * &self.basis;
        spectral_norm(&w) <= tol.lagrangian_tol
    }

    pub fn to_plane(&self, tol: &ToleranceConfig) -> Result<LagrangianPlane> {
        if self.dim() != self.n {
            return Err(SymplecticError::RankDeficientFrame { expected: self.n, found: self.dim() });
        }
        LagrangianPlane::from_frame(Frame::from_stacked(&self.basis, tol)?, tol)
    }

    /// The operator `T` with `W = graph(T)`, requiring `dim W = n` and `mul W = 0`.
    pub fn graph_operator(&self, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
        let m = self.mul(tol).ncols();
        if m > 0 {
            return Err(SymplecticError::MultivaluedRelation(m));
        }
        if self.dim() != self.n {
            return Err(SymplecticError::RankDeficientFrame { expected: self.n, found: self.dim() });
        }
        let x_inv = self
            .top()
            .try_inverse()
            .ok_or(SymplecticError::MultivaluedRelation(1))?;
        Ok(self.bottom() * x_inv)
    }

    fn check_same_n(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(SymplecticError::DimensionMismatch(format!(
                "relations in dimensions {} and {}",
                self.n, other.n
            )));
        }
        Ok(())
    }
}

pub fn symplectic_complement(w: &LinearRelation, tol: &ToleranceConfig) -> LinearRelation {
    w.symplectic_complement(tol)
}

pub fn relation_difference(l: &LagrangianPlane, m: &LagrangianPlane, tol: &ToleranceConfig) -> Result<LinearRelation> {
    LinearRelation::from_plane(l).difference(&LinearRelation::from_plane(m), tol)
}

pub fn relation_inverse(w: &LinearRelation) -> LinearRelation {
    w.inverse()
}

pub fn relation_kernel(w: &LinearRelation, tol: &ToleranceConfig) -> ComplexMatrix {
    w.kernel(tol)
}

pub fn relation_mul(w: &LinearRelation, tol: &ToleranceConfig) -> ComplexMatrix {
    w.mul(tol)
}

/// Hermitian `T` with `L = graph(T)`.
pub fn graph_operator(l: &LagrangianPlane, tol: &ToleranceConfig) -> Result<ComplexMatrix> {
    Ok(hermitian_part(&LinearRelation::from_plane(l).graph_operator(tol)?))
}

// JSON plane format. Complex entries are `[re, im]`; plain reals are accepted.

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(untagged)]
enum JsonComplex {
    Pair([f64; 2]),
    Real(f64),
}

type JsonMatrix = Vec<Vec<JsonComplex>>;

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum PlaneJson {
    Frame {
        n: Option<usize>,
        #[serde(rename = "X")]
        x: JsonMatrix,
        #[serde(rename = "Y")]
        y: JsonMatrix,
    },
    Projector {
        n: Option<usize>,
        #[serde(rename = "P")]
        p: JsonMatrix,
        #[serde(rename = "Theta")]
        theta: JsonMatrix,
    },
    CoFrame {
        n: Option<usize>,
        #[serde(rename = "A")]
        a: JsonMatrix,
        #[serde(rename = "B")]
        b: JsonMatrix,
    },
}

fn matrix_from_json(m: &JsonMatrix, n: usize, name: &str) -> Result<ComplexMatrix> {
    if m.len() != n || m.iter().any(|row| row.len() != n) {
        return Err(SymplecticError::Malformed(format!("{name} must be {n}x{n}")));
    }
    Ok(ComplexMatrix::from_fn(n, n, |i, j| match m[i][j] {
        JsonComplex::Pair([re, im]) => c64(re, im),
        JsonComplex::Real(re) => c64(re, 0.0),
    }))
}

fn matrix_to_json(m: &ComplexMatrix) -> serde_json::Value {
    let rows: Vec<Vec<[f64; 2]>> =
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    serde_json::to_value(rows).expect("plain numbers serialize")
}

pub fn plane_from_json(text: &str, tol: &ToleranceConfig) -> Result<LagrangianPlane> {
    let parsed: PlaneJson = serde_json::from_str(text).map_err(|e| SymplecticError::Malformed(e.to_string()))?;
    let dim = |n: Option<usize>, m: &JsonMatrix| n.unwrap_or(m.len());
    match parsed {
        PlaneJson::Frame { n, x, y } => {
            let n = dim(n, &x);
            LagrangianPlane::from_xy(matrix_from_json(&x, n, "X")?, matrix_from_json(&y, n, "Y")?, tol)
        }
        PlaneJson::Projector { n, p, theta } => {
            let n = dim(n, &p);
            let pt = ProjectorTheta::new(matrix_from_json(&p, n, "P")?, matrix_from_json(&theta, n, "Theta")?, tol)?;
            plane_from_projector_theta(&pt, tol)
        }
        PlaneJson::CoFrame { n, a, b } => {
            let n = dim(n, &a);
            CoFrame { a: matrix_from_json(&a, n, "A")?, b: matrix_from_json(&b, n, "B")? }.to_plane(tol)
        }
    }
}

/// Serializes the stored orthonormal frame.
pub fn plane_to_json(l: &LagrangianPlane) -> serde_json::Value {
    serde_json::json!({ "n": l.n(), "X": matrix_to_json(l.x()), "Y": matrix_to_json(l.y()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::from_real_rows;

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    fn periodic() -> LagrangianPlane {
        LagrangianPlane::from_xy(
            from_real_rows(&[&[1.0, 0.0], &[1.0, 0.0]]),
            from_real_rows(&[&[0.0, 1.0], &[0.0, -1.0]]),
            &tol(),
        )
        .unwrap()
    }

    fn delta(s: f64) -> LagrangianPlane {
        LagrangianPlane::from_xy(
            from_real_rows(&[&[1.0, 0.0], &[1.0, 0.0]]),
            from_real_rows(&[&[s, 1.0], &[0.0, -1.0]]),
            &tol(),
        )
        .unwrap()
    }

    fn vec(entries: &[Complex64]) -> DVector<Complex64> {
        DVector::from_column_slice(entries)
    }

    #[test]
    fn omega_basics() {
        let u = vec(&[c64(1.0, 0.0), c64(0.0, 0.0)]);
        let v = vec(&[c64(0.0, 0.0), c64(1.0, 0.0)]);
        assert_eq!(omega(&u, &v).unwrap(), c64(1.0, 0.0));
        let r = vec(&[c64(0.3, 0.0), c64(-1.2, 0.0), c64(2.0, 0.0), c64(0.7, 0.0)]);
        assert!(omega(&r, &r).unwrap().norm() < 1e-15);
        let w = vec(&[c64(0.3, 1.0), c64(-1.2, 0.5), c64(2.0, -0.1), c64(0.7, 0.2)]);
        assert!(omega(&w, &w).unwrap().re.abs() < 1e-15);
        assert!(omega(&u, &vec(&[c64(1.0, 0.0)])).is_err());
    }

    #[test]
    fn omega_is_skew_hermitian() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let u = random_complex_gaussian(6, 1, &mut rng).column(0).into_owned();
            let v = random_complex_gaussian(6, 1, &mut rng).column(0).into_owned();
            let a = omega(&u, &v).unwrap();
            let b = omega(&v, &u).unwrap();
            assert!((a + b.conj()).norm() < 1e-13);
        }
    }

    #[test]
    fn lagrangian_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = random_hermitian(3, &mut rng);
        let f = Frame::new(identity(3), h, &tol()).unwrap();
        assert!(is_lagrangian(&f, &tol()));
        let per = Frame::new(
            from_real_rows(&[&[1.0, 0.0], &[1.0, 0.0]]),
            from_real_rows(&[&[0.0, 1.0], &[0.0, -1.0]]),
            &tol(),
        )
        .unwrap();
        assert!(is_lagrangian(&per, &tol()));
        let skew = Frame::new(identity(2), identity(2) * c64(0.0, 1.0), &tol()).unwrap();
        assert!(!is_lagrangian(&skew, &tol()));
        assert!(matches!(
            Frame::new(zeros(2, 2), from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]), &tol()),
            Err(SymplecticError::RankDeficientFrame { .. })
        ));
    }

    #[test]
    fn pj_identity_for_random_planes() {
        for seed in 0..20 {
            let l = random_lagrangian(1 + (seed as usize % 5), seed);
            let p = l.projector();
            let j = symplectic_j(l.n());
            assert!((&j * &p + &p * &j - &j).norm() < 1e-12);
        }
    }

    #[test]
    fn projector_theta_examples() {
        let n = 2;
        let h = plane_from_projector_theta(&ProjectorTheta::new(identity(n), zeros(n, n), &tol()).unwrap(), &tol())
            .unwrap();
        assert!(h.same_plane(&LagrangianPlane::horizontal(n), &tol()));
        let v = plane_from_projector_theta(&ProjectorTheta::new(zeros(n, n), zeros(n, n), &tol()).unwrap(), &tol())
            .unwrap();
        assert!(v.same_plane(&LagrangianPlane::vertical(n), &tol()));
        let m0 = from_real_rows(&[&[-1.0, 1.0], &[1.0, -1.0]]);
        let g = plane_from_projector_theta(&ProjectorTheta::new(identity(n), m0.clone(), &tol()).unwrap(), &tol())
            .unwrap();
        assert!(g.same_plane(&LagrangianPlane::graph(&m0, &tol()).unwrap(), &tol()));
    }

    #[test]
    fn projector_theta_from_planes() {
        let pt = projector_theta_from_plane(&LagrangianPlane::vertical(3), &tol());
        assert!(pt.p.norm() < 1e-14);

        let m = from_real_rows(&[&[2.0, 0.5], &[0.5, -1.0]]);
        let pt = projector_theta_from_plane(&LagrangianPlane::graph(&m, &tol()).unwrap(), &tol());
        assert!((&pt.p - identity(2)).norm() < 1e-12);
        assert!((&pt.theta - &m).norm() < 1e-12);

        // f(0) = f(1), f'(0) - f'(1) = s f(0): on e = (1,1)/sqrt2, Θ = s/2.
        let pt = projector_theta_from_plane(&delta(2.0), &tol());
        let half = c64(0.5, 0.0);
        let expected_p = from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]) * half;
        assert!((&pt.p - &expected_p).norm() < 1e-12);
        assert!((&pt.theta - &expected_p).norm() < 1e-12);
    }

    #[test]
    fn projector_theta_round_trip() {
        for seed in 0..30 {
            let l = random_lagrangian(1 + seed as usize % 4, seed);
            let pt = projector_theta_from_plane(&l, &tol());
            let back = plane_from_projector_theta(&pt, &tol()).unwrap();
            assert!(back.same_plane(&l, &tol()), "seed {seed}");
        }
        // A zero projector built from an empty column block: X is roundoff, not structure.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = random_unitary(2, &mut rng).columns(0, 0).into_owned();
        let pt = ProjectorTheta::new(&q * q.adjoint(), zeros(2, 2), &tol()).unwrap();
        let back = projector_theta_from_plane(&plane_from_projector_theta(&pt, &tol()).unwrap(), &tol());
        assert_eq!(back.rank(), 0);
        assert!(back.theta.norm() < 1e-14);
    }

    #[test]
    fn coframe_round_trip() {
        for seed in 0..10 {
            let l = random_lagrangian(3, seed);
            let cf = CoFrame::from_plane(&l);
            assert!((&cf.a * cf.b.adjoint() - &cf.b * cf.a.adjoint()).norm() < 1e-12);
            assert!(cf.to_plane(&tol()).unwrap().same_plane(&l, &tol()));
        }
    }

    #[test]
    fn symplectic_complement_examples() {
        let l = LinearRelation::from_plane(&random_lagrangian(3, 5));
        assert!(l.symplectic_complement(&tol()).same_subspace(&l, &tol()));
        let z = LinearRelation::zero(2);
        assert_eq!(z.symplectic_complement(&tol()).dim(), 4);
        let e1 = from_real_rows(&[&[1.0], &[0.0], &[0.0], &[0.0]]);
        let w = LinearRelation::new(2, &e1, &tol()).unwrap();
        let c = w.symplectic_complement(&tol());
        assert_eq!(c.dim(), 3);
        let j = symplectic_j(2);
        assert!((e1.adjoint() * &j * c.basis()).norm() < 1e-12);
    }

    #[test]
    fn relation_arithmetic_on_graphs() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = random_hermitian(3, &mut rng);
        let b = random_hermitian(3, &mut rng);
        let ga = LagrangianPlane::graph(&a, &tol()).unwrap();
        let gb = LagrangianPlane::graph(&b, &tol()).unwrap();
        let d = relation_difference(&ga, &gb, &tol()).unwrap();
        let expected = LinearRelation::from_plane(&LagrangianPlane::graph(&(&a - &b), &tol()).unwrap());
        assert!(d.same_subspace(&expected, &tol()));

        let self_diff = relation_difference(&ga, &ga, &tol()).unwrap();
        assert!(self_diff.same_subspace(&LinearRelation::from_plane(&LagrangianPlane::horizontal(3)), &tol()));

        let inv = relation_inverse(&LinearRelation::from_plane(&ga));
        let a_inv = a.clone().try_inverse().unwrap();
        let expected = LinearRelation::from_plane(&LagrangianPlane::graph(&a_inv, &tol()).unwrap());
        assert!(inv.same_subspace(&expected, &tol()));
        assert!(relation_inverse(&inv).same_subspace(&LinearRelation::from_plane(&ga), &tol()));

        let v = LinearRelation::from_plane(&LagrangianPlane::vertical(3));
        assert!(relation_inverse(&v).same_subspace(&LinearRelation::from_plane(&LagrangianPlane::horizontal(3)), &tol()));
    }

    #[test]
    fn per_minus_aper_is_lagrangian() {
        let aper = LagrangianPlane::from_xy(
            from_real_rows(&[&[1.0, 0.0], &[-1.0, 0.0]]),
            from_real_rows(&[&[0.0, 1.0], &[0.0, 1.0]]),
            &tol(),
        )
        .unwrap();
        let d = relation_difference(&periodic(), &aper, &tol()).unwrap();
        assert_eq!(d.dim(), 2);
        assert!(d.is_lagrangian(&tol()));
    }

    #[test]
    fn kernel_and_mul() {
        let a = from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        let ga = LinearRelation::from_plane(&LagrangianPlane::graph(&a, &tol()).unwrap());
        assert_eq!(ga.kernel(&tol()).ncols(), 1);
        assert_eq!(ga.mul(&tol()).ncols(), 0);
        let v = LinearRelation::from_plane(&LagrangianPlane::vertical(2));
        assert_eq!(v.kernel(&tol()).ncols(), 0);
        assert_eq!(v.mul(&tol()).ncols(), 2);
        let per = LinearRelation::from_plane(&periodic());
        let k = per.kernel(&tol());
        assert_eq!(k.ncols(), 1);
        assert!((k[(0, 0)] - k[(1, 0)]).norm() < 1e-12);
        assert_eq!(per.mul(&tol()).ncols(), 1);
    }

    #[test]
    fn graph_operator_examples() {
        let h = from_real_rows(&[&[1.0, 2.0], &[2.0, -3.0]]);
        let l = LagrangianPlane::from_xy(identity(2), h.clone(), &tol()).unwrap();
        assert!((graph_operator(&l, &tol()).unwrap() - &h).norm() < 1e-12);
        let two = c64(2.0, 0.0);
        let l2 = LagrangianPlane::from_xy(identity(2) * two, &h * two, &tol()).unwrap();
        assert!((graph_operator(&l2, &tol()).unwrap() - &h).norm() < 1e-12);
        assert!(matches!(
            graph_operator(&LagrangianPlane::vertical(2), &tol()),
            Err(SymplecticError::MultivaluedRelation(2))
        ));
    }

    #[test]
    fn unitary_parametrization() {
        let u = unitary_param(&LagrangianPlane::horizontal(2));
        assert!((u - identity(2)).norm() < 1e-14);
        let u = unitary_param(&LagrangianPlane::vertical(2));
        assert!((u + identity(2)).norm() < 1e-14);

        let h = from_real_rows(&[&[0.5, -1.0], &[-1.0, 2.0]]);
        let i = c64(0.0, 1.0);
        let cayley = (identity(2) + &h * i) * (identity(2) - &h * i).try_inverse().unwrap();
        let u = unitary_param(&LagrangianPlane::graph(&h, &tol()).unwrap());
        assert!((&u - &cayley).norm() < 1e-12);
        assert!((u.adjoint() * &u - identity(2)).norm() < 1e-12);

        let back = plane_from_unitary(&u, &tol()).unwrap();
        assert!(back.same_plane(&LagrangianPlane::graph(&h, &tol()).unwrap(), &tol()));
        assert!(plane_from_unitary(&identity(3), &tol()).unwrap().same_plane(&LagrangianPlane::horizontal(3), &tol()));
    }

    #[test]
    fn random_planes_are_generic() {
        for seed in 0..100u64 {
            let n = 1 + (seed as usize % 6);
            let a = random_lagrangian(n, seed);
            let b = random_lagrangian(n, seed + 1000);
            assert!(is_lagrangian(a.frame(), &tol()));
            assert_eq!(a.intersection_dim(&b, &tol()).unwrap(), 0, "seed {seed}");
        }
    }

    #[test]
    fn symplectic_maps() {
        let l = random_lagrangian(3, 42);
        assert!(symplectic_apply(&identity(6), &l, &tol()).unwrap().same_plane(&l, &tol()));

        let j = symplectic_j(3);
        let jl = symplectic_apply(&j, &l, &tol()).unwrap();
        let expected = LagrangianPlane::from_xy(l.y().clone(), -l.x(), &tol()).unwrap();
        assert!(jl.same_plane(&expected, &tol()));

        let eps = 0.125;
        let mut g = identity(6);
        g.view_mut((0, 3), (3, 3)).copy_from(&(identity(3) * c64(eps, 0.0)));
        let gl = symplectic_apply(&g, &l, &tol()).unwrap();
        let expected = LagrangianPlane::from_xy(l.x() + l.y() * c64(eps, 0.0), l.y().clone(), &tol()).unwrap();
        assert!(gl.same_plane(&expected, &tol()));

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let g = random_symplectic(3, &mut rng);
            assert!(symplectic_defect(&g) < 1e-12);
        }
        let mut bad = identity(6);
        bad[(0, 0)] = c64(2.0, 0.0);
        assert!(matches!(symplectic_apply(&bad, &l, &tol()), Err(SymplecticError::NotSymplectic { .. })));
    }

    #[test]
    fn json_round_trip_and_alternatives() {
        let l = random_lagrangian(2, 9);
        let text = plane_to_json(&l).to_string();
        assert!(plane_from_json(&text, &tol()).unwrap().same_plane(&l, &tol()));

        let pt = r#"{"P": [[1, 0], [0, 0]], "Theta": [[[2, 0], [0, 0]], [[0, 0], [0, 0]]]}"#;
        let from_pt = plane_from_json(pt, &tol()).unwrap();
        let expected = plane_from_projector_theta(
            &ProjectorTheta::new(
                from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]),
                from_real_rows(&[&[2.0, 0.0], &[0.0, 0.0]]),
                &tol(),
            )
            .unwrap(),
            &tol(),
        )
        .unwrap();
        assert!(from_pt.same_plane(&expected, &tol()));

        let cf = r#"{"n": 1, "A": [[[0, 0]]], "B": [[[1, 0]]]}"#;
        assert!(plane_from_json(cf, &tol()).unwrap().same_plane(&LagrangianPlane::horizontal(1), &tol()));

        assert!(plane_from_json(r#"{"X": [[1]]}"#, &tol()).is_err());
        assert!(plane_from_json(r#"{"X": [[1]], "Y": [[[0, 1]]]}"#, &tol()).is_err());
    }

    #[test]
    fn intersection_of_catalog_planes() {
        assert_eq!(periodic().intersection_dim(&delta(1.5), &tol()).unwrap(), 1);
        assert!(periodic().same_plane(&delta(0.0), &tol()));
    }
}
