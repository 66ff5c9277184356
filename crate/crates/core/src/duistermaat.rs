//! Duistermaat triple index.
//!
//! The main route uses ε-Robin maps `R = Y (X + εY)^{-1}`:
//! `iD = n-(R2 - R1) + n-(R3 - R2) - n-(R3 - R1)`. An independent route
//! through Q-forms relative to an auxiliary transversal plane is kept as an
//! oracle.

use std::collections::{BTreeMap, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::linalg::{
    c64, hcat, hermitian_inertia, hermitian_inertia_scaled, hermitian_part, identity, nullspace, orthonormal_basis, rank_with_tol,
    sigma_min, singular_values, spectral_norm, zeros, ComplexMatrix, LinalgError, ToleranceConfig,
};
use crate::symplectic::{
    plane_from_projector_theta, random_hermitian, random_lagrangian_with, random_symplectic, random_unitary,
    symplectic_apply, symplectic_j, LagrangianPlane, LinearRelation, ProjectorTheta, SymplecticError,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DuistermaatError {
    #[error("no admissible epsilon on the ladder 2^-3 .. 2^-40")]
    NoAdmissibleEpsilon,
    #[error("epsilon {epsilon} is (numerically) in the exception set: sigma_min = {sigma:e}")]
    EpsilonInExceptionSet { epsilon: f64, sigma: f64 },
    #[error("index evaluations disagree: {first} at eps={eps_first}, {second} at eps={eps_second}")]
    InternalInconsistency { first: i64, second: i64, eps_first: f64, eps_second: f64 },
    #[error("index formula produced a negative value {0}")]
    NegativeIndex(i64),
    #[error("no transversal auxiliary plane found in {0} attempts")]
    TransversalSearchFailed(usize),
    #[error("planes are not transversal: {0}")]
    NotTransversal(&'static str),
    #[error("transversality precondition violated: {0}")]
    TransversalityViolated(&'static str),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error(transparent)]
    Symplectic(#[from] SymplecticError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

type Result<T> = std::result::Result<T, DuistermaatError>;

/// Hermitian matrix `Y (X + εY)^{-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RobinMap {
    pub epsilon: f64,
    pub r: ComplexMatrix,
}

/// An ε outside the exception set of every supplied plane, with the
/// smallest `σ_min(X_j + ε Y_j)` seen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EpsilonWitness {
    pub epsilon: f64,
    pub min_sigma: f64,
}

const LADDER: std::ops::RangeInclusive<i32> = 3..=40;
const ADMISSIBLE_REL: f64 = 1e-6;

fn shifted(l: &LagrangianPlane, eps: f64) -> ComplexMatrix {
    l.x() + l.y() * c64(eps, 0.0)
}

fn admissibility(planes: &[&LagrangianPlane], eps: f64) -> (bool, f64) {
    let mut min_sigma = f64::INFINITY;
    let mut scale: f64 = 0.0;
    for l in planes {
        min_sigma = min_sigma.min(sigma_min(&shifted(l, eps)));
        scale = scale.max(spectral_norm(l.x()) + eps * spectral_norm(l.y()));
    }
    (min_sigma >= ADMISSIBLE_REL * scale, min_sigma)
}

fn check_common_n(planes: &[&LagrangianPlane]) -> Result<usize> {
    let n = planes.first().map(|l| l.n()).ok_or_else(|| DuistermaatError::DimensionMismatch("no planes".into()))?;
    if planes.iter().any(|l| l.n() != n) {
        return Err(DuistermaatError::DimensionMismatch("planes have different n".into()));
    }
    Ok(n)
}

/// Admissible ladder values in order.
pub fn admissible_epsilons<'a>(planes: &'a [&'a LagrangianPlane]) -> impl Iterator<Item = EpsilonWitness> + 'a {
    LADDER.filter_map(move |k| {
        let eps = (-k as f64).exp2();
        let (ok, min_sigma) = admissibility(planes, eps);
        ok.then_some(EpsilonWitness { epsilon: eps, min_sigma })
    })
}

pub fn choose_epsilon(planes: &[&LagrangianPlane]) -> Result<EpsilonWitness> {
    check_common_n(planes)?;
    admissible_epsilons(planes).next().ok_or(DuistermaatError::NoAdmissibleEpsilon)
}

pub fn robin_map(l: &LagrangianPlane, epsilon: f64) -> Result<RobinMap> {
    let a = shifted(l, epsilon);
    let sigma = sigma_min(&a);
    let scale = spectral_norm(l.x()) + epsilon.abs() * spectral_norm(l.y());
    if sigma < ADMISSIBLE_REL * scale || sigma == 0.0 {
        return Err(DuistermaatError::EpsilonInExceptionSet { epsilon, sigma });
    }
    let inv = a.try_inverse().ok_or(DuistermaatError::EpsilonInExceptionSet { epsilon, sigma })?;
    Ok(RobinMap { epsilon, r: hermitian_part(&(l.y() * inv)) })
}

/// `n-(b - a)` with the zero threshold scaled by the operands.
fn n_minus_diff(b: &ComplexMatrix, a: &ComplexMatrix, tol: &ToleranceConfig) -> Result<i64> {
    let scale = spectral_norm(a).max(spectral_norm(b));
    Ok(hermitian_inertia_scaled(&(b - a), scale, tol)?.n_minus as i64)
}

/// Index from the Robin maps at one fixed ε.
pub fn index_at_epsilon(
    l1: &LagrangianPlane,
    l2: &LagrangianPlane,
    l3: &LagrangianPlane,
    epsilon: f64,
    tol: &ToleranceConfig,
) -> Result<i64> {
    let r1 = robin_map(l1, epsilon)?.r;
    let r2 = robin_map(l2, epsilon)?.r;
    let r3 = robin_map(l3, epsilon)?.r;
    Ok(n_minus_diff(&r2, &r1, tol)? + n_minus_diff(&r3, &r2, tol)? - n_minus_diff(&r3, &r1, tol)?)
}

/// `iD(L1, L2, L3)`, evaluated at the first two admissible ladder values and
/// required to agree.
pub fn duistermaat_index(
    l1: &LagrangianPlane,
    l2: &LagrangianPlane,
    l3: &LagrangianPlane,
    tol: &ToleranceConfig,
) -> Result<usize> {
    let planes = [l1, l2, l3];
    check_common_n(&planes)?;
    let mut eps = admissible_epsilons(&planes);
    let first = eps.next().ok_or(DuistermaatError::NoAdmissibleEpsilon)?;
    let second = eps.next().ok_or(DuistermaatError::NoAdmissibleEpsilon)?;
    let a = index_at_epsilon(l1, l2, l3, first.epsilon, tol)?;
    let b = index_at_epsilon(l1, l2, l3, second.epsilon, tol)?;
    if a != b {
        return Err(DuistermaatError::InternalInconsistency {
            first: a,
            second: b,
            eps_first: first.epsilon,
            eps_second: second.epsilon,
        });
    }
    if a < 0 {
        return Err(DuistermaatError::NegativeIndex(a));
    }
    Ok(a as usize)
}

/// Matrix, in the frame basis of `alpha`, of `(u1, u2) -> ω(u1, L u2)` where
/// `gamma` is the graph of `L: alpha -> beta`.
pub fn q_form(
    alpha: &LagrangianPlane,
    beta: &LagrangianPlane,
    gamma: &LagrangianPlane,
    tol: &ToleranceConfig,
) -> Result<ComplexMatrix> {
    check_common_n(&[alpha, beta, gamma])?;
    if alpha.intersection_dim(beta, tol)? != 0 {
        return Err(DuistermaatError::NotTransversal("alpha and beta intersect"));
    }
    if beta.intersection_dim(gamma, tol)? != 0 {
        return Err(DuistermaatError::NotTransversal("beta and gamma intersect"));
    }
    let n = alpha.n();
    let za = alpha.stacked();
    let zb = beta.stacked();
    let coeffs = hcat(&za, &zb)
        .lu()
        .solve(&gamma.stacked())
        .ok_or(DuistermaatError::NotTransversal("alpha and beta intersect"))?;
    let a = coeffs.rows(0, n).into_owned();
    let b = coeffs.rows(n, n).into_owned();
    let a_inv = a.try_inverse().ok_or(DuistermaatError::NotTransversal("beta and gamma intersect"))?;
    let q = za.adjoint() * symplectic_j(n) * zb * b * a_inv;
    Ok(q)
}

const Q_ORACLE_ATTEMPTS: usize = 64;
const Q_ORACLE_SEPARATION: f64 = 1e-3;

/// Oracle route: `n-(Q(L2,Ĺ;L3)) - n-(Q(L1,Ĺ;L3)) + n-(Q(L1,Ĺ;L2))` for a
/// random `Ĺ` transversal to all three planes.
pub fn duistermaat_index_via_q(
    l1: &LagrangianPlane,
    l2: &LagrangianPlane,
    l3: &LagrangianPlane,
    tol: &ToleranceConfig,
    seed: u64,
) -> Result<usize> {
    let n = check_common_n(&[l1, l2, l3])?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..Q_ORACLE_ATTEMPTS {
        let hat = random_lagrangian_with(n, &mut rng);
        let separated = [l1, l2, l3]
            .iter()
            .all(|l| sigma_min(&hcat(&hat.stacked(), &l.stacked())) >= Q_ORACLE_SEPARATION);
        if !separated {
            continue;
        }
        let nm = |a: &LagrangianPlane, c: &LagrangianPlane| -> Result<i64> {
            Ok(hermitian_inertia(&hermitian_part(&q_form(a, &hat, c, tol)?), tol)?.n_minus as i64)
        };
        let value = nm(l2, l3)? - nm(l1, l3)? + nm(l1, l2)?;
        if value < 0 {
            return Err(DuistermaatError::NegativeIndex(value));
        }
        return Ok(value as usize);
    }
    Err(DuistermaatError::TransversalSearchFailed(Q_ORACLE_ATTEMPTS))
}

/// `n-(Θ - PMP)` on `range(P)`.
pub fn bl_index(m: &ComplexMatrix, pt: &ProjectorTheta, tol: &ToleranceConfig) -> Result<usize> {
    if m.shape() != pt.p.shape() {
        return Err(DuistermaatError::DimensionMismatch(format!(
            "M is {:?}, P is {:?}",
            m.shape(),
            pt.p.shape()
        )));
    }
    let q = orthonormal_basis(&pt.p, tol);
    if q.ncols() == 0 {
        return Ok(0);
    }
    let form = q.adjoint() * (&pt.theta - &pt.p * m * &pt.p) * &q;
    Ok(hermitian_inertia(&hermitian_part(&form), tol)?.n_minus)
}

/// `iD(K⊕0, 0⊕K, L_Θ)` for `L_Θ = {(κ, κ' + Θκ) : κ ∈ K̂, κ' ⊥ K̂}`.
///
/// `khat` holds an orthonormal basis of `K̂` (n x k), `theta` is k x k in that
/// basis.
pub fn dn_index_check(khat: &ComplexMatrix, theta: &ComplexMatrix, tol: &ToleranceConfig) -> Result<usize> {
    let (n, k) = khat.shape();
    if theta.shape() != (k, k) {
        return Err(DuistermaatError::DimensionMismatch(format!("Theta must be {k}x{k}")));
    }
    let comp = if k == 0 { identity(n) } else { nullspace(&khat.adjoint(), tol) };
    let x = hcat(khat, &zeros(n, n - k));
    let y = hcat(&(khat * theta), &comp);
    let l = LagrangianPlane::from_xy(x, y, tol)?;
    duistermaat_index(&LagrangianPlane::horizontal(n), &LagrangianPlane::vertical(n), &l, tol)
}

/// `Δ = (L1 - L3)^{-1} - (L2 - L3)^{-1}` as a linear relation.
pub fn delta_relation(
    l1: &LagrangianPlane,
    l2: &LagrangianPlane,
    l3: &LagrangianPlane,
    tol: &ToleranceConfig,
) -> Result<LinearRelation> {
    let n = check_common_n(&[l1, l2, l3])?;
    if l3.intersection_dim(l1, tol)? != 0 {
        return Err(DuistermaatError::TransversalityViolated("L3 meets L1"));
    }
    if l3.intersection_dim(l2, tol)? != 0 {
        return Err(DuistermaatError::TransversalityViolated("L3 meets L2"));
    }
    if l3.intersection_dim(&LagrangianPlane::vertical(n), tol)? != 0 {
        return Err(DuistermaatError::TransversalityViolated("L3 meets the vertical plane"));
    }
    let r3 = LinearRelation::from_plane(l3);
    let a = LinearRelation::from_plane(l1).difference(&r3, tol)?.inverse();
    let b = LinearRelation::from_plane(l2).difference(&r3, tol)?.inverse();
    Ok(a.difference(&b, tol)?)
}

/// Nullity, index and rank of the operator whose graph is Δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DeltaSummary {
    pub n_zero: usize,
    pub n_minus: usize,
    pub rank: usize,
}

pub fn delta_summary(delta: &LinearRelation, tol: &ToleranceConfig) -> Result<DeltaSummary> {
    let op = delta.graph_operator(tol)?;
    let inertia = hermitian_inertia(&hermitian_part(&op), tol)?;
    // Same absolute floor as the inertia zero threshold, so that an operator
    // that is zero up to roundoff has rank 0.
    let sv = singular_values(&op);
    let floor = tol.inertia_zero_tol * sv.first().copied().unwrap_or(0.0).max(1.0);
    let rank = sv.iter().filter(|&&s| s > floor).count();
    Ok(DeltaSummary { n_zero: inertia.n_zero, n_minus: inertia.n_minus, rank })
}

// Randomized verification suites.

/// Per-check trial counts and failing trial seeds, serialized as
/// `{name: {trials, failures: [seeds]}}`.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
#[serde(transparent)]
pub struct VerifyReport {
    pub checks: BTreeMap<String, CheckStats>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckStats {
    pub trials: usize,
    pub failures: Vec<u64>,
}

impl VerifyReport {
    pub fn record(&mut self, name: &str, seed: u64, ok: bool) {
        let entry = self.checks.entry(name.to_string()).or_default();
        entry.trials += 1;
        if !ok {
            entry.failures.push(seed);
        }
    }

    pub fn merge(&mut self, other: VerifyReport) {
        for (name, stats) in other.checks {
            let entry = self.checks.entry(name).or_default();
            entry.trials += stats.trials;
            entry.failures.extend(stats.failures);
        }
    }

    pub fn total_failures(&self) -> usize {
        self.checks.values().map(|s| s.failures.len()).sum()
    }

    pub fn is_clean(&self) -> bool {
        self.total_failures() == 0
    }

    pub fn failures_of(&self, name: &str) -> usize {
        self.checks.get(name).map_or(0, |s| s.failures.len())
    }

    pub fn trials_of(&self, name: &str) -> usize {
        self.checks.get(name).map_or(0, |s| s.trials)
    }
}

/// Seed of trial `i` derived from a master seed.
pub fn trial_seed(master: u64, i: usize) -> u64 {
    master.wrapping_add((i as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Named pass/fail results of one randomized trial.
pub type TrialOutcome = Vec<(&'static str, bool)>;

/// Runs `trial` for each seed in parallel. A trial with any failed check or
/// evaluation error is rerun once with a tenfold tighter zero threshold.
pub fn run_trials<F, E>(names: &[&'static str], trials: usize, seed: u64, tol: &ToleranceConfig, trial: F) -> VerifyReport
where
    F: Fn(u64, &ToleranceConfig) -> std::result::Result<TrialOutcome, E> + Sync,
{
    let outcomes: Vec<(u64, Option<TrialOutcome>)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, i);
            let first = trial(s, tol);
            let clean = matches!(&first, Ok(out) if out.iter().all(|(_, ok)| *ok));
            if clean {
                return (s, first.ok());
            }
            let tighter = tol.with_inertia_zero_tol(tol.inertia_zero_tol / 10.0);
            (s, trial(s, &tighter).ok())
        })
        .collect();
    let mut report = VerifyReport::default();
    for (s, outcome) in outcomes {
        match outcome {
            Some(checks) => {
                for (name, ok) in checks {
                    report.record(name, s, ok);
                }
            }
            None => {
                for name in names {
                    report.record(name, s, false);
                }
            }
        }
    }
    report
}

/// Random Hermitian matrix `V D V*` of rank `k` with `|d_i| ∈ [0.5, 2]`.
pub fn random_low_rank_hermitian<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> ComplexMatrix {
    if k == 0 {
        return zeros(n, n);
    }
    let u = random_unitary(n, rng);
    let v = u.columns(0, k).into_owned();
    let d = ComplexMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        k,
        (0..k).map(|_| {
            let mag: f64 = rng.random_range(0.5..2.0);
            c64(if rng.random_bool(0.5) { mag } else { -mag }, 0.0)
        }),
    ));
    &v * d * v.adjoint()
}

/// Random symplectic map: half the time a general one, otherwise a unitary rotation.
pub fn random_map<R: Rng + ?Sized>(n: usize, rng: &mut R) -> ComplexMatrix {
    if rng.random_bool(0.5) {
        return random_symplectic(n, rng);
    }
    // Unitary symplectic rotation [[cV, sV], [-sV, cV]].
    let v = random_unitary(n, rng);
    let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (c, s) = (theta.cos(), theta.sin());
    let mut g = zeros(2 * n, 2 * n);
    g.view_mut((0, 0), (n, n)).copy_from(&(&v * c64(c, 0.0)));
    g.view_mut((0, n), (n, n)).copy_from(&(&v * c64(s, 0.0)));
    g.view_mut((n, 0), (n, n)).copy_from(&(&v * c64(-s, 0.0)));
    g.view_mut((n, n), (n, n)).copy_from(&(&v * c64(c, 0.0)));
    g
}

/// Random tuple of planes with controlled pairwise intersections.
///
/// Planes are graphs `H_i + V D V*` of low-rank perturbations of earlier
/// members, fresh random graphs, the vertical plane or random (P,Θ) planes,
/// all mapped by one random symplectic matrix.
pub fn random_configuration<R: Rng + ?Sized>(n: usize, count: usize, rng: &mut R) -> Vec<LagrangianPlane> {
    let tol = ToleranceConfig::default();
    let mut graphs: Vec<Option<ComplexMatrix>> = Vec::with_capacity(count);
    let mut planes = Vec::with_capacity(count);
    for j in 0..count {
        let mode = rng.random_range(0..10);
        let derived_from: Vec<usize> = (0..j).filter(|&i| graphs[i].is_some()).collect();
        let (graph, plane) = if mode < 6 && !derived_from.is_empty() {
            let i = derived_from[rng.random_range(0..derived_from.len())];
            let k = rng.random_range(0..=n);
            let h = graphs[i].as_ref().unwrap() + random_low_rank_hermitian(n, k, rng);
            let p = LagrangianPlane::graph(&h, &tol).expect("Hermitian graph");
            (Some(h), p)
        } else if mode == 8 {
            (None, LagrangianPlane::vertical(n))
        } else if mode == 9 {
            let r = rng.random_range(0..=n);
            let q = random_unitary(n, rng).columns(0, r).into_owned();
            let p = &q * q.adjoint();
            let theta = &p * random_hermitian(n, rng) * &p;
            let pt = ProjectorTheta { p, theta: hermitian_part(&theta) };
            (None, plane_from_projector_theta(&pt, &tol).expect("valid (P,Θ)"))
        } else {
            let h = random_hermitian(n, rng);
            let p = LagrangianPlane::graph(&h, &tol).expect("Hermitian graph");
            (Some(h), p)
        };
        graphs.push(graph);
        planes.push(plane);
    }
    let g = random_map(n, rng);
    planes.into_iter().map(|l| symplectic_apply(&g, &l, &tol).expect("symplectic map")).collect()
}

pub const IDENTITY_CHECKS: [&str; 10] = [
    "cocycle",
    "swap12",
    "cyclic",
    "swap23",
    "swap13",
    "special_cases",
    "bound",
    "symplectic_invariance",
    "rank_formula",
    "nonnegative",
];

struct IndexCache<'a> {
    planes: &'a [LagrangianPlane],
    tol: &'a ToleranceConfig,
    values: HashMap<(usize, usize, usize), i64>,
}

impl<'a> IndexCache<'a> {
    fn new(planes: &'a [LagrangianPlane], tol: &'a ToleranceConfig) -> Self {
        Self { planes, tol, values: HashMap::new() }
    }

    fn id(&mut self, a: usize, b: usize, c: usize) -> Result<i64> {
        if let Some(v) = self.values.get(&(a, b, c)) {
            return Ok(*v);
        }
        let v = duistermaat_index(&self.planes[a], &self.planes[b], &self.planes[c], self.tol)? as i64;
        self.values.insert((a, b, c), v);
        Ok(v)
    }

    fn dim(&self, a: usize, b: usize) -> Result<i64> {
        Ok(self.planes[a].intersection_dim(&self.planes[b], self.tol)? as i64)
    }
}

fn identity_trial(n: usize, seed: u64, tol: &ToleranceConfig) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut planes = random_configuration(n, 4, &mut rng);
    planes.push(LagrangianPlane::vertical(n));
    let nn = n as i64;
    let mut c = IndexCache::new(&planes, tol);
    let (l1, l2, l3, l4, f) = (0, 1, 2, 3, 4);
    let id123 = c.id(l1, l2, l3)?;
    let d12 = c.dim(l1, l2)?;
    let d13 = c.dim(l1, l3)?;
    let d23 = c.dim(l2, l3)?;

    let cocycle = id123 - c.id(l1, l2, l4)? + c.id(l1, l3, l4)? - c.id(l2, l3, l4)? == 0;
    let swap12 = id123 + c.id(l2, l1, l3)? == nn - d12;
    let cyclic = id123 - d13 == c.id(l3, l1, l2)? - d23;
    let swap23 = id123 + c.id(l1, l3, l2)? == nn - d23;
    let swap13 = id123 + c.id(l3, l2, l1)? == nn - d12 - d23 + d13;
    let special = c.id(l1, l1, l3)? == 0 && c.id(l1, l2, l2)? == 0 && c.id(l1, l2, l1)? == nn - d12;

    let b12 = planes[l1].intersection(&planes[l2], tol)?;
    let b23 = planes[l2].intersection(&planes[l3], tol)?;
    let sum_dim = if b12.ncols() + b23.ncols() == 0 { 0 } else { rank_with_tol(&hcat(&b12, &b23), tol) as i64 };
    let bound = id123 <= nn - sum_dim && nn - sum_dim <= nn - d12;
    let nonnegative = id123 >= 0;

    let g = random_map(n, &mut rng);
    let moved: Vec<LagrangianPlane> =
        planes[..3].iter().map(|l| symplectic_apply(&g, l, tol)).collect::<std::result::Result<_, _>>()?;
    let invariant = duistermaat_index(&moved[0], &moved[1], &moved[2], tol)? as i64 == id123;

    let rank = c.id(l1, l2, f)? + c.id(l2, l1, f)? == nn - d12;

    Ok(vec![
        ("cocycle", cocycle),
        ("swap12", swap12),
        ("cyclic", cyclic),
        ("swap23", swap23),
        ("swap13", swap13),
        ("special_cases", special),
        ("bound", bound),
        ("symplectic_invariance", invariant),
        ("rank_formula", rank),
        ("nonnegative", nonnegative),
    ])
}

/// Identity suite on random configurations in dimension `n`.
pub fn verify_identities(n: usize, trials: usize, seed: u64, tol: &ToleranceConfig) -> VerifyReport {
    run_trials(&IDENTITY_CHECKS, trials, seed, tol, |s, t| identity_trial(n, s, t))
}

pub const LIMIT_CHECKS: [&str; 5] = ["limit1", "limit1alt", "limit2", "limit3", "limit3alt"];
pub const LIMIT_DELTAS: [f64; 2] = [1e-3, 1e-4];

fn limits_trial(n: usize, seed: u64, tol: &ToleranceConfig) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ctol = ToleranceConfig::default();
    let m0 = random_hermitian(n, &mut rng);
    // Fixed planes: graphs of M0 + (rank-k perturbation) or the vertical plane,
    // so the path graph(M0 + tI) meets them only at t = 0 or |t| >= 1/2.
    let mut fixed = Vec::with_capacity(3);
    for _ in 0..3 {
        if rng.random_range(0..6) == 0 {
            fixed.push(LagrangianPlane::vertical(n));
        } else {
            let k = rng.random_range(0..=n);
            let h = &m0 + random_low_rank_hermitian(n, k, &mut rng);
            fixed.push(LagrangianPlane::graph(&h, &ctol)?);
        }
    }
    let g = random_map(n, &mut rng);
    let map = |l: &LagrangianPlane| symplectic_apply(&g, l, &ctol);
    let path = |t: f64| -> Result<LagrangianPlane> {
        Ok(map(&LagrangianPlane::graph(&(&m0 + identity(n) * c64(t, 0.0)), &ctol)?)?)
    };
    let l0 = path(0.0)?;
    let fixed: Vec<LagrangianPlane> = fixed.iter().map(map).collect::<std::result::Result<_, _>>()?;
    let (l1, l2, l3) = (&fixed[0], &fixed[1], &fixed[2]);
    let id = |a: &LagrangianPlane, b: &LagrangianPlane, c: &LagrangianPlane| -> Result<i64> {
        Ok(duistermaat_index(a, b, c, tol)? as i64)
    };
    let dim = |a: &LagrangianPlane, b: &LagrangianPlane| -> Result<i64> { Ok(a.intersection_dim(b, tol)? as i64) };

    let (d10, d20, d30) = (dim(l1, &l0)?, dim(l2, &l0)?, dim(l3, &l0)?);
    let base1 = id(&l0, l2, l3)?;
    let base2 = id(l1, &l0, l3)?;
    let base3 = id(l1, l2, &l0)?;
    let alt1 = id(l2, l3, &l0)?;
    let alt3_left = id(&l0, l1, l2)?;

    let mut ok = [true; 5];
    for &delta in &LIMIT_DELTAS {
        let lm = path(-delta)?;
        let lp = path(delta)?;
        let s1m = id(&lm, l2, l3)?;
        let s1p = id(&lp, l2, l3)?;
        ok[0] &= s1m == base1 && s1p == base1 + d20 - d30;
        ok[1] &= s1p == alt1;
        ok[2] &= id(l1, &lm, l3)? == base2 + d10 && id(l1, &lp, l3)? == base2 + d30;
        let s3m = id(l1, l2, &lm)?;
        let s3p = id(l1, l2, &lp)?;
        ok[3] &= s3m == base3 + d20 - d10 && s3p == base3;
        ok[4] &= s3m == alt3_left && s3p == base3;
    }
    Ok(LIMIT_CHECKS.iter().copied().zip(ok).collect())
}

/// One-sided limits along `L(t) = G graph(M0 + tI)` at `t = ±δ`.
pub fn verify_one_sided_limits(n: usize, trials: usize, seed: u64, tol: &ToleranceConfig) -> VerifyReport {
    run_trials(&LIMIT_CHECKS, trials, seed, tol, |s, t| limits_trial(n, s, t))
}

/// Agreement of the Robin route with the Q-form oracle.
pub fn verify_oracle(n: usize, trials: usize, seed: u64, tol: &ToleranceConfig) -> VerifyReport {
    run_trials(&["q_oracle"], trials, seed, tol, |s, t| -> Result<TrialOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let p = random_configuration(n, 3, &mut rng);
        let a = duistermaat_index(&p[0], &p[1], &p[2], t)?;
        let b = duistermaat_index_via_q(&p[0], &p[1], &p[2], t, s ^ 0x5151)?;
        Ok(vec![("q_oracle", a == b)])
    })
}

pub const KREIN_CHECKS: [&str; 4] = ["delta_is_graph", "delta_nullity", "delta_index", "delta_rank"];

/// Random triple with `L3` transversal to `L1`, `L2` and the vertical plane.
pub fn random_transversal_triple<R: Rng + ?Sized>(n: usize, rng: &mut R) -> [LagrangianPlane; 3] {
    let tol = ToleranceConfig::default();
    let v = LagrangianPlane::vertical(n);
    loop {
        let pair = random_configuration(n, 2, rng);
        let l3 = LagrangianPlane::graph(&(random_hermitian(n, rng) * c64(2.0, 0.0)), &tol).expect("graph");
        let far = |a: &LagrangianPlane| sigma_min(&hcat(&a.stacked(), &l3.stacked())) >= 1e-2;
        if far(&pair[0]) && far(&pair[1]) && far(&v) {
            let [a, b]: [LagrangianPlane; 2] = pair.try_into().expect("two planes");
            return [a, b, l3];
        }
    }
}

fn krein_trial(n: usize, seed: u64, tol: &ToleranceConfig) -> Result<TrialOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let [l1, l2, l3] = random_transversal_triple(n, &mut rng);
    let delta = delta_relation(&l1, &l2, &l3, tol)?;
    let d12 = l1.intersection_dim(&l2, tol)?;
    let id = duistermaat_index(&l1, &l2, &l3, tol)?;
    let is_graph = delta.dim() == n && delta.mul(tol).ncols() == 0;
    let summary = delta_summary(&delta, tol)?;
    Ok(vec![
        ("delta_is_graph", is_graph),
        ("delta_nullity", summary.n_zero == d12),
        ("delta_index", summary.n_minus == id),
        ("delta_rank", summary.rank == n - d12),
    ])
}

/// Nullity, index and rank of Δ against intersection dimension and iD.
pub fn verify_krein(n: usize, trials: usize, seed: u64, tol: &ToleranceConfig) -> VerifyReport {
    run_trials(&KREIN_CHECKS, trials, seed, tol, |s, t| krein_trial(n, s, t))
}

/// `bl_index` against `iD(graph M, plane(P,Θ), vertical)`.
pub fn verify_bl(n: usize, trials: usize, seed: u64, tol: &ToleranceConfig) -> VerifyReport {
    run_trials(&["bl_index"], trials, seed, tol, |s, t| -> Result<TrialOutcome> {
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let m = random_hermitian(n, &mut rng);
        let r = rng.random_range(0..=n);
        let q = random_unitary(n, &mut rng).columns(0, r).into_owned();
        let p = &q * q.adjoint();
        let theta = hermitian_part(&(&p * random_hermitian(n, &mut rng) * &p));
        let pt = ProjectorTheta { p, theta };
        let plane = plane_from_projector_theta(&pt, t)?;
        let expected = duistermaat_index(&LagrangianPlane::graph(&m, t)?, &plane, &LagrangianPlane::vertical(n), t)?;
        Ok(vec![("bl_index", bl_index(&m, &pt, t)? == expected)])
    })
}
