//! `-f'' + q f = λ f` on `(0, ℓ)` with traces `Γ0 f = (f(0), f(ℓ))`,
//! `Γ1 f = (f'(0), -f'(ℓ))`.

use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::ode::{integrate, Dp45Options, OdeScalar};
use super::ModelError;
use crate::linalg::{c64, from_real_rows, identity, zeros, ComplexMatrix, ToleranceConfig};
use crate::maslov::{MaslovError, Monotonicity, PlanePath};
use crate::symplectic::{Frame, LagrangianPlane};

type Result<T> = std::result::Result<T, ModelError>;
type C = Complex64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Potential {
    Zero,
    Constant(f64),
    /// Linear interpolation between `(x_i, q_i)`.
    Sampled { x: Vec<f64>, q: Vec<f64> },
}

impl Potential {
    pub fn sampled(x: Vec<f64>, q: Vec<f64>) -> Result<Self> {
        if x.len() != q.len() || x.len() < 2 {
            return Err(ModelError::InvalidPotential("need at least two (x, q) samples".into()));
        }
        if x.iter().chain(&q).any(|v| !v.is_finite()) {
            return Err(ModelError::InvalidPotential("non-finite sample".into()));
        }
        if x.windows(2).any(|w| w[1] <= w[0]) {
            return Err(ModelError::InvalidPotential("abscissae must be strictly increasing".into()));
        }
        Ok(Self::Sampled { x, q })
    }

    /// Parses CSV text with header `x,q`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let headers = rdr.headers().map_err(|e| ModelError::InvalidPotential(e.to_string()))?.clone();
        if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "q" {
            return Err(ModelError::InvalidPotential("expected header \"x,q\"".into()));
        }
        let (mut xs, mut qs) = (Vec::new(), Vec::new());
        for rec in rdr.deserialize::<(f64, f64)>() {
            let (x, q) = rec.map_err(|e| ModelError::InvalidPotential(e.to_string()))?;
            xs.push(x);
            qs.push(q);
        }
        Self::sampled(xs, qs)
    }

    pub fn value(&self, x: f64) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant(c) => *c,
            Self::Sampled { x: xs, q } => {
                let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
                let (x0, x1) = (xs[i - 1], xs[i]);
                q[i - 1] + (q[i] - q[i - 1]) * (x - x0) / (x1 - x0)
            }
        }
    }

    /// A lower bound for `q` on the sampled range.
    pub fn lower_bound(&self) -> f64 {
        match self {
            Self::Zero => 0.0,
            Self::Constant(c) => *c,
            Self::Sampled { q, .. } => q.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    fn constant_value(&self) -> Option<f64> {
        match self {
            Self::Zero => Some(0.0),
            Self::Constant(c) => Some(*c),
            Self::Sampled { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalProblem {
    length: f64,
    potential: Potential,
}

impl IntervalProblem {
    pub fn new(length: f64, potential: Potential) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(ModelError::InvalidProblem(format!("interval length {length} must be positive")));
        }
        if let Potential::Sampled { x, .. } = &potential {
            if x[0] > 0.0 || *x.last().unwrap() < length * (1.0 - 1e-12) {
                return Err(ModelError::InvalidPotential(format!("samples must span [0, {length}]")));
            }
        }
        if let Potential::Constant(c) = potential {
            if !c.is_finite() {
                return Err(ModelError::InvalidPotential("non-finite constant".into()));
            }
        }
        Ok(Self { length, potential })
    }

    pub fn free(length: f64) -> Self {
        Self::new(length, Potential::Zero).expect("positive length")
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn n(&self) -> usize {
        2
    }

    /// Below this real λ the Dirichlet problem is uniformly nonsingular and
    /// frames are built from the Dirichlet-to-Neumann map.
    pub fn dirichlet_threshold(&self) -> f64 {
        self.potential.lower_bound() - 1.0 / (self.length * self.length)
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut b = vec![0.0];
        if let Potential::Sampled { x, .. } = &self.potential {
            b.extend(x.iter().copied().filter(|&v| v > 0.0 && v < self.length));
        }
        b.push(self.length);
        b
    }
}

/// Values at `x = ℓ` of `c`, `s` with `c(0) = 1, c'(0) = 0, s(0) = 0, s'(0) = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalSolutions {
    pub c_l: C,
    pub cp_l: C,
    pub s_l: C,
    pub sp_l: C,
    /// `|c s' - c' s - 1|` at `x = ℓ`.
    pub wronskian_drift: f64,
}

/// Basis solutions at `x = ℓ` together with their λ-derivatives, each
/// solution stored as `exp(log) * [f, f', ∂λ f, ∂λ f']`.
#[derive(Debug, Clone, Copy)]
struct Shot {
    c: [C; 4],
    s: [C; 4],
    log_c: f64,
    log_s: f64,
}

impl Shot {
    fn unscaled(&self) -> ([C; 4], [C; 4]) {
        let (ec, es) = (self.log_c.exp(), self.log_s.exp());
        (self.c.map(|v| v * ec), self.s.map(|v| v * es))
    }

    /// `|W - 1|` relative to `max(1, |c s'| + |c' s|)`, so exponential growth of the
    /// solutions does not count as drift.
    fn wronskian_drift(&self) -> f64 {
        let (a, b) = (self.c[0] * self.s[1], self.c[1] * self.s[0]);
        let inv_scale = (-(self.log_c + self.log_s)).exp();
        ((a - b) - inv_scale).norm() / inv_scale.max(a.norm() + b.norm())
    }
}

const SERIES_CUTOFF: f64 = 1e-2;

/// `[c, c', s, s']` at `x` and their μ-derivatives for `-f'' = μ f`.
pub(crate) fn trig_fundamentals(mu: C, x: f64) -> ([C; 4], [C; 4]) {
    let z = -mu * x * x;
    let (c, s, ds) = if z.norm() < SERIES_CUTOFF {
        // c = Σ z^k/(2k)!, s = x Σ z^k/(2k+1)!, ds/dμ = -x^3 Σ k z^(k-1)/(2k+1)!
        let (mut c, mut s, mut ds) = (C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0));
        let mut zk = C::new(1.0, 0.0);
        let mut zkm1 = C::new(0.0, 0.0);
        let mut fact_even = 1.0;
        for k in 0..12 {
            let fact_odd = fact_even * (2 * k + 1) as f64;
            c += zk / fact_even;
            s += zk / fact_odd;
            if k >= 1 {
                ds += zkm1 * k as f64 / fact_odd;
            }
            zkm1 = zk;
            zk *= z;
            fact_even = fact_odd * (2 * k + 2) as f64;
        }
        (c, s * x, -ds * x * x * x)
    } else {
        let w = mu.sqrt();
        let c = (w * x).cos();
        let s = (w * x).sin() / w;
        (c, s, (c * x - s) / (mu * 2.0))
    };
    let dc = -s * x * 0.5;
    let cp = -mu * s;
    let dcp = -s - mu * ds;
    ([c, cp, s, c], [dc, dcp, ds, dc])
}

fn closed_form_shot(mu: C, l: f64) -> Shot {
    let (v, d) = trig_fundamentals(mu, l);
    Shot { c: [v[0], v[1], d[0], d[1]], s: [v[2], v[3], d[2], d[3]], log_c: 0.0, log_s: 0.0 }
}

/// Runs an `N`-component linear system across the potential's smooth pieces,
/// recording the state at each of the sorted `stops`.
fn propagate<T: OdeScalar, const N: usize, R, G>(
    p: &IntervalProblem,
    y0: [T; N],
    rhs: R,
    stops: &[f64],
    mut on_step: G,
) -> Result<([T; N], Vec<[T; N]>)>
where
    R: Fn(f64, &[T; N]) -> [T; N],
    G: FnMut(&mut [T; N]),
{
    let opts = Dp45Options::default();
    let breaks = p.breakpoints();
    let mut y = y0;
    let mut h = 1e-2 * p.length;
    let mut records = Vec::with_capacity(stops.len());
    let mut si = 0;
    for seg in breaks.windows(2) {
        let (x0, x1) = (seg[0], seg[1]);
        let (q0, q1) = (p.potential.value(x0), p.potential.value(x1));
        let q = move |x: f64| q0 + (q1 - q0) * (x - x0) / (x1 - x0);
        let mut x = x0;
        loop {
            let target = if si < stops.len() && stops[si] <= x1 { stops[si].max(x) } else { x1 };
            y = integrate(|t, v: &[T; N]| rhs(q(t), v), x, target, y, &mut h, &opts, &mut on_step)
                .map_err(|e| ModelError::Integration(e.to_string()))?;
            x = target;
            if si < stops.len() && stops[si] <= x1 {
                records.push(y);
                si += 1;
            } else {
                break;
            }
        }
    }
    while records.len() < stops.len() {
        records.push(y);
    }
    Ok((y, records))
}

const RESCALE_AT: f64 = 1e64;

/// Keeps each half of the state (one basis solution) bounded, accumulating
/// the removed scale in `logs`.
fn rescale_halves<T: OdeScalar, const N: usize>(y: &mut [T; N], logs: &mut [f64; 2]) {
    let half = N / 2;
    for (b, log) in logs.iter_mut().enumerate() {
        let block = &mut y[b * half..(b + 1) * half];
        let m = block.iter().fold(0.0f64, |m, v| m.max(v.magnitude()));
        if m > RESCALE_AT {
            for v in block.iter_mut() {
                *v = *v * (1.0 / m);
            }
            *log += m.ln();
        }
    }
}

fn ode_shot_complex(p: &IntervalProblem, lambda: C) -> Result<Shot> {
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let y0 = [one, zero, zero, zero, zero, one, zero, zero];
    let rhs = move |q: f64, y: &[C; 8]| {
        let k = C::new(q, 0.0) - lambda;
        [y[1], k * y[0], y[3], k * y[2] - y[0], y[5], k * y[4], y[7], k * y[6] - y[4]]
    };
    let mut logs = [0.0f64; 2];
    let (y, _) = propagate(p, y0, rhs, &[], |y: &mut [C; 8]| rescale_halves(y, &mut logs))?;
    Ok(Shot { c: [y[0], y[1], y[2], y[3]], s: [y[4], y[5], y[6], y[7]], log_c: logs[0], log_s: logs[1] })
}

/// Real λ: real arithmetic, and the λ-derivatives only when asked for.
fn ode_shot_real(p: &IntervalProblem, lambda: f64, derivs: bool) -> Result<Shot> {
    let mut logs = [0.0f64; 2];
    let r = |v: f64| C::new(v, 0.0);
    if derivs {
        let rhs = move |q: f64, y: &[f64; 8]| {
            let k = q - lambda;
            [y[1], k * y[0], y[3], k * y[2] - y[0], y[5], k * y[4], y[7], k * y[6] - y[4]]
        };
        let y0 = [1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0];
        let (y, _) = propagate(p, y0, rhs, &[], |y: &mut [f64; 8]| rescale_halves(y, &mut logs))?;
        Ok(Shot { c: [r(y[0]), r(y[1]), r(y[2]), r(y[3])], s: [r(y[4]), r(y[5]), r(y[6]), r(y[7])], log_c: logs[0], log_s: logs[1] })
    } else {
        let rhs = move |q: f64, y: &[f64; 4]| {
            let k = q - lambda;
            [y[1], k * y[0], y[3], k * y[2]]
        };
        let (y, _) = propagate(p, [1.0, 0.0, 0.0, 1.0], rhs, &[], |y: &mut [f64; 4]| rescale_halves(y, &mut logs))?;
        let z = r(0.0);
        Ok(Shot { c: [r(y[0]), r(y[1]), z, z], s: [r(y[2]), r(y[3]), z, z], log_c: logs[0], log_s: logs[1] })
    }
}

fn shoot(p: &IntervalProblem, lambda: C, derivs: bool) -> Result<Shot> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(ModelError::InvalidProblem("non-finite spectral parameter".into()));
    }
    match p.potential.constant_value() {
        Some(q) => Ok(closed_form_shot(lambda - q, p.length)),
        None if lambda.im == 0.0 => ode_shot_real(p, lambda.re, derivs),
        None => ode_shot_complex(p, lambda),
    }
}

/// `c, c', s, s'` at `x = ℓ`.
pub fn fundamental_solutions(p: &IntervalProblem, lambda: C) -> Result<FundamentalSolutions> {
    let shot = shoot(p, lambda, false)?;
    let (c, s) = shot.unscaled();
    Ok(FundamentalSolutions { c_l: c[0], cp_l: c[1], s_l: s[0], sp_l: s[1], wronskian_drift: shot.wronskian_drift() })
}

/// Which pair of solutions spans the kernel in a frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    /// `{c, s}`: `X = [[1, 0], [c, s]]`, `Y = [[0, 1], [-c', -s']]`.
    Cauchy,
    /// `{ψ, φ}` with `ψ(0) = φ(ℓ) = 1`, `ψ(ℓ) = φ(0) = 0`: `X = I`, `Y` the Dirichlet-to-Neumann map.
    Dirichlet,
}

/// Frame of `M(λ)` and its λ-derivative in the same basis.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyData {
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub dx: ComplexMatrix,
    pub dy: ComplexMatrix,
    pub basis: Basis,
}

fn mat2(a: C, b: C, c: C, d: C) -> ComplexMatrix {
    ComplexMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

fn cauchy_basis(shot: &Shot) -> CauchyData {
    let (c, s) = shot.unscaled();
    let (o, i) = (C::new(0.0, 0.0), C::new(1.0, 0.0));
    CauchyData {
        x: mat2(i, o, c[0], s[0]),
        y: mat2(o, i, -c[1], -s[1]),
        dx: mat2(o, o, c[2], s[2]),
        dy: mat2(o, o, -c[3], -s[3]),
        basis: Basis::Cauchy,
    }
}

fn dirichlet_basis_from_shot(shot: &Shot) -> CauchyData {
    let (c, s) = (&shot.c, &shot.s);
    let s2 = s[0] * s[0];
    let rc = (shot.log_c - shot.log_s).exp();
    let rs = (-shot.log_s).exp();
    let d00 = -c[0] / s[0] * rc;
    let d01 = rs / s[0];
    let d11 = -s[1] / s[0];
    let e00 = -(c[2] * s[0] - c[0] * s[2]) / s2 * rc;
    let e01 = -s[2] / s2 * rs;
    let e11 = -(s[3] * s[0] - s[1] * s[2]) / s2;
    CauchyData {
        x: identity(2),
        y: mat2(d00, d01, d01, d11),
        dx: zeros(2, 2),
        dy: mat2(e00, e01, e01, e11),
        basis: Basis::Dirichlet,
    }
}

/// Dirichlet-to-Neumann map of `-f'' = -κ² f` on `(0, ℓ)` and its λ-derivative.
fn dirichlet_basis_closed(kappa: f64, l: f64) -> CauchyData {
    let x = kappa * l;
    let e = (-2.0 * x).exp();
    let coth = (1.0 + e) / (1.0 - e);
    let csch = 2.0 * (-x).exp() / (1.0 - e);
    let a = -kappa * coth;
    let b = kappa * csch;
    // dκ/dλ = -1/(2κ)
    let dk = -0.5 / kappa;
    let da = -(coth - x * csch * csch) * dk;
    let db = (csch - x * csch * coth) * dk;
    CauchyData {
        x: identity(2),
        y: from_real_rows(&[&[a, b], &[b, a]]),
        dx: zeros(2, 2),
        dy: from_real_rows(&[&[da, db], &[db, da]]),
        basis: Basis::Dirichlet,
    }
}

fn cauchy_data_impl(p: &IntervalProblem, lambda: f64, derivs: bool) -> Result<CauchyData> {
    if lambda <= p.dirichlet_threshold() {
        if let Some(q) = p.potential.constant_value() {
            return Ok(dirichlet_basis_closed((q - lambda).sqrt(), p.length));
        }
        return Ok(dirichlet_basis_from_shot(&shoot(p, c64(lambda, 0.0), derivs)?));
    }
    Ok(cauchy_basis(&shoot(p, c64(lambda, 0.0), derivs)?))
}

/// Frame of the Cauchy data plane `M(λ)` with its λ-derivative, for real λ.
pub fn cauchy_data(p: &IntervalProblem, lambda: f64) -> Result<CauchyData> {
    cauchy_data_impl(p, lambda, true)
}

/// Frame of `M(λ)` for real λ.
pub fn cauchy_data_frame(p: &IntervalProblem, lambda: f64) -> Result<Frame> {
    let d = cauchy_data_impl(p, lambda, false)?;
    Ok(Frame::new(d.x, d.y, &ToleranceConfig::default())?)
}

/// Frame of `M(z)` in the `{c, s}` basis, for any complex `z`.
pub fn cauchy_data_frame_complex(p: &IntervalProblem, z: C) -> Result<Frame> {
    let d = cauchy_basis(&shoot(p, z, false)?);
    Ok(Frame::new(d.x, d.y, &ToleranceConfig::default())?)
}

/// `Γ0 f`, `Γ1 f` of the solution with `f(0) = f0`, `f'(0) = fp0` at real λ,
/// and the values `(f, f')` at the sorted points `xs`.
pub fn solution_profile(p: &IntervalProblem, lambda: f64, f0: C, fp0: C, xs: &[f64]) -> Result<Vec<(C, C)>> {
    match p.potential.constant_value() {
        Some(q) => Ok(xs
            .iter()
            .map(|&x| {
                let (v, _) = trig_fundamentals(c64(lambda - q, 0.0), x);
                (f0 * v[0] + fp0 * v[2], f0 * v[1] + fp0 * v[3])
            })
            .collect()),
        None => {
            let lam = c64(lambda, 0.0);
            let rhs = move |q: f64, y: &[C; 2]| [y[1], (C::new(q, 0.0) - lam) * y[0]];
            let (_, rec) = propagate(p, [f0, fp0], rhs, xs, |_| {})?;
            Ok(rec.into_iter().map(|y| (y[0], y[1])).collect())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcName {
    Periodic,
    Antiperiodic,
    Delta,
    DeltaPrime,
    Dirichlet,
    Neumann,
}

impl FromStr for BcName {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "periodic" | "per" => Self::Periodic,
            "antiperiodic" | "aper" => Self::Antiperiodic,
            "delta" => Self::Delta,
            "delta_prime" | "deltaprime" => Self::DeltaPrime,
            "dirichlet" => Self::Dirichlet,
            "neumann" => Self::Neumann,
            other => return Err(ModelError::UnknownBc(other.to_string())),
        })
    }
}

/// Boundary-condition planes for the interval (`n = 2`).
pub fn bc_catalog(name: BcName, s: f64) -> Result<LagrangianPlane> {
    if !s.is_finite() {
        return Err(ModelError::InvalidProblem("boundary parameter must be finite".into()));
    }
    let tol = ToleranceConfig::default();
    let (x, y) = match name {
        BcName::Periodic => (from_real_rows(&[&[1.0, 0.0], &[1.0, 0.0]]), from_real_rows(&[&[0.0, 1.0], &[0.0, -1.0]])),
        BcName::Delta => (from_real_rows(&[&[1.0, 0.0], &[1.0, 0.0]]), from_real_rows(&[&[s, 1.0], &[0.0, -1.0]])),
        BcName::Antiperiodic => {
            (from_real_rows(&[&[1.0, 0.0], &[-1.0, 0.0]]), from_real_rows(&[&[0.0, 1.0], &[0.0, 1.0]]))
        }
        BcName::DeltaPrime => (from_real_rows(&[&[1.0, s], &[-1.0, 0.0]]), from_real_rows(&[&[0.0, 1.0], &[0.0, 1.0]])),
        BcName::Dirichlet => return Ok(LagrangianPlane::vertical(2)),
        BcName::Neumann => return Ok(LagrangianPlane::horizontal(2)),
    };
    Ok(LagrangianPlane::from_xy(x, y, &tol)?)
}

/// The increasing path `λ ↦ M(λ)` on `[a, b]`, scanned on a grid uniform in
/// `u` with `λ = u|u|`.
pub struct CauchyDataPath<'a> {
    problem: &'a IntervalProblem,
    a: f64,
    b: f64,
}

impl<'a> CauchyDataPath<'a> {
    pub fn new(problem: &'a IntervalProblem, a: f64, b: f64) -> Self {
        Self { problem, a, b }
    }
}

fn signed_sqrt(v: f64) -> f64 {
    v.signum() * v.abs().sqrt()
}

impl PlanePath for CauchyDataPath<'_> {
    fn domain(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    fn frame_at(&self, t: f64) -> std::result::Result<Frame, MaslovError> {
        cauchy_data_frame(self.problem, t).map_err(|e| MaslovError::Path(e.to_string()))
    }

    fn derivative_at(&self, t: f64) -> Option<std::result::Result<(ComplexMatrix, ComplexMatrix), MaslovError>> {
        Some(cauchy_data(self.problem, t).map(|d| (d.dx, d.dy)).map_err(|e| MaslovError::Path(e.to_string())))
    }

    fn monotone_hint(&self) -> Monotonicity {
        Monotonicity::Increasing
    }

    fn scan_grid(&self, steps: usize) -> Vec<f64> {
        let (ua, ub) = (signed_sqrt(self.a), signed_sqrt(self.b));
        let mut g: Vec<f64> = crate::maslov::uniform_grid(ua, ub, steps).into_iter().map(|u| u * u.abs()).collect();
        g[0] = self.a;
        *g.last_mut().unwrap() = self.b;
        g
    }
}
