//! Adaptive Dormand–Prince 4(5) for small complex systems.

use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dp45Options {
    pub rtol: f64,
    /// Absolute floor, relative to the largest state component.
    pub atol_rel: f64,
    pub max_steps: usize,
}

impl Default for Dp45Options {
    fn default() -> Self {
        Self { rtol: 1e-10, atol_rel: 1e-14, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("step size underflow at x = {0}")]
    StepUnderflow(f64),
    #[error("step limit reached at x = {0}")]
    TooManySteps(f64),
    #[error("non-finite state at x = {0}")]
    NonFinite(f64),
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Fifth minus fourth order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Scalar type of the state vector.
pub trait OdeScalar: Copy + std::ops::Add<Output = Self> + std::ops::AddAssign + std::ops::Mul<f64, Output = Self> {
    fn magnitude(self) -> f64;
}

impl OdeScalar for f64 {
    fn magnitude(self) -> f64 {
        self.abs()
    }
}

impl OdeScalar for Complex64 {
    fn magnitude(self) -> f64 {
        self.norm()
    }
}

fn axpy<T: OdeScalar, const N: usize>(y: &[T; N], terms: &[(f64, &[T; N])], h: f64) -> [T; N] {
    let mut out = *y;
    for (w, k) in terms {
        let s = h * w;
        for i in 0..N {
            out[i] += k[i] * s;
        }
    }
    out
}

fn max_abs<T: OdeScalar, const N: usize>(y: &[T; N]) -> f64 {
    y.iter().fold(0.0, |m, v| m.max(v.magnitude()))
}

/// Integrates `y' = f(x, y)` from `x0` to `x1`.
///
/// `h` is the initial step guess and is updated to the last accepted step.
/// After each accepted step `on_step` may rescale the state in place.
pub fn integrate<T: OdeScalar, const N: usize, F, G>(
    f: F,
    x0: f64,
    x1: f64,
    y0: [T; N],
    h: &mut f64,
    opts: &Dp45Options,
    mut on_step: G,
) -> Result<[T; N], OdeError>
where
    F: Fn(f64, &[T; N]) -> [T; N],
    G: FnMut(&mut [T; N]),
{
    let mut x = x0;
    let mut y = y0;
    let span = x1 - x0;
    if span == 0.0 {
        return Ok(y);
    }
    let dir = span.signum();
    let mut step = h.abs().min(span.abs()).max(span.abs() * 1e-12);
    let mut k1 = f(x, &y);
    for _ in 0..opts.max_steps {
        let remaining = (x1 - x) * dir;
        if remaining <= 0.0 {
            *h = step;
            return Ok(y);
        }
        let last = step >= remaining;
        let hs = if last { remaining } else { step } * dir;

        let k2 = f(x + hs * 0.2, &axpy(&y, &[(A21, &k1)], hs));
        let k3 = f(x + hs * 0.3, &axpy(&y, &[(A31, &k1), (A32, &k2)], hs));
        let k4 = f(x + hs * 0.8, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], hs));
        let k5 = f(x + hs * (8.0 / 9.0), &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], hs));
        let k6 = f(x + hs, &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], hs));
        let y_new = axpy(&y, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], hs);
        let k7 = f(x + hs, &y_new);

        let floor = opts.atol_rel * max_abs(&y).max(max_abs(&y_new));
        let mut err: f64 = 0.0;
        for i in 0..N {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * hs;
            let sc = floor + opts.rtol * y[i].magnitude().max(y_new[i].magnitude());
            if sc > 0.0 {
                err = err.max(e.magnitude() / sc);
            }
        }
        if !err.is_finite() || y_new.iter().any(|v| !v.magnitude().is_finite()) {
            if step < span.abs() * 1e-14 {
                return Err(OdeError::NonFinite(x));
            }
            step *= 0.25;
            continue;
        }
        if err <= 1.0 {
            x = if last { x1 } else { x + hs };
            y = y_new;
            on_step(&mut y);
            k1 = if last { k7 } else { f(x, &y) };
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            if !last {
                step *= grow;
            }
        } else {
            step *= (0.9 * err.powf(-0.2)).clamp(0.1, 1.0);
            if step < span.abs() * 1e-14 {
                return Err(OdeError::StepUnderflow(x));
            }
        }
    }
    Err(OdeError::TooManySteps(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(v: f64) -> Complex64 {
        Complex64::new(v, 0.0)
    }

    #[test]
    fn harmonic_oscillator() {
        // y'' = -y with y(0) = 0, y'(0) = 1.
        let mut h = 0.1;
        let y = integrate(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, 3.0, [0.0, 1.0], &mut h, &Dp45Options::default(), |_| {})
            .unwrap();
        assert!((y[0] - 3f64.sin()).abs() < 1e-9);
        assert!((y[1] - 3f64.cos()).abs() < 1e-9);
    }

    #[test]
    fn complex_exponential_backwards() {
        let i = Complex64::new(0.0, 1.0);
        let mut h = 0.1;
        let y = integrate(move |_, y: &[Complex64; 1]| [i * y[0]], 2.0, 0.0, [c(1.0)], &mut h, &Dp45Options::default(), |_| {})
            .unwrap();
        let want = (-2.0 * i).exp();
        assert!((y[0] - want).norm() < 1e-9);
    }

    #[test]
    fn rescaling_hook_is_applied() {
        let mut h = 0.01;
        let mut log = 0.0;
        let y = integrate(
            |_, y: &[Complex64; 1]| [y[0] * 50.0],
            0.0,
            20.0,
            [c(1.0)],
            &mut h,
            &Dp45Options::default(),
            |y| {
                let m = y[0].norm();
                if m > 1e50 {
                    y[0] /= m;
                    log += m.ln();
                }
            },
        )
        .unwrap();
        assert!(((y[0].norm().ln() + log) - 1000.0).abs() < 1e-6);
    }
}
