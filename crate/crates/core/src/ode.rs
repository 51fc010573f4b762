//! Adaptive Dormand–Prince 5(4) integration with forced checkpoints.
//!
//! Steps are clipped so that every requested output time is hit exactly,
//! which removes any interpolation error from sampled trajectories.

use crate::error::{Error, Result};
use crate::scalar::Real;

// Butcher tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

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
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// Difference between the 5th and 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

#[derive(Debug, Clone, Copy)]
pub struct Dopri5<T> {
    pub rtol: T,
    pub atol: T,
    pub max_steps: usize,
}

impl<T: Real> Dopri5<T> {
    pub fn new(tol: T) -> Self {
        Self {
            rtol: tol,
            atol: tol,
            max_steps: 10_000_000,
        }
    }

    /// Integrates `dy/dt = rhs(t, y)` from `(t0, y0)` and returns the state at
    /// each checkpoint. Checkpoints must be non-decreasing and `>= t0`.
    pub fn integrate<F, const N: usize>(
        &self,
        rhs: F,
        t0: T,
        y0: [T; N],
        checkpoints: &[T],
    ) -> Result<Vec<[T; N]>>
    where
        F: Fn(T, &[T; N]) -> [T; N],
    {
        let mut out = Vec::with_capacity(checkpoints.len());
        let mut t = t0;
        let mut y = y0;
        let mut k1 = rhs(t, &y);
        let mut h = match checkpoints.last() {
            Some(&end) if end > t0 => self.initial_step(&rhs, t0, &y0, &k1, end - t0),
            _ => T::one(),
        };
        let mut steps = 0usize;
        let lit = T::lit;

        for &target in checkpoints {
            if target < t {
                return Err(Error::InvalidParameter(
                    "checkpoints must be non-decreasing".into(),
                ));
            }
            while t < target {
                if steps >= self.max_steps {
                    return Err(Error::IntegrationFailure {
                        t: t.to_f64_lossy(),
                        reason: "step budget exhausted",
                    });
                }
                let remaining = target - t;
                let clipped = h >= remaining;
                let hs = if clipped { remaining } else { h };

                let k2 = rhs(t + lit(C2) * hs, &axpy(&y, hs, &[(A21, &k1)]));
                let k3 = rhs(t + lit(C3) * hs, &axpy(&y, hs, &[(A31, &k1), (A32, &k2)]));
                let k4 = rhs(
                    t + lit(C4) * hs,
                    &axpy(&y, hs, &[(A41, &k1), (A42, &k2), (A43, &k3)]),
                );
                let k5 = rhs(
                    t + lit(C5) * hs,
                    &axpy(&y, hs, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
                );
                let k6 = rhs(
                    t + hs,
                    &axpy(
                        &y,
                        hs,
                        &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
                    ),
                );
                let y_new = axpy(
                    &y,
                    hs,
                    &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)],
                );
                let k7 = rhs(t + hs, &y_new);
                steps += 1;

                let mut acc = T::zero();
                for i in 0..N {
                    let e = hs
                        * (lit(E1) * k1[i]
                            + lit(E3) * k3[i]
                            + lit(E4) * k4[i]
                            + lit(E5) * k5[i]
                            + lit(E6) * k6[i]
                            + lit(E7) * k7[i]);
                    let scale = self.atol + self.rtol * y[i].abs().max(y_new[i].abs());
                    let ratio = e / scale;
                    acc = acc + ratio * ratio;
                }
                let err = (acc / T::from_usize_lossy(N.max(1))).sqrt();

                if err.is_finite() && err <= T::one() {
                    t = if clipped { target } else { t + hs };
                    y = y_new;
                    k1 = k7;
                    let h_next = hs * step_factor(err);
                    // A clipped step says nothing about the natural step size.
                    if !(clipped && h_next < h) {
                        h = h_next;
                    }
                } else {
                    let factor = if err.is_finite() {
                        step_factor(err)
                    } else {
                        lit(MIN_FACTOR)
                    };
                    h = hs * factor;
                    if h <= T::epsilon() * lit(16.0) * t.abs().max(T::one()) {
                        return Err(Error::IntegrationFailure {
                            t: t.to_f64_lossy(),
                            reason: "step size underflow",
                        });
                    }
                }
            }
            out.push(y);
        }
        Ok(out)
    }

    // Hairer–Nørsett–Wanner starting step heuristic.
    fn initial_step<F, const N: usize>(&self, rhs: &F, t0: T, y0: &[T; N], f0: &[T; N], span: T) -> T
    where
        F: Fn(T, &[T; N]) -> [T; N],
    {
        let norm = |v: &[T; N]| {
            let mut acc = T::zero();
            for i in 0..N {
                let s = self.atol + self.rtol * y0[i].abs();
                acc = acc + (v[i] / s) * (v[i] / s);
            }
            (acc / T::from_usize_lossy(N.max(1))).sqrt()
        };
        let d0 = norm(y0);
        let d1 = norm(f0);
        let small = T::lit(1e-5);
        let h0 = if d0 < small || d1 < small {
            T::lit(1e-6)
        } else {
            T::lit(0.01) * d0 / d1
        };
        let h0 = h0.min(span);
        let y1 = axpy(y0, h0, &[(1.0, f0)]);
        let f1 = rhs(t0 + h0, &y1);
        let mut diff = [T::zero(); N];
        for i in 0..N {
            diff[i] = f1[i] - f0[i];
        }
        let d2 = norm(&diff) / h0;
        let dmax = d1.max(d2);
        let h1 = if dmax <= T::lit(1e-15) {
            (h0 * T::lit(1e-3)).max(T::lit(1e-6))
        } else {
            (T::lit(0.01) / dmax).powf(T::lit(0.2))
        };
        (T::lit(100.0) * h0).min(h1).min(span)
    }
}

fn step_factor<T: Real>(err: T) -> T {
    let raw = if err > T::zero() {
        T::lit(SAFETY) * err.powf(T::lit(-0.2))
    } else {
        T::lit(MAX_FACTOR)
    };
    raw.max(T::lit(MIN_FACTOR)).min(T::lit(MAX_FACTOR))
}

fn axpy<T: Real, const N: usize>(y: &[T; N], h: T, terms: &[(f64, &[T; N])]) -> [T; N] {
    let mut out = *y;
    for &(coef, k) in terms {
        let c = T::lit(coef) * h;
        for i in 0..N {
            out[i] = out[i] + c * k[i];
        }
    }
    out
}
