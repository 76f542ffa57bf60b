//! Explicit Runge–Kutta steppers over flat complex vectors.

use num_complex::Complex64 as C64;

use super::Scheme;
use crate::error::{Error, Result};

pub(crate) trait Rhs {
    fn eval(&self, t: f64, y: &[C64], dy: &mut [C64]);
}

pub(crate) struct Integrator {
    scheme: Scheme,
    k: Vec<Vec<C64>>,
    tmp: Vec<C64>,
    y_new: Vec<C64>,
}

// Dormand–Prince 5(4) tableau.
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
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// fifth minus fourth order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const MAX_ADAPTIVE_STEPS: usize = 10_000_000;

impl Integrator {
    pub(crate) fn new(scheme: Scheme, n: usize) -> Self {
        let stages = match scheme {
            Scheme::Rk4Fixed => 4,
            Scheme::Dp54Adaptive { .. } => 7,
        };
        Self {
            scheme,
            k: vec![vec![C64::new(0.0, 0.0); n]; stages],
            tmp: vec![C64::new(0.0, 0.0); n],
            y_new: vec![C64::new(0.0, 0.0); n],
        }
    }

    /// Advances `y` from `t0` to `t1`. Fixed-step schemes take `steps`
    /// equal steps; the adaptive scheme starts from `*h` and leaves its last
    /// accepted step proposal there. Returns the number of steps taken.
    pub(crate) fn advance(
        &mut self,
        f: &dyn Rhs,
        y: &mut [C64],
        t0: f64,
        t1: f64,
        steps: usize,
        h: &mut f64,
    ) -> Result<usize> {
        match self.scheme {
            Scheme::Rk4Fixed => {
                let dt = (t1 - t0) / steps as f64;
                for s in 0..steps {
                    self.rk4_step(f, y, t0 + s as f64 * dt, dt);
                }
                Ok(steps)
            }
            Scheme::Dp54Adaptive { rtol, atol } => self.dp54(f, y, t0, t1, h, rtol, atol),
        }
    }

    fn rk4_step(&mut self, f: &dyn Rhs, y: &mut [C64], t: f64, dt: f64) {
        let n = y.len();
        let (k1, rest) = self.k.split_at_mut(1);
        let (k2, rest) = rest.split_at_mut(1);
        let (k3, k4) = rest.split_at_mut(1);
        let (k1, k2, k3, k4) = (&mut k1[0], &mut k2[0], &mut k3[0], &mut k4[0]);
        let tmp = &mut self.tmp;
        f.eval(t, y, k1);
        for i in 0..n {
            tmp[i] = y[i] + k1[i] * (0.5 * dt);
        }
        f.eval(t + 0.5 * dt, tmp, k2);
        for i in 0..n {
            tmp[i] = y[i] + k2[i] * (0.5 * dt);
        }
        f.eval(t + 0.5 * dt, tmp, k3);
        for i in 0..n {
            tmp[i] = y[i] + k3[i] * dt;
        }
        f.eval(t + dt, tmp, k4);
        let w = dt / 6.0;
        for i in 0..n {
            y[i] += (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * w;
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn dp54(&mut self, f: &dyn Rhs, y: &mut [C64], t0: f64, t1: f64, h: &mut f64, rtol: f64, atol: f64) -> Result<usize> {
        let n = y.len();
        let mut t = t0;
        let mut taken = 0;
        let mut attempts = 0;
        let span = t1 - t0;
        f.eval(t, y, &mut self.k[0]);
        while t < t1 {
            attempts += 1;
            if attempts > MAX_ADAPTIVE_STEPS {
                return Err(Error::AdaptiveFailure {
                    t,
                    reason: "step budget exhausted".into(),
                });
            }
            let mut dt = h.min(t1 - t);
            let last = dt >= t1 - t;
            if last {
                dt = t1 - t;
            }
            if dt <= span * 1e-14 && !last {
                return Err(Error::AdaptiveFailure {
                    t,
                    reason: format!("step size underflow ({dt:e} s) at tolerance {rtol:e}"),
                });
            }
            let stage = |k: &Vec<Vec<C64>>, tmp: &mut Vec<C64>, coeffs: &[(usize, f64)]| {
                for i in 0..n {
                    let mut s = y[i];
                    for &(j, a) in coeffs {
                        s += k[j][i] * (a * dt);
                    }
                    tmp[i] = s;
                }
            };
            stage(&self.k, &mut self.tmp, &[(0, A21)]);
            f.eval(t + C2 * dt, &self.tmp, &mut self.k[1]);
            stage(&self.k, &mut self.tmp, &[(0, A31), (1, A32)]);
            f.eval(t + C3 * dt, &self.tmp, &mut self.k[2]);
            stage(&self.k, &mut self.tmp, &[(0, A41), (1, A42), (2, A43)]);
            f.eval(t + C4 * dt, &self.tmp, &mut self.k[3]);
            stage(&self.k, &mut self.tmp, &[(0, A51), (1, A52), (2, A53), (3, A54)]);
            f.eval(t + C5 * dt, &self.tmp, &mut self.k[4]);
            stage(&self.k, &mut self.tmp, &[(0, A61), (1, A62), (2, A63), (3, A64), (4, A65)]);
            f.eval(t + dt, &self.tmp, &mut self.k[5]);
            stage(&self.k, &mut self.y_new, &[(0, B1), (2, B3), (3, B4), (4, B5), (5, B6)]);
            f.eval(t + dt, &self.y_new, &mut self.k[6]);

            let mut err = 0.0f64;
            for i in 0..n {
                let e = (self.k[0][i] * E1
                    + self.k[2][i] * E3
                    + self.k[3][i] * E4
                    + self.k[4][i] * E5
                    + self.k[5][i] * E6
                    + self.k[6][i] * E7)
                    * dt;
                let sc = atol + rtol * y[i].norm().max(self.y_new[i].norm());
                err = err.max(e.norm() / sc);
            }
            if err <= 1.0 {
                t = if last { t1 } else { t + dt };
                y.copy_from_slice(&self.y_new);
                self.k.swap(0, 6);
                taken += 1;
            }
            if !err.is_finite() {
                *h = dt * 0.1;
                continue;
            }
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            // keep the proposal for the next interval even when this one
            // ended on a shortened final step
            if !(last && err <= 1.0) || factor < 1.0 {
                *h = dt * factor;
            }
        }
        Ok(taken)
    }
}
