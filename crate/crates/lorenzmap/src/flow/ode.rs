//! Adaptive Dormand–Prince 5(4) integration with dense output.
//!
//! The classic 7-stage FSAL pair: fifth-order propagation, embedded
//! fourth-order error estimate, and the Shampine quartic interpolant for
//! dense output inside each accepted step. Event localization bisects the
//! dense polynomial, so crossings are resolved far below the step size.

use thiserror::Error;

pub type State = [f64; 3];

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum OdeError {
    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),
    #[error("non-finite state at t = {0}")]
    NonFinite(f64),
    #[error("step budget exhausted at t = {0}")]
    StepBudget(f64),
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
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
// Shampine dense-output coefficients.
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (i, slot) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        *slot += h * acc;
    }
    out
}

/// One accepted integration step with the data needed for interpolation.
#[derive(Debug, Clone)]
pub struct DenseStep {
    pub t0: f64,
    pub h: f64,
    pub y0: State,
    pub y1: State,
    /// Interpolation coefficients per component.
    cont: [[f64; 5]; 3],
}

impl DenseStep {
    /// State at `t ∈ [t0, t0+h]` via the quartic interpolant.
    pub fn eval(&self, t: f64) -> State {
        let s = ((t - self.t0) / self.h).clamp(0.0, 1.0);
        let s1 = 1.0 - s;
        let mut out = [0.0; 3];
        for (slot, c) in out.iter_mut().zip(&self.cont) {
            *slot = c[0] + s * (c[1] + s1 * (c[2] + s * (c[3] + s1 * c[4])));
        }
        out
    }

    pub fn t_end(&self) -> f64 {
        self.t0 + self.h
    }
}

/// Adaptive integrator for a fixed right-hand side.
pub struct Dopri5<F: Fn(&State) -> State> {
    rhs: F,
    pub rtol: f64,
    pub atol: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl<F: Fn(&State) -> State> Dopri5<F> {
    pub fn new(rhs: F, tol: f64) -> Self {
        Dopri5 {
            rhs,
            rtol: tol,
            atol: tol,
            h_min: 1e-13,
            h_max: 0.25,
            max_steps: 50_000_000,
        }
    }

    /// Integrates from `(t, y)` over one adaptive step; returns the accepted
    /// dense step and the suggested next step size.
    pub fn step(&self, t: f64, y: &State, h_try: f64) -> Result<(DenseStep, f64), OdeError> {
        let mut h = h_try.clamp(self.h_min, self.h_max);
        let k1 = (self.rhs)(y);
        for _ in 0..60 {
            let k2 = (self.rhs)(&axpy(y, h, &[(A21, &k1)]));
            let k3 = (self.rhs)(&axpy(y, h, &[(A31, &k1), (A32, &k2)]));
            let k4 = (self.rhs)(&axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
            let k5 = (self.rhs)(&axpy(
                y,
                h,
                &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)],
            ));
            let k6 = (self.rhs)(&axpy(
                y,
                h,
                &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)],
            ));
            let y1 = axpy(
                y,
                h,
                &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)],
            );
            let k7 = (self.rhs)(&y1);

            let mut err_norm = 0.0_f64;
            for i in 0..3 {
                let e = h
                    * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
                let scale = self.atol + self.rtol * y[i].abs().max(y1[i].abs());
                err_norm = err_norm.max((e / scale).abs());
            }
            if !err_norm.is_finite() || !y1.iter().all(|v| v.is_finite()) {
                return Err(OdeError::NonFinite(t));
            }
            if err_norm <= 1.0 {
                let mut cont = [[0.0; 5]; 3];
                for i in 0..3 {
                    let dy = y1[i] - y[i];
                    let bspl = h * k1[i] - dy;
                    cont[i][0] = y[i];
                    cont[i][1] = dy;
                    cont[i][2] = bspl;
                    cont[i][3] = dy - h * k7[i] - bspl;
                    cont[i][4] = h
                        * (D1 * k1[i]
                            + D3 * k3[i]
                            + D4 * k4[i]
                            + D5 * k5[i]
                            + D6 * k6[i]
                            + D7 * k7[i]);
                }
                let scale = 0.9 * err_norm.powf(-0.2);
                let h_next = (h * scale.clamp(0.2, 5.0)).clamp(self.h_min, self.h_max);
                return Ok((
                    DenseStep {
                        t0: t,
                        h,
                        y0: *y,
                        y1,
                        cont,
                    },
                    h_next,
                ));
            }
            let scale = (0.9 * err_norm.powf(-0.2)).max(0.2);
            h *= scale;
            if h < self.h_min {
                return Err(OdeError::StepUnderflow(t));
            }
        }
        Err(OdeError::StepUnderflow(t))
    }

    /// Integrates over `[t0, t0+duration]`, handing every accepted step to
    /// `visit`; the callback may stop the run early by returning `false`.
    pub fn drive(
        &self,
        t0: f64,
        y0: State,
        duration: f64,
        mut visit: impl FnMut(&DenseStep) -> bool,
    ) -> Result<(f64, State), OdeError> {
        let mut t = t0;
        let mut y = y0;
        let mut h = (self.rtol.powf(0.2) * 0.1).clamp(self.h_min, self.h_max);
        let t_end = t0 + duration;
        let mut steps = 0usize;
        while t < t_end {
            if steps >= self.max_steps {
                return Err(OdeError::StepBudget(t));
            }
            steps += 1;
            let h_try = h.min(t_end - t);
            let (step, h_next) = self.step(t, &y, h_try)?;
            t = step.t_end();
            y = step.y1;
            h = h_next;
            if !visit(&step) {
                break;
            }
        }
        Ok((t, y))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exponential decay has a closed form; fifth-order convergence shows up
    /// as roughly tol-proportional global error.
    #[test]
    fn accuracy_against_exponential() {
        for tol in [1e-6, 1e-9, 1e-12] {
            let ode = Dopri5::new(|y: &State| [-y[0], -2.0 * y[1], 0.5 * y[2]], tol);
            let (_, y) = ode.drive(0.0, [1.0, 1.0, 1.0], 5.0, |_| true).unwrap();
            let exact = [(-5.0_f64).exp(), (-10.0_f64).exp(), (2.5_f64).exp()];
            for i in 0..3 {
                let rel = (y[i] - exact[i]).abs() / exact[i].abs();
                assert!(rel < tol * 2e3, "tol={tol}, i={i}: rel={rel:.3e}");
            }
        }
    }

    #[test]
    fn dense_output_matches_step_endpoints() {
        let ode = Dopri5::new(|y: &State| [y[1], -y[0], 0.0], 1e-10);
        let mut checked = 0;
        ode.drive(0.0, [1.0, 0.0, 0.0], 3.0, |step| {
            let start = step.eval(step.t0);
            let end = step.eval(step.t_end());
            for i in 0..3 {
                assert!((start[i] - step.y0[i]).abs() < 1e-12);
                assert!((end[i] - step.y1[i]).abs() < 1e-12);
            }
            // Interior accuracy against the trig solution.
            let tm = step.t0 + 0.5 * step.h;
            let mid = step.eval(tm);
            assert!((mid[0] - tm.cos()).abs() < 1e-8);
            assert!((mid[1] + tm.sin()).abs() < 1e-8);
            checked += 1;
            true
        })
        .unwrap();
        assert!(checked > 3);
    }

    /// Halving the tolerance by 10 must shrink the error accordingly
    /// (order-of-convergence smoke test on a nonlinear system).
    #[test]
    fn tolerance_scaling() {
        let rhs = |y: &State| [y[1], -y[0] - 0.1 * y[1] * y[0] * y[0], 0.0];
        let run = |tol: f64| {
            let ode = Dopri5::new(rhs, tol);
            ode.drive(0.0, [1.0, 0.0, 0.0], 10.0, |_| true).unwrap().1
        };
        let coarse = run(1e-6);
        let fine = run(1e-9);
        let finest = run(1e-12);
        let err_coarse = (0..3)
            .map(|i| (coarse[i] - finest[i]).abs())
            .fold(0.0, f64::max);
        let err_fine = (0..3)
            .map(|i| (fine[i] - finest[i]).abs())
            .fold(0.0, f64::max);
        assert!(err_fine < err_coarse / 10.0 + 1e-12);
    }
}
