//! Adaptive Dormand-Prince integration with variational equations and event
//! location. States are small (dimension plus an optional variational block),
//! so everything works on plain slices.

use crate::error::MorseError;

/// Right-hand side of an ODE system.
pub trait OdeRhs {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]);
}

/// A time-dependent vector field on the torus with an analytic spatial
/// Jacobian.
pub trait Field {
    fn dim(&self) -> usize;
    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]);
    /// Row-major `dim x dim` spatial Jacobian.
    fn jac(&self, t: f64, y: &[f64], out: &mut [f64]);
}

impl<F: Field + ?Sized> OdeRhs for F {
    fn dim(&self) -> usize {
        Field::dim(self)
    }
    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]) {
        Field::eval(self, t, y, out)
    }
}

/// Augments a field with its variational flow: the state is
/// `[y | S column-major]` with `S' = J(t, y) S`.
pub struct WithVariational<'a> {
    pub field: &'a dyn Field,
}

impl OdeRhs for WithVariational<'_> {
    fn dim(&self) -> usize {
        let d = self.field.dim();
        d + d * d
    }
    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]) {
        let d = self.field.dim();
        self.field.eval(t, &y[..d], &mut out[..d]);
        let mut j = [0.0; 9];
        self.field.jac(t, &y[..d], &mut j[..d * d]);
        for col in 0..d {
            let s = &y[d + col * d..d + (col + 1) * d];
            let o = &mut out[d + col * d..d + (col + 1) * d];
            for r in 0..d {
                let mut acc = 0.0;
                for k in 0..d {
                    acc += j[r * d + k] * s[k];
                }
                o[r] = acc;
            }
        }
    }
}

const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const C: [f64; 6] = [1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Accepted-step samples of a solution.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn end(&self) -> (&f64, &Vec<f64>) {
        (self.ts.last().expect("nonempty"), self.ys.last().expect("nonempty"))
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Integrator {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator {
            rtol: 1e-10,
            atol: 1e-12,
            h_max: 0.25,
        }
    }
}

impl Integrator {
    pub fn with_tol(tol: f64) -> Self {
        Integrator {
            rtol: tol,
            atol: tol * 1e-2,
            h_max: 0.25,
        }
    }

    /// Integrates from `t0` to `t1` (either direction), recording accepted
    /// steps.
    pub fn solve(
        &self,
        rhs: &dyn OdeRhs,
        t0: f64,
        t1: f64,
        y0: &[f64],
    ) -> Result<Trajectory, MorseError> {
        let mut traj = Trajectory {
            ts: vec![t0],
            ys: vec![y0.to_vec()],
        };
        self.advance(rhs, t0, t1, y0, &mut |t, y| {
            traj.ts.push(t);
            traj.ys.push(y.to_vec());
            true
        })?;
        Ok(traj)
    }

    /// Integrates until `event` changes sign (returns the refined crossing)
    /// or `t1` is reached (returns `None`).
    pub fn solve_to_event(
        &self,
        rhs: &dyn OdeRhs,
        t0: f64,
        t1: f64,
        y0: &[f64],
        event: &dyn Fn(f64, &[f64]) -> f64,
    ) -> Result<Option<(f64, Vec<f64>)>, MorseError> {
        let mut prev_t = t0;
        let mut prev_y = y0.to_vec();
        let mut prev_g = event(t0, y0);
        let mut hit: Option<(f64, Vec<f64>, f64, Vec<f64>)> = None;
        self.advance(rhs, t0, t1, y0, &mut |t, y| {
            let g = event(t, y);
            if prev_g * g <= 0.0 && prev_g != g {
                hit = Some((prev_t, prev_y.clone(), t, y.to_vec()));
                return false;
            }
            prev_t = t;
            prev_y = y.to_vec();
            prev_g = g;
            true
        })?;
        let Some((mut ta, mut ya, mut tb, _yb)) = hit else {
            return Ok(None);
        };
        // Bisection by re-integration over the bracketing step.
        let mut ga = event(ta, &ya);
        for _ in 0..80 {
            let tm = 0.5 * (ta + tb);
            if (tb - ta).abs() < 1e-14 * (1.0 + ta.abs()) {
                break;
            }
            let ym = self.step_exactly(rhs, ta, tm, &ya)?;
            let gm = event(tm, &ym);
            if ga * gm <= 0.0 && ga != 0.0 {
                tb = tm;
            } else {
                ta = tm;
                ya = ym;
                ga = gm;
            }
        }
        let yb = self.step_exactly(rhs, ta, tb, &ya)?;
        Ok(Some((tb, yb)))
    }

    /// Integrates over a (short) interval, returning only the endpoint.
    pub fn step_exactly(
        &self,
        rhs: &dyn OdeRhs,
        t0: f64,
        t1: f64,
        y0: &[f64],
    ) -> Result<Vec<f64>, MorseError> {
        let mut out = y0.to_vec();
        self.advance(rhs, t0, t1, y0, &mut |_, y| {
            out.clear();
            out.extend_from_slice(y);
            true
        })?;
        Ok(out)
    }

    fn advance(
        &self,
        rhs: &dyn OdeRhs,
        t0: f64,
        t1: f64,
        y0: &[f64],
        on_step: &mut dyn FnMut(f64, &[f64]) -> bool,
    ) -> Result<(), MorseError> {
        let n = rhs.dim();
        assert_eq!(y0.len(), n, "state size mismatch");
        if t0 == t1 {
            return Ok(());
        }
        let dir = (t1 - t0).signum();
        let mut t = t0;
        let mut y = y0.to_vec();
        let mut k = vec![vec![0.0; n]; 7];
        rhs.eval(t, &y, &mut k[0]);
        let mut h = (self.h_max * 0.1).min((t1 - t0).abs()) * dir;
        let mut ytmp = vec![0.0; n];
        let mut y5 = vec![0.0; n];
        let mut y4 = vec![0.0; n];
        loop {
            if (t - t1) * dir >= 0.0 {
                return Ok(());
            }
            if (t + h - t1) * dir > 0.0 {
                h = t1 - t;
            }
            if h.abs() < 1e-15 * (1.0 + t.abs()) {
                return Err(MorseError::StepUnderflow(t));
            }
            for stage in 0..6 {
                for i in 0..n {
                    let mut acc = 0.0;
                    for (j, kj) in k.iter().enumerate().take(stage + 1) {
                        acc += A[stage][j] * kj[i];
                    }
                    ytmp[i] = y[i] + h * acc;
                }
                rhs.eval(t + C[stage] * h, &ytmp, &mut k[stage + 1]);
            }
            let mut err = 0.0f64;
            for i in 0..n {
                let mut acc5 = 0.0;
                let mut acc4 = 0.0;
                for j in 0..7 {
                    acc5 += B5[j] * k[j][i];
                    acc4 += B4[j] * k[j][i];
                }
                y5[i] = y[i] + h * acc5;
                y4[i] = y[i] + h * acc4;
                let sc = self.atol + self.rtol * y[i].abs().max(y5[i].abs());
                let e = (y5[i] - y4[i]) / sc;
                err += e * e;
            }
            err = (err / n as f64).sqrt();
            if err <= 1.0 {
                t += h;
                std::mem::swap(&mut y, &mut y5);
                k.swap(0, 6); // FSAL
                if !on_step(t, &y) {
                    return Ok(());
                }
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (h * factor).clamp(-self.h_max, self.h_max);
            if err > 1.0 {
                // Re-evaluate k1 at the unchanged point only if FSAL swapped.
                rhs.eval(t, &y, &mut k[0]);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Rotation;
    impl Field for Rotation {
        fn dim(&self) -> usize {
            2
        }
        fn eval(&self, _t: f64, y: &[f64], out: &mut [f64]) {
            out[0] = -y[1];
            out[1] = y[0];
        }
        fn jac(&self, _t: f64, _y: &[f64], out: &mut [f64]) {
            out.copy_from_slice(&[0.0, -1.0, 1.0, 0.0]);
        }
    }

    #[test]
    fn rotation_is_accurate_and_reversible() {
        let ig = Integrator::default();
        let traj = ig.solve(&Rotation, 0.0, std::f64::consts::PI, &[1.0, 0.0]).unwrap();
        let (_, end) = traj.end();
        assert!((end[0] + 1.0).abs() < 1e-8 && end[1].abs() < 1e-8);
        // Round trip.
        let back = ig
            .solve(&Rotation, std::f64::consts::PI, 0.0, end)
            .unwrap();
        let (_, start) = back.end();
        assert!((start[0] - 1.0).abs() < 1e-8 && start[1].abs() < 1e-8);
    }

    #[test]
    fn variational_flow_of_rotation_is_rotation_matrix() {
        let ig = Integrator::default();
        let aug = WithVariational { field: &Rotation };
        let mut y0 = vec![1.0, 0.0, 1.0, 0.0, 0.0, 1.0];
        let t = 1.234;
        let traj = ig.solve(&aug, 0.0, t, &mut y0).unwrap();
        let (_, end) = traj.end();
        let (c, s) = (t.cos(), t.sin());
        // Column-major S.
        for (got, want) in end[2..].iter().zip([c, s, -s, c]) {
            assert!((got - want).abs() < 1e-8);
        }
    }

    #[test]
    fn event_location_on_circle() {
        let ig = Integrator::default();
        let hit = ig
            .solve_to_event(&Rotation, 0.0, 10.0, &[1.0, 0.0], &|_, y| y[0])
            .unwrap()
            .expect("crosses x=0");
        assert!((hit.0 - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
        assert!((hit.1[1] - 1.0).abs() < 1e-9);
    }
}
