//! Taylor charts of invariant manifolds of the gradient flow at a critical
//! point. The manifold tangent to a selected set of Hessian eigendirections
//! is parametrised to third order as a graph\
//! `w(u) = p + A u + sum_{|m|=2,3} w_m u^m` by solving the invariance
//! equation order by order; each coefficient solves a shifted linear system
//! `(<m, lambda> I - H) w_m = rhs`, which is nonsingular away from
//! resonances.

use crate::error::MorseError;
use crate::morse::MorseFunction;

/// Multi-index over at most 3 chart variables.
pub type Multi = [usize; 3];

#[derive(Debug, Clone)]
pub struct Chart {
    pub base: Vec<f64>,
    /// Selected eigenvalues, in frame order.
    pub eigvals: Vec<f64>,
    /// Chart dimension.
    pub k: usize,
    /// Ambient dimension.
    pub dim: usize,
    /// Taylor coefficients by multi-index (degree 1..=3).
    pub coeffs: Vec<(Multi, Vec<f64>)>,
}

fn multi_indices(k: usize, degree: usize) -> Vec<Multi> {
    let mut out = Vec::new();
    let mut m = [0usize; 3];
    fn rec(k: usize, degree: usize, pos: usize, left: usize, m: &mut Multi, out: &mut Vec<Multi>) {
        if pos == k {
            if left == 0 {
                out.push(*m);
            }
            return;
        }
        for v in 0..=left {
            m[pos] = v;
            rec(k, degree, pos + 1, left - v, m, out);
        }
        m[pos] = 0;
    }
    rec(k, degree, 0, degree, &mut m, &mut out);
    out
}

fn solve_dense(a: &mut [Vec<f64>], b: &mut [f64]) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&r, &s| {
            a[r][col].abs().partial_cmp(&a[s][col].abs()).unwrap()
        })?;
        if a[piv][col].abs() < 1e-13 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        let d = a[col][col];
        for r in 0..n {
            if r != col {
                let f = a[r][col] / d;
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|r| b[r] / a[r][r]).collect())
}

impl Chart {
    /// Builds the order-3 chart of the invariant manifold of the positive
    /// gradient flow tangent to the given eigenpairs at `p`.
    pub fn build(
        f: &MorseFunction,
        p: &[f64],
        eigvals: &[f64],
        frame: &[Vec<f64>],
        order: usize,
    ) -> Result<Chart, MorseError> {
        let d = f.dim;
        let k = eigvals.len();
        assert!(k <= 3 && (1..=3).contains(&order));
        let hess = f.hess(p);
        let d3 = f.d3(p);
        let d4 = f.d4(p);
        let hess_eigs = {
            // Eigenvalues of the full Hessian for the resonance check.
            let m = nalgebra::DMatrix::from_fn(d, d, |r, c| hess[r * d + c]);
            m.symmetric_eigen().eigenvalues.iter().copied().collect::<Vec<f64>>()
        };
        let mut coeffs: Vec<(Multi, Vec<f64>)> = Vec::new();
        for (i, v) in frame.iter().enumerate() {
            let mut m = [0usize; 3];
            m[i] = 1;
            coeffs.push((m, v.clone()));
        }
        let get = |coeffs: &Vec<(Multi, Vec<f64>)>, m: &Multi| -> Vec<f64> {
            coeffs
                .iter()
                .find(|(mm, _)| mm == m)
                .map(|(_, v)| v.clone())
                .expect("coefficient computed in degree order")
        };
        // Second-derivative contraction of the gradient field:
        // F''(u, v)_i = sum d3[i][j][l] u_j v_l.
        let f2 = |u: &[f64], v: &[f64]| -> Vec<f64> {
            (0..d)
                .map(|i| {
                    let mut acc = 0.0;
                    for j in 0..d {
                        for l in 0..d {
                            acc += d3[(i * d + j) * d + l] * u[j] * v[l];
                        }
                    }
                    acc
                })
                .collect()
        };
        let f3 = |u: &[f64], v: &[f64], w: &[f64]| -> Vec<f64> {
            (0..d)
                .map(|i| {
                    let mut acc = 0.0;
                    for j in 0..d {
                        for l in 0..d {
                            for s in 0..d {
                                acc += d4[((i * d + j) * d + l) * d + s] * u[j] * v[l] * w[s];
                            }
                        }
                    }
                    acc
                })
                .collect()
        };
        for degree in 2..=order {
            for m in multi_indices(k, degree) {
                let lam: f64 = (0..k).map(|i| m[i] as f64 * eigvals[i]).sum();
                if hess_eigs.iter().any(|&mu| (lam - mu).abs() < 1e-8 * (1.0 + mu.abs())) {
                    return Err(MorseError::Resonance(lam));
                }
                let mut rhs = vec![0.0; d];
                // Degree-1 x degree-(deg-1) quadratic couplings.
                if degree >= 2 {
                    for i in 0..k {
                        if m[i] == 0 {
                            continue;
                        }
                        let mut m1 = m;
                        m1[i] -= 1;
                        if degree == 2 {
                            // Avoid double counting the unordered split.
                            let a_i = get(&coeffs, &{
                                let mut e = [0usize; 3];
                                e[i] = 1;
                                e
                            });
                            let other = get(&coeffs, &m1);
                            let contribution = f2(&a_i, &other);
                            let weight = if m[i] == 2 { 0.5 } else { 0.5 };
                            for r in 0..d {
                                rhs[r] += weight * contribution[r];
                            }
                        } else {
                            let a_i = get(&coeffs, &{
                                let mut e = [0usize; 3];
                                e[i] = 1;
                                e
                            });
                            let w2 = get(&coeffs, &m1);
                            let contribution = f2(&a_i, &w2);
                            for r in 0..d {
                                rhs[r] += contribution[r];
                            }
                        }
                    }
                }
                if degree == 3 {
                    // Cubic term with the multinomial weight.
                    let mut vs: Vec<usize> = Vec::new();
                    for i in 0..k {
                        for _ in 0..m[i] {
                            vs.push(i);
                        }
                    }
                    let e = |i: usize| {
                        let mut e = [0usize; 3];
                        e[i] = 1;
                        e
                    };
                    let a0 = get(&coeffs, &e(vs[0]));
                    let a1 = get(&coeffs, &e(vs[1]));
                    let a2 = get(&coeffs, &e(vs[2]));
                    let mut denom = 1.0;
                    for i in 0..k {
                        denom *= (1..=m[i]).product::<usize>() as f64;
                    }
                    let weight = 1.0 / denom; // 3!/prod(m!) orderings / 3!
                    let contribution = f3(&a0, &a1, &a2);
                    for r in 0..d {
                        rhs[r] += weight * contribution[r];
                    }
                }
                // (lam I - H) w = rhs
                let mut a: Vec<Vec<f64>> = (0..d)
                    .map(|r| {
                        (0..d)
                            .map(|c| {
                                let h = hess[r * d + c];
                                if r == c {
                                    lam - h
                                } else {
                                    -h
                                }
                            })
                            .collect()
                    })
                    .collect();
                let mut b = rhs.clone();
                let w = solve_dense(&mut a, &mut b).ok_or(MorseError::Resonance(lam))?;
                coeffs.push((m, w));
            }
        }
        Ok(Chart {
            base: p.to_vec(),
            eigvals: eigvals.to_vec(),
            k,
            dim: d,
            coeffs,
        })
    }

    /// Chart point at parameter `u`.
    pub fn eval(&self, u: &[f64]) -> Vec<f64> {
        let mut out = self.base.clone();
        for (m, w) in &self.coeffs {
            let mut mono = 1.0;
            for i in 0..self.k {
                mono *= u[i].powi(m[i] as i32);
            }
            for r in 0..self.dim {
                out[r] += mono * w[r];
            }
        }
        out
    }

    /// Columns of the tangent map `Dw(u)` (dim x k, column-major).
    pub fn tangent(&self, u: &[f64]) -> Vec<Vec<f64>> {
        (0..self.k)
            .map(|i| {
                let mut col = vec![0.0; self.dim];
                for (m, w) in &self.coeffs {
                    if m[i] == 0 {
                        continue;
                    }
                    let mut mono = m[i] as f64;
                    for j in 0..self.k {
                        let e = if j == i { m[j] - 1 } else { m[j] };
                        mono *= u[j].powi(e as i32);
                    }
                    for r in 0..self.dim {
                        col[r] += mono * w[r];
                    }
                }
                col
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::morse::{builtin, critical_points};
    use crate::morse::ode::{Field, Integrator};

    #[test]
    fn chart_satisfies_invariance_to_high_order() {
        let f = builtin("t2-skew").unwrap();
        let crits = critical_points(&f).unwrap();
        let p = crits.iter().find(|c| c.index == 1).unwrap();
        // Unstable chart of the positive flow: positive eigenpairs.
        let chart = Chart::build(
            &f,
            &p.position,
            &[p.eigvals[1]],
            &[p.eigvecs[1].clone()],
            3,
        )
        .unwrap();
        for r in [1e-3, 1e-2, 3e-2] {
            for s in [-1.0, 1.0] {
                let u = [s * r];
                let w = chart.eval(&u);
                // Residual of the invariance equation F(w) - Dw * Lambda u.
                let mut fval = vec![0.0; f.dim];
                crate::morse::GradientField { f: &f }.eval(0.0, &w, &mut fval);
                let tangent = chart.tangent(&u);
                let mut res: f64 = 0.0;
                for r_ in 0..f.dim {
                    let pred = tangent[0][r_] * chart.eigvals[0] * u[0];
                    res = res.max((fval[r_] - pred).abs());
                }
                assert!(res < 40.0 * r.powi(4) * 1e3, "r={r} res={res}");
            }
        }
        // Backward flow from a chart point converges to the base point.
        let ig = Integrator::default();
        let y0 = chart.eval(&[1e-2]);
        let lam = chart.eigvals[0];
        let t_back = -(3.0 / lam) * (1e-2ف64::ln(1.0)).max(1.0);
        let _ = t_back;
        let traj = ig
            .solve(&crate::morse::GradientField { f: &f }, 0.0, -6.0 / lam, &y0)
            .unwrap();
        let (_, yend) = traj.end();
        let dist: f64 = yend
            .iter()
            .zip(&p.position)
            .map(|(a, b)| {
                let mut d = (a - b).rem_euclid(1.0);
                if d > 0.5 {
                    d -= 1.0;
                }
                d * d
            })
            .sum::<f64>()
            .sqrt();
        assert!(dist < 1e-4, "dist={dist}");
    }
}
