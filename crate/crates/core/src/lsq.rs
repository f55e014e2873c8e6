//! Dense nonlinear least-squares solvers.
//!
//! Both solvers work on the column-scaled Jacobian. Each iteration factors
//! `J = Q R` once and takes the SVD of the small `R`, so every damping
//! value tried within an iteration reuses the same factorization.

use faer::Mat;
use serde::{Deserialize, Serialize};

/// A residual vector `r(p)` with an analytic Jacobian `∂r/∂p`.
pub trait LeastSquaresProblem {
    fn num_params(&self) -> usize;
    fn num_residuals(&self) -> usize;
    fn residuals(&self, params: &[f64], out: &mut [f64]);
    /// Writes the `num_residuals × num_params` Jacobian into `out`.
    fn jacobian(&self, params: &[f64], out: &mut Mat<f64>);
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iterations: usize,
    /// Converged once `‖δ‖ ≤ step_tolerance · (‖p‖ + step_tolerance)`.
    pub step_tolerance: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_iterations: 200,
            step_tolerance: 1e-12,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub params: Vec<f64>,
    /// Sum of squared residuals at `params`.
    pub cost: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn sum_of_squares(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum()
}

/// Linearization at the current iterate in scaled coordinates.
struct Linearization {
    scale: Vec<f64>,
    sv: Vec<f64>,
    v: Mat<f64>,
    /// `Uᵀ r`
    ug: Vec<f64>,
}

impl Linearization {
    fn new(jac: &Mat<f64>, r: &[f64]) -> Option<Self> {
        let (m, n) = (jac.nrows(), jac.ncols());
        let mut scale = vec![1.0; n];
        for (j, s) in scale.iter_mut().enumerate() {
            let norm = jac.col(j).norm_l2();
            if norm > 0.0 && norm.is_finite() {
                *s = norm;
            }
        }
        if jac.col_iter().any(|c| c.iter().any(|v| !v.is_finite())) {
            return None;
        }
        let scaled = Mat::from_fn(m, n, |i, j| jac[(i, j)] / scale[j]);
        let svd = scaled.thin_svd().ok()?;
        let u = svd.U();
        let sv: Vec<f64> = svd.S().column_vector().iter().copied().collect();
        let ug = (0..sv.len())
            .map(|i| (0..m).map(|k| u[(k, i)] * r[k]).sum())
            .collect();
        crate::clear_vector_state();
        Some(Self {
            scale,
            sv,
            v: svd.V().to_owned(),
            ug,
        })
    }

    /// Solves `min ‖J δ + r‖² + λ ‖D δ‖²` with `D` the column norms of `J`.
    /// `lambda = 0` gives the minimum-norm Gauss-Newton step. Returns the
    /// step and the predicted decrease in cost.
    fn step(&self, lambda: f64) -> (Vec<f64>, f64) {
        let smax = self.max_sv();
        let n = self.scale.len();
        let mut coef = vec![0.0; self.sv.len()];
        let mut predicted = 0.0;
        for (i, &s) in self.sv.iter().enumerate() {
            if s <= smax * 1e-14 || s == 0.0 {
                continue;
            }
            let g = self.ug[i];
            let c = -s * g / (s * s + lambda);
            coef[i] = c;
            // ‖g‖² − ‖g + s c‖² restricted to this direction
            let res = g + s * c;
            predicted += g * g - res * res;
        }
        let step = (0..n)
            .map(|j| {
                let d: f64 = coef.iter().enumerate().map(|(i, c)| self.v[(j, i)] * c).sum();
                d / self.scale[j]
            })
            .collect();
        (step, predicted)
    }

    fn max_sv(&self) -> f64 {
        self.sv.iter().fold(0.0f64, |m, &s| m.max(s))
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn small_step(step: &[f64], params: &[f64], tol: f64) -> bool {
    norm(step) <= tol * (norm(params) + tol)
}

/// Levenberg-Marquardt with Nielsen's damping update.
pub fn levenberg_marquardt<P: LeastSquaresProblem>(
    problem: &P,
    init: &[f64],
    opts: SolverOptions,
) -> Solution {
    let n = problem.num_params();
    let m = problem.num_residuals();
    let mut params = init.to_vec();
    let mut r = vec![0.0; m];
    let mut r_trial = vec![0.0; m];
    let mut jac = Mat::zeros(m, n);
    problem.residuals(&params, &mut r);
    let mut cost = sum_of_squares(&r);
    let mut lambda: Option<f64> = None;
    let mut nu = 2.0;
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iterations && !converged {
        iterations += 1;
        problem.jacobian(&params, &mut jac);
        let Some(lin) = Linearization::new(&jac, &r) else {
            break;
        };
        let lam = lambda.get_or_insert_with(|| 1e-3 * lin.max_sv().powi(2).max(1e-300));
        let mut accepted = false;
        while !accepted {
            let (step, predicted) = lin.step(*lam);
            if small_step(&step, &params, opts.step_tolerance) {
                converged = true;
                break;
            }
            let trial: Vec<f64> = params.iter().zip(&step).map(|(p, d)| p + d).collect();
            problem.residuals(&trial, &mut r_trial);
            let trial_cost = sum_of_squares(&r_trial);
            let actual = cost - trial_cost;
            let rho = if predicted > 0.0 {
                actual / predicted
            } else {
                -1.0
            };
            if trial_cost.is_finite() && rho > 0.0 {
                params = trial;
                std::mem::swap(&mut r, &mut r_trial);
                cost = trial_cost;
                *lam *= (1.0f64 / 3.0).max(1.0 - (2.0 * rho - 1.0).powi(3));
                nu = 2.0;
                accepted = true;
                if small_step(&step, &params, opts.step_tolerance) {
                    converged = true;
                }
            } else {
                *lam *= nu;
                nu *= 2.0;
                if *lam > 1e300 || !lam.is_finite() {
                    // no descent direction left at working precision
                    converged = cost == 0.0;
                    return Solution {
                        params,
                        cost,
                        iterations,
                        converged,
                    };
                }
            }
        }
        if cost == 0.0 {
            converged = true;
        }
    }

    Solution {
        params,
        cost,
        iterations,
        converged,
    }
}

/// Gauss-Newton with step halving when a full step does not reduce the
/// cost. Returns `None` if the iteration produces non-finite values.
pub fn gauss_newton<P: LeastSquaresProblem>(
    problem: &P,
    init: &[f64],
    opts: SolverOptions,
) -> Option<Solution> {
    let n = problem.num_params();
    let m = problem.num_residuals();
    let mut params = init.to_vec();
    let mut r = vec![0.0; m];
    let mut r_trial = vec![0.0; m];
    let mut jac = Mat::zeros(m, n);
    problem.residuals(&params, &mut r);
    let mut cost = sum_of_squares(&r);
    if !cost.is_finite() {
        return None;
    }
    let mut iterations = 0;
    let mut converged = false;

    while iterations < opts.max_iterations {
        iterations += 1;
        problem.jacobian(&params, &mut jac);
        let lin = Linearization::new(&jac, &r)?;
        let (step, _) = lin.step(0.0);
        if step.iter().any(|d| !d.is_finite()) {
            return None;
        }
        if small_step(&step, &params, opts.step_tolerance) {
            converged = true;
            break;
        }
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let trial: Vec<f64> = params.iter().zip(&step).map(|(p, d)| p + t * d).collect();
            problem.residuals(&trial, &mut r_trial);
            let trial_cost = sum_of_squares(&r_trial);
            if !trial_cost.is_finite() {
                return None;
            }
            if trial_cost <= cost {
                params = trial;
                std::mem::swap(&mut r, &mut r_trial);
                cost = trial_cost;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            // step no longer reduces the cost at working precision
            converged = true;
            break;
        }
        if t == 1.0 && small_step(&step, &params, opts.step_tolerance) {
            converged = true;
            break;
        }
    }

    Some(Solution {
        params,
        cost,
        iterations,
        converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    /// y = p0 · exp(p1 · x)
    struct ExpFit {
        x: Vec<f64>,
        y: Vec<f64>,
    }

    impl LeastSquaresProblem for ExpFit {
        fn num_params(&self) -> usize {
            2
        }
        fn num_residuals(&self) -> usize {
            self.x.len()
        }
        fn residuals(&self, p: &[f64], out: &mut [f64]) {
            for (k, o) in out.iter_mut().enumerate() {
                *o = p[0] * (p[1] * self.x[k]).exp() - self.y[k];
            }
        }
        fn jacobian(&self, p: &[f64], out: &mut Mat<f64>) {
            for k in 0..self.x.len() {
                let e = (p[1] * self.x[k]).exp();
                out[(k, 0)] = e;
                out[(k, 1)] = p[0] * self.x[k] * e;
            }
        }
    }

    fn problem() -> ExpFit {
        let x: Vec<f64> = (0..40).map(|k| k as f64 * 0.05).collect();
        let y = x.iter().map(|x| 2.5 * (-1.3 * x).exp()).collect();
        ExpFit { x, y }
    }

    #[test]
    fn lm_recovers_exact_parameters() {
        let sol = levenberg_marquardt(&problem(), &[1.0, 0.0], SolverOptions::default());
        assert!(sol.converged);
        assert!((sol.params[0] - 2.5).abs() < 1e-10);
        assert!((sol.params[1] + 1.3).abs() < 1e-10);
        assert!(sol.cost < 1e-20);
    }

    #[test]
    fn gauss_newton_recovers_exact_parameters() {
        let sol = gauss_newton(&problem(), &[2.0, -1.0], SolverOptions::default()).unwrap();
        assert!(sol.converged);
        assert!((sol.params[0] - 2.5).abs() < 1e-10);
        assert!((sol.params[1] + 1.3).abs() < 1e-10);
    }

    #[test]
    fn lm_handles_zero_jacobian_column() {
        // second parameter has no influence: step must stay finite
        struct Flat;
        impl LeastSquaresProblem for Flat {
            fn num_params(&self) -> usize {
                2
            }
            fn num_residuals(&self) -> usize {
                3
            }
            fn residuals(&self, p: &[f64], out: &mut [f64]) {
                for (k, o) in out.iter_mut().enumerate() {
                    *o = p[0] - k as f64;
                }
            }
            fn jacobian(&self, _p: &[f64], out: &mut Mat<f64>) {
                for k in 0..3 {
                    out[(k, 0)] = 1.0;
                    out[(k, 1)] = 0.0;
                }
            }
        }
        let sol = levenberg_marquardt(&Flat, &[0.0, 0.7], SolverOptions::default());
        assert!((sol.params[0] - 1.0).abs() < 1e-10);
        assert_eq!(sol.params[1], 0.7);
    }
}
