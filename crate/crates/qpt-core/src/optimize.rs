//! Damped Gauss-Newton for small nonlinear least-squares problems.
//!
//! All fits in this crate (Lorentzian knee, temperature sweeps, two-tone
//! carrier calibration) have 2..4 parameters and well-conditioned normal
//! equations, so a Levenberg-damped Gauss-Newton with box projection is
//! enough. Iteration order is deterministic.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// A weighted least-squares model: residual vector and its Jacobian with
/// respect to the (possibly transformed) parameter vector.
pub trait LeastSquaresModel {
    /// Number of parameters.
    fn n_params(&self) -> usize;
    /// Number of residuals.
    fn n_residuals(&self) -> usize;
    /// Fill `out` (length `n_residuals`) with residuals at `params`.
    fn residuals(&self, params: &[f64], out: &mut [f64]);
    /// Fill `out` (row-major `n_residuals x n_params`) with the Jacobian.
    /// Default: central finite differences of [`Self::residuals`].
    fn jacobian(&self, params: &[f64], out: &mut [f64]) {
        let n = self.n_residuals();
        let p = self.n_params();
        let mut plus = vec![0.0; n];
        let mut minus = vec![0.0; n];
        let mut work = params.to_vec();
        for j in 0..p {
            let h = 1e-6 * params[j].abs().max(1e-6);
            work[j] = params[j] + h;
            self.residuals(&work, &mut plus);
            work[j] = params[j] - h;
            self.residuals(&work, &mut minus);
            work[j] = params[j];
            for i in 0..n {
                out[i * p + j] = (plus[i] - minus[i]) / (2.0 * h);
            }
        }
    }
    /// Clamp parameters into their feasible box. Default: no-op.
    fn project(&self, _params: &mut [f64]) {}
}

/// Solver configuration.
#[derive(Clone, Copy, Debug)]
pub struct GaussNewtonOptions {
    pub max_iterations: usize,
    /// Stop when the damped step's infinity norm falls below this.
    pub step_tolerance: f64,
    /// Stop when the relative cost decrease falls below this.
    pub cost_tolerance: f64,
    /// Stop outright when the cost falls below this. Guards against slow
    /// crawls through flat valleys (e.g. a nuisance parameter pinned at a
    /// bound with a vanishing gradient) once residuals are already
    /// negligible. Zero disables the check.
    pub cost_floor: f64,
}

impl Default for GaussNewtonOptions {
    fn default() -> Self {
        GaussNewtonOptions {
            max_iterations: 200,
            step_tolerance: 1e-12,
            cost_tolerance: 1e-14,
            cost_floor: 0.0,
        }
    }
}

/// Result of a converged (or diagnosed) fit.
#[derive(Clone, Debug)]
pub struct FitReport {
    pub params: Vec<f64>,
    /// Sum of squared residuals at the solution.
    pub cost: f64,
    pub iterations: usize,
    /// `s^2 (J^T J)^{-1}` with `s^2 = cost / (n - p)`; row-major `p x p`.
    /// Zero matrix when `n <= p` or the normal matrix is singular.
    pub covariance: Vec<f64>,
    pub n_residuals: usize,
}

impl FitReport {
    /// Standard error of parameter `j`.
    pub fn std_error(&self, j: usize) -> f64 {
        let p = self.params.len();
        self.covariance[j * p + j].max(0.0).sqrt()
    }
}

fn cost_of(model: &impl LeastSquaresModel, params: &[f64], buf: &mut [f64]) -> f64 {
    model.residuals(params, buf);
    buf.iter().map(|r| r * r).sum()
}

/// Minimize the sum of squared residuals with Levenberg-damped Gauss-Newton.
pub fn fit(model: &impl LeastSquaresModel, initial: &[f64], opts: &GaussNewtonOptions) -> Result<FitReport> {
    let n = model.n_residuals();
    let p = model.n_params();
    if n < p {
        return Err(Error::InsufficientData(format!(
            "{n} residuals for {p} parameters"
        )));
    }
    let mut params = initial.to_vec();
    model.project(&mut params);

    let mut resid = vec![0.0; n];
    let mut jac = vec![0.0; n * p];
    let mut cost = cost_of(model, &params, &mut resid);
    if !cost.is_finite() {
        return Err(Error::domain("non-finite cost at the initial guess"));
    }
    if cost <= opts.cost_floor {
        return Ok(finish(model, params, cost, 0, n, p));
    }

    let mut lambda = 1e-3;
    let mut last_step = f64::INFINITY;
    for iteration in 1..=opts.max_iterations {
        model.jacobian(&params, &mut jac);
        let j = DMatrix::from_row_slice(n, p, &jac);
        let r = DVector::from_column_slice(&resid);
        let jtj = j.transpose() * &j;
        let jtr = j.transpose() * r;

        let mut accepted = false;
        for _ in 0..20 {
            let mut damped = jtj.clone();
            for d in 0..p {
                damped[(d, d)] += lambda * jtj[(d, d)].max(1e-30);
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&jtr);
            let mut trial = params.clone();
            for d in 0..p {
                trial[d] -= step[d];
            }
            model.project(&mut trial);
            let mut trial_resid = vec![0.0; n];
            let trial_cost = cost_of(model, &trial, &mut trial_resid);
            if trial_cost.is_finite() && trial_cost <= cost {
                last_step = params
                    .iter()
                    .zip(&trial)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0, f64::max);
                let rel_decrease = (cost - trial_cost) / cost.max(1e-300);
                params = trial;
                resid = trial_resid;
                cost = trial_cost;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if last_step < opts.step_tolerance
                    || rel_decrease < opts.cost_tolerance
                    || cost <= opts.cost_floor
                {
                    return Ok(finish(model, params, cost, iteration, n, p));
                }
                break;
            }
            lambda *= 10.0;
        }
        if !accepted {
            // No damping level improved the cost. On the very first
            // iteration that means the start is already (numerically)
            // stationary; later it counts as converged only if the last
            // accepted step was already negligible.
            if iteration == 1 || last_step < opts.step_tolerance * 10.0 || cost == 0.0 {
                return Ok(finish(model, params, cost, iteration, n, p));
            }
            return Err(Error::FitNonConvergence {
                iterations: iteration,
                cost,
                step: last_step,
            });
        }
    }
    Err(Error::FitNonConvergence {
        iterations: opts.max_iterations,
        cost,
        step: last_step,
    })
}

/// Refine an already-converged solution with undamped Gauss-Newton steps.
///
/// Near a well-conditioned minimum the Newton map is contractive and its
/// fixed point is resolved to ~1e-14 in the parameters, far below the
/// float-noise plateau that limits cost-comparison-based line searches.
/// Diverging steps (cost more than doubling) revert to the input solution.
pub fn newton_polish(
    model: &impl LeastSquaresModel,
    coarse: FitReport,
    steps: usize,
) -> FitReport {
    let n = model.n_residuals();
    let p = model.n_params();
    let mut params = coarse.params.clone();
    let mut resid = vec![0.0; n];
    let mut jac = vec![0.0; n * p];
    for _ in 0..steps {
        model.jacobian(&params, &mut jac);
        model.residuals(&params, &mut resid);
        let j = DMatrix::from_row_slice(n, p, &jac);
        let r = DVector::from_column_slice(&resid);
        let jtj = j.transpose() * &j;
        let jtr = j.transpose() * r;
        let Some(chol) = jtj.cholesky() else {
            return coarse;
        };
        let step = chol.solve(&jtr);
        for d in 0..p {
            params[d] -= step[d];
        }
        model.project(&mut params);
    }
    let cost = cost_of(model, &params, &mut resid);
    if cost.is_finite() && cost <= 2.0 * coarse.cost.max(f64::MIN_POSITIVE) {
        finish(model, params, cost, coarse.iterations, n, p)
    } else {
        coarse
    }
}

fn finish(
    model: &impl LeastSquaresModel,
    params: Vec<f64>,
    cost: f64,
    iterations: usize,
    n: usize,
    p: usize,
) -> FitReport {
    let mut jac = vec![0.0; n * p];
    model.jacobian(&params, &mut jac);
    let j = DMatrix::from_row_slice(n, p, &jac);
    let jtj = j.transpose() * &j;
    let s2 = if n > p { cost / (n - p) as f64 } else { 0.0 };
    let covariance = match jtj.try_inverse() {
        Some(inv) => {
            let mut cov = vec![0.0; p * p];
            for a in 0..p {
                for b in 0..p {
                    cov[a * p + b] = s2 * inv[(a, b)];
                }
            }
            cov
        }
        None => vec![0.0; p * p],
    };
    FitReport {
        params,
        cost,
        iterations,
        covariance,
        n_residuals: n,
    }
}
