//! Stochastic-trace route for arbitrary operator pairs.

use crate::error::{check_len, invalid, Result};
use crate::linalg::{dist, norm_sq, sub};
use crate::operators::Operator;
use crate::tikhonov::{solve_normal, CGConfig, SolveResult};

use super::probes::{ProbeSet, TraceEstimator};
use super::{correct_traces, me_step, relative_change, Degeneracy, MEConfig, METrajectory, StepInput, StopReason};

/// `b = Au + ε` with regularizer `T`.
#[derive(Clone)]
pub struct LinearProblem {
    pub a: Operator,
    pub t: Operator,
    pub b: Vec<f64>,
    pub truth: Option<Vec<f64>>,
    m: usize,
}

impl std::fmt::Debug for LinearProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("LinearProblem")
            .field("m", &self.m)
            .field("n", &self.n())
            .field("has_truth", &self.truth.is_some())
            .finish()
    }
}

impl LinearProblem {
    pub fn new(a: Operator, t: Operator, b: Vec<f64>) -> Result<Self> {
        check_len(a.rows(), b.len())?;
        check_len(a.cols(), t.cols())?;
        let m = a.rows();
        Ok(LinearProblem {
            a,
            t,
            b,
            truth: None,
            m,
        })
    }

    pub fn with_truth(mut self, truth: Vec<f64>) -> Result<Self> {
        check_len(self.n(), truth.len())?;
        self.truth = Some(truth);
        Ok(self)
    }

    /// Override the sample count `m` used in the `σ²` update. A Fourier mask
    /// operator returns `2|S|` real rows for `|S|` complex samples.
    pub fn with_data_count(mut self, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(invalid("data count must be positive"));
        }
        self.m = m;
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn solve(&self, lambda: f64, cfg: &CGConfig) -> Result<SolveResult> {
        let rhs = self.a.adjoint(&self.b)?;
        solve_normal(self.a.as_ref(), self.t.as_ref(), &rhs, lambda, cfg)
    }

    /// `(‖Au − b‖², ‖Tu‖²)`
    pub fn norms(&self, u: &[f64]) -> Result<(f64, f64)> {
        let au = self.a.apply(u)?;
        let tu = self.t.apply(u)?;
        Ok((norm_sq(&sub(&au, &self.b)), norm_sq(&tu)))
    }
}

/// Corrected and raw traces used at one outer iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub lambda: f64,
    pub raw_a: f64,
    pub raw_t: f64,
    pub trace_a: f64,
    pub trace_t: f64,
}

#[derive(Debug, Clone)]
pub struct GeneralResult {
    pub trajectory: METrajectory,
    /// Reconstruction at the final `λ`.
    pub u: Vec<f64>,
    pub traces: Vec<TraceRecord>,
    pub cg_iterations: usize,
    pub cg_failures: usize,
}

/// Maximum-evidence iteration with CG solves and corrected Hutchinson traces.
/// At most `min(J, n)` probes are used.
pub fn me_iterate_general(problem: &LinearProblem, cfg: &MEConfig) -> Result<GeneralResult> {
    cfg.validate()?;
    let n = problem.n();
    let (a, t) = (problem.a.as_ref(), problem.t.as_ref());
    let probes = ProbeSet::gaussian(n, cfg.probes.min(n), cfg.seed)?;
    let mut estimator = TraceEstimator::new(a, t, &probes)?;
    let rhs = a.adjoint(&problem.b)?;

    let mut lambda = cfg.lambda0;
    let first = solve_normal(a, t, &rhs, lambda, &cfg.cg)?;
    let mut cg_iterations = first.iterations;
    let mut cg_failures = usize::from(!first.converged);
    let mut u = first.u;
    let mut traj = METrajectory::start(lambda);
    let mut traces = Vec::new();
    let mut reason = StopReason::MaxIter;
    let mut degeneracy = None;

    for k in 1..=cfg.max_iter {
        let est = estimator.estimate(lambda, &cfg.cg)?;
        cg_iterations += est.cg_iterations;
        if !est.converged {
            cg_failures += 1;
        }
        let Some((trace_a, trace_t)) = correct_traces(est.raw_a, est.raw_t, lambda, n) else {
            reason = StopReason::Divergence;
            degeneracy = Some(Degeneracy::NonFinite);
            break;
        };
        traces.push(TraceRecord {
            lambda,
            raw_a: est.raw_a,
            raw_t: est.raw_t,
            trace_a,
            trace_t,
        });
        let (misfit, reg_norm) = problem.norms(&u)?;
        let input = StepInput {
            misfit,
            reg_norm,
            trace_a,
            trace_t,
            lambda,
            m: problem.m(),
            n,
        };
        let state = match me_step(&input, k) {
            Ok(s) => s,
            Err((d, s)) => {
                if let Some(s) = s {
                    traj.push(s, f64::NAN);
                }
                reason = StopReason::Divergence;
                degeneracy = Some(d);
                break;
            }
        };
        if !cfg.in_range(state.lambda) {
            traj.push(state, f64::NAN);
            reason = StopReason::Divergence;
            degeneracy = Some(Degeneracy::LambdaRange);
            break;
        }
        let warm = CGConfig {
            warm_start: Some(u.clone()),
            ..cfg.cg.clone()
        };
        let next = solve_normal(a, t, &rhs, state.lambda, &warm)?;
        cg_iterations += next.iterations;
        if !next.converged {
            cg_failures += 1;
        }
        let change = relative_change(dist(&next.u, &u).powi(2), norm_sq(&u));
        traj.push(state, change);
        u = next.u;
        lambda = state.lambda;
        if change < cfg.tol {
            reason = StopReason::Tolerance;
            break;
        }
    }
    if degeneracy.is_none() && cg_failures > 0 {
        degeneracy = Some(Degeneracy::SolverFailure);
    }
    traj.stop(reason, degeneracy);
    Ok(GeneralResult {
        trajectory: traj,
        u,
        traces,
        cg_iterations,
        cg_failures,
    })
}
