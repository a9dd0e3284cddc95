//! Maximum-evidence fixed-point iteration for `(σ², η², λ)`.
//!
//! Each outer step solves the Tikhonov problem at the current `λ_k`, then
//! updates
//!
//! ```text
//! σ²_{k+1} = ‖Au_k − b‖² / (m − trace(H⁻¹AᵀA))
//! η²_{k+1} = ‖Tu_k‖²     / (n − λ_k trace(H⁻¹TᵀT))
//! λ_{k+1}  = σ²_{k+1} / η²_{k+1}
//! ```
//!
//! and stops when `‖u_{k+1} − u_k‖ / ‖u_k‖ < tol`. [`general`] estimates the
//! traces stochastically for arbitrary operators; [`spectral`] evaluates
//! everything exactly in the DFT domain.

pub mod general;
pub mod probes;
pub mod spectral;

use std::io::Write;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::tikhonov::CGConfig;

pub use general::{me_iterate_general, GeneralResult, LinearProblem, TraceRecord};
pub use probes::{hutchinson_traces, ProbeSet, TraceEstimate, TraceEstimator};
pub use spectral::{me_iterate_spectral, SpectralResult, SpectralSelector};

/// One point of the iteration. State 0 carries only `λ0`; its variances are NaN.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MEState {
    pub k: usize,
    pub sigma_sq: f64,
    pub eta_sq: f64,
    pub lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Tolerance,
    MaxIter,
    Divergence,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    /// `‖Au − b‖ = 0`: the data are fit exactly and `σ²` collapses to 0.
    ZeroMisfit,
    /// `‖Tu‖ = 0`: `η²` collapses and `λ` is unbounded.
    ZeroRegNorm,
    /// `m − trace(H⁻¹AᵀA) ≤ 0`.
    DataDof,
    /// `n − λ trace(H⁻¹TᵀT) ≤ 0`.
    PriorDof,
    /// `λ` left `[λ0 / factor, λ0 · factor]`.
    LambdaRange,
    NonFinite,
    /// Some inner CG solve hit its iteration cap.
    SolverFailure,
}

#[derive(Debug, Clone)]
pub struct METrajectory {
    pub lambda0: f64,
    pub states: Vec<MEState>,
    /// `solution_change[k] = ‖u_{k+1} − u_k‖ / ‖u_k‖`.
    pub solution_change: Vec<f64>,
    pub converged: bool,
    pub stop_reason: StopReason,
    pub degeneracy: Option<Degeneracy>,
}

impl METrajectory {
    fn start(lambda0: f64) -> Self {
        METrajectory {
            lambda0,
            states: vec![MEState {
                k: 0,
                sigma_sq: f64::NAN,
                eta_sq: f64::NAN,
                lambda: lambda0,
            }],
            solution_change: Vec::new(),
            converged: false,
            stop_reason: StopReason::MaxIter,
            degeneracy: None,
        }
    }

    /// Number of completed updates.
    pub fn iterations(&self) -> usize {
        self.states.len() - 1
    }

    pub fn final_state(&self) -> Option<&MEState> {
        if self.states.len() > 1 {
            self.states.last()
        } else {
            None
        }
    }

    pub fn final_lambda(&self) -> f64 {
        self.states.last().map(|s| s.lambda).unwrap_or(self.lambda0)
    }

    /// CSV with header `k,sigma_sq,eta_sq,lambda,solution_change`. Undefined
    /// entries are left empty.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["k", "sigma_sq", "eta_sq", "lambda", "solution_change"])?;
        for (i, s) in self.states.iter().enumerate() {
            let change = if i == 0 {
                None
            } else {
                self.solution_change.get(i - 1).copied()
            };
            wr.write_record([
                s.k.to_string(),
                fmt_opt(s.sigma_sq),
                fmt_opt(s.eta_sq),
                fmt_opt(s.lambda),
                change.map(fmt_opt).unwrap_or_default(),
            ])?;
        }
        wr.flush()?;
        Ok(())
    }

    fn push(&mut self, state: MEState, change: f64) {
        self.states.push(state);
        self.solution_change.push(change);
    }

    fn stop(&mut self, reason: StopReason, degeneracy: Option<Degeneracy>) {
        self.converged = reason == StopReason::Tolerance;
        self.stop_reason = reason;
        self.degeneracy = degeneracy;
    }
}

fn fmt_opt(v: f64) -> String {
    if v.is_finite() {
        format!("{v:e}")
    } else {
        String::new()
    }
}

#[derive(Debug, Clone)]
pub struct MEConfig {
    pub lambda0: f64,
    /// Maximum number of outer updates `K`.
    pub max_iter: usize,
    pub tol: f64,
    /// Probe count `J` for the general path.
    pub probes: usize,
    pub seed: u64,
    pub cg: CGConfig,
    pub divergence_factor: f64,
}

impl Default for MEConfig {
    fn default() -> Self {
        MEConfig {
            lambda0: 1.0,
            max_iter: 30,
            tol: 1e-4,
            probes: 32,
            seed: 0,
            cg: CGConfig::default(),
            divergence_factor: 1e6,
        }
    }
}

impl MEConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda0 > 0.0 && self.lambda0.is_finite()) {
            return Err(invalid(format!("lambda0 must be positive, got {}", self.lambda0)));
        }
        if self.max_iter == 0 {
            return Err(invalid("max_iter must be at least 1"));
        }
        if !(self.tol > 0.0) {
            return Err(invalid("tol must be positive"));
        }
        if self.probes == 0 {
            return Err(invalid("probe count must be at least 1"));
        }
        if !(self.divergence_factor > 1.0) {
            return Err(invalid("divergence_factor must exceed 1"));
        }
        self.cg.validate()
    }

    fn in_range(&self, lambda: f64) -> bool {
        lambda <= self.lambda0 * self.divergence_factor && lambda >= self.lambda0 / self.divergence_factor
    }
}

/// Rescale raw trace estimates so that `𝔸₂ + λ𝕋₂ = n` holds exactly.
pub fn correct_traces(raw_a: f64, raw_t: f64, lambda: f64, n: usize) -> Option<(f64, f64)> {
    let denom = raw_a + lambda * raw_t;
    if !(denom > 0.0) || !denom.is_finite() {
        return None;
    }
    let n = n as f64;
    Some((n * raw_a / denom, n * raw_t / denom))
}

/// Inputs of one evidence update.
#[derive(Debug, Clone, Copy)]
pub struct StepInput {
    /// `‖Au − b‖²`
    pub misfit: f64,
    /// `‖Tu‖²`
    pub reg_norm: f64,
    pub trace_a: f64,
    pub trace_t: f64,
    pub lambda: f64,
    pub m: usize,
    pub n: usize,
}

/// One evidence update. On [`Degeneracy::ZeroMisfit`] the returned error
/// carries the collapsed state `σ² = λ = 0`.
pub fn me_step(input: &StepInput, k: usize) -> std::result::Result<MEState, (Degeneracy, Option<MEState>)> {
    let data_dof = input.m as f64 - input.trace_a;
    let prior_dof = input.n as f64 - input.lambda * input.trace_t;
    let finite = [input.misfit, input.reg_norm, input.trace_a, input.trace_t, input.lambda]
        .iter()
        .all(|v| v.is_finite());
    if !finite {
        return Err((Degeneracy::NonFinite, None));
    }
    if !(data_dof > 0.0) {
        return Err((Degeneracy::DataDof, None));
    }
    if !(prior_dof > 0.0) {
        return Err((Degeneracy::PriorDof, None));
    }
    let eta_sq = input.reg_norm / prior_dof;
    if !(eta_sq > 0.0) {
        return Err((Degeneracy::ZeroRegNorm, None));
    }
    let sigma_sq = input.misfit / data_dof;
    if sigma_sq == 0.0 {
        let state = MEState {
            k,
            sigma_sq,
            eta_sq,
            lambda: 0.0,
        };
        return Err((Degeneracy::ZeroMisfit, Some(state)));
    }
    let lambda = sigma_sq / eta_sq;
    if !lambda.is_finite() {
        return Err((Degeneracy::NonFinite, None));
    }
    Ok(MEState {
        k,
        sigma_sq,
        eta_sq,
        lambda,
    })
}

/// `‖new − old‖ / ‖old‖`, or the absolute change when `old = 0`.
pub(crate) fn relative_change(diff_sq: f64, old_norm_sq: f64) -> f64 {
    if old_norm_sq > 0.0 {
        (diff_sq / old_norm_sq).sqrt()
    } else {
        diff_sq.sqrt()
    }
}
