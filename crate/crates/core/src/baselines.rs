//! UPRE selection of `λ` when `σ²` is known.
//!
//! The objective `−mσ² + ‖Au_λ − b‖² + 2σ² trace(H⁻¹AᵀA)` is minimized over a
//! coarse log grid and then over a refined log grid spanning one coarse step
//! either side of the coarse winner.

use rustfft::num_complex::Complex64;

use crate::error::{check_len, invalid, Result};
use crate::me_select::{correct_traces, LinearProblem, ProbeSet, TraceEstimator};
use crate::spectral::{spectral_norms, spectral_solve, spectral_traces, SpectralModel};
use crate::tikhonov::CGConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UPREGrid {
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub coarse_count: usize,
    pub refine_count: usize,
}

impl Default for UPREGrid {
    fn default() -> Self {
        UPREGrid {
            lambda_min: 1e-4,
            lambda_max: 1e4,
            coarse_count: 20,
            refine_count: 20,
        }
    }
}

impl UPREGrid {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda_min > 0.0 && self.lambda_min < self.lambda_max && self.lambda_max.is_finite()) {
            return Err(invalid(format!(
                "bad grid range [{}, {}]",
                self.lambda_min, self.lambda_max
            )));
        }
        if self.coarse_count < 2 || self.refine_count < 2 {
            return Err(invalid("grid counts must be at least 2"));
        }
        Ok(())
    }

    pub fn coarse(&self) -> Vec<f64> {
        log_grid(self.lambda_min, self.lambda_max, self.coarse_count)
    }
}

/// `count` points from `lo` to `hi` inclusive with constant ratio.
pub fn log_grid(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..count)
        .map(|i| {
            if i == 0 {
                lo
            } else if i == count - 1 {
                hi
            } else {
                (a + (b - a) * i as f64 / (count - 1) as f64).exp()
            }
        })
        .collect()
}

/// Pieces of the UPRE objective at one `λ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpreTerms {
    pub misfit: f64,
    pub trace_a: f64,
    pub m: usize,
}

impl UpreTerms {
    pub fn objective(&self, sigma_sq: f64) -> f64 {
        -(self.m as f64) * sigma_sq + self.misfit + 2.0 * sigma_sq * self.trace_a
    }
}

/// Source of `‖Au_λ − b‖²` and `trace(H⁻¹AᵀA)`.
pub trait UpreEvaluator {
    fn terms(&mut self, lambda: f64) -> Result<UpreTerms>;
}

/// Exact DFT-domain terms.
pub struct SpectralUpre<'a> {
    model: &'a SpectralModel,
    b_hat: Vec<Complex64>,
}

impl<'a> SpectralUpre<'a> {
    pub fn new(model: &'a SpectralModel, b_hat: Vec<Complex64>) -> Result<Self> {
        check_len(model.n_total(), b_hat.len())?;
        Ok(SpectralUpre { model, b_hat })
    }

    pub fn from_signal(model: &'a SpectralModel, b: &[f64]) -> Result<Self> {
        let b_hat = model.dft().forward(b)?;
        Self::new(model, b_hat)
    }
}

impl UpreEvaluator for SpectralUpre<'_> {
    fn terms(&mut self, lambda: f64) -> Result<UpreTerms> {
        let u_hat = spectral_solve(self.model, &self.b_hat, lambda)?;
        let norms = spectral_norms(self.model, &u_hat, &self.b_hat)?;
        let tr = spectral_traces(self.model, lambda)?;
        Ok(UpreTerms {
            misfit: norms.data_misfit,
            trace_a: tr.trace_a,
            m: self.model.m(),
        })
    }
}

/// CG solves with corrected Hutchinson traces; the same probes serve every `λ`.
pub struct GeneralUpre<'a> {
    problem: &'a LinearProblem,
    estimator: TraceEstimator<'a>,
    cg: CGConfig,
}

impl<'a> GeneralUpre<'a> {
    pub fn new(problem: &'a LinearProblem, probes: &'a ProbeSet, cg: CGConfig) -> Result<Self> {
        let estimator = TraceEstimator::new(problem.a.as_ref(), problem.t.as_ref(), probes)?;
        Ok(GeneralUpre { problem, estimator, cg })
    }
}

impl UpreEvaluator for GeneralUpre<'_> {
    fn terms(&mut self, lambda: f64) -> Result<UpreTerms> {
        let sol = self.problem.solve(lambda, &self.cg)?;
        let (misfit, _) = self.problem.norms(&sol.u)?;
        let est = self.estimator.estimate(lambda, &self.cg)?;
        let (trace_a, _) = correct_traces(est.raw_a, est.raw_t, lambda, self.problem.n())
            .ok_or_else(|| crate::Error::Degenerate("trace estimates sum to a nonpositive value".into()))?;
        Ok(UpreTerms {
            misfit,
            trace_a,
            m: self.problem.m(),
        })
    }
}

/// UPRE objective at one `λ`.
pub fn upre_objective(eval: &mut dyn UpreEvaluator, lambda: f64, sigma_sq: f64) -> Result<f64> {
    check_sigma(sigma_sq)?;
    Ok(eval.terms(lambda)?.objective(sigma_sq))
}

fn check_sigma(sigma_sq: f64) -> Result<()> {
    if sigma_sq >= 0.0 && sigma_sq.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "sigma^2 must be finite and nonnegative, got {sigma_sq}"
        )))
    }
}

#[derive(Debug, Clone)]
pub struct UpreSelection {
    pub lambda: f64,
    pub objective: f64,
    pub coarse_lambda: f64,
    pub coarse_objective: f64,
    /// The winner sits on an end of the grid range.
    pub boundary: bool,
    pub coarse: Vec<(f64, f64)>,
    pub refined: Vec<(f64, f64)>,
}

/// Two-pass grid minimization of the UPRE objective.
pub fn upre_select(eval: &mut dyn UpreEvaluator, sigma_sq: f64, grid: &UPREGrid) -> Result<UpreSelection> {
    check_sigma(sigma_sq)?;
    grid.validate()?;
    let coarse_grid = grid.coarse();
    let mut coarse = Vec::with_capacity(coarse_grid.len());
    for &l in &coarse_grid {
        coarse.push((l, eval.terms(l)?.objective(sigma_sq)));
    }
    let best = argmin(&coarse);
    let (coarse_lambda, coarse_objective) = coarse[best];
    let lo = coarse_grid[best.saturating_sub(1)];
    let hi = coarse_grid[(best + 1).min(coarse_grid.len() - 1)];
    let mut refined = Vec::with_capacity(grid.refine_count);
    for l in log_grid(lo, hi, grid.refine_count) {
        refined.push((l, eval.terms(l)?.objective(sigma_sq)));
    }
    let rbest = argmin(&refined);
    let (mut lambda, mut objective) = (coarse_lambda, coarse_objective);
    if refined[rbest].1 < objective {
        (lambda, objective) = refined[rbest];
    }
    let boundary = lambda <= grid.lambda_min || lambda >= grid.lambda_max;
    Ok(UpreSelection {
        lambda,
        objective,
        coarse_lambda,
        coarse_objective,
        boundary,
        coarse,
        refined,
    })
}

fn argmin(v: &[(f64, f64)]) -> usize {
    let mut best = 0;
    for (i, &(_, f)) in v.iter().enumerate() {
        if f < v[best].1 {
            best = i;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::GridShape;

    #[test]
    fn grid_ratios_are_constant() {
        let g = log_grid(1e-4, 1e4, 20);
        assert_eq!(g.len(), 20);
        assert_eq!(g[0], 1e-4);
        assert_eq!(g[19], 1e4);
        let r0 = g[1] / g[0];
        for w in g.windows(2) {
            assert!((w[1] / w[0] - r0).abs() < 1e-12 * r0);
        }
    }

    #[test]
    fn invalid_grids_rejected() {
        let g = UPREGrid {
            lambda_min: 2.0,
            lambda_max: 1.0,
            ..UPREGrid::default()
        };
        assert!(g.validate().is_err());
        let g = UPREGrid {
            coarse_count: 1,
            ..UPREGrid::default()
        };
        assert!(g.validate().is_err());
    }

    #[test]
    fn large_lambda_limit_keeps_only_dc() {
        let n = 32;
        let model = SpectralModel::denoise(GridShape::D1(n), 1).unwrap();
        let b: Vec<f64> = (0..n).map(|i| ((i * 7) % 5) as f64).collect();
        let mean = b.iter().sum::<f64>() / n as f64;
        let dev: f64 = b.iter().map(|v| (v - mean).powi(2)).sum();
        let sigma_sq = 0.3;
        let mut eval = SpectralUpre::from_signal(&model, &b).unwrap();
        let f = upre_objective(&mut eval, 1e12, sigma_sq).unwrap();
        let limit = -(n as f64) * sigma_sq + dev + 2.0 * sigma_sq;
        assert!((f - limit).abs() < 1e-8 * limit.abs());
    }

    #[test]
    fn zero_sigma_gives_boundary_winner() {
        let n = 32;
        let model = SpectralModel::denoise(GridShape::D1(n), 1).unwrap();
        let b: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut eval = SpectralUpre::from_signal(&model, &b).unwrap();
        let sel = upre_select(&mut eval, 0.0, &UPREGrid::default()).unwrap();
        assert!(sel.boundary);
        assert_eq!(sel.lambda, 1e-4);
    }

    #[test]
    fn refinement_never_worse() {
        let n = 64;
        let model = SpectralModel::denoise(GridShape::D1(n), 2).unwrap();
        let b: Vec<f64> = (0..n)
            .map(|i| if (16..48).contains(&i) { 1.0 } else { 0.0 } + 0.1 * ((i * 13 % 7) as f64 - 3.0))
            .collect();
        let mut eval = SpectralUpre::from_signal(&model, &b).unwrap();
        let sel = upre_select(&mut eval, 0.01, &UPREGrid::default()).unwrap();
        assert!(sel.objective <= sel.coarse_objective + 1e-12);
        assert!(sel.refined.len() == 20);
    }
}
