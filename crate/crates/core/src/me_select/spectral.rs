//! Exact O(n)-per-iteration route for problems diagonalized by the DFT.

use rustfft::num_complex::Complex64;

use crate::error::{check_len, invalid, Result};
use crate::operators::FourierMask;
use crate::spectral::{spectral_norms, spectral_solve, spectral_traces, Dft, ProblemKind, SpectralModel};

use super::{me_step, relative_change, Degeneracy, MEConfig, MEState, METrajectory, StepInput, StopReason};

/// Holds the model and the transformed data `b̂`, computed once.
#[derive(Debug, Clone)]
pub struct SpectralSelector<'a> {
    model: &'a SpectralModel,
    b_hat: Vec<Complex64>,
    dft: Dft,
}

#[derive(Debug, Clone)]
pub struct SpectralResult {
    pub trajectory: METrajectory,
    /// DFT of the reconstruction at the final `λ`.
    pub u_hat: Vec<Complex64>,
    pub lambda: f64,
    dft: Dft,
}

impl SpectralResult {
    /// The reconstruction (one inverse DFT).
    pub fn solution(&self) -> Result<Vec<f64>> {
        self.dft.inverse_real(&self.u_hat)
    }
}

impl<'a> SpectralSelector<'a> {
    /// `b_hat` is the unitary DFT of the data, zero off the mask for
    /// Fourier-mask models.
    pub fn new(model: &'a SpectralModel, b_hat: Vec<Complex64>) -> Result<Self> {
        check_len(model.n_total(), b_hat.len())?;
        Ok(SpectralSelector {
            model,
            b_hat,
            dft: model.dft(),
        })
    }

    /// Real-space data for denoising and deconvolution models.
    pub fn from_signal(model: &'a SpectralModel, b: &[f64]) -> Result<Self> {
        if model.kind() == ProblemKind::FourierMask {
            return Err(invalid("Fourier-mask data must be given as samples"));
        }
        let dft = model.dft();
        let b_hat = dft.forward(b)?;
        Ok(SpectralSelector { model, b_hat, dft })
    }

    /// Complex DFT samples on the mask's index set, in index order.
    pub fn from_fourier_samples(model: &'a SpectralModel, mask: &FourierMask, samples: &[Complex64]) -> Result<Self> {
        check_len(model.n_total(), mask.shape().len())?;
        check_len(model.m(), mask.m())?;
        let b_hat = mask.embed(samples)?;
        Self::new(model, b_hat)
    }

    pub fn model(&self) -> &SpectralModel {
        self.model
    }

    pub fn b_hat(&self) -> &[Complex64] {
        &self.b_hat
    }

    /// One evidence update starting from `λ`.
    pub fn step(&self, lambda: f64, k: usize) -> Result<std::result::Result<MEState, (Degeneracy, Option<MEState>)>> {
        let u_hat = spectral_solve(self.model, &self.b_hat, lambda)?;
        self.step_with(&u_hat, lambda, k)
    }

    fn step_with(
        &self,
        u_hat: &[Complex64],
        lambda: f64,
        k: usize,
    ) -> Result<std::result::Result<MEState, (Degeneracy, Option<MEState>)>> {
        let tr = spectral_traces(self.model, lambda)?;
        let norms = spectral_norms(self.model, u_hat, &self.b_hat)?;
        let input = StepInput {
            misfit: norms.data_misfit,
            reg_norm: norms.reg_norm,
            trace_a: tr.trace_a,
            trace_t: tr.trace_t,
            lambda,
            m: self.model.m(),
            n: self.model.n_total(),
        };
        Ok(me_step(&input, k))
    }

    pub fn iterate(&self, cfg: &MEConfig) -> Result<SpectralResult> {
        cfg.validate()?;
        let mut lambda = cfg.lambda0;
        let mut u_hat = spectral_solve(self.model, &self.b_hat, lambda)?;
        let mut traj = METrajectory::start(lambda);
        let mut reason = StopReason::MaxIter;
        let mut degeneracy = None;
        for k in 1..=cfg.max_iter {
            let state = match self.step_with(&u_hat, lambda, k)? {
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
            let next = spectral_solve(self.model, &self.b_hat, state.lambda)?;
            let (mut diff, mut old) = (0.0, 0.0);
            for (x, y) in next.iter().zip(&u_hat) {
                diff += (x - y).norm_sqr();
                old += y.norm_sqr();
            }
            let change = relative_change(diff, old);
            traj.push(state, change);
            u_hat = next;
            lambda = state.lambda;
            if change < cfg.tol {
                reason = StopReason::Tolerance;
                break;
            }
        }
        traj.stop(reason, degeneracy);
        Ok(SpectralResult {
            trajectory: traj,
            u_hat,
            lambda,
            dft: self.dft.clone(),
        })
    }
}

/// Spectral iteration on real-space data `b`.
pub fn me_iterate_spectral(model: &SpectralModel, b: &[f64], cfg: &MEConfig) -> Result<SpectralResult> {
    SpectralSelector::from_signal(model, b)?.iterate(cfg)
}
