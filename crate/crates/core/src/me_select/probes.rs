//! Orthogonalized Hutchinson estimates of `trace(H⁻¹AᵀA)` and `trace(H⁻¹TᵀT)`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{check_len, invalid, Result};
use crate::linalg::{axpy, dot, norm};
use crate::operators::LinearOperator;
use crate::tikhonov::{conjugate_gradient, CGConfig, NormalOperator};

/// `J` Gaussian probe vectors, orthonormalized and rescaled to norm `√n`.
#[derive(Debug, Clone)]
pub struct ProbeSet {
    n: usize,
    seed: u64,
    probes: Vec<Vec<f64>>,
}

impl ProbeSet {
    pub fn gaussian(n: usize, count: usize, seed: u64) -> Result<Self> {
        if count == 0 || count > n {
            return Err(invalid(format!("need 1 <= J <= n, got J={count}, n={n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut probes: Vec<Vec<f64>> = (0..count)
            .map(|_| (0..n).map(|_| StandardNormal.sample(&mut rng)).collect())
            .collect();
        let scale = (n as f64).sqrt();
        for j in 0..count {
            // two passes of modified Gram-Schmidt
            for _ in 0..2 {
                for i in 0..j {
                    let (done, rest) = probes.split_at_mut(j);
                    let c = dot(&done[i], &rest[0]) / (n as f64);
                    axpy(-c, &done[i], &mut rest[0]);
                }
            }
            let nrm = norm(&probes[j]);
            if nrm == 0.0 {
                return Err(invalid("probe orthogonalization broke down"));
            }
            probes[j].iter_mut().for_each(|v| *v *= scale / nrm);
        }
        Ok(ProbeSet { n, seed, probes })
    }

    pub fn n(&self) -> usize {
        self.n
    }
    pub fn len(&self) -> usize {
        self.probes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.probes.is_empty()
    }
    pub fn seed(&self) -> u64 {
        self.seed
    }
    pub fn probes(&self) -> &[Vec<f64>] {
        &self.probes
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceEstimate {
    /// `𝔸 = (1/J) Σ w_jᵀ AᵀA x_j`
    pub raw_a: f64,
    /// `𝕋 = (1/J) Σ w_jᵀ TᵀT x_j`
    pub raw_t: f64,
    pub converged: bool,
    pub cg_iterations: usize,
}

/// Caches `AᵀA x_j`, `TᵀT x_j` and the previous `H⁻¹x_j` (as warm starts)
/// across evaluations at different `λ`.
pub struct TraceEstimator<'a> {
    a: &'a dyn LinearOperator,
    t: &'a dyn LinearOperator,
    probes: &'a ProbeSet,
    z: Vec<Vec<f64>>,
    y: Vec<Vec<f64>>,
    w: Vec<Option<Vec<f64>>>,
}

impl<'a> TraceEstimator<'a> {
    pub fn new(a: &'a dyn LinearOperator, t: &'a dyn LinearOperator, probes: &'a ProbeSet) -> Result<Self> {
        check_len(a.cols(), probes.n())?;
        check_len(t.cols(), probes.n())?;
        let z = probes.probes().par_iter().map(|x| a.normal(x)).collect::<Result<_>>()?;
        let y = probes.probes().par_iter().map(|x| t.normal(x)).collect::<Result<_>>()?;
        Ok(TraceEstimator {
            a,
            t,
            probes,
            z,
            y,
            w: vec![None; probes.len()],
        })
    }

    pub fn estimate(&mut self, lambda: f64, cfg: &CGConfig) -> Result<TraceEstimate> {
        cfg.validate()?;
        NormalOperator::new(self.a, self.t, lambda)?;
        let (a, t) = (self.a, self.t);
        let cap = cfg.iteration_cap(self.probes.n());
        let parts: Vec<(f64, f64, bool, usize)> = self
            .w
            .par_iter_mut()
            .zip(self.probes.probes().par_iter())
            .zip(self.z.par_iter().zip(self.y.par_iter()))
            .map(|((w, x), (z, y))| {
                let mut h = NormalOperator::new(a, t, lambda).expect("validated");
                let res = conjugate_gradient(|v, out| h.apply(v, out), x, w.as_deref(), cfg.rel_tol, cap, |_| {});
                let out = (dot(&res.u, z), dot(&res.u, y), res.converged, res.iterations);
                *w = Some(res.u);
                out
            })
            .collect();
        let j = parts.len() as f64;
        Ok(TraceEstimate {
            raw_a: parts.iter().map(|p| p.0).sum::<f64>() / j,
            raw_t: parts.iter().map(|p| p.1).sum::<f64>() / j,
            converged: parts.iter().all(|p| p.2),
            cg_iterations: parts.iter().map(|p| p.3).sum(),
        })
    }
}

/// One-off raw trace estimate at `λ`.
pub fn hutchinson_traces(
    a: &dyn LinearOperator,
    t: &dyn LinearOperator,
    lambda: f64,
    probes: &ProbeSet,
    cfg: &CGConfig,
) -> Result<TraceEstimate> {
    TraceEstimator::new(a, t, probes)?.estimate(lambda, cfg)
}
