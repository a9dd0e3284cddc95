//! `ℓ1` regularization: the evidence-based parameter mapping and an ADMM
//! solver for `min ‖Au − b‖² + λ₁‖Tu‖₁`.

use rustfft::num_complex::Complex64;

use crate::error::{check_len, invalid, Result};
use crate::linalg::{norm, norm_sq, sub};
use crate::operators::{FiniteDifference, LinearOperator};
use crate::spectral::SpectralModel;
use crate::tikhonov::{conjugate_gradient, CGConfig};

/// `λ₁ = 2^{3/2} σ² / η` (`η` is a standard deviation, not a variance).
pub fn map_to_l1(sigma_sq: f64, eta: f64) -> Result<f64> {
    if !(sigma_sq > 0.0 && eta > 0.0) || !sigma_sq.is_finite() || !eta.is_finite() {
        return Err(invalid(format!("need sigma^2 > 0 and eta > 0, got {sigma_sq}, {eta}")));
    }
    Ok(2f64.powf(1.5) * sigma_sq / eta)
}

/// Soft thresholding `sign(v) max(|v| − t, 0)`.
pub fn shrink(v: &[f64], t: f64) -> Vec<f64> {
    v.iter().map(|&x| shrink_scalar(x, t)).collect()
}

#[inline]
pub fn shrink_scalar(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

/// `‖Au − b‖² + λ₁‖Tu‖₁`
pub fn l1_objective(a: &dyn LinearOperator, t: &dyn LinearOperator, b: &[f64], lambda1: f64, u: &[f64]) -> Result<f64> {
    let au = a.apply(u)?;
    let tu = t.apply(u)?;
    Ok(norm_sq(&sub(&au, b)) + lambda1 * tu.iter().map(|v| v.abs()).sum::<f64>())
}

#[derive(Debug, Clone)]
pub struct ADMMConfig {
    /// Penalty parameter; `None` means `λ₁` (or 1 when `λ₁ = 0`).
    pub rho: Option<f64>,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_iter: usize,
    /// Inner solver settings for the CG backend.
    pub cg: CGConfig,
    pub warm_start: Option<Vec<f64>>,
}

impl Default for ADMMConfig {
    fn default() -> Self {
        ADMMConfig {
            rho: None,
            abs_tol: 1e-6,
            rel_tol: 1e-4,
            max_iter: 5000,
            cg: CGConfig {
                rel_tol: 1e-10,
                ..CGConfig::default()
            },
            warm_start: None,
        }
    }
}

impl ADMMConfig {
    fn rho_for(&self, lambda1: f64) -> Result<f64> {
        let rho = self.rho.unwrap_or(if lambda1 > 0.0 { lambda1 } else { 1.0 });
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(invalid(format!("rho must be positive, got {rho}")));
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) || self.max_iter == 0 {
            return Err(invalid("ADMM tolerances and max_iter must be positive"));
        }
        Ok(rho)
    }
}

#[derive(Debug, Clone)]
pub struct L1Result {
    pub u: Vec<f64>,
    /// Split variable `z ≈ Tu`.
    pub z: Vec<f64>,
    /// Scaled dual variable; `ρw/λ₁` is a subgradient of `‖·‖₁` at `z`.
    pub w: Vec<f64>,
    pub rho: f64,
    pub primal_residual: Vec<f64>,
    pub dual_residual: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

fn check_lambda1(lambda1: f64) -> Result<()> {
    if lambda1 >= 0.0 && lambda1.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!(
            "lambda1 must be finite and nonnegative, got {lambda1}"
        )))
    }
}

/// Shared ADMM loop; `u_update(z − w, u_prev)` returns the new `u`.
fn admm_loop<F>(
    t: &dyn LinearOperator,
    lambda1: f64,
    rho: f64,
    cfg: &ADMMConfig,
    u0: Vec<f64>,
    mut u_update: F,
) -> Result<L1Result>
where
    F: FnMut(&[f64], &[f64]) -> Result<Vec<f64>>,
{
    let n = t.cols();
    let p = t.rows();
    let mut u = u0;
    let mut z = t.apply(&u)?;
    let mut w = vec![0.0; p];
    let mut tu = vec![0.0; p];
    let mut ttw = vec![0.0; n];
    let mut dz = vec![0.0; p];
    let mut tdz = vec![0.0; n];
    let mut primal = Vec::new();
    let mut dual = Vec::new();
    let thresh = lambda1 / rho;
    let (sp, sn) = ((p as f64).sqrt(), (n as f64).sqrt());

    for it in 1..=cfg.max_iter {
        let zw: Vec<f64> = z.iter().zip(&w).map(|(a, b)| a - b).collect();
        u = u_update(&zw, &u)?;
        t.apply_into(&u, &mut tu);
        let mut r_sq = 0.0;
        for i in 0..p {
            let z_new = shrink_scalar(tu[i] + w[i], thresh);
            dz[i] = z_new - z[i];
            z[i] = z_new;
            let r = tu[i] - z_new;
            w[i] += r;
            r_sq += r * r;
        }
        t.adjoint_into(&dz, &mut tdz);
        let r_norm = r_sq.sqrt();
        let s_norm = rho * norm(&tdz);
        primal.push(r_norm);
        dual.push(s_norm);
        t.adjoint_into(&w, &mut ttw);
        let eps_pri = sp * cfg.abs_tol + cfg.rel_tol * norm(&tu).max(norm(&z));
        let eps_dual = sn * cfg.abs_tol + cfg.rel_tol * rho * norm(&ttw);
        if r_norm <= eps_pri && s_norm <= eps_dual {
            return Ok(L1Result {
                u,
                z,
                w,
                rho,
                primal_residual: primal,
                dual_residual: dual,
                iterations: it,
                converged: true,
            });
        }
    }
    Ok(L1Result {
        u,
        z,
        w,
        rho,
        primal_residual: primal,
        dual_residual: dual,
        iterations: cfg.max_iter,
        converged: false,
    })
}

/// ADMM with conjugate-gradient `u`-updates.
pub fn solve_l1_admm(
    a: &dyn LinearOperator,
    t: &dyn LinearOperator,
    b: &[f64],
    lambda1: f64,
    cfg: &ADMMConfig,
) -> Result<L1Result> {
    check_lambda1(lambda1)?;
    check_len(a.rows(), b.len())?;
    check_len(a.cols(), t.cols())?;
    let rho = cfg.rho_for(lambda1)?;
    cfg.cg.validate()?;
    let n = a.cols();
    let u0 = match &cfg.warm_start {
        Some(w) => {
            check_len(n, w.len())?;
            w.clone()
        }
        None => vec![0.0; n],
    };
    let atb2: Vec<f64> = a.adjoint(b)?.into_iter().map(|v| 2.0 * v).collect();
    let mut s1 = vec![0.0; n];
    let mut s2 = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    let cap = cfg.cg.iteration_cap(n);
    admm_loop(t, lambda1, rho, cfg, u0, |zw, u_prev| {
        t.adjoint_into(zw, &mut rhs);
        for (r, c) in rhs.iter_mut().zip(&atb2) {
            *r = c + rho * *r;
        }
        let res = conjugate_gradient(
            |x, out| {
                a.normal_into(x, &mut s1);
                t.normal_into(x, &mut s2);
                for i in 0..out.len() {
                    out[i] = 2.0 * s1[i] + rho * s2[i];
                }
            },
            &rhs,
            Some(u_prev),
            cfg.cg.rel_tol,
            cap,
            |_| {},
        );
        Ok(res.u)
    })
}

/// ADMM with exact DFT-domain `u`-updates
/// `û = (2 conj(γ_A) b̂ + ρ F Tᵀ(z − w)) / (2f + ρt)` for a model carrying a
/// finite-difference regularizer. `b_hat` is as for
/// [`crate::me_select::SpectralSelector::new`].
pub fn solve_l1_admm_spectral(
    model: &SpectralModel,
    b_hat: &[Complex64],
    lambda1: f64,
    cfg: &ADMMConfig,
) -> Result<L1Result> {
    check_lambda1(lambda1)?;
    check_len(model.n_total(), b_hat.len())?;
    let order = model
        .reg_order()
        .ok_or_else(|| invalid("spectral ADMM needs a finite-difference regularizer"))?;
    let shape = model.shape();
    let t = FiniteDifference::new(order, shape)?;
    let rho = cfg.rho_for(lambda1)?;
    let n = shape.len();
    let dft = model.dft();
    let u0 = match &cfg.warm_start {
        Some(w) => {
            check_len(n, w.len())?;
            w.clone()
        }
        None => vec![0.0; n],
    };
    let data: Vec<Complex64> = b_hat
        .iter()
        .zip(model.forward_eigs())
        .map(|(b, g)| 2.0 * g.conj() * b)
        .collect();
    let denom: Vec<f64> = model
        .forward_eigs_sq()
        .iter()
        .zip(model.reg_eigs_sq())
        .map(|(f, s)| 2.0 * f + rho * s)
        .collect();
    let mut back = vec![0.0; n];
    admm_loop(&t, lambda1, rho, cfg, u0, |zw, _| {
        t.adjoint_into(zw, &mut back);
        let mut hat = dft.forward(&back)?;
        for j in 0..n {
            hat[j] = if denom[j] > 0.0 {
                (data[j] + rho * hat[j]) / denom[j]
            } else {
                Complex64::new(0.0, 0.0)
            };
        }
        dft.inverse_real(&hat)
    })
}
