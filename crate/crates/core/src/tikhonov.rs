//! Tikhonov solves `min ‖Au − b‖² + λ‖Tu‖²` by conjugate gradients on the
//! normal equations `(AᵀA + λTᵀT) u = Aᵀb`. `H` is never formed.

use crate::error::{check_len, invalid, Result};
use crate::linalg::{axpy, dot, norm};
use crate::operators::LinearOperator;

#[derive(Debug, Clone)]
pub struct CGConfig {
    /// Stop once `‖Hu − Aᵀb‖ ≤ rel_tol · ‖Aᵀb‖`.
    pub rel_tol: f64,
    /// `None` means `2n`.
    pub max_iter: Option<usize>,
    pub warm_start: Option<Vec<f64>>,
}

impl Default for CGConfig {
    fn default() -> Self {
        CGConfig {
            rel_tol: 1e-8,
            max_iter: None,
            warm_start: None,
        }
    }
}

impl CGConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol < 1.0) {
            return Err(invalid(format!("rel_tol must lie in (0, 1), got {}", self.rel_tol)));
        }
        if self.max_iter == Some(0) {
            return Err(invalid("max_iter must be at least 1"));
        }
        Ok(())
    }

    pub fn iteration_cap(&self, n: usize) -> usize {
        self.max_iter.unwrap_or(2 * n.max(1))
    }
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub u: Vec<f64>,
    pub iterations: usize,
    /// Final residual norm `‖Hu − rhs‖` (recursively updated).
    pub final_residual: f64,
    pub converged: bool,
}

/// Conjugate gradients for `Hx = rhs` with `H` symmetric positive
/// (semi)definite, given as `apply(x, out)` writing `Hx` into `out`.
///
/// `on_iterate` sees each iterate, starting with the initial one.
pub fn conjugate_gradient<F, G>(
    mut apply: F,
    rhs: &[f64],
    x0: Option<&[f64]>,
    rel_tol: f64,
    max_iter: usize,
    mut on_iterate: G,
) -> SolveResult
where
    F: FnMut(&[f64], &mut [f64]),
    G: FnMut(&[f64]),
{
    let n = rhs.len();
    let rhs_norm = norm(rhs);
    let mut x = match x0 {
        Some(x0) => x0.to_vec(),
        None => vec![0.0; n],
    };
    on_iterate(&x);
    if rhs_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return SolveResult {
            u: x,
            iterations: 0,
            final_residual: 0.0,
            converged: true,
        };
    }
    let target = rel_tol * rhs_norm;
    let mut hp = vec![0.0; n];
    let mut r = rhs.to_vec();
    if x0.is_some() {
        apply(&x, &mut hp);
        axpy(-1.0, &hp, &mut r);
    }
    let mut rr = dot(&r, &r);
    if rr.sqrt() <= target {
        return SolveResult {
            u: x,
            iterations: 0,
            final_residual: rr.sqrt(),
            converged: true,
        };
    }
    let mut p = r.clone();
    for it in 1..=max_iter {
        apply(&p, &mut hp);
        let php = dot(&p, &hp);
        if !(php > 0.0) {
            return SolveResult {
                u: x,
                iterations: it - 1,
                final_residual: rr.sqrt(),
                converged: false,
            };
        }
        let alpha = rr / php;
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &hp, &mut r);
        on_iterate(&x);
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= target {
            return SolveResult {
                u: x,
                iterations: it,
                final_residual: rr_new.sqrt(),
                converged: true,
            };
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for (pi, ri) in p.iter_mut().zip(&r) {
            *pi = ri + beta * *pi;
        }
    }
    SolveResult {
        u: x,
        iterations: max_iter,
        final_residual: rr.sqrt(),
        converged: false,
    }
}

/// `H = AᵀA + λTᵀT` as a matrix-free operator.
pub struct NormalOperator<'a> {
    a: &'a dyn LinearOperator,
    t: &'a dyn LinearOperator,
    lambda: f64,
    scratch: Vec<f64>,
}

impl<'a> NormalOperator<'a> {
    pub fn new(a: &'a dyn LinearOperator, t: &'a dyn LinearOperator, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("lambda must be finite and nonnegative, got {lambda}")));
        }
        check_len(a.cols(), t.cols())?;
        Ok(NormalOperator {
            a,
            t,
            lambda,
            scratch: vec![0.0; a.cols()],
        })
    }

    pub fn apply(&mut self, x: &[f64], out: &mut [f64]) {
        self.a.normal_into(x, out);
        if self.lambda != 0.0 {
            self.t.normal_into(x, &mut self.scratch);
            axpy(self.lambda, &self.scratch, out);
        }
    }
}

/// Solve `Hu = rhs` for an arbitrary right-hand side.
pub fn solve_normal(
    a: &dyn LinearOperator,
    t: &dyn LinearOperator,
    rhs: &[f64],
    lambda: f64,
    cfg: &CGConfig,
) -> Result<SolveResult> {
    cfg.validate()?;
    check_len(a.cols(), rhs.len())?;
    let mut h = NormalOperator::new(a, t, lambda)?;
    if let Some(w) = &cfg.warm_start {
        check_len(rhs.len(), w.len())?;
    }
    Ok(conjugate_gradient(
        |x, out| h.apply(x, out),
        rhs,
        cfg.warm_start.as_deref(),
        cfg.rel_tol,
        cfg.iteration_cap(rhs.len()),
        |_| {},
    ))
}

/// Tikhonov solution `u_λ = H⁻¹Aᵀb`.
pub fn solve_cg(
    a: &dyn LinearOperator,
    t: &dyn LinearOperator,
    b: &[f64],
    lambda: f64,
    cfg: &CGConfig,
) -> Result<SolveResult> {
    let rhs = a.adjoint(b)?;
    solve_normal(a, t, &rhs, lambda, cfg)
}

/// As [`solve_cg`], also returning the quadratic energy
/// `½uᵀHu − uᵀAᵀb` at every iterate.
pub fn solve_cg_logged(
    a: &dyn LinearOperator,
    t: &dyn LinearOperator,
    b: &[f64],
    lambda: f64,
    cfg: &CGConfig,
) -> Result<(SolveResult, Vec<f64>)> {
    cfg.validate()?;
    let rhs = a.adjoint(b)?;
    let mut h = NormalOperator::new(a, t, lambda)?;
    let mut h_log = NormalOperator::new(a, t, lambda)?;
    let mut hx = vec![0.0; rhs.len()];
    let mut energies = Vec::new();
    let res = conjugate_gradient(
        |x, out| h.apply(x, out),
        &rhs,
        cfg.warm_start.as_deref(),
        cfg.rel_tol,
        cfg.iteration_cap(rhs.len()),
        |x| {
            h_log.apply(x, &mut hx);
            energies.push(0.5 * dot(x, &hx) - dot(x, &rhs));
        },
    );
    Ok((res, energies))
}
