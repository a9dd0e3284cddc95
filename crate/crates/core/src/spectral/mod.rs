//! Exact DFT-domain formulas for denoising, deconvolution and Fourier-mask
//! sampling with wraparound finite-difference regularizers.
//!
//! When `A` and `T` are both diagonalized by the unitary DFT, the Tikhonov
//! solution, the two traces `trace(H⁻¹AᵀA)` and `trace(H⁻¹TᵀT)`, and the norms
//! `‖Au − b‖²`, `‖Tu‖²` all reduce to O(n) diagonal arithmetic on
//! `f_j = |γ_j(A)|²` and `t_j = |γ_j(T)|²`.

mod dft;

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;

pub use dft::Dft;

use crate::error::{check_len, invalid, Result};
use crate::operators::{CirculantSpec, FourierMask, GridShape};

/// `γ_j = (e^{-i2πj/n} - 1)^r` and `|γ_j|² = 4^r sin^{2r}(πj/n)`.
///
/// `γ_j` is the DFT of the first row of `T_r`; the diagonal of `T_r` itself
/// in the forward-DFT basis is its complex conjugate. Only `|γ_j|²` enters
/// the selection formulas.
pub fn fd_eigenvalues(order: u32, n: usize) -> Result<(Vec<Complex64>, Vec<f64>)> {
    if order == 0 || n <= 2 * order as usize {
        return Err(invalid(format!("need n > 2r, got n={n}, r={order}")));
    }
    let gamma = (0..n)
        .map(|j| {
            let z = Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64) - 1.0;
            z.powu(order)
        })
        .collect();
    Ok((gamma, fd_spectrum_sq_1d(order, n)))
}

fn fd_spectrum_sq_1d(order: u32, n: usize) -> Vec<f64> {
    let scale = 4f64.powi(order as i32);
    (0..n)
        .map(|j| {
            if j == 0 {
                0.0
            } else {
                scale * (PI * j as f64 / n as f64).sin().powi(2 * order as i32)
            }
        })
        .collect()
}

/// Eigenvalues of `TᵀT` for the finite-difference regularizer on `shape`,
/// flattened row-major. In 2D, `t_{jk} = 4^r (sin^{2r}(πj/rows) + sin^{2r}(πk/cols))`.
pub fn fd_spectrum_sq(order: u32, shape: GridShape) -> Vec<f64> {
    match shape {
        GridShape::D1(n) => fd_spectrum_sq_1d(order, n),
        GridShape::D2 { rows, cols } => {
            let sr = fd_spectrum_sq_1d(order, rows);
            let sc = fd_spectrum_sq_1d(order, cols);
            let mut out = Vec::with_capacity(rows * cols);
            for a in &sr {
                for b in &sc {
                    out.push(a + b);
                }
            }
            out
        }
    }
}

/// Eigenvalues `γ_j(C) = Σ_k c_k e^{-i2πjk/n}` of the circulant with the
/// given first column.
pub fn circulant_eigenvalues(first_column: &[f64]) -> Result<Vec<Complex64>> {
    if first_column.is_empty() {
        return Err(invalid("empty first column"));
    }
    Dft::new(GridShape::D1(first_column.len())).unnormalized_forward(first_column)
}

/// `(1/n) Σ_j |γ_j(T_r)|² = 4^r (2r-1)!! / (2r)!!`, valid for `n > 2r`.
pub fn mean_fd_eigenvalue(order: u32) -> f64 {
    let mut v = 4f64.powi(order as i32);
    for k in 1..=order {
        v *= (2 * k - 1) as f64 / (2 * k) as f64;
    }
    v
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemKind {
    Denoise,
    Deconvolve,
    FourierMask,
}

/// Diagonalized forward and regularization operators.
#[derive(Debug, Clone)]
pub struct SpectralModel {
    shape: GridShape,
    kind: ProblemKind,
    forward_eigs: Vec<Complex64>,
    forward_eigs_sq: Vec<f64>,
    reg_eigs_sq: Vec<f64>,
    m: usize,
    reg_order: Option<u32>,
}

impl SpectralModel {
    /// `A = I` with the order-`r` finite-difference regularizer.
    pub fn denoise(shape: GridShape, order: u32) -> Result<Self> {
        let reg = fd_checked(order, shape)?;
        let n = shape.len();
        Ok(SpectralModel {
            shape,
            kind: ProblemKind::Denoise,
            forward_eigs: vec![Complex64::new(1.0, 0.0); n],
            forward_eigs_sq: vec![1.0; n],
            reg_eigs_sq: reg,
            m: n,
            reg_order: Some(order),
        })
    }

    /// Circulant blur `C` with the order-`r` finite-difference regularizer.
    pub fn deconvolve(psf: &CirculantSpec, order: u32) -> Result<Self> {
        let shape = psf.shape;
        let reg = fd_checked(order, shape)?;
        let eigs = psf.eigenvalues();
        let sq = eigs.iter().map(|g| g.norm_sqr()).collect();
        Ok(SpectralModel {
            shape,
            kind: ProblemKind::Deconvolve,
            forward_eigs: eigs,
            forward_eigs_sq: sq,
            reg_eigs_sq: reg,
            m: shape.len(),
            reg_order: Some(order),
        })
    }

    /// `A = P F`: the DFT coefficients in `mask` are observed.
    pub fn fourier_mask(mask: &FourierMask, order: u32) -> Result<Self> {
        let shape = mask.shape();
        let reg = fd_checked(order, shape)?;
        let ind = mask.indicator();
        Ok(SpectralModel {
            shape,
            kind: ProblemKind::FourierMask,
            forward_eigs: ind.iter().map(|&d| Complex64::new(d, 0.0)).collect(),
            forward_eigs_sq: ind,
            reg_eigs_sq: reg,
            m: mask.m(),
            reg_order: Some(order),
        })
    }

    /// Arbitrary diagonal model, e.g. a denoising problem with `T = I`.
    pub fn from_parts(
        shape: GridShape,
        kind: ProblemKind,
        forward_eigs: Vec<Complex64>,
        reg_eigs_sq: Vec<f64>,
        m: usize,
    ) -> Result<Self> {
        let n = shape.len();
        check_len(n, forward_eigs.len())?;
        check_len(n, reg_eigs_sq.len())?;
        if reg_eigs_sq.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
            return Err(invalid("regularizer eigenvalues must be finite and nonnegative"));
        }
        if m == 0 || m > n && kind != ProblemKind::Deconvolve {
            return Err(invalid(format!("data length {m} invalid for {n} unknowns")));
        }
        let sq = forward_eigs.iter().map(|g| g.norm_sqr()).collect();
        Ok(SpectralModel {
            shape,
            kind,
            forward_eigs,
            forward_eigs_sq: sq,
            reg_eigs_sq,
            m,
            reg_order: None,
        })
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }
    pub fn kind(&self) -> ProblemKind {
        self.kind
    }
    pub fn n_total(&self) -> usize {
        self.shape.len()
    }
    /// Number of (complex, for masks) data samples.
    pub fn m(&self) -> usize {
        self.m
    }
    pub fn forward_eigs(&self) -> &[Complex64] {
        &self.forward_eigs
    }
    pub fn forward_eigs_sq(&self) -> &[f64] {
        &self.forward_eigs_sq
    }
    pub fn reg_eigs_sq(&self) -> &[f64] {
        &self.reg_eigs_sq
    }
    pub fn reg_order(&self) -> Option<u32> {
        self.reg_order
    }

    /// Count of modes with `f_j = t_j = 0`, which neither data nor prior
    /// constrain.
    pub fn unconstrained_modes(&self) -> usize {
        self.forward_eigs_sq
            .iter()
            .zip(&self.reg_eigs_sq)
            .filter(|(&f, &t)| f == 0.0 && t == 0.0)
            .count()
    }

    pub fn dft(&self) -> Dft {
        Dft::new(self.shape)
    }
}

fn fd_checked(order: u32, shape: GridShape) -> Result<Vec<f64>> {
    let (rows, cols) = shape.dims();
    let need = 2 * order as usize;
    let ok = order >= 1
        && match shape {
            GridShape::D1(n) => n > need,
            GridShape::D2 { .. } => rows > need && cols > need,
        };
    if !ok {
        return Err(invalid(format!(
            "order {order} regularizer needs more than {need} points per axis"
        )));
    }
    Ok(fd_spectrum_sq(order, shape))
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("lambda must be finite and nonnegative, got {lambda}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralTraces {
    /// `trace(H⁻¹AᵀA)`
    pub trace_a: f64,
    /// `trace(H⁻¹TᵀT)`
    pub trace_t: f64,
}

/// Exact traces `Σ f_j/(f_j + λt_j)` and `Σ t_j/(f_j + λt_j)`.
///
/// Modes with `f_j = t_j = 0` contribute nothing to either sum (pseudo-inverse
/// convention), so `trace_a + λ trace_t = n_total - unconstrained_modes()`.
/// At `λ = 0` a mode with `f_j = 0 < t_j` is likewise dropped from `trace_t`.
pub fn spectral_traces(model: &SpectralModel, lambda: f64) -> Result<SpectralTraces> {
    check_lambda(lambda)?;
    let mut trace_a = 0.0;
    let mut trace_t = 0.0;
    for (&f, &t) in model.forward_eigs_sq.iter().zip(&model.reg_eigs_sq) {
        let d = f + lambda * t;
        if d > 0.0 {
            trace_a += f / d;
            trace_t += t / d;
        }
    }
    Ok(SpectralTraces { trace_a, trace_t })
}

/// Wiener-form Tikhonov solution in the DFT domain:
/// `û_j = conj(γ_j(A)) b̂_j / (f_j + λt_j)`, zero where the denominator vanishes.
///
/// For Fourier masks `b_hat` is the embedded sample vector `Pᵀb`.
pub fn spectral_solve(model: &SpectralModel, b_hat: &[Complex64], lambda: f64) -> Result<Vec<Complex64>> {
    check_lambda(lambda)?;
    check_len(model.n_total(), b_hat.len())?;
    Ok(b_hat
        .iter()
        .zip(&model.forward_eigs)
        .zip(model.forward_eigs_sq.iter().zip(&model.reg_eigs_sq))
        .map(|((&b, &g), (&f, &t))| {
            let d = f + lambda * t;
            if d > 0.0 {
                g.conj() * b / d
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralNorms {
    /// `‖Au − b‖²`
    pub data_misfit: f64,
    /// `‖Tu‖²`
    pub reg_norm: f64,
}

/// Both norms computed in the DFT domain via Parseval.
pub fn spectral_norms(model: &SpectralModel, u_hat: &[Complex64], b_hat: &[Complex64]) -> Result<SpectralNorms> {
    check_len(model.n_total(), u_hat.len())?;
    check_len(model.n_total(), b_hat.len())?;
    let mut data_misfit = 0.0;
    let mut reg_norm = 0.0;
    for j in 0..u_hat.len() {
        data_misfit += (model.forward_eigs[j] * u_hat[j] - b_hat[j]).norm_sqr();
        reg_norm += model.reg_eigs_sq[j] * u_hat[j].norm_sqr();
    }
    Ok(SpectralNorms { data_misfit, reg_norm })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::make_gaussian_psf;

    #[test]
    fn first_order_eigenvalues_n4() {
        let (_, sq) = fd_eigenvalues(1, 4).unwrap();
        let expect = [0.0, 2.0, 4.0, 2.0];
        for (a, b) in sq.iter().zip(expect) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn complex_and_squared_forms_agree() {
        for r in 1..=3 {
            let (g, sq) = fd_eigenvalues(r, 19).unwrap();
            for (a, b) in g.iter().zip(&sq) {
                assert!((a.norm_sqr() - b).abs() < 1e-12);
            }
        }
        assert!(fd_eigenvalues(2, 4).is_err());
    }

    #[test]
    fn mean_first_order_eigenvalue_is_two() {
        for n in [3usize, 8, 100, 257] {
            let (_, sq) = fd_eigenvalues(1, n).unwrap();
            assert!((sq.iter().sum::<f64>() / n as f64 - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn circulant_eigenvalue_examples() {
        let mut delta = vec![0.0; 7];
        delta[0] = 1.0;
        for g in circulant_eigenvalues(&delta).unwrap() {
            assert!((g - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        }
        // first column of T_1ᵀ is the first row of T_1
        let n = 12;
        let mut row = vec![0.0; n];
        row[0] = -1.0;
        row[1] = 1.0;
        let (g, _) = fd_eigenvalues(1, n).unwrap();
        for (a, b) in circulant_eigenvalues(&row).unwrap().iter().zip(&g) {
            assert!((a - b).norm() < 1e-12);
        }
        let psf = make_gaussian_psf(64, 3.0).unwrap();
        let eigs = circulant_eigenvalues(&psf.first_column).unwrap();
        assert!((eigs[0].re - 1.0).abs() < 1e-12);
        for e in &eigs {
            assert!(e.im.abs() < 1e-12 && e.re > -1e-15 && e.re <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn denoise_traces_at_zero_lambda() {
        let m = SpectralModel::denoise(GridShape::D1(10), 1).unwrap();
        let tr = spectral_traces(&m, 0.0).unwrap();
        assert!((tr.trace_a - 10.0).abs() < 1e-12);
        let sum_t: f64 = m.reg_eigs_sq().iter().sum();
        assert!((tr.trace_t - sum_t).abs() < 1e-12);
    }

    #[test]
    fn solve_and_norms_trivial_cases() {
        let m = SpectralModel::denoise(GridShape::D1(8), 1).unwrap();
        let b: Vec<Complex64> = (0..8).map(|j| Complex64::new(j as f64, 1.0 - j as f64)).collect();
        let u = spectral_solve(&m, &b, 0.0).unwrap();
        assert_eq!(u, b);
        let norms = spectral_norms(&m, &u, &b).unwrap();
        assert_eq!(norms.data_misfit, 0.0);
        let zero = vec![Complex64::new(0.0, 0.0); 8];
        let nz = spectral_norms(&m, &zero, &b).unwrap();
        let bb: f64 = b.iter().map(|c| c.norm_sqr()).sum();
        assert!((nz.data_misfit - bb).abs() < 1e-12);
        assert_eq!(nz.reg_norm, 0.0);
    }

    #[test]
    fn masked_dc_is_unconstrained() {
        let mask = FourierMask::new(GridShape::D1(16), vec![1, 2, 5, 9]).unwrap();
        let m = SpectralModel::fourier_mask(&mask, 1).unwrap();
        assert_eq!(m.unconstrained_modes(), 1);
        let tr = spectral_traces(&m, 0.5).unwrap();
        assert!((tr.trace_a + 0.5 * tr.trace_t - 15.0).abs() < 1e-12);
        let b = vec![Complex64::new(1.0, 0.0); 16];
        assert_eq!(spectral_solve(&m, &b, 0.5).unwrap()[0], Complex64::new(0.0, 0.0));
    }

    #[test]
    fn negative_lambda_rejected() {
        let m = SpectralModel::denoise(GridShape::D1(8), 1).unwrap();
        assert!(spectral_traces(&m, -1.0).is_err());
        assert!(spectral_traces(&m, f64::NAN).is_err());
    }

    #[test]
    fn mean_eigenvalue_closed_form() {
        assert_eq!(mean_fd_eigenvalue(1), 2.0);
        assert_eq!(mean_fd_eigenvalue(2), 6.0);
        assert_eq!(mean_fd_eigenvalue(3), 20.0);
    }
}
