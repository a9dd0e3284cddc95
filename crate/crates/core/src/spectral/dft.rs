//! Unitary discrete Fourier transform in one and two dimensions.
//!
//! `forward` and `inverse` both scale by `1/sqrt(n_total)`, so Parseval holds
//! exactly and a circulant operator with eigenvalues `γ` acts as
//! `F⁻¹ diag(γ) F`. Two-dimensional data is stored row-major.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{check_len, Result};
use crate::operators::GridShape;

#[derive(Clone)]
pub struct Dft {
    shape: GridShape,
    // Plans along the contiguous axis (cols) and the strided axis (rows).
    fwd_inner: Arc<dyn Fft<f64>>,
    inv_inner: Arc<dyn Fft<f64>>,
    fwd_outer: Option<Arc<dyn Fft<f64>>>,
    inv_outer: Option<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for Dft {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Dft").field("shape", &self.shape).finish()
    }
}

impl Dft {
    pub fn new(shape: GridShape) -> Self {
        let mut planner = FftPlanner::<f64>::new();
        let (rows, cols) = shape.dims();
        let fwd_inner = planner.plan_fft_forward(cols);
        let inv_inner = planner.plan_fft_inverse(cols);
        let (fwd_outer, inv_outer) = match shape {
            GridShape::D1(_) => (None, None),
            GridShape::D2 { .. } => (
                Some(planner.plan_fft_forward(rows)),
                Some(planner.plan_fft_inverse(rows)),
            ),
        };
        Dft {
            shape,
            fwd_inner,
            inv_inner,
            fwd_outer,
            inv_outer,
        }
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn len(&self) -> usize {
        self.shape.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Unitary forward transform of real data.
    pub fn forward(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        check_len(self.len(), x.len())?;
        let mut data: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward_in_place(&mut data)?;
        Ok(data)
    }

    pub fn forward_in_place(&self, data: &mut [Complex64]) -> Result<()> {
        check_len(self.len(), data.len())?;
        self.raw(data, true);
        self.scale(data);
        Ok(())
    }

    pub fn inverse_in_place(&self, data: &mut [Complex64]) -> Result<()> {
        check_len(self.len(), data.len())?;
        self.raw(data, false);
        self.scale(data);
        Ok(())
    }

    /// Unitary inverse transform, keeping the real part.
    pub fn inverse_real(&self, data: &[Complex64]) -> Result<Vec<f64>> {
        let mut buf = data.to_vec();
        self.inverse_in_place(&mut buf)?;
        Ok(buf.into_iter().map(|c| c.re).collect())
    }

    /// Unnormalized forward transform `Σ_k x_k e^{-i2πjk/n}` (the eigenvalue
    /// convention for circulant operators).
    pub fn unnormalized_forward(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        check_len(self.len(), x.len())?;
        let mut data: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.raw(&mut data, true);
        Ok(data)
    }

    fn scale(&self, data: &mut [Complex64]) {
        let s = 1.0 / (self.len() as f64).sqrt();
        for v in data.iter_mut() {
            *v *= s;
        }
    }

    fn raw(&self, data: &mut [Complex64], forward: bool) {
        let (rows, cols) = self.shape.dims();
        let inner = if forward { &self.fwd_inner } else { &self.inv_inner };
        let mut scratch = vec![Complex64::new(0.0, 0.0); inner.get_inplace_scratch_len()];
        for row in data.chunks_exact_mut(cols) {
            inner.process_with_scratch(row, &mut scratch);
        }
        let outer = if forward { &self.fwd_outer } else { &self.inv_outer };
        if let Some(outer) = outer {
            let mut column = vec![Complex64::new(0.0, 0.0); rows];
            let mut scratch = vec![Complex64::new(0.0, 0.0); outer.get_inplace_scratch_len()];
            for j in 0..cols {
                for i in 0..rows {
                    column[i] = data[i * cols + j];
                }
                outer.process_with_scratch(&mut column, &mut scratch);
                for i in 0..rows {
                    data[i * cols + j] = column[i];
                }
            }
        }
    }
}
