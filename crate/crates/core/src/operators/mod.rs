//! Linear operators used as forward models and regularizers.
//!
//! Every operator maps `ℝⁿ → ℝᵐ` and provides its adjoint. Operators are
//! immutable once built and can be shared across threads behind an
//! [`Operator`] handle.

mod circulant;
mod dense;
mod finite_difference;
mod fourier_mask;
mod psf;
mod radon;
mod sparse;

use std::sync::Arc;

use crate::error::{check_len, Result};

pub use circulant::{Circulant, CirculantSpec};
pub use dense::{DenseMatrix, Identity, Zero};
pub use finite_difference::{make_fd_regularizer, FDRegularizerSpec, FiniteDifference};
pub use fourier_mask::FourierMask;
pub use psf::{make_gaussian_psf, make_gaussian_psf_2d};
pub use radon::{make_radon, RadonSpec};
pub use sparse::SparseMatrix;

/// Logical layout of a signal: a vector of length `n` or a row-major image.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridShape {
    D1(usize),
    D2 { rows: usize, cols: usize },
}

impl GridShape {
    pub fn square(n: usize) -> Self {
        GridShape::D2 { rows: n, cols: n }
    }

    pub fn len(&self) -> usize {
        match *self {
            GridShape::D1(n) => n,
            GridShape::D2 { rows, cols } => rows * cols,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(rows, cols)`; a 1D shape is a single row.
    pub fn dims(&self) -> (usize, usize) {
        match *self {
            GridShape::D1(n) => (1, n),
            GridShape::D2 { rows, cols } => (rows, cols),
        }
    }

    pub fn ndim(&self) -> usize {
        match self {
            GridShape::D1(_) => 1,
            GridShape::D2 { .. } => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorKind {
    Dense,
    Circulant,
    FourierMask,
    Sparse,
}

pub trait LinearOperator: Send + Sync {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn kind(&self) -> OperatorKind;

    /// `y = A x`. Lengths are the caller's responsibility.
    fn apply_into(&self, x: &[f64], y: &mut [f64]);

    /// `x = Aᵀ y`. Lengths are the caller's responsibility.
    fn adjoint_into(&self, y: &[f64], x: &mut [f64]);

    /// `out = Aᵀ A x`. Operators with a cheaper route override this.
    fn normal_into(&self, x: &[f64], out: &mut [f64]) {
        let mut tmp = vec![0.0; self.rows()];
        self.apply_into(x, &mut tmp);
        self.adjoint_into(&tmp, out);
    }

    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols(), x.len())?;
        let mut y = vec![0.0; self.rows()];
        self.apply_into(x, &mut y);
        Ok(y)
    }

    fn adjoint(&self, y: &[f64]) -> Result<Vec<f64>> {
        check_len(self.rows(), y.len())?;
        let mut x = vec![0.0; self.cols()];
        self.adjoint_into(y, &mut x);
        Ok(x)
    }

    fn normal(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_len(self.cols(), x.len())?;
        let mut out = vec![0.0; self.cols()];
        self.normal_into(x, &mut out);
        Ok(out)
    }
}

/// Shared, thread-safe operator handle.
pub type Operator = Arc<dyn LinearOperator>;

/// Materializes an operator column by column. Only sensible for small sizes;
/// used by tests and oracles.
pub fn to_dense(op: &dyn LinearOperator) -> DenseMatrix {
    let (m, n) = (op.rows(), op.cols());
    let mut data = vec![0.0; m * n];
    let mut e = vec![0.0; n];
    let mut col = vec![0.0; m];
    for j in 0..n {
        e[j] = 1.0;
        op.apply_into(&e, &mut col);
        for i in 0..m {
            data[i * n + j] = col[i];
        }
        e[j] = 0.0;
    }
    DenseMatrix::from_row_major(m, n, data).expect("sizes agree by construction")
}
