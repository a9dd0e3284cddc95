use super::{GridShape, LinearOperator, OperatorKind};
use crate::error::{invalid, Result};

/// Parameters of a wraparound finite-difference regularizer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FDRegularizerSpec {
    pub order: u32,
    /// Grid size per axis.
    pub n: usize,
    /// 1 or 2.
    pub dims: usize,
}

/// `T_r = T_1^r` with `(T_1 x)_i = x_{i+1} - x_i` (indices mod n).
///
/// In 2D the operator stacks `T_r ⊗ I` (differences along rows) over
/// `I ⊗ T_r` (differences along columns), so it maps `ℝ^{N}` to `ℝ^{2N}`.
/// Applied with direct stencils; the result is identical to the DFT route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FiniteDifference {
    order: u32,
    shape: GridShape,
}

pub fn make_fd_regularizer(spec: FDRegularizerSpec) -> Result<FiniteDifference> {
    let shape = match spec.dims {
        1 => GridShape::D1(spec.n),
        2 => GridShape::square(spec.n),
        d => return Err(invalid(format!("finite differences in {d} dimensions"))),
    };
    FiniteDifference::new(spec.order, shape)
}

impl FiniteDifference {
    pub fn new(order: u32, shape: GridShape) -> Result<Self> {
        if order == 0 {
            return Err(invalid("finite-difference order must be at least 1"));
        }
        let (rows, cols) = shape.dims();
        let need = 2 * order as usize;
        let short = match shape {
            GridShape::D1(n) => n <= need,
            GridShape::D2 { .. } => rows <= need || cols <= need,
        };
        if short {
            return Err(invalid(format!(
                "grid {shape:?} too small for order {order}: need more than {need} points per axis"
            )));
        }
        Ok(FiniteDifference { order, shape })
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    /// `|γ_j|²`, the eigenvalues of `TᵀT` in DFT order.
    pub fn spectrum_sq(&self) -> Vec<f64> {
        crate::spectral::fd_spectrum_sq(self.order, self.shape)
    }
}

// Forward difference along a strided axis, in place via a scratch line.
fn diff_line(line: &mut [f64], scratch: &mut [f64], adjoint: bool) {
    let n = line.len();
    scratch.copy_from_slice(line);
    if adjoint {
        for i in 0..n {
            line[i] = scratch[(i + n - 1) % n] - scratch[i];
        }
    } else {
        for i in 0..n {
            line[i] = scratch[(i + 1) % n] - scratch[i];
        }
    }
}

fn diff_axis(data: &mut [f64], rows: usize, cols: usize, along_rows: bool, order: u32, adjoint: bool) {
    if along_rows {
        // index i varies: strided lines of length `rows`
        let mut line = vec![0.0; rows];
        let mut scratch = vec![0.0; rows];
        for j in 0..cols {
            for i in 0..rows {
                line[i] = data[i * cols + j];
            }
            for _ in 0..order {
                diff_line(&mut line, &mut scratch, adjoint);
            }
            for i in 0..rows {
                data[i * cols + j] = line[i];
            }
        }
    } else {
        let mut scratch = vec![0.0; cols];
        for row in data.chunks_exact_mut(cols) {
            for _ in 0..order {
                diff_line(row, &mut scratch, adjoint);
            }
        }
    }
}

impl LinearOperator for FiniteDifference {
    fn rows(&self) -> usize {
        self.shape.len() * self.shape.ndim()
    }
    fn cols(&self) -> usize {
        self.shape.len()
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Circulant
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let n = self.shape.len();
        let (rows, cols) = self.shape.dims();
        match self.shape {
            GridShape::D1(_) => {
                y.copy_from_slice(x);
                diff_axis(y, 1, cols, false, self.order, false);
            }
            GridShape::D2 { .. } => {
                let (top, bottom) = y.split_at_mut(n);
                top.copy_from_slice(x);
                diff_axis(top, rows, cols, true, self.order, false);
                bottom.copy_from_slice(x);
                diff_axis(bottom, rows, cols, false, self.order, false);
            }
        }
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        let n = self.shape.len();
        let (rows, cols) = self.shape.dims();
        match self.shape {
            GridShape::D1(_) => {
                x.copy_from_slice(y);
                diff_axis(x, 1, cols, false, self.order, true);
            }
            GridShape::D2 { .. } => {
                x.copy_from_slice(&y[..n]);
                diff_axis(x, rows, cols, true, self.order, true);
                let mut other = y[n..].to_vec();
                diff_axis(&mut other, rows, cols, false, self.order, true);
                for (a, b) in x.iter_mut().zip(&other) {
                    *a += b;
                }
            }
        }
    }
}
