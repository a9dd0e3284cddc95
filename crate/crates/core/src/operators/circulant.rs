use rustfft::num_complex::Complex64;

use super::{GridShape, LinearOperator, OperatorKind};
use crate::error::{check_len, invalid, Result};
use crate::spectral::Dft;

/// A circulant (1D) or block-circulant-with-circulant-blocks (2D) matrix,
/// described by its first column.
///
/// In 1D the matrix is `C[i][k] = c[(i - k) mod n]`, so `C x = c ⊛ x` with
/// wraparound. In 2D `first_column` is the row-major convolution kernel with
/// its origin at index `(0, 0)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantSpec {
    pub shape: GridShape,
    pub first_column: Vec<f64>,
}

impl CirculantSpec {
    pub fn new(shape: GridShape, first_column: Vec<f64>) -> Result<Self> {
        check_len(shape.len(), first_column.len())?;
        if first_column.is_empty() {
            return Err(invalid("circulant with empty first column"));
        }
        Ok(CirculantSpec { shape, first_column })
    }

    pub fn n(&self) -> usize {
        self.shape.len()
    }

    /// Eigenvalues `γ_j = Σ_k c_k e^{-i2πjk/n}` (2D: the 2D analogue), the
    /// diagonal of the operator in the unitary DFT basis.
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        Dft::new(self.shape)
            .unnormalized_forward(&self.first_column)
            .expect("length checked at construction")
    }

    pub fn into_operator(self) -> Circulant {
        Circulant::new(self)
    }
}

/// Circulant operator applied through the DFT: `C = F⁻¹ diag(γ) F`.
#[derive(Debug, Clone)]
pub struct Circulant {
    spec: CirculantSpec,
    eigs: Vec<Complex64>,
    dft: Dft,
}

impl Circulant {
    pub fn new(spec: CirculantSpec) -> Self {
        let eigs = spec.eigenvalues();
        let dft = Dft::new(spec.shape);
        Circulant { spec, eigs, dft }
    }

    pub fn spec(&self) -> &CirculantSpec {
        &self.spec
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigs
    }

    fn diagonal_apply(&self, x: &[f64], out: &mut [f64], weight: impl Fn(Complex64) -> Complex64) {
        let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.dft.forward_in_place(&mut buf).expect("length");
        for (b, &g) in buf.iter_mut().zip(&self.eigs) {
            *b *= weight(g);
        }
        self.dft.inverse_in_place(&mut buf).expect("length");
        for (o, b) in out.iter_mut().zip(&buf) {
            *o = b.re;
        }
    }
}

impl LinearOperator for Circulant {
    fn rows(&self) -> usize {
        self.spec.n()
    }
    fn cols(&self) -> usize {
        self.spec.n()
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Circulant
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        self.diagonal_apply(x, y, |g| g);
    }
    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        self.diagonal_apply(y, x, |g| g.conj());
    }
    fn normal_into(&self, x: &[f64], out: &mut [f64]) {
        self.diagonal_apply(x, out, |g| Complex64::new(g.norm_sqr(), 0.0));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::test_util::{adjoint_defect, random_vec};

    fn dense_circulant(c: &[f64]) -> Vec<Vec<f64>> {
        let n = c.len();
        (0..n).map(|i| (0..n).map(|k| c[(i + n - k) % n]).collect()).collect()
    }

    #[test]
    fn first_difference_annihilates_constants() {
        let n = 10;
        let mut c = vec![0.0; n];
        c[0] = -1.0;
        c[n - 1] = 1.0;
        let op = CirculantSpec::new(GridShape::D1(n), c).unwrap().into_operator();
        let y = op.apply(&vec![3.5; n]).unwrap();
        assert!(y.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn matches_dense_oracle_up_to_32() {
        for n in [2usize, 5, 16, 31, 32] {
            let c = random_vec(n, n as u64);
            let x = random_vec(n, 100 + n as u64);
            let op = CirculantSpec::new(GridShape::D1(n), c.clone()).unwrap().into_operator();
            let y = op.apply(&x).unwrap();
            let dense = dense_circulant(&c);
            for i in 0..n {
                let s: f64 = dense[i].iter().zip(&x).map(|(a, b)| a * b).sum();
                assert!((s - y[i]).abs() <= 1e-12 * (1.0 + s.abs()), "n={n}");
            }
        }
    }

    #[test]
    fn two_d_kernel_is_periodic_convolution() {
        let (rows, cols) = (4, 6);
        let k = random_vec(rows * cols, 7);
        let x = random_vec(rows * cols, 8);
        let op = CirculantSpec::new(GridShape::D2 { rows, cols }, k.clone())
            .unwrap()
            .into_operator();
        let y = op.apply(&x).unwrap();
        for i in 0..rows {
            for j in 0..cols {
                let mut s = 0.0;
                for p in 0..rows {
                    for q in 0..cols {
                        let di = (i + rows - p) % rows;
                        let dj = (j + cols - q) % cols;
                        s += k[di * cols + dj] * x[p * cols + q];
                    }
                }
                assert!((s - y[i * cols + j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_identity_holds() {
        let op = CirculantSpec::new(GridShape::D1(24), random_vec(24, 1))
            .unwrap()
            .into_operator();
        assert!(adjoint_defect(&op, 100, 3) < 1e-10);
        let op2 = CirculantSpec::new(GridShape::square(6), random_vec(36, 2))
            .unwrap()
            .into_operator();
        assert!(adjoint_defect(&op2, 100, 5) < 1e-10);
    }
}
