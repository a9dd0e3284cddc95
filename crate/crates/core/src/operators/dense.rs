use std::sync::OnceLock;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{LinearOperator, OperatorKind};
use crate::error::{invalid, Result};
use crate::linalg::dot;

/// Row-major dense matrix.
///
/// `AᵀA` is formed lazily on the first `normal_into` call and reused; for
/// square or tall matrices this halves the cost of each normal-equation
/// product.
#[derive(Debug)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    gram: OnceLock<Vec<f64>>,
}

impl Clone for DenseMatrix {
    fn clone(&self) -> Self {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.clone(),
            gram: OnceLock::new(),
        }
    }
}

impl DenseMatrix {
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(invalid(format!(
                "{} entries cannot fill a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(DenseMatrix {
            rows,
            cols,
            data,
            gram: OnceLock::new(),
        })
    }

    pub fn identity(n: usize) -> Self {
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            data[i * n + i] = 1.0;
        }
        DenseMatrix::from_row_major(n, n, data).unwrap()
    }

    /// I.i.d. `N(0, scale²)` entries.
    pub fn gaussian<R: Rng + ?Sized>(rows: usize, cols: usize, scale: f64, rng: &mut R) -> Self {
        let data = (0..rows * cols)
            .map(|_| {
                let z: f64 = StandardNormal.sample(rng);
                scale * z
            })
            .collect::<Vec<f64>>();
        DenseMatrix::from_row_major(rows, cols, data).unwrap()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut data = vec![0.0; self.data.len()];
        for i in 0..self.rows {
            for j in 0..self.cols {
                data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        DenseMatrix::from_row_major(self.cols, self.rows, data).unwrap()
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(invalid("inner dimensions differ"));
        }
        let bt = other.transpose();
        let mut data = vec![0.0; self.rows * other.cols];
        for i in 0..self.rows {
            for j in 0..other.cols {
                data[i * other.cols + j] = dot(self.row(i), bt.row(j));
            }
        }
        DenseMatrix::from_row_major(self.rows, other.cols, data)
    }

    fn gram(&self) -> &[f64] {
        self.gram.get_or_init(|| {
            let n = self.cols;
            let at = self.transpose();
            let mut g = vec![0.0; n * n];
            for i in 0..n {
                for j in i..n {
                    let v = dot(at.row(i), at.row(j));
                    g[i * n + j] = v;
                    g[j * n + i] = v;
                }
            }
            g
        })
    }
}

impl LinearOperator for DenseMatrix {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Dense
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = dot(self.row(i), x);
        }
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        x.iter_mut().for_each(|v| *v = 0.0);
        for (i, &yi) in y.iter().enumerate() {
            if yi != 0.0 {
                crate::linalg::axpy(yi, self.row(i), x);
            }
        }
    }

    fn normal_into(&self, x: &[f64], out: &mut [f64]) {
        if self.rows < self.cols {
            let mut tmp = vec![0.0; self.rows];
            self.apply_into(x, &mut tmp);
            self.adjoint_into(&tmp, out);
            return;
        }
        let g = self.gram();
        let n = self.cols;
        for (i, o) in out.iter_mut().enumerate() {
            *o = dot(&g[i * n..(i + 1) * n], x);
        }
    }
}

/// The identity on `ℝⁿ`.
#[derive(Debug, Clone, Copy)]
pub struct Identity(pub usize);

impl LinearOperator for Identity {
    fn rows(&self) -> usize {
        self.0
    }
    fn cols(&self) -> usize {
        self.0
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Circulant
    }
    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        y.copy_from_slice(x);
    }
    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        x.copy_from_slice(y);
    }
    fn normal_into(&self, x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(x);
    }
}

/// The zero map `ℝⁿ → ℝᵐ`.
#[derive(Debug, Clone, Copy)]
pub struct Zero {
    pub rows: usize,
    pub cols: usize,
}

impl LinearOperator for Zero {
    fn rows(&self) -> usize {
        self.rows
    }
    fn cols(&self) -> usize {
        self.cols
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::Dense
    }
    fn apply_into(&self, _x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
    }
    fn adjoint_into(&self, _y: &[f64], x: &mut [f64]) {
        x.iter_mut().for_each(|v| *v = 0.0);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::test_util::{adjoint_defect, random_vec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_apply_is_identity() {
        let id = Identity(3);
        assert_eq!(id.apply(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
        let dense = DenseMatrix::identity(3);
        assert_eq!(dense.apply(&[1.0, 2.0, 3.0]).unwrap(), vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn dense_apply_matches_explicit_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = DenseMatrix::gaussian(8, 8, 1.0, &mut rng);
        let x = random_vec(8, 5);
        let y = a.apply(&x).unwrap();
        for i in 0..8 {
            let mut s = 0.0;
            for j in 0..8 {
                s += a.get(i, j) * x[j];
            }
            assert!((s - y[i]).abs() <= 1e-12 * (1.0 + s.abs()));
        }
    }

    #[test]
    fn dense_normal_uses_consistent_gram() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = DenseMatrix::gaussian(12, 7, 0.3, &mut rng);
        let x = random_vec(7, 9);
        let via_gram = a.normal(&x).unwrap();
        let direct = a.adjoint(&a.apply(&x).unwrap()).unwrap();
        for (p, q) in via_gram.iter().zip(&direct) {
            assert!((p - q).abs() < 1e-12);
        }
        // wide matrix takes the two-product route
        let w = DenseMatrix::gaussian(4, 9, 1.0, &mut rng);
        let x = random_vec(9, 1);
        let n1 = w.normal(&x).unwrap();
        let n2 = w.adjoint(&w.apply(&x).unwrap()).unwrap();
        assert_eq!(n1, n2);
    }

    #[test]
    fn dense_adjoint_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let a = DenseMatrix::gaussian(9, 5, 1.0, &mut rng);
        assert!(adjoint_defect(&a, 100, 17) < 1e-10);
    }

    #[test]
    fn wrong_length_is_rejected() {
        let a = DenseMatrix::identity(3);
        assert!(a.apply(&[1.0, 2.0]).is_err());
        assert!(a.adjoint(&[1.0]).is_err());
    }

    #[test]
    fn apply_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let a = DenseMatrix::gaussian(6, 6, 1.0, &mut rng);
        let x = random_vec(6, 1);
        let z = random_vec(6, 2);
        let combo: Vec<f64> = x.iter().zip(&z).map(|(p, q)| 2.0 * p - 0.5 * q).collect();
        let lhs = a.apply(&combo).unwrap();
        let ax = a.apply(&x).unwrap();
        let az = a.apply(&z).unwrap();
        for i in 0..6 {
            assert!((lhs[i] - (2.0 * ax[i] - 0.5 * az[i])).abs() < 1e-13);
        }
    }
}
