#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

use evidentsel::operators::{to_dense, LinearOperator};

pub fn dense(op: &dyn LinearOperator) -> DMatrix<f64> {
    let d = to_dense(op);
    DMatrix::from_row_slice(op.rows(), op.cols(), d.data())
}

/// `(trace(H⁻¹AᵀA), trace(H⁻¹TᵀT))` with `H = AᵀA + λTᵀT`.
pub fn dense_traces(a: &DMatrix<f64>, t: &DMatrix<f64>, lambda: f64) -> (f64, f64) {
    let ata = a.transpose() * a;
    let ttt = t.transpose() * t;
    let h = &ata + lambda * &ttt;
    let hinv = h.try_inverse().expect("invertible H");
    ((&hinv * ata).trace(), (&hinv * ttt).trace())
}

/// `H⁻¹Aᵀb`
pub fn dense_tikhonov(a: &DMatrix<f64>, t: &DMatrix<f64>, b: &[f64], lambda: f64) -> Vec<f64> {
    let h = a.transpose() * a + lambda * t.transpose() * t;
    let rhs = a.transpose() * DVector::from_column_slice(b);
    h.lu().solve(&rhs).expect("invertible H").iter().copied().collect()
}

pub fn rel_err(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(f64::MIN_POSITIVE)
}

pub fn max_rel_vec(u: &[f64], v: &[f64]) -> f64 {
    let d: f64 = u.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
    let nv: f64 = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    d / nv
}

pub fn median(v: &[f64]) -> f64 {
    quantile(v, 0.5)
}

/// Linear-interpolated empirical quantile.
pub fn quantile(v: &[f64], q: f64) -> f64 {
    let mut s: Vec<f64> = v.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pos = q * (s.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    s[lo] + (s[hi] - s[lo]) * (pos - lo as f64)
}
