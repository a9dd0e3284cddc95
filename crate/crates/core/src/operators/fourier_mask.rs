use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rustfft::num_complex::Complex64;

use super::{GridShape, LinearOperator, OperatorKind};
use crate::error::{check_len, invalid, Result};
use crate::spectral::Dft;

/// Row selector applied after the unitary DFT: `A = P F`.
///
/// As a real [`LinearOperator`] the complex samples are returned stacked as
/// `[Re(PFx); Im(PFx)]`, giving a map `ℝⁿ → ℝ^{2m}` whose adjoint in the real
/// inner product is `Re(F⁻¹ Pᵀ (y_re + i y_im))`.
#[derive(Debug, Clone)]
pub struct FourierMask {
    shape: GridShape,
    indices: Vec<usize>,
    dft: Dft,
}

impl FourierMask {
    /// `indices` are flat (row-major) DFT indices; they are sorted here and
    /// must be unique and in range.
    pub fn new(shape: GridShape, mut indices: Vec<usize>) -> Result<Self> {
        let n = shape.len();
        indices.sort_unstable();
        if indices.windows(2).any(|w| w[0] == w[1]) {
            return Err(invalid("duplicate Fourier mask index"));
        }
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(invalid(format!("mask index {last} out of range for {n} samples")));
            }
        }
        Ok(FourierMask {
            shape,
            indices,
            dft: Dft::new(shape),
        })
    }

    /// `m` distinct indices drawn uniformly; the DC index is always kept when
    /// `keep_dc` is set.
    pub fn random(shape: GridShape, m: usize, keep_dc: bool, seed: u64) -> Result<Self> {
        let n = shape.len();
        if m > n {
            return Err(invalid(format!("cannot keep {m} of {n} Fourier samples")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx: Vec<usize> = if keep_dc && m > 0 {
            let mut rest: Vec<usize> = sample(&mut rng, n - 1, m - 1).into_iter().map(|i| i + 1).collect();
            rest.push(0);
            rest
        } else {
            sample(&mut rng, n, m).into_vec()
        };
        idx.sort_unstable();
        FourierMask::new(shape, idx)
    }

    /// Random index set closed under `j ↦ −j` (per axis), so that real
    /// signals have real normal operators `F⁻¹ δ_S F`. About `m` indices are
    /// kept, DC always among them.
    pub fn random_symmetric(shape: GridShape, m: usize, seed: u64) -> Result<Self> {
        let n = shape.len();
        if m == 0 || m > n {
            return Err(invalid(format!("cannot keep {m} of {n} Fourier samples")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut keep = vec![false; n];
        keep[0] = true;
        let mut count = 1;
        for i in sample(&mut rng, n, n).into_iter() {
            if count >= m {
                break;
            }
            if keep[i] {
                continue;
            }
            let j = conjugate_index(shape, i);
            keep[i] = true;
            keep[j] = true;
            count += if i == j { 1 } else { 2 };
        }
        FourierMask::new(shape, (0..n).filter(|&i| keep[i]).collect())
    }

    /// Whether the index set is closed under `j ↦ −j`.
    pub fn is_conjugate_symmetric(&self) -> bool {
        let ind = self.indicator();
        self.indices.iter().all(|&i| ind[conjugate_index(self.shape, i)] == 1.0)
    }

    pub fn full(shape: GridShape) -> Self {
        FourierMask::new(shape, (0..shape.len()).collect()).unwrap()
    }

    pub fn shape(&self) -> GridShape {
        self.shape
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn m(&self) -> usize {
        self.indices.len()
    }

    /// `δ_S` as a 0/1 array over all DFT indices.
    pub fn indicator(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.shape.len()];
        for &i in &self.indices {
            d[i] = 1.0;
        }
        d
    }

    /// Complex samples `P F x`.
    pub fn sample(&self, x: &[f64]) -> Result<Vec<Complex64>> {
        let xh = self.dft.forward(x)?;
        Ok(self.indices.iter().map(|&i| xh[i]).collect())
    }

    /// `Pᵀ s`: samples placed at their DFT indices, zeros elsewhere.
    pub fn embed(&self, samples: &[Complex64]) -> Result<Vec<Complex64>> {
        check_len(self.m(), samples.len())?;
        let mut full = vec![Complex64::new(0.0, 0.0); self.shape.len()];
        for (&i, &s) in self.indices.iter().zip(samples) {
            full[i] = s;
        }
        Ok(full)
    }
}

fn conjugate_index(shape: GridShape, i: usize) -> usize {
    let (rows, cols) = shape.dims();
    let (r, c) = (i / cols, i % cols);
    ((rows - r) % rows) * cols + (cols - c) % cols
}

impl LinearOperator for FourierMask {
    fn rows(&self) -> usize {
        2 * self.m()
    }
    fn cols(&self) -> usize {
        self.shape.len()
    }
    fn kind(&self) -> OperatorKind {
        OperatorKind::FourierMask
    }

    fn apply_into(&self, x: &[f64], y: &mut [f64]) {
        let s = self.sample(x).expect("length");
        let m = self.m();
        for (k, v) in s.iter().enumerate() {
            y[k] = v.re;
            y[m + k] = v.im;
        }
    }

    fn adjoint_into(&self, y: &[f64], x: &mut [f64]) {
        let m = self.m();
        let samples: Vec<Complex64> = (0..m).map(|k| Complex64::new(y[k], y[m + k])).collect();
        let mut full = self.embed(&samples).expect("length");
        self.dft.inverse_in_place(&mut full).expect("length");
        for (xi, f) in x.iter_mut().zip(&full) {
            *xi = f.re;
        }
    }
}
