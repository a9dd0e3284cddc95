use super::{CirculantSpec, GridShape};
use crate::error::{invalid, Result};

fn periodized_gaussian(n: usize, width: f64) -> Vec<f64> {
    let mut k = vec![0.0; n];
    if width == 0.0 {
        k[0] = 1.0;
        return k;
    }
    let wraps = (8.0 * width / n as f64).ceil() as i64 + 1;
    for (i, v) in k.iter_mut().enumerate() {
        for p in -wraps..=wraps {
            let d = i as f64 + (p * n as i64) as f64;
            *v += (-d * d / (2.0 * width * width)).exp();
        }
    }
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

fn check_width(width: f64) -> Result<()> {
    if width.is_finite() && width >= 0.0 {
        Ok(())
    } else {
        Err(invalid(format!(
            "Gaussian width must be a nonnegative number, got {width}"
        )))
    }
}

/// Periodized, unit-sum Gaussian blur centred at index 0 with standard
/// deviation `width` pixels. `width = 0` gives the identity (a delta).
pub fn make_gaussian_psf(n: usize, width: f64) -> Result<CirculantSpec> {
    check_width(width)?;
    if n == 0 {
        return Err(invalid("empty PSF"));
    }
    CirculantSpec::new(GridShape::D1(n), periodized_gaussian(n, width))
}

/// Separable 2D Gaussian blur: the outer product of two 1D kernels.
pub fn make_gaussian_psf_2d(rows: usize, cols: usize, width: f64) -> Result<CirculantSpec> {
    check_width(width)?;
    if rows == 0 || cols == 0 {
        return Err(invalid("empty PSF"));
    }
    let kr = periodized_gaussian(rows, width);
    let kc = periodized_gaussian(cols, width);
    let mut k = Vec::with_capacity(rows * cols);
    for a in &kr {
        for b in &kc {
            k.push(a * b);
        }
    }
    CirculantSpec::new(GridShape::D2 { rows, cols }, k)
}
