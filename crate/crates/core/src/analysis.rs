//! Diagnostics of the spectral fixed-point map `λ_{k+1} = f(λ_k)` for
//! denoising (`A = I`).
//!
//! With `t_j = |γ_j(T)|²`, `β_j = 1/(1 + λt_j)` and `û` the DFT of the data,
//!
//! ```text
//! f(λ) = λ · (Σ t²β²|û|² / Σ tβ²|û|²) · (Σ β / Σ tβ).
//! ```
//!
//! `f(0) = 0`, `f'(0) = n Σt²|û|² / (Σt · Σt|û|²)` and `f(λ) ~ κ∞ λ²` as
//! `λ → ∞`, which places an unstable fixed point near `1/κ∞`.

use std::io::Write;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;

use crate::baselines::log_grid;
use crate::error::{check_len, invalid, Error, Result};
use crate::operators::GridShape;
use crate::spectral::{ProblemKind, SpectralModel};

pub use crate::spectral::mean_fd_eigenvalue;

fn check_denoise(model: &SpectralModel, u_hat: &[Complex64]) -> Result<()> {
    if model.kind() != ProblemKind::Denoise {
        return Err(invalid("fixed-point analysis covers denoising models only"));
    }
    check_len(model.n_total(), u_hat.len())
}

/// `f(λ)`; fails when `û` has no energy outside the null space of `T`.
pub fn fixpoint_f(model: &SpectralModel, u_hat: &[Complex64], lambda: f64) -> Result<f64> {
    check_denoise(model, u_hat)?;
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be finite and nonnegative, got {lambda}")));
    }
    let (mut s1, mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0, 0.0);
    for (u, &t) in u_hat.iter().zip(model.reg_eigs_sq()) {
        let beta = 1.0 / (1.0 + lambda * t);
        let e = u.norm_sqr() * beta * beta;
        s1 += t * t * e;
        s2 += t * e;
        s3 += beta;
        s4 += t * beta;
    }
    if !(s2 > 0.0) {
        return Err(Error::Degenerate("data lie in the null space of T".into()));
    }
    if lambda == 0.0 {
        return Ok(0.0);
    }
    Ok(lambda * (s1 / s2) * (s3 / s4))
}

/// `f'(0)`; zero is a stable fixed point iff this is below 1.
pub fn fixpoint_slope_at_zero(model: &SpectralModel, u_hat: &[Complex64]) -> Result<f64> {
    check_denoise(model, u_hat)?;
    let n = model.n_total() as f64;
    let (mut num, mut den, mut tsum) = (0.0, 0.0, 0.0);
    for (u, &t) in u_hat.iter().zip(model.reg_eigs_sq()) {
        let e = u.norm_sqr();
        num += t * t * e;
        den += t * e;
        tsum += t;
    }
    if !(den > 0.0) {
        return Err(Error::Degenerate("data lie in the null space of T".into()));
    }
    Ok(n * num / (tsum * den))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaInfinity {
    pub kappa: f64,
    pub lower: f64,
    pub upper: f64,
}

/// `κ∞ = z Σ_{t>0}|û|² / (p Σ_{t>0}|û|²/t)` where `p` counts positive and `z`
/// zero eigenvalues of `TᵀT` (`z = 1`, `p = n − 1` for 1D differences).
/// Bounds are `z t_min/p` and `z t_max/p`, which for a 1D order-`r` operator
/// are `4^r sin^{2r}(π/n)/(n−1)` and `4^r/(n−1)`.
pub fn kappa_infinity(model: &SpectralModel, u_hat: &[Complex64]) -> Result<KappaInfinity> {
    check_denoise(model, u_hat)?;
    let (mut energy, mut weighted) = (0.0, 0.0);
    let (mut p, mut z) = (0usize, 0usize);
    let (mut tmin, mut tmax) = (f64::INFINITY, 0.0f64);
    for (u, &t) in u_hat.iter().zip(model.reg_eigs_sq()) {
        if t > 0.0 {
            p += 1;
            tmin = tmin.min(t);
            tmax = tmax.max(t);
            energy += u.norm_sqr();
            weighted += u.norm_sqr() / t;
        } else {
            z += 1;
        }
    }
    if !(energy > 0.0) || p == 0 {
        return Err(Error::Degenerate("no energy outside the null space of T".into()));
    }
    let (pf, zf) = (p as f64, z as f64);
    let kappa = zf * energy / (pf * weighted);
    let (lower, upper) = match (model.shape(), model.reg_order()) {
        (GridShape::D1(n), Some(r)) => {
            let s = 4f64.powi(r as i32);
            (
                s * (std::f64::consts::PI / n as f64).sin().powi(2 * r as i32) / (n - 1) as f64,
                s / (n - 1) as f64,
            )
        }
        _ => (zf * tmin / pf, zf * tmax / pf),
    };
    Ok(KappaInfinity { kappa, lower, upper })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

impl Stability {
    fn from_slope(slope: f64) -> Self {
        if slope.abs() < 1.0 {
            Stability::Stable
        } else {
            Stability::Unstable
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPoint {
    pub lambda: f64,
    pub stability: Stability,
    /// `f'(λ*)`
    pub slope: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub lambda_min: f64,
    /// `None` means `10/κ∞` (or `1e6` when `κ∞ = 0`).
    pub lambda_max: Option<f64>,
    pub points: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            lambda_min: 1e-6,
            lambda_max: None,
            points: 400,
        }
    }
}

#[derive(Debug, Clone)]
pub struct FixedPointReport {
    /// Starts with `λ = 0`, then interior points in increasing order.
    pub fixed_points: Vec<FixedPoint>,
    pub slope_at_zero: f64,
    pub kappa: Option<KappaInfinity>,
    /// `(λ, f(λ))` on the scan grid.
    pub scan_grid: Vec<(f64, f64)>,
    /// `f(λ) = λ` on the whole grid, as for `T = I`.
    pub all_fixed: bool,
}

impl FixedPointReport {
    pub fn interior(&self) -> &[FixedPoint] {
        &self.fixed_points[1..]
    }

    /// CSV with header `lambda,f`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["lambda", "f"])?;
        for (l, f) in &self.scan_grid {
            wr.write_record([format!("{l:e}"), format!("{f:e}")])?;
        }
        wr.flush()?;
        Ok(())
    }
}

/// Locate and classify the fixed points of `f` on a log grid.
pub fn scan_fixed_points(model: &SpectralModel, u_hat: &[Complex64], cfg: &ScanConfig) -> Result<FixedPointReport> {
    let slope_at_zero = fixpoint_slope_at_zero(model, u_hat)?;
    let kappa = kappa_infinity(model, u_hat).ok();
    let hi = match (cfg.lambda_max, kappa) {
        (Some(h), _) => h,
        (None, Some(k)) if k.kappa > 0.0 => 10.0 / k.kappa,
        _ => 1e6,
    };
    if !(cfg.lambda_min > 0.0 && hi > cfg.lambda_min) || cfg.points < 2 {
        return Err(invalid(format!(
            "bad scan range [{}, {hi}] with {} points",
            cfg.lambda_min, cfg.points
        )));
    }
    let grid = log_grid(cfg.lambda_min, hi, cfg.points);
    let values: Vec<f64> = grid
        .par_iter()
        .map(|&l| fixpoint_f(model, u_hat, l))
        .collect::<Result<_>>()?;
    let scan_grid: Vec<(f64, f64)> = grid.iter().copied().zip(values.iter().copied()).collect();
    let all_fixed = scan_grid.iter().all(|&(l, f)| (f - l).abs() <= 1e-12 * l);

    let mut fixed_points = vec![FixedPoint {
        lambda: 0.0,
        stability: Stability::from_slope(slope_at_zero),
        slope: slope_at_zero,
    }];
    if !all_fixed {
        let g = |l: f64| fixpoint_f(model, u_hat, l).map(|f| f - l);
        for i in 0..scan_grid.len() - 1 {
            let (l0, f0) = scan_grid[i];
            let (l1, f1) = scan_grid[i + 1];
            let (g0, g1) = (f0 - l0, f1 - l1);
            let root = if g0 == 0.0 {
                l0
            } else if g0 * g1 < 0.0 {
                bisect(&g, l0, l1, g0)?
            } else {
                continue;
            };
            let h = 1e-4 * root;
            let slope = (fixpoint_f(model, u_hat, root + h)? - fixpoint_f(model, u_hat, root - h)?) / (2.0 * h);
            fixed_points.push(FixedPoint {
                lambda: root,
                stability: Stability::from_slope(slope),
                slope,
            });
        }
    }
    Ok(FixedPointReport {
        fixed_points,
        slope_at_zero,
        kappa,
        scan_grid,
        all_fixed,
    })
}

fn bisect<G: Fn(f64) -> Result<f64>>(g: &G, mut lo: f64, mut hi: f64, mut glo: f64) -> Result<f64> {
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        let gm = g(mid)?;
        if gm == 0.0 {
            return Ok(mid);
        }
        if (gm < 0.0) == (glo < 0.0) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok((lo * hi).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::fd_spectrum_sq;

    fn spike(n: usize, j: usize) -> Vec<Complex64> {
        let mut u = vec![Complex64::new(0.0, 0.0); n];
        u[j] = Complex64::new(1.0, 0.0);
        u
    }

    #[test]
    fn identity_regularizer_fixes_everything() {
        let n = 16;
        let one = vec![Complex64::new(1.0, 0.0); n];
        let model = SpectralModel::from_parts(GridShape::D1(n), ProblemKind::Denoise, one, vec![1.0; n], n).unwrap();
        let u: Vec<Complex64> = (0..n).map(|j| Complex64::new(j as f64 - 3.0, 0.5)).collect();
        for l in [1e-3, 0.7, 42.0, 1e5] {
            assert_eq!(fixpoint_f(&model, &u, l).unwrap(), l);
        }
        let report = scan_fixed_points(&model, &u, &ScanConfig::default()).unwrap();
        assert!(report.all_fixed);
        assert_eq!(report.fixed_points.len(), 1);
    }

    #[test]
    fn zero_is_fixed() {
        let model = SpectralModel::denoise(GridShape::D1(16), 1).unwrap();
        assert_eq!(fixpoint_f(&model, &spike(16, 3), 0.0).unwrap(), 0.0);
        assert!(fixpoint_f(&model, &spike(16, 0), 1.0).is_err());
    }

    #[test]
    fn kappa_single_mode_extremes() {
        let n = 32;
        let model = SpectralModel::denoise(GridShape::D1(n), 1).unwrap();
        let k = kappa_infinity(&model, &spike(n, n / 2)).unwrap();
        assert!((k.kappa - 4.0 / 31.0).abs() < 1e-14);
        assert!((k.kappa - k.upper).abs() < 1e-14);
        let k = kappa_infinity(&model, &spike(n, 1)).unwrap();
        let lower = 4.0 * (std::f64::consts::PI / 32.0).sin().powi(2) / 31.0;
        assert!((k.kappa - lower).abs() < 1e-14 && (k.lower - lower).abs() < 1e-16);
    }

    #[test]
    fn mean_eigenvalue_identity() {
        for r in 1..=3u32 {
            let sq = fd_spectrum_sq(r, GridShape::D1(64));
            let mean = sq.iter().sum::<f64>() / 64.0;
            assert!((mean - mean_fd_eigenvalue(r)).abs() < 1e-12 * mean);
        }
    }

    #[test]
    fn scan_finds_known_crossing() {
        let n = 64;
        let model = SpectralModel::denoise(GridShape::D1(n), 1).unwrap();
        let u: Vec<Complex64> = (0..n)
            .map(|j| Complex64::new(1.0 / (1.0 + j.min(n - j) as f64), 0.0))
            .collect();
        let report = scan_fixed_points(&model, &u, &ScanConfig::default()).unwrap();
        for fp in report.interior() {
            let f = fixpoint_f(&model, &u, fp.lambda).unwrap();
            assert!((f - fp.lambda).abs() <= 1e-6 * fp.lambda.max(1.0));
        }
        let mut buf = Vec::new();
        report.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 401);
    }
}
