//! Test problems, noise, metrics, file formats and the benchmark runner.

pub mod bench;
pub mod io;
mod phantom;

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rustfft::num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::linalg::{dist, mean, norm, std_dev};

pub use bench::{run_bench, BenchConfig, Method, OperatorChoice, TrialRecord};
pub use phantom::shepp_logan;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SignalKind {
    Boxcar,
    Hat,
    Sine,
    PiecewiseQuadratic,
}

impl SignalKind {
    pub const ALL: [SignalKind; 4] = [
        SignalKind::Boxcar,
        SignalKind::Hat,
        SignalKind::Sine,
        SignalKind::PiecewiseQuadratic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SignalKind::Boxcar => "boxcar",
            SignalKind::Hat => "hat",
            SignalKind::Sine => "sine",
            SignalKind::PiecewiseQuadratic => "piecewise_quadratic",
        }
    }
}

impl fmt::Display for SignalKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SignalKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        SignalKind::ALL
            .into_iter()
            .find(|k| k.name() == s.trim())
            .ok_or_else(|| invalid(format!("unknown signal kind '{s}'")))
    }
}

/// Canonical 1D test signals.
///
/// - boxcar: 1 on `[n/4, 3n/4)`, 0 elsewhere
/// - hat: `max(0, 1 − |i − (n−1)/2| / (n/4))`
/// - sine: `sin(2πi/n)`
/// - piecewise quadratic: three parabolic arcs on thirds of `[0, 1)` with
///   jumps between them
pub fn gen_signal(kind: SignalKind, n: usize) -> Result<Vec<f64>> {
    if n < 4 {
        return Err(invalid(format!("signal length must be at least 4, got {n}")));
    }
    let nf = n as f64;
    Ok((0..n)
        .map(|i| match kind {
            SignalKind::Boxcar => {
                if i >= n / 4 && i < 3 * n / 4 {
                    1.0
                } else {
                    0.0
                }
            }
            SignalKind::Hat => {
                let c = (nf - 1.0) / 2.0;
                (1.0 - (i as f64 - c).abs() / (nf / 4.0)).max(0.0)
            }
            SignalKind::Sine => (2.0 * std::f64::consts::PI * i as f64 / nf).sin(),
            SignalKind::PiecewiseQuadratic => {
                let x = (i as f64 + 0.5) / nf;
                if x < 1.0 / 3.0 {
                    1.5 - 36.0 * (x - 1.0 / 6.0).powi(2)
                } else if x < 2.0 / 3.0 {
                    -0.5 + 24.0 * (x - 0.5).powi(2)
                } else {
                    0.8 - 30.0 * (x - 5.0 / 6.0).powi(2)
                }
            }
        })
        .collect())
}

/// How the noise level follows from the SNR.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseConvention {
    /// `σ = stddev(clean) / snr`, used for 1D signals.
    StdDev,
    /// `σ = mean(clean) / snr`, used for images.
    Mean,
}

impl NoiseConvention {
    pub fn name(self) -> &'static str {
        match self {
            NoiseConvention::StdDev => "stddev",
            NoiseConvention::Mean => "mean",
        }
    }
}

#[derive(Debug, Clone)]
pub struct NoisySample {
    pub clean_b: Vec<f64>,
    pub noisy_b: Vec<f64>,
    pub true_sigma: f64,
    pub snr: f64,
    pub seed: u64,
    pub convention: NoiseConvention,
}

/// Noise level for `clean` at the given SNR.
pub fn sigma_for_snr(clean: &[f64], snr: f64, convention: NoiseConvention) -> Result<f64> {
    if !(snr > 0.0) {
        return Err(invalid(format!("snr must be positive, got {snr}")));
    }
    if clean.is_empty() {
        return Err(invalid("empty signal"));
    }
    let level = match convention {
        NoiseConvention::StdDev => std_dev(clean),
        NoiseConvention::Mean => mean(clean),
    };
    if !(level > 0.0) {
        return Err(invalid(format!(
            "{} of the clean data must be positive",
            convention.name()
        )));
    }
    Ok(if snr.is_infinite() { 0.0 } else { level / snr })
}

/// Add i.i.d. `N(0, σ²)` noise with `σ` set by the SNR.
pub fn add_noise(clean: &[f64], snr: f64, convention: NoiseConvention, seed: u64) -> Result<NoisySample> {
    let sigma = sigma_for_snr(clean, snr, convention)?;
    Ok(NoisySample {
        clean_b: clean.to_vec(),
        noisy_b: add_gaussian(clean, sigma, seed)?,
        true_sigma: sigma,
        snr,
        seed,
        convention,
    })
}

/// `clean + σ ε` with `ε` standard normal from a seeded generator.
pub fn add_gaussian(clean: &[f64], sigma: f64, seed: u64) -> Result<Vec<f64>> {
    if sigma == 0.0 {
        return Ok(clean.to_vec());
    }
    let dist = Normal::new(0.0, sigma).map_err(|e| invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(clean.iter().map(|c| c + dist.sample(&mut rng)).collect())
}

/// Circular complex Gaussian noise with `E|ε|² = σ²` on Fourier samples.
pub fn add_complex_noise(samples: &[Complex64], sigma: f64, seed: u64) -> Result<Vec<Complex64>> {
    if sigma == 0.0 {
        return Ok(samples.to_vec());
    }
    let dist = Normal::new(0.0, sigma / 2f64.sqrt()).map_err(|e| invalid(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(samples
        .iter()
        .map(|s| s + Complex64::new(dist.sample(&mut rng), dist.sample(&mut rng)))
        .collect())
}

/// `‖u − v‖ / ‖v‖`
pub fn relative_error(u: &[f64], v: &[f64]) -> Result<f64> {
    crate::error::check_len(v.len(), u.len())?;
    let nv = norm(v);
    if nv == 0.0 {
        return Err(invalid("reference vector is zero"));
    }
    Ok(dist(u, v) / nv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boxcar_n8() {
        assert_eq!(
            gen_signal(SignalKind::Boxcar, 8).unwrap(),
            vec![0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 0.0]
        );
    }

    #[test]
    fn sine_has_unit_peak_and_zero_mean() {
        for n in [16, 64, 100] {
            let s = gen_signal(SignalKind::Sine, n).unwrap();
            let max = s.iter().cloned().fold(f64::MIN, f64::max);
            assert!((max - 1.0).abs() < 1e-10 || n % 4 != 0);
            assert!(mean(&s).abs() < 1e-10);
        }
    }

    #[test]
    fn hat_is_symmetric_about_centre() {
        let h = gen_signal(SignalKind::Hat, 9).unwrap();
        assert_eq!(h[4], 1.0);
        for i in 0..9 {
            assert!((h[i] - h[8 - i]).abs() < 1e-15);
        }
        assert!(h.iter().all(|&v| v < 1.0 || v == h[4]));
    }

    #[test]
    fn piecewise_quadratic_has_jumps() {
        let s = gen_signal(SignalKind::PiecewiseQuadratic, 300).unwrap();
        assert!((s[99] - s[100]).abs() > 0.3);
        assert!((s[199] - s[200]).abs() > 0.15);
    }

    #[test]
    fn names_round_trip() {
        for k in SignalKind::ALL {
            assert_eq!(k.name().parse::<SignalKind>().unwrap(), k);
        }
        assert!("square".parse::<SignalKind>().is_err());
    }

    #[test]
    fn infinite_snr_is_noise_free() {
        let c = gen_signal(SignalKind::Hat, 32).unwrap();
        let s = add_noise(&c, f64::INFINITY, NoiseConvention::StdDev, 1).unwrap();
        assert_eq!(s.noisy_b, c);
        assert_eq!(s.true_sigma, 0.0);
    }

    #[test]
    fn mean_convention_example() {
        let c = vec![10.0; 64];
        let s = add_noise(&c, 5.0, NoiseConvention::Mean, 3).unwrap();
        assert_eq!(s.true_sigma, 2.0);
        assert!(add_noise(&c, 5.0, NoiseConvention::StdDev, 3).is_err());
        assert!(add_noise(&[0.0; 8], 5.0, NoiseConvention::Mean, 3).is_err());
        assert!(add_noise(&c, 0.0, NoiseConvention::Mean, 3).is_err());
    }

    #[test]
    fn sample_spread_matches_sigma() {
        let c = vec![1.0; 20000];
        let s = add_noise(&c, 4.0, NoiseConvention::Mean, 9).unwrap();
        let e: Vec<f64> = s.noisy_b.iter().zip(&c).map(|(a, b)| a - b).collect();
        assert!((std_dev(&e) - 0.25).abs() < 0.05 * 0.25);
        assert!(mean(&e).abs() < 4.0 * 0.25 / (20000f64).sqrt());
    }

    #[test]
    fn complex_noise_has_requested_power() {
        let z = vec![Complex64::new(0.0, 0.0); 20000];
        let e = add_complex_noise(&z, 0.5, 2).unwrap();
        let p = e.iter().map(|c| c.norm_sqr()).sum::<f64>() / 20000.0;
        assert!((p - 0.25).abs() < 0.02);
    }

    #[test]
    fn relative_error_examples() {
        let v = vec![3.0, 4.0];
        assert_eq!(relative_error(&v, &v).unwrap(), 0.0);
        assert!((relative_error(&[6.0, 8.0], &v).unwrap() - 1.0).abs() < 1e-15);
        assert!((relative_error(&[3.5, 4.0], &v).unwrap() - 0.1).abs() < 1e-15);
        assert!(relative_error(&v, &[0.0, 0.0]).is_err());
    }
}
