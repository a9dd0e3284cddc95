//! Automatic regularization parameter selection by maximum evidence.
//!
//! Given data `b = A u + ε` with i.i.d. Gaussian noise of *unknown* variance
//! `σ²`, and a Gaussian prior of variance `η²` on `T u`, this crate finds the
//! pair `(σ², η²)` that maximizes the evidence `p(b | σ, η)` with a fixed-point
//! iteration, and returns the Tikhonov parameter `λ = σ²/η²` together with
//! the regularized reconstruction.
//!
//! Two routes are provided:
//!
//! - [`me_select::me_iterate_general`] works for any [`operators::LinearOperator`]
//!   pair, solving the normal equations with conjugate gradients and estimating
//!   the two traces it needs with orthogonalized Hutchinson probes.
//! - [`me_select::SpectralSelector`] handles denoising, circulant deconvolution
//!   and Fourier-mask sampling exactly in the DFT domain, at O(n) cost per
//!   iteration.
//!
//! The recovered variances also give an `ℓ1` parameter (see [`l1::map_to_l1`]),
//! and [`l1::solve_l1_admm`] solves the resulting total-variation problem.
//! [`baselines`] implements UPRE (known `σ²`) for comparison and [`analysis`]
//! inspects the fixed-point map in the denoising case.
//!
//! ```
//! use evidentsel::harness::{add_noise, gen_signal, NoiseConvention, SignalKind};
//! use evidentsel::me_select::{MEConfig, SpectralSelector};
//! use evidentsel::operators::GridShape;
//! use evidentsel::spectral::SpectralModel;
//!
//! let clean = gen_signal(SignalKind::Boxcar, 256).unwrap();
//! let sample = add_noise(&clean, 5.0, NoiseConvention::StdDev, 7).unwrap();
//! let model = SpectralModel::denoise(GridShape::D1(256), 1).unwrap();
//! let selector = SpectralSelector::from_signal(&model, &sample.noisy_b).unwrap();
//! let result = selector.iterate(&MEConfig::default()).unwrap();
//! assert!(result.trajectory.converged);
//! let sigma = result.trajectory.final_state().unwrap().sigma_sq.sqrt();
//! assert!((sigma - sample.true_sigma).abs() < 0.3 * sample.true_sigma);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod baselines;
mod error;
pub mod harness;
pub mod l1;
pub mod linalg;
pub mod me_select;
pub mod operators;
pub mod spectral;
pub mod tikhonov;

pub use error::{Error, Result};
pub use rustfft::num_complex::Complex64;
