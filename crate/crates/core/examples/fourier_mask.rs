//! Recover a signal from a random subset of its Fourier coefficients.
//!
//! `cargo run --release --example fourier_mask -- [snr]`

use evidentsel::harness::{add_complex_noise, gen_signal, relative_error, sigma_for_snr, NoiseConvention, SignalKind};
use evidentsel::me_select::{MEConfig, SpectralSelector};
use evidentsel::operators::{FourierMask, GridShape};
use evidentsel::spectral::SpectralModel;

fn main() -> evidentsel::Result<()> {
    let snr: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5.0);
    let n = 1024;
    let shape = GridShape::D1(n);
    let truth = gen_signal(SignalKind::Hat, n)?;
    let sigma = sigma_for_snr(&truth, snr, NoiseConvention::StdDev)?;

    for fraction in [0.25, 0.5, 0.75, 1.0] {
        let m = (fraction * n as f64) as usize;
        let mask = FourierMask::random_symmetric(shape, m, 11)?;
        let samples = add_complex_noise(&mask.sample(&truth)?, sigma, 12)?;

        let model = SpectralModel::fourier_mask(&mask, 2)?;
        let sel = SpectralSelector::from_fourier_samples(&model, &mask, &samples)?;
        let res = sel.iterate(&MEConfig::default())?;
        let s = res.trajectory.final_state().copied().unwrap();

        // zero filling: inverse DFT of the embedded samples
        let zf = model.dft().inverse_real(&mask.embed(&samples)?)?;
        println!(
            "{:3.0}% of coefficients: sigma {:.3e} (true {sigma:.3e}), lambda {:.3e}, error zero-fill {:.4} ME {:.4}",
            100.0 * mask.m() as f64 / n as f64,
            s.sigma_sq.sqrt(),
            res.lambda,
            relative_error(&zf, &truth)?,
            relative_error(&res.solution()?, &truth)?
        );
    }
    Ok(())
}
