//! Denoise a 1D boxcar with the spectral selector and compare σ to the truth.
//!
//! `cargo run --release --example denoise_1d -- [snr] [seed]`

use evidentsel::harness::{add_noise, gen_signal, relative_error, NoiseConvention, SignalKind};
use evidentsel::me_select::{MEConfig, SpectralSelector};
use evidentsel::operators::GridShape;
use evidentsel::spectral::SpectralModel;

fn main() -> evidentsel::Result<()> {
    let args: Vec<String> = std::env::args().collect();
    let snr: f64 = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(5.0);
    let seed: u64 = args.get(2).and_then(|s| s.parse().ok()).unwrap_or(1);
    let n = 512;

    let truth = gen_signal(SignalKind::Boxcar, n)?;
    let sample = add_noise(&truth, snr, NoiseConvention::StdDev, seed)?;
    let model = SpectralModel::denoise(GridShape::D1(n), 1)?;
    let sel = SpectralSelector::from_signal(&model, &sample.noisy_b)?;
    let res = sel.iterate(&MEConfig::default())?;

    println!(" k        sigma          eta       lambda");
    for s in &res.trajectory.states[1..] {
        println!(
            "{:2} {:12.5e} {:12.5e} {:12.5e}",
            s.k,
            s.sigma_sq.sqrt(),
            s.eta_sq.sqrt(),
            s.lambda
        );
    }
    let u = res.solution()?;
    println!("true sigma {:.5e}", sample.true_sigma);
    println!("noisy error {:.4}", relative_error(&sample.noisy_b, &truth)?);
    println!("denoised error {:.4}", relative_error(&u, &truth)?);
    Ok(())
}
