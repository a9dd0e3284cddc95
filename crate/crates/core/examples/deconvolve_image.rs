//! Deblur a 256² phantom: spectral ME for λ, then write the result as PGM.
//!
//! `cargo run --release --example deconvolve_image -- [out_dir]`

use std::path::PathBuf;
use std::time::Instant;

use evidentsel::harness::io::{write_pgm, Image};
use evidentsel::harness::{add_noise, relative_error, shepp_logan, NoiseConvention};
use evidentsel::me_select::{MEConfig, SpectralSelector};
use evidentsel::operators::{make_gaussian_psf_2d, LinearOperator};
use evidentsel::spectral::SpectralModel;

fn main() -> evidentsel::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "target/deconvolve_image".into()),
    );
    std::fs::create_dir_all(&out)?;
    let side = 256;
    let truth = shepp_logan(side);

    for width in [0.5, 1.33, 3.0] {
        let psf = make_gaussian_psf_2d(side, side, width)?;
        let model = SpectralModel::deconvolve(&psf, 1)?;
        let blurred = psf.into_operator().apply(&truth)?;
        let sample = add_noise(&blurred, 20.0, NoiseConvention::Mean, 3)?;

        let start = Instant::now();
        let res = SpectralSelector::from_signal(&model, &sample.noisy_b)?.iterate(&MEConfig::default())?;
        let u = res.solution()?;
        let secs = start.elapsed().as_secs_f64();

        println!(
            "width {width}: lambda {:.4e} in {} iterations, {:.1} ms, error blurred {:.3} -> {:.3}",
            res.lambda,
            res.trajectory.iterations(),
            secs * 1e3,
            relative_error(&sample.noisy_b, &truth)?,
            relative_error(&u, &truth)?
        );
        let img = |data: Vec<f64>| Image {
            rows: side,
            cols: side,
            data,
        };
        write_pgm(&out.join(format!("data_w{width}.pgm")), &img(sample.noisy_b))?;
        write_pgm(&out.join(format!("recon_w{width}.pgm")), &img(u))?;
    }
    println!("images in {}", out.display());
    Ok(())
}
