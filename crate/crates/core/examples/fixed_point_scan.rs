//! Fixed points of the denoising map for r = 1 and r = 2, with the scan written as CSV.

use std::fs::File;

use evidentsel::analysis::{scan_fixed_points, ScanConfig};
use evidentsel::harness::{add_noise, gen_signal, NoiseConvention, SignalKind};
use evidentsel::me_select::{MEConfig, SpectralSelector};
use evidentsel::operators::GridShape;
use evidentsel::spectral::SpectralModel;

fn main() -> evidentsel::Result<()> {
    let n = 128;
    let out = std::path::Path::new("target/fixed_point_scan");
    std::fs::create_dir_all(out)?;
    for (kind, snr) in [(SignalKind::Boxcar, 5.0), (SignalKind::PiecewiseQuadratic, 50.0)] {
        let sample = add_noise(&gen_signal(kind, n)?, snr, NoiseConvention::StdDev, 8)?;
        for r in [1, 2] {
            let model = SpectralModel::denoise(GridShape::D1(n), r)?;
            let sel = SpectralSelector::from_signal(&model, &sample.noisy_b)?;
            let rep = scan_fixed_points(&model, sel.b_hat(), &ScanConfig::default())?;
            println!("{kind} r={r} snr={snr}: f'(0) = {:.3}", rep.slope_at_zero);
            for fp in &rep.fixed_points {
                println!(
                    "    lambda* = {:.4e} {:?} (f' = {:.3})",
                    fp.lambda, fp.stability, fp.slope
                );
            }
            let res = sel.iterate(&MEConfig {
                max_iter: 100,
                ..MEConfig::default()
            })?;
            println!(
                "    ME from lambda0 = 1 -> {:.4e} ({:?})",
                res.lambda, res.trajectory.stop_reason
            );
            rep.write_csv(File::create(out.join(format!("{}_r{r}.csv", kind.name())))?)?;
        }
    }
    Ok(())
}
