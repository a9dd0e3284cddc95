//! Parallel-beam tomography: 64×64 phantom, 18 angles, 95 detector bins.

use std::sync::Arc;

use evidentsel::harness::{add_noise, relative_error, shepp_logan, NoiseConvention};
use evidentsel::me_select::{me_iterate_general, LinearProblem, MEConfig};
use evidentsel::operators::{make_radon, FiniteDifference, GridShape, Operator, RadonSpec};
use evidentsel::tikhonov::{solve_cg, CGConfig};

fn main() -> evidentsel::Result<()> {
    let side = 64;
    let spec = RadonSpec::new(side, RadonSpec::uniform_angles(18), 95);
    let radon = make_radon(&spec)?;
    let truth = shepp_logan(side);
    let a: Operator = Arc::new(radon);
    let t: Operator = Arc::new(FiniteDifference::new(1, GridShape::square(side))?);
    let sinogram = a.apply(&truth)?;

    for snr in [5.0, 20.0, 100.0] {
        let sample = add_noise(&sinogram, snr, NoiseConvention::Mean, 17)?;
        let problem = LinearProblem::new(a.clone(), t.clone(), sample.noisy_b.clone())?;
        let res = me_iterate_general(&problem, &MEConfig::default())?;
        let s = res.trajectory.final_state().copied().unwrap();
        let weak = solve_cg(
            a.as_ref(),
            t.as_ref(),
            &sample.noisy_b,
            1e-3 * s.lambda,
            &CGConfig::default(),
        )?;
        println!(
            "snr {snr:5}: lambda {:.3e}, sigma {:.3e} (true {:.3e}), error {:.4} (lambda/1000: {:.4}), {} iterations",
            s.lambda,
            s.sigma_sq.sqrt(),
            sample.true_sigma,
            relative_error(&res.u, &truth)?,
            relative_error(&weak.u, &truth)?,
            res.trajectory.iterations()
        );
    }
    Ok(())
}
