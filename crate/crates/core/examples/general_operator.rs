//! General path on a dense random forward matrix: λ0 sweep and probe traces.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use evidentsel::harness::{add_noise, gen_signal, relative_error, NoiseConvention, SignalKind};
use evidentsel::me_select::{me_iterate_general, LinearProblem, MEConfig};
use evidentsel::operators::{DenseMatrix, FiniteDifference, GridShape, Operator};

fn main() -> evidentsel::Result<()> {
    let n = 500;
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let a: Operator = Arc::new(DenseMatrix::gaussian(n, n, 1.0 / (n as f64).sqrt(), &mut rng));
    let t: Operator = Arc::new(FiniteDifference::new(1, GridShape::D1(n))?);
    let truth = gen_signal(SignalKind::PiecewiseQuadratic, n)?;
    let sample = add_noise(&a.apply(&truth)?, 2.0, NoiseConvention::StdDev, 43)?;
    let problem = LinearProblem::new(a, t, sample.noisy_b.clone())?.with_truth(truth.clone())?;

    println!("true sigma {:.4e}", sample.true_sigma);
    for lambda0 in [1e-2, 1.0, 1e2, 1e5] {
        let cfg = MEConfig {
            lambda0,
            seed: 7,
            ..MEConfig::default()
        };
        let res = me_iterate_general(&problem, &cfg)?;
        let s = res.trajectory.final_state().copied().unwrap();
        println!(
            "lambda0 {lambda0:8.0e}: lambda {:.5e}, sigma {:.4e}, {} iterations, {} CG steps, error {:.4}",
            res.trajectory.final_lambda(),
            s.sigma_sq.sqrt(),
            res.trajectory.iterations(),
            res.cg_iterations,
            relative_error(&res.u, &truth)?
        );
    }
    Ok(())
}
