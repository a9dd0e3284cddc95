//! Map the ME variances to an ℓ1 parameter and compare ℓ2 with TV reconstructions.

use std::sync::Arc;

use evidentsel::harness::{add_noise, gen_signal, relative_error, NoiseConvention, SignalKind};
use evidentsel::l1::{map_to_l1, solve_l1_admm, ADMMConfig};
use evidentsel::me_select::{me_iterate_general, LinearProblem, MEConfig};
use evidentsel::operators::{make_gaussian_psf, FiniteDifference, GridShape, Operator};

fn main() -> evidentsel::Result<()> {
    let n = 256;
    let psf = make_gaussian_psf(n, 2.0)?;
    let a: Operator = Arc::new(psf.into_operator());
    let t: Operator = Arc::new(FiniteDifference::new(1, GridShape::D1(n))?);

    println!("kind                 l2 err   l1 err   lambda      lambda1");
    for kind in SignalKind::ALL {
        let truth = gen_signal(kind, n)?;
        let sample = add_noise(&a.apply(&truth)?, 10.0, NoiseConvention::StdDev, 5)?;
        let problem = LinearProblem::new(a.clone(), t.clone(), sample.noisy_b.clone())?;
        let res = me_iterate_general(&problem, &MEConfig::default())?;
        let s = res.trajectory.final_state().copied().unwrap();
        let lambda1 = map_to_l1(s.sigma_sq, s.eta_sq.sqrt())?;
        let cfg = ADMMConfig {
            warm_start: Some(res.u.clone()),
            ..ADMMConfig::default()
        };
        let l1 = solve_l1_admm(a.as_ref(), t.as_ref(), &sample.noisy_b, lambda1, &cfg)?;
        println!(
            "{:20} {:7.4}  {:7.4}  {:.3e}  {:.3e}",
            kind.name(),
            relative_error(&res.u, &truth)?,
            relative_error(&l1.u, &truth)?,
            s.lambda,
            lambda1
        );
    }
    Ok(())
}
