//! ME (σ unknown) against UPRE (σ given) on the four test signals.

use evidentsel::baselines::{upre_select, SpectralUpre, UPREGrid};
use evidentsel::harness::bench::default_order;
use evidentsel::harness::{add_noise, gen_signal, relative_error, NoiseConvention, SignalKind};
use evidentsel::me_select::{MEConfig, SpectralSelector};
use evidentsel::operators::make_gaussian_psf;
use evidentsel::operators::LinearOperator;
use evidentsel::spectral::{spectral_solve, SpectralModel};

fn main() -> evidentsel::Result<()> {
    let n = 256;
    let psf = make_gaussian_psf(n, 1.5)?;
    let blur = psf.clone().into_operator();
    println!("kind                 lambda ME   lambda UPRE  err ME  err UPRE");
    for kind in SignalKind::ALL {
        let model = SpectralModel::deconvolve(&psf, default_order(kind))?;
        let truth = gen_signal(kind, n)?;
        let sample = add_noise(&blur.apply(&truth)?, 5.0, NoiseConvention::StdDev, 21)?;
        let sel = SpectralSelector::from_signal(&model, &sample.noisy_b)?;
        let me = sel.iterate(&MEConfig::default())?;

        let mut eval = SpectralUpre::new(&model, sel.b_hat().to_vec())?;
        let up = upre_select(&mut eval, sample.true_sigma.powi(2), &UPREGrid::default())?;
        let dft = model.dft();
        let u_up = dft.inverse_real(&spectral_solve(&model, sel.b_hat(), up.lambda)?)?;
        println!(
            "{:20} {:.4e}  {:.4e}  {:.4}  {:.4}{}",
            kind.name(),
            me.lambda,
            up.lambda,
            relative_error(&me.solution()?, &truth)?,
            relative_error(&u_up, &truth)?,
            if up.boundary { "  (UPRE at grid end)" } else { "" }
        );
    }
    Ok(())
}
