mod common;

use std::sync::Arc;

use common::*;
use evidentsel::harness::{add_noise, gen_signal, NoiseConvention, SignalKind};
use evidentsel::me_select::{me_iterate_general, LinearProblem, MEConfig, SpectralSelector};
use evidentsel::operators::{make_gaussian_psf, FiniteDifference, GridShape, Identity, LinearOperator, Operator};
use evidentsel::spectral::{spectral_solve, SpectralModel};
use evidentsel::tikhonov::{solve_cg, CGConfig};

fn tight() -> MEConfig {
    let mut cfg = MEConfig {
        tol: 1e-8,
        max_iter: 60,
        ..MEConfig::default()
    };
    cfg.cg.rel_tol = 1e-12;
    cfg
}

#[test]
fn full_probe_set_reproduces_spectral_trajectory() {
    let n = 48;
    let shape = GridShape::D1(n);
    for (kind, width, r) in [(SignalKind::Boxcar, None, 1), (SignalKind::Hat, Some(1.2), 2)] {
        let truth = gen_signal(kind, n).unwrap();
        let (a, model): (Operator, SpectralModel) = match width {
            None => (Arc::new(Identity(n)), SpectralModel::denoise(shape, r).unwrap()),
            Some(w) => {
                let psf = make_gaussian_psf(n, w).unwrap();
                let model = SpectralModel::deconvolve(&psf, r).unwrap();
                (Arc::new(psf.into_operator()), model)
            }
        };
        let b = add_noise(&a.apply(&truth).unwrap(), 5.0, NoiseConvention::StdDev, 3)
            .unwrap()
            .noisy_b;
        let t: Operator = Arc::new(FiniteDifference::new(r, shape).unwrap());
        let cfg = MEConfig { probes: n, ..tight() };
        let gen = me_iterate_general(&LinearProblem::new(a, t, b.clone()).unwrap(), &cfg).unwrap();
        let spec = SpectralSelector::from_signal(&model, &b)
            .unwrap()
            .iterate(&cfg)
            .unwrap();
        let (gs, ss) = (&gen.trajectory.states, &spec.trajectory.states);
        assert_eq!(gs.len(), ss.len());
        for (g, s) in gs.iter().zip(ss).skip(1) {
            assert!(rel_err(g.lambda, s.lambda) < 1e-6, "{} vs {}", g.lambda, s.lambda);
            assert!(rel_err(g.sigma_sq, s.sigma_sq) < 1e-6);
        }
        assert!(max_rel_vec(&gen.u, &spec.solution().unwrap()) < 1e-6);
    }
}

#[test]
fn cg_and_spectral_solves_agree_on_deconvolution() {
    let n = 128;
    let psf = make_gaussian_psf(n, 2.0).unwrap();
    let model = SpectralModel::deconvolve(&psf, 2).unwrap();
    let op = psf.into_operator();
    let t = FiniteDifference::new(2, GridShape::D1(n)).unwrap();
    let b = add_noise(
        &op.apply(&gen_signal(SignalKind::Sine, n).unwrap()).unwrap(),
        8.0,
        NoiseConvention::StdDev,
        9,
    )
    .unwrap()
    .noisy_b;
    let cg = CGConfig {
        rel_tol: 1e-12,
        max_iter: Some(10_000),
        ..CGConfig::default()
    };
    for lambda in [1e-3, 1.0, 100.0] {
        let u_cg = solve_cg(&op, &t, &b, lambda, &cg).unwrap();
        assert!(u_cg.converged);
        let dft = model.dft();
        let u_sp = dft
            .inverse_real(&spectral_solve(&model, &dft.forward(&b).unwrap(), lambda).unwrap())
            .unwrap();
        assert!(max_rel_vec(&u_cg.u, &u_sp) < 1e-8);
    }
}

#[test]
fn general_result_is_reproducible_for_fixed_seed() {
    let n = 64;
    let a: Operator = Arc::new(Identity(n));
    let t: Operator = Arc::new(FiniteDifference::new(1, GridShape::D1(n)).unwrap());
    let b = add_noise(
        &gen_signal(SignalKind::Boxcar, n).unwrap(),
        3.0,
        NoiseConvention::StdDev,
        4,
    )
    .unwrap()
    .noisy_b;
    let p = LinearProblem::new(a, t, b).unwrap();
    let cfg = MEConfig {
        probes: 8,
        seed: 99,
        ..MEConfig::default()
    };
    let r1 = me_iterate_general(&p, &cfg).unwrap();
    let r2 = me_iterate_general(&p, &cfg).unwrap();
    assert_eq!(
        format!("{:?}", r1.trajectory.states),
        format!("{:?}", r2.trajectory.states)
    );
    assert_eq!(r1.u, r2.u);
}
