mod common;

use common::*;
use nalgebra::DVector;

use evidentsel::harness::{add_noise, gen_signal, shepp_logan, NoiseConvention, SignalKind};
use evidentsel::me_select::SpectralSelector;
use evidentsel::operators::{make_gaussian_psf_2d, FiniteDifference, FourierMask, GridShape, Identity, LinearOperator};
use evidentsel::spectral::{spectral_norms, spectral_solve, spectral_traces, SpectralModel};

#[test]
fn two_dimensional_traces_match_dense_inverse() {
    let shape = GridShape::D2 { rows: 6, cols: 9 };
    let psf = make_gaussian_psf_2d(6, 9, 0.9).unwrap();
    for r in [1, 2] {
        let model = SpectralModel::deconvolve(&psf, r).unwrap();
        let a = dense(&psf.clone().into_operator());
        let t = dense(&FiniteDifference::new(r, shape).unwrap());
        for lambda in [0.03, 2.0] {
            let tr = spectral_traces(&model, lambda).unwrap();
            let (ea, et) = dense_traces(&a, &t, lambda);
            assert!(rel_err(tr.trace_a, ea) < 1e-9, "{} vs {ea}", tr.trace_a);
            assert!(rel_err(tr.trace_t, et) < 1e-9, "{} vs {et}", tr.trace_t);
        }
    }
}

#[test]
fn symmetric_mask_traces_match_stacked_real_operator() {
    for shape in [GridShape::D1(24), GridShape::D2 { rows: 6, cols: 8 }] {
        let mask = FourierMask::random_symmetric(shape, shape.len() / 2, 3).unwrap();
        assert!(mask.is_conjugate_symmetric());
        let model = SpectralModel::fourier_mask(&mask, 1).unwrap();
        let a = dense(&mask);
        let t = dense(&FiniteDifference::new(1, shape).unwrap());
        for lambda in [0.1, 1.0, 10.0] {
            let tr = spectral_traces(&model, lambda).unwrap();
            let (ea, et) = dense_traces(&a, &t, lambda);
            assert!(rel_err(tr.trace_a, ea) < 1e-9);
            assert!(rel_err(tr.trace_t, et) < 1e-9);
            assert!(tr.trace_a <= mask.m() as f64 + 1e-9);
        }
    }
}

#[test]
fn spectral_solution_satisfies_normal_equations() {
    let side = 12;
    let shape = GridShape::square(side);
    let psf = make_gaussian_psf_2d(side, side, 1.2).unwrap();
    let model = SpectralModel::deconvolve(&psf, 1).unwrap();
    let op = psf.into_operator();
    let b = add_noise(&op.apply(&shepp_logan(side)).unwrap(), 10.0, NoiseConvention::Mean, 5)
        .unwrap()
        .noisy_b;
    let lambda = 0.05;
    let dft = model.dft();
    let u = dft
        .inverse_real(&spectral_solve(&model, &dft.forward(&b).unwrap(), lambda).unwrap())
        .unwrap();
    let a = dense(&op);
    let t = dense(&FiniteDifference::new(1, shape).unwrap());
    let uv = DVector::from_column_slice(&u);
    let grad = a.transpose() * (&a * &uv - DVector::from_column_slice(&b)) + lambda * t.transpose() * (&t * &uv);
    let scale = (a.transpose() * DVector::from_column_slice(&b)).norm();
    assert!(grad.norm() / scale < 1e-10, "{}", grad.norm() / scale);
    let oracle = dense_tikhonov(&a, &t, &b, lambda);
    assert!(max_rel_vec(&u, &oracle) < 1e-10);
}

#[test]
fn parseval_norms_match_signal_domain() {
    let n = 64;
    let shape = GridShape::D1(n);
    let model = SpectralModel::denoise(shape, 2).unwrap();
    let b = add_noise(
        &gen_signal(SignalKind::Hat, n).unwrap(),
        4.0,
        NoiseConvention::StdDev,
        1,
    )
    .unwrap()
    .noisy_b;
    let dft = model.dft();
    let b_hat = dft.forward(&b).unwrap();
    let u_hat = spectral_solve(&model, &b_hat, 3.0).unwrap();
    let norms = spectral_norms(&model, &u_hat, &b_hat).unwrap();
    let u = dft.inverse_real(&u_hat).unwrap();
    let misfit: f64 = Identity(n)
        .apply(&u)
        .unwrap()
        .iter()
        .zip(&b)
        .map(|(x, y)| (x - y).powi(2))
        .sum();
    let tu = FiniteDifference::new(2, shape).unwrap().apply(&u).unwrap();
    let reg: f64 = tu.iter().map(|v| v * v).sum();
    assert!(rel_err(norms.data_misfit, misfit) < 1e-10);
    assert!(rel_err(norms.reg_norm, reg) < 1e-10);
}

#[test]
fn selector_rejects_signal_input_for_masks() {
    let shape = GridShape::D1(16);
    let mask = FourierMask::random_symmetric(shape, 8, 1).unwrap();
    let model = SpectralModel::fourier_mask(&mask, 1).unwrap();
    assert!(SpectralSelector::from_signal(&model, &[0.0; 16]).is_err());
}
