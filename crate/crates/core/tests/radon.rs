use evidentsel::operators::{make_radon, LinearOperator, RadonSpec};

#[test]
fn projections_of_constant_image_preserve_area() {
    let n = 32;
    let spec = RadonSpec::new(n, RadonSpec::uniform_angles(12), 91);
    let a = make_radon(&spec).unwrap();
    let p = a.apply(&vec![1.0; n * n]).unwrap();
    for j in 0..12 {
        let area: f64 = p[j * 91..(j + 1) * 91].iter().sum::<f64>() * spec.detector_spacing;
        assert!((area / (n * n) as f64 - 1.0).abs() < 0.03, "angle {j}: {area}");
    }
}

#[test]
fn axis_aligned_rays_have_exact_chord_lengths() {
    let n = 8;
    // unit spacing with an even count puts bin centres at half-integers: pixel centres
    let spec = RadonSpec {
        n,
        angles_deg: vec![0.0, 90.0],
        detector_count: n,
        detector_spacing: 1.0,
    };
    let a = make_radon(&spec).unwrap();
    let mut img = vec![0.0; n * n];
    img[3 * n + 5] = 1.0;
    let p = a.apply(&img).unwrap();
    let nonzero: Vec<f64> = p.iter().copied().filter(|v| *v != 0.0).collect();
    assert_eq!(nonzero.len(), 2);
    for v in nonzero {
        assert!((v - 1.0).abs() < 1e-12);
    }
    let ones = a.apply(&vec![1.0; n * n]).unwrap();
    assert!(ones.iter().all(|v| (v - n as f64).abs() < 1e-12));
}

#[test]
fn adjoint_is_consistent() {
    let spec = RadonSpec::new(16, RadonSpec::uniform_angles(7), 23);
    let a = make_radon(&spec).unwrap();
    let x: Vec<f64> = (0..256).map(|i| ((i * 37 % 11) as f64).sin()).collect();
    let y: Vec<f64> = (0..a.rows()).map(|i| ((i * 13 % 7) as f64).cos()).collect();
    let lhs: f64 = a.apply(&x).unwrap().iter().zip(&y).map(|(p, q)| p * q).sum();
    let rhs: f64 = a.adjoint(&y).unwrap().iter().zip(&x).map(|(p, q)| p * q).sum();
    assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
}
