/// Modified Shepp-Logan head phantom on an `n × n` grid, row-major, values
/// in `[0, 1]`.
pub fn shepp_logan(n: usize) -> Vec<f64> {
    // (intensity, a, b, x0, y0, phi in degrees)
    const ELLIPSES: [(f64, f64, f64, f64, f64, f64); 10] = [
        (1.0, 0.69, 0.92, 0.0, 0.0, 0.0),
        (-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0),
        (-0.2, 0.11, 0.31, 0.22, 0.0, -18.0),
        (-0.2, 0.16, 0.41, -0.22, 0.0, 18.0),
        (0.1, 0.21, 0.25, 0.0, 0.35, 0.0),
        (0.1, 0.046, 0.046, 0.0, 0.1, 0.0),
        (0.1, 0.046, 0.046, 0.0, -0.1, 0.0),
        (0.1, 0.046, 0.023, -0.08, -0.605, 0.0),
        (0.1, 0.023, 0.023, 0.0, -0.606, 0.0),
        (0.1, 0.023, 0.046, 0.06, -0.605, 0.0),
    ];
    let mut img = vec![0.0; n * n];
    for r in 0..n {
        let y = 1.0 - (2.0 * r as f64 + 1.0) / n as f64;
        for c in 0..n {
            let x = (2.0 * c as f64 + 1.0) / n as f64 - 1.0;
            let mut v = 0.0;
            for &(val, a, b, x0, y0, phi) in &ELLIPSES {
                let (s, co) = phi.to_radians().sin_cos();
                let xr = (x - x0) * co + (y - y0) * s;
                let yr = -(x - x0) * s + (y - y0) * co;
                if (xr / a).powi(2) + (yr / b).powi(2) <= 1.0 {
                    v += val;
                }
            }
            img[r * n + c] = v;
        }
    }
    img
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phantom_is_piecewise_constant_with_positive_mean() {
        let p = shepp_logan(64);
        assert!(p.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)));
        assert!(crate::linalg::mean(&p) > 0.05);
        let mut levels: Vec<i64> = p.iter().map(|v| (v * 1000.0).round() as i64).collect();
        levels.sort();
        levels.dedup();
        assert!(levels.len() <= 8);
    }
}
