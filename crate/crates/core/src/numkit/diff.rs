use super::NumError;

/// Default central-difference step: `1e-6 · max(1, ‖x‖∞)`.
pub fn default_step(x: &[f64]) -> f64 {
    1e-6 * x.iter().fold(1.0_f64, |m, v| m.max(v.abs()))
}

/// Central-difference gradient, component `j` is
/// `(f(x + h e_j) − f(x − h e_j)) / 2h`.
pub fn central_difference_gradient<F>(f: F, x: &[f64], h: f64) -> Result<Vec<f64>, NumError>
where
    F: Fn(&[f64]) -> f64,
{
    if !(h > 0.0) || !h.is_finite() {
        return Err(NumError::InvalidArgument(format!("step must be positive, got {h}")));
    }
    let mut probe = x.to_vec();
    let mut grad = Vec::with_capacity(x.len());
    for j in 0..x.len() {
        let orig = probe[j];
        probe[j] = orig + h;
        let up = f(&probe);
        probe[j] = orig - h;
        let down = f(&probe);
        probe[j] = orig;
        if !up.is_finite() || !down.is_finite() {
            return Err(NumError::NonFinite(format!("objective at coordinate {j} ± {h:e}")));
        }
        grad.push((up - down) / (2.0 * h));
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_exact() {
        let f = |x: &[f64]| 0.5 * x.iter().map(|v| v * v).sum::<f64>();
        let g = central_difference_gradient(f, &[1.0, 2.0], 1e-6).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-8 && (g[1] - 2.0).abs() < 1e-8, "{g:?}");
    }

    #[test]
    fn constant_gives_zero() {
        let g = central_difference_gradient(|_| 3.5, &[0.3, -7.0, 2.0], 1e-6).unwrap();
        assert!(g.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn non_finite_is_reported() {
        let f = |x: &[f64]| if x[0] > 0.0 { f64::INFINITY } else { 0.0 };
        assert!(matches!(central_difference_gradient(f, &[0.0], 1e-3), Err(NumError::NonFinite(_))));
        assert!(central_difference_gradient(|_| 0.0, &[0.0], 0.0).is_err());
    }

    #[test]
    fn default_step_scales_with_infinity_norm() {
        assert_eq!(default_step(&[0.1, -0.5]), 1e-6);
        assert!((default_step(&[10.0, -20.0]) - 2e-5).abs() < 1e-20);
    }
}
