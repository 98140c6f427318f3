//! The piecewise quadratic `ψ_θ`.

use super::InstanceError;

/// `ψ_θ(x)`; assumes `θ > 0`.
#[inline]
pub(crate) fn psi_unchecked(theta: f64, x: f64) -> f64 {
    let lo = 31.0 * theta / 32.0;
    let hi = 33.0 * theta / 32.0;
    if x <= lo {
        0.5 * x * x
    } else if x <= theta {
        0.5 * x * x - 16.0 * (x - lo).powi(2)
    } else if x <= hi {
        0.5 * x * x - theta * theta / 32.0 + 16.0 * (x - hi).powi(2)
    } else {
        0.5 * x * x - theta * theta / 32.0
    }
}

/// `ψ'_θ(x)`. The middle branches are written as `31(θ − x)` and `33(x − θ)`
/// so that `ψ'_θ(θ)` is exactly zero in floating point.
#[inline]
pub(crate) fn psi_grad_unchecked(theta: f64, x: f64) -> f64 {
    if x <= 31.0 * theta / 32.0 {
        x
    } else if x <= theta {
        31.0 * (theta - x)
    } else if x <= 33.0 * theta / 32.0 {
        33.0 * (x - theta)
    } else {
        x
    }
}

fn check_theta(theta: f64) -> Result<(), InstanceError> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(InstanceError::Invalid(format!("psi needs theta > 0, got {theta}")))
    }
}

pub fn psi(theta: f64, x: f64) -> Result<f64, InstanceError> {
    check_theta(theta)?;
    Ok(psi_unchecked(theta, x))
}

pub fn psi_grad(theta: f64, x: f64) -> Result<f64, InstanceError> {
    check_theta(theta)?;
    Ok(psi_grad_unchecked(theta, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        assert_eq!(psi(1.0, 0.0).unwrap(), 0.0);
        assert_eq!(psi(1.0, 2.0).unwrap(), 1.96875);
        assert_eq!(psi_grad(1.0, 1.0).unwrap(), 0.0);
        assert!(psi(0.0, 1.0).is_err());
        assert!(psi_grad(-1.0, 1.0).is_err());
    }

    #[test]
    fn grad_is_exactly_zero_at_theta() {
        let mut theta = 1.0f64;
        for _ in 0..200 {
            assert_eq!(psi_grad_unchecked(theta, theta), 0.0);
            theta *= 0.875;
        }
    }

    #[test]
    fn continuous_at_boundaries() {
        for theta in [1.0, 0.3, 7.5] {
            for x in [31.0 * theta / 32.0, theta, 33.0 * theta / 32.0] {
                let e = 1e-12 * theta;
                // Slope is at most ~x, so the value may move by about 2e·x across the gap.
                let slack = 4.0 * e * x + 1e-14;
                assert!((psi_unchecked(theta, x - e) - psi_unchecked(theta, x + e)).abs() < slack);
                assert!((psi_grad_unchecked(theta, x - e) - psi_grad_unchecked(theta, x + e)).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn theta_value_matches_closed_form() {
        // ψ_θ(θ) = θ²/2 − θ²/64.
        for theta in [1.0, 0.5, 0.875f64.powi(7)] {
            let v = psi_unchecked(theta, theta);
            assert!((v - 31.0 * theta * theta / 64.0).abs() < 1e-15);
        }
    }
}
