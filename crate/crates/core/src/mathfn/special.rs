use libm::erfc;

use super::bessel::bessel_i_scaled;
use crate::error::{domain, Result};

/// Gaussian tail `Q(x) = P(Z > x)`.
pub fn gaussian_q(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// `psi(t) = I1(t) / (t I0(t))`, decreasing from `1/2` at `t = 0` to 0.
pub fn psi(t: f64) -> Result<f64> {
    if !(t >= 0.0) || t.is_infinite() {
        return Err(domain("t", t));
    }
    if t < 1e-8 {
        return Ok(0.5 - t * t / 16.0);
    }
    Ok(bessel_i_scaled(1, t) / (t * bessel_i_scaled(0, t)))
}

/// Inverse of [`psi`] on `(0, 1/2)`, by bisection to relative width `1e-12`.
pub fn psi_inv(y: f64) -> Result<f64> {
    if !(y > 0.0 && y < 0.5) {
        return Err(domain("y", y));
    }
    let mut lo = 1e-8_f64;
    let mut hi = (2.0 / y).max(4.0);
    while hi - lo > 1e-12 * hi {
        let mid = 0.5 * (lo + hi);
        if psi(mid)? > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
