//! Modified Bessel functions of the first kind (integer order) and `J0`.
//!
//! Everything is computed in the exponentially scaled form
//! `e^{-x} I_nu(x)`, which stays in `[0, 1]` for all `x >= 0`.

use statrs::function::gamma::ln_gamma;

use crate::error::{domain, Error, Result};

/// Below this argument the power series is used for single orders.
const SERIES_MAX: f64 = 25.0;
/// Above this argument (and for moderate order) the Hankel expansion is used.
const HANKEL_MIN: f64 = 2000.0;
const RESCALE_AT: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// `e^{-x} I_nu(x)` for `x >= 0`. Returns NaN for negative or NaN `x`.
pub fn bessel_i_scaled(nu: u32, x: f64) -> f64 {
    if !(x >= 0.0) {
        return f64::NAN;
    }
    if x == 0.0 {
        return if nu == 0 { 1.0 } else { 0.0 };
    }
    if x.is_infinite() {
        return 0.0;
    }
    if x <= SERIES_MAX {
        return series_scaled(nu, x);
    }
    let n = f64::from(nu);
    if x >= HANKEL_MIN && n * n <= 0.02 * x {
        hankel_scaled(nu, x)
    } else {
        miller_scaled(nu as usize, x)[nu as usize]
    }
}

/// `I_nu(x)`, unscaled.
///
/// Fails with [`Error::Domain`] for negative or non-finite `x` and with
/// [`Error::Overflow`] when the result exceeds `f64::MAX`.
pub fn bessel_i(nu: u32, x: f64) -> Result<f64> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(domain("x", x));
    }
    let s = bessel_i_scaled(nu, x);
    if s == 0.0 {
        return Ok(0.0);
    }
    let ln = s.ln() + x;
    if ln > f64::MAX.ln() {
        return Err(Error::Overflow(format!("I_{nu}({x}) = e^{ln:.1}")));
    }
    Ok(s * x.exp())
}

/// `ln I_nu(x)`. `-inf` when the scaled value underflows.
pub fn ln_bessel_i(nu: u32, x: f64) -> f64 {
    bessel_i_scaled(nu, x).ln() + x
}

/// `[e^{-x} I_0(x), ..., e^{-x} I_n(x)]` from one backward recurrence.
///
/// Used by the Marcum series, which needs many consecutive orders.
pub fn bessel_i_scaled_seq(n: usize, x: f64) -> Vec<f64> {
    if !(x >= 0.0) {
        return vec![f64::NAN; n + 1];
    }
    if x == 0.0 {
        let mut v = vec![0.0; n + 1];
        v[0] = 1.0;
        return v;
    }
    if x.is_infinite() {
        return vec![0.0; n + 1];
    }
    miller_scaled(n, x)
}

fn series_scaled(nu: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let lfact = if nu <= 20 {
        (1..=nu).map(|i| f64::from(i)).product::<f64>().ln()
    } else {
        ln_gamma(f64::from(nu) + 1.0)
    };
    let ln_t0 = f64::from(nu) * half.ln() - lfact - x;
    let q = half * half;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= q / (k * (k + f64::from(nu)));
        sum += term;
        if term < 1e-17 * sum {
            break;
        }
    }
    (ln_t0 + sum.ln()).exp()
}

fn hankel_scaled(nu: u32, x: f64) -> f64 {
    let mu = 4.0 * f64::from(nu) * f64::from(nu);
    let mut term = 1.0_f64;
    let mut sum = 1.0;
    for k in 1..60 {
        let odd = f64::from(2 * k - 1);
        let next = -term * (mu - odd * odd) / (f64::from(k) * 8.0 * x);
        if next.abs() > term.abs() {
            break;
        }
        term = next;
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum / (2.0 * std::f64::consts::PI * x).sqrt()
}

/// Miller backward recurrence normalized by `I0 + 2 sum I_k = e^x`.
fn miller_scaled(n: usize, x: f64) -> Vec<f64> {
    let nf = n as f64;
    let m = (nf * nf + 80.0 * x).sqrt().ceil() as usize + 30;
    let mut out = vec![0.0; n + 1];
    let mut above = 0.0;
    let mut cur = 1.0;
    let mut sum = 0.0;
    for k in (1..=m).rev() {
        if k <= n {
            out[k] = cur;
        }
        sum += 2.0 * cur;
        let below = above + (2.0 * k as f64 / x) * cur;
        above = cur;
        cur = below;
        if cur > RESCALE_AT {
            cur *= RESCALE_BY;
            above *= RESCALE_BY;
            sum *= RESCALE_BY;
            for v in out.iter_mut().skip(k) {
                *v *= RESCALE_BY;
            }
        }
    }
    out[0] = cur;
    sum += cur;
    for v in &mut out {
        *v /= sum;
    }
    out
}

/// Bessel function of the first kind, order zero.
///
/// Trapezoid rule on `(1/pi) int_0^pi cos(x sin t) dt`; the integrand is
/// smooth and periodic so the rule converges geometrically once the node
/// count exceeds `|x|/2`.
pub fn bessel_j0(x: f64) -> f64 {
    let x = x.abs();
    if !x.is_finite() {
        return if x.is_nan() { f64::NAN } else { 0.0 };
    }
    let n = (x.ceil() as usize).max(32) + 64;
    let h = std::f64::consts::PI / n as f64;
    (0..n)
        .map(|j| (x * (h * j as f64).sin()).cos())
        .sum::<f64>()
        / n as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Log-space power series, summed with log-sum-exp.
    fn oracle_scaled(nu: u32, x: f64) -> f64 {
        let kmax = (x as usize) + 80;
        let lh = (0.5 * x).ln();
        let logs: Vec<f64> = (0..kmax)
            .map(|k| {
                let k = k as f64;
                (2.0 * k + f64::from(nu)) * lh
                    - ln_gamma(k + 1.0)
                    - ln_gamma(k + f64::from(nu) + 1.0)
                    - x
            })
            .collect();
        let mx = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        mx.exp() * logs.iter().map(|l| (l - mx).exp()).sum::<f64>()
    }

    /// `(1/pi) int_0^pi e^{x(cos t - 1)} cos(nu t) dt` by trapezoid.
    fn oracle_integral(nu: u32, x: f64) -> f64 {
        let n = 20_000;
        let h = std::f64::consts::PI / n as f64;
        let f = |t: f64| (x * (t.cos() - 1.0)).exp() * (f64::from(nu) * t).cos();
        let mut s = 0.5 * (f(0.0) + f(std::f64::consts::PI));
        for j in 1..n {
            s += f(h * j as f64);
        }
        s * h / std::f64::consts::PI
    }

    #[test]
    fn scaled_matches_log_series() {
        for &x in &[
            1e-6, 0.1, 0.5, 1.0, 3.0, 10.0, 24.9, 25.1, 40.0, 100.0, 333.0, 500.0,
        ] {
            for nu in [0, 1, 2, 3, 5, 8, 15, 20] {
                let got = bessel_i_scaled(nu, x);
                let want = oracle_scaled(nu, x);
                let err = (got - want).abs();
                assert!(
                    err <= 1e-12 + 1e-10 * want,
                    "nu={nu} x={x}: {got} vs {want}"
                );
            }
        }
    }

    #[test]
    fn hankel_region_matches_integral() {
        for &x in &[2000.0, 5000.0, 1e5] {
            for nu in [0, 1, 3, 6] {
                let got = bessel_i_scaled(nu, x);
                let want = oracle_integral(nu, x);
                assert!((got / want - 1.0).abs() < 1e-9, "nu={nu} x={x}");
                let via_miller = miller_scaled(nu as usize, x)[nu as usize];
                assert!((via_miller / want - 1.0).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn sequence_agrees_with_single_orders() {
        for &x in &[1e-8, 0.3, 2.0, 19.0, 70.0, 900.0] {
            let seq = bessel_i_scaled_seq(30, x);
            for (k, v) in seq.iter().enumerate() {
                let want = oracle_scaled(k as u32, x);
                assert!((v - want).abs() <= 1e-14 + 1e-10 * want, "k={k} x={x}");
            }
        }
    }

    #[test]
    fn edge_values() {
        assert_eq!(bessel_i_scaled(0, 0.0), 1.0);
        assert_eq!(bessel_i_scaled(3, 0.0), 0.0);
        assert!(bessel_i_scaled(0, -1.0).is_nan());
        assert!(matches!(bessel_i(0, -1.0), Err(Error::Domain { .. })));
        assert!(matches!(bessel_i(0, 800.0), Err(Error::Overflow(_))));
        let v = bessel_i(1, 700.0).unwrap();
        assert!(v.is_finite() && v > 1e300);
    }

    #[test]
    fn unscaled_known_values() {
        // I0(1), I1(1), I0(10) to 16 digits
        assert!((bessel_i(0, 1.0).unwrap() - 1.266_065_877_752_008_4).abs() < 1e-15);
        assert!((bessel_i(1, 1.0).unwrap() - 0.565_159_103_992_485_0).abs() < 1e-15);
        assert!((bessel_i(0, 10.0).unwrap() / 2815.716_628_466_254 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn j0_against_series_and_constants() {
        let series = |x: f64| {
            let q = 0.25 * x * x;
            let mut t = 1.0;
            let mut s = 1.0;
            for k in 1..80 {
                t *= -q / (k as f64 * k as f64);
                s += t;
            }
            s
        };
        for i in 0..=100 {
            let x = 0.1 * i as f64;
            assert!((bessel_j0(x) - series(x)).abs() < 1e-12, "x={x}");
        }
        assert!((bessel_j0(1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j0(5.0) + 0.177_596_771_314_338_3).abs() < 1e-15);
        assert!((bessel_j0(10.0) + 0.245_935_764_451_348_3).abs() < 1e-15);
        // large argument: J0(x) ~ sqrt(2/(pi x)) cos(x - pi/4)
        let x = 1000.0;
        let asym = (2.0 / (std::f64::consts::PI * x)).sqrt()
            * ((x - std::f64::consts::FRAC_PI_4).cos()
                + (x - std::f64::consts::FRAC_PI_4).sin() / (8.0 * x));
        assert!((bessel_j0(x) - asym).abs() < 1e-7);
    }
}
