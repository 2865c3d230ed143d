//! Surface control: phase alignment, perfect-CSI port choice, BS-array
//! scaling and the direct-link SNR sandwich.

use num_complex::Complex64;

use crate::channel::{with_bs_antennas, ChannelSample, DerivedParams, SystemConfig};
use crate::error::{domain, Error, Result};

/// `theta_m = arg(h_m) - arg(g_m)` in `[0, 2 pi)`.
///
/// Aligns every term of `h^* Phi g` on the positive real axis.
pub fn optimal_phases(h_bar: &[Complex64], g: &[Complex64]) -> Result<Vec<f64>> {
    if h_bar.len() != g.len() {
        return Err(Error::InvalidConfig(format!(
            "length mismatch: {} vs {}",
            h_bar.len(),
            g.len()
        )));
    }
    h_bar
        .iter()
        .zip(g)
        .map(|(h, gm)| {
            if h.norm() == 0.0 {
                return Err(domain("|h_m|", 0.0));
            }
            if gm.norm() == 0.0 {
                return Err(domain("|g_m|", 0.0));
            }
            Ok(wrap_phase(h.arg() - gm.arg()))
        })
        .collect()
}

/// Maps any angle into `[0, 2 pi)`.
pub fn wrap_phase(t: f64) -> f64 {
    let w = t.rem_euclid(std::f64::consts::TAU);
    if w >= std::f64::consts::TAU {
        0.0
    } else {
        w
    }
}

/// `h^* diag(e^{j theta}) g`.
pub fn cascade(h: &[Complex64], theta: &[f64], g: &[Complex64]) -> Complex64 {
    h.iter()
        .zip(theta)
        .zip(g)
        .map(|((hm, &t), gm)| hm.conj() * Complex64::from_polar(1.0, t) * gm)
        .sum()
}

/// Port maximizing `sum_m |h_{k,m}| |g_m|` (zero-based, lowest index on
/// ties) and the phases aligning that port.
pub fn perfect_csi_config(sample: &ChannelSample) -> Result<(usize, Vec<f64>)> {
    if sample.h_ports.is_empty() {
        return Err(Error::InvalidConfig("sample has no ports".into()));
    }
    let score = |h: &Vec<Complex64>| -> f64 {
        h.iter()
            .zip(&sample.g)
            .map(|(a, b)| a.norm() * b.norm())
            .sum()
    };
    let mut best = 0;
    let mut best_score = score(&sample.h_ports[0]);
    for (k, h) in sample.h_ports.iter().enumerate().skip(1) {
        let s = score(h);
        if s > best_score {
            best = k;
            best_score = s;
        }
    }
    Ok((best, optimal_phases(&sample.h_ports[best], &sample.g)?))
}

/// Parameters for a BS with `n_bs` antennas: transmit power becomes
/// `P n_bs` in the SNR and in the amplification budget.
pub fn nb_transform(
    params: &DerivedParams,
    cfg: &SystemConfig,
    n_bs: u32,
) -> Result<DerivedParams> {
    if n_bs < 1 {
        return Err(Error::InvalidConfig("n_bs must be >= 1".into()));
    }
    with_bs_antennas(cfg, params.alpha, params.beta, n_bs)
}

/// `((1 - eps)^2 gamma, (1 + eps)^2 gamma)`.
pub fn direct_link_bounds(gamma: f64, epsilon: f64) -> Result<(f64, f64)> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(domain("epsilon", epsilon));
    }
    if !(gamma >= 0.0) {
        return Err(domain("gamma", gamma));
    }
    Ok((
        (1.0 - epsilon).powi(2) * gamma,
        (1.0 + epsilon).powi(2) * gamma,
    ))
}
