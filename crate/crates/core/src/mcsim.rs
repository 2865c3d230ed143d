//! Monte-Carlo outage and throughput.
//!
//! Trial `t` of a run with seed `s` always draws from stream `t` of the
//! ChaCha generator keyed by `s`, so results do not depend on how trials
//! are spread across threads.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{
    snr_threshold, stream_rng, ChannelSample, ChannelSampler, DerivedParams, SystemConfig,
};
use crate::corrmodel::BlockPartition;
use crate::ctrl::{optimal_phases, perfect_csi_config};
use crate::error::{domain, Error, Result};

/// Receiver/surface variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimMode {
    /// Fluid antenna behind the active surface, phases from statistical CSI.
    #[serde(rename = "FAS_ARIS")]
    FasAris,
    /// Fluid antenna behind a passive surface.
    #[serde(rename = "FAS_PRIS")]
    FasPris,
    /// Active surface, fixed single port.
    #[serde(rename = "SINGLE_FPA")]
    SingleFpa,
    /// Active surface with per-realization phases and port.
    #[serde(rename = "PERFECT_CSI")]
    PerfectCsi,
}

impl SimMode {
    pub const ALL: [SimMode; 4] = [
        SimMode::FasAris,
        SimMode::FasPris,
        SimMode::SingleFpa,
        SimMode::PerfectCsi,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            SimMode::FasAris => "FAS_ARIS",
            SimMode::FasPris => "FAS_PRIS",
            SimMode::SingleFpa => "SINGLE_FPA",
            SimMode::PerfectCsi => "PERFECT_CSI",
        }
    }
}

impl std::fmt::Display for SimMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Empirical estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub value: f64,
    pub trials: usize,
    pub std_err: f64,
}

impl McEstimate {
    /// Outage estimate from a vector of per-trial best SNRs.
    pub fn outage_from(max_snr: &[f64], rate: f64) -> Self {
        let thr = snr_threshold(rate);
        let n = max_snr.len();
        let hits = max_snr.iter().filter(|&&g| g < thr).count();
        let p = hits as f64 / n as f64;
        Self {
            value: p,
            trials: n,
            std_err: (p * (1.0 - p) / n as f64).sqrt(),
        }
    }

    /// `R (1 - outage)`.
    pub fn throughput_from(max_snr: &[f64], rate: f64) -> Self {
        let o = Self::outage_from(max_snr, rate);
        Self {
            value: rate * (1.0 - o.value),
            trials: o.trials,
            std_err: rate * o.std_err,
        }
    }
}

/// `(A_k, B_k^2)` helper with the surface phases folded into `g`.
fn weighted_g(theta: &[f64], g: &[Complex64]) -> Vec<Complex64> {
    theta
        .iter()
        .zip(g)
        .map(|(&t, gm)| Complex64::from_polar(1.0, t) * gm)
        .collect()
}

fn gains(h: &[Complex64], v: &[Complex64]) -> (f64, f64) {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut nrm = 0.0;
    for (hm, vm) in h.iter().zip(v) {
        acc += hm.conj() * vm;
        nrm += hm.norm_sqr();
    }
    (acc.norm_sqr(), nrm)
}

fn aris_snr(params: &DerivedParams, a2: f64, b2: f64) -> f64 {
    let rho2 = params.rho_star * params.rho_star;
    params.effective_power() * a2 / (b2 * params.noise_aris + params.noise_mu / rho2)
}

/// Per-port SNRs of one realization under `mode`.
///
/// `SINGLE_FPA` returns only the first port. `PERFECT_CSI` aligns the
/// surface to the port with the largest `sum_m |h_km||g_m|` and returns
/// every port's SNR under that alignment.
pub fn snr_per_port(
    sample: &ChannelSample,
    params: &DerivedParams,
    mode: SimMode,
) -> Result<Vec<f64>> {
    let theta = match mode {
        SimMode::PerfectCsi => perfect_csi_config(sample)?.1,
        _ => optimal_phases(&sample.h_bar, &sample.g)?,
    };
    let v = weighted_g(&theta, &sample.g);
    let ports = match mode {
        SimMode::SingleFpa => &sample.h_ports[..1],
        _ => &sample.h_ports[..],
    };
    Ok(ports
        .iter()
        .map(|h| {
            let (a2, b2) = gains(h, &v);
            match mode {
                SimMode::FasPris => params.effective_power() * a2 / params.noise_aris,
                _ => aris_snr(params, a2, b2),
            }
        })
        .collect())
}

/// Best per-port SNR of each trial, trials `0..trials` of `seed`.
pub fn mc_max_snr(
    cfg: &SystemConfig,
    params: &DerivedParams,
    partition: &BlockPartition,
    mode: SimMode,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    let sampler = ChannelSampler::new(cfg, params, partition)?;
    max_snr_with(&sampler, params, mode, trials, seed)
}

/// As [`mc_max_snr`] with a caller-built sampler.
pub fn max_snr_with(
    sampler: &ChannelSampler,
    params: &DerivedParams,
    mode: SimMode,
    trials: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    let stat_theta = optimal_phases(sampler.h_bar(), sampler.g())?;
    let stat_v = weighted_g(&stat_theta, sampler.g());
    const CHUNK: usize = 256;
    let chunks: Vec<Vec<f64>> = (0..trials.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut buf = ChannelSample::empty();
            let lo = c * CHUNK;
            let hi = (lo + CHUNK).min(trials);
            (lo..hi)
                .map(|t| {
                    let mut rng = stream_rng(seed, t as u64);
                    sampler.sample_into(&mut rng, &mut buf);
                    best_snr(&buf, params, mode, &stat_v)
                })
                .collect()
        })
        .collect();
    Ok(chunks.concat())
}

fn best_snr(s: &ChannelSample, params: &DerivedParams, mode: SimMode, stat_v: &[Complex64]) -> f64 {
    let ports = match mode {
        SimMode::SingleFpa => &s.h_ports[..1],
        _ => &s.h_ports[..],
    };
    let owned;
    let v = if mode == SimMode::PerfectCsi {
        let theta = perfect_csi_config(s).map(|x| x.1).unwrap_or_default();
        owned = weighted_g(&theta, &s.g);
        &owned[..]
    } else {
        stat_v
    };
    ports
        .iter()
        .map(|h| {
            let (a2, b2) = gains(h, v);
            match mode {
                SimMode::FasPris => params.effective_power() * a2 / params.noise_aris,
                _ => aris_snr(params, a2, b2),
            }
        })
        .fold(0.0, f64::max)
}

/// Fraction of trials with `log2(1 + max_k gamma_k) < rate`.
pub fn mc_outage(
    cfg: &SystemConfig,
    params: &DerivedParams,
    partition: &BlockPartition,
    rate: f64,
    mode: SimMode,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    if !(rate >= 0.0) {
        return Err(domain("rate", rate));
    }
    let v = mc_max_snr(cfg, params, partition, mode, trials, seed)?;
    Ok(McEstimate::outage_from(&v, rate))
}

/// `R (1 - outage)` from the same trials as [`mc_outage`].
pub fn mc_throughput(
    cfg: &SystemConfig,
    params: &DerivedParams,
    partition: &BlockPartition,
    rate: f64,
    mode: SimMode,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    if !(rate >= 0.0) {
        return Err(domain("rate", rate));
    }
    let v = mc_max_snr(cfg, params, partition, mode, trials, seed)?;
    Ok(McEstimate::throughput_from(&v, rate))
}
