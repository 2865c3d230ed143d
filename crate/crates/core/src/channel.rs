//! System configuration, derived link quantities and channel sampling.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::corrmodel::{BlockPartition, CorrelationSpec};
use crate::error::{Error, Result};

/// Seed of the fixed line-of-sight phase draw.
const LOS_SEED: u64 = 0x5EED_0F_105;

/// Physical and system parameters, powers in watts.
///
/// The JSON form (see [`SystemConfigFile`]) carries powers in dBm and the
/// amplification cap in dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SystemConfigFile", into = "SystemConfigFile")]
pub struct SystemConfig {
    pub m_elements: usize,
    pub n_ports: usize,
    /// Aperture in wavelengths.
    pub aperture: f64,
    pub rician_k: f64,
    pub mu_sq: f64,
    pub tx_power: f64,
    pub aris_budget: f64,
    pub noise_aris: f64,
    pub noise_mu: f64,
    pub rho_max_sq: f64,
    pub pos_bs: [f64; 3],
    pub pos_aris: [f64; 3],
    pub pos_mu: [f64; 3],
    pub ple_aris_mu: f64,
    pub ple_bs_aris: f64,
    pub ref_loss_db: f64,
    pub rate_min: f64,
    pub rate_max: f64,
}

/// On-disk form of [`SystemConfig`]: same field names, powers in dBm,
/// `rho_max_sq` in dB. Missing fields take the defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SystemConfigFile {
    pub m_elements: usize,
    pub n_ports: usize,
    pub aperture: f64,
    pub rician_k: f64,
    pub mu_sq: f64,
    pub tx_power: f64,
    pub aris_budget: f64,
    pub noise_aris: f64,
    pub noise_mu: f64,
    pub rho_max_sq: f64,
    pub pos_bs: [f64; 3],
    pub pos_aris: [f64; 3],
    pub pos_mu: [f64; 3],
    pub ple_aris_mu: f64,
    pub ple_bs_aris: f64,
    pub ref_loss_db: f64,
    pub rate_min: f64,
    pub rate_max: f64,
}

impl Default for SystemConfigFile {
    fn default() -> Self {
        SystemConfig::default().into()
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(w: f64) -> f64 {
    10.0 * w.log10() + 30.0
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

impl TryFrom<SystemConfigFile> for SystemConfig {
    type Error = Error;

    fn try_from(f: SystemConfigFile) -> Result<Self> {
        let cfg = SystemConfig {
            m_elements: f.m_elements,
            n_ports: f.n_ports,
            aperture: f.aperture,
            rician_k: f.rician_k,
            mu_sq: f.mu_sq,
            tx_power: dbm_to_watts(f.tx_power),
            aris_budget: dbm_to_watts(f.aris_budget),
            noise_aris: dbm_to_watts(f.noise_aris),
            noise_mu: dbm_to_watts(f.noise_mu),
            rho_max_sq: db_to_linear(f.rho_max_sq),
            pos_bs: f.pos_bs,
            pos_aris: f.pos_aris,
            pos_mu: f.pos_mu,
            ple_aris_mu: f.ple_aris_mu,
            ple_bs_aris: f.ple_bs_aris,
            ref_loss_db: f.ref_loss_db,
            rate_min: f.rate_min,
            rate_max: f.rate_max,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

impl From<SystemConfig> for SystemConfigFile {
    fn from(c: SystemConfig) -> Self {
        SystemConfigFile {
            m_elements: c.m_elements,
            n_ports: c.n_ports,
            aperture: c.aperture,
            rician_k: c.rician_k,
            mu_sq: c.mu_sq,
            tx_power: watts_to_dbm(c.tx_power),
            aris_budget: watts_to_dbm(c.aris_budget),
            noise_aris: watts_to_dbm(c.noise_aris),
            noise_mu: watts_to_dbm(c.noise_mu),
            rho_max_sq: linear_to_db(c.rho_max_sq),
            pos_bs: c.pos_bs,
            pos_aris: c.pos_aris,
            pos_mu: c.pos_mu,
            ple_aris_mu: c.ple_aris_mu,
            ple_bs_aris: c.ple_bs_aris,
            ref_loss_db: c.ref_loss_db,
            rate_min: c.rate_min,
            rate_max: c.rate_max,
        }
    }
}

impl Default for SystemConfig {
    /// Reference scenario. The reference loss and the BS-surface exponent
    /// are calibrated so the rate search lands on the expected interval and
    /// gap figures; override them for other geometries.
    fn default() -> Self {
        Self {
            m_elements: 4,
            n_ports: 100,
            aperture: 5.0,
            rician_k: 1.0,
            mu_sq: 0.97,
            tx_power: dbm_to_watts(10.0),
            aris_budget: dbm_to_watts(10.0),
            noise_aris: dbm_to_watts(-104.0),
            noise_mu: dbm_to_watts(-104.0),
            rho_max_sq: db_to_linear(40.0),
            pos_bs: [0.0, 0.0, 5.0],
            pos_aris: [15.0, 15.0, 5.0],
            pos_mu: [55.0, 0.0, 0.0],
            ple_aris_mu: 2.2,
            ple_bs_aris: 7.1,
            ref_loss_db: -8.6,
            rate_min: 0.0,
            rate_max: 6.0,
        }
    }
}

impl SystemConfig {
    pub fn from_json(s: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.m_elements < 1 {
            return bad("m_elements must be >= 1".into());
        }
        if self.m_elements > 4096 {
            return bad(format!(
                "m_elements {} is unreasonably large",
                self.m_elements
            ));
        }
        CorrelationSpec::new(self.n_ports, self.aperture, self.mu_sq)?;
        if !(self.rician_k >= 0.0 && self.rician_k.is_finite()) {
            return bad(format!("rician_k must be >= 0, got {}", self.rician_k));
        }
        for (name, v) in [
            ("tx_power", self.tx_power),
            ("aris_budget", self.aris_budget),
            ("noise_aris", self.noise_aris),
            ("noise_mu", self.noise_mu),
            ("rho_max_sq", self.rho_max_sq),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive and finite, got {v}"));
            }
        }
        for (name, v) in [
            ("ple_aris_mu", self.ple_aris_mu),
            ("ple_bs_aris", self.ple_bs_aris),
            ("ref_loss_db", self.ref_loss_db),
        ] {
            if !v.is_finite() {
                return bad(format!("{name} must be finite"));
            }
        }
        if !(self.rate_min >= 0.0 && self.rate_min <= self.rate_max && self.rate_max.is_finite()) {
            return bad(format!(
                "need 0 <= rate_min <= rate_max, got [{}, {}]",
                self.rate_min, self.rate_max
            ));
        }
        Ok(())
    }

    pub fn correlation_spec(&self) -> CorrelationSpec {
        CorrelationSpec {
            n_ports: self.n_ports,
            aperture: self.aperture,
            mu_sq: self.mu_sq,
        }
    }
}

/// Quantities derived from a [`SystemConfig`].
///
/// `p1`, `p2` are the outage thresholds per unit SNR target: at rate `R`
/// the outage event is `A^2 < (2^R - 1)(p1 B^2 + p2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedParams {
    pub alpha: f64,
    pub beta: f64,
    pub sigma_bar_sq: f64,
    pub rho_star: f64,
    pub eta_abs: f64,
    pub a: f64,
    pub p1: f64,
    pub p2: f64,
    pub p1_bar: f64,
    pub p2_bar: f64,
    pub m_elements: usize,
    pub rician_k: f64,
    pub tx_power: f64,
    pub noise_aris: f64,
    pub noise_mu: f64,
    /// BS antennas folded into the effective transmit power.
    pub n_bs: u32,
}

impl DerivedParams {
    pub fn p1_at(&self, rate: f64) -> f64 {
        snr_threshold(rate) * self.p1
    }

    pub fn p2_at(&self, rate: f64) -> f64 {
        snr_threshold(rate) * self.p2
    }

    /// `P N_b`.
    pub fn effective_power(&self) -> f64 {
        self.tx_power * f64::from(self.n_bs)
    }

    /// `sqrt(2 / sigma_bar^2) |eta|`, the normalized line-of-sight amplitude.
    pub fn los_amplitude(&self) -> f64 {
        (2.0 / self.sigma_bar_sq).sqrt() * self.eta_abs
    }
}

/// `2^R - 1`.
pub fn snr_threshold(rate: f64) -> f64 {
    rate.exp2() - 1.0
}

fn distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// `(alpha, beta)`: surface-to-user and BS-to-surface path gains.
pub fn path_gains(cfg: &SystemConfig) -> Result<(f64, f64)> {
    let d_am = distance(&cfg.pos_aris, &cfg.pos_mu);
    let d_ba = distance(&cfg.pos_bs, &cfg.pos_aris);
    if !(d_am > 0.0) || !(d_ba > 0.0) {
        return Err(Error::InvalidConfig(format!(
            "coincident nodes: d(ARIS,MU) = {d_am}, d(BS,ARIS) = {d_ba}"
        )));
    }
    let g0 = db_to_linear(cfg.ref_loss_db);
    Ok((
        g0 * d_am.powf(-cfg.ple_aris_mu),
        g0 * d_ba.powf(-cfg.ple_bs_aris),
    ))
}

/// Path gains, amplification, line-of-sight cascade and thresholds.
pub fn derive_params(cfg: &SystemConfig) -> Result<DerivedParams> {
    cfg.validate()?;
    let (alpha, beta) = path_gains(cfg)?;
    with_bs_antennas(cfg, alpha, beta, 1)
}

pub(crate) fn with_bs_antennas(
    cfg: &SystemConfig,
    alpha: f64,
    beta: f64,
    n_bs: u32,
) -> Result<DerivedParams> {
    if n_bs < 1 {
        return Err(Error::InvalidConfig("n_bs must be >= 1".into()));
    }
    let m = cfg.m_elements as f64;
    let k = cfg.rician_k;
    let p = cfg.tx_power * f64::from(n_bs);
    let rho_star = (cfg.aris_budget / (m * (p * beta + cfg.noise_aris)))
        .sqrt()
        .min(cfg.rho_max_sq.sqrt());
    let sigma_bar_sq = m * alpha * beta / (k + 1.0);
    let p1 = cfg.noise_aris / p;
    let p2 = cfg.noise_mu / (p * rho_star * rho_star);
    Ok(DerivedParams {
        alpha,
        beta,
        sigma_bar_sq,
        rho_star,
        eta_abs: sigma_bar_sq.sqrt() * (k * m).sqrt(),
        a: (2.0 * k * m).sqrt(),
        p1,
        p2,
        p1_bar: 2.0 * p1 / sigma_bar_sq,
        p2_bar: 2.0 * p2 / sigma_bar_sq,
        m_elements: cfg.m_elements,
        rician_k: k,
        tx_power: cfg.tx_power,
        noise_aris: cfg.noise_aris,
        noise_mu: cfg.noise_mu,
        n_bs,
    })
}

/// One channel realization.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSample {
    /// BS to surface, `sqrt(beta) * g_bar`.
    pub g: Vec<Complex64>,
    /// Shared line-of-sight direction, unit-modulus entries.
    pub h_bar: Vec<Complex64>,
    pub h_tilde_blocks: Vec<Vec<Complex64>>,
    pub port_innovations: Vec<Vec<Complex64>>,
    pub h_ports: Vec<Vec<Complex64>>,
}

/// Unit-modulus `(h_bar, g_bar)` with phases from a fixed seed.
pub fn los_directions(m: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(LOS_SEED);
    let tau = std::f64::consts::TAU;
    let h: Vec<_> = (0..m)
        .map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * tau))
        .collect();
    let g: Vec<_> = (0..m)
        .map(|_| Complex64::from_polar(1.0, rng.random::<f64>() * tau))
        .collect();
    (h, g)
}

/// Independent stream `stream` of the generator keyed by `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws channel realizations for a fixed configuration and partition.
#[derive(Debug, Clone)]
pub struct ChannelSampler {
    m: usize,
    port_block: Vec<usize>,
    n_blocks: usize,
    los: f64,
    nlos_std: f64,
    mu: f64,
    innov: f64,
    g: Vec<Complex64>,
    h_bar: Vec<Complex64>,
}

impl ChannelSampler {
    pub fn new(
        cfg: &SystemConfig,
        params: &DerivedParams,
        partition: &BlockPartition,
    ) -> Result<Self> {
        if partition.n_ports() != cfg.n_ports {
            return Err(Error::Partition(format!(
                "partition covers {} ports, config has {}",
                partition.n_ports(),
                cfg.n_ports
            )));
        }
        Self::with_mu_sq(cfg.m_elements, cfg.rician_k, cfg.mu_sq, params, partition)
    }

    /// Same model with an explicit `mu_sq` in `[0, 1]`; `1` gives identical
    /// ports inside each block.
    pub fn with_mu_sq(
        m: usize,
        rician_k: f64,
        mu_sq: f64,
        params: &DerivedParams,
        partition: &BlockPartition,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&mu_sq) {
            return Err(Error::InvalidConfig(format!(
                "mu_sq {mu_sq} outside [0, 1]"
            )));
        }
        let (h_bar, g_bar) = los_directions(m);
        let sb = params.beta.sqrt();
        Ok(Self {
            m,
            port_block: partition.port_blocks(),
            n_blocks: partition.block_count(),
            los: (params.alpha * rician_k / (rician_k + 1.0)).sqrt(),
            nlos_std: (params.alpha / (2.0 * (rician_k + 1.0))).sqrt(),
            mu: mu_sq.sqrt(),
            innov: (1.0 - mu_sq).sqrt(),
            g: g_bar.iter().map(|z| z * sb).collect(),
            h_bar,
        })
    }

    pub fn g(&self) -> &[Complex64] {
        &self.g
    }

    pub fn h_bar(&self) -> &[Complex64] {
        &self.h_bar
    }

    pub fn n_ports(&self) -> usize {
        self.port_block.len()
    }

    fn cn<R: Rng>(&self, rng: &mut R) -> Complex64 {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re * self.nlos_std, im * self.nlos_std)
    }

    /// Draws one realization into `out`, reusing its buffers.
    pub fn sample_into<R: Rng>(&self, rng: &mut R, out: &mut ChannelSample) {
        let m = self.m;
        let n = self.port_block.len();
        out.g.clone_from(&self.g);
        out.h_bar.clone_from(&self.h_bar);
        out.h_tilde_blocks.resize(self.n_blocks, Vec::new());
        out.port_innovations.resize(n, Vec::new());
        out.h_ports.resize(n, Vec::new());
        for v in &mut out.h_tilde_blocks {
            v.clear();
            for _ in 0..m {
                v.push(self.cn(rng));
            }
        }
        for k in 0..n {
            let e = &mut out.port_innovations[k];
            e.clear();
            for _ in 0..m {
                e.push(self.cn(rng));
            }
            let ht = &out.h_tilde_blocks[self.port_block[k]];
            let h = &mut out.h_ports[k];
            h.clear();
            for i in 0..m {
                h.push(
                    self.h_bar[i] * self.los
                        + ht[i] * self.mu
                        + out.port_innovations[k][i] * self.innov,
                );
            }
        }
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> ChannelSample {
        let mut s = ChannelSample::empty();
        self.sample_into(rng, &mut s);
        s
    }
}

impl ChannelSample {
    pub fn empty() -> Self {
        Self {
            g: Vec::new(),
            h_bar: Vec::new(),
            h_tilde_blocks: Vec::new(),
            port_innovations: Vec::new(),
            h_ports: Vec::new(),
        }
    }
}

/// One realization from stream `stream` of `seed`.
pub fn sample_channel(
    cfg: &SystemConfig,
    partition: &BlockPartition,
    seed: u64,
    stream: u64,
) -> Result<ChannelSample> {
    let params = derive_params(cfg)?;
    let sampler = ChannelSampler::new(cfg, &params, partition)?;
    Ok(sampler.sample(&mut stream_rng(seed, stream)))
}
