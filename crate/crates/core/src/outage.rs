//! Semi-analytical outage probability.
//!
//! Two engines share the thresholds `A_k^2 < (2^R - 1)(p1 B_k^2 + p2)`:
//!
//! * [`outage_bdma`] integrates the block-correlated model. Ports inside a
//!   block are conditionally independent given the block's common
//!   components `(r_b, s_b)`, so each block reduces to a 2-D outer integral
//!   of `G(r_b, s_b)^{L_b}` with a 1-D inner integral `G`.
//! * [`outage_iae`] is the fully-correlated-block limit: `B` independent
//!   effective ports, one 1-D integral raised to the power `B`.

use rayon::prelude::*;

use crate::channel::{snr_threshold, DerivedParams, SystemConfig};
use crate::corrmodel::BlockPartition;
use crate::error::{domain, Error, Result};
use crate::mathfn::quad::check_refinement;
use crate::mathfn::{marcum_p1, GaussLegendre, Law, Rician, ScaledNcChi, ScaledNcx2};

pub use crate::mathfn::QuadratureSpec;

/// Law of `||h_k||^2` in the fully-correlated limit: `alpha/(2(K+1))` times
/// a noncentral chi-square with `2M` degrees of freedom and noncentrality
/// `2KM`. Its mean is `alpha M`.
pub fn gbar_law(params: &DerivedParams) -> Result<ScaledNcx2> {
    let k = params.rician_k;
    let m = params.m_elements as f64;
    ScaledNcx2::new(
        params.alpha / (2.0 * (k + 1.0)),
        2 * params.m_elements as u32,
        2.0 * k * m,
    )
}

/// Density of `||h_k||^2`, written out directly:
/// `((K+1)/alpha) e^{-(s + alpha K M/(K+1))(K+1)/alpha}
///  (s/(alpha K M/(K+1)))^{(M-1)/2} I_{M-1}(sqrt(4K(K+1)M s/alpha))`.
pub fn gbar(s: f64, params: &DerivedParams) -> f64 {
    if s < 0.0 {
        return 0.0;
    }
    let k = params.rician_k;
    let m = params.m_elements;
    let mf = m as f64;
    let c = (k + 1.0) / params.alpha;
    if k == 0.0 {
        if s == 0.0 {
            return if m == 1 { c } else { 0.0 };
        }
        let ln = c.ln() + (mf - 1.0) * (c * s).ln() - c * s - statrs::function::gamma::ln_gamma(mf);
        return ln.exp();
    }
    let km = k * mf;
    if s == 0.0 {
        return if m == 1 { c * (-km).exp() } else { 0.0 };
    }
    let t = (4.0 * km * c * s).sqrt();
    let ln = c.ln() - c * s - km
        + 0.5 * (mf - 1.0) * (c * s / km).ln()
        + crate::mathfn::bessel_i_scaled((m - 1) as u32, t).ln()
        + t;
    ln.exp()
}

fn check_rate(rate: f64) -> Result<()> {
    if rate >= 0.0 {
        Ok(())
    } else {
        Err(domain("rate", rate))
    }
}

/// Quadrature of the single-block outage `F(x)` of the fully-correlated
/// model as a function of the SNR target `x = 2^R - 1`:
/// `F(x) = int P_1(a, sqrt(x (p1_bar s + p2_bar))) gbar(s) ds`.
#[derive(Debug, Clone)]
pub struct IaeKernel {
    a: f64,
    /// `(p1_bar s_i + p2_bar, w_i gbar(s_i))`
    nodes: Vec<(f64, f64)>,
    blocks: usize,
}

impl IaeKernel {
    pub fn new(
        params: &DerivedParams,
        blocks: usize,
        nodes: usize,
        tail_mass: f64,
    ) -> Result<Self> {
        let law = gbar_law(params)?;
        let (lo, hi) = law.window(tail_mass);
        let rule = GaussLegendre::new(nodes);
        let nodes = rule
            .mapped(lo, hi)
            .into_iter()
            .map(|(s, w)| (params.p1_bar * s + params.p2_bar, w * gbar(s, params)))
            .collect();
        Ok(Self {
            a: params.los_amplitude(),
            nodes,
            blocks,
        })
    }

    /// Single effective-port outage at SNR target `x`.
    pub fn block_outage(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x.is_infinite() {
            return 1.0;
        }
        self.nodes
            .iter()
            .map(|&(q, w)| w * marcum_p1(self.a, (x * q).sqrt()))
            .sum::<f64>()
            .clamp(0.0, 1.0)
    }

    /// `F(x)^B`.
    pub fn outage(&self, x: f64) -> f64 {
        self.block_outage(x).powi(self.blocks as i32)
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }
}

/// Upper bound on the outage from `B` independent effective ports.
pub fn outage_iae(
    _cfg: &SystemConfig,
    params: &DerivedParams,
    partition: &BlockPartition,
    rate: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_rate(rate)?;
    quad.validate()?;
    let x = snr_threshold(rate);
    if x == 0.0 {
        return Ok(0.0);
    }
    let b = partition.block_count();
    let coarse = IaeKernel::new(params, b, quad.nodes_per_dim, quad.tail_mass)?.outage(x);
    let refined = IaeKernel::new(params, b, 2 * quad.nodes_per_dim, quad.tail_mass)?.outage(x);
    check_refinement("outage_iae", coarse, refined, quad)
}

/// Outage of the block-correlated model.
pub fn outage_bdma(
    cfg: &SystemConfig,
    params: &DerivedParams,
    partition: &BlockPartition,
    rate: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    check_rate(rate)?;
    quad.validate()?;
    if !(cfg.mu_sq > 0.0 && cfg.mu_sq < 1.0) {
        return Err(Error::InvalidConfig(format!(
            "mu_sq {} outside (0, 1)",
            cfg.mu_sq
        )));
    }
    if snr_threshold(rate) == 0.0 {
        return Ok(0.0);
    }
    let coarse = bdma_eval(
        cfg.mu_sq,
        params,
        partition,
        rate,
        quad.nodes_per_dim,
        quad.inner_nodes,
        quad.tail_mass,
    )?;
    let fine = bdma_eval(
        cfg.mu_sq,
        params,
        partition,
        rate,
        2 * quad.nodes_per_dim,
        2 * quad.inner_nodes,
        quad.tail_mass,
    )?;
    check_refinement("outage_bdma", coarse, fine, quad)
}

/// Laws and constants of the factorized block integral.
struct BdmaLaws {
    /// `r_b = |common cascade|`
    rician: Rician,
    /// `s_b = ||common part of h_k||`
    common_norm: ScaledNcChi,
    /// scale of `||h_k||^2` given `s_b`
    cond_scale: f64,
    half_dof: u32,
    /// `sqrt(2 / (sigma_bar^2 (1 - mu^2)))`
    c: f64,
}

impl BdmaLaws {
    fn new(mu_sq: f64, params: &DerivedParams) -> Result<Self> {
        let k = params.rician_k;
        let m = params.m_elements as f64;
        let mu = mu_sq.sqrt();
        Ok(Self {
            rician: Rician::new(params.eta_abs, (0.5 * params.sigma_bar_sq * mu_sq).sqrt())?,
            common_norm: ScaledNcChi::new(
                mu * (params.alpha / (2.0 * (k + 1.0))).sqrt(),
                2 * params.m_elements as u32,
                (2.0 * k * m).sqrt() / mu,
            )?,
            cond_scale: params.alpha * (1.0 - mu_sq) / (2.0 * (k + 1.0)),
            half_dof: params.m_elements as u32,
            c: (2.0 / (params.sigma_bar_sq * (1.0 - mu_sq))).sqrt(),
        })
    }
}

fn bdma_eval(
    mu_sq: f64,
    params: &DerivedParams,
    partition: &BlockPartition,
    rate: f64,
    outer: usize,
    inner: usize,
    tail: f64,
) -> Result<f64> {
    let laws = BdmaLaws::new(mu_sq, params)?;
    let p1 = params.p1_at(rate);
    let p2 = params.p2_at(rate);

    let (r_lo, r_hi) = laws.rician.window(tail);
    let (s_lo, s_hi) = laws.common_norm.window(tail);
    let outer_rule = GaussLegendre::new(outer);
    let inner_rule = GaussLegendre::new(inner);
    let r_nodes: Vec<(f64, f64)> = outer_rule
        .mapped(r_lo, r_hi)
        .into_iter()
        .map(|(r, w)| (laws.c * r, w * laws.rician.pdf(r)))
        .collect();
    let s_nodes: Vec<(f64, f64)> = outer_rule
        .mapped(s_lo, s_hi)
        .into_iter()
        .map(|(s, w)| (s, w * laws.common_norm.pdf(s)))
        .collect();

    // g_cols[j][i] = G(r_i, s_j)
    let g_cols: Vec<Vec<f64>> = s_nodes
        .par_iter()
        .map(|&(s_b, _)| -> Result<Vec<f64>> {
            let nc = s_b * s_b / laws.cond_scale;
            let cond = ScaledNcx2 {
                scale: laws.cond_scale,
                half_dof: laws.half_dof,
                nc,
            };
            let (lo, hi) = cond.window(tail);
            let pts: Vec<(f64, f64)> = inner_rule
                .mapped(lo, hi)
                .into_iter()
                .map(|(s, w)| (laws.c * (p1 * s + p2).sqrt(), w * cond.pdf(s)))
                .collect();
            Ok(r_nodes
                .iter()
                .map(|&(cr, _)| {
                    pts.iter()
                        .map(|&(b, w)| w * marcum_p1(cr, b))
                        .sum::<f64>()
                        .clamp(0.0, 1.0)
                })
                .collect())
        })
        .collect::<Result<_>>()?;

    let mut total = 1.0;
    for &l in partition.block_sizes() {
        let mut acc = 0.0;
        for (col, &(_, ws)) in g_cols.iter().zip(&s_nodes) {
            let mut inner_acc = 0.0;
            for (g, &(_, wr)) in col.iter().zip(&r_nodes) {
                inner_acc += wr * g.powi(l as i32);
            }
            acc += ws * inner_acc;
        }
        total *= acc.clamp(0.0, 1.0);
    }
    Ok(total)
}
