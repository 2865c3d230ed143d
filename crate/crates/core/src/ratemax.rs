//! Rate selection against the independent-block outage surrogate.
//!
//! With `x = 2^R - 1` the surrogate throughput `T(x) = log2(1+x) (1 - F(x)^B)`
//! is searched in three regions:
//!
//! * `[0, L0]`, where `T` is concave: either `L0` itself or a gradient
//!   ascent;
//! * `[L1, inf)`, where `T` is quasiconcave or decreasing and the sign of
//!   the slope follows `D_Omega`, whose root is found by Newton's method;
//! * `[L0, L1]`, searched on a log-spaced grid and refined by golden section.

use std::f64::consts::LN_2;
use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{snr_threshold, DerivedParams, SystemConfig};
use crate::corrmodel::BlockPartition;
use crate::error::{domain, Error, Result};
use crate::mathfn::{psi_inv, GaussLegendre, Law};
use crate::outage::{gbar, gbar_law, outage_iae, IaeKernel, QuadratureSpec};

/// Knobs of [`optimize_rate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RateSearchOptions {
    /// Upper-tail mass of `gbar` above the truncation point `U`.
    pub u_tail: f64,
    /// Where the weight inside `Omega` is evaluated. `None` uses `L1`.
    pub x_ref: Option<f64>,
    /// `M_Lambda`.
    pub grid_points: usize,
    /// Width, in bits/s/Hz, at which golden-section refinement stops.
    pub golden_tol: f64,
    /// `N_g`, counted in surrogate evaluations.
    pub ascent_max_iter: usize,
    pub ascent_tol: f64,
    /// `N_n`.
    pub newton_max_iter: usize,
    pub quad: QuadratureSpec,
}

impl Default for RateSearchOptions {
    fn default() -> Self {
        Self {
            u_tail: 0.17,
            x_ref: None,
            grid_points: 200,
            golden_tol: 1e-6,
            ascent_max_iter: 200,
            ascent_tol: 1e-8,
            newton_max_iter: 50,
            quad: QuadratureSpec::default(),
        }
    }
}

impl RateSearchOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.u_tail > 0.0 && self.u_tail < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "u_tail must lie in (0, 1), got {}",
                self.u_tail
            )));
        }
        if let Some(x) = self.x_ref {
            if !(x > 0.0 && x.is_finite()) {
                return Err(domain("x_ref", x));
            }
        }
        if self.grid_points < 2 {
            return Err(Error::InvalidConfig("grid_points must be >= 2".into()));
        }
        if !(self.golden_tol > 0.0) || !(self.ascent_tol > 0.0) {
            return Err(Error::InvalidConfig("tolerances must be positive".into()));
        }
        if self.newton_max_iter == 0 {
            return Err(Error::InvalidConfig("newton_max_iter must be >= 1".into()));
        }
        self.quad.validate()
    }

    /// Cap on surrogate evaluations of one run.
    pub fn eval_budget(&self) -> usize {
        self.grid_points + self.ascent_max_iter + self.newton_max_iter + 16
    }
}

/// Outcome of [`optimize_rate`]. Rates in bits/s/Hz, thresholds in the SNR
/// domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSearchResult {
    pub lambda0: f64,
    pub lambda1: f64,
    pub u_cap: f64,
    pub omega: f64,
    /// Root of `D_Omega`, absent when the slope never changes sign.
    pub x_omega: Option<f64>,
    pub x_star: f64,
    pub x_star2: f64,
    pub x_star3: f64,
    pub r_star: f64,
    pub r_star2: f64,
    pub r_star3: f64,
    /// Best candidate before clamping.
    pub r_opt: f64,
    pub r_final: f64,
    /// `T` at `r_star`, `r_star2`, `r_star3`.
    pub t_at_candidates: [f64; 3],
    pub t_final: f64,
    pub evaluations: usize,
    pub eval_budget: usize,
}

/// `R (1 - P_out(R))` with the surrogate outage.
pub fn throughput(
    rate: f64,
    cfg: &SystemConfig,
    params: &DerivedParams,
    partition: &BlockPartition,
    quad: &QuadratureSpec,
) -> Result<f64> {
    if rate == 0.0 {
        return Ok(0.0);
    }
    let p = outage_iae(cfg, params, partition, rate, quad)?;
    Ok(rate * (1.0 - p))
}

/// `((1/a) psi^{-1}(1/a^2))^2`, shared by both thresholds.
fn psi_factor(params: &DerivedParams) -> Result<f64> {
    let a = params.los_amplitude();
    let a2 = a * a;
    if !(a2 > 2.0) {
        return Err(Error::InvalidConfig(format!(
            "a^2 = 2KM = {a2} must exceed 2; increase K or M"
        )));
    }
    let t = psi_inv(1.0 / a2)?;
    Ok((t / a).powi(2))
}

/// `(1-u_tail)` quantile of `gbar`.
pub fn u_cap(params: &DerivedParams, u_tail: f64) -> Result<f64> {
    if !(u_tail > 0.0 && u_tail < 1.0) {
        return Err(domain("u_tail", u_tail));
    }
    Ok(gbar_law(params)?.quantile_upper(u_tail))
}

/// Upper end of the concave region: `psi_factor / (p1_bar U + p2_bar)`.
pub fn lambda0(params: &DerivedParams, u_cap: f64) -> Result<f64> {
    if !(u_cap > 0.0) {
        return Err(domain("U", u_cap));
    }
    Ok(psi_factor(params)? / (params.p1_bar * u_cap + params.p2_bar))
}

/// Start of the quasiconcave region: `psi_factor / p2_bar`.
pub fn lambda1(params: &DerivedParams) -> Result<f64> {
    Ok(psi_factor(params)? / params.p2_bar)
}

/// Mean of `sqrt(p1_bar s + p2_bar)` under the normalized weight
/// `Psi(s, x) = 1/2 (sqrt(q)/a)^{1/2} exp(-(sqrt(q x) - a)^2 / 2) gbar(s)`,
/// `q = p1_bar s + p2_bar`.
pub fn omega(params: &DerivedParams, x_ref: f64, quad: &QuadratureSpec) -> Result<f64> {
    if !(x_ref > 0.0 && x_ref.is_finite()) {
        return Err(domain("x_ref", x_ref));
    }
    quad.validate()?;
    if params.p1_bar == 0.0 {
        return Ok(params.p2_bar.sqrt());
    }
    let (lo, hi) = gbar_law(params)?.window(quad.tail_mass);
    let coarse = omega_with(params, x_ref, lo, hi, quad.nodes_per_dim);
    let refined = omega_with(params, x_ref, lo, hi, 2 * quad.nodes_per_dim);
    if refined.is_finite() && (coarse - refined).abs() <= quad.abs_tol * refined {
        Ok(refined)
    } else {
        Err(Error::Quadrature {
            stage: "omega",
            coarse,
            refined,
            nodes: 2 * quad.nodes_per_dim,
        })
    }
}

fn omega_with(params: &DerivedParams, x: f64, lo: f64, hi: f64, nodes: usize) -> f64 {
    let a = params.los_amplitude();
    let pts: Vec<(f64, f64)> = GaussLegendre::new(nodes)
        .mapped(lo, hi)
        .into_iter()
        .map(|(s, w)| {
            let q = params.p1_bar * s + params.p2_bar;
            let d = (q * x).sqrt() - a;
            let ln_psi = 0.25 * q.ln() - 0.5 * d * d + gbar(s, params).ln();
            (q.sqrt(), w.ln() + ln_psi)
        })
        .collect();
    let top = pts.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let (mut num, mut den) = (0.0, 0.0);
    for (v, l) in pts {
        let w = (l - top).exp();
        num += w * v;
        den += w;
    }
    num / den
}

/// `D_Omega(x)`, whose sign is that of the high-SNR slope of `T`.
pub fn d_omega(x: f64, omega: f64) -> f64 {
    let l = (1.0 + x).log2();
    x.powf(0.25) / ((1.0 + x) * LN_2) + 0.25 * x.powf(-0.75) * l
        - omega / (2.0 * std::f64::consts::PI).sqrt() * x.powf(-0.25) * l
}

/// `d D_Omega / dx`.
pub fn d_omega_prime(x: f64, omega: f64) -> f64 {
    let l = (1.0 + x).log2();
    let dl = 1.0 / ((1.0 + x) * LN_2);
    let c = omega / (2.0 * std::f64::consts::PI).sqrt();
    (0.25 * x.powf(-0.75) / (1.0 + x) - x.powf(0.25) / (1.0 + x).powi(2)) / LN_2
        - 3.0 / 16.0 * x.powf(-1.75) * l
        + 0.25 * x.powf(-0.75) * dl
        - c * (-0.25 * x.powf(-1.25) * l + x.powf(-0.25) * dl)
}

/// Root of `D_Omega` in `[lo, hi]`: Newton steps, with a geometric
/// bisection step whenever Newton leaves the sign-change bracket.
///
/// Fails with [`Error::NoSignChange`] unless `D_Omega(lo) > 0 > D_Omega(hi)`;
/// the caller then treats the region as decreasing.
pub fn newton_root_domega(omega: f64, lo: f64, hi: f64, max_iter: usize) -> Result<f64> {
    if !(omega > 0.0) {
        return Err(domain("omega", omega));
    }
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidConfig(format!("bad bracket [{lo}, {hi}]")));
    }
    if !(d_omega(lo, omega) > 0.0 && d_omega(hi, omega) < 0.0) {
        return Err(Error::NoSignChange { lo, hi });
    }
    let (mut lo, mut hi) = (lo, hi);
    let mut x = (lo * hi).sqrt();
    for _ in 0..max_iter {
        let d = d_omega(x, omega);
        if d == 0.0 {
            return Ok(x);
        }
        if d > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let step = x - d / d_omega_prime(x, omega);
        let next = if step > lo && step < hi {
            step
        } else {
            (lo * hi).sqrt()
        };
        if (next - x).abs() <= 1e-14 * x {
            return Ok(next);
        }
        x = next;
    }
    // Newton budget spent: finish on the bracket, which only shrinks.
    while hi - lo > 1e-14 * hi {
        let mid = 0.5 * (lo + hi);
        if d_omega(mid, omega) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Sign-change bracket of `D_Omega` found by doubling from `1e-8`.
pub fn domega_bracket(omega: f64) -> Option<(f64, f64)> {
    let mut x = 1e-8;
    while x < 1e300 {
        if d_omega(2.0 * x, omega) < 0.0 {
            return Some((x, 2.0 * x));
        }
        x *= 2.0;
    }
    None
}

/// Surrogate throughput in the SNR domain with an evaluation counter.
struct Surrogate {
    kernel: IaeKernel,
    evals: AtomicUsize,
}

impl Surrogate {
    fn t(&self, x: f64) -> f64 {
        self.evals.fetch_add(1, Ordering::Relaxed);
        if x <= 0.0 {
            return 0.0;
        }
        x.ln_1p() / LN_2 * (1.0 - self.kernel.outage(x))
    }

    fn count(&self) -> usize {
        self.evals.load(Ordering::Relaxed)
    }

    /// Central difference, one-sided at the origin.
    fn slope(&self, x: f64) -> f64 {
        let h = (1e-6 * x).max(1e-6);
        if x < h {
            (self.t(x + h) - self.t(x)) / h
        } else {
            (self.t(x + h) - self.t(x - h)) / (2.0 * h)
        }
    }
}

fn rate_of(x: f64) -> f64 {
    x.ln_1p() / LN_2
}

/// Maximizer of the concave `T` on `[0, hi]` given `T'(hi) < 0`.
fn ascent(f: &Surrogate, hi: f64, opts: &RateSearchOptions) -> f64 {
    let start = f.count();
    let spent = |f: &Surrogate| f.count() - start;
    let mut x = 0.5 * hi;
    let mut fx = f.t(x);
    let mut g = f.slope(x);
    let mut step = 0.25 * hi / g.abs().max(f64::MIN_POSITIVE);
    while spent(f) + 3 <= opts.ascent_max_iter {
        let y = (x + step * g).clamp(0.0, hi);
        let fy = f.t(y);
        if fy > fx {
            let moved = (y - x).abs();
            x = y;
            fx = fy;
            if moved <= opts.ascent_tol * x.max(1.0) {
                break;
            }
            g = f.slope(x);
            step *= 1.5;
        } else {
            step *= 0.5;
            if (step * g).abs() <= opts.ascent_tol * x.max(1.0) {
                break;
            }
        }
    }
    x
}

/// Grid over `[lo, hi]` in `ln x`, then golden section around the best
/// node. Returns the best point seen.
fn grid_golden(f: &Surrogate, lo: f64, hi: f64, opts: &RateSearchOptions) -> f64 {
    let n = opts.grid_points;
    let (ulo, uhi) = (lo.ln(), hi.ln());
    let du = (uhi - ulo) / (n - 1) as f64;
    let xs: Vec<f64> = (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                (ulo + du * i as f64).exp()
            }
        })
        .collect();
    let ts: Vec<f64> = xs.par_iter().map(|&x| f.t(x)).collect();
    let mut best = 0;
    for (i, &t) in ts.iter().enumerate() {
        if t > ts[best] {
            best = i;
        }
    }
    let (mut bx, mut bt) = (xs[best], ts[best]);

    let mut a = xs[best.saturating_sub(1)].ln();
    let mut b = xs[(best + 1).min(n - 1)].ln();
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f.t(c.exp()), f.t(d.exp()));
    while rate_of(b.exp()) - rate_of(a.exp()) > opts.golden_tol {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f.t(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f.t(d.exp());
        }
    }
    for (u, t) in [(c, fc), (d, fd)] {
        if t > bt {
            bx = u.exp();
            bt = t;
        }
    }
    bx
}

/// Three-region rate search against the surrogate outage. The winning
/// candidate is clamped to `[cfg.rate_min, cfg.rate_max]`.
pub fn optimize_rate(
    cfg: &SystemConfig,
    params: &DerivedParams,
    partition: &BlockPartition,
    opts: &RateSearchOptions,
) -> Result<RateSearchResult> {
    opts.validate()?;
    cfg.validate()?;
    let q = &opts.quad;
    let kernel = IaeKernel::new(
        params,
        partition.block_count(),
        2 * q.nodes_per_dim,
        q.tail_mass,
    )
    .map_err(Error::at("surrogate kernel"))?;
    let f = Surrogate {
        kernel,
        evals: AtomicUsize::new(0),
    };

    let u = u_cap(params, opts.u_tail).map_err(Error::at("truncation point"))?;
    let l0 = lambda0(params, u).map_err(Error::at("lambda0"))?;
    let l1 = lambda1(params).map_err(Error::at("lambda1"))?;

    let x1 = if f.slope(l0) >= 0.0 {
        l0
    } else {
        ascent(&f, l0, opts)
    };

    let om = omega(params, opts.x_ref.unwrap_or(l1), q).map_err(Error::at("omega"))?;
    let x_omega = match domega_bracket(om) {
        Some((lo, hi)) => match newton_root_domega(om, lo, hi, opts.newton_max_iter) {
            Ok(x) => Some(x),
            Err(Error::NoSignChange { .. }) => None,
            Err(e) => return Err(Error::at("newton")(e)),
        },
        None => None,
    };
    let x2 = x_omega.map_or(l1, |x| x.max(l1));

    let x3 = if l1 > l0 {
        grid_golden(&f, l0, l1, opts)
    } else {
        l0
    };

    let xs = [x1, x2, x3];
    let t_at = xs.map(|x| f.t(x));
    let mut best = 0;
    for i in 1..3 {
        if t_at[i] > t_at[best] {
            best = i;
        }
    }
    let r_opt = rate_of(xs[best]);
    let r_final = r_opt.clamp(cfg.rate_min, cfg.rate_max);
    let t_final = if r_final == r_opt {
        t_at[best]
    } else {
        f.t(snr_threshold(r_final))
    };

    Ok(RateSearchResult {
        lambda0: l0,
        lambda1: l1,
        u_cap: u,
        omega: om,
        x_omega,
        x_star: x1,
        x_star2: x2,
        x_star3: x3,
        r_star: rate_of(x1),
        r_star2: rate_of(x2),
        r_star3: rate_of(x3),
        r_opt,
        r_final,
        t_at_candidates: t_at,
        t_final,
        evaluations: f.count(),
        eval_budget: opts.eval_budget(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::derive_params;
    use crate::corrmodel::bdma_partition;

    fn setup() -> (SystemConfig, DerivedParams, BlockPartition) {
        let cfg = SystemConfig::default();
        let p = derive_params(&cfg).unwrap();
        let b = bdma_partition(&cfg.correlation_spec()).unwrap();
        (cfg, p, b)
    }

    fn t_check(p: &DerivedParams, b: &BlockPartition) -> impl Fn(f64) -> f64 {
        let k = IaeKernel::new(p, b.block_count(), 192, 1e-8).unwrap();
        move |x: f64| x.ln_1p() / LN_2 * (1.0 - k.outage(x))
    }

    #[test]
    fn thresholds_ratio_and_limits() {
        let (_, p, _) = setup();
        let u = 1e-4;
        let l0 = lambda0(&p, u).unwrap();
        let l1 = lambda1(&p).unwrap();
        assert!(l0 > 0.0 && l0 <= l1);
        let ratio = (p.p1_bar * u + p.p2_bar) / p.p2_bar;
        assert!((l1 / l0 / ratio - 1.0).abs() < 1e-13);
        assert!(lambda0(&p, 1e30).unwrap() < 1e-20 * l0);
        assert!(lambda0(&p, 0.0).is_err());
    }

    #[test]
    fn large_a_approximation() {
        let (_, mut p, _) = setup();
        for k in [1.0, 10.0, 100.0] {
            p.rician_k = k;
            p.eta_abs = (k * 4.0 * p.sigma_bar_sq).sqrt();
            let a2 = 8.0 * k;
            let l1 = lambda1(&p).unwrap();
            let rel = (l1 * p.p2_bar / a2 - 1.0).abs();
            // psi(t) ~ 1/t - 1/(2t^2): the relative error is about 1/a^2
            assert!(rel < 1.5 / a2, "K={k}: {rel}");
        }
    }

    #[test]
    fn small_a_rejected() {
        let (_, mut p, _) = setup();
        p.eta_abs = (0.25 * p.sigma_bar_sq).sqrt();
        let e = lambda1(&p).unwrap_err();
        assert!(e.to_string().contains("increase K or M"));
    }

    #[test]
    fn concave_below_lambda0() {
        let (_, p, b) = setup();
        let u = u_cap(&p, 0.17).unwrap();
        let l0 = lambda0(&p, u).unwrap();
        let t = t_check(&p, &b);
        for i in 1..=50 {
            let x = l0 * i as f64 / 51.0;
            let h = 1e-3 * l0;
            let d2 = t(x + h) - 2.0 * t(x) + t(x - h);
            assert!(d2 <= 1e-6, "x={x}: {d2}");
        }
    }

    #[test]
    fn omega_bounds() {
        let (_, mut p, _) = setup();
        let q = QuadratureSpec::default();
        let l1 = lambda1(&p).unwrap();
        let om = omega(&p, l1, &q).unwrap();
        assert!(om >= p.p2_bar.sqrt());
        p.p1_bar = 0.0;
        assert_eq!(omega(&p, l1, &q).unwrap(), p.p2_bar.sqrt());
    }

    #[test]
    fn omega_matches_two_integral_ratio() {
        let (_, p, _) = setup();
        let l1 = lambda1(&p).unwrap();
        let om = omega(&p, l1, &QuadratureSpec::default()).unwrap();
        // W1, W2 by composite Simpson on the raw integrands
        let a = p.los_amplitude();
        let (lo, hi) = gbar_law(&p).unwrap().window(1e-12);
        let n = 20_000;
        let h = (hi - lo) / n as f64;
        let (mut w1, mut w2) = (0.0, 0.0);
        for i in 0..=n {
            let s = lo + h * i as f64;
            let c = if i == 0 || i == n {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let q = p.p1_bar * s + p.p2_bar;
            let psi = 0.5
                * (q.sqrt() / a).sqrt()
                * (-((q * l1).sqrt() - a).powi(2) / 2.0).exp()
                * gbar(s, &p);
            w1 += c * psi;
            w2 += c * q.sqrt() * psi / (2.0 * std::f64::consts::PI).sqrt();
        }
        let ratio = (2.0 * std::f64::consts::PI).sqrt() * w2 / w1;
        assert!(
            (om - ratio).abs() < 1e-8 * ratio.max(1.0),
            "{om} vs {ratio}"
        );
    }

    #[test]
    fn domega_asymptotics() {
        let om = 0.3;
        for x in [1e-10_f64, 1e-8] {
            let lead = 5.0 / (4.0 * LN_2) * x.powf(0.25);
            assert!((d_omega(x, om) / lead - 1.0).abs() < 1e-3);
        }
        let tail: Vec<f64> = [1e8_f64, 1e12, 1e16, 1e20]
            .iter()
            .map(|&x| d_omega(x, om))
            .collect();
        assert!(tail.iter().all(|&d| d < 0.0));
        assert!(tail.windows(2).all(|w| w[1].abs() < w[0].abs()));
        assert!(tail[3].abs() < 1e-3);
        for x in [1e-3_f64, 0.5, 7.0, 300.0] {
            let h = 1e-6 * x;
            let fd = (d_omega(x + h, om) - d_omega(x - h, om)) / (2.0 * h);
            assert!((fd - d_omega_prime(x, om)).abs() < 1e-6 * fd.abs().max(1e-6));
        }
    }

    #[test]
    fn newton_matches_bisection() {
        let (lo, hi) = domega_bracket(1.0).unwrap();
        let x = newton_root_domega(1.0, lo, hi, 50).unwrap();
        assert!(d_omega(x, 1.0).abs() < 1e-8);
        let (mut a, mut b) = (1e-6, 1e6);
        while b - a > 1e-10 {
            let m = 0.5 * (a + b);
            if d_omega(m, 1.0) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        assert!((x - 0.5 * (a + b)).abs() < 1e-7);
        assert!(matches!(
            newton_root_domega(1.0, hi * 4.0, hi * 8.0, 50),
            Err(Error::NoSignChange { .. })
        ));
    }

    #[test]
    fn optimizer_invariants() {
        let (c, p, b) = setup();
        let opts = RateSearchOptions::default();
        let r = optimize_rate(&c, &p, &b, &opts).unwrap();
        assert!(r.lambda0 > 0.0 && r.lambda0 <= r.lambda1);
        assert!((c.rate_min..=c.rate_max).contains(&r.r_final));
        let best = r
            .t_at_candidates
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(r.t_final, best);
        assert!(
            r.evaluations <= r.eval_budget,
            "{} > {}",
            r.evaluations,
            r.eval_budget
        );
        let t = throughput(r.r_final, &c, &p, &b, &opts.quad).unwrap();
        assert!((t - r.t_final).abs() < 1e-9);
        assert!(r.x_star2 >= r.lambda1);
    }

    #[test]
    fn degenerate_rate_box() {
        let (mut c, p, b) = setup();
        c.rate_min = 2.0;
        c.rate_max = 2.0;
        let r = optimize_rate(&c, &p, &b, &RateSearchOptions::default()).unwrap();
        assert_eq!(r.r_final, 2.0);
        assert!(r.r_opt > 2.0);
    }

    #[test]
    fn throughput_limits() {
        let (c, p, b) = setup();
        let q = QuadratureSpec::default();
        assert_eq!(throughput(0.0, &c, &p, &b, &q).unwrap(), 0.0);
        let r = optimize_rate(&c, &p, &b, &RateSearchOptions::default()).unwrap();
        assert!(throughput(20.0, &c, &p, &b, &q).unwrap() < r.t_final / 100.0);
        assert!(throughput(-1.0, &c, &p, &b, &q).is_err());
    }
}
