//! Scaled noncentral chi-square, noncentral chi and Rician laws.
//!
//! All three have even degrees of freedom `2M` here, so their CDFs are
//! generalized Marcum functions:
//!
//! * `X = C * chi2'(2M, lambda)`: `P(X > x) = Q_M(sqrt(lambda), sqrt(x/C))`
//! * `X = c * chi'(2M, nu)`: `P(X > x) = Q_M(nu, x/c)`
//! * `Rice(nu, sigma)`: `P(X > x) = Q_1(nu/sigma, x/sigma)`

use statrs::function::gamma::ln_gamma;

use super::bessel::bessel_i_scaled;
use super::marcum::{marcum_p, marcum_q};
use super::quad::bisect;
use crate::error::{domain, Result};

/// A continuous law on `[0, inf)` with pdf, CDF and both tails.
pub trait Law {
    fn pdf(&self, x: f64) -> f64;
    fn cdf(&self, x: f64) -> f64;
    fn sf(&self, x: f64) -> f64;
    /// A point near the bulk and a spread, used only to bracket quantiles.
    fn bulk(&self) -> (f64, f64);

    /// Smallest `x` with `cdf(x) >= p`.
    fn quantile_lower(&self, p: f64) -> f64 {
        if self.cdf(0.0) >= p {
            return 0.0;
        }
        let (c, s) = self.bulk();
        let mut hi = c + 10.0 * s;
        while self.cdf(hi) < p {
            hi *= 2.0;
        }
        bisect(0.0, hi, 1e-13, |x| self.cdf(x) < p)
    }

    /// Smallest `x` with `sf(x) <= p`.
    fn quantile_upper(&self, p: f64) -> f64 {
        let (c, s) = self.bulk();
        let mut hi = c + 10.0 * s;
        while self.sf(hi) > p {
            hi *= 2.0;
        }
        bisect(0.0, hi, 1e-13, |x| self.sf(x) > p)
    }

    /// Support truncated to drop `tail` mass from each side.
    fn window(&self, tail: f64) -> (f64, f64) {
        (self.quantile_lower(tail), self.quantile_upper(tail))
    }
}

/// `X = scale * Y`, `Y ~ chi2'(2 * half_dof, nc)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledNcx2 {
    pub scale: f64,
    pub half_dof: u32,
    pub nc: f64,
}

impl ScaledNcx2 {
    pub fn new(scale: f64, dof: u32, nc: f64) -> Result<Self> {
        Ok(Self {
            scale: check_scale(scale)?,
            half_dof: check_dof(dof)?,
            nc: check_nc(nc)?,
        })
    }

    pub fn mean(&self) -> f64 {
        self.scale * (2.0 * f64::from(self.half_dof) + self.nc)
    }

    pub fn variance(&self) -> f64 {
        self.scale * self.scale * 2.0 * (2.0 * f64::from(self.half_dof) + 2.0 * self.nc)
    }
}

impl Law for ScaledNcx2 {
    fn pdf(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let m = self.half_dof;
        let y = x / self.scale;
        let lam = self.nc;
        if y == 0.0 {
            return if m == 1 {
                0.5 * (-0.5 * lam).exp() / self.scale
            } else {
                0.0
            };
        }
        let mf = f64::from(m);
        let ln = if lam == 0.0 {
            (mf - 1.0) * y.ln() - 0.5 * y - mf * std::f64::consts::LN_2 - ln_gamma(mf)
        } else {
            let t = (lam * y).sqrt();
            -std::f64::consts::LN_2 - 0.5 * (y + lam)
                + 0.5 * (mf - 1.0) * (y / lam).ln()
                + bessel_i_scaled(m - 1, t).ln()
                + t
        };
        ln.exp() / self.scale
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        marcum_p(self.half_dof, self.nc.sqrt(), (x / self.scale).sqrt())
    }

    fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        marcum_q(self.half_dof, self.nc.sqrt(), (x / self.scale).sqrt())
    }

    fn bulk(&self) -> (f64, f64) {
        (self.mean(), self.variance().sqrt())
    }
}

/// `X = scale * Z`, `Z ~ chi'(2 * half_dof, nc)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledNcChi {
    pub scale: f64,
    pub half_dof: u32,
    pub nc: f64,
}

impl ScaledNcChi {
    pub fn new(scale: f64, dof: u32, nc: f64) -> Result<Self> {
        Ok(Self {
            scale: check_scale(scale)?,
            half_dof: check_dof(dof)?,
            nc: check_nc(nc)?,
        })
    }

    /// `E[X^2]`.
    pub fn second_moment(&self) -> f64 {
        self.scale * self.scale * (2.0 * f64::from(self.half_dof) + self.nc * self.nc)
    }
}

impl Law for ScaledNcChi {
    fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let m = self.half_dof;
        let mf = f64::from(m);
        let z = x / self.scale;
        let nu = self.nc;
        let ln = if nu == 0.0 {
            (2.0 * mf - 1.0) * z.ln()
                - 0.5 * z * z
                - (mf - 1.0) * std::f64::consts::LN_2
                - ln_gamma(mf)
        } else {
            z.ln() + (mf - 1.0) * (z / nu).ln() - 0.5 * (z - nu) * (z - nu)
                + bessel_i_scaled(m - 1, nu * z).ln()
        };
        ln.exp() / self.scale
    }

    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        marcum_p(self.half_dof, self.nc, x / self.scale)
    }

    fn sf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        marcum_q(self.half_dof, self.nc, x / self.scale)
    }

    fn bulk(&self) -> (f64, f64) {
        (self.second_moment().sqrt(), self.scale * 2.0)
    }
}

/// Rician law with line-of-sight amplitude `nu` and per-dimension
/// standard deviation `sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rician {
    pub nu: f64,
    pub sigma: f64,
}

impl Rician {
    pub fn new(nu: f64, sigma: f64) -> Result<Self> {
        Ok(Self {
            nu: check_nc(nu)?,
            sigma: check_scale(sigma)?,
        })
    }
}

impl Law for Rician {
    fn pdf(&self, r: f64) -> f64 {
        rician_pdf_unchecked(r, self.nu, self.sigma)
    }

    fn cdf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        marcum_p(1, self.nu / self.sigma, r / self.sigma)
    }

    fn sf(&self, r: f64) -> f64 {
        if r <= 0.0 {
            return 1.0;
        }
        marcum_q(1, self.nu / self.sigma, r / self.sigma)
    }

    fn bulk(&self) -> (f64, f64) {
        (
            (self.nu * self.nu + 2.0 * self.sigma * self.sigma).sqrt(),
            self.sigma,
        )
    }
}

/// Density of `scale * chi2'(dof, nc)`; `dof` must be even and positive.
pub fn ncx2_scaled_pdf(x: f64, scale: f64, dof: u32, nc: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain("x", x));
    }
    Ok(ScaledNcx2::new(scale, dof, nc)?.pdf(x))
}

/// Density of `scale * chi'(dof, nc)`; `dof` must be even and positive.
pub fn ncchi_scaled_pdf(x: f64, scale: f64, dof: u32, nc: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(domain("x", x));
    }
    Ok(ScaledNcChi::new(scale, dof, nc)?.pdf(x))
}

/// `(r/sigma^2) exp(-(r^2+nu^2)/(2 sigma^2)) I0(r nu / sigma^2)`.
pub fn rician_pdf(r: f64, nu: f64, sigma: f64) -> Result<f64> {
    if !(r >= 0.0) {
        return Err(domain("r", r));
    }
    check_nc(nu)?;
    check_scale(sigma)?;
    Ok(rician_pdf_unchecked(r, nu, sigma))
}

fn rician_pdf_unchecked(r: f64, nu: f64, sigma: f64) -> f64 {
    if r <= 0.0 {
        return 0.0;
    }
    let s2 = sigma * sigma;
    let d = r - nu;
    r / s2 * (-0.5 * d * d / s2).exp() * bessel_i_scaled(0, r * nu / s2)
}

fn check_scale(s: f64) -> Result<f64> {
    if s > 0.0 && s.is_finite() {
        Ok(s)
    } else {
        Err(domain("scale", s))
    }
}

fn check_nc(nc: f64) -> Result<f64> {
    if nc >= 0.0 && nc.is_finite() {
        Ok(nc)
    } else {
        Err(domain("noncentrality", nc))
    }
}

fn check_dof(dof: u32) -> Result<u32> {
    if dof >= 2 && dof % 2 == 0 {
        Ok(dof / 2)
    } else {
        Err(domain("dof", f64::from(dof)))
    }
}
