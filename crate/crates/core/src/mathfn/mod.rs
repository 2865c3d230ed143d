//! Special functions, distributions and quadrature.

pub mod bessel;
pub mod density;
pub mod marcum;
pub mod quad;
pub mod special;

pub use bessel::{bessel_i, bessel_i_scaled, bessel_i_scaled_seq, bessel_j0, ln_bessel_i};
pub use density::{
    ncchi_scaled_pdf, ncx2_scaled_pdf, rician_pdf, Law, Rician, ScaledNcChi, ScaledNcx2,
};
pub use marcum::{marcum_p, marcum_p1, marcum_q, marcum_q1};
pub use quad::{bisect, integrate_checked, GaussLegendre, QuadratureSpec};
pub use special::{gaussian_q, psi, psi_inv};

use crate::error::{Error, Result};

/// Convergence knobs for series and bracketing searches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            max_terms: 10_000,
        }
    }
}

impl Tolerance {
    pub fn validate(&self) -> Result<()> {
        if self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.max_terms >= 1 {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("bad tolerance {self:?}")))
        }
    }
}
