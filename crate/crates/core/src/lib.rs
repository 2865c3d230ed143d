//! Outage probability, throughput and rate selection for a fluid-antenna
//! receiver served through an active reconfigurable intelligent surface.
//!
//! The crate is split bottom-up:
//!
//! * [`mathfn`]: Bessel and Marcum functions, the distributions built on
//!   them, and Gauss-Legendre quadrature.
//! * [`corrmodel`]: Jakes port correlation and its block-diagonal
//!   approximation.
//! * [`channel`]: system configuration, derived parameters and channel
//!   sampling.
//! * [`ctrl`]: surface phase control and port selection.
//! * [`outage`]: semi-analytical outage engines.
//! * [`ratemax`]: throughput-maximizing rate search.
//! * [`mcsim`]: Monte-Carlo ground truth.

pub mod channel;
pub mod corrmodel;
pub mod ctrl;
pub mod error;
pub mod mathfn;
pub mod mcsim;
pub mod outage;
pub mod ratemax;

pub use error::{Error, Result};
