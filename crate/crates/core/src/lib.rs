//! Extended Cauchy-Rayleigh distribution: density, moments, estimation,
//! goodness of fit and Monte Carlo studies.

pub mod data;
pub mod ecr;
pub mod error;
pub mod gof;
pub mod inference;
pub mod optimize;
pub mod quad;
pub mod sim;
pub mod specfun;

pub use ecr::Params;
pub use error::{Error, Result};
