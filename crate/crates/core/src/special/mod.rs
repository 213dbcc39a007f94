//! Real special functions and the quadrature engine they share with the rest
//! of the crate.

mod beta;
mod gamma;
pub mod quadrature;
mod volterra;

pub use beta::{reg_beta_pair, reg_beta_upper};
pub(crate) use beta::ln_beta;
pub use gamma::{factorial, log_gamma, reg_gamma_lower, reg_gamma_pair, reg_gamma_upper};
pub(crate) use gamma::ln_gamma_pos;
pub use quadrature::{integrate, integrate_pieces, Estimate, QuadratureConfig};
pub use volterra::{volterra_mu, volterra_nu, VolterraArgs};
pub(crate) use volterra::volterra_mu_scaled;
