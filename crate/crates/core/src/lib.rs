// Domain checks are written `!(x > 0.0)` on purpose: the negation also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Reference values and rule tables keep every published digit.
#![allow(clippy::excessive_precision)]

pub mod cli;
pub mod convergence;
pub mod distributions;
pub mod error;
pub mod gamma_process;
pub mod moments;
pub mod rng;
pub mod special;

pub use distributions::{ContBinomial, ContPoisson, ContinuousLaw, DensityRoute, Law};
pub use error::{Error, Result};
pub use rng::RandomStream;
