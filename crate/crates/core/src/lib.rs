//! Certified peak-regrowth (overshoot) bounds for oversampled band-limited
//! signals and Nyquist filters.

pub mod bounds;
pub mod cli;
pub mod error;
pub mod kernels;
pub mod l1norm;
pub mod numeric;
pub mod opnorm;
pub mod quadrature;
pub mod search;
pub mod verify;

pub use error::{Error, Result};
