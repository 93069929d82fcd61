//! Simulation and verification laboratory for a random Euler-product model.
//!
//! The library samples a log-correlated random field indexed by primes,
//! builds Gibbs measures on a shifted window, estimates free energies and
//! two-overlap distributions, and compares them with closed-form limit
//! laws. Modules:
//!
//! - [`primes`]: segmented sieve, scale windows, prime sums, disk cache.
//! - [`field`]: field sampling (binned fast path and direct reference),
//!   tilt perturbation, covariance and overlap kernels.
//! - [`gibbs`]: Gibbs weights, free-energy and tilt-derivative estimators,
//!   overlap histograms and their integral functionals.
//! - [`theory`]: closed-form limits the estimators are checked against.
//! - [`oracle`]: independent cross-checks (product-formula moment
//!   generating function, quadrature identities, tail bounds).
//! - [`rng`]: counter-based streams with random access, so every sample is
//!   a pure function of (seed, replica, domain, index).

pub mod calibration;
pub mod error;
pub mod field;
pub mod gibbs;
pub mod numeric;
pub mod oracle;
pub mod primes;
pub mod rng;
pub mod theory;

pub use error::{Error, Result};
