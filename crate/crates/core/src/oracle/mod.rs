//! Independent cross-checks for the sampling pipeline.
//!
//! Each oracle computes the same quantity by two routes that share no code
//! with the production path being checked: closed product formulas against
//! Monte Carlo, circle quadrature against series expansions, finite
//! differences against perturbative two-point sums, and empirical tails
//! against Chernoff-type bounds with committed constants from
//! [`crate::calibration`].

mod by_parts;
mod derivative;
mod mgf;
mod tails;

pub use by_parts::{by_parts_residual, ByPartsCheck, ByPartsTestFn};
pub use derivative::{
    prime_tilt_derivative_check, single_prime_derivative_check, PrimeTiltCheck, SinglePrimeCheck,
};
pub use mgf::{mgf_monte_carlo, mgf_product_formula};
pub use tails::{
    high_points_measure_estimate, high_points_measure_sweep, joint_tail_factorization,
    max_field_check,
    smoothing_max_check, tail_bound_check, JointTailCheck, SmoothingCheck, TailCheck,
};

/// Replica mean, its standard error, and the ensemble size behind them.
#[derive(Clone, Copy, Debug)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_replicas: u64,
}
