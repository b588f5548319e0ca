//! Numerical building blocks for fractional logistic models driven by
//! three-parameter Mittag-Leffler kernels.
//!
//! The crate is organised around four layers:
//!
//! * [`special`] — the generalized Mittag-Leffler function
//!   `E^rho_{theta,beta}(lambda, z)`, Pochhammer symbols, generalized binomial
//!   coefficients, and a reciprocal gamma with a pole-to-zero convention.
//! * [`operators`] — the fractional derivative (Caputo- and Riemann-type) and
//!   integral built on that kernel, plus the closed-form series solution of the
//!   linear problem `D x = rho x`.
//! * [`scheme`] — an explicit / predictor-corrector time stepper with
//!   precomputed product-integration weight tables.
//! * [`models`] — quadratic and cubic logistic right-hand sides, equilibrium
//!   stability classification, Lipschitz bounds, and the contraction condition
//!   for existence of solutions.
//!
//! All computations are in `f64`. Everything here is a pure function of its
//! arguments; types are plain data and safe to share across threads.

pub mod models;
pub mod operators;
pub mod scheme;
pub mod special;

pub use models::{LogisticModel, StabilityReport};
pub use operators::{FractionalOrder, SampledFunction};
pub use scheme::{SolverConfig, Trajectory};
pub use special::{MlSpec, SeriesControl};
