//! Exact operator algebra and numerical experiments around L¹ a priori
//! estimates for anisotropic homogeneous differential operators.
//!
//! The crate is `no_std` and only needs `alloc`. Everything that touches the
//! filesystem, threads or the command line lives in the `ornstein` crate.
//!
//! Layout:
//!
//! * [`algebra`]: multi-indices, operators with exact rational coefficients,
//!   homogeneity patterns, the space `E` of generalized gradients and
//!   generalized rank-one vectors.
//! * [`field`]: periodic grids, finite-difference stencils and the discrete
//!   generalized gradient.
//! * [`optim`]: Huber smoothing and the accelerated first-order solver.
//! * [`bellman`]: the integrand `V`, upper estimates of the Bellman function
//!   and rank-one convexity probes.
//! * [`ratio`]: search for large values of `‖T₁f‖ / Σ‖T_jf‖`.
//! * [`laminate`]: oscillating test functions concentrated on a rank-one line.
//! * [`sepconvex`] and [`lp`]: linear-programming certificates for separately
//!   convex homogeneous functions, plus the subharmonic example in ℝ⁴.
//! * [`martingale`]: dyadic martingale transforms.
//! * [`asymptotics`]: lower bounds for the best `L^p` constant as `p → 1`.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod algebra;
pub mod asymptotics;
pub mod bellman;
mod error;
pub mod field;
pub mod laminate;
pub mod lp;
pub mod martingale;
pub mod optim;
pub mod ratio;
pub mod sepconvex;
pub mod stats;

pub use error::{Error, Result};

/// Rational numbers used by the exact layer.
pub type Rational = num_rational::BigRational;

/// Deterministic generator behind every seeded routine.
pub type SeededRng = rand_chacha::ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    use rand::SeedableRng;
    SeededRng::seed_from_u64(seed)
}
