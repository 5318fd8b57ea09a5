//! Phase-space linear bosonic channels and their Gaussian dilations.
//!
//! A linear bosonic channel acts on characteristic functions as
//! `chi(xi) -> chi(X xi) f(xi)` for a real matrix `X` and a complex-valued
//! function `f`. This crate represents such channels, certifies complete
//! positivity through twisted Gram-matrix positivity checks, synthesizes
//! exact and approximate Gaussian dilations, and validates the constructions
//! numerically on truncated Fock spaces.
//!
//! The crate is `no_std`-compatible (requires `alloc`); the `std` feature
//! (default) enables `std::error::Error` impls and uses the platform float
//! routines instead of `libm`.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod channels;
pub mod char_fn;
pub mod dilation;
pub mod fock;
pub mod linalg;
pub mod math;
pub mod phase_space;

pub use num_complex::Complex64;

/// Phase-space point: a real vector in R^{2n}.
pub type PhasePoint = alloc::vec::Vec<f64>;

/// Library version string embedded in reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Numerical tolerances shared across the crate.
///
/// `structural` guards exact matrix identities, `eigen` guards eigenvalue
/// nonnegativity checks, `rank` decides kernel membership of canonical-form
/// coefficients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub structural: f64,
    pub eigen: f64,
    pub rank: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            structural: 1e-9,
            eigen: 1e-8,
            rank: 1e-10,
        }
    }
}
