//! Solver library for the energy-regularized logarithmic Schrödinger equation
//! (ERLogSE)
//!
//! ```text
//!     i u_t + Δu = λ u f_k^ε(|u|²),      x ∈ [a, b) periodic,
//! ```
//!
//! where `f_k^ε` is a C^{k-1} polynomial regularization of `ln ρ` below the
//! density cutoff `ρ = ε²`. Space is discretized with a Fourier pseudo-spectral
//! method ([`grid`]), the nonlinearity lives in [`logreg`], and time stepping
//! uses implicit-explicit (IMEX) Runge-Kutta schemes ([`tableau`]) wrapped in a
//! relaxation step ([`rrk`]) that conserves the discrete mass `h Σ|u_j|²`
//! exactly (up to round-off) by scaling each update direction.
//!
//! The [`harness`] module reproduces the standard convergence and soliton
//! (Gausson) collision experiments and writes deterministic CSV reports.

pub mod grid;
pub mod harness;
pub mod logreg;
pub mod rrk;
pub mod stats;
pub mod tableau;
mod util;

pub use util::CompensatedSum;

pub use num_complex::Complex64;
