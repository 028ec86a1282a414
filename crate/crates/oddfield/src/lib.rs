//! Retarded electromagnetic potentials and field tensors of point charges
//! in odd-dimensional Minkowski spacetime, D = 2n + 3 with n ≥ 1.
//!
//! In odd dimensions the retarded Green function has support inside the
//! lightcone, and after substituting the invariant λ = −R² the potential
//! integrand v^μ/(R·v) looks like a pure x-gradient — suggesting that the
//! field strength of any moving point charge vanishes identically. It does
//! not: the substitution makes the proper time an implicit function
//! s(x; λ) of the observation point, and the corrected gradient identity
//!
//!   v^μ/(R·v) = ∂^μ ln|R·v| + ((v² − R·a)/(R·v)) ∂^μ s
//!
//! carries a second term that is not a gradient. This crate computes the
//! potentials and fields numerically, evaluates both sides of that identity,
//! and measures the nonzero gap between A^μ and the would-be gauge gradient
//! ∂^μχ — a machine-checkable demonstration that the potentials are not
//! pure gauge.
//!
//! Conventions: metric signature (−,+,…,+), index 0 is time, c = 1, unit
//! timelike velocities satisfy b·b = −1. The Green-function normalization
//! Ω_D defaults to the area of the unit (D−2)-sphere and is configurable;
//! every verification invariant is normalization-independent.
//!
//! Modules follow the pipeline: [`spacetime`] (vectors, boosts),
//! [`worldline`] (trajectories, retarded roots, λ-inversion), [`greens`]
//! (finite-part quadrature), [`potentials`], [`fields`], [`gauge`] (the
//! gradient-identity and gap diagnostics), [`oracle`] (independent
//! cross-check evaluators), [`verify`] (invariant suites) and [`cli`].
//!
//! The `examples/` directory walks through each capability; `cargo run -p
//! oddfield -- help` shows the command-line front end.

pub mod cli;
mod error;
pub mod fields;
pub mod gauge;
pub mod greens;
pub mod oracle;
pub mod potentials;
mod quad;
pub mod spacetime;
pub mod verify;
pub mod worldline;

pub use error::{Error, Result};
pub use greens::Estimate;
