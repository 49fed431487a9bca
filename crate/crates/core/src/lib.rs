//! Phase-space representation of one-particle quantum mechanics on the
//! Hermite-Gaussian basis `|n, X, P, ℓ⟩`.
//!
//! The crate is organised bottom-up:
//!
//! - [`basis`]: Hermite polynomials and functions, the basis wave functions
//!   and Gauss–Hermite quadrature.
//! - [`transform`]: the forward map `ψ ↦ Ψⁿ(X, P)` and both reconstruction
//!   routes (sum over `n` at a fixed point, integral over phase space at a
//!   fixed `n`).
//! - [`matrix`]: truncated matrices of the ladder, coordinate, momentum and
//!   dispersion operators.
//! - [`diffop`]: an exact normal-ordered algebra of differential operators
//!   with polynomial coefficients, and the one-dimensional phase-space
//!   representations built on it.
//! - [`grid`]: finite-difference application of those operators to sampled
//!   `Ψⁿ` fields, cross-checked against the exact ladder recurrences.
//! - [`multidim`]: parameter tensors, metric signature and the
//!   multidimensional representations and dispersion generators.
//! - [`verify`]: the cross-module check suite behind `phasekit verify`.
//! - [`cli`] and [`io`]: the command-line front end and its file formats.

pub mod basis;
pub mod cli;
pub mod diffop;
pub mod error;
pub mod grid;
pub mod io;
pub mod matrix;
pub mod multidim;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use num_complex::Complex64;
