//! Summability kernels for Fourier multipliers.
//!
//! A kernel `Λ` on the real line turns a multiplier sequence `φ` on the integers into the function
//! `W_{φ,Λ}(ξ) = Σ_n φ(n) Λ(ξ − n)`. This crate represents kernels symbolically, evaluates the
//! extension series with certified truncation, tests kernel membership for `p = 1, 2`, transfers
//! measures from the torus to the line, and builds the `ℓ_p` extension schemes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod extension;
pub mod function;
pub mod io;
pub mod measure;
pub mod norms;
pub mod quadrature;

pub use error::{Error, Result};
pub use function::{Expr, FunctionSpec, GridConfig, GridFunction, SequenceSpec};
