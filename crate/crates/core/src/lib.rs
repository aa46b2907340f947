//! Spectral analysis of periodic five-diagonal self-adjoint operators of
//! SMP (strong moment problem) type.
//!
//! The crate covers the forward pipeline
//!
//! ```text
//! coefficients -> operator A = A2 A1^{-1} -> J = A - A^{-1}
//!              -> Floquet bands / spectral curve
//!              -> Green function data on the band set
//!              -> comb-domain parameters
//! ```
//!
//! and the inverse one: comb parameters -> band set -> fitted periodic
//! matrix.  All numerics are desk-scale (periods up to ~16, a handful of
//! bands) and double precision.

pub mod comb;
pub mod error;
pub mod fit;
pub mod floquet;
pub mod green;
pub mod io;
pub mod numerics;
pub mod operator;

pub use error::{Error, Result};
