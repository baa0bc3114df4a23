//! Proximal-point methods for generalized mixed variational inclusions
//! `ω ∈ F(v, w) + M(f(u), g(u))` with `v ∈ S(u)`, `w ∈ T(u)` on ℝⁿ.
//!
//! The crate checks the operator-property constants the method relies on
//! ([`certify`]), evaluates the resolvent `(H + ρM)⁻¹` ([`resolvent`]) and
//! runs the iteration with its contraction diagnostics ([`solver`]).

pub mod certify;
pub mod cli;
pub mod error;
pub mod instance_file;
pub mod instances;
mod linalg;
pub mod operator;
pub mod resolvent;
pub mod sampling;
pub mod solver;
pub mod space;

pub use error::{Error, Result};
