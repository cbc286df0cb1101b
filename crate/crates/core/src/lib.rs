//! Numerical laboratory for optimal Lorentz-space ranges.
//!
//! The crate computes, on exactly representable objects (step functions,
//! finite sequences, dense matrices), the quantities that govern when the
//! Calderón operator
//!
//! ```text
//! (S x)(t) = (1/t) ∫₀ᵗ x(s) ds + ∫ₜ^∞ x(s) ds / s
//! ```
//!
//! maps a Lorentz space `Λ_φ` into `Λ_ψ`, where
//! `ψ(u) = inf_{w>1} φ(uw) / (1 + log w)`, and it probes the matching
//! statements for the Hilbert transform, the triangular truncation of
//! matrices and double operator integrals.
//!
//! Module map:
//!
//! * [`concave`]: increasing concave functions `φ` and their calculus.
//! * [`rearrangement`]: step functions, decreasing rearrangements and Lorentz norms.
//! * [`calderon`]: the operator `S`, its discrete version and the Hilbert transform of steps.
//! * [`optimal_range`]: `ψ` from `φ`, the boundedness criteria and witness constructions.
//! * [`spectral`]: singular values, Schatten–Lorentz norms, truncation and double operator integrals.
//! * [`harness`]: seeded corpora, experiment orchestration and reports.
//!
//! Data-parallel loops go through [`par`]; with the default `parallel`
//! feature they run on rayon, otherwise sequentially. Results are identical
//! in both modes.

pub mod calderon;
pub mod concave;
pub mod error;
pub mod harness;
pub mod optimal_range;
pub mod par;
pub mod quad;
pub mod rearrangement;
pub mod spectral;

pub use error::{LabError, Result};
