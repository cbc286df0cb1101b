//! Finite-matrix models of the operator ideals: singular values,
//! Schatten–Lorentz norms, triangular truncation and double operator
//! integrals.

mod decomp;
mod lipschitz;
mod matrix;
mod ops;

pub use decomp::{eigh, singular_values, Eigh, SingularSpectrum, MAX_SWEEPS};
pub use lipschitz::LipschitzFn;
pub use matrix::CMatrix;
pub use ops::{
    commutator, commutator_identity_check, doi_apply, function_of_hermitian, lipschitz_probe,
    schatten_lorentz_norm, strict_upper_projection, triangular_truncate, truncation_range_probe,
    weak_l1_probe, LipschitzProbe,
};
