//! The optimal range `Λ_ψ` of `S` on `Λ_φ`: computing `ψ`, testing the
//! boundedness criterion, and building the witnesses that show minimality.

mod criterion;
mod psi;
mod witness;

pub use criterion::{
    criterion_continuous, criterion_discrete, criterion_g, CriterionFlags, CriterionReport,
    ExtendedPsi, GBreakdown, Verdict, TREND_HEURISTIC,
};
pub use psi::{
    exact_power_psi, power_psi_closed_form, psi_from_phi, psi_from_phi_with, psi_limit_check,
    PsiLimitReport, PsiSearch, PsiTable, PsiTableConfig,
};
pub use witness::{
    boundedness_probe, check_phi0_maximality, witness_general, witness_indicator, GeneralWitness,
    IndicatorWitness, MaximalityReport,
};
