use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::criterion::{criterion_continuous, Verdict};
use super::psi::psi_from_phi;
use crate::calderon::{apply_s, image_lorentz_norm};
use crate::concave::{geometric_grid, ConcaveFn};
use crate::error::{LabError, Result};
use crate::harness::ExperimentReport;
use crate::par::{map_slice, Exec};
use crate::rearrangement::{l1_linf_norm, lorentz_norm, lorentz_norm_with, DecreasingStep};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorWitness {
    /// `χ_(0, u·w) / (1 + log w)`.
    pub y: DecreasingStep,
    pub w_used: f64,
    pub psi_u: f64,
    pub norm: f64,
    /// `Sμ(y) ≥ 1` on a 64-point grid of `(0, u]`.
    pub dominated: bool,
    /// `‖y‖_{Λφ} ≤ 2ψ(u)`.
    pub norm_ok: bool,
}

/// A `y` with `χ_(0,u) ≤ Sμ(y)` and `‖y‖_{Λφ} ≤ 2ψ(u)`.
///
/// Uses the minimizer of the `ψ` search; when it sits at `w = 1` the
/// parameter is moved off the boundary, starting at `log w = 10⁻³` and
/// halving until the objective is within `2ψ(u)`.
pub fn witness_indicator(phi: &ConcaveFn, u: f64) -> Result<IndicatorWitness> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(LabError::invalid(format!("u = {u} must be positive")));
    }
    let (psi_u, w_star) = psi_from_phi(phi, u);
    let obj = |lw: f64| phi.eval(u * lw.exp()) / (1.0 + lw);
    let mut lw = w_star.ln();
    if lw <= 0.0 {
        lw = 1e-3;
        while obj(lw) > 2.0 * psi_u && lw > 1e-300 {
            lw *= 0.5;
        }
    }
    let w = lw.exp();
    let y = DecreasingStep::indicator(u * w, 1.0 / (1.0 + lw))?;
    let img = apply_s(&y);
    let dominated = geometric_grid(u * 1e-6, u, 64)
        .iter()
        .all(|&t| img.eval(t) >= 1.0 - 1e-12);
    let norm = lorentz_norm(&y, phi);
    Ok(IndicatorWitness {
        norm_ok: norm <= 2.0 * psi_u * (1.0 + 1e-12),
        y,
        w_used: w,
        psi_u,
        norm,
        dominated,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneralWitness {
    pub y: DecreasingStep,
    /// `(n, m{x ≥ 2ⁿ})` for the levels used; the first entry stands for
    /// all `n ≤ n_min`.
    pub levels: Vec<(i32, f64)>,
    pub norm_y_phi: f64,
    pub norm_x_psi: f64,
    pub norm_x_phi: f64,
    /// `‖y‖_{Λφ} / ‖x‖_{Λψ}`.
    pub ratio: f64,
    pub dominated: bool,
    pub factor8_ok: bool,
}

/// Measure of `{x ≥ s}` for a layer-cake step.
fn level_measure(x: &DecreasingStep, s: f64) -> f64 {
    x.layers()
        .iter()
        .enumerate()
        .rev()
        .find(|(k, _)| x.layers()[*k..].iter().map(|l| l.0).sum::<f64>() >= s)
        .map(|(_, l)| l.1)
        .unwrap_or(0.0)
}

/// A `y` with `μ(x) ≤ Sμ(y)` and `‖y‖_{Λφ} ≤ 8‖x‖_{Λψ}`, assembled from
/// dyadic level sets: `y = Σ_n 2^{n+1} y_n` with `y_n` the indicator
/// witness for `m{x ≥ 2ⁿ}`.
///
/// For `n ≤ ⌊log₂ min x⌋` every level set is the whole support, so that part
/// of the sum is the single term `2^{n_min+2} y_supp`.
pub fn witness_general(x: &DecreasingStep, phi: &ConcaveFn) -> Result<GeneralWitness> {
    if x.is_zero() {
        return Ok(GeneralWitness {
            y: DecreasingStep::zero(),
            levels: vec![],
            norm_y_phi: 0.0,
            norm_x_psi: 0.0,
            norm_x_phi: 0.0,
            ratio: 0.0,
            dominated: true,
            factor8_ok: true,
        });
    }
    let n_min = x.min_positive_value().log2().floor() as i32;
    let n_max = x.max_value().log2().ceil() as i32;
    let supp = x.support();
    let mut levels = vec![(n_min, supp)];
    let mut y = witness_indicator(phi, supp)?
        .y
        .scaled(2f64.powi(n_min + 2))?;
    for n in n_min + 1..=n_max {
        let d = level_measure(x, 2f64.powi(n));
        if d > 0.0 {
            levels.push((n, d));
            y = y.plus(&witness_indicator(phi, d)?.y.scaled(2f64.powi(n + 1))?);
        }
    }
    let img = apply_s(&y);
    let mut grid = geometric_grid(supp * 1e-6, supp * (1.0 - 1e-9), 128 - x.layers().len());
    grid.extend(x.layers().iter().map(|l| l.1 * (1.0 - 1e-9)));
    let dominated = grid
        .iter()
        .all(|&t| x.eval(t) <= img.eval(t) * (1.0 + 1e-12));
    let norm_y_phi = lorentz_norm(&y, phi);
    let norm_x_psi = lorentz_norm_with(x, |u| psi_from_phi(phi, u).0);
    let norm_x_phi = lorentz_norm(x, phi);
    let ratio = norm_y_phi / norm_x_psi;
    Ok(GeneralWitness {
        y,
        levels,
        norm_y_phi,
        norm_x_psi,
        norm_x_phi,
        ratio,
        dominated,
        factor8_ok: norm_y_phi <= 8.0 * norm_x_psi * (1.0 + 1e-9),
    })
}

/// `max_x ‖Sμ(x)‖_{Λψ} / ‖x‖_{Λφ}` over a corpus, checked against twice the
/// criterion constant.
///
/// The constant comes from [`criterion_continuous`] on `[10⁻⁸, 10⁸]`; the
/// report fails if that verdict is not `bounded_with_c`.
pub fn boundedness_probe(
    phi: &ConcaveFn,
    psi: &ConcaveFn,
    corpus: &[DecreasingStep],
    corpus_descriptor: serde_json::Value,
    exec: Exec,
) -> Result<ExperimentReport> {
    let start = Instant::now();
    let crit = criterion_continuous(phi, psi, &geometric_grid(1e-8, 1e8, 161))?;
    if crit.verdict != Verdict::BoundedWithC {
        return Err(LabError::invalid(format!(
            "criterion verdict is {:?}",
            crit.verdict
        )));
    }
    let ratios = map_slice(exec, corpus, |x| -> Result<f64> {
        Ok(image_lorentz_norm(&apply_s(x), psi)? / lorentz_norm(x, phi))
    })
    .into_iter()
    .collect::<Result<Vec<f64>>>()?;
    let bound = 2.0 * crit.c_estimate + 1e-6;
    let pass = ratios.iter().all(|&r| r <= bound);
    let mut rep = ExperimentReport::new("boundedness", corpus_descriptor, ratios, pass, start);
    rep.detail("c_estimate", crit.c_estimate);
    rep.detail("bound", bound);
    Ok(rep)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaximalityReport {
    /// `‖Sμ(x)‖_{L1+L∞}`.
    pub s_norm: f64,
    /// `‖x‖_{Λφ₀}`.
    pub phi0_norm: f64,
    /// `‖x‖_{Λφ₀} / ‖Sμ(x)‖_{L1+L∞}`, expected in `[1, 2]`.
    pub ratio: f64,
    pub passed: bool,
}

/// Both sides of `‖Sμ(x)‖_{L1+L∞} ≤ ‖x‖_{Λφ₀} ≤ 2‖Sμ(x)‖_{L1+L∞}`.
pub fn check_phi0_maximality(x: &DecreasingStep) -> Result<MaximalityReport> {
    let s_norm = l1_linf_norm(&apply_s(x))?;
    let phi0_norm = lorentz_norm(x, &ConcaveFn::PhiZero);
    let tol = 1e-9 * phi0_norm.max(f64::MIN_POSITIVE);
    let passed = s_norm <= phi0_norm + tol && phi0_norm <= 2.0 * s_norm + tol;
    let ratio = if s_norm > 0.0 {
        phi0_norm / s_norm
    } else {
        1.0
    };
    Ok(MaximalityReport {
        s_norm,
        phi0_norm,
        ratio,
        passed,
    })
}
