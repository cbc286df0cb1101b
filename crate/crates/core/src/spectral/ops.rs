use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::decomp::{eigh, singular_values};
use super::lipschitz::LipschitzFn;
use super::matrix::CMatrix;
use crate::calderon::apply_sd;
use crate::concave::ConcaveFn;
use crate::error::{LabError, Result};
use crate::harness::ExperimentReport;
use crate::par::{map_slice, Exec};
use crate::rearrangement::{lorentz_weights_norm, Seq};

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// `Σ_n μ(n, V)(φ(n+1) - φ(n))`.
pub fn schatten_lorentz_norm(v: &CMatrix, phi: &ConcaveFn) -> Result<f64> {
    Ok(lorentz_weights_norm(&singular_values(v)?.values, phi))
}

/// `T(V)_ij = sgn(i - j)·V_ij`.
pub fn triangular_truncate(v: &CMatrix) -> CMatrix {
    v.map_entries(|i, j, z| match i.cmp(&j) {
        std::cmp::Ordering::Greater => z,
        std::cmp::Ordering::Less => -z,
        std::cmp::Ordering::Equal => ZERO,
    })
}

/// Strictly upper triangular part; `T(V) = V - D - 2P(V)` with `D` the
/// diagonal.
pub fn strict_upper_projection(v: &CMatrix) -> CMatrix {
    v.map_entries(|i, j, z| if i < j { z } else { ZERO })
}

/// `sup_n (n+1)·μ(n, T(V)) / ‖V‖_{S₁}`.
pub fn weak_l1_probe(v: &CMatrix) -> Result<f64> {
    let trace_norm: f64 = singular_values(v)?.values.iter().sum();
    if trace_norm == 0.0 {
        return Err(LabError::ZeroMatrix);
    }
    let mu = singular_values(&triangular_truncate(v))?.values;
    Ok(mu
        .iter()
        .enumerate()
        .map(|(n, m)| (n + 1) as f64 * m)
        .fold(0.0, f64::max)
        / trace_norm)
}

/// Per-sample `‖T(V)‖_{Λψ} / ‖V‖_{Λφ}`; the largest pointwise ratio
/// `μ(n, T(V)) / (S^d μ(V))(n)` is reported as the detail `max_pointwise`.
pub fn truncation_range_probe(
    corpus: &[CMatrix],
    phi: &ConcaveFn,
    psi: &ConcaveFn,
    corpus_descriptor: serde_json::Value,
    exec: Exec,
) -> Result<ExperimentReport> {
    if corpus.is_empty() {
        return Err(LabError::EmptyInput);
    }
    let start = Instant::now();
    let per = map_slice(exec, corpus, |v| -> Result<(f64, f64)> {
        let mu_v = singular_values(v)?.values;
        let mu_t = singular_values(&triangular_truncate(v))?.values;
        let denom = lorentz_weights_norm(&mu_v, phi);
        let ratio = if denom > 0.0 {
            lorentz_weights_norm(&mu_t, psi) / denom
        } else {
            0.0
        };
        let sd = apply_sd(&Seq::new(mu_v), mu_t.len() - 1);
        let pointwise = mu_t
            .iter()
            .zip(&sd.entries)
            .map(|(&t, &s)| if s > 0.0 { t / s } else { 0.0 })
            .fold(0.0, f64::max);
        Ok((ratio, pointwise))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let max_pointwise = per.iter().map(|p| p.1).fold(0.0, f64::max);
    let ratios = per.into_iter().map(|p| p.0).collect();
    let mut rep = ExperimentReport::new("truncation_range", corpus_descriptor, ratios, true, start);
    rep.detail("max_pointwise", max_pointwise);
    Ok(rep)
}

/// `f(A) = U diag(f(λ)) U*`.
pub fn function_of_hermitian(f: &LipschitzFn, a: &CMatrix) -> Result<CMatrix> {
    let e = eigh(a)?;
    let fl: Vec<f64> = e.values.iter().map(|&l| f.eval(l)).collect();
    Ok(e.reconstruct(&fl).hermitian_part())
}

/// Divided differences `f^{[1]}(λ_i, λ_j)`, zero when the eigenvalues agree
/// to `1e-10` times the spectral diameter.
fn divided_differences(f: &LipschitzFn, lambda: &[f64]) -> Vec<Vec<f64>> {
    let diameter = lambda.last().copied().unwrap_or(0.0) - lambda.first().copied().unwrap_or(0.0);
    let tol = 1e-10 * diameter;
    lambda
        .iter()
        .map(|&li| {
            lambda
                .iter()
                .map(|&lj| {
                    if (li - lj).abs() <= tol {
                        0.0
                    } else {
                        (f.eval(li) - f.eval(lj)) / (li - lj)
                    }
                })
                .collect()
        })
        .collect()
}

/// `U (M ∘ U*VU) U*` with `M` the divided differences of `f` on the spectrum
/// of `A` (zero on coinciding eigenvalues, so the diagonal is not `f'`).
pub fn doi_apply(f: &LipschitzFn, a: &CMatrix, v: &CMatrix) -> Result<CMatrix> {
    a.check_dim(v)?;
    let e = eigh(a)?;
    let u = &e.vectors;
    let vt = &(&u.adjoint() * v) * u;
    let m = divided_differences(f, &e.values);
    let inner = vt.map_entries(|i, j, z| z * m[i][j]);
    Ok(&(u * &inner) * &u.adjoint())
}

/// `[A, B] = AB - BA`.
pub fn commutator(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    a.check_dim(b)?;
    Ok(&(a * b) - &(b * a))
}

/// `max |T_{f^{[1]}}^{A,A}([A,B]) - [f(A), B]|`.
pub fn commutator_identity_check(f: &LipschitzFn, a: &CMatrix, b: &CMatrix) -> Result<f64> {
    let deviation = b.hermitian_deviation();
    if deviation > 1e-12 * b.max_abs().max(1.0) {
        return Err(LabError::NotHermitian { deviation });
    }
    let lhs = doi_apply(f, a, &commutator(a, b)?)?;
    let rhs = commutator(&function_of_hermitian(f, a)?, b)?;
    lhs.max_abs_diff(&rhs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LipschitzProbe {
    /// `‖f(X) - f(Y)‖_{Λψ} / (‖f'‖_∞ ‖X - Y‖_{Λφ})`.
    pub ratio: f64,
    /// The same quotient for `[f(A), B] / [A, B]` with `A = diag(X, Y)` and
    /// `B` the swap of the two blocks.
    pub block_ratio: f64,
    /// Largest gap between the singular values of `[A, B]` and those of
    /// `X - Y` repeated twice.
    pub block_spectrum_gap: f64,
}

pub fn lipschitz_probe(
    f: &LipschitzFn,
    x: &CMatrix,
    y: &CMatrix,
    phi: &ConcaveFn,
    psi: &ConcaveFn,
) -> Result<LipschitzProbe> {
    x.check_dim(y)?;
    for m in [x, y] {
        let deviation = m.hermitian_deviation();
        if deviation > 1e-12 * m.max_abs().max(1.0) {
            return Err(LabError::NotHermitian { deviation });
        }
    }
    let diff = x.checked_sub(y)?;
    if diff.max_abs() == 0.0 {
        return Err(LabError::ZeroDifference);
    }
    let lip = f.lip_constant();
    let fd = function_of_hermitian(f, x)?.checked_sub(&function_of_hermitian(f, y)?)?;
    let ratio = schatten_lorentz_norm(&fd, psi)? / (lip * schatten_lorentz_norm(&diff, phi)?);

    let n = x.n();
    let a = x.block_diag(y)?;
    let b = CMatrix::from_fn(2 * n, |i, j| {
        if (i + n == j) || (j + n == i) {
            Complex64::new(1.0, 0.0)
        } else {
            ZERO
        }
    });
    let ab = commutator(&a, &b)?;
    let fab = commutator(&function_of_hermitian(f, &a)?, &b)?;
    let block_ratio = schatten_lorentz_norm(&fab, psi)? / (lip * schatten_lorentz_norm(&ab, phi)?);
    let s_block = singular_values(&ab)?.values;
    let s_diff = singular_values(&diff)?.values;
    let block_spectrum_gap = s_block
        .iter()
        .enumerate()
        .map(|(k, &s)| (s - s_diff[k / 2]).abs())
        .fold(0.0, f64::max);
    Ok(LipschitzProbe {
        ratio,
        block_ratio,
        block_spectrum_gap,
    })
}
