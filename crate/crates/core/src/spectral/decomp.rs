use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::matrix::CMatrix;
use crate::error::{LabError, Result};

/// Sweep cap for both Jacobi iterations.
pub const MAX_SWEEPS: usize = 64;
const TOL: f64 = 1e-13;

/// Singular values `μ(0) ≥ μ(1) ≥ … ≥ 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSpectrum {
    pub values: Vec<f64>,
}

/// One-sided complex Jacobi on the columns.
pub fn singular_values(v: &CMatrix) -> Result<SingularSpectrum> {
    let n = v.n();
    let mut cols: Vec<Vec<Complex64>> = (0..n)
        .map(|j| (0..n).map(|i| v.get(i, j)).collect())
        .collect();
    let fro2 = v.frobenius().powi(2);
    if fro2 == 0.0 {
        return Ok(SingularSpectrum {
            values: vec![0.0; n],
        });
    }
    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off2 = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                let (head, tail) = cols.split_at_mut(q);
                let (ap, aq) = (&mut head[p], &mut tail[0]);
                let alpha: f64 = ap.iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = aq.iter().map(|z| z.norm_sqr()).sum();
                let gamma: Complex64 = ap.iter().zip(aq.iter()).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                off2 += g * g;
                if g == 0.0 || g <= 1e-300 {
                    continue;
                }
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (x, y) in ap.iter_mut().zip(aq.iter_mut()) {
                    let yq = *y * phase;
                    let xp = *x;
                    *x = xp * c - yq * s;
                    *y = xp * s + yq * c;
                }
            }
        }
        if off2.sqrt() <= TOL * fro2 {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(LabError::NoConvergence { sweeps: MAX_SWEEPS });
    }
    let mut values: Vec<f64> = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(SingularSpectrum { values })
}

/// `A = U diag(λ) U*` with `λ` ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct Eigh {
    pub values: Vec<f64>,
    /// Eigenvectors as columns.
    pub vectors: CMatrix,
}

impl Eigh {
    /// `U diag(d) U*`.
    pub fn reconstruct(&self, d: &[f64]) -> CMatrix {
        let n = self.values.len();
        let u = &self.vectors;
        CMatrix::from_fn(n, |i, j| {
            (0..n)
                .map(|k| u.get(i, k) * d[k] * u.get(j, k).conj())
                .sum()
        })
    }
}

/// Cyclic complex Jacobi for a Hermitian matrix.
pub fn eigh(a: &CMatrix) -> Result<Eigh> {
    let n = a.n();
    let deviation = a.hermitian_deviation();
    if deviation > 1e-12 * a.max_abs().max(1.0) {
        return Err(LabError::NotHermitian { deviation });
    }
    let mut m: Vec<Vec<Complex64>> = (0..n).map(|i| a.row(i).to_vec()).collect();
    let mut v: Vec<Vec<Complex64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0))
                .collect()
        })
        .collect();
    let scale = a.frobenius();
    let off = |m: &Vec<Vec<Complex64>>| {
        let mut s = 0.0;
        for (i, row) in m.iter().enumerate() {
            for (j, z) in row.iter().enumerate() {
                if i != j {
                    s += z.norm_sqr();
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&m) > TOL * scale {
        if sweeps == MAX_SWEEPS {
            return Err(LabError::NoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[p][q];
                let b = apq.norm();
                if b == 0.0 {
                    continue;
                }
                let e = apq / b;
                let tau = (m[q][q].re - m[p][p].re) / (2.0 * b);
                let t =
                    if tau >= 0.0 { 1.0 } else { -1.0 } / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let ec = e.conj();
                // columns: A ← A G
                for row in m.iter_mut() {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = xp * c - xq * ec * s;
                    row[q] = xp * s + xq * ec * c;
                }
                for row in v.iter_mut() {
                    let (xp, xq) = (row[p], row[q]);
                    row[p] = xp * c - xq * ec * s;
                    row[q] = xp * s + xq * ec * c;
                }
                // rows: A ← G* A
                for j in 0..n {
                    let (xp, xq) = (m[p][j], m[q][j]);
                    m[p][j] = xp * c - xq * e * s;
                    m[q][j] = xp * s + xq * e * c;
                }
                m[p][q] = Complex64::new(0.0, 0.0);
                m[q][p] = Complex64::new(0.0, 0.0);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[i][i].re.total_cmp(&m[j][j].re));
    let values = order.iter().map(|&i| m[i][i].re).collect();
    let vectors = CMatrix::from_fn(n, |i, k| v[i][order[k]]);
    Ok(Eigh { values, vectors })
}
