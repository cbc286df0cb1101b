use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Dense complex `n × n` matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixRepr", into = "MatrixRepr")]
pub struct CMatrix {
    n: usize,
    data: Vec<Complex64>,
    hermitian: bool,
}

#[derive(Serialize, Deserialize)]
struct MatrixRepr {
    n: usize,
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
    #[serde(default)]
    hermitian: bool,
}

impl TryFrom<MatrixRepr> for CMatrix {
    type Error = LabError;
    fn try_from(r: MatrixRepr) -> Result<Self> {
        let shape_ok = |m: &Vec<Vec<f64>>| m.len() == r.n && m.iter().all(|row| row.len() == r.n);
        if !shape_ok(&r.re) || !shape_ok(&r.im) {
            return Err(LabError::invalid(format!("re and im must be {0}x{0}", r.n)));
        }
        let data = (0..r.n * r.n)
            .map(|k| Complex64::new(r.re[k / r.n][k % r.n], r.im[k / r.n][k % r.n]))
            .collect();
        let m = CMatrix {
            n: r.n,
            data,
            hermitian: false,
        };
        if r.hermitian {
            m.into_hermitian()
        } else {
            Ok(m)
        }
    }
}

impl From<CMatrix> for MatrixRepr {
    fn from(m: CMatrix) -> Self {
        let rows =
            |f: fn(&Complex64) -> f64| (0..m.n).map(|i| m.row(i).iter().map(f).collect()).collect();
        MatrixRepr {
            n: m.n,
            re: rows(|z| z.re),
            im: rows(|z| z.im),
            hermitian: m.hermitian,
        }
    }
}

impl CMatrix {
    pub fn zeros(n: usize) -> Self {
        CMatrix {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
            hermitian: true,
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1.0; n])
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.data[i * m.n + i] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> Complex64) -> Self {
        let data = (0..n * n).map(|k| f(k / n, k % n)).collect();
        CMatrix {
            n,
            data,
            hermitian: false,
        }
    }

    /// Real matrix from rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(LabError::invalid("rows must form a square matrix"));
        }
        Ok(Self::from_fn(n, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_flagged_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.data[i * self.n + j] = z;
        self.hermitian = false;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn map_entries(&self, f: impl Fn(usize, usize, Complex64) -> Complex64) -> Self {
        Self::from_fn(self.n, |i, j| f(i, j, self.get(i, j)))
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::from_fn(self.n, |i, j| self.get(j, i).conj());
        m.hermitian = self.hermitian;
        m
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.map_entries(|_, _, z| z * c)
    }

    /// `max |a_ij - conj(a_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.n {
            for j in i..self.n {
                dev = dev.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        dev
    }

    /// Checks `A = A*` within `1e-12·max(1, max|a_ij|)` and sets the flag.
    pub fn into_hermitian(mut self) -> Result<Self> {
        let deviation = self.hermitian_deviation();
        if deviation > 1e-12 * self.max_abs().max(1.0) {
            return Err(LabError::NotHermitian { deviation });
        }
        self.hermitian = true;
        Ok(self)
    }

    /// `(A + A*)/2`.
    pub fn hermitian_part(&self) -> Self {
        let mut m = Self::from_fn(self.n, |i, j| {
            0.5 * (self.get(i, j) + self.get(j, i).conj())
        });
        m.hermitian = true;
        m
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    /// Entrywise product.
    pub fn hadamard(&self, other: &CMatrix) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_fn(self.n, |i, j| {
            self.get(i, j) * other.get(i, j)
        }))
    }

    /// `[[self, 0], [0, other]]`.
    pub fn block_diag(&self, other: &CMatrix) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.n;
        let mut m = Self::from_fn(2 * n, |i, j| match (i < n, j < n) {
            (true, true) => self.get(i, j),
            (false, false) => other.get(i - n, j - n),
            _ => Complex64::new(0.0, 0.0),
        });
        m.hermitian = self.hermitian && other.hermitian;
        Ok(m)
    }

    pub(crate) fn check_dim(&self, other: &CMatrix) -> Result<()> {
        if self.n != other.n {
            return Err(LabError::DimensionMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<Self> {
        self.check_dim(other)?;
        let n = self.n;
        let mut out = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                for (o, &b) in out[i * n..(i + 1) * n].iter_mut().zip(orow) {
                    *o += a * b;
                }
            }
        }
        Ok(CMatrix {
            n,
            data: out,
            hermitian: false,
        })
    }

    pub fn checked_add(&self, other: &CMatrix) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_fn(self.n, |i, j| {
            self.get(i, j) + other.get(i, j)
        }))
    }

    pub fn checked_sub(&self, other: &CMatrix) -> Result<Self> {
        self.check_dim(other)?;
        let mut m = Self::from_fn(self.n, |i, j| self.get(i, j) - other.get(i, j));
        m.hermitian = self.hermitian && other.hermitian;
        Ok(m)
    }

    /// `max |a_ij - b_ij|`.
    pub fn max_abs_diff(&self, other: &CMatrix) -> Result<f64> {
        Ok(self.checked_sub(other)?.max_abs())
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, rhs: &CMatrix) -> CMatrix {
        self.checked_add(rhs).expect("matching dimensions")
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, rhs: &CMatrix) -> CMatrix {
        self.checked_sub(rhs).expect("matching dimensions")
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, rhs: &CMatrix) -> CMatrix {
        self.matmul(rhs).expect("matching dimensions")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_roundtrip() {
        let m = CMatrix::from_fn(2, |i, j| Complex64::new(i as f64, j as f64));
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(
            s,
            r#"{"n":2,"re":[[0.0,0.0],[1.0,1.0]],"im":[[0.0,1.0],[0.0,1.0]],"hermitian":false}"#
        );
        assert_eq!(serde_json::from_str::<CMatrix>(&s).unwrap(), m);
        let bad = r#"{"n":2,"re":[[0,1],[2,0]],"im":[[0,0],[0,0]],"hermitian":true}"#;
        assert!(serde_json::from_str::<CMatrix>(bad).is_err());
        let short = r#"{"n":2,"re":[[0,1]],"im":[[0,0],[0,0]]}"#;
        assert!(serde_json::from_str::<CMatrix>(short).is_err());
    }

    #[test]
    fn products() {
        let a = CMatrix::from_real_rows(&[vec![1.0, 2.0], vec![3.0, 4.0]]).unwrap();
        let b = CMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let ab = &a * &b;
        assert_eq!(
            ab,
            CMatrix::from_real_rows(&[vec![2.0, 1.0], vec![4.0, 3.0]]).unwrap()
        );
        assert!(a.matmul(&CMatrix::zeros(3)).is_err());
        assert_eq!(a.trace(), Complex64::new(5.0, 0.0));
    }
}
