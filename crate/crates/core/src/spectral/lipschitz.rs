use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Real piecewise-linear function through `(x_i, f(x_i))`, extended beyond
/// the end knots by the end slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KnotsRepr", into = "KnotsRepr")]
pub struct LipschitzFn {
    knots: Vec<(f64, f64)>,
    lip: f64,
}

#[derive(Serialize, Deserialize)]
struct KnotsRepr {
    knots: Vec<[f64; 2]>,
}

impl TryFrom<KnotsRepr> for LipschitzFn {
    type Error = LabError;
    fn try_from(r: KnotsRepr) -> Result<Self> {
        LipschitzFn::new(r.knots.into_iter().map(|[x, y]| (x, y)).collect())
    }
}

impl From<LipschitzFn> for KnotsRepr {
    fn from(f: LipschitzFn) -> Self {
        KnotsRepr {
            knots: f.knots.iter().map(|&(x, y)| [x, y]).collect(),
        }
    }
}

impl LipschitzFn {
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(LabError::EmptyInput);
        }
        if knots.iter().any(|&(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(LabError::invalid("knots must be finite"));
        }
        if knots.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(LabError::invalid(
                "knot abscissae must be strictly increasing",
            ));
        }
        let lip = knots
            .windows(2)
            .map(|w| ((w[1].1 - w[0].1) / (w[1].0 - w[0].0)).abs())
            .fold(0.0, f64::max);
        Ok(LipschitzFn { knots, lip })
    }

    /// `x ↦ a·x + b`.
    pub fn linear(a: f64, b: f64) -> Self {
        LipschitzFn::new(vec![(0.0, b), (1.0, a + b)]).expect("two finite knots")
    }

    pub fn identity() -> Self {
        Self::linear(1.0, 0.0)
    }

    pub fn constant(c: f64) -> Self {
        LipschitzFn::new(vec![(0.0, c)]).expect("finite knot")
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// `max |slope|`, i.e. `‖f'‖_∞`.
    pub fn lip_constant(&self) -> f64 {
        self.lip
    }

    pub fn eval(&self, x: f64) -> f64 {
        let k = &self.knots;
        if k.len() == 1 {
            return k[0].1;
        }
        let j = k.partition_point(|&(xk, _)| xk <= x).clamp(1, k.len() - 1);
        let ((xa, ya), (xb, yb)) = (k[j - 1], k[j]);
        ya + (yb - ya) * (x - xa) / (xb - xa)
    }
}
