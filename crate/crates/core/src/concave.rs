//! Increasing concave functions `φ: [0, ∞) → [0, ∞)` with `φ(0+) = 0`.
//!
//! A [`ConcaveFn`] is either a closed-form family member or a piecewise
//! linear interpolant. The module also hosts the grid diagnostics used
//! throughout the crate: concavity checks, the least concave majorant,
//! the dilation function `M_φ(s) = sup_t φ(st)/φ(t)` and the embedding
//! test into `Λ_log`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// Relative tolerance of every grid diagnostic in this module.
pub const REL_TOL: f64 = 1e-9;

/// Geometric grid with `n ≥ 2` points from `lo` to `hi` inclusive.
pub fn geometric_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo && n >= 2, "bad geometric grid");
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| {
            if i + 1 == n {
                hi
            } else {
                (a + (b - a) * i as f64 / (n - 1) as f64).exp()
            }
        })
        .collect()
}

/// 241 geometrically spaced points on `[1e-12, 1e12]`. Every "sup over t"
/// quantity in the crate is a maximum over this grid, hence a lower bound of
/// the true supremum.
pub fn default_probe_grid() -> Vec<f64> {
    geometric_grid(1e-12, 1e12, 241)
}

/// Piecewise linear function through the origin.
///
/// Linear through `(0, 0)` before the first knot, linear between knots and
/// extended past the last knot with the final chord slope, clamped at zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PwlRepr", into = "PwlRepr")]
pub struct Pwl {
    knots: Vec<(f64, f64)>,
    final_slope: f64,
}

#[derive(Serialize, Deserialize)]
struct PwlRepr {
    knots: Vec<[f64; 2]>,
}

impl TryFrom<PwlRepr> for Pwl {
    type Error = LabError;
    fn try_from(r: PwlRepr) -> Result<Self> {
        Pwl::new(r.knots.into_iter().map(|[t, v]| (t, v)).collect())
    }
}

impl From<Pwl> for PwlRepr {
    fn from(p: Pwl) -> Self {
        PwlRepr {
            knots: p.knots.iter().map(|&(t, v)| [t, v]).collect(),
        }
    }
}

impl Pwl {
    /// Validates the structural invariants: abscissae nonnegative and strictly
    /// increasing, values nonnegative and nondecreasing, value 0 at `t = 0`.
    /// Concavity is not enforced here; see [`check_concave_increasing`].
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(LabError::EmptyInput);
        }
        for (i, &(t, v)) in knots.iter().enumerate() {
            if !(t.is_finite() && v.is_finite() && t >= 0.0 && v >= 0.0) {
                return Err(LabError::invalid(format!(
                    "knot {i} = ({t}, {v}) out of range"
                )));
            }
            if i > 0 {
                let (tp, vp) = knots[i - 1];
                if t <= tp {
                    return Err(LabError::invalid(
                        "knot abscissae must be strictly increasing",
                    ));
                }
                if v < vp {
                    return Err(LabError::invalid("knot values must be nondecreasing"));
                }
            }
        }
        if knots[0].0 == 0.0 && knots[0].1 != 0.0 {
            return Err(LabError::invalid("value at t = 0 must be 0"));
        }
        if knots.len() == 1 && knots[0].0 == 0.0 {
            return Err(LabError::invalid(
                "a single knot at the origin defines nothing",
            ));
        }
        let n = knots.len();
        let (tl, vl) = knots[n - 1];
        let (tp, vp) = if n >= 2 { knots[n - 2] } else { (0.0, 0.0) };
        let final_slope = ((vl - vp) / (tl - tp)).max(0.0);
        Ok(Pwl { knots, final_slope })
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    /// Slope used past the last knot.
    pub fn final_slope(&self) -> f64 {
        self.final_slope
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let k = &self.knots;
        let (t0, v0) = k[0];
        if t <= t0 {
            return v0 * (t / t0);
        }
        let (tl, vl) = k[k.len() - 1];
        if t >= tl {
            return vl + self.final_slope * (t - tl);
        }
        // first knot with abscissa > t
        let j = k.partition_point(|&(tk, _)| tk <= t);
        let (ta, va) = k[j - 1];
        let (tb, vb) = k[j];
        va + (vb - va) * (t - ta) / (tb - ta)
    }
}

/// An increasing concave function with `φ(0+) = 0`.
///
/// JSON forms: `{"kind":"power","alpha":0.5}` (optional `"coef"`, default 1),
/// `{"kind":"log1p"}`, `{"kind":"phi_zero"}`, `{"kind":"pwl","knots":[[t,v],...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConcaveRepr", into = "ConcaveRepr")]
pub enum ConcaveFn {
    /// `coef · t^alpha`, `0 < alpha ≤ 1`.
    Power {
        alpha: f64,
        coef: f64,
    },
    /// `log(1 + t)`.
    Log1p,
    /// `t·log(e²/t)` on `(0, 1)` and `2·log(e·t)` on `[1, ∞)`.
    ///
    /// Increasing with `φ(t)/t` decreasing, but its slope jumps from 1 to 2
    /// at `t = 1`, so it is quasiconcave rather than concave.
    PhiZero,
    PiecewiseLinear(Pwl),
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum ConcaveRepr {
    Power {
        alpha: f64,
        #[serde(default = "one", skip_serializing_if = "is_one")]
        coef: f64,
    },
    Log1p,
    PhiZero,
    Pwl(Pwl),
}

fn one() -> f64 {
    1.0
}

fn is_one(x: &f64) -> bool {
    *x == 1.0
}

impl TryFrom<ConcaveRepr> for ConcaveFn {
    type Error = LabError;
    fn try_from(r: ConcaveRepr) -> Result<Self> {
        match r {
            ConcaveRepr::Power { alpha, coef } => ConcaveFn::scaled_power(alpha, coef),
            ConcaveRepr::Log1p => Ok(ConcaveFn::Log1p),
            ConcaveRepr::PhiZero => Ok(ConcaveFn::PhiZero),
            ConcaveRepr::Pwl(p) => Ok(ConcaveFn::PiecewiseLinear(p)),
        }
    }
}

impl From<ConcaveFn> for ConcaveRepr {
    fn from(f: ConcaveFn) -> Self {
        match f {
            ConcaveFn::Power { alpha, coef } => ConcaveRepr::Power { alpha, coef },
            ConcaveFn::Log1p => ConcaveRepr::Log1p,
            ConcaveFn::PhiZero => ConcaveRepr::PhiZero,
            ConcaveFn::PiecewiseLinear(p) => ConcaveRepr::Pwl(p),
        }
    }
}

impl fmt::Display for ConcaveFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConcaveFn::Power { alpha, coef } if *coef == 1.0 => write!(f, "power({alpha})"),
            ConcaveFn::Power { alpha, coef } => write!(f, "{coef}*power({alpha})"),
            ConcaveFn::Log1p => write!(f, "log1p"),
            ConcaveFn::PhiZero => write!(f, "phi_zero"),
            ConcaveFn::PiecewiseLinear(p) => write!(f, "pwl[{} knots]", p.knots.len()),
        }
    }
}

impl ConcaveFn {
    /// `t^alpha`.
    pub fn power(alpha: f64) -> Result<Self> {
        Self::scaled_power(alpha, 1.0)
    }

    pub fn scaled_power(alpha: f64, coef: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(LabError::invalid(format!(
                "power exponent {alpha} outside (0, 1]"
            )));
        }
        if !(coef > 0.0 && coef.is_finite()) {
            return Err(LabError::invalid(format!(
                "power coefficient {coef} must be positive"
            )));
        }
        Ok(ConcaveFn::Power { alpha, coef })
    }

    pub fn pwl(knots: Vec<(f64, f64)>) -> Result<Self> {
        Pwl::new(knots).map(ConcaveFn::PiecewiseLinear)
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            ConcaveFn::Power { alpha, coef } => {
                if *alpha == 1.0 {
                    coef * t
                } else {
                    coef * t.powf(*alpha)
                }
            }
            ConcaveFn::Log1p => t.ln_1p(),
            ConcaveFn::PhiZero => {
                if t < 1.0 {
                    t * (2.0 - t.ln())
                } else {
                    2.0 * (1.0 + t.ln())
                }
            }
            ConcaveFn::PiecewiseLinear(p) => p.eval(t),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub t: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConcavityDiagnostic {
    pub passed: bool,
    pub first_violation: Option<Violation>,
    pub grid: String,
}

fn exceeds(a: f64, b: f64) -> bool {
    // a > b beyond the relative tolerance
    a - b > REL_TOL * a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Checks monotonicity, chord-slope monotonicity and `φ(t)/t` nonincreasing
/// on a sorted grid, all within [`REL_TOL`].
pub fn check_concave_increasing(f: &ConcaveFn, grid: &[f64]) -> ConcavityDiagnostic {
    let desc = match (grid.first(), grid.last()) {
        (Some(a), Some(b)) => format!("{} points on [{a:e}, {b:e}]", grid.len()),
        _ => "empty".to_string(),
    };
    let fail = |t: f64, detail: String| ConcavityDiagnostic {
        passed: false,
        first_violation: Some(Violation { t, detail }),
        grid: desc.clone(),
    };
    if grid.len() < 3 {
        return fail(f64::NAN, "grid needs at least 3 points".into());
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) || grid[0] < 0.0 {
        return fail(
            f64::NAN,
            "grid must be nonnegative and strictly increasing".into(),
        );
    }
    let vals: Vec<f64> = grid.iter().map(|&t| f.eval(t)).collect();
    let mut prev_slope: Option<f64> = None;
    for i in 1..grid.len() {
        let (ta, tb) = (grid[i - 1], grid[i]);
        let (va, vb) = (vals[i - 1], vals[i]);
        if exceeds(va, vb) {
            return fail(tb, format!("decreased from {va} to {vb}"));
        }
        let slope = (vb - va) / (tb - ta);
        if let Some(ps) = prev_slope {
            if exceeds(slope, ps) {
                return fail(tb, format!("slope increased from {ps} to {slope}"));
            }
        }
        prev_slope = Some(slope);
        if ta > 0.0 && exceeds(vb / tb, va / ta) {
            return fail(
                tb,
                format!("f(t)/t increased from {} to {}", va / ta, vb / tb),
            );
        }
    }
    ConcavityDiagnostic {
        passed: true,
        first_violation: None,
        grid: desc,
    }
}

/// Upper concave envelope of `points ∪ {(0, 0)}`, returned as a
/// piecewise linear function.
///
/// Duplicate abscissae keep their largest value. The envelope is cut at its
/// maximum, so the result is nondecreasing and extends flat to the right.
pub fn least_concave_majorant(points: &[(f64, f64)]) -> Result<ConcaveFn> {
    if points.is_empty() {
        return Err(LabError::EmptyInput);
    }
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(points.len() + 1);
    pts.push((0.0, 0.0));
    for &(t, v) in points {
        if !(t.is_finite() && v.is_finite() && t >= 0.0 && v >= 0.0) {
            return Err(LabError::invalid(format!("point ({t}, {v}) out of range")));
        }
        pts.push((t, v));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.total_cmp(&a.1)));
    pts.dedup_by(|later, earlier| later.0 == earlier.0);
    if pts[0].1 > 0.0 {
        // a positive value requested at t = 0 cannot be majorised by φ(0) = 0
        return Err(LabError::invalid("majorant must vanish at the origin"));
    }

    // Andrew's monotone chain, upper hull only.
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
    for p in pts {
        while hull.len() >= 2 {
            let (o, a) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (a.0 - o.0) * (p.1 - o.1) - (a.1 - o.1) * (p.0 - o.0);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let peak_value = hull.iter().map(|p| p.1).fold(0.0, f64::max);
    if peak_value == 0.0 {
        return Err(LabError::invalid(
            "all points vanish; the majorant is identically 0",
        ));
    }
    let peak = hull.iter().rposition(|p| p.1 == peak_value).unwrap_or(0);
    let last_t = hull[hull.len() - 1].0;
    hull.truncate(peak + 1);
    if hull[peak].0 < last_t {
        // points beyond the peak are covered by a flat final piece
        hull.push((last_t, peak_value));
    }
    ConcaveFn::pwl(hull)
}

/// `M_f(s) = max_t f(st)/f(t)` over `probe_grid`.
pub fn dilation_function(f: &ConcaveFn, s: f64, probe_grid: &[f64]) -> f64 {
    probe_grid
        .iter()
        .filter_map(|&t| {
            let base = f.eval(t);
            (t > 0.0 && base > 0.0).then(|| f.eval(s * t) / base)
        })
        .fold(0.0, f64::max)
}

/// Dilation exponents of the fundamental function, estimated at
/// `s = 2^{-20}` and `s = 2^{20}` on the default probe grid.
///
/// Returns `(lower, upper)` with `lower = log M(2^-20) / log 2^-20` and
/// `upper = log M(2^20) / log 2^20`.
pub fn dilation_indices(f: &ConcaveFn) -> (f64, f64) {
    let grid = default_probe_grid();
    let small = 2f64.powi(-20);
    let large = 2f64.powi(20);
    let lower = dilation_function(f, small, &grid).ln() / small.ln();
    let upper = dilation_function(f, large, &grid).ln() / large.ln();
    (lower, upper)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Embedding {
    /// Heuristic verdict for `Λ_φ ⊂ Λ_log`.
    pub holds: bool,
    /// `max_t log(1+t)/φ(t)` over the default probe grid.
    pub constant: f64,
}

/// Heuristic test of `Λ_φ ⊂ Λ_log` through the sufficient condition
/// `log(1+t) ≤ c·φ(t)`.
///
/// `constant` is the grid maximum of `log(1+t)/φ(t)`. `holds` additionally
/// requires that the ratio grows by less than 1% across the last two probed
/// decades, i.e. that the maximum is not still being driven up at the right
/// end of the grid.
pub fn embeds_in_lambda_log(f: &ConcaveFn) -> Embedding {
    let grid = default_probe_grid();
    let ratios: Vec<f64> = grid.iter().map(|&t| t.ln_1p() / f.eval(t)).collect();
    let constant = ratios.iter().copied().fold(0.0, f64::max);
    let last = grid[grid.len() - 1];
    let window: Vec<f64> = grid
        .iter()
        .zip(&ratios)
        .filter(|(t, _)| **t >= last / 100.0 * (1.0 - 1e-12))
        .map(|(_, r)| *r)
        .collect();
    let first = window[0];
    let window_max = window.iter().copied().fold(0.0, f64::max);
    let holds = constant.is_finite() && window_max <= first * 1.01;
    Embedding { holds, constant }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pw(k: &[(f64, f64)]) -> ConcaveFn {
        ConcaveFn::pwl(k.to_vec()).unwrap()
    }

    #[test]
    fn eval_examples() {
        assert_eq!(ConcaveFn::PhiZero.eval(1.0), 2.0);
        assert_eq!(ConcaveFn::power(0.5).unwrap().eval(4.0), 2.0);
        for f in [
            ConcaveFn::power(0.3).unwrap(),
            ConcaveFn::Log1p,
            ConcaveFn::PhiZero,
            pw(&[(1.0, 1.0)]),
        ] {
            assert_eq!(f.eval(0.0), 0.0);
        }
        // continuity of the two PhiZero branches at t = 1
        let below = ConcaveFn::PhiZero.eval(1.0 - 1e-12);
        assert!((below - 2.0).abs() < 1e-11);
    }

    #[test]
    fn pwl_evaluation_rules() {
        let f = pw(&[(1.0, 2.0), (3.0, 3.0)]);
        assert_eq!(f.eval(0.5), 1.0);
        assert_eq!(f.eval(2.0), 2.5);
        assert_eq!(f.eval(5.0), 4.0);
        // final slope clamped at zero after a flat piece
        let g = pw(&[(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)]);
        assert_eq!(g.eval(100.0), 1.0);
        assert!(ConcaveFn::pwl(vec![(1.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(ConcaveFn::pwl(vec![(0.0, 1.0), (1.0, 2.0)]).is_err());
        assert!(ConcaveFn::pwl(vec![(1.0, 2.0), (2.0, 1.0)]).is_err());
    }

    #[test]
    fn concavity_diagnostics() {
        let g = geometric_grid(1e-6, 1e6, 121);
        assert!(check_concave_increasing(&ConcaveFn::power(0.5).unwrap(), &g).passed);
        let d =
            check_concave_increasing(&pw(&[(0.0, 0.0), (1.0, 1.0), (2.0, 4.0)]), &[0.0, 1.0, 2.0]);
        assert!(!d.passed);
        let v = d.first_violation.unwrap();
        assert_eq!(v.t, 2.0);
        assert!(v.detail.contains("slope"));
        // diagnostic passes iff no violation is recorded
        assert!(check_concave_increasing(&ConcaveFn::Log1p, &g)
            .first_violation
            .is_none());
        assert!(!check_concave_increasing(&ConcaveFn::Log1p, &[1.0, 2.0]).passed);
    }

    #[test]
    fn phi_zero_is_only_quasiconcave() {
        let g = geometric_grid(1e-3, 1e3, 61);
        let d = check_concave_increasing(&ConcaveFn::PhiZero, &g);
        assert!(!d.passed);
        let t = d.first_violation.unwrap().t;
        assert!(t > 1.0 && t < 1.5, "kink reported at {t}");
        // monotone with φ(t)/t decreasing on both sides of the kink
        for side in [
            geometric_grid(1e-6, 0.999, 50),
            geometric_grid(1.0, 1e6, 50),
        ] {
            assert!(check_concave_increasing(&ConcaveFn::PhiZero, &side).passed);
        }
    }

    #[test]
    fn majorant_examples() {
        let m = least_concave_majorant(&[(0.0, 0.0), (1.0, 1.0), (2.0, 1.0), (4.0, 2.0)]).unwrap();
        match &m {
            ConcaveFn::PiecewiseLinear(p) => {
                assert_eq!(p.knots(), &[(0.0, 0.0), (1.0, 1.0), (4.0, 2.0)])
            }
            _ => unreachable!(),
        }
        assert!((m.eval(2.0) - 4.0 / 3.0).abs() < 1e-15);

        let input = [(0.0, 0.0), (1.0, 1.0), (2.0, 1.5)];
        let m = least_concave_majorant(&input).unwrap();
        for (t, v) in input {
            assert_eq!(m.eval(t), v);
        }

        let m = least_concave_majorant(&[(1.0, 1.0)]).unwrap();
        assert_eq!(m.eval(2.0), 2.0);
        assert_eq!(least_concave_majorant(&[]), Err(LabError::EmptyInput));

        // decreasing tail is replaced by a flat piece
        let m = least_concave_majorant(&[(1.0, 2.0), (2.0, 1.0)]).unwrap();
        assert_eq!(m.eval(2.0), 2.0);
        assert_eq!(m.eval(50.0), 2.0);
    }

    #[test]
    fn dilation_examples() {
        let g = default_probe_grid();
        let sqrt = ConcaveFn::power(0.5).unwrap();
        assert!((dilation_function(&sqrt, 4.0, &g) - 2.0).abs() < 1e-12);
        assert!((dilation_function(&ConcaveFn::Log1p, 1.0, &g) - 1.0).abs() < 1e-15);
        assert!((dilation_function(&ConcaveFn::Log1p, 2.0, &g) - 2.0).abs() < 1e-3);

        let (lo, hi) = dilation_indices(&sqrt);
        assert!((lo - 0.5).abs() < 0.02 && (hi - 0.5).abs() < 0.02);
        let (lo, hi) = dilation_indices(&ConcaveFn::power(1.0).unwrap());
        assert!((lo - 1.0).abs() < 0.02 && (hi - 1.0).abs() < 0.02);
        let (lo, hi) = dilation_indices(&pw(&[(0.0, 0.0), (1.0, 1.0), (2.0, 1.0)]));
        assert!(lo.abs() < 0.02, "{lo}");
        assert!((hi - 1.0).abs() < 0.02, "{hi}");
    }

    #[test]
    fn embedding_examples() {
        let e = embeds_in_lambda_log(&ConcaveFn::power(1.0).unwrap());
        assert!(e.holds);
        assert!((e.constant - 1.0).abs() < 1e-6);
        let e = embeds_in_lambda_log(&ConcaveFn::Log1p);
        assert!(e.holds);
        assert!((e.constant - 1.0).abs() < 1e-12);
        let e = embeds_in_lambda_log(&ConcaveFn::power(0.5).unwrap());
        assert!(e.holds);
        assert!((e.constant - 0.805).abs() < 0.02, "{}", e.constant);
        // a fundamental function growing slower than log at infinity
        let slow = pw(&[(1.0, 1.0), (2.0, 1.0)]);
        assert!(!embeds_in_lambda_log(&slow).holds);
    }

    #[test]
    fn json_forms() {
        let f: ConcaveFn = serde_json::from_str(r#"{"kind":"power","alpha":0.5}"#).unwrap();
        assert_eq!(f, ConcaveFn::power(0.5).unwrap());
        let f: ConcaveFn = serde_json::from_str(r#"{"kind":"pwl","knots":[[0,0],[1,1]]}"#).unwrap();
        assert_eq!(f.eval(3.0), 3.0);
        for s in [
            r#"{"kind":"log1p"}"#,
            r#"{"kind":"phi_zero"}"#,
            r#"{"kind":"power","alpha":0.25}"#,
        ] {
            let f: ConcaveFn = serde_json::from_str(s).unwrap();
            assert_eq!(serde_json::to_string(&f).unwrap(), s);
        }
        assert!(serde_json::from_str::<ConcaveFn>(r#"{"kind":"power","alpha":1.5}"#).is_err());
        assert!(
            serde_json::from_str::<ConcaveFn>(r#"{"kind":"pwl","knots":[[2,0],[1,1]]}"#).is_err()
        );
    }
}
