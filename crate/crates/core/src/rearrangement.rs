//! Step functions, decreasing rearrangements and Lorentz norms.

use serde::{Deserialize, Serialize};

use crate::concave::ConcaveFn;
use crate::error::{LabError, Result};
use crate::quad;

/// Finitely supported step function on `(0, ∞)`.
///
/// `x ≡ values[k-1]` on `(breakpoints[k-1], breakpoints[k]]`, with
/// `breakpoints[0] = 0`, and `x ≡ 0` past the last breakpoint. The stored
/// form is canonical: adjacent equal values are merged and trailing zero
/// pieces are dropped.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepRepr")]
pub struct StepFn {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

#[derive(Deserialize)]
struct StepRepr {
    breakpoints: Vec<f64>,
    values: Vec<f64>,
}

impl TryFrom<StepRepr> for StepFn {
    type Error = LabError;
    fn try_from(r: StepRepr) -> Result<Self> {
        StepFn::new(r.breakpoints, r.values)
    }
}

impl StepFn {
    pub fn new(breakpoints: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if breakpoints.first() != Some(&0.0) {
            return Err(LabError::invalid("breakpoints must start at 0"));
        }
        if breakpoints.len() != values.len() + 1 {
            return Err(LabError::invalid("need exactly one value per interval"));
        }
        if breakpoints.windows(2).any(|w| !(w[1] > w[0]))
            || breakpoints.iter().any(|t| !t.is_finite())
        {
            return Err(LabError::invalid(
                "breakpoints must be finite and strictly increasing",
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(LabError::invalid("values must be finite"));
        }
        let mut bp = vec![0.0];
        let mut vals: Vec<f64> = Vec::with_capacity(values.len());
        for (k, &v) in values.iter().enumerate() {
            let right = breakpoints[k + 1];
            if vals.last() == Some(&v) {
                *bp.last_mut().unwrap() = right;
            } else {
                vals.push(v);
                bp.push(right);
            }
        }
        while vals.last() == Some(&0.0) {
            vals.pop();
            bp.pop();
        }
        Ok(StepFn {
            breakpoints: bp,
            values: vals,
        })
    }

    pub fn zero() -> Self {
        StepFn {
            breakpoints: vec![0.0],
            values: vec![],
        }
    }

    /// `value · χ_(a, b]`.
    pub fn indicator(a: f64, b: f64, value: f64) -> Result<Self> {
        if a == 0.0 {
            StepFn::new(vec![0.0, b], vec![value])
        } else {
            StepFn::new(vec![0.0, a, b], vec![0.0, value])
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Pieces `(a, b, v)` with `x ≡ v` on `(a, b]`.
    pub fn pieces(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(k, &v)| (self.breakpoints[k], self.breakpoints[k + 1], v))
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        let k = self.breakpoints.partition_point(|&b| b < t);
        if k == 0 || k > self.values.len() {
            0.0
        } else {
            self.values[k - 1]
        }
    }

    /// `∫ |x|`.
    pub fn l1_norm(&self) -> f64 {
        self.pieces().map(|(a, b, v)| v.abs() * (b - a)).sum()
    }

    /// Right end of the support.
    pub fn support_end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Breakpoints at which `x` actually jumps.
    pub fn jumps(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut left = 0.0;
        for (k, &v) in self.values.iter().enumerate() {
            if v != left {
                out.push(self.breakpoints[k]);
            }
            left = v;
        }
        if left != 0.0 {
            out.push(self.support_end());
        }
        out
    }
}

/// Nonincreasing step function `Σ_k α_k χ_(0, u_k)` in layer-cake form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LayersRepr", into = "LayersRepr")]
pub struct DecreasingStep {
    layers: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct LayersRepr {
    layers: Vec<[f64; 2]>,
}

impl TryFrom<LayersRepr> for DecreasingStep {
    type Error = LabError;
    fn try_from(r: LayersRepr) -> Result<Self> {
        DecreasingStep::new(r.layers.into_iter().map(|[a, u]| (a, u)).collect())
    }
}

impl From<DecreasingStep> for LayersRepr {
    fn from(d: DecreasingStep) -> Self {
        LayersRepr {
            layers: d.layers.iter().map(|&(a, u)| [a, u]).collect(),
        }
    }
}

impl DecreasingStep {
    /// Builds the canonical form from `(α, u)` pairs in any order: layers with
    /// equal `u` are merged and zero coefficients dropped.
    pub fn new(mut layers: Vec<(f64, f64)>) -> Result<Self> {
        for &(a, u) in &layers {
            if !(a.is_finite() && u.is_finite() && a >= 0.0 && u > 0.0) {
                return Err(LabError::invalid(format!(
                    "layer ({a}, {u}) needs alpha ≥ 0 and u > 0"
                )));
            }
        }
        layers.retain(|&(a, _)| a > 0.0);
        layers.sort_by(|x, y| x.1.total_cmp(&y.1));
        let mut out: Vec<(f64, f64)> = Vec::with_capacity(layers.len());
        for (a, u) in layers {
            match out.last_mut() {
                Some(last) if last.1 == u => last.0 += a,
                _ => out.push((a, u)),
            }
        }
        Ok(DecreasingStep { layers: out })
    }

    pub fn zero() -> Self {
        DecreasingStep { layers: vec![] }
    }

    /// `alpha · χ_(0, u)`.
    pub fn indicator(u: f64, alpha: f64) -> Result<Self> {
        DecreasingStep::new(vec![(alpha, u)])
    }

    pub fn layers(&self) -> &[(f64, f64)] {
        &self.layers
    }

    pub fn is_zero(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return self.max_value();
        }
        let k = self.layers.partition_point(|&(_, u)| u <= t);
        self.layers[k..].iter().map(|&(a, _)| a).sum()
    }

    pub fn max_value(&self) -> f64 {
        self.layers.iter().map(|&(a, _)| a).sum()
    }

    /// Value on the last piece before the support ends.
    pub fn min_positive_value(&self) -> f64 {
        self.layers.last().map(|&(a, _)| a).unwrap_or(0.0)
    }

    pub fn support(&self) -> f64 {
        self.layers.last().map(|&(_, u)| u).unwrap_or(0.0)
    }

    /// `∫ μ = Σ α_k u_k`.
    pub fn integral(&self) -> f64 {
        self.layers.iter().map(|&(a, u)| a * u).sum()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        DecreasingStep::new(self.layers.iter().map(|&(a, u)| (a * c, u)).collect())
    }

    pub fn plus(&self, other: &DecreasingStep) -> Self {
        let mut all = self.layers.clone();
        all.extend_from_slice(&other.layers);
        DecreasingStep::new(all).expect("sum of canonical layers is valid")
    }

    /// The same function written as a [`StepFn`] on `(0, ∞)`.
    pub fn to_step_fn(&self) -> StepFn {
        let mut bp = vec![0.0];
        let mut vals = Vec::with_capacity(self.layers.len());
        let mut remaining = self.max_value();
        for &(a, u) in &self.layers {
            bp.push(u);
            vals.push(remaining);
            remaining -= a;
        }
        StepFn::new(bp, vals).expect("layer breakpoints are increasing")
    }
}

/// Disjoint open intervals in `(0, ∞)`, sorted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalSet {
    intervals: Vec<(f64, f64)>,
}

impl IntervalSet {
    pub fn new(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        intervals.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (i, &(a, b)) in intervals.iter().enumerate() {
            if !(a >= 0.0 && b > a && b.is_finite()) {
                return Err(LabError::invalid(format!("bad interval ({a}, {b})")));
            }
            if i > 0 && a < intervals[i - 1].1 {
                return Err(LabError::invalid("intervals overlap"));
            }
        }
        Ok(IntervalSet { intervals })
    }

    pub fn intervals(&self) -> &[(f64, f64)] {
        &self.intervals
    }

    pub fn measure(&self) -> f64 {
        self.intervals.iter().map(|&(a, b)| b - a).sum()
    }

    /// `χ_Δ` as a step function.
    pub fn indicator(&self) -> StepFn {
        let mut bp = vec![0.0];
        let mut vals = Vec::new();
        for &(a, b) in &self.intervals {
            if a > *bp.last().unwrap() {
                bp.push(a);
                vals.push(0.0);
            }
            bp.push(b);
            vals.push(1.0);
        }
        StepFn::new(bp, vals).expect("disjoint sorted intervals")
    }
}

/// Finitely supported sequence indexed from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Seq {
    pub entries: Vec<f64>,
}

impl Seq {
    pub fn new(entries: Vec<f64>) -> Self {
        Seq { entries }
    }

    /// Standard basis vector `e_k`.
    pub fn unit(k: usize) -> Self {
        let mut entries = vec![0.0; k + 1];
        entries[k] = 1.0;
        Seq { entries }
    }

    pub fn get(&self, k: usize) -> f64 {
        self.entries.get(k).copied().unwrap_or(0.0)
    }

    /// `μ(a)`: absolute values sorted nonincreasing.
    pub fn rearranged(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.entries.iter().map(|x| x.abs()).collect();
        v.sort_by(|a, b| b.total_cmp(a));
        v
    }
}

/// Decreasing rearrangement `μ(|x|)` in layer-cake form.
pub fn rearrange(x: &StepFn) -> DecreasingStep {
    let mut levels: Vec<(f64, f64)> = x
        .pieces()
        .filter(|&(_, _, v)| v != 0.0)
        .map(|(a, b, v)| (v.abs(), b - a))
        .collect();
    levels.sort_by(|p, q| q.0.total_cmp(&p.0));
    // distinct magnitudes a_1 > a_2 > ... with cumulative measures U_j give
    // μ = Σ_j (a_j - a_{j+1}) χ_(0, U_j)
    let mut grouped: Vec<(f64, f64)> = Vec::new();
    for (v, len) in levels {
        match grouped.last_mut() {
            Some(g) if g.0 == v => g.1 += len,
            _ => grouped.push((v, len)),
        }
    }
    let mut layers = Vec::with_capacity(grouped.len());
    let mut cumulative = 0.0;
    for (j, &(v, len)) in grouped.iter().enumerate() {
        cumulative += len;
        let next = grouped.get(j + 1).map(|g| g.0).unwrap_or(0.0);
        layers.push((v - next, cumulative));
    }
    DecreasingStep::new(layers).expect("rearrangement layers are valid")
}

/// `m{t : |x(t)| ≥ s}` (closed level sets).
pub fn distribution(x: &StepFn, s: f64) -> f64 {
    x.pieces()
        .filter(|&(_, _, v)| v.abs() >= s)
        .map(|(a, b, _)| b - a)
        .sum()
}

/// `‖μ‖_{Λ_φ} = ∫ μ dφ = Σ_k α_k φ(u_k)`.
pub fn lorentz_norm(mu: &DecreasingStep, phi: &ConcaveFn) -> f64 {
    lorentz_norm_with(mu, |u| phi.eval(u))
}

/// Lorentz norm for a fundamental function given as a closure.
pub fn lorentz_norm_with<F: Fn(f64) -> f64>(mu: &DecreasingStep, phi: F) -> f64 {
    mu.layers.iter().map(|&(a, u)| a * phi(u)).sum()
}

/// `Σ_n μ(n, a)(φ(n+1) - φ(n))`.
pub fn lorentz_seq_norm(a: &Seq, phi: &ConcaveFn) -> f64 {
    lorentz_weights_norm(&a.rearranged(), phi)
}

/// Lorentz sequence norm of an already nonincreasing nonnegative sequence.
pub fn lorentz_weights_norm(mu: &[f64], phi: &ConcaveFn) -> f64 {
    let mut prev = 0.0;
    let mut sum = 0.0;
    for (n, &m) in mu.iter().enumerate() {
        let next = phi.eval((n + 1) as f64);
        sum += m * (next - prev);
        prev = next;
    }
    sum
}

/// A nonincreasing function on `(0, ∞)`.
pub trait DecreasingFn {
    fn eval(&self, t: f64) -> f64;

    /// `∫_0^1` in closed form, when available.
    fn integral_to_one(&self) -> Option<f64> {
        None
    }
}

impl DecreasingFn for DecreasingStep {
    fn eval(&self, t: f64) -> f64 {
        DecreasingStep::eval(self, t)
    }

    fn integral_to_one(&self) -> Option<f64> {
        Some(self.layers.iter().map(|&(a, u)| a * u.min(1.0)).sum())
    }
}

/// Adapter for an arbitrary closure, integrated by quadrature.
pub struct Sampled<F>(pub F);

impl<F: Fn(f64) -> f64> DecreasingFn for Sampled<F> {
    fn eval(&self, t: f64) -> f64 {
        (self.0)(t)
    }
}

/// `‖z‖_{L1+L∞} = ∫_0^1 z(t) dt` for nonincreasing `z`.
///
/// Exact for step functions and Calderón images; otherwise the function is
/// spot-checked for monotonicity on 64 points and integrated on geometric
/// Gauss–Legendre panels.
pub fn l1_linf_norm<Z: DecreasingFn + ?Sized>(z: &Z) -> Result<f64> {
    if let Some(v) = z.integral_to_one() {
        return Ok(v);
    }
    let probes = crate::concave::geometric_grid(1e-12, 1.0, 64);
    let mut prev = f64::INFINITY;
    for &t in &probes {
        let v = z.eval(t);
        if v > prev * (1.0 + 1e-12) + 1e-300 {
            return Err(LabError::NotDecreasing { t });
        }
        prev = v;
    }
    let r = quad::integrate_to_zero(|t| z.eval(t), 1.0);
    if !r.converged {
        return Err(LabError::invalid("integral over (0, 1) did not converge"));
    }
    Ok(r.value)
}
