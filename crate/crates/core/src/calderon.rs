//! The Calderón operator `S`, its discrete analogue, and the Hilbert
//! transform of step functions.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::concave::{geometric_grid, ConcaveFn};
use crate::error::{LabError, Result};
use crate::optimal_range::{criterion_g, ExtendedPsi};
use crate::rearrangement::{DecreasingFn, DecreasingStep, Seq, StepFn};

/// `s_u(t) = (Sχ_(0,u))(t)`.
pub fn s_indicator(u: f64, t: f64) -> f64 {
    if t < u {
        1.0 + (u / t).ln()
    } else {
        u / t
    }
}

/// `∫_0^t s_u`.
fn s_indicator_antiderivative(u: f64, t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t < u {
        t * (2.0 + (u / t).ln())
    } else {
        u * (2.0 + (t / u).ln())
    }
}

/// `Sμ` for a layer-cake `μ = Σ α_k χ_(0,u_k)`, kept symbolic as
/// `Σ α_k s_{u_k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ImageRepr", into = "ImageRepr")]
pub struct CalderonImage {
    layers: Vec<(f64, f64)>,
}

#[derive(Serialize, Deserialize)]
struct ImageRepr {
    layers: Vec<[f64; 2]>,
}

impl TryFrom<ImageRepr> for CalderonImage {
    type Error = LabError;
    fn try_from(r: ImageRepr) -> Result<Self> {
        let mu = DecreasingStep::new(r.layers.into_iter().map(|[a, u]| (a, u)).collect())?;
        Ok(apply_s(&mu))
    }
}

impl From<CalderonImage> for ImageRepr {
    fn from(c: CalderonImage) -> Self {
        ImageRepr {
            layers: c.layers.iter().map(|&(a, u)| [a, u]).collect(),
        }
    }
}

impl CalderonImage {
    pub fn layers(&self) -> &[(f64, f64)] {
        &self.layers
    }

    pub fn eval(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return if self.layers.is_empty() {
                0.0
            } else {
                f64::INFINITY
            };
        }
        self.layers
            .iter()
            .map(|&(a, u)| a * s_indicator(u, t))
            .sum()
    }

    /// `∫_a^b Sμ`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        self.layers
            .iter()
            .map(|&(al, u)| {
                al * (s_indicator_antiderivative(u, b) - s_indicator_antiderivative(u, a))
            })
            .sum()
    }

    /// `Σ α_k u_k`, the coefficient of `1/t` past the support.
    pub fn mass(&self) -> f64 {
        self.layers.iter().map(|&(a, u)| a * u).sum()
    }

    /// `Σ α_k`, the coefficient of `log(1/t)` near zero.
    pub fn log_weight(&self) -> f64 {
        self.layers.iter().map(|&(a, _)| a).sum()
    }

    /// Sum of two images (coefficient concatenation).
    pub fn plus(&self, other: &CalderonImage) -> CalderonImage {
        let mut all = self.layers.clone();
        all.extend_from_slice(&other.layers);
        let mu = DecreasingStep::new(all).expect("image layers are valid");
        apply_s(&mu)
    }
}

impl DecreasingFn for CalderonImage {
    fn eval(&self, t: f64) -> f64 {
        CalderonImage::eval(self, t)
    }

    fn integral_to_one(&self) -> Option<f64> {
        Some(
            self.layers
                .iter()
                .map(|&(a, u)| {
                    if u >= 1.0 {
                        a * (2.0 + u.ln())
                    } else {
                        a * u * (2.0 - u.ln())
                    }
                })
                .sum(),
        )
    }
}

pub fn apply_s(mu: &DecreasingStep) -> CalderonImage {
    CalderonImage {
        layers: mu.layers().to_vec(),
    }
}

/// `(Sx)(t) = (1/t)∫_0^t x + ∫_t^∞ x(s)/s ds`, exact for a step function.
pub fn eval_s_of_step(x: &StepFn, t: f64) -> f64 {
    let mut head = 0.0;
    let mut tail = 0.0;
    for (a, b, v) in x.pieces() {
        if a < t {
            head += v * (b.min(t) - a);
        }
        if b > t {
            tail += v * (b / a.max(t)).ln();
        }
    }
    head / t + tail
}

/// `(S^d a)(n) = (1/(n+1))Σ_{k≤n} a(k) + Σ_{k>n} a(k)/k` for `n = 0..=n_max`.
pub fn apply_sd(a: &Seq, n_max: usize) -> Seq {
    let m = a.entries.len();
    // suffix[k] = Σ_{j ≥ k, j ≥ 1} a(j)/j
    let mut suffix = vec![0.0; m + 1];
    for k in (1..m).rev() {
        suffix[k] = suffix[k + 1] + a.entries[k] / k as f64;
    }
    let mut prefix = 0.0;
    let entries = (0..=n_max)
        .map(|n| {
            prefix += a.get(n);
            let tail = if n + 1 < m { suffix[n + 1] } else { 0.0 };
            prefix / (n + 1) as f64 + tail
        })
        .collect();
    Seq::new(entries)
}

/// Principal-value Hilbert transform `(1/π) PV∫ x(η)/(t - η) dη` of a step
/// function, off its jump points.
pub fn hilbert_of_step(x: &StepFn, t: f64) -> Result<f64> {
    let scale = x.support_end().max(t.abs()).max(f64::MIN_POSITIVE);
    let bp = x.breakpoints();
    let vals = x.values();
    let mut sum = 0.0;
    for (j, &tj) in bp.iter().enumerate() {
        let left = if j == 0 { 0.0 } else { vals[j - 1] };
        let right = vals.get(j).copied().unwrap_or(0.0);
        let jump = right - left;
        if jump == 0.0 {
            continue;
        }
        let d = (t - tj).abs();
        if d <= 1e-12 * scale {
            return Err(LabError::AtSingularity { t });
        }
        sum += jump * d.ln();
    }
    Ok(sum / PI)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertDominationReport {
    /// `|Hx(-t)| - Sμ(t)/(2π)` per grid point.
    pub slacks: Vec<f64>,
    pub min_slack: f64,
    pub violations: Vec<f64>,
    pub passed: bool,
}

/// Checks `|Hx(-t)| ≥ (1/2π)·Sμ(t)` for `x = μ` on a grid of `t > 0`.
pub fn check_hilbert_domination(
    mu: &DecreasingStep,
    t_grid: &[f64],
) -> Result<HilbertDominationReport> {
    let x = mu.to_step_fn();
    let img = apply_s(mu);
    let mut slacks = Vec::with_capacity(t_grid.len());
    let mut violations = Vec::new();
    for &t in t_grid {
        let h = hilbert_of_step(&x, -t)?;
        let slack = h.abs() - img.eval(t) / (2.0 * PI);
        if slack < -1e-12 {
            violations.push(t);
        }
        slacks.push(slack);
    }
    let min_slack = slacks.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(HilbertDominationReport {
        passed: violations.is_empty(),
        slacks,
        min_slack,
        violations,
    })
}

/// Sampled approximation of `μ(Hx)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HilbertSamples {
    /// `(i + 1/2)·cell` for the i-th largest sample.
    pub abscissae: Vec<f64>,
    /// Nonincreasing `|Hx|` samples.
    pub values: Vec<f64>,
    pub cell: f64,
    /// Midpoints dropped because they sat on a jump.
    pub excluded: usize,
    /// `∫ |Hx|` over the window lost by cutting the logarithmic spikes at
    /// the jumps to one cell, estimated from the closed form.
    pub spike_truncation: f64,
}

/// Samples `|Hx|` at cell midpoints of a uniform grid on `[-window, window]`
/// and sorts them, which approximates `μ(Hx)` on `(0, 2·window)` from below
/// near the origin (the integrable spikes at jumps are cut to one cell).
pub fn hilbert_rearrangement_estimate(
    x: &StepFn,
    n_samples: usize,
    window: f64,
) -> Result<HilbertSamples> {
    if n_samples < 1024 {
        return Err(LabError::invalid("at least 1024 samples are needed"));
    }
    if !(window >= 10.0 * x.support_end()) || window <= 0.0 {
        return Err(LabError::invalid(
            "window must cover the support with a 10x margin",
        ));
    }
    let cell = 2.0 * window / n_samples as f64;
    let mut values = Vec::with_capacity(n_samples);
    let mut excluded = 0;
    for i in 0..n_samples {
        let t = -window + (i as f64 + 0.5) * cell;
        match hilbert_of_step(x, t) {
            Ok(v) => values.push(v.abs()),
            Err(_) => excluded += 1,
        }
    }
    values.sort_by(|a, b| b.total_cmp(a));
    let abscissae = (0..values.len()).map(|i| (i as f64 + 0.5) * cell).collect();
    // near a jump of size J, |Hx| ≈ |J|/π·log(1/d); the midpoint rule on the
    // cell around it misses ∫ of that over the cell minus its midpoint value
    let spike_truncation = jumps_with_sizes(x)
        .iter()
        .map(|&(_, j)| j.abs() / PI * cell)
        .sum::<f64>()
        .abs();
    Ok(HilbertSamples {
        abscissae,
        values,
        cell,
        excluded,
        spike_truncation,
    })
}

fn jumps_with_sizes(x: &StepFn) -> Vec<(f64, f64)> {
    let bp = x.breakpoints();
    let vals = x.values();
    (0..bp.len())
        .filter_map(|j| {
            let left = if j == 0 { 0.0 } else { vals[j - 1] };
            let right = vals.get(j).copied().unwrap_or(0.0);
            (right != left).then_some((bp[j], right - left))
        })
        .collect()
}

/// `max_i sample_i / Sμ(x)(abscissa_i)` over the samples.
pub fn hilbert_upper_ratio(samples: &HilbertSamples, x: &StepFn) -> f64 {
    let img = apply_s(&crate::rearrangement::rearrange(x));
    samples
        .abscissae
        .iter()
        .zip(&samples.values)
        .map(|(&t, &v)| {
            let s = img.eval(t);
            if s > 0.0 {
                v / s
            } else {
                0.0
            }
        })
        .fold(0.0, f64::max)
}

/// `‖Sμ‖_{Λψ} = Σ α_k G_ψ(u_k)`.
pub fn image_lorentz_norm(img: &CalderonImage, psi: &ConcaveFn) -> Result<f64> {
    let mut sum = 0.0;
    for &(a, u) in &img.layers {
        sum += a * criterion_g(psi, u)?.value;
    }
    Ok(sum)
}

const DIRECT_NODES: usize = 10_000;

/// `∫ Sμ dψ` by a Stieltjes sum on a geometric grid, independent of the
/// closed form behind [`image_lorentz_norm`].
///
/// Each cell contributes the exact integral of the image times the chord
/// slope of `ψ`; grids of `10⁴` and `5·10³` cells are combined by Richardson
/// extrapolation. The pieces below and above the grid use power fits of `ψ`.
pub fn image_lorentz_norm_direct(img: &CalderonImage, psi: &ConcaveFn) -> Result<f64> {
    if img.layers.is_empty() {
        return Ok(0.0);
    }
    let ext = ExtendedPsi::new(psi)?;
    let u_min = img.layers.first().unwrap().1;
    let u_max = img.layers.last().unwrap().1;
    let lo = u_min * 1e-8;
    let hi = u_max * 1e8;
    let fine = stieltjes(img, &ext, lo, hi, DIRECT_NODES);
    let coarse = stieltjes(img, &ext, lo, hi, DIRECT_NODES / 2);
    let body = (4.0 * fine - coarse) / 3.0;

    let p0 = ext.eval(lo);
    let gamma = ext.log_slope(lo, lo * 100.0);
    let head = if gamma > 0.0 {
        p0 * (img.eval(lo) + img.log_weight() / gamma)
    } else {
        0.0
    };

    let beta = ext.tail_exponent(hi);
    if beta >= 1.0 {
        return Err(LabError::TailDivergent {
            detail: Some(format!("psi grows like t^{beta:.3}")),
        });
    }
    let tail = img.mass() * beta * ext.eval(hi) / (hi * (1.0 - beta));
    Ok(head + body + tail)
}

fn stieltjes(img: &CalderonImage, psi: &ExtendedPsi, lo: f64, hi: f64, nodes: usize) -> f64 {
    let grid = geometric_grid(lo, hi, nodes);
    let mut sum = 0.0;
    let mut prev_psi = psi.eval(grid[0]);
    for w in grid.windows(2) {
        let next_psi = psi.eval(w[1]);
        let slope = (next_psi - prev_psi) / (w[1] - w[0]);
        sum += img.integral(w[0], w[1]) * slope;
        prev_psi = next_psi;
    }
    sum
}
