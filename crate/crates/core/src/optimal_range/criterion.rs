use serde::{Deserialize, Serialize};

use crate::concave::{ConcaveFn, Pwl};
use crate::error::{LabError, Result};
use crate::quad;

/// Label attached to trend-based verdicts.
pub const TREND_HEURISTIC: &str =
    "heuristic: ratio increments over the last two decades at either end of the grid";

/// `ψ` extended past the last knot of a piecewise-linear table by a power
/// law fitted over its last two decades. Built-in families are used as is.
#[derive(Debug, Clone)]
pub struct ExtendedPsi {
    psi: ConcaveFn,
    cut: Option<PowerTail>,
}

#[derive(Debug, Clone, Copy)]
struct PowerTail {
    at: f64,
    value: f64,
    beta: f64,
    residual: f64,
}

impl ExtendedPsi {
    pub fn new(psi: &ConcaveFn) -> Result<Self> {
        let cut = match psi {
            ConcaveFn::PiecewiseLinear(p) => Some(power_tail(p)),
            _ => None,
        };
        Ok(ExtendedPsi {
            psi: psi.clone(),
            cut,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self.cut {
            Some(c) if t > c.at => c.value * (t / c.at).powf(c.beta),
            _ => self.psi.eval(t),
        }
    }

    /// `log(ψ(b)/ψ(a)) / log(b/a)`.
    pub fn log_slope(&self, a: f64, b: f64) -> f64 {
        (self.eval(b) / self.eval(a)).ln() / (b / a).ln()
    }

    /// Exponent of the power law that models `ψ` beyond `t`.
    pub fn tail_exponent(&self, t: f64) -> f64 {
        match (&self.psi, self.cut) {
            (ConcaveFn::Power { alpha, .. }, _) => *alpha,
            (_, Some(c)) if t >= c.at => c.beta,
            _ => self.log_slope(t / 100.0, t),
        }
    }

    /// Abscissa past which the power-law extension is used.
    pub fn horizon(&self) -> Option<f64> {
        self.cut.map(|c| c.at)
    }

    pub fn fit(&self) -> Option<(f64, f64)> {
        self.cut.map(|c| (c.beta, c.residual))
    }

    /// `∫_s^∞ ψ(t)/t² dt`.
    pub fn tail_integral(&self, s: f64) -> Result<f64> {
        Ok(criterion_g(&self.psi, s)?.tail / s)
    }
}

fn power_tail(p: &Pwl) -> PowerTail {
    let &(at, value) = p.knots().last().unwrap();
    if p.final_slope() == 0.0 {
        return PowerTail {
            at,
            value,
            beta: 0.0,
            residual: 0.0,
        };
    }
    let v100 = p.eval(at / 100.0);
    let beta = (value / v100).ln() / 100f64.ln();
    let v10 = p.eval(at / 10.0);
    let residual = (v10 - value * 10f64.powf(-beta)).abs() / v10;
    PowerTail {
        at,
        value,
        beta,
        residual,
    }
}

/// `G_ψ(u) = ∫_0^u ψ(t)/t dt + u∫_u^∞ ψ(t)/t² dt`, split into its two terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GBreakdown {
    pub value: f64,
    pub head: f64,
    /// `u·∫_u^∞ ψ(t)/t² dt`.
    pub tail: f64,
    /// Exponent and relative residual of the power-law tail fit, when one
    /// is used.
    pub fit_exponent: Option<f64>,
    pub fit_residual: Option<f64>,
}

/// Closed forms for the built-in families; exact segment integrals plus a
/// power-law tail for piecewise-linear `ψ`.
pub fn criterion_g(psi: &ConcaveFn, u: f64) -> Result<GBreakdown> {
    if !(u > 0.0 && u.is_finite()) {
        return Err(LabError::invalid(format!("u = {u} must be positive")));
    }
    let (head, tail, fit) = match psi {
        ConcaveFn::Power { alpha, coef } => {
            if *alpha >= 1.0 {
                return Err(LabError::TailDivergent {
                    detail: Some("psi is linear".into()),
                });
            }
            let p = coef * u.powf(*alpha);
            (p / alpha, p / (1.0 - alpha), None)
        }
        ConcaveFn::Log1p => {
            let h = quad::integrate_to_zero(|t| t.ln_1p() / t, u);
            if !h.converged {
                return Err(LabError::invalid("head integral did not converge"));
            }
            (h.value, u.ln_1p() + u * (1.0 / u).ln_1p(), None)
        }
        ConcaveFn::PhiZero => {
            let l = u.ln();
            if u >= 1.0 {
                (3.0 + 2.0 * l + l * l, 2.0 * (2.0 + l), None)
            } else {
                (3.0 * u - u * l, u * (-2.0 * l + 0.5 * l * l + 4.0), None)
            }
        }
        ConcaveFn::PiecewiseLinear(p) => {
            let t = power_tail(p);
            if t.beta >= 1.0 {
                return Err(LabError::TailDivergent {
                    detail: Some(format!("fitted tail exponent {:.4}", t.beta)),
                });
            }
            let (h, tl) = pwl_terms(p, &t, u);
            (h, tl, Some((t.beta, t.residual)))
        }
    };
    Ok(GBreakdown {
        value: head + tail,
        head,
        tail,
        fit_exponent: fit.map(|f| f.0),
        fit_residual: fit.map(|f| f.1),
    })
}

fn pwl_terms(p: &Pwl, tail_model: &PowerTail, u: f64) -> (f64, f64) {
    let mut pts = vec![(0.0, 0.0)];
    pts.extend_from_slice(p.knots());
    let t_end = tail_model.at;
    let mut head = 0.0;
    let mut tail = 0.0;
    for w in pts.windows(2) {
        let ((ta, va), (tb, vb)) = (w[0], w[1]);
        let m = (vb - va) / (tb - ta);
        let a = va - m * ta;
        // ψ = a + m t on [ta, tb]
        if ta < u {
            let hi = tb.min(u);
            head += if ta == 0.0 {
                m * hi
            } else {
                a * (hi / ta).ln() + m * (hi - ta)
            };
        }
        if tb > u {
            let lo = ta.max(u);
            tail += a * (1.0 / lo - 1.0 / tb) + m * (tb / lo).ln();
        }
    }
    let PowerTail { value, beta, .. } = *tail_model;
    if u > t_end {
        head += if beta == 0.0 {
            value * (u / t_end).ln()
        } else {
            value / beta * ((u / t_end).powf(beta) - 1.0)
        };
    }
    let s = u.max(t_end);
    let ext = value * (s / t_end).powf(beta);
    tail += ext / (s * (1.0 - beta));
    (head, u * tail)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    BoundedWithC,
    TailDivergent,
    RatioUnboundedTrend,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionFlags {
    pub tail_divergent: bool,
    /// Ratios keep growing towards the upper end of the grid.
    pub growing_high: bool,
    /// Ratios keep growing towards the lower end of the grid.
    pub growing_low: bool,
    pub trend_rule: String,
    /// Largest tail-fit residual met while evaluating `G`.
    pub fit_residual: Option<f64>,
}

/// Ratios of the criterion's left-hand side to its right-hand side.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionReport {
    /// `u` for the continuous criterion, `n` for the discrete one.
    pub abscissae: Vec<f64>,
    pub g_values: Vec<f64>,
    pub phi_values: Vec<f64>,
    pub ratios: Vec<f64>,
    pub c_estimate: f64,
    pub verdict: Verdict,
    pub flags: CriterionFlags,
}

fn divergent_report(abscissae: Vec<f64>, phi_values: Vec<f64>) -> CriterionReport {
    let n = abscissae.len();
    CriterionReport {
        abscissae,
        g_values: vec![f64::INFINITY; n],
        phi_values,
        ratios: vec![f64::INFINITY; n],
        c_estimate: f64::INFINITY,
        verdict: Verdict::TailDivergent,
        flags: CriterionFlags {
            tail_divergent: true,
            growing_high: false,
            growing_low: false,
            trend_rule: TREND_HEURISTIC.into(),
            fit_residual: None,
        },
    }
}

/// Index of the abscissa closest (in log scale) to `target`.
fn nearest(xs: &[f64], target: f64) -> usize {
    let lt = target.ln();
    (0..xs.len())
        .min_by(|&i, &j| (xs[i].ln() - lt).abs().total_cmp(&(xs[j].ln() - lt).abs()))
        .unwrap()
}

/// Growth over the last decade that is both visible (1%) and not decaying
/// geometrically relative to the decade before.
fn keeps_growing(end: f64, one: f64, two: f64) -> bool {
    let d1 = end - one;
    let d2 = one - two;
    d1 > 0.01 * end && d1 > 0.5 * d2
}

fn trend_flags(xs: &[f64], ratios: &[f64]) -> (bool, bool) {
    let r = |t: f64| ratios[nearest(xs, t)];
    let (first, last) = (xs[0], xs[xs.len() - 1]);
    let high = keeps_growing(ratios[ratios.len() - 1], r(last / 10.0), r(last / 100.0));
    let low = keeps_growing(ratios[0], r(first * 10.0), r(first * 100.0));
    (high, low)
}

fn finish(
    abscissae: Vec<f64>,
    g_values: Vec<f64>,
    phi_values: Vec<f64>,
    tail_divergent: bool,
    check_low: bool,
    fit_residual: Option<f64>,
) -> CriterionReport {
    let ratios: Vec<f64> = g_values
        .iter()
        .zip(&phi_values)
        .map(|(g, p)| g / p)
        .collect();
    let c_estimate = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (growing_high, low) = trend_flags(&abscissae, &ratios);
    let growing_low = check_low && low;
    let verdict = if growing_high || growing_low || tail_divergent {
        Verdict::RatioUnboundedTrend
    } else {
        Verdict::BoundedWithC
    };
    CriterionReport {
        abscissae,
        g_values,
        phi_values,
        ratios,
        c_estimate,
        verdict,
        flags: CriterionFlags {
            tail_divergent,
            growing_high,
            growing_low,
            trend_rule: TREND_HEURISTIC.into(),
            fit_residual,
        },
    }
}

/// `G_ψ(u)/φ(u)` over a geometric grid spanning at least 8 decades.
///
/// A divergent tail integral yields a report with verdict `tail_divergent`
/// rather than an error.
pub fn criterion_continuous(
    phi: &ConcaveFn,
    psi: &ConcaveFn,
    u_grid: &[f64],
) -> Result<CriterionReport> {
    if u_grid.len() < 2 || (u_grid[u_grid.len() - 1] / u_grid[0]).log10() < 8.0 - 1e-9 {
        return Err(LabError::invalid("u grid must span at least 8 decades"));
    }
    let phi_values: Vec<f64> = u_grid.iter().map(|&u| phi.eval(u)).collect();
    let mut g_values = Vec::with_capacity(u_grid.len());
    let mut residual: Option<f64> = None;
    for &u in u_grid {
        match criterion_g(psi, u) {
            Ok(g) => {
                if let Some(r) = g.fit_residual {
                    residual = Some(residual.map_or(r, |x| x.max(r)));
                }
                g_values.push(g.value);
            }
            Err(LabError::TailDivergent { .. }) => {
                return Ok(divergent_report(u_grid.to_vec(), phi_values));
            }
            Err(e) => return Err(e),
        }
    }
    Ok(finish(
        u_grid.to_vec(),
        g_values,
        phi_values,
        false,
        true,
        residual,
    ))
}

/// `Σ_{k>n} φ(k)/k²` for `n = N`; `None` when it diverges.
///
/// Built-in families use `∫_{N+1/2}^∞ f + f'(N+1/2)/24` with `f = φ/t²` in
/// closed form (midpoint rule with its leading correction); tables use the
/// midpoint of the bracket `[∫_{N+1}^∞ f, ∫_N^∞ f]`.
fn discrete_tail(phi: &ConcaveFn, n: usize) -> Result<Option<f64>> {
    let nf = n as f64;
    let m = nf + 0.5;
    // f'(m) = (φ'(m)·m - 2φ(m))/m³
    let correction = |dphi: f64| (dphi * m - 2.0 * phi.eval(m)) / (m * m * m) / 24.0;
    Ok(match phi {
        ConcaveFn::Power { alpha, coef } => {
            if *alpha >= 1.0 {
                None
            } else {
                let int = coef * m.powf(alpha - 1.0) / (1.0 - alpha);
                Some(int + correction(coef * alpha * m.powf(alpha - 1.0)))
            }
        }
        ConcaveFn::Log1p => Some(m.ln_1p() / m + (1.0 / m).ln_1p() + correction(1.0 / (1.0 + m))),
        ConcaveFn::PhiZero => Some(2.0 * (2.0 + m.ln()) / m + correction(2.0 / m)),
        ConcaveFn::PiecewiseLinear(_) => {
            let ext = ExtendedPsi::new(phi)?;
            match (ext.tail_integral(nf + 1.0), ext.tail_integral(nf)) {
                (Ok(lo), Ok(hi)) => Some(0.5 * (lo + hi)),
                (Err(LabError::TailDivergent { .. }), _)
                | (_, Err(LabError::TailDivergent { .. })) => None,
                (Err(e), _) | (_, Err(e)) => return Err(e),
            }
        }
    })
}

/// `[(1/(n+1))Σ_{k=1}^n φ(k)/k + Σ_{k>n} φ(k)/k²] / (φ(n)/n)` for
/// `n = 1..=N`.
///
/// When the infinite tail diverges the ratios are truncated at `N` (lower
/// bounds), `tail_divergent` is flagged, and the verdict is
/// `ratio_unbounded_trend`.
pub fn criterion_discrete(phi: &ConcaveFn, n_max: usize) -> Result<CriterionReport> {
    if n_max < 64 {
        return Err(LabError::invalid("N must be at least 64"));
    }
    let remainder = discrete_tail(phi, n_max)?;
    let terms: Vec<f64> = (1..=n_max)
        .map(|k| phi.eval(k as f64) / (k as f64).powi(2))
        .collect();
    // suffix[i] = Σ_{k=i+1}^{N} φ(k)/k², i = 0..=N
    let mut suffix = vec![0.0; n_max + 1];
    for i in (0..n_max).rev() {
        suffix[i] = suffix[i + 1] + terms[i];
    }
    let mut head = 0.0;
    let mut abscissae = Vec::with_capacity(n_max);
    let mut g_values = Vec::with_capacity(n_max);
    let mut phi_values = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let nf = n as f64;
        let pn = phi.eval(nf);
        head += pn / nf;
        abscissae.push(nf);
        g_values.push(head / (nf + 1.0) + suffix[n] + remainder.unwrap_or(0.0));
        phi_values.push(pn / nf);
    }
    Ok(finish(
        abscissae,
        g_values,
        phi_values,
        remainder.is_none(),
        false,
        None,
    ))
}
