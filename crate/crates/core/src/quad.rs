//! Gauss–Legendre quadrature on geometrically spaced panels.
//!
//! Integrals over `(0, u)` and `(u, ∞)` are mapped to the logarithmic
//! variable `s = ln t` and split into panels of unit width aligned at integer
//! `s`, so a kink of the integrand at `t = 1` always falls on a panel edge.

use std::sync::OnceLock;

pub const GL_ORDER: usize = 16;

/// Nodes and weights of the 16-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre_rule() -> &'static ([f64; GL_ORDER], [f64; GL_ORDER]) {
    static RULE: OnceLock<([f64; GL_ORDER], [f64; GL_ORDER])> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = GL_ORDER;
        let mut nodes = [0.0; GL_ORDER];
        let mut weights = [0.0; GL_ORDER];
        for i in 0..n {
            // Newton iteration on P_n from the Chebyshev-like initial guess.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let kf = k as f64;
                    let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = x;
            weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        (nodes, weights)
    })
}

/// 16-point Gauss–Legendre approximation of `∫_a^b f`.
pub fn gauss_legendre<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    let (nodes, weights) = gauss_legendre_rule();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    nodes
        .iter()
        .zip(weights.iter())
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Composite rule with `panels` equal panels on `[a, b]`.
pub fn composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + h * i as f64;
            let hi = if i + 1 == panels { b } else { lo + h };
            gauss_legendre(&f, lo, hi)
        })
        .sum()
}

/// `∫_a^b f(t) dt` for `0 < a < b`, on unit panels in `ln t`.
pub fn integrate_geometric<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    if !(a > 0.0 && b > a) {
        return 0.0;
    }
    let (sa, sb) = (a.ln(), b.ln());
    let g = |s: f64| {
        let t = s.exp();
        f(t) * t
    };
    let mut total = 0.0;
    let mut lo = sa;
    while lo < sb {
        let hi = (lo.floor() + 1.0).min(sb);
        total += gauss_legendre(g, lo, hi);
        lo = hi;
    }
    total
}

const SMALL_PANELS_TO_STOP: usize = 4;
const MAX_PANELS: usize = 1500;

/// Outcome of an improper integral computed panel by panel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Improper {
    pub value: f64,
    pub panels: usize,
    pub converged: bool,
}

/// `∫_0^u f(t) dt` for an integrand that may be (integrably) singular at 0.
pub fn integrate_to_zero<F: Fn(f64) -> f64>(f: F, u: f64) -> Improper {
    march(&f, u.ln(), -1.0, -740.0)
}

/// `∫_u^∞ f(t) dt`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, u: f64) -> Improper {
    march(&f, u.ln(), 1.0, 700.0)
}

fn march<F: Fn(f64) -> f64>(f: &F, start: f64, dir: f64, limit: f64) -> Improper {
    let g = |s: f64| {
        let t = s.exp();
        let v = f(t) * t;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut total = 0.0;
    let mut small = 0usize;
    let mut panels = 0usize;
    let mut edge = start;
    loop {
        let next = if dir < 0.0 {
            if edge.fract() == 0.0 {
                edge - 1.0
            } else {
                edge.floor()
            }
        } else if edge.fract() == 0.0 {
            edge + 1.0
        } else {
            edge.ceil()
        };
        let piece = if dir < 0.0 {
            gauss_legendre(g, next, edge)
        } else {
            gauss_legendre(g, edge, next)
        };
        total += piece;
        panels += 1;
        if piece.abs() <= 1e-16 * total.abs() || piece == 0.0 {
            small += 1;
        } else {
            small = 0;
        }
        if small >= SMALL_PANELS_TO_STOP {
            return Improper {
                value: total,
                panels,
                converged: true,
            };
        }
        edge = next;
        let past = if dir < 0.0 {
            edge <= limit
        } else {
            edge >= limit
        };
        if past || panels >= MAX_PANELS {
            return Improper {
                value: total,
                panels,
                converged: false,
            };
        }
    }
}
