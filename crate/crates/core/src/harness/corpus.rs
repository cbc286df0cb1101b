use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::rng::SampleRng;
use crate::error::{LabError, Result};
use crate::rearrangement::{DecreasingStep, IntervalSet, StepFn};
use crate::spectral::{CMatrix, LipschitzFn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusKind {
    /// Nonnegative decreasing steps in layer-cake form.
    StepFunctions,
    /// Sign-changing step functions on `(0, ∞)`.
    SignedSteps,
    IntervalSets,
    GaussianMatrices,
    HermitianPairs,
    LipschitzFunctions,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusParams {
    pub dim: usize,
    pub max_layers: usize,
    /// Width of the `log₁₀` range of breakpoints, centred at 0.
    pub decades: f64,
    /// Width of the `log₁₀` range of layer heights, centred at 0.
    pub alpha_decades: f64,
    /// Every odd-indexed Hermitian pair gets a first matrix with repeated
    /// integer eigenvalues.
    pub repeated_eigenvalues: bool,
    pub knots: usize,
}

impl Default for CorpusParams {
    fn default() -> Self {
        CorpusParams {
            dim: 8,
            max_layers: 8,
            decades: 6.0,
            alpha_decades: 2.0,
            repeated_eigenvalues: false,
            knots: 5,
        }
    }
}

/// Everything needed to regenerate a corpus bit for bit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub kind: CorpusKind,
    pub seed: u64,
    pub size: usize,
    #[serde(default)]
    pub params: CorpusParams,
}

impl CorpusSpec {
    pub fn new(kind: CorpusKind, seed: u64, size: usize) -> Self {
        CorpusSpec {
            kind,
            seed,
            size,
            params: CorpusParams::default(),
        }
    }

    pub fn with_params(mut self, params: CorpusParams) -> Self {
        self.params = params;
        self
    }

    pub fn descriptor(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("corpus spec serializes")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "samples", rename_all = "snake_case")]
pub enum Corpus {
    StepFunctions(Vec<DecreasingStep>),
    SignedSteps(Vec<StepFn>),
    IntervalSets(Vec<IntervalSet>),
    GaussianMatrices(Vec<CMatrix>),
    HermitianPairs(Vec<(CMatrix, CMatrix)>),
    LipschitzFunctions(Vec<LipschitzFn>),
}

impl Corpus {
    pub fn len(&self) -> usize {
        match self {
            Corpus::StepFunctions(v) => v.len(),
            Corpus::SignedSteps(v) => v.len(),
            Corpus::IntervalSets(v) => v.len(),
            Corpus::GaussianMatrices(v) => v.len(),
            Corpus::HermitianPairs(v) => v.len(),
            Corpus::LipschitzFunctions(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

fn validate(spec: &CorpusSpec) -> Result<()> {
    let p = &spec.params;
    let bad = |m: &str| Err(LabError::BadSpec(m.to_string()));
    if spec.size == 0 {
        return bad("size must be at least 1");
    }
    if p.dim == 0 {
        return bad("dim must be at least 1");
    }
    if p.max_layers == 0 {
        return bad("max_layers must be at least 1");
    }
    if !(p.decades > 0.0 && p.decades.is_finite())
        || !(p.alpha_decades >= 0.0 && p.alpha_decades.is_finite())
    {
        return bad("decades must be positive and finite");
    }
    if p.knots < 2 {
        return bad("knots must be at least 2");
    }
    Ok(())
}

fn gen_n<T>(spec: &CorpusSpec, f: impl Fn(&mut SampleRng) -> T) -> Vec<T> {
    (0..spec.size as u64)
        .map(|i| f(&mut SampleRng::new(spec.seed, i)))
        .collect()
}

fn step(rng: &mut SampleRng, p: &CorpusParams) -> DecreasingStep {
    let k = rng.int_in(1, p.max_layers);
    let layers = (0..k)
        .map(|_| {
            let u = rng.log_uniform(-p.decades / 2.0, p.decades / 2.0);
            let a = rng.log_uniform(-p.alpha_decades / 2.0, p.alpha_decades / 2.0);
            (a, u)
        })
        .collect();
    DecreasingStep::new(layers).expect("positive finite layers")
}

fn signed_step(rng: &mut SampleRng, p: &CorpusParams) -> StepFn {
    let k = rng.int_in(1, p.max_layers);
    let mut bp = vec![0.0];
    let mut vals = Vec::with_capacity(k);
    for _ in 0..k {
        let len = rng.log_uniform(-p.decades / 2.0, p.decades / 2.0);
        bp.push(bp.last().unwrap() + len);
        vals.push(rng.normal());
    }
    StepFn::new(bp, vals).expect("increasing breakpoints")
}

fn interval_set(rng: &mut SampleRng, p: &CorpusParams) -> IntervalSet {
    let k = rng.int_in(1, p.max_layers);
    let mut intervals = Vec::with_capacity(k);
    let mut at = 0.0;
    for _ in 0..k {
        at += rng.log_uniform(-p.decades / 2.0, p.decades / 2.0);
        let len = rng.log_uniform(-p.decades / 2.0, p.decades / 2.0);
        intervals.push((at, at + len));
        at += len;
    }
    IntervalSet::new(intervals).expect("disjoint intervals")
}

fn gaussian(rng: &mut SampleRng, n: usize) -> CMatrix {
    let vals: Vec<Complex64> = (0..n * n).map(|_| rng.complex_normal()).collect();
    CMatrix::from_fn(n, |i, j| vals[i * n + j])
}

/// Unitary from Gram–Schmidt on the columns of a complex Gaussian matrix.
fn unitary(rng: &mut SampleRng, n: usize) -> CMatrix {
    let g = gaussian(rng, n);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v: Vec<Complex64> = (0..n).map(|i| g.get(i, j)).collect();
        for _ in 0..2 {
            for q in &cols {
                let proj: Complex64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (x, a) in v.iter_mut().zip(q) {
                    *x -= proj * a;
                }
            }
        }
        let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        cols.push(v.into_iter().map(|z| z / norm).collect());
    }
    CMatrix::from_fn(n, |i, j| cols[j][i])
}

fn hermitian_pair(rng: &mut SampleRng, n: usize, degenerate: bool) -> (CMatrix, CMatrix) {
    let a = if degenerate {
        let u = unitary(rng, n);
        let eig: Vec<f64> = (0..n).map(|_| rng.int_in(0, 2) as f64).collect();
        (&(&u * &CMatrix::diag(&eig)) * &u.adjoint()).hermitian_part()
    } else {
        gaussian(rng, n).hermitian_part()
    };
    let b = gaussian(rng, n).hermitian_part();
    (a, b)
}

/// Knots uniform in `[-3, 3]`, slopes scaled so the Lipschitz constant is 1.
fn lipschitz(rng: &mut SampleRng, p: &CorpusParams) -> LipschitzFn {
    let mut xs: Vec<f64> = (0..p.knots).map(|_| rng.uniform_in(-3.0, 3.0)).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup();
    let slopes: Vec<f64> = (1..xs.len()).map(|_| rng.uniform_in(-1.0, 1.0)).collect();
    let top = slopes
        .iter()
        .map(|s| s.abs())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut knots = vec![(xs[0], rng.normal())];
    for (k, s) in slopes.iter().enumerate() {
        let (x0, y0) = knots[k];
        knots.push((xs[k + 1], y0 + s / top * (xs[k + 1] - x0)));
    }
    LipschitzFn::new(knots).expect("sorted finite knots")
}

pub fn gen_corpus(spec: &CorpusSpec) -> Result<Corpus> {
    validate(spec)?;
    let p = &spec.params;
    Ok(match spec.kind {
        CorpusKind::StepFunctions => Corpus::StepFunctions(gen_n(spec, |r| step(r, p))),
        CorpusKind::SignedSteps => Corpus::SignedSteps(gen_n(spec, |r| signed_step(r, p))),
        CorpusKind::IntervalSets => Corpus::IntervalSets(gen_n(spec, |r| interval_set(r, p))),
        CorpusKind::GaussianMatrices => {
            Corpus::GaussianMatrices(gen_n(spec, |r| gaussian(r, p.dim)))
        }
        CorpusKind::HermitianPairs => {
            let pairs = (0..spec.size as u64)
                .map(|i| {
                    let degenerate = p.repeated_eigenvalues && i % 2 == 1;
                    hermitian_pair(&mut SampleRng::new(spec.seed, i), p.dim, degenerate)
                })
                .collect();
            Corpus::HermitianPairs(pairs)
        }
        CorpusKind::LipschitzFunctions => {
            Corpus::LipschitzFunctions(gen_n(spec, |r| lipschitz(r, p)))
        }
    })
}

macro_rules! typed_gen {
    ($name:ident, $variant:ident, $t:ty) => {
        pub fn $name(seed: u64, size: usize, params: CorpusParams) -> Result<Vec<$t>> {
            let spec = CorpusSpec {
                kind: CorpusKind::$variant,
                seed,
                size,
                params,
            };
            match gen_corpus(&spec)? {
                Corpus::$variant(v) => Ok(v),
                _ => unreachable!(),
            }
        }
    };
}

typed_gen!(step_corpus, StepFunctions, DecreasingStep);
typed_gen!(signed_step_corpus, SignedSteps, StepFn);
typed_gen!(interval_corpus, IntervalSets, IntervalSet);
typed_gen!(gaussian_corpus, GaussianMatrices, CMatrix);
typed_gen!(hermitian_pair_corpus, HermitianPairs, (CMatrix, CMatrix));
typed_gen!(lipschitz_corpus, LipschitzFunctions, LipschitzFn);
