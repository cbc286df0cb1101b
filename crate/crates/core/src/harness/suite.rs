use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::corpus::{
    gaussian_corpus, hermitian_pair_corpus, interval_corpus, lipschitz_corpus, signed_step_corpus,
    step_corpus, CorpusKind, CorpusParams, CorpusSpec,
};
use super::report::ExperimentReport;
use crate::calderon::{
    apply_s, check_hilbert_domination, eval_s_of_step, hilbert_rearrangement_estimate,
    hilbert_upper_ratio,
};
use crate::concave::{geometric_grid, ConcaveFn};
use crate::error::{LabError, Result};
use crate::optimal_range::{
    boundedness_probe, check_phi0_maximality, criterion_continuous, criterion_discrete,
    psi_limit_check, witness_general, witness_indicator, PsiTable, PsiTableConfig, Verdict,
};
use crate::par::{map_slice, Exec};
use crate::rearrangement::DecreasingStep;
use crate::spectral::{
    commutator_identity_check, lipschitz_probe, truncation_range_probe, weak_l1_probe, CMatrix,
    LipschitzFn,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    CriterionContinuous,
    CriterionDiscrete,
    PsiLimit,
    Boundedness,
    WitnessIndicator,
    WitnessGeneral,
    Phi0Maximality,
    HilbertDomination,
    HilbertUpper,
    CalderonFactor2,
    WeakL1,
    TruncationRange,
    CommutatorIdentity,
    Lipschitz,
}

impl Experiment {
    pub const ALL: [Experiment; 14] = [
        Experiment::CriterionContinuous,
        Experiment::CriterionDiscrete,
        Experiment::PsiLimit,
        Experiment::Boundedness,
        Experiment::WitnessIndicator,
        Experiment::WitnessGeneral,
        Experiment::Phi0Maximality,
        Experiment::HilbertDomination,
        Experiment::HilbertUpper,
        Experiment::CalderonFactor2,
        Experiment::WeakL1,
        Experiment::TruncationRange,
        Experiment::CommutatorIdentity,
        Experiment::Lipschitz,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::CriterionContinuous => "criterion_continuous",
            Experiment::CriterionDiscrete => "criterion_discrete",
            Experiment::PsiLimit => "psi_limit",
            Experiment::Boundedness => "boundedness",
            Experiment::WitnessIndicator => "witness_indicator",
            Experiment::WitnessGeneral => "witness_general",
            Experiment::Phi0Maximality => "phi0_maximality",
            Experiment::HilbertDomination => "hilbert_domination",
            Experiment::HilbertUpper => "hilbert_upper",
            Experiment::CalderonFactor2 => "calderon_factor2",
            Experiment::WeakL1 => "weak_l1",
            Experiment::TruncationRange => "truncation_range",
            Experiment::CommutatorIdentity => "commutator_identity",
            Experiment::Lipschitz => "lipschitz",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub seed: u64,
    pub phi: ConcaveFn,
    /// Size of the function corpora.
    pub samples: usize,
    /// Size of the matrix corpora.
    pub matrix_samples: usize,
    pub dim: usize,
    pub decades: f64,
    pub psi_per_decade: usize,
    pub discrete_n: usize,
    pub experiments: Vec<Experiment>,
    pub exec: Exec,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            seed: 42,
            phi: ConcaveFn::power(0.5).expect("valid exponent"),
            samples: 100,
            matrix_samples: 20,
            dim: 16,
            decades: 6.0,
            psi_per_decade: 40,
            discrete_n: 4096,
            experiments: Experiment::ALL.to_vec(),
            exec: Exec::default(),
        }
    }
}

impl SuiteConfig {
    fn params(&self) -> CorpusParams {
        CorpusParams {
            dim: self.dim,
            decades: self.decades,
            ..CorpusParams::default()
        }
    }

    fn spec(&self, kind: CorpusKind, size: usize, params: CorpusParams) -> CorpusSpec {
        CorpusSpec {
            kind,
            seed: self.seed,
            size,
            params,
        }
    }
}

struct Ctx<'a> {
    cfg: &'a SuiteConfig,
    psi: std::result::Result<ConcaveFn, String>,
}

/// Runs the configured experiments in order; an experiment that errors
/// becomes a failed report and the rest still run.
pub fn run_suite(cfg: &SuiteConfig) -> Vec<ExperimentReport> {
    if cfg.experiments.is_empty() {
        return vec![];
    }
    let table_cfg = PsiTableConfig {
        per_decade: cfg.psi_per_decade,
        exec: cfg.exec,
        ..Default::default()
    };
    let psi = PsiTable::build(&cfg.phi, &table_cfg)
        .map(|t| t.as_concave().clone())
        .map_err(|e| e.to_string());
    let ctx = Ctx { cfg, psi };
    cfg.experiments
        .iter()
        .map(|&exp| {
            let start = Instant::now();
            run_one(exp, &ctx).unwrap_or_else(|e| {
                ExperimentReport::failed(exp.name(), serde_json::json!(null), e.to_string(), start)
            })
        })
        .collect()
}

fn psi(ctx: &Ctx) -> Result<ConcaveFn> {
    ctx.psi.clone().map_err(LabError::InvalidInput)
}

fn collect<T>(v: Vec<Result<T>>) -> Result<Vec<T>> {
    v.into_iter().collect()
}

fn run_one(exp: Experiment, ctx: &Ctx) -> Result<ExperimentReport> {
    let cfg = ctx.cfg;
    let start = Instant::now();
    let name = exp.name();
    let steps_spec = cfg.spec(CorpusKind::StepFunctions, cfg.samples, cfg.params());
    let steps = || step_corpus(cfg.seed, cfg.samples, cfg.params());
    let phi_desc = serde_json::json!({ "phi": cfg.phi });
    Ok(match exp {
        Experiment::CriterionContinuous => {
            let r = criterion_continuous(&cfg.phi, &psi(ctx)?, &geometric_grid(1e-8, 1e8, 161))?;
            let bounded = r.verdict == Verdict::BoundedWithC;
            let samples = if r.flags.tail_divergent {
                vec![]
            } else {
                r.ratios.clone()
            };
            let mut rep = ExperimentReport::new(name, phi_desc, samples, bounded, start);
            rep.note = Some(verdict_note(r.verdict));
            if r.c_estimate.is_finite() {
                rep.detail("c_estimate", r.c_estimate);
            }
            rep
        }
        Experiment::CriterionDiscrete => {
            let r = criterion_discrete(&cfg.phi, cfg.discrete_n)?;
            let samples = (0..)
                .map(|k| 1usize << k)
                .take_while(|&n| n <= cfg.discrete_n)
                .map(|n| r.ratios[n - 1])
                .collect();
            let mut rep = ExperimentReport::new(
                name,
                phi_desc,
                samples,
                r.verdict == Verdict::BoundedWithC,
                start,
            );
            rep.note = Some(verdict_note(r.verdict));
            rep.detail("c_estimate", r.c_estimate);
            rep
        }
        Experiment::PsiLimit => {
            let r = psi_limit_check(&cfg.phi);
            let mut rep = ExperimentReport::new(name, phi_desc, r.values.clone(), r.passed, start);
            if r.slow_decay {
                rep.note = Some("slow decay: review".into());
            }
            rep
        }
        Experiment::Boundedness => boundedness_probe(
            &cfg.phi,
            &psi(ctx)?,
            &steps()?,
            steps_spec.descriptor(),
            cfg.exec,
        )?,
        Experiment::WitnessIndicator => {
            let us: Vec<f64> = steps()?.iter().map(|s| s.support()).collect();
            let per = collect(map_slice(cfg.exec, &us, |&u| {
                witness_indicator(&cfg.phi, u)
            }))?;
            let pass = per.iter().all(|w| w.dominated && w.norm_ok);
            let samples = per.iter().map(|w| w.norm / w.psi_u).collect();
            ExperimentReport::new(name, steps_spec.descriptor(), samples, pass, start)
        }
        Experiment::WitnessGeneral => {
            let per = collect(map_slice(cfg.exec, &steps()?, |x| {
                witness_general(x, &cfg.phi)
            }))?;
            let pass = per.iter().all(|w| w.dominated && w.factor8_ok);
            let samples = per.iter().map(|w| w.ratio).collect();
            ExperimentReport::new(name, steps_spec.descriptor(), samples, pass, start)
        }
        Experiment::Phi0Maximality => {
            let per = collect(map_slice(cfg.exec, &steps()?, check_phi0_maximality))?;
            let pass = per.iter().all(|r| r.passed);
            let samples = per.iter().map(|r| r.ratio).collect();
            ExperimentReport::new(name, steps_spec.descriptor(), samples, pass, start)
        }
        Experiment::HilbertDomination => {
            let grid = geometric_grid(1e-4, 1e4, 32);
            let per = collect(map_slice(cfg.exec, &steps()?, |mu| {
                check_hilbert_domination(mu, &grid)
            }))?;
            let pass = per.iter().all(|r| r.passed);
            let samples = per.iter().map(|r| r.min_slack).collect();
            ExperimentReport::new(name, steps_spec.descriptor(), samples, pass, start)
        }
        Experiment::HilbertUpper => {
            let spec = cfg.spec(CorpusKind::SignedSteps, cfg.samples, cfg.params());
            let xs = signed_step_corpus(cfg.seed, cfg.samples, cfg.params())?;
            let samples = collect(map_slice(cfg.exec, &xs, |x| -> Result<f64> {
                let est = hilbert_rearrangement_estimate(x, 4096, 10.0 * x.support_end())?;
                Ok(hilbert_upper_ratio(&est, x))
            }))?;
            let pass = samples.iter().all(|&r| r <= 1.0 + 1e-9);
            ExperimentReport::new(name, spec.descriptor(), samples, pass, start)
        }
        Experiment::CalderonFactor2 => {
            let spec = cfg.spec(CorpusKind::IntervalSets, cfg.samples, cfg.params());
            let sets = interval_corpus(cfg.seed, cfg.samples, cfg.params())?;
            let grid = geometric_grid(1e-4, 1e4, 32);
            let samples: Vec<f64> = map_slice(cfg.exec, &sets, |d| {
                let chi = d.indicator();
                let bound = apply_s(
                    &DecreasingStep::indicator(d.measure(), 1.0).expect("positive measure"),
                );
                grid.iter()
                    .map(|&t| eval_s_of_step(&chi, t) / (2.0 * bound.eval(t)))
                    .fold(0.0, f64::max)
            });
            let pass = samples.iter().all(|&r| r <= 1.0 + 1e-12);
            ExperimentReport::new(name, spec.descriptor(), samples, pass, start)
        }
        Experiment::WeakL1 => {
            let spec = cfg.spec(
                CorpusKind::GaussianMatrices,
                cfg.matrix_samples,
                cfg.params(),
            );
            let ms = gaussian_corpus(cfg.seed, cfg.matrix_samples, cfg.params())?;
            let samples = collect(map_slice(cfg.exec, &ms, weak_l1_probe))?;
            let pass = samples.iter().all(|&r| r <= 10.0);
            ExperimentReport::new(name, spec.descriptor(), samples, pass, start)
        }
        Experiment::TruncationRange => {
            let spec = cfg.spec(
                CorpusKind::GaussianMatrices,
                cfg.matrix_samples,
                cfg.params(),
            );
            let ms = gaussian_corpus(cfg.seed, cfg.matrix_samples, cfg.params())?;
            truncation_range_probe(&ms, &cfg.phi, &psi(ctx)?, spec.descriptor(), cfg.exec)?
        }
        Experiment::CommutatorIdentity => {
            let params = CorpusParams {
                repeated_eigenvalues: true,
                ..cfg.params()
            };
            let spec = cfg.spec(
                CorpusKind::HermitianPairs,
                cfg.matrix_samples,
                params.clone(),
            );
            let pairs = hermitian_pair_corpus(cfg.seed, cfg.matrix_samples, params.clone())?;
            let fs = lipschitz_corpus(cfg.seed, cfg.matrix_samples, params)?;
            let jobs: Vec<(&(CMatrix, CMatrix), &LipschitzFn)> = pairs.iter().zip(&fs).collect();
            let samples = collect(map_slice(cfg.exec, &jobs, |(ab, f)| -> Result<f64> {
                let (a, b) = ab;
                let scale = (f.lip_constant() * a.max_abs() * b.max_abs() * a.n() as f64).max(1.0);
                Ok(commutator_identity_check(f, a, b)? / scale)
            }))?;
            let pass = samples.iter().all(|&d| d <= 1e-10);
            ExperimentReport::new(name, spec.descriptor(), samples, pass, start)
        }
        Experiment::Lipschitz => {
            let spec = cfg.spec(CorpusKind::HermitianPairs, cfg.matrix_samples, cfg.params());
            let pairs = hermitian_pair_corpus(cfg.seed, cfg.matrix_samples, cfg.params())?;
            let fs = lipschitz_corpus(cfg.seed, cfg.matrix_samples, cfg.params())?;
            let psi = psi(ctx)?;
            let jobs: Vec<(&(CMatrix, CMatrix), &LipschitzFn)> = pairs.iter().zip(&fs).collect();
            let per = collect(map_slice(cfg.exec, &jobs, |(xy, f)| {
                lipschitz_probe(f, &xy.0, &xy.1, &cfg.phi, &psi)
            }))?;
            let samples = per.iter().map(|p| p.ratio).collect();
            let mut rep = ExperimentReport::new(name, spec.descriptor(), samples, true, start);
            rep.detail(
                "max_block_ratio",
                per.iter().map(|p| p.block_ratio).fold(0.0, f64::max),
            );
            rep.detail(
                "max_block_spectrum_gap",
                per.iter().map(|p| p.block_spectrum_gap).fold(0.0, f64::max),
            );
            rep
        }
    })
}

fn verdict_note(v: Verdict) -> String {
    serde_json::to_value(v)
        .ok()
        .and_then(|s| s.as_str().map(String::from))
        .unwrap_or_default()
}

/// Flattens reports to CSV with one row per sample.
pub fn reports_to_csv(reports: &[ExperimentReport]) -> String {
    let mut out = String::from("experiment,sample_id,value,pass\n");
    for r in reports {
        for row in r.csv_rows() {
            out.push_str(&row);
            out.push('\n');
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> SuiteConfig {
        SuiteConfig {
            samples: 12,
            matrix_samples: 4,
            dim: 6,
            psi_per_decade: 10,
            discrete_n: 256,
            ..Default::default()
        }
    }

    #[test]
    fn default_suite_passes() {
        let reports = run_suite(&small());
        assert_eq!(reports.len(), Experiment::ALL.len());
        for r in &reports {
            assert!(r.pass, "{} failed: {:?}", r.experiment, r.error);
            assert!(r.stats_consistent());
        }
    }

    #[test]
    fn linear_phi_completes_with_tail_divergent() {
        let cfg = SuiteConfig {
            phi: ConcaveFn::power(1.0).unwrap(),
            ..small()
        };
        let reports = run_suite(&cfg);
        assert_eq!(reports.len(), Experiment::ALL.len());
        let crit = reports
            .iter()
            .find(|r| r.experiment == "criterion_continuous")
            .unwrap();
        assert_eq!(crit.note.as_deref(), Some("tail_divergent"));
        assert!(!crit.pass);
    }

    #[test]
    fn empty_experiment_list() {
        assert!(run_suite(&SuiteConfig {
            experiments: vec![],
            ..small()
        })
        .is_empty());
    }

    #[test]
    fn deterministic_and_mode_independent() {
        let a: Vec<_> = run_suite(&SuiteConfig {
            exec: Exec::Serial,
            ..small()
        })
        .iter()
        .map(|r| r.without_timing())
        .collect();
        let b: Vec<_> = run_suite(&SuiteConfig {
            exec: Exec::Parallel,
            ..small()
        })
        .iter()
        .map(|r| r.without_timing())
        .collect();
        let c: Vec<_> = run_suite(&SuiteConfig {
            exec: Exec::Parallel,
            ..small()
        })
        .iter()
        .map(|r| r.without_timing())
        .collect();
        assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
        assert_eq!(
            serde_json::to_string(&b).unwrap(),
            serde_json::to_string(&c).unwrap()
        );
    }
}
