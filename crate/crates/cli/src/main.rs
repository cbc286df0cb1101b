//! `lorentz-lab`: command-line front end.
//!
//! Exit codes: 0 when every check passes, 1 when a mathematical check fails,
//! 2 on a usage error.

mod args;
mod config;
mod output;

use std::process::ExitCode;

use clap::Parser;
use serde::Deserialize;
use serde_json::{json, Value};

use lorentz_lab::calderon::{check_hilbert_domination, hilbert_of_step};
use lorentz_lab::concave::{geometric_grid, ConcaveFn};
use lorentz_lab::harness::{
    gaussian_corpus, hermitian_pair_corpus, lipschitz_corpus, reports_to_csv, run_suite,
    step_corpus, CorpusParams, SuiteConfig,
};
use lorentz_lab::optimal_range::{
    check_phi0_maximality, criterion_continuous, criterion_discrete, psi_from_phi, witness_general,
    witness_indicator, CriterionReport, PsiTable, PsiTableConfig, Verdict,
};
use lorentz_lab::par::{map_slice, Exec};
use lorentz_lab::rearrangement::{DecreasingStep, StepFn};
use lorentz_lab::spectral::{
    commutator, commutator_identity_check, doi_apply, singular_values, triangular_truncate,
    weak_l1_probe, CMatrix, LipschitzFn,
};
use lorentz_lab::LabError;

use args::{Cli, Command, Format};
use config::Config;
use output::{csv_fields, csv_table, emit, round_json};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        match e {
            LabError::TailDivergent { .. } | LabError::NoConvergence { .. } => {
                CliError::Failure(e.to_string())
            }
            _ => CliError::Usage(e.to_string()),
        }
    }
}

/// What a subcommand produced.
struct Outcome {
    json: Value,
    csv: String,
    pass: bool,
}

impl Outcome {
    fn scalar(json: Value, pass: bool) -> Self {
        let csv = csv_fields(&json);
        Outcome { json, csv, pass }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report types serialize")
}

/// A step given either as `{"layers": ...}` or as `{"breakpoints": ..., "values": ...}`.
#[derive(Deserialize)]
#[serde(untagged)]
enum StepArg {
    Layers(DecreasingStep),
    Step(StepFn),
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::usage(format!("--{flag} is required")))
}

fn positive(x: f64, flag: &str) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::usage(format!(
            "--{flag} must be a positive finite number, got {x}"
        )))
    }
}

/// `points` geometric nodes spanning `decades` decades centred at 1.
fn centred_grid(decades: f64, points: usize) -> Result<Vec<f64>, CliError> {
    if !(decades >= 0.0 && decades.is_finite()) {
        return Err(CliError::usage("--decades must be nonnegative"));
    }
    if points == 0 {
        return Err(CliError::usage("--points must be at least 1"));
    }
    let half = 10f64.powf(decades / 2.0);
    if points == 1 {
        return Ok(vec![1.0]);
    }
    Ok(geometric_grid(1.0 / half, half, points))
}

fn criterion_csv(rep: &CriterionReport, first: &str) -> String {
    csv_table(
        &[first, "G", "phi", "ratio"],
        (0..rep.abscissae.len()).map(|i| {
            vec![
                rep.abscissae[i],
                rep.g_values[i],
                rep.phi_values[i],
                rep.ratios[i],
            ]
        }),
    )
}

fn run(cmd: &Command, cfg: &Config) -> Result<Outcome, CliError> {
    let seed = cfg.pick(cmd.common().seed, "seed")?.unwrap_or(42);
    match cmd {
        Command::Psi {
            phi,
            u,
            decades,
            points,
            ..
        } => {
            let phi: ConcaveFn = require(cfg.document(phi.as_deref(), "phi")?, "phi")?;
            let grid = match cfg.pick(*u, "u")? {
                Some(u) => vec![positive(u, "u")?],
                None => centred_grid(
                    cfg.pick(*decades, "decades")?.unwrap_or(8.0),
                    cfg.pick(*points, "points")?.unwrap_or(33),
                )?,
            };
            let rows = map_slice(Exec::default(), &grid, |&u| {
                let (psi, w) = psi_from_phi(&phi, u);
                (u, psi, w)
            });
            let json = json!({
                "phi": phi,
                "rows": rows.iter().map(|(u, p, w)| json!({"u": u, "psi": p, "w_star": w})).collect::<Vec<_>>(),
            });
            let csv = csv_table(
                &["u", "psi", "w_star"],
                rows.iter().map(|r| vec![r.0, r.1, r.2]),
            );
            Ok(Outcome {
                json,
                csv,
                pass: true,
            })
        }
        Command::CheckContinuous {
            phi,
            psi,
            decades,
            points,
            ..
        } => {
            let phi: ConcaveFn = require(cfg.document(phi.as_deref(), "phi")?, "phi")?;
            let grid = centred_grid(
                cfg.pick(*decades, "decades")?.unwrap_or(16.0),
                cfg.pick(*points, "points")?.unwrap_or(161),
            )?;
            let psi: ConcaveFn = match cfg.document(psi.as_deref(), "psi")? {
                Some(p) => p,
                None => {
                    let table_cfg = PsiTableConfig {
                        lo: (grid[0] * 1e-8).min(1e-12),
                        hi: (grid[grid.len() - 1] * 1e8).max(1e12),
                        ..PsiTableConfig::default()
                    };
                    PsiTable::build(&phi, &table_cfg)?.as_concave().clone()
                }
            };
            let rep = criterion_continuous(&phi, &psi, &grid)?;
            Ok(Outcome {
                csv: criterion_csv(&rep, "u"),
                pass: rep.verdict == Verdict::BoundedWithC,
                json: to_value(&rep),
            })
        }
        Command::CheckDiscrete { phi, n, .. } => {
            let phi: ConcaveFn = require(cfg.document(phi.as_deref(), "phi")?, "phi")?;
            let rep = criterion_discrete(&phi, cfg.pick(*n, "n")?.unwrap_or(4096))?;
            Ok(Outcome {
                csv: criterion_csv(&rep, "n"),
                pass: rep.verdict == Verdict::BoundedWithC,
                json: to_value(&rep),
            })
        }
        Command::Witness { phi, u, x, .. } => {
            let phi: ConcaveFn = require(cfg.document(phi.as_deref(), "phi")?, "phi")?;
            match cfg.document::<DecreasingStep>(x.as_deref(), "x")? {
                Some(x) => {
                    let w = witness_general(&x, &phi)?;
                    let pass = w.dominated && w.factor8_ok;
                    Ok(Outcome::scalar(to_value(&w), pass))
                }
                None => {
                    let u = positive(require(cfg.pick(*u, "u")?, "u or --x")?, "u")?;
                    let w = witness_indicator(&phi, u)?;
                    let pass = w.dominated && w.norm_ok;
                    Ok(Outcome::scalar(to_value(&w), pass))
                }
            }
        }
        Command::Hilbert {
            x,
            t,
            decades,
            points,
            ..
        } => {
            let x: StepArg = require(cfg.document(x.as_deref(), "x")?, "x")?;
            if let Some(t) = cfg.pick(*t, "t")? {
                let step = match &x {
                    StepArg::Layers(d) => d.to_step_fn(),
                    StepArg::Step(s) => s.clone(),
                };
                let value = hilbert_of_step(&step, t)?;
                return Ok(Outcome::scalar(json!({"t": t, "value": value}), true));
            }
            let StepArg::Layers(mu) = x else {
                return Err(CliError::usage(
                    "the domination check needs a decreasing step given by layers",
                ));
            };
            let grid = centred_grid(
                cfg.pick(*decades, "decades")?.unwrap_or(6.0),
                cfg.pick(*points, "points")?.unwrap_or(32),
            )?;
            let rep = check_hilbert_domination(&mu, &grid)?;
            let csv = csv_table(
                &["t", "slack"],
                grid.iter().zip(&rep.slacks).map(|(&t, &s)| vec![t, s]),
            );
            Ok(Outcome {
                csv,
                pass: rep.passed,
                json: to_value(&rep),
            })
        }
        Command::Phi0Check { x, samples, .. } => {
            if let Some(x) = cfg.document::<DecreasingStep>(x.as_deref(), "x")? {
                let rep = check_phi0_maximality(&x)?;
                return Ok(Outcome::scalar(to_value(&rep), rep.passed));
            }
            let size = cfg.pick(*samples, "samples")?.unwrap_or(200);
            let corpus = step_corpus(seed, size, CorpusParams::default())?;
            let reps = map_slice(Exec::default(), &corpus, check_phi0_maximality)
                .into_iter()
                .collect::<Result<Vec<_>, _>>()?;
            let pass = reps.iter().all(|r| r.passed);
            let csv = csv_table(
                &["sample_id", "ratio"],
                reps.iter()
                    .enumerate()
                    .map(|(i, r)| vec![i as f64, r.ratio]),
            );
            Ok(Outcome {
                csv,
                pass,
                json: json!({"seed": seed, "pass": pass, "samples": reps}),
            })
        }
        Command::Truncate { matrix, dim, .. } => {
            let v: CMatrix = match cfg.document(matrix.as_deref(), "matrix")? {
                Some(m) => m,
                None => {
                    let params = CorpusParams {
                        dim: cfg.pick(*dim, "dim")?.unwrap_or(8),
                        ..CorpusParams::default()
                    };
                    gaussian_corpus(seed, 1, params)?.remove(0)
                }
            };
            let t = triangular_truncate(&v);
            let s2_input = v.frobenius();
            let s2_truncated = t.frobenius();
            let weak = weak_l1_probe(&v)?;
            let sv = singular_values(&t)?;
            let pass = s2_truncated <= s2_input;
            Ok(Outcome::scalar(
                json!({
                    "n": v.n(),
                    "s2_input": s2_input,
                    "s2_truncated": s2_truncated,
                    "weak_l1_ratio": weak,
                    "pass": pass,
                    "singular_values_truncated": sv.values,
                    "truncated": t,
                }),
                pass,
            ))
        }
        Command::Doi { f, a, b, dim, .. } => {
            let params = CorpusParams {
                dim: cfg.pick(*dim, "dim")?.unwrap_or(8),
                repeated_eigenvalues: true,
                ..CorpusParams::default()
            };
            let f: LipschitzFn = match cfg.document(f.as_deref(), "f")? {
                Some(f) => f,
                None => lipschitz_corpus(seed, 1, params.clone())?.remove(0),
            };
            let given_a: Option<CMatrix> = cfg.document(a.as_deref(), "a")?;
            let given_b: Option<CMatrix> = cfg.document(b.as_deref(), "b")?;
            let (a, b) = match (given_a, given_b) {
                (Some(a), Some(b)) => (a, b),
                (None, None) => hermitian_pair_corpus(seed, 1, params)?.remove(0),
                _ => return Err(CliError::usage("--a and --b must be given together")),
            };
            let deviation = commutator_identity_check(&f, &a, &b)?;
            let scale = (f.lip_constant() * a.max_abs() * b.max_abs() * a.n() as f64).max(1.0);
            let pass = deviation <= 1e-10 * scale;
            let doi = doi_apply(&f, &a, &commutator(&a, &b)?)?;
            Ok(Outcome::scalar(
                json!({
                    "n": a.n(),
                    "deviation": deviation,
                    "scale": scale,
                    "pass": pass,
                    "doi_of_commutator": doi,
                }),
                pass,
            ))
        }
        Command::Suite {
            phi,
            samples,
            dim,
            decades,
            serial,
            ..
        } => {
            let mut suite = SuiteConfig {
                seed,
                ..SuiteConfig::default()
            };
            if let Some(phi) = cfg.document(phi.as_deref(), "phi")? {
                suite.phi = phi;
            }
            if let Some(s) = cfg.pick(*samples, "samples")? {
                suite.samples = s;
            }
            if let Some(d) = cfg.pick(*dim, "dim")? {
                suite.dim = d;
            }
            if let Some(d) = cfg.pick(*decades, "decades")? {
                suite.decades = d;
            }
            if cfg.flag(*serial, "serial")? {
                suite.exec = Exec::Serial;
            }
            let reports = run_suite(&suite);
            let pass = reports.iter().all(|r| r.pass);
            Ok(Outcome {
                csv: reports_to_csv(&reports),
                pass,
                json: to_value(&reports),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.command.common();
    let result = Config::load(common.config.as_deref()).and_then(|cfg| {
        let format = cfg.pick(common.format, "format")?.unwrap_or(Format::Json);
        let out = cfg.pick(common.out.clone(), "out")?;
        let outcome = run(&cli.command, &cfg)?;
        let text = match format {
            Format::Json => {
                let mut v = outcome.json;
                round_json(&mut v);
                serde_json::to_string_pretty(&v).expect("serializable") + "\n"
            }
            Format::Csv => outcome.csv,
        };
        emit(&text, out.as_deref())
            .map_err(|e| CliError::usage(format!("cannot write output: {e}")))?;
        Ok(outcome.pass)
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("lorentz-lab: check failed");
            ExitCode::from(1)
        }
        Err(CliError::Failure(msg)) => {
            eprintln!("lorentz-lab: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Usage(msg)) => {
            eprintln!("lorentz-lab: {msg}");
            ExitCode::from(2)
        }
    }
}
