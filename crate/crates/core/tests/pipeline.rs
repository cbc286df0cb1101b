//! End-to-end runs across modules.

use lorentz_lab::calderon::{apply_s, image_lorentz_norm};
use lorentz_lab::concave::{geometric_grid, ConcaveFn};
use lorentz_lab::harness::{
    gen_corpus, step_corpus, ConstantsLedger, Corpus, CorpusKind, CorpusParams, CorpusSpec,
    ExperimentReport, FrozenStatus,
};
use lorentz_lab::optimal_range::{
    boundedness_probe, criterion_continuous, criterion_g, witness_general, CriterionReport,
    PsiTable, PsiTableConfig, Verdict,
};
use lorentz_lab::par::Exec;
use lorentz_lab::rearrangement::{lorentz_norm, DecreasingStep};

fn table(phi: &ConcaveFn) -> ConcaveFn {
    PsiTable::build(phi, &PsiTableConfig::default())
        .unwrap()
        .as_concave()
        .clone()
}

#[test]
fn log1p_grows_at_the_origin() {
    // ψ(u) ~ u near 0, so G/φ ~ log(1/u)
    let phi = ConcaveFn::Log1p;
    let rep = criterion_continuous(&phi, &table(&phi), &geometric_grid(1e-8, 1e8, 81)).unwrap();
    assert_eq!(rep.verdict, Verdict::RatioUnboundedTrend);
    assert!(rep.flags.growing_low && !rep.flags.growing_high);
}

#[test]
fn scaled_power_from_phi_to_witness() {
    let phi = ConcaveFn::scaled_power(0.3, 2.5).unwrap();
    let psi = table(&phi);
    let grid = geometric_grid(1e-8, 1e8, 81);
    let rep = criterion_continuous(&phi, &psi, &grid).unwrap();
    assert_eq!(rep.verdict, Verdict::BoundedWithC);
    // e^{1-α}/(1-α) for the exact ψ
    assert!((rep.c_estimate - 0.7f64.exp() / 0.7).abs() < 1e-2);

    let steps = step_corpus(9, 30, CorpusParams::default()).unwrap();
    let spec = CorpusSpec::new(CorpusKind::StepFunctions, 9, 30);
    let probe = boundedness_probe(&phi, &psi, &steps, spec.descriptor(), Exec::Serial).unwrap();
    assert!(probe.pass, "{probe:?}");

    for x in &steps {
        let w = witness_general(x, &phi).unwrap();
        assert!(w.dominated && w.factor8_ok);
        // the witness pushes x into Λψ with the stated cost
        assert!(lorentz_norm(&w.y, &phi) <= 8.0 * w.norm_x_psi * (1.0 + 1e-9));
    }
}

#[test]
fn g_is_the_norm_of_the_image_of_an_indicator() {
    let psi = table(&ConcaveFn::power(0.4).unwrap());
    for u in [1e-3, 0.2, 1.0, 70.0, 4e4] {
        let g = criterion_g(&psi, u).unwrap().value;
        let img = apply_s(&DecreasingStep::indicator(u, 1.0).unwrap());
        let direct = image_lorentz_norm(&img, &psi).unwrap();
        assert!((g - direct).abs() <= 1e-6 * g, "u = {u}: {g} vs {direct}");
    }
}

#[test]
fn corpus_and_report_round_trip_through_json() {
    let spec = CorpusSpec::new(CorpusKind::HermitianPairs, 5, 3).with_params(CorpusParams {
        dim: 4,
        repeated_eigenvalues: true,
        ..CorpusParams::default()
    });
    let spec_back: CorpusSpec = serde_json::from_value(spec.descriptor()).unwrap();
    assert_eq!(spec_back, spec);
    let corpus = gen_corpus(&spec).unwrap();
    let text = serde_json::to_string(&corpus).unwrap();
    let back: Corpus = serde_json::from_str(&text).unwrap();
    assert_eq!(back, corpus);
    assert_eq!(gen_corpus(&spec_back).unwrap(), corpus);

    let phi = ConcaveFn::power(0.5).unwrap();
    let rep = criterion_continuous(&phi, &phi, &geometric_grid(1e-4, 1e4, 9)).unwrap();
    let back: CriterionReport =
        serde_json::from_str(&serde_json::to_string(&rep).unwrap()).unwrap();
    assert_eq!(back, rep);
}

#[test]
fn ledger_persists_between_runs() {
    let path = std::env::temp_dir().join(format!("lorentz-ledger-{}.json", std::process::id()));
    let _ = std::fs::remove_file(&path);
    let desc = serde_json::json!({"kind": "gaussian_matrices", "size": 3});
    let mut ledger = ConstantsLedger::load(&path).unwrap();
    assert_eq!(
        ledger.check_or_record("probe", 1, desc.clone(), 0.25),
        FrozenStatus::Recorded
    );
    ledger.save(&path).unwrap();
    let mut again = ConstantsLedger::load(&path).unwrap();
    assert!(again.check_or_record("probe", 1, desc.clone(), 0.25).ok());
    assert!(!again.check_or_record("probe", 1, desc, 0.2500001).ok());
    std::fs::remove_file(&path).unwrap();
}

#[test]
fn failed_reports_serialize_their_error() {
    let rep = ExperimentReport::failed(
        "x",
        serde_json::Value::Null,
        "boom".into(),
        std::time::Instant::now(),
    );
    let v = serde_json::to_value(&rep).unwrap();
    assert_eq!(v["pass"], false);
    assert_eq!(v["error"], "boom");
}
