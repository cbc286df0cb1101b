//! Seeded corpora, experiment orchestration and report emission.

mod constants;
mod corpus;
mod report;
pub mod rng;
mod suite;

pub use constants::{ConstantsLedger, FrozenConstant, FrozenStatus};
pub use corpus::{
    gaussian_corpus, gen_corpus, hermitian_pair_corpus, interval_corpus, lipschitz_corpus,
    signed_step_corpus, step_corpus, Corpus, CorpusKind, CorpusParams, CorpusSpec,
};
pub use report::ExperimentReport;
pub use suite::{reports_to_csv, run_suite, Experiment, SuiteConfig};
