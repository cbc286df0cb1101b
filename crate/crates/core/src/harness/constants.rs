use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};

/// An empirical constant recorded on a first run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrozenConstant {
    pub probe_name: String,
    pub seed: u64,
    pub corpus_descriptor: serde_json::Value,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FrozenStatus {
    Recorded,
    Matched { recorded: f64 },
    Mismatch { recorded: f64 },
}

impl FrozenStatus {
    pub fn ok(self) -> bool {
        !matches!(self, FrozenStatus::Mismatch { .. })
    }
}

/// JSON list of frozen constants.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConstantsLedger {
    pub entries: Vec<FrozenConstant>,
}

impl ConstantsLedger {
    /// Reads the ledger, or starts an empty one if the file does not exist.
    pub fn load(path: &Path) -> Result<Self> {
        match std::fs::read_to_string(path) {
            Ok(s) => serde_json::from_str(&s)
                .map_err(|e| LabError::invalid(format!("{}: {e}", path.display()))),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Self::default()),
            Err(e) => Err(LabError::invalid(format!("{}: {e}", path.display()))),
        }
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir).map_err(|e| LabError::invalid(e.to_string()))?;
        }
        let s = serde_json::to_string_pretty(self).expect("ledger serializes");
        std::fs::write(path, s + "\n").map_err(|e| LabError::invalid(e.to_string()))
    }

    pub fn find(
        &self,
        probe_name: &str,
        seed: u64,
        corpus_descriptor: &serde_json::Value,
    ) -> Option<&FrozenConstant> {
        self.entries.iter().find(|c| {
            c.probe_name == probe_name
                && c.seed == seed
                && &c.corpus_descriptor == corpus_descriptor
        })
    }

    /// Compares against the recorded value within `1e-9·max(1, |v|)`, or
    /// records it if absent.
    pub fn check_or_record(
        &mut self,
        probe_name: &str,
        seed: u64,
        corpus_descriptor: serde_json::Value,
        value: f64,
    ) -> FrozenStatus {
        if let Some(c) = self.find(probe_name, seed, &corpus_descriptor) {
            let recorded = c.value;
            return if (value - recorded).abs() <= 1e-9 * recorded.abs().max(1.0) {
                FrozenStatus::Matched { recorded }
            } else {
                FrozenStatus::Mismatch { recorded }
            };
        }
        self.entries.push(FrozenConstant {
            probe_name: probe_name.into(),
            seed,
            corpus_descriptor,
            value,
        });
        FrozenStatus::Recorded
    }
}
