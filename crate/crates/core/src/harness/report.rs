use std::collections::BTreeMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};

/// Outcome of one experiment over a corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub corpus: serde_json::Value,
    pub samples: Vec<f64>,
    pub max: Option<f64>,
    pub median: Option<f64>,
    pub min: Option<f64>,
    pub pass: bool,
    /// Wall time in milliseconds.
    pub ms: f64,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

fn stats(samples: &[f64]) -> (Option<f64>, Option<f64>, Option<f64>) {
    if samples.is_empty() {
        return (None, None, None);
    }
    let mut s = samples.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    let median = if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    };
    (Some(s[n - 1]), Some(median), Some(s[0]))
}

impl ExperimentReport {
    pub fn new(
        experiment: impl Into<String>,
        corpus: serde_json::Value,
        samples: Vec<f64>,
        pass: bool,
        started: Instant,
    ) -> Self {
        let (max, median, min) = stats(&samples);
        ExperimentReport {
            experiment: experiment.into(),
            corpus,
            samples,
            max,
            median,
            min,
            pass,
            ms: started.elapsed().as_secs_f64() * 1e3,
            details: BTreeMap::new(),
            note: None,
            error: None,
        }
    }

    /// A failed report carrying the error that stopped the experiment.
    pub fn failed(
        experiment: impl Into<String>,
        corpus: serde_json::Value,
        error: String,
        started: Instant,
    ) -> Self {
        let mut r = ExperimentReport::new(experiment, corpus, vec![], false, started);
        r.error = Some(error);
        r
    }

    pub fn detail(&mut self, key: &str, value: f64) {
        self.details.insert(key.to_string(), value);
    }

    /// Whether `max`, `median` and `min` match the samples.
    pub fn stats_consistent(&self) -> bool {
        stats(&self.samples) == (self.max, self.median, self.min)
    }

    /// Copy with the wall time zeroed, for byte comparisons.
    pub fn without_timing(&self) -> Self {
        ExperimentReport {
            ms: 0.0,
            ..self.clone()
        }
    }

    /// One CSV row per sample: `experiment,sample_id,value,pass`.
    pub fn csv_rows(&self) -> Vec<String> {
        self.samples
            .iter()
            .enumerate()
            .map(|(i, v)| format!("{},{},{},{}", self.experiment, i, v, self.pass))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn statistics() {
        let r = ExperimentReport::new(
            "t",
            serde_json::json!(null),
            vec![3.0, 1.0, 2.0, 10.0],
            true,
            Instant::now(),
        );
        assert_eq!((r.max, r.median, r.min), (Some(10.0), Some(2.5), Some(1.0)));
        assert!(r.stats_consistent());
        let e = ExperimentReport::new("t", serde_json::json!(null), vec![], true, Instant::now());
        assert_eq!(e.max, None);
        assert_eq!(r.csv_rows()[1], "t,1,1,true");
    }
}
