use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of a verification run: a residual sweep, a constraint check or a
/// statistical comparison.
///
/// `max_deviation` is compared against `tolerance`; `failures` itemizes the
/// individual violations for constraint-style checks. Named scalar outputs
/// (estimates, standard errors, per-equation residuals) go in `metrics`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub samples: usize,
    pub tolerance: f64,
    pub max_deviation: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax: Option<usize>,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub metrics: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(label: impl Into<String>, tolerance: f64) -> Self {
        Report {
            label: label.into(),
            seed: None,
            samples: 0,
            tolerance,
            max_deviation: 0.0,
            argmax: None,
            passed: true,
            failures: Vec::new(),
            metrics: BTreeMap::new(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Record a deviation for sample `index`.
    pub fn observe(&mut self, deviation: f64, index: usize) {
        self.samples += 1;
        let worse = self.argmax.is_none()
            || deviation > self.max_deviation
            || (deviation.is_nan() && !self.max_deviation.is_nan());
        if worse {
            self.max_deviation = deviation;
            self.argmax = Some(index);
        }
    }

    /// Fold a finished sub-report in: its samples and failures are added and
    /// its max deviation is observed under `index`.
    pub fn absorb(&mut self, sub: &Report, index: usize) {
        let samples = self.samples + sub.samples;
        self.observe(sub.max_deviation, index);
        self.samples = samples;
        self.failures.extend(sub.failures.iter().cloned());
    }

    pub fn fail(&mut self, why: impl Into<String>) {
        self.failures.push(why.into());
    }

    pub fn metric(&mut self, name: &str, value: f64) {
        self.metrics.insert(name.to_string(), value);
    }

    /// Fix `passed` from the recorded deviation and failures.
    pub fn finish(mut self) -> Self {
        self.passed = self.failures.is_empty()
            && !self.max_deviation.is_nan()
            && self.max_deviation <= self.tolerance;
        self
    }
}
