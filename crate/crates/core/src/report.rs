use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde_json::{Map, Number, Value};

pub const ENTROPY: &str = "entropy";
pub const VARIANCE: &str = "variance";
pub const CHI_SQUARE: &str = "chi_square";
pub const CORR_H: &str = "corr_h";
pub const CORR_V: &str = "corr_v";
pub const CORR_D: &str = "corr_d";
pub const NPCR: &str = "npcr";
pub const UACI: &str = "uaci";
pub const PSNR_DB: &str = "psnr_db";
pub const DIFF_PERCENT: &str = "diff_percent";

/// Named results of one analysis or attack run.
///
/// Serializes to `key = value` text or to a flat JSON object holding the
/// metrics alongside `test`, `seed`, `trials` and any string labels.
/// Non-finite metrics are written as the strings `inf`, `-inf` or `nan`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct AnalysisReport {
    pub test: String,
    pub metrics: BTreeMap<String, f64>,
    pub labels: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

impl AnalysisReport {
    pub fn new(test: impl Into<String>) -> Self {
        AnalysisReport {
            test: test.into(),
            ..Default::default()
        }
    }

    pub fn set(&mut self, name: impl Into<String>, value: f64) -> &mut Self {
        self.metrics.insert(name.into(), value);
        self
    }

    pub fn label(&mut self, name: impl Into<String>, value: impl Into<String>) -> &mut Self {
        self.labels.insert(name.into(), value.into());
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).copied()
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = Some(trials);
        self
    }

    /// Folds another report's metrics and labels into this one.
    pub fn merge(&mut self, other: AnalysisReport) {
        self.metrics.extend(other.metrics);
        self.labels.extend(other.labels);
        self.seed = self.seed.or(other.seed);
        self.trials = self.trials.or(other.trials);
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "test = {}", self.test);
        for (k, v) in &self.metrics {
            let _ = writeln!(s, "{k} = {}", format_metric(*v));
        }
        for (k, v) in &self.labels {
            let _ = writeln!(s, "{k} = {v}");
        }
        if let Some(t) = self.trials {
            let _ = writeln!(s, "trials = {t}");
        }
        if let Some(seed) = self.seed {
            let _ = writeln!(s, "seed = {seed}");
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let mut obj = Map::new();
        obj.insert("test".into(), Value::String(self.test.clone()));
        for (k, v) in &self.metrics {
            let value = match Number::from_f64(*v) {
                Some(n) => Value::Number(n),
                None => Value::String(format_metric(*v)),
            };
            obj.insert(k.clone(), value);
        }
        for (k, v) in &self.labels {
            obj.insert(k.clone(), Value::String(v.clone()));
        }
        if let Some(t) = self.trials {
            obj.insert("trials".into(), Value::from(t));
        }
        if let Some(seed) = self.seed {
            obj.insert("seed".into(), Value::from(seed));
        }
        Value::Object(obj)
    }
}

fn format_metric(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{v}")
    }
}
