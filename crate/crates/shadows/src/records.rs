//! Serializable result rows.

use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::{json, Value};
use shadows_core::maxent::MaxEntSolution;

/// One self-describing result: the parameters and seed path are enough to
/// reproduce it.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentRecord {
    pub command: String,
    pub parameters: BTreeMap<String, Value>,
    pub estimate: f64,
    pub stderr: Option<f64>,
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub replicates: u64,
    pub wall_time_s: f64,
    pub seed: String,
    pub version: &'static str,
}

impl ExperimentRecord {
    pub fn new(command: &str, seed: String) -> Self {
        ExperimentRecord {
            command: command.to_string(),
            parameters: BTreeMap::new(),
            estimate: f64::NAN,
            stderr: None,
            lower: None,
            upper: None,
            replicates: 1,
            wall_time_s: 0.0,
            seed,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }
}

/// Outcome of one `--assert` check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Assertion {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Assertion {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// Structured record of a maximum-entropy solution.
pub fn solution_json(s: &MaxEntSolution) -> Value {
    json!({
        "k": s.k,
        "q": s.q,
        "beta": s.radius,
        "regime": s.regime.as_str(),
        "lambda1": s.lambda1(),
        "lambda2": s.lambda2(),
        "Z": s.density.normalizer(),
        "moment_q": s.moment_q,
        "moment_2": s.moment_2,
        "entropy": s.entropy,
        "exponent": s.exponent,
        "residuals": s.residuals,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use shadows_core::maxent::solve_small_ball;

    #[test]
    fn solution_fields() {
        let v = solution_json(&solve_small_ball(2, 1.0, 0.76).unwrap());
        for key in [
            "k", "q", "beta", "regime", "lambda1", "lambda2", "Z", "moment_q", "moment_2", "entropy", "exponent",
            "residuals",
        ] {
            assert!(v.get(key).is_some(), "{key}");
        }
        assert_eq!(v["regime"], "gap");
    }
}
