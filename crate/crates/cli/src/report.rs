use std::time::Instant;

use compat_core::classical::{ClassicalVerdict, Witness};
use compat_core::quantum::QuantumVerdict;
use compat_core::spectra::Violation;
use compat_core::Error;
use serde_json::{json, Map, Value};

use crate::formats::{joint_json, state_json, subset_json};
use crate::{CliError, TOOL_VERSION};

/// A JSON report under construction. Keys come out sorted, so two runs with
/// the same input differ only in `timing`.
#[derive(Debug)]
pub struct Report {
    fields: Map<String, Value>,
    started: Instant,
}

/// What a command hands back to `main`.
#[derive(Debug, Clone)]
pub struct Finished {
    pub report: Value,
    pub code: u8,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut fields = Map::new();
        fields.insert("command".into(), json!(command));
        fields.insert("tool_version".into(), json!(TOOL_VERSION));
        Report { fields, started: Instant::now() }
    }

    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.fields.insert(key.into(), value.into());
        self
    }

    pub fn finish(mut self, verdict: &str, code: u8) -> Finished {
        let elapsed = self.started.elapsed().as_secs_f64() * 1e3;
        self.fields.insert("verdict".into(), json!(verdict));
        self.fields.insert("exit_code".into(), json!(code));
        self.fields.insert("timing".into(), json!({ "elapsed_ms": elapsed }));
        Finished { report: Value::Object(self.fields), code }
    }

    /// Records the error and whatever structured detail it carries.
    pub fn fail(mut self, err: &CliError) -> Finished {
        self.set("error", err.to_string());
        match err {
            CliError::Core(Error::NotEquimarginal(w)) => {
                self.set(
                    "equimarginality_witness",
                    json!({ "first": subset_json(w.first), "second": subset_json(w.second), "common": subset_json(w.common) }),
                );
            }
            CliError::Core(Error::QuantumNotEquimarginal(dev)) => {
                self.set("equimarginality", json!({ "equimarginal": false, "max_deviation": dev }));
            }
            CliError::Core(Error::HypothesisRefused(v)) => {
                self.set("bell_wigner", quantum_verdict_json(v));
            }
            CliError::Core(Error::Incompatible(w)) => {
                self.set("witness", witness_json(w));
            }
            _ => {}
        }
        let verdict = match err.exit_code() {
            crate::EXIT_INCOMPATIBLE => "incompatible",
            crate::EXIT_MISMATCH => "mismatch",
            _ => "error",
        };
        let code = err.exit_code();
        self.finish(verdict, code)
    }
}

pub fn witness_json(w: &Witness) -> Value {
    json!({
        "inequality": w.inequality.name(),
        "subset": subset_json(w.subset),
        "outcome": w.outcome.to_string(),
        "value": w.value.to_string(),
    })
}

pub fn classical_verdict_json(v: &ClassicalVerdict) -> Value {
    json!({
        "compatible": v.compatible,
        "witness": v.witness.as_ref().map(witness_json),
        "certificate": v.certificate.as_ref().map(joint_json),
    })
}

pub fn quantum_verdict_json(v: &QuantumVerdict) -> Value {
    json!({
        "passes": v.passes,
        "min_eig": v.min_eig,
        "max_eig": v.max_eig,
        "witness": v.witness.as_ref().map(state_json),
        "witness_value": v.witness_value,
    })
}

pub fn violation_json(v: &Violation) -> Value {
    json!({ "label": v.label, "lhs": v.lhs, "rhs": v.rhs })
}
