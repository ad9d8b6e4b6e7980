//! Result envelope written to stdout.
//!
//! Field order is fixed by declaration order and serde_json preserves map
//! insertion order, so a given input always serializes to the same bytes
//! (the golden tests depend on this). Complex numbers are [re, im] pairs.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::fail::CliError;
use crate::schema::Cx;

#[derive(Debug, Serialize)]
pub struct ResultEnvelope {
    pub schema_version: &'static str,
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    /// Subcommand flags as given, in declaration order.
    pub args: Map<String, Value>,
    pub inputs: Vec<InputDigest>,
    pub seed: u64,
    pub hbar: f64,
    pub tolerances: ToleranceEcho,
    pub warnings: Vec<Warning>,
    pub payload: Payload,
}

#[derive(Debug, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// The one tolerance exposed as a flag; the rest are fixed defaults.
#[derive(Debug, Serialize)]
pub struct ToleranceEcho {
    pub overlap_floor: f64,
}

#[derive(Debug, Serialize)]
pub struct Warning {
    pub kind: &'static str,
    pub message: String,
}

#[derive(Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    Distribution(DistributionPayload),
    Density(DensityPayload),
    Prediction(PredictionPayload),
    WeakValue(WeakValuePayload),
    Simulation(SimulationPayload),
    Scenario(ScenarioPayload),
    Selftest(SelftestPayload),
}

#[derive(Debug, Serialize)]
pub struct DistributionPayload {
    pub dim: usize,
    pub basis_a_id: String,
    pub basis_b_id: String,
    pub labels_a: Vec<String>,
    pub labels_b: Vec<String>,
    pub values: Vec<Vec<Cx>>,
    pub marginal_a: Vec<f64>,
    pub marginal_b: Vec<f64>,
    pub normalization_deviation: f64,
    pub max_imaginary: f64,
}

#[derive(Debug, Serialize)]
pub struct DensityPayload {
    pub dim: usize,
    pub matrix: Vec<Vec<Cx>>,
    pub eigenvalues: Vec<f64>,
    pub hermiticity_deviation: f64,
    pub min_overlap: f64,
}

#[derive(Debug, Serialize)]
pub struct PredictionPayload {
    pub dim: usize,
    pub basis_m_id: String,
    pub labels: Vec<String>,
    pub predicted: Vec<f64>,
    pub born: Vec<f64>,
    pub max_deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct WeakValuePayload {
    pub value: Cx,
    pub magnitude: f64,
    /// Null when the conditional vanishes and no phase exists.
    pub phase: Option<f64>,
    pub action: Option<f64>,
    pub hbar: f64,
}

#[derive(Debug, Serialize)]
pub struct SimulationPayload {
    pub dim: usize,
    pub basis_a_id: String,
    pub basis_b_id: String,
    pub labels_a: Vec<String>,
    pub labels_b: Vec<String>,
    pub coupling: f64,
    pub mode: &'static str,
    pub shots: Option<u64>,
    /// Estimated cells; null where postselection never succeeds.
    pub values: Vec<Vec<Option<Cx>>>,
    /// Exact distribution the estimates approach as the coupling shrinks.
    pub reference: Vec<Vec<Cx>>,
    /// |estimate − reference| per cell, null where the estimate is.
    pub deviations: Vec<Vec<Option<f64>>>,
    /// Per-cell standard errors; present only in sampled mode.
    pub standard_errors: Option<Vec<Vec<Option<f64>>>>,
    pub postselection: Vec<Vec<f64>>,
    pub max_deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct ScenarioPayload {
    pub name: &'static str,
    pub summary: &'static str,
    pub entries: Vec<ScenarioEntry>,
    pub weak_value_sum: Cx,
    pub postselection_probability: f64,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
    /// Weak-measurement cross-check, present when a coupling was given.
    pub estimates: Option<ScenarioEstimates>,
}

#[derive(Debug, Serialize)]
pub struct ScenarioEntry {
    pub label: String,
    pub expected: Cx,
    pub computed: Cx,
    pub deviation: f64,
    pub expected_phase: Option<f64>,
    pub computed_phase: Option<f64>,
    pub phase_deviation: f64,
    pub passed: bool,
}

#[derive(Debug, Serialize)]
pub struct ScenarioEstimates {
    pub coupling: f64,
    pub values: Vec<Cx>,
    pub max_deviation: f64,
}

#[derive(Debug, Serialize)]
pub struct SelftestPayload {
    pub instances: usize,
    pub dims: Vec<usize>,
    pub max_deviation: f64,
    pub threshold: f64,
    pub passed: bool,
}

impl ResultEnvelope {
    pub fn to_json(&self) -> String {
        let mut text =
            serde_json::to_string_pretty(self).expect("envelope serialization is infallible");
        text.push('\n');
        text
    }

    /// Long-format CSV for matrix and vector payloads. Scalar and report
    /// payloads have no tabular form and are rejected as a usage error.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut wtr = csv::Writer::from_writer(Vec::new());
        match &self.payload {
            Payload::Distribution(p) => {
                wtr.write_record(["a_label", "b_label", "re", "im"]).unwrap();
                for (j, row) in p.values.iter().enumerate() {
                    for (k, cell) in row.iter().enumerate() {
                        wtr.write_record([
                            p.labels_a[j].as_str(),
                            p.labels_b[k].as_str(),
                            &format_f64(cell[0]),
                            &format_f64(cell[1]),
                        ])
                        .unwrap();
                    }
                }
            }
            Payload::Density(p) => {
                wtr.write_record(["row", "col", "re", "im"]).unwrap();
                for (r, row) in p.matrix.iter().enumerate() {
                    for (c, cell) in row.iter().enumerate() {
                        wtr.write_record([
                            &r.to_string(),
                            &c.to_string(),
                            &format_f64(cell[0]),
                            &format_f64(cell[1]),
                        ])
                        .unwrap();
                    }
                }
            }
            Payload::Prediction(p) => {
                wtr.write_record(["label", "predicted", "born"]).unwrap();
                for (label, (pred, born)) in p
                    .labels
                    .iter()
                    .zip(p.predicted.iter().zip(p.born.iter()))
                {
                    wtr.write_record([label, &format_f64(*pred), &format_f64(*born)])
                        .unwrap();
                }
            }
            Payload::Simulation(p) => {
                wtr.write_record([
                    "a_label",
                    "b_label",
                    "re",
                    "im",
                    "reference_re",
                    "reference_im",
                    "deviation",
                    "standard_error",
                    "postselection",
                ])
                .unwrap();
                for j in 0..p.dim {
                    for k in 0..p.dim {
                        let value = p.values[j][k];
                        let se = p
                            .standard_errors
                            .as_ref()
                            .and_then(|table| table[j][k]);
                        wtr.write_record([
                            p.labels_a[j].as_str(),
                            p.labels_b[k].as_str(),
                            &opt_f64(value.map(|c| c[0])),
                            &opt_f64(value.map(|c| c[1])),
                            &format_f64(p.reference[j][k][0]),
                            &format_f64(p.reference[j][k][1]),
                            &opt_f64(p.deviations[j][k]),
                            &opt_f64(se),
                            &format_f64(p.postselection[j][k]),
                        ])
                        .unwrap();
                    }
                }
            }
            Payload::WeakValue(_) | Payload::Scenario(_) | Payload::Selftest(_) => {
                return Err(CliError::Usage {
                    message: format!(
                        "csv output is only available for matrix and vector payloads, \
                         not for `{}`",
                        self.command
                    ),
                });
            }
        }
        Ok(String::from_utf8(wtr.into_inner().unwrap()).unwrap())
    }
}

fn format_f64(x: f64) -> String {
    format!("{x}")
}

fn opt_f64(x: Option<f64>) -> String {
    x.map(format_f64).unwrap_or_default()
}

/// Builds the ordered args echo from (name, value) pairs.
pub fn args_map(pairs: &[(&str, Value)]) -> Map<String, Value> {
    let mut map = Map::new();
    for (key, value) in pairs {
        map.insert((*key).to_string(), value.clone());
    }
    map
}
