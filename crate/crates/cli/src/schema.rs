//! On-disk JSON formats.
//!
//! Complex numbers are always two-element arrays [re, im]. The loaders
//! enforce the core validation rules at parse time, so commands never see
//! an unchecked state or basis. Distribution inputs may be either a bare
//! distribution file or a full result envelope produced by the `kd`
//! command (the payload is then lifted out), which lets command outputs be
//! piped back in.

use std::fs;
use std::path::Path;

use ndarray::Array2;
use serde::Deserialize;

use kdcalc_core::{
    C64, DensityOperator, KDDistribution, OrthonormalBasis, StateVector, Tolerances,
};

use crate::fail::CliError;

pub const SCHEMA_VERSION: &str = "1";

/// Serialized complex number.
pub type Cx = [f64; 2];

pub fn to_c64(x: Cx) -> C64 {
    C64::new(x[0], x[1])
}

pub fn from_c64(z: C64) -> Cx {
    [z.re, z.im]
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateFile {
    pub schema_version: String,
    pub dim: usize,
    pub kind: StateKind,
    #[serde(default)]
    pub amplitudes: Option<Vec<Cx>>,
    #[serde(default)]
    pub matrix: Option<Vec<Vec<Cx>>>,
    /// Accepted for annotation only.
    #[allow(dead_code)]
    #[serde(default)]
    pub label: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Pure,
    Mixed,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    pub schema_version: String,
    pub dim: usize,
    pub labels: Vec<String>,
    pub vectors: Vec<Vec<Cx>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionFile {
    pub schema_version: String,
    pub dim: usize,
    pub basis_a_id: String,
    pub basis_b_id: String,
    pub values: Vec<Vec<Cx>>,
}

/// A state loaded from disk; pure states keep their vector form so
/// commands that need amplitudes (weak values) can insist on it.
#[derive(Debug, Clone)]
pub enum LoadedState {
    Pure(StateVector),
    Mixed(DensityOperator),
}

impl LoadedState {
    pub fn density(&self) -> DensityOperator {
        match self {
            LoadedState::Pure(psi) => DensityOperator::from_pure(psi),
            LoadedState::Mixed(rho) => rho.clone(),
        }
    }

}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn parse_json<'a, T: Deserialize<'a>>(path: &Path, text: &'a str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn check_schema_version(path: &Path, version: &str) -> Result<(), CliError> {
    if version != SCHEMA_VERSION {
        return Err(CliError::Invalid {
            path: path.display().to_string(),
            field: "schema_version",
            message: format!("unsupported schema version {version:?}, expected \"{SCHEMA_VERSION}\""),
        });
    }
    Ok(())
}

fn invalid(path: &Path, field: &'static str, e: impl std::fmt::Display) -> CliError {
    CliError::Invalid {
        path: path.display().to_string(),
        field,
        message: e.to_string(),
    }
}

pub fn load_state(path: &Path, tol: &Tolerances) -> Result<LoadedState, CliError> {
    let text = read_file(path)?;
    let file: StateFile = parse_json(path, &text)?;
    check_schema_version(path, &file.schema_version)?;
    match file.kind {
        StateKind::Pure => {
            let amplitudes = file.amplitudes.ok_or_else(|| {
                invalid(path, "amplitudes", "pure states require an amplitudes array")
            })?;
            if amplitudes.len() != file.dim {
                return Err(invalid(
                    path,
                    "amplitudes",
                    format!("expected {} entries, found {}", file.dim, amplitudes.len()),
                ));
            }
            let psi = StateVector::new(amplitudes.into_iter().map(to_c64).collect(), tol)
                .map_err(|e| invalid(path, "amplitudes", e))?;
            Ok(LoadedState::Pure(psi))
        }
        StateKind::Mixed => {
            let rows = file.matrix.ok_or_else(|| {
                invalid(path, "matrix", "mixed states require a matrix of [re, im] entries")
            })?;
            let rho = DensityOperator::new(complex_matrix(path, "matrix", rows, file.dim)?, tol)
                .map_err(|e| invalid(path, "matrix", e))?;
            Ok(LoadedState::Mixed(rho))
        }
    }
}

/// Loads a state that must be pure (weak-value selections).
pub fn load_pure_state(path: &Path, tol: &Tolerances) -> Result<StateVector, CliError> {
    match load_state(path, tol)? {
        LoadedState::Pure(psi) => Ok(psi),
        LoadedState::Mixed(_) => Err(invalid(
            path,
            "kind",
            "this command requires a pure state (kind = \"pure\")",
        )),
    }
}

pub fn load_basis(path: &Path, tol: &Tolerances) -> Result<OrthonormalBasis, CliError> {
    let text = read_file(path)?;
    let file: BasisFile = parse_json(path, &text)?;
    check_schema_version(path, &file.schema_version)?;
    if file.vectors.len() != file.dim {
        return Err(invalid(
            path,
            "vectors",
            format!("expected {} vectors, found {}", file.dim, file.vectors.len()),
        ));
    }
    let mut vectors = Vec::with_capacity(file.dim);
    for (j, row) in file.vectors.into_iter().enumerate() {
        if row.len() != file.dim {
            return Err(invalid(
                path,
                "vectors",
                format!("vector {j}: expected {} amplitudes, found {}", file.dim, row.len()),
            ));
        }
        let v = StateVector::new(row.into_iter().map(to_c64).collect(), tol)
            .map_err(|e| invalid(path, "vectors", format!("vector {j}: {e}")))?;
        vectors.push(v);
    }
    OrthonormalBasis::new(vectors, file.labels, tol).map_err(|e| invalid(path, "vectors", e))
}

/// Loads a distribution from either a bare `DistributionFile` or a result
/// envelope whose payload is a distribution.
pub fn load_distribution(path: &Path, tol: &Tolerances) -> Result<KDDistribution, CliError> {
    let text = read_file(path)?;
    let raw: serde_json::Value = parse_json(path, &text)?;
    let file: DistributionFile = if raw.get("payload").is_some() {
        let payload = raw.get("payload").expect("checked above");
        if payload.get("kind").and_then(|k| k.as_str()) != Some("distribution") {
            return Err(invalid(
                path,
                "payload",
                "envelope payload is not a distribution",
            ));
        }
        let mut lifted = serde_json::Map::new();
        lifted.insert(
            "schema_version".into(),
            raw.get("schema_version")
                .cloned()
                .unwrap_or_else(|| serde_json::Value::String(SCHEMA_VERSION.into())),
        );
        for key in ["dim", "basis_a_id", "basis_b_id", "values"] {
            let value = payload.get(key).ok_or_else(|| {
                invalid(path, "payload", format!("distribution payload lacks {key:?}"))
            })?;
            lifted.insert(key.to_string(), value.clone());
        }
        serde_json::from_value(serde_json::Value::Object(lifted)).map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?
    } else {
        serde_json::from_value(raw).map_err(|e| CliError::Parse {
            path: path.display().to_string(),
            message: e.to_string(),
        })?
    };
    check_schema_version(path, &file.schema_version)?;
    let values = complex_matrix(path, "values", file.values, file.dim)?;
    KDDistribution::new(values, file.basis_a_id, file.basis_b_id, tol)
        .map_err(|e| invalid(path, "values", e))
}

fn complex_matrix(
    path: &Path,
    field: &'static str,
    rows: Vec<Vec<Cx>>,
    dim: usize,
) -> Result<Array2<C64>, CliError> {
    if rows.len() != dim {
        return Err(invalid(
            path,
            field,
            format!("expected {dim} rows, found {}", rows.len()),
        ));
    }
    let mut out = Array2::zeros((dim, dim));
    for (r, row) in rows.into_iter().enumerate() {
        if row.len() != dim {
            return Err(invalid(
                path,
                field,
                format!("row {r}: expected {dim} entries, found {}", row.len()),
            ));
        }
        for (c, x) in row.into_iter().enumerate() {
            out[[r, c]] = to_c64(x);
        }
    }
    Ok(out)
}

/// Hex SHA-256 of a file's raw bytes, recorded in envelopes so runs can be
/// tied to exact inputs.
pub fn file_digest(path: &Path) -> Result<String, CliError> {
    use sha2::{Digest, Sha256};
    let bytes = fs::read(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    let digest = Sha256::digest(&bytes);
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}
