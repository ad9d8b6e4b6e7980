//! CLI failure type, exit-code policy, and the stderr diagnostic line.
//!
//! Exit codes: 0 success, 2 input/usage error, 3 dimension or identity
//! mismatch, 4 domain error (a mathematically impossible request on valid
//! inputs). Every failure prints exactly one JSON object on stderr with
//! fields `error_kind` and `message`.

use kdcalc_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    /// File could not be read.
    Io { path: String, message: String },
    /// File read but not parseable as its schema.
    Parse { path: String, message: String },
    /// File parsed but failed validation; `field` names the offending part.
    Invalid {
        path: String,
        field: &'static str,
        message: String,
    },
    /// Flag combination or value the CLI rejects before any math runs.
    Usage { message: String },
    /// The calculus itself refused.
    Core(CoreError),
    /// A scenario or selftest ran to completion but did not pass.
    CheckFailed { what: &'static str, message: String },
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. }
            | CliError::Parse { .. }
            | CliError::Invalid { .. }
            | CliError::Usage { .. } => 2,
            CliError::CheckFailed { .. } => 4,
            CliError::Core(e) => match e {
                CoreError::DimensionMismatch { .. } | CoreError::BasisIdMismatch { .. } => 3,
                // Bad knob values are input errors even though the core
                // reports them.
                CoreError::InvalidCoupling { .. }
                | CoreError::ShotBudgetZero
                | CoreError::InvalidHbar { .. }
                | CoreError::EmptyDimension
                | CoreError::RankOutOfRange { .. } => 2,
                _ => 4,
            },
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Invalid { .. } => "invalid_input",
            CliError::Usage { .. } => "usage",
            CliError::CheckFailed { what, .. } => what,
            CliError::Core(e) => match e {
                CoreError::DimensionMismatch { .. } => "dimension_mismatch",
                CoreError::EmptyDimension => "empty_dimension",
                CoreError::NonFinite { .. } => "non_finite",
                CoreError::NotNormalized { .. } => "not_normalized",
                CoreError::NotHermitian { .. } => "not_hermitian",
                CoreError::TraceNotOne { .. } => "trace_not_one",
                CoreError::NotPositiveSemidefinite { .. } => "not_positive_semidefinite",
                CoreError::NotOrthonormal { .. } => "not_orthonormal",
                CoreError::DuplicateLabel { .. } => "duplicate_label",
                CoreError::LabelCountMismatch { .. } => "label_count_mismatch",
                CoreError::RankOutOfRange { .. } => "rank_out_of_range",
                CoreError::OverlapTooSmall { .. } => "overlap_too_small",
                CoreError::BasisIdMismatch { .. } => "basis_id_mismatch",
                CoreError::KdNotNormalized { .. } => "kd_not_normalized",
                CoreError::ImaginaryLeak { .. } => "imaginary_leak",
                CoreError::NotAProbability { .. } => "not_a_probability",
                CoreError::KernelNotNormalized { .. } => "kernel_not_normalized",
                CoreError::UndefinedCells { .. } => "undefined_cells",
                CoreError::ZeroWeakValue { .. } => "zero_weak_value",
                CoreError::PostselectionImpossible { .. } => "postselection_impossible",
                CoreError::ShotBudgetZero => "shot_budget_zero",
                CoreError::InvalidCoupling { .. } => "invalid_coupling",
                CoreError::InvalidHbar { .. } => "invalid_hbar",
            },
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Io { path, message } => format!("{path}: {message}"),
            CliError::Parse { path, message } => format!("{path}: {message}"),
            CliError::Invalid {
                path,
                field,
                message,
            } => format!("{path}: {field}: {message}"),
            CliError::Usage { message } => message.clone(),
            CliError::CheckFailed { message, .. } => message.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }

    /// The single machine-parsable stderr line.
    pub fn diagnostic(&self) -> String {
        let mut obj = serde_json::Map::new();
        obj.insert(
            "error_kind".to_string(),
            serde_json::Value::String(self.kind().to_string()),
        );
        obj.insert(
            "message".to_string(),
            serde_json::Value::String(self.message()),
        );
        serde_json::Value::Object(obj).to_string()
    }
}
