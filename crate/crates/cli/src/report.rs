//! Report value types and exit codes.

use cslab_core::error::LabError;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// A reported number with its absolute error estimate or tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Num {
    pub value: f64,
    pub error: f64,
}

impl Num {
    pub fn new(value: f64, error: f64) -> Self {
        Num { value, error }
    }

    /// An exactly representable input or grid value.
    pub fn exact(value: f64) -> Self {
        Num { value, error: 0.0 }
    }

    /// A value limited by floating-point rounding.
    pub fn rounded(value: f64) -> Self {
        Num {
            value,
            error: 1e-13 * value.abs().max(1e-300),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CNum {
    pub re: f64,
    pub im: f64,
    pub error: f64,
}

impl CNum {
    pub fn new(z: Complex64, error: f64) -> Self {
        CNum {
            re: z.re,
            im: z.im,
            error,
        }
    }
}

/// Exit status classes.
#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags or configuration: exit 1.
    Usage(String),
    /// A numerical certification could not be made: exit 2.
    Inconclusive(String),
    /// A checked criterion failed: exit 3.
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Inconclusive(_) => 2,
            CliError::Failed(_) => 3,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Inconclusive(m) | CliError::Failed(m) => m,
        }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        let msg = e.to_string();
        match e {
            LabError::NoSpectralGap { .. }
            | LabError::RankUnstable { .. }
            | LabError::ThresholdSensitive(_)
            | LabError::Inconclusive(_)
            | LabError::IllConditioned(_)
            | LabError::StepUnderflow { .. }
            | LabError::SingularPoint(_)
            | LabError::KernelPresent(_)
            | LabError::NonCommuting(_) => CliError::Inconclusive(msg),
            LabError::NonzeroIndex(_) | LabError::DynkinMismatch(_) => CliError::Failed(msg),
            _ => CliError::Usage(msg),
        }
    }
}

/// Replaces every non-integer number in `v` by an exact [`Num`].
pub fn tag_floats(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match v {
        Value::Number(n) if !n.is_i64() && !n.is_u64() => {
            serde_json::to_value(Num::exact(n.as_f64().unwrap_or(f64::NAN)))
                .expect("Num serializes")
        }
        Value::Array(a) => Value::Array(a.into_iter().map(tag_floats).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, x)| (k, tag_floats(x))).collect()),
        x => x,
    }
}
