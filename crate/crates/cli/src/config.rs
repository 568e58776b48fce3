//! Flag values, JSON config overrides and input parsing.

use std::path::Path;

use cslab_core::liealg::Family;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::report::CliError;

/// Parses `a+bi`, `a-bi`, `bi`, `i`, `-i` or a real number.
pub fn parse_complex(s: &str) -> Result<Complex64, CliError> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || CliError::Usage(format!("cannot parse complex number {s:?}"));
    if t.is_empty() {
        return Err(bad());
    }
    let Some(body) = t.strip_suffix('i') else {
        return t
            .parse::<f64>()
            .map(|x| Complex64::new(x, 0.0))
            .map_err(|_| bad());
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x.parse::<f64>().map_err(|_| bad())?,
    };
    Ok(Complex64::new(re.parse::<f64>().map_err(|_| bad())?, im))
}

/// Comma-separated list of complex numbers.
pub fn parse_complex_list(s: &str) -> Result<Vec<Complex64>, CliError> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(parse_complex).collect()
}

/// Comma-separated list of integers.
pub fn parse_int_list(s: &str) -> Result<Vec<i64>, CliError> {
    s.split(',')
        .map(|x| {
            x.trim()
                .parse::<i64>()
                .map_err(|_| CliError::Usage(format!("cannot parse integer {x:?}")))
        })
        .collect()
}

pub fn parse_family(s: &str) -> Result<Family, CliError> {
    s.parse::<Family>().map_err(CliError::from)
}

/// `su2`, `su3` or `su4` to the matrix size.
pub fn parse_group(s: &str) -> Result<usize, CliError> {
    match s.to_ascii_lowercase().as_str() {
        "su2" => Ok(2),
        "su3" => Ok(3),
        "su4" => Ok(4),
        _ => Err(CliError::Usage(format!(
            "unsupported group {s:?}; use su2, su3 or su4"
        ))),
    }
}

pub fn check_tau(tau: Complex64) -> Result<Complex64, CliError> {
    if tau.im > 0.0 && tau.is_finite() {
        Ok(tau)
    } else {
        Err(CliError::Usage(format!(
            "modulus must have Im tau > 0, got {tau}"
        )))
    }
}

pub fn check_positive(name: &str, x: f64) -> Result<f64, CliError> {
    if x > 0.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(CliError::Usage(format!("{name} must be positive, got {x}")))
    }
}

/// Overlays the keys of a JSON object file on flag values.
pub fn apply_config<T: Serialize + DeserializeOwned>(
    args: T,
    path: Option<&Path>,
) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(args);
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let patch: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
    let serde_json::Value::Object(patch) = patch else {
        return Err(CliError::Usage(
            "config file must hold a JSON object".into(),
        ));
    };
    let mut base = serde_json::to_value(args).map_err(|e| CliError::Usage(e.to_string()))?;
    let obj = base
        .as_object_mut()
        .expect("flag structs serialize to objects");
    for (k, v) in patch {
        if !obj.contains_key(&k) {
            return Err(CliError::Usage(format!("unknown config key {k:?}")));
        }
        obj.insert(k, v);
    }
    serde_json::from_value(base).map_err(|e| CliError::Usage(format!("config: {e}")))
}
