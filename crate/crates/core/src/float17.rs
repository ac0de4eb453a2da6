//! Floating-point evidence values.
//!
//! Exact values serialize in the qfield grammar. Floats only carry numeric
//! evidence and are always written with 17 significant digits so they
//! round-trip through `f64` without loss.

use std::fmt;

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// An `f64` that serializes with 17 significant digits; non-finite values
/// serialize as `null`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Float17(pub f64);

impl Float17 {
    pub fn get(self) -> f64 {
        self.0
    }
}

impl From<f64> for Float17 {
    fn from(x: f64) -> Self {
        Float17(x)
    }
}

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

impl fmt::Display for Float17 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_f64(self.0))
    }
}

impl Serialize for Float17 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(format_f64(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}
