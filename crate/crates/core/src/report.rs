//! Machine-readable verification reports.
//!
//! A report is a list of named checks plus the parameters that produced it.
//! Wall-clock timing lives in its own top-level field so that two runs with
//! the same configuration serialize identically once it is dropped.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

/// `a+bi` with shortest round-trip decimals, e.g. `2.5-0.7i`.
pub fn fmt_complex(z: Complex64) -> String {
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`, exponents like `1e-3+2i`).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || Error::Config(format!("cannot parse complex number '{text}'"));
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i') else {
        return s.parse::<f64>().map(|re| Complex64::new(re, 0.0)).map_err(|_| bad());
    };
    // split at the last sign that is not the leading one or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let imag = |t: &str| -> Result<f64> {
        match t {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => t.parse::<f64>().map_err(|_| bad()),
        }
    };
    match split {
        Some(k) => {
            let re = body[..k].parse::<f64>().map_err(|_| bad())?;
            Ok(Complex64::new(re, imag(&body[k..])?))
        }
        None => Ok(Complex64::new(0.0, imag(body)?)),
    }
}

/// Serde adapter storing a [`Complex64`] as an `a+bi` string.
pub mod complex_str {
    use num_complex::Complex64;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_str(&super::fmt_complex(*z))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Complex64, D::Error> {
        let text = String::deserialize(de)?;
        super::parse_complex(&text).map_err(D::Error::custom)
    }
}

/// One named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub expected: Option<f64>,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub tolerance: Option<f64>,
    /// Ungated checks are reported but never fail a run.
    pub gated: bool,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, Value>,
}

impl Check {
    /// An informational check; call [`Check::gate`] to make it count.
    pub fn new(name: impl Into<String>, value: f64, expected: Option<f64>) -> Self {
        let (abs_err, rel_err) = match expected {
            Some(e) => {
                let a = (value - e).abs();
                (Some(a), Some(if e != 0.0 { a / e.abs() } else { a }))
            }
            None => (None, None),
        };
        Self {
            name: name.into(),
            value,
            expected,
            abs_err,
            rel_err,
            tolerance: None,
            gated: false,
            pass: true,
            extra: BTreeMap::new(),
        }
    }

    pub fn errors(mut self, abs_err: f64, rel_err: f64) -> Self {
        self.abs_err = Some(abs_err);
        self.rel_err = Some(rel_err);
        self
    }

    pub fn gate(mut self, pass: bool, tolerance: f64) -> Self {
        self.gated = true;
        self.pass = pass;
        self.tolerance = Some(tolerance);
        self
    }

    pub fn extra(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.extra.insert(key.to_string(), value.into());
        self
    }
}

/// Checks from one command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub command: String,
    pub params: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub pass: bool,
    #[serde(default)]
    pub warnings: Vec<String>,
    pub meta: BTreeMap<String, Value>,
    /// Elapsed wall-clock seconds; excluded from determinism comparisons.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<f64>,
}

impl VerificationReport {
    pub fn new(command: impl Into<String>) -> Self {
        let mut meta = BTreeMap::new();
        meta.insert("version".into(), Value::from(env!("CARGO_PKG_VERSION")));
        Self {
            command: command.into(),
            params: BTreeMap::new(),
            checks: Vec::new(),
            pass: true,
            warnings: Vec::new(),
            meta,
            timing: None,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Into<Value>) {
        self.params.insert(key.into(), value.into());
    }

    pub fn push(&mut self, check: Check) {
        if check.gated && !check.pass {
            self.pass = false;
        }
        self.checks.push(check);
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        for c in checks {
            self.push(c);
        }
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.gated && !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))
    }
}

/// Concatenates reports; clashing check names get `#2`, `#3`, … suffixes and
/// a warning.
pub fn report_merge(reports: &[VerificationReport]) -> VerificationReport {
    let mut out = VerificationReport::new("merge");
    let commands: Vec<Value> = reports.iter().map(|r| Value::from(r.command.clone())).collect();
    out.param("sources", Value::Array(commands));
    let mut seen = BTreeSet::new();
    for r in reports {
        out.warnings.extend(r.warnings.iter().cloned());
        for c in &r.checks {
            let mut c = c.clone();
            if !seen.insert(c.name.clone()) {
                let mut k = 2;
                while seen.contains(&format!("{}#{k}", c.name)) {
                    k += 1;
                }
                let renamed = format!("{}#{k}", c.name);
                out.warnings
                    .push(format!("check '{}' from '{}' renamed to '{renamed}'", c.name, r.command));
                seen.insert(renamed.clone());
                c.name = renamed;
            }
            out.push(c);
        }
    }
    out
}
