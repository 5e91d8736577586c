use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Outcome of one verification: a residual norm against a tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub name: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    #[serde(default)]
    pub metadata: BTreeMap<String, serde_json::Value>,
}

impl VerificationReport {
    /// `pass` is `max_residual <= tolerance`; a NaN residual fails.
    pub fn new(name: impl Into<String>, max_residual: f64, tolerance: f64) -> Self {
        VerificationReport {
            name: name.into(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            metadata: BTreeMap::new(),
        }
    }

    /// A report that passes when `value >= bound` (observed convergence orders and the like).
    pub fn at_least(name: impl Into<String>, value: f64, bound: f64) -> Self {
        let mut r = VerificationReport::new(name, value, bound).with("bound", "lower");
        r.pass = value >= bound;
        r
    }

    fn is_lower_bound(&self) -> bool {
        self.metadata.get("bound").and_then(|v| v.as_str()) == Some("lower")
    }

    pub fn with(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(value).unwrap_or(serde_json::Value::Null);
        self.metadata.insert(key.to_string(), v);
        self
    }

    /// Combines several reports; the worst residual relative to its tolerance decides.
    pub fn aggregate(name: impl Into<String>, parts: &[VerificationReport]) -> Self {
        let worst = parts.iter().max_by(|a, b| a.ratio().total_cmp(&b.ratio()));
        let mut out = match worst {
            Some(w) if w.is_lower_bound() => VerificationReport::at_least(name, w.max_residual, w.tolerance),
            Some(w) => VerificationReport::new(name, w.max_residual, w.tolerance),
            None => VerificationReport::new(name, 0.0, 0.0),
        };
        out.pass = parts.iter().all(|r| r.pass);
        if let Some(w) = worst {
            out = out.with("worst", &w.name);
        }
        out.with("parts", parts)
    }

    fn ratio(&self) -> f64 {
        if self.max_residual.is_nan() {
            f64::INFINITY
        } else if self.is_lower_bound() {
            self.tolerance / self.max_residual.max(f64::MIN_POSITIVE)
        } else {
            self.max_residual / self.tolerance.max(f64::MIN_POSITIVE)
        }
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_lower_bound() {
            let verdict = if self.pass { "PASS" } else { "FAIL" };
            return write!(f, "{verdict} {}: value {:.3e} (lower bound {:.1e})", self.name, self.max_residual, self.tolerance);
        }
        write!(
            f,
            "{} {}: max residual {:.3e} (tolerance {:.1e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.max_residual,
            self.tolerance
        )
    }
}
