use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Named columns of equal length; ordered so serialization is stable.
pub type Table = BTreeMap<String, Vec<f64>>;

/// Outcome of one check. `passed` is decided by the producing check (a
/// threshold on `measured`, or a window for fitted exponents).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub passed: bool,
    pub measured: f64,
    pub bound: f64,
    pub details: Table,
    /// Free-form remarks (status of runs, fitted constants).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckReport {
    /// Pass iff `measured <= bound` (NaN fails).
    pub fn at_most(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            name: name.into(),
            passed: measured <= bound,
            measured,
            bound,
            details: Table::new(),
            notes: Vec::new(),
        }
    }

    /// Pass iff `measured >= bound` (NaN fails).
    pub fn at_least(name: impl Into<String>, measured: f64, bound: f64) -> Self {
        Self {
            passed: measured >= bound,
            ..Self::at_most(name, measured, bound)
        }
    }

    pub fn with_column(mut self, key: &str, values: Vec<f64>) -> Self {
        self.details.insert(key.to_string(), values);
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    /// Folds sub-reports into one that passes iff all of them pass. `measured`
    /// and `bound` come from the part with the largest `measured / bound`.
    pub fn all(name: impl Into<String>, parts: &[CheckReport]) -> Self {
        let passed = !parts.is_empty() && parts.iter().all(|r| r.passed);
        let worst = parts.iter().max_by(|a, b| ratio(a).total_cmp(&ratio(b))).cloned();
        let mut out = match worst {
            Some(w) => Self::at_most(name, w.measured, w.bound),
            None => Self::at_most(name, f64::NAN, f64::NAN),
        };
        out.passed = passed;
        for r in parts {
            out.notes.push(format!(
                "{}: {} (measured {:.6e}, bound {:.6e})",
                r.name,
                if r.passed { "pass" } else { "FAIL" },
                r.measured,
                r.bound
            ));
        }
        out
    }
}

fn ratio(r: &CheckReport) -> f64 {
    if !r.passed {
        f64::INFINITY
    } else if r.bound != 0.0 {
        r.measured / r.bound
    } else {
        r.measured
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thresholds() {
        assert!(CheckReport::at_most("a", 1.0, 1.0).passed);
        assert!(!CheckReport::at_most("a", f64::NAN, 1.0).passed);
        assert!(CheckReport::at_least("b", 0.5, 0.45).passed);
        assert!(!CheckReport::at_least("b", 0.4, 0.45).passed);
    }

    #[test]
    fn folding_keeps_failures_visible() {
        let parts = [CheckReport::at_most("x", 1.0, 2.0), CheckReport::at_most("y", 3.0, 2.0)];
        let all = CheckReport::all("both", &parts);
        assert!(!all.passed);
        assert_eq!(all.measured, 3.0);
        assert_eq!(all.notes.len(), 2);
        assert!(!CheckReport::all("none", &[]).passed);
    }

    #[test]
    fn json_round_trip() {
        let r = CheckReport::at_most("r", 0.25, 1.0).with_column("t", vec![0.0, 1.0]);
        let s = serde_json::to_string(&r).unwrap();
        let back: CheckReport = serde_json::from_str(&s).unwrap();
        assert_eq!(back, r);
        assert!(s.contains("\"passed\":true"));
    }
}
