//! Structured pass/fail records for oracle and property checks.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::product::TWIST_CONVENTION;

/// One compared quantity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportCase {
    pub input: Value,
    pub expected: [f64; 2],
    pub got: [f64; 2],
    pub abs_err: f64,
    pub tol: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub cases: Vec<ReportCase>,
    pub pass: bool,
    pub version: String,
    pub twist_convention: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            cases: Vec::new(),
            pass: true,
            version: crate::VERSION.to_string(),
            twist_convention: TWIST_CONVENTION.to_string(),
            notes: Vec::new(),
        }
    }

    /// Records `|got − expected| ≤ tol`.
    pub fn compare(&mut self, input: Value, expected: Complex64, got: Complex64, tol: f64) -> bool {
        let abs_err = (got - expected).norm();
        self.push_case(input, expected, got, abs_err, tol)
    }

    /// Records a comparison whose error measure is computed by the caller
    /// (e.g. a norm of a difference of elements).
    pub fn push_case(
        &mut self,
        input: Value,
        expected: Complex64,
        got: Complex64,
        abs_err: f64,
        tol: f64,
    ) -> bool {
        // NaN errors fail.
        let pass = abs_err <= tol;
        self.pass &= pass;
        self.cases.push(ReportCase {
            input,
            expected: [expected.re, expected.im],
            got: [got.re, got.im],
            abs_err,
            tol,
            pass,
        });
        pass
    }

    /// Records a one-sided check `got ≥ bound − tol`.
    pub fn at_least(&mut self, input: Value, bound: f64, got: f64, tol: f64) -> bool {
        let deficit = (bound - got).max(0.0);
        let deficit = if got.is_nan() { f64::INFINITY } else { deficit };
        self.push_case(
            input,
            Complex64::new(bound, 0.0),
            Complex64::new(got, 0.0),
            deficit,
            tol,
        )
    }

    /// Records a one-sided check `got ≤ bound + tol`.
    pub fn at_most(&mut self, input: Value, bound: f64, got: f64, tol: f64) -> bool {
        let excess = (got - bound).max(0.0);
        let excess = if got.is_nan() { f64::INFINITY } else { excess };
        self.push_case(
            input,
            Complex64::new(bound, 0.0),
            Complex64::new(got, 0.0),
            excess,
            tol,
        )
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Appends every case of `other` and folds its verdict into this one.
    pub fn absorb(&mut self, other: VerificationReport) {
        self.pass &= other.pass;
        self.cases.extend(other.cases);
        self.notes.extend(other.notes);
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportCase> {
        self.cases.iter().filter(|c| !c.pass)
    }

    pub fn max_abs_err(&self) -> f64 {
        self.cases.iter().map(|c| c.abs_err).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn verdict_is_conjunction() {
        let mut r = VerificationReport::new("demo");
        assert!(r.compare(json!(1), Complex64::new(1.0, 0.0), Complex64::new(1.0, 1e-13), 1e-12));
        assert!(r.pass);
        assert!(!r.at_least(json!(2), 1.0, 0.5, 0.1));
        assert!(!r.pass);
        assert_eq!(r.failures().count(), 1);
        assert!(!r.at_most(json!(3), 1.0, f64::NAN, 0.1));
    }

    #[test]
    fn json_layout() {
        let mut r = VerificationReport::new("layout");
        r.compare(json!({"k": [1, 0]}), Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), 0.0);
        let v: Value = serde_json::to_value(&r).unwrap();
        assert_eq!(v["check"], "layout");
        assert_eq!(v["cases"][0]["expected"], json!([1.0, 0.0]));
        assert_eq!(v["cases"][0]["pass"], json!(true));
        assert_eq!(v["pass"], json!(true));
        assert_eq!(v["version"], json!(crate::VERSION));
        assert!(v.get("notes").is_none());
    }
}
