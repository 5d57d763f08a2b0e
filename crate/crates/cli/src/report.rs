use std::collections::BTreeMap;

use serde::Serialize;
use serde_json::Value;

pub const SCHEMA: u32 = 1;

/// One named comparison between an expected and an observed value.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub expected: Value,
    pub observed: Value,
    pub tolerance: Option<f64>,
    pub pass: bool,
}

impl Check {
    /// `|observed − expected| ≤ tol`.
    pub fn close(name: impl Into<String>, expected: f64, observed: f64, tol: f64) -> Check {
        Check {
            name: name.into(),
            expected: expected.into(),
            observed: observed.into(),
            tolerance: Some(tol),
            pass: (observed - expected).abs() <= tol,
        }
    }

    /// `observed ≥ bound − tol`.
    pub fn at_least(name: impl Into<String>, bound: f64, observed: f64, tol: f64) -> Check {
        Check {
            name: name.into(),
            expected: Value::String(format!(">= {bound}")),
            observed: observed.into(),
            tolerance: Some(tol),
            pass: observed >= bound - tol,
        }
    }

    /// `observed < bound`.
    pub fn below(name: impl Into<String>, bound: f64, observed: f64) -> Check {
        Check {
            name: name.into(),
            expected: Value::String(format!("< {bound}")),
            observed: observed.into(),
            tolerance: None,
            pass: observed < bound,
        }
    }

    pub fn equal<T: Serialize + PartialEq>(name: impl Into<String>, expected: T, observed: T) -> Check {
        let pass = expected == observed;
        Check {
            name: name.into(),
            expected: serde_json::to_value(&expected).unwrap_or(Value::Null),
            observed: serde_json::to_value(&observed).unwrap_or(Value::Null),
            tolerance: None,
            pass,
        }
    }
}

/// The result of one campaign. Wall-clock time is reported on stderr only,
/// so that equal invocations give byte-identical JSON.
#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: u32,
    pub campaign: String,
    pub parameters: BTreeMap<String, Value>,
    pub checks: Vec<Check>,
    pub error_estimates: BTreeMap<String, f64>,
    pub data: Value,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub campaigns: Vec<Report>,
    pub pass: bool,
}

impl Report {
    pub fn new(campaign: &str) -> Report {
        Report {
            schema: SCHEMA,
            campaign: campaign.to_string(),
            parameters: BTreeMap::new(),
            checks: Vec::new(),
            error_estimates: BTreeMap::new(),
            data: Value::Null,
            campaigns: Vec::new(),
            pass: true,
        }
    }

    pub fn param(&mut self, key: &str, value: impl Serialize) {
        self.parameters
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn check(&mut self, c: Check) {
        self.pass &= c.pass;
        self.checks.push(c);
    }

    pub fn error(&mut self, key: impl Into<String>, e: f64) {
        self.error_estimates.insert(key.into(), e);
    }

    pub fn nest(&mut self, r: Report) {
        self.pass &= r.pass;
        self.campaigns.push(r);
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
