//! Machine-readable run reports. Field order is fixed by the struct
//! layout; `inputs`, `tolerances` and `details` are sorted maps.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

#[derive(Debug, Clone, Serialize)]
pub struct Witness {
    pub re: f64,
    pub im: f64,
    pub value: f64,
}

impl Witness {
    pub fn new(z: Complex64, value: f64) -> Self {
        Witness {
            re: z.re,
            im: z.im,
            value,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Verdict {
    pub holds: bool,
    pub margin: Option<f64>,
    pub witness: Option<Witness>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub order_estimate: Option<f64>,
    pub details: Value,
    pub tolerances: BTreeMap<String, f64>,
    pub wall_time_ms: f64,
    pub version: &'static str,
}

impl RunReport {
    pub fn new(command: &str, holds: bool) -> Self {
        RunReport {
            command: command.to_string(),
            inputs: BTreeMap::new(),
            verdict: Verdict {
                holds,
                margin: None,
                witness: None,
            },
            order_estimate: None,
            details: Value::Null,
            tolerances: BTreeMap::new(),
            wall_time_ms: 0.0,
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    pub fn input(mut self, key: &str, value: impl Serialize) -> Self {
        self.inputs
            .insert(key.to_string(), serde_json::to_value(value).expect("inputs serialise"));
        self
    }

    pub fn tolerance(mut self, key: &str, value: f64) -> Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }

    pub fn margin(mut self, m: f64) -> Self {
        self.verdict.margin = Some(m);
        self
    }

    pub fn witness(mut self, z: Complex64, value: f64) -> Self {
        self.verdict.witness = Some(Witness::new(z, value));
        self
    }

    pub fn details(mut self, d: impl Serialize) -> Self {
        self.details = serde_json::to_value(d).expect("details serialise");
        self
    }
}
