//! Report records, written as JSON lines or CSV.

use std::io::Write;

use bgraph::montecarlo::Estimate;
use bgraph::numeric::ln_big;
use bgraph::BigCount;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::CliError;

pub const FIELDS: [&str; 8] = [
    "instance",
    "quantity",
    "value",
    "log_value",
    "stderr",
    "error_hint",
    "seed",
    "trials",
];

/// One output row. Non-finite floats are written as `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub instance: String,
    pub quantity: String,
    pub value: Value,
    pub log_value: Option<f64>,
    pub stderr: Option<f64>,
    pub error_hint: Option<f64>,
    pub seed: Option<u64>,
    pub trials: Option<u64>,
}

impl Record {
    pub fn new(instance: &str, quantity: impl Into<String>, value: impl Into<Value>) -> Self {
        Self {
            instance: instance.to_string(),
            quantity: quantity.into(),
            value: value.into(),
            log_value: None,
            stderr: None,
            error_hint: None,
            seed: None,
            trials: None,
        }
    }

    /// A real value with its natural log.
    pub fn real(instance: &str, quantity: impl Into<String>, value: f64, ln: f64) -> Self {
        let mut r = Self::new(instance, quantity, finite(value));
        r.log_value = Some(ln).filter(|x| x.is_finite());
        r
    }

    /// An exact count: a JSON integer when it fits in `u64`, else a decimal string.
    pub fn count(instance: &str, quantity: impl Into<String>, c: &BigCount) -> Self {
        let value = match c.to_u64() {
            Some(v) => Value::from(v),
            None => Value::from(c.to_string()),
        };
        let mut r = Self::new(instance, quantity, value);
        r.log_value = Some(ln_big(c)).filter(|x| x.is_finite());
        r
    }

    pub fn estimate(instance: &str, quantity: impl Into<String>, e: &Estimate) -> Self {
        let mut r = Self::real(instance, quantity, e.mean, e.mean.ln());
        r.stderr = Some(e.stderr);
        r.seed = Some(e.seed);
        r.trials = Some(e.trials);
        r
    }

    pub fn hint(mut self, h: f64) -> Self {
        self.error_hint = Some(h).filter(|x| x.is_finite());
        self
    }
}

fn finite(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else {
        Value::Null
    }
}

pub enum Sink<'a> {
    Json(&'a mut dyn Write),
    Csv(Box<csv::Writer<&'a mut dyn Write>>),
}

impl<'a> Sink<'a> {
    pub fn new(out: &'a mut dyn Write, csv: bool) -> Result<Self, CliError> {
        if !csv {
            return Ok(Sink::Json(out));
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(FIELDS).map_err(csv_err)?;
        Ok(Sink::Csv(Box::new(w)))
    }

    pub fn emit(&mut self, r: &Record) -> Result<(), CliError> {
        match self {
            Sink::Json(out) => {
                let line =
                    serde_json::to_string(r).map_err(|e| CliError::Runtime(e.to_string()))?;
                writeln!(out, "{line}")?;
            }
            Sink::Csv(w) => {
                let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
                let value = match &r.value {
                    Value::Null => String::new(),
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                w.write_record([
                    r.instance.clone(),
                    r.quantity.clone(),
                    value,
                    opt(r.log_value),
                    opt(r.stderr),
                    opt(r.error_hint),
                    r.seed.map(|s| s.to_string()).unwrap_or_default(),
                    r.trials.map(|s| s.to_string()).unwrap_or_default(),
                ])
                .map_err(csv_err)?;
            }
        }
        Ok(())
    }

    pub fn finish(self) -> Result<(), CliError> {
        match self {
            Sink::Json(out) => out.flush()?,
            Sink::Csv(mut w) => w.flush()?,
        }
        Ok(())
    }
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Runtime(e.to_string())
}
