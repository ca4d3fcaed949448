//! Study records and their CSV / JSON forms.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::{StudyConfig, StudyKind};

/// One parameter point of a study.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub series: String,
    pub parameter: f64,
    /// NaN-filled when `failed`.
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub dofs: usize,
    pub wall_time: f64,
    pub failed: Option<String>,
}

impl Row {
    pub fn failure(series: &str, parameter: f64, widths: (usize, usize), message: String) -> Self {
        Self {
            series: series.to_string(),
            parameter,
            values: vec![f64::NAN; widths.0],
            residuals: vec![f64::NAN; widths.1],
            dofs: 0,
            wall_time: 0.0,
            failed: Some(message),
        }
    }
}

/// Named scalar shown as a reference line or in the summary.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reference {
    pub name: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Provenance {
    pub config_sha256: String,
    pub version: String,
    pub seed: u64,
}

impl Provenance {
    pub fn new(config_source: &str, seed: u64) -> Self {
        let digest = Sha256::digest(config_source.as_bytes());
        Self {
            config_sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StudyRecord {
    pub id: String,
    pub kind: StudyKind,
    pub config: StudyConfig,
    pub parameter_name: String,
    pub value_names: Vec<String>,
    pub residual_names: Vec<String>,
    pub rows: Vec<Row>,
    pub references: Vec<Reference>,
    /// Named derived quantities (fitted slopes, limits).
    pub derived: Vec<Reference>,
    pub provenance: Provenance,
    /// Set when the study stopped on a failure.
    pub failure: Option<String>,
}

impl StudyRecord {
    pub fn reference(&self, name: &str) -> Option<f64> {
        self.references.iter().chain(&self.derived).find(|r| r.name == name).map(|r| r.value)
    }

    pub fn series(&self, name: &str) -> impl Iterator<Item = &Row> {
        let name = name.to_string();
        self.rows.iter().filter(move |r| r.series == name)
    }

    pub fn any_failed(&self) -> bool {
        self.failure.is_some() || self.rows.iter().any(|r| r.failed.is_some())
    }

    /// Rows ordered by series (first appearance) and then by parameter.
    pub fn sort_rows(&mut self) {
        let mut order: Vec<String> = Vec::new();
        for r in &self.rows {
            if !order.contains(&r.series) {
                order.push(r.series.clone());
            }
        }
        self.rows.sort_by(|a, b| {
            let ia = order.iter().position(|s| *s == a.series);
            let ib = order.iter().position(|s| *s == b.series);
            ia.cmp(&ib).then(a.parameter.total_cmp(&b.parameter))
        });
    }

    fn header(&self) -> Vec<String> {
        let mut h = vec!["series".to_string(), self.parameter_name.clone()];
        h.extend(self.value_names.iter().cloned());
        h.extend(self.residual_names.iter().cloned());
        h.push("dofs".into());
        h.push("status".into());
        h
    }

    /// CSV bytes (no wall times, so reruns are byte-identical).
    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(self.header()).expect("in-memory CSV");
        for r in &self.rows {
            let mut rec = vec![r.series.clone(), fmt_g17(r.parameter)];
            rec.extend(r.values.iter().map(|v| fmt_g17(*v)));
            rec.extend(r.residuals.iter().map(|v| fmt_g17(*v)));
            rec.push(r.dofs.to_string());
            rec.push(if r.failed.is_some() { "failed".into() } else { "ok".into() });
            w.write_record(rec).expect("in-memory CSV");
        }
        w.into_inner().expect("in-memory CSV")
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let mut obj = serde_json::Map::new();
                obj.insert("series".into(), json!(r.series));
                obj.insert(self.parameter_name.clone(), num(r.parameter));
                for (n, v) in self.value_names.iter().zip(&r.values) {
                    obj.insert(n.clone(), num(*v));
                }
                for (n, v) in self.residual_names.iter().zip(&r.residuals) {
                    obj.insert(n.clone(), num(*v));
                }
                obj.insert("dofs".into(), json!(r.dofs));
                obj.insert("wall_time_s".into(), num(r.wall_time));
                obj.insert("status".into(), json!(if r.failed.is_some() { "failed" } else { "ok" }));
                if let Some(m) = &r.failed {
                    obj.insert("error".into(), json!(m));
                }
                Value::Object(obj)
            })
            .collect();
        let named = |v: &[Reference]| -> Value {
            Value::Object(v.iter().map(|r| (r.name.clone(), num(r.value))).collect())
        };
        json!({
            "study": self.id,
            "kind": self.kind.name(),
            "config": self.config,
            "columns": self.header(),
            "rows": rows,
            "references": named(&self.references),
            "derived": named(&self.derived),
            "status": if self.any_failed() { "failed" } else { "ok" },
            "failure": self.failure,
            "provenance": {
                "config_sha256": self.provenance.config_sha256,
                "version": self.provenance.version,
                "seed": self.provenance.seed,
            },
        })
    }

    pub fn write_csv(&self, mut out: impl Write) -> std::io::Result<()> {
        out.write_all(&self.to_csv())
    }

    pub fn write_json(&self, mut out: impl Write) -> std::io::Result<()> {
        let s = serde_json::to_string_pretty(&self.to_json()).expect("JSON values serialize");
        out.write_all(s.as_bytes())?;
        out.write_all(b"\n")
    }
}

/// JSON numbers use the shortest round-trip form; NaN becomes `null`.
fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v).map(Value::Number).unwrap_or(Value::Null)
}

/// C's `%.17g`.
pub fn fmt_g17(v: f64) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    const P: i32 = 17;
    let sci = format!("{:.*e}", (P - 1) as usize, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= P {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        strip_zeros(&format!("{:.*}", (P - 1 - exp) as usize, v)).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}
