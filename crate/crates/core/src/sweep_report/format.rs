// SPDX-License-Identifier: Apache-2.0

//! CSV and JSON encodings of a [`Table`].
//!
//! Floats are rounded to 9 significant digits before encoding and written
//! in shortest round-trip form, so decoding either format yields the same
//! `f64` values. Infinite values are written as the token `inf`. The CSV
//! may start with `#` comment lines carrying the configuration and any
//! per-circuit failures; readers skip them.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Failure, ReportError, Result, Row, Table};
use crate::boolean_metrics::SensitivityMode;
use crate::bounds::DelayMode;

pub const SCHEMA_VERSION: u32 = 1;

/// Rounds to 9 significant digits.
pub fn round9(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.8e}").parse().unwrap()
    } else {
        x
    }
}

mod f9 {
    use super::*;

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    fn decode<E: serde::de::Error>(r: Repr) -> std::result::Result<f64, E> {
        match r {
            Repr::Num(x) => Ok(x),
            Repr::Text(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => other.parse().map_err(E::custom),
            },
        }
    }

    pub fn encode<S: Serializer>(x: f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        if x.is_nan() {
            s.serialize_str("nan")
        } else if x == f64::INFINITY {
            s.serialize_str("inf")
        } else if x == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(round9(x))
        }
    }

    pub fn serialize<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
        encode(*x, s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
        decode(Repr::deserialize(d)?)
    }

    pub mod opt {
        use super::*;

        pub fn serialize<S: Serializer>(
            x: &Option<f64>,
            s: S,
        ) -> std::result::Result<S::Ok, S::Error> {
            match x {
                Some(x) => encode(*x, s),
                None => s.serialize_none(),
            }
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(
            d: D,
        ) -> std::result::Result<Option<f64>, D::Error> {
            Option::<Repr>::deserialize(d)?.map(decode).transpose()
        }
    }
}

mod flag {
    use super::*;

    pub fn serialize<S: Serializer>(x: &bool, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u8(u8::from(*x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<bool, D::Error> {
        match u8::deserialize(d)? {
            0 => Ok(false),
            1 => Ok(true),
            other => Err(serde::de::Error::custom(format!(
                "flag must be 0 or 1, got {other}"
            ))),
        }
    }
}

/// One output line, with the fixed CSV column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub name: String,
    #[serde(with = "f9")]
    pub epsilon: f64,
    #[serde(with = "f9")]
    pub delta: f64,
    pub s: usize,
    #[serde(rename = "S0")]
    pub s0: usize,
    #[serde(with = "f9")]
    pub k: f64,
    pub n: usize,
    pub d0: Option<usize>,
    #[serde(with = "f9")]
    pub sw0: f64,
    #[serde(with = "f9")]
    pub omega: f64,
    #[serde(with = "f9")]
    pub t: f64,
    #[serde(rename = "Delta", with = "f9")]
    pub capacity: f64,
    #[serde(with = "f9")]
    pub redundancy_lb: f64,
    #[serde(with = "f9")]
    pub size_factor_lb: f64,
    #[serde(with = "f9")]
    pub sw_factor: f64,
    #[serde(with = "f9")]
    pub energy_ratio_lb: f64,
    #[serde(with = "f9")]
    pub total_energy_ratio_lb: f64,
    #[serde(with = "f9")]
    pub leakage_ratio: f64,
    #[serde(with = "f9::opt")]
    pub depth_lb: Option<f64>,
    #[serde(with = "flag")]
    pub infeasible: bool,
    #[serde(with = "f9::opt")]
    pub delay_ratio_lb: Option<f64>,
    #[serde(with = "f9::opt")]
    pub power_ratio: Option<f64>,
    #[serde(with = "f9::opt")]
    pub edp_ratio_lb: Option<f64>,
}

fn r9(x: f64) -> f64 {
    round9(x)
}

impl Record {
    /// Flattens a row, rounding every float to 9 significant digits.
    pub fn from_row(row: &Row) -> Self {
        let (sum, rep) = (&row.summary, &row.report);
        Record {
            name: row.name.clone(),
            epsilon: r9(row.epsilon),
            delta: r9(row.delta),
            s: sum.s,
            s0: sum.s0,
            k: r9(sum.k),
            n: sum.n,
            d0: sum.d0,
            sw0: r9(sum.sw0),
            omega: r9(rep.channel.omega),
            t: r9(rep.channel.t),
            capacity: r9(rep.channel.capacity),
            redundancy_lb: r9(rep.redundancy_lb),
            size_factor_lb: r9(rep.size_factor_lb),
            sw_factor: r9(rep.sw_factor),
            energy_ratio_lb: r9(rep.energy_ratio_lb),
            total_energy_ratio_lb: r9(rep.total_energy_ratio_lb),
            leakage_ratio: r9(rep.leakage_ratio),
            depth_lb: rep.depth.levels().map(r9),
            infeasible: rep.depth.is_infeasible(),
            delay_ratio_lb: rep.delay_ratio_lb.map(r9),
            power_ratio: rep.power_ratio.map(r9),
            edp_ratio_lb: rep.edp_ratio_lb.map(r9),
        }
    }
}

/// A JSON row: the CSV columns plus provenance of the delay and
/// sensitivity figures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonRow {
    #[serde(flatten)]
    pub values: Record,
    pub delay_mode: DelayMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sensitivity_mode: Option<SensitivityMode>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JsonTable {
    pub schema_version: u32,
    pub spec: serde_json::Value,
    pub rows: Vec<JsonRow>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<Failure>,
}

fn header_value(v: &serde_json::Value) -> String {
    match v {
        serde_json::Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// CSV text: optional `# key=value` configuration lines, optional
/// `# error name: message` lines, then the header and one line per row.
pub fn write_csv(table: &Table) -> String {
    let mut out = String::new();
    match &table.spec {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                out.push_str(&format!("# {k}={}\n", header_value(v)));
            }
        }
        serde_json::Value::Null => {}
        other => out.push_str(&format!("# spec={other}\n")),
    }
    for f in &table.failures {
        let msg = f.error.replace('\n', " ");
        out.push_str(&format!("# error {}: {msg}\n", f.name));
    }
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    if table.rows.is_empty() {
        w.write_record(COLUMNS).expect("in-memory CSV write");
    }
    for r in table.records() {
        w.serialize(r).expect("in-memory CSV write");
    }
    let bytes = w.into_inner().expect("in-memory CSV flush");
    out.push_str(std::str::from_utf8(&bytes).expect("CSV output is UTF-8"));
    out
}

/// The fixed CSV header.
pub const COLUMNS: [&str; 23] = [
    "name",
    "epsilon",
    "delta",
    "s",
    "S0",
    "k",
    "n",
    "d0",
    "sw0",
    "omega",
    "t",
    "Delta",
    "redundancy_lb",
    "size_factor_lb",
    "sw_factor",
    "energy_ratio_lb",
    "total_energy_ratio_lb",
    "leakage_ratio",
    "depth_lb",
    "infeasible",
    "delay_ratio_lb",
    "power_ratio",
    "edp_ratio_lb",
];

/// Pretty-printed JSON `{schema_version, spec, rows, failures?}`.
pub fn write_json(table: &Table) -> String {
    let doc = JsonTable {
        schema_version: SCHEMA_VERSION,
        spec: table.spec.clone(),
        rows: table
            .rows
            .iter()
            .map(|r| JsonRow {
                values: Record::from_row(r),
                delay_mode: r.report.delay_mode,
                sensitivity_mode: r.sensitivity_mode,
            })
            .collect(),
        failures: table.failures.clone(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("JSON encoding");
    text.push('\n');
    text
}

pub fn read_csv(text: &str) -> Result<Vec<Record>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = r.headers()?.clone();
    if header.iter().ne(COLUMNS.iter().copied()) {
        return Err(ReportError::Csv(csv::Error::from(std::io::Error::new(
            std::io::ErrorKind::InvalidData,
            format!(
                "unexpected header `{}`",
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ))));
    }
    r.deserialize()
        .map(|rec| rec.map_err(ReportError::from))
        .collect()
}

pub fn read_json(text: &str) -> Result<JsonTable> {
    let doc: JsonTable = serde_json::from_str(text)?;
    if doc.schema_version != SCHEMA_VERSION {
        return Err(ReportError::Schema(doc.schema_version));
    }
    Ok(doc)
}
