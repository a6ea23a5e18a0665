//! Export schema and canonical JSON serialization: keys sorted, every
//! float written with six decimals.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::ids::{BranchId, GroupId, PeriodId, TermId};

use super::branches::RemovedBranch;
use super::dynamics::TermDynamics;
use super::layout::Point;

/// Group count above which the viewer warns about legibility.
pub const LARGE_PHYLOMEMY: usize = 1000;
pub const FLOAT_DIGITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counts {
    pub documents: usize,
    pub periods: usize,
    pub groups: usize,
    pub branches: usize,
    pub links: usize,
    pub ghost_links: usize,
    pub terms: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metadata {
    pub lambda: f64,
    pub min_periods: usize,
    pub counts: Counts,
    pub large_phylomemy_warning: bool,
    pub warnings: Vec<String>,
    pub removed_branches: Vec<RemovedBranch>,
    pub tfidf: String,
    pub crossings_before: usize,
    pub crossings_after: usize,
    /// Every build parameter, defaults included.
    pub config: Value,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeriodEntry {
    pub id: PeriodId,
    pub start: String,
    /// Exclusive.
    pub end: String,
    pub documents: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchEntry {
    pub id: BranchId,
    pub label: Vec<String>,
    pub label_terms: Vec<TermId>,
    pub label_single_term: bool,
    pub peak: Point,
    pub elevation: f64,
    pub span: [PeriodId; 2],
    pub groups: Vec<GroupId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupTerm {
    pub id: TermId,
    pub emerging: bool,
    pub decreasing: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroupEntry {
    pub id: GroupId,
    pub branch: BranchId,
    pub period: PeriodId,
    pub x: f64,
    pub y: f64,
    pub support: u32,
    pub terms: Vec<GroupTerm>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkEntry {
    pub parent: GroupId,
    pub child: GroupId,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhostEntry {
    pub parent: GroupId,
    pub child: GroupId,
    pub weight: f64,
    pub cut_level: f64,
}

/// The pre-spatialized projection of one phylomemy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PhyloExport {
    pub metadata: Metadata,
    pub periods: Vec<PeriodEntry>,
    pub branches: Vec<BranchEntry>,
    pub groups: Vec<GroupEntry>,
    pub links: Vec<LinkEntry>,
    pub ghost_links: Vec<GhostEntry>,
    pub terms: Vec<TermDynamics>,
    /// Canonical term label → groups containing it.
    pub search_index: BTreeMap<String, Vec<GroupId>>,
}

impl PhyloExport {
    /// Rounds every float to the written precision so that reading the
    /// canonical text back yields an identical value.
    pub fn canonicalize(self) -> Result<Self> {
        let mut value = serde_json::to_value(&self)?;
        quantize(&mut value);
        Ok(serde_json::from_value(value)?)
    }

    pub fn to_canonical_json(&self) -> Result<String> {
        let value = serde_json::to_value(self)?;
        let mut out = String::new();
        write_value(&value, &mut out);
        out.push('\n');
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if self.branches.is_empty() {
            return Err(Error::EmptyProjection);
        }
        let text = self.to_canonical_json()?;
        fs::write(path, text).map_err(|source| Error::Write {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn round(x: f64) -> f64 {
    let scaled = (x * 1e6).round();
    if scaled == 0.0 {
        0.0
    } else {
        scaled / 1e6
    }
}

fn quantize(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            *value = serde_json::Number::from_f64(round(x))
                .map(Value::Number)
                .unwrap_or(Value::Null);
        }
        Value::Array(items) => items.iter_mut().for_each(quantize),
        Value::Object(map) => map.values_mut().for_each(quantize),
        _ => {}
    }
}

fn write_value(value: &Value, out: &mut String) {
    match value {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&value.to_string()),
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => {
                let _ = write!(out, "{:.*}", FLOAT_DIGITS, round(x));
            }
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                write_value(&map[key], out);
            }
            out.push('}');
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_six_decimals_and_keys_are_sorted() {
        let value =
            serde_json::json!({"b": 1.0, "a": [0.1234567, 2], "c": {"z": -0.0000001, "y": "s"}});
        let mut out = String::new();
        write_value(&value, &mut out);
        assert_eq!(
            out,
            r#"{"a":[0.123457,2],"b":1.000000,"c":{"y":"s","z":0.000000}}"#
        );
    }

    #[test]
    fn quantized_values_survive_text() {
        for x in [0.1, 1.0 / 3.0, 2.0 / 3.0, 0.35, 1e-7, 123.456789, -4.5e-3] {
            let q = round(x);
            let text = format!("{:.6}", q);
            assert_eq!(text.parse::<f64>().unwrap(), q, "{x}");
        }
    }
}
