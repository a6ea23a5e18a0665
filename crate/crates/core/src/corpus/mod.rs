//! Corpus ingest: documents, root terms, periods and per-period
//! co-occurrence counts.

mod cooc;
mod index;
mod period;
mod rootlist;

use std::collections::HashSet;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::terms::TermSet;

pub use cooc::{cooccurrence, CoocMatrix};
pub use index::{index_documents, tokenize};
pub use period::{periodize, Period, PeriodSet, PeriodSpec, PeriodUnit};
pub use rootlist::{parse_rootlist, Root, RootList, VARIANT_DELIMITER};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CorpusFormat {
    Csv,
    Jsonl,
}

impl std::str::FromStr for CorpusFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(CorpusFormat::Csv),
            "jsonl" | "json-lines" | "ndjson" => Ok(CorpusFormat::Jsonl),
            other => Err(format!("unknown corpus format {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Document {
    pub id: String,
    pub date: NaiveDate,
    /// Title and abstract joined by a single space.
    pub text: String,
    /// Root terms found in `text`; empty until [`index_documents`] runs.
    pub terms: TermSet,
}

impl Document {
    pub fn new(id: impl Into<String>, date: NaiveDate, text: impl Into<String>) -> Self {
        Document {
            id: id.into(),
            date,
            text: text.into(),
            terms: TermSet::new(),
        }
    }
}

/// A record that could not be turned into a [`Document`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reject {
    /// 1-based record number (line for JSON-lines, data row for CSV).
    pub record: usize,
    pub reason: String,
}

impl fmt::Display for Reject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}\t{}", self.record, self.reason)
    }
}

#[derive(Clone, Debug, Default)]
pub struct DocumentSet {
    pub documents: Vec<Document>,
    pub rejects: Vec<Reject>,
}

impl DocumentSet {
    /// Builds a set from in-memory documents, enforcing id uniqueness.
    pub fn from_documents(documents: Vec<Document>) -> Result<Self> {
        let mut seen = HashSet::new();
        for d in &documents {
            if !seen.insert(d.id.as_str()) {
                return Err(Error::DuplicateDocument(d.id.clone()));
            }
        }
        Ok(DocumentSet {
            documents,
            rejects: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Documents in which indexing found no root term.
    pub fn unindexed(&self) -> impl Iterator<Item = &Document> {
        self.documents.iter().filter(|d| d.terms.is_empty())
    }

    pub fn date_bounds(&self) -> Option<(NaiveDate, NaiveDate)> {
        let min = self.documents.iter().map(|d| d.date).min()?;
        let max = self.documents.iter().map(|d| d.date).max()?;
        Some((min, max))
    }

    /// Writes the rejects report: a header line, then one `record<TAB>reason`
    /// line per rejected record.
    pub fn write_rejects(&self, path: &Path) -> Result<()> {
        let wrap = |source| Error::Write {
            path: path.to_path_buf(),
            source,
        };
        let mut out = File::create(path).map_err(wrap)?;
        writeln!(out, "record\treason").map_err(wrap)?;
        for r in &self.rejects {
            writeln!(out, "{r}").map_err(wrap)?;
        }
        Ok(())
    }
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    id: Option<serde_json::Value>,
    date: Option<String>,
    title: Option<String>,
    #[serde(rename = "abstract")]
    abstract_: Option<String>,
}

/// Parses ISO-8601 calendar dates; a time part, if present, is ignored.
pub fn parse_date(raw: &str) -> Option<NaiveDate> {
    let raw = raw.trim();
    let day = raw.split(['T', ' ']).next().unwrap_or(raw);
    NaiveDate::parse_from_str(day, "%Y-%m-%d").ok()
}

fn build_document(raw: RawRecord) -> std::result::Result<Document, String> {
    let id = match raw.id {
        Some(serde_json::Value::String(s)) if !s.trim().is_empty() => s.trim().to_string(),
        Some(serde_json::Value::Number(n)) => n.to_string(),
        _ => return Err("missing id".into()),
    };
    let date_raw = raw.date.ok_or("missing date")?;
    let date = parse_date(&date_raw).ok_or_else(|| format!("unparseable date {date_raw:?}"))?;
    let parts: Vec<&str> = [raw.title.as_deref(), raw.abstract_.as_deref()]
        .into_iter()
        .flatten()
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    if parts.is_empty() {
        return Err("no text field".into());
    }
    Ok(Document::new(id, date, parts.join(" ")))
}

/// Reads a corpus file. Malformed records are collected in
/// [`DocumentSet::rejects`].
pub fn parse_corpus(path: &Path, format: CorpusFormat) -> Result<DocumentSet> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let file = File::open(path).map_err(io_err)?;
    let mut documents = Vec::new();
    let mut rejects = Vec::new();
    let mut push = |record: usize, outcome: std::result::Result<Document, String>| match outcome {
        Ok(d) => documents.push(d),
        Err(reason) => rejects.push(Reject { record, reason }),
    };

    match format {
        CorpusFormat::Csv => {
            let mut reader = csv::ReaderBuilder::new()
                .flexible(false)
                .trim(csv::Trim::Headers)
                .from_reader(file);
            for (i, row) in reader.deserialize::<RawRecord>().enumerate() {
                let outcome = match row {
                    Ok(raw) => build_document(raw),
                    Err(e) if e.is_io_error() => {
                        return Err(io_err(std::io::Error::other(e.to_string())))
                    }
                    Err(e) => Err(format!("malformed row: {e}")),
                };
                push(i + 1, outcome);
            }
        }
        CorpusFormat::Jsonl => {
            for (i, line) in BufReader::new(file).lines().enumerate() {
                let line = line.map_err(io_err)?;
                if line.trim().is_empty() {
                    continue;
                }
                let outcome = serde_json::from_str::<RawRecord>(&line)
                    .map_err(|e| format!("malformed json: {e}"))
                    .and_then(build_document);
                push(i + 1, outcome);
            }
        }
    }

    if documents.is_empty() {
        return Err(Error::ZeroValidRecords(path.to_path_buf()));
    }
    let mut set = DocumentSet::from_documents(documents)?;
    set.rejects = rejects;
    Ok(set)
}
