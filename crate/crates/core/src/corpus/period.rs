use chrono::{Datelike, Days, Months, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::PeriodId;

use super::DocumentSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PeriodUnit {
    Week,
    Month,
    Year,
}

impl std::str::FromStr for PeriodUnit {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "week" | "weeks" => Ok(PeriodUnit::Week),
            "month" | "months" => Ok(PeriodUnit::Month),
            "year" | "years" => Ok(PeriodUnit::Year),
            other => Err(format!("unknown period unit {other:?}")),
        }
    }
}

/// Temporal resolution: `length` consecutive `unit`s starting at `origin`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodSpec {
    pub unit: PeriodUnit,
    pub length: u32,
    /// Start of the first period. When absent, the earliest document date
    /// truncated to its year, month or ISO week.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<NaiveDate>,
}

impl PeriodSpec {
    pub fn new(unit: PeriodUnit, length: u32, origin: Option<NaiveDate>) -> Self {
        PeriodSpec {
            unit,
            length,
            origin,
        }
    }

    fn default_origin(&self, earliest: NaiveDate) -> NaiveDate {
        match self.unit {
            PeriodUnit::Year => NaiveDate::from_ymd_opt(earliest.year(), 1, 1).unwrap(),
            PeriodUnit::Month => earliest.with_day(1).unwrap(),
            PeriodUnit::Week => {
                earliest - Days::new(earliest.weekday().num_days_from_monday() as u64)
            }
        }
    }

    /// Start of the `index`-th period after `origin`.
    fn boundary(&self, origin: NaiveDate, index: u32) -> Option<NaiveDate> {
        let steps = index.checked_mul(self.length)?;
        match self.unit {
            PeriodUnit::Week => origin.checked_add_days(Days::new(7 * steps as u64)),
            PeriodUnit::Month => origin.checked_add_months(Months::new(steps)),
            PeriodUnit::Year => origin.checked_add_months(Months::new(steps.checked_mul(12)?)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Period {
    pub id: PeriodId,
    /// Inclusive.
    pub start: NaiveDate,
    /// Exclusive.
    pub end: NaiveDate,
    /// Indices into [`DocumentSet::documents`].
    pub documents: Vec<usize>,
}

/// Contiguous, chronologically ordered periods covering every document.
/// Empty periods are kept so period indices stay calendar-true.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodSet {
    pub periods: Vec<Period>,
}

impl PeriodSet {
    pub fn len(&self) -> usize {
        self.periods.len()
    }

    pub fn is_empty(&self) -> bool {
        self.periods.is_empty()
    }

    pub fn get(&self, id: PeriodId) -> Option<&Period> {
        self.periods.get(id.0)
    }

    /// Period containing `date`, if any.
    pub fn locate(&self, date: NaiveDate) -> Option<PeriodId> {
        let i = self.periods.partition_point(|p| p.end <= date);
        self.periods
            .get(i)
            .filter(|p| p.start <= date)
            .map(|p| p.id)
    }
}

pub fn periodize(docs: &DocumentSet, spec: &PeriodSpec) -> Result<PeriodSet> {
    if spec.length == 0 {
        return Err(Error::Config("period length must be ≥ 1".into()));
    }
    let (earliest, latest) = docs.date_bounds().ok_or(Error::NoDocuments)?;
    let origin = spec.origin.unwrap_or_else(|| spec.default_origin(earliest));
    if origin > earliest {
        return Err(Error::OriginAfterEarliest { origin, earliest });
    }

    let mut periods = Vec::new();
    let mut start = origin;
    loop {
        let index = periods.len() as u32;
        let end = spec
            .boundary(origin, index + 1)
            .ok_or_else(|| Error::Config("period boundary out of calendar range".into()))?;
        periods.push(Period {
            id: PeriodId(periods.len()),
            start,
            end,
            documents: Vec::new(),
        });
        if end > latest {
            break;
        }
        start = end;
    }

    let mut set = PeriodSet { periods };
    for (i, d) in docs.documents.iter().enumerate() {
        let p = set.locate(d.date).expect("periods cover every document");
        set.periods[p.0].documents.push(i);
    }
    Ok(set)
}
