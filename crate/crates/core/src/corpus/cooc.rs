use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::ids::{PeriodId, TermId};

use super::{DocumentSet, PeriodSet};

/// Symmetric document-presence co-occurrence counts for one period.
///
/// Off-diagonal pairs are stored once with the smaller id first; the
/// diagonal holds occurrence counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoocMatrix {
    pub period: PeriodId,
    occ: BTreeMap<TermId, u32>,
    pairs: BTreeMap<(TermId, TermId), u32>,
}

impl CoocMatrix {
    pub fn new(period: PeriodId) -> Self {
        CoocMatrix {
            period,
            ..Default::default()
        }
    }

    /// Counts one document with the given (sorted, unique) terms.
    pub fn add_document(&mut self, terms: &[TermId]) {
        for (i, &x) in terms.iter().enumerate() {
            *self.occ.entry(x).or_default() += 1;
            for &y in &terms[i + 1..] {
                *self.pairs.entry((x, y)).or_default() += 1;
            }
        }
    }

    pub fn occ(&self, x: TermId) -> u32 {
        self.occ.get(&x).copied().unwrap_or(0)
    }

    pub fn get(&self, x: TermId, y: TermId) -> u32 {
        if x == y {
            return self.occ(x);
        }
        let key = if x < y { (x, y) } else { (y, x) };
        self.pairs.get(&key).copied().unwrap_or(0)
    }

    /// Terms with a non-zero occurrence, ascending.
    pub fn terms(&self) -> impl Iterator<Item = (TermId, u32)> + '_ {
        self.occ.iter().map(|(&t, &n)| (t, n))
    }

    /// Co-occurring pairs `(x, y, count)` with `x < y`, ascending.
    pub fn pairs(&self) -> impl Iterator<Item = (TermId, TermId, u32)> + '_ {
        self.pairs.iter().map(|(&(x, y), &n)| (x, y, n))
    }
}

pub fn cooccurrence(
    periods: &PeriodSet,
    period: PeriodId,
    docs: &DocumentSet,
) -> Result<CoocMatrix> {
    let p = periods.get(period).ok_or(Error::UnknownPeriod(period.0))?;
    let mut m = CoocMatrix::new(period);
    for &i in &p.documents {
        m.add_document(docs.documents[i].terms.as_slice());
    }
    Ok(m)
}
