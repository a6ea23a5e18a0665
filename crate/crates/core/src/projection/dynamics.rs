use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::corpus::{DocumentSet, PeriodSet, RootList};
use crate::fields::Group;
use crate::ids::{BranchId, GroupId, PeriodId, TermId};

use super::layout::Point;

/// Life cycle of one term across the projected phylomemy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermDynamics {
    pub term: TermId,
    pub label: String,
    pub first_period: PeriodId,
    pub last_period: PeriodId,
    /// Groups dated `first_period` that contain the term.
    pub emerging_groups: Vec<GroupId>,
    /// Groups dated `last_period` that contain the term.
    pub decreasing_groups: Vec<GroupId>,
    /// Documents of each corpus period indexed with the term.
    pub freq_by_period: Vec<u32>,
    /// Document count in the most recent corpus period.
    pub freq_last: u32,
    pub branches: Vec<BranchId>,
    pub cross_branch: bool,
    /// Barycenter of the emerging groups in the kinship view.
    pub emergence: Option<Point>,
}

/// Document frequency of every term in every period.
pub fn period_frequencies(
    documents: &DocumentSet,
    periods: &PeriodSet,
) -> BTreeMap<TermId, Vec<u32>> {
    let mut freq: BTreeMap<TermId, Vec<u32>> = BTreeMap::new();
    for (p, period) in periods.periods.iter().enumerate() {
        for &d in &period.documents {
            for t in documents.documents[d].terms.iter() {
                freq.entry(t).or_insert_with(|| vec![0; periods.len()])[p] += 1;
            }
        }
    }
    freq
}

pub fn compute_term_dynamics(
    groups: &[&Group],
    branch_of: &HashMap<GroupId, BranchId>,
    documents: &DocumentSet,
    periods: &PeriodSet,
    roots: &RootList,
) -> BTreeMap<TermId, TermDynamics> {
    let mut occurrences: BTreeMap<TermId, Vec<&Group>> = BTreeMap::new();
    for g in groups {
        for t in g.terms.iter() {
            occurrences.entry(t).or_default().push(g);
        }
    }
    let freq = period_frequencies(documents, periods);
    let last = periods.len().saturating_sub(1);

    occurrences
        .into_iter()
        .map(|(term, found)| {
            let first_period = found.iter().map(|g| g.period).min().expect("non-empty");
            let last_period = found.iter().map(|g| g.period).max().expect("non-empty");
            let dated = |p: PeriodId| -> Vec<GroupId> {
                let mut ids: Vec<GroupId> = found
                    .iter()
                    .filter(|g| g.period == p)
                    .map(|g| g.id)
                    .collect();
                ids.sort();
                ids
            };
            let branches: Vec<BranchId> = found
                .iter()
                .map(|g| branch_of[&g.id].clone())
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let freq_by_period = freq
                .get(&term)
                .cloned()
                .unwrap_or_else(|| vec![0; periods.len()]);
            let dynamics = TermDynamics {
                term,
                label: roots.label(term).to_string(),
                first_period,
                last_period,
                emerging_groups: dated(first_period),
                decreasing_groups: dated(last_period),
                freq_last: freq_by_period.get(last).copied().unwrap_or(0),
                freq_by_period,
                cross_branch: branches.len() >= 2,
                branches,
                emergence: None,
            };
            (term, dynamics)
        })
        .collect()
}
