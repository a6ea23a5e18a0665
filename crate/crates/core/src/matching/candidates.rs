use std::collections::HashMap;

use crate::fields::Group;
use crate::ids::{GroupId, PeriodId, TermId};
use crate::terms::TermSet;

use super::Direction;

/// Groups bucketed by period, with a per-period inverted term index.
pub struct GroupIndex<'a> {
    groups: &'a [Group],
    by_period: Vec<Vec<usize>>,
    by_term: Vec<HashMap<TermId, Vec<usize>>>,
}

impl<'a> GroupIndex<'a> {
    pub fn new(groups: &'a [Group], period_count: usize) -> Self {
        let period_count = groups
            .iter()
            .map(|g| g.period.0 + 1)
            .max()
            .unwrap_or(0)
            .max(period_count);
        let mut by_period = vec![Vec::new(); period_count];
        let mut by_term: Vec<HashMap<TermId, Vec<usize>>> = vec![HashMap::new(); period_count];
        for (pos, g) in groups.iter().enumerate() {
            by_period[g.period.0].push(pos);
            for t in g.terms.iter() {
                by_term[g.period.0].entry(t).or_default().push(pos);
            }
        }
        GroupIndex {
            groups,
            by_period,
            by_term,
        }
    }

    pub fn groups(&self) -> &'a [Group] {
        self.groups
    }

    pub fn period_count(&self) -> usize {
        self.by_period.len()
    }

    pub fn in_period(&self, period: usize) -> &[usize] {
        &self.by_period[period]
    }

    pub(crate) fn with_term(&self, period: usize, term: TermId) -> &[usize] {
        self.by_term[period].get(&term).map_or(&[], Vec::as_slice)
    }

    /// Periods strictly before (upstream) or after (downstream) `period`,
    /// at most `window` away, nearest first.
    pub fn window_periods(
        &self,
        period: PeriodId,
        direction: Direction,
        window: usize,
    ) -> impl Iterator<Item = usize> {
        let p = period.0;
        let n = self.period_count();
        let range: Box<dyn Iterator<Item = usize>> = match direction {
            Direction::Upstream => Box::new((p.saturating_sub(window)..p).rev()),
            Direction::Downstream => Box::new((p + 1)..(p + 1 + window).min(n)),
        };
        range
    }

    /// Widest window that still reaches new periods.
    pub fn max_window(&self, period: PeriodId, direction: Direction) -> usize {
        match direction {
            Direction::Upstream => period.0,
            Direction::Downstream => self.period_count().saturating_sub(period.0 + 1),
        }
    }
}

/// A single group or an unordered pair of groups, represented by the union
/// of their terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Candidate {
    /// One or two ids, ascending.
    pub members: Vec<GroupId>,
    pub terms: TermSet,
    /// Largest period distance between the matched group and a member.
    pub gap: usize,
}

/// Every single and every unordered pair drawn from the periods within
/// `window` of `group` in the given direction. Singles come first.
pub fn enumerate_candidates(
    group: &Group,
    index: &GroupIndex,
    direction: Direction,
    window: usize,
) -> Vec<Candidate> {
    let mut pool: Vec<&Group> = index
        .window_periods(group.period, direction, window.max(1))
        .flat_map(|p| index.in_period(p).iter().map(|&i| &index.groups()[i]))
        .collect();
    pool.sort_by_key(|g| g.id);
    let gap = |g: &Group| group.period.0.abs_diff(g.period.0);
    let mut out: Vec<Candidate> = pool
        .iter()
        .map(|g| Candidate {
            members: vec![g.id],
            terms: g.terms.clone(),
            gap: gap(g),
        })
        .collect();
    for (i, a) in pool.iter().enumerate() {
        for b in &pool[i + 1..] {
            out.push(Candidate {
                members: vec![a.id, b.id],
                terms: a.terms.union(&b.terms),
                gap: gap(a).max(gap(b)),
            });
        }
    }
    out
}
