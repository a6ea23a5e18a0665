//! Sorted, duplicate-free sets of root terms.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::ids::TermId;

/// A sorted, duplicate-free set of [`TermId`]s.
///
/// Set operations are linear merges. Ordering is lexicographic over the
/// sorted ids, which is the order groups are sorted in before ids are
/// assigned.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TermSet(Vec<TermId>);

impl TermSet {
    pub fn new() -> Self {
        TermSet(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = TermId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[TermId] {
        &self.0
    }

    pub fn contains(&self, term: TermId) -> bool {
        self.0.binary_search(&term).is_ok()
    }

    pub fn insert(&mut self, term: TermId) -> bool {
        match self.0.binary_search(&term) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, term);
                true
            }
        }
    }

    pub fn intersection_len(&self, other: &TermSet) -> usize {
        let (mut i, mut j, mut n) = (0, 0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => i += 1,
                Ordering::Greater => j += 1,
                Ordering::Equal => {
                    n += 1;
                    i += 1;
                    j += 1;
                }
            }
        }
        n
    }

    pub fn union_len(&self, other: &TermSet) -> usize {
        self.len() + other.len() - self.intersection_len(other)
    }

    pub fn union(&self, other: &TermSet) -> TermSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        TermSet(out)
    }

    pub fn intersection(&self, other: &TermSet) -> TermSet {
        TermSet(
            self.0
                .iter()
                .copied()
                .filter(|t| other.contains(*t))
                .collect(),
        )
    }

    pub fn is_subset(&self, other: &TermSet) -> bool {
        self.intersection_len(other) == self.len()
    }

    pub fn intersects(&self, other: &TermSet) -> bool {
        self.intersection_len(other) > 0
    }
}

impl FromIterator<TermId> for TermSet {
    fn from_iter<I: IntoIterator<Item = TermId>>(iter: I) -> Self {
        let mut v: Vec<TermId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        TermSet(v)
    }
}

impl<'a> IntoIterator for &'a TermSet {
    type Item = &'a TermId;
    type IntoIter = std::slice::Iter<'a, TermId>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}
