//! λ-weighted quality of a partition of groups into branches.
//!
//! For a term `x` with group frequency `g(x)` and a branch `b` holding
//! `n(x,b)` groups that contain `x`:
//!
//! ```text
//! accuracy  A(x,b) = n(x,b) / |b|
//! recall    R(x,b) = n(x,b) / g(x)
//! f(x,b)           = λ·A(x,b) + (1 − λ)·R(x,b)
//! F(partition)     = Σ_x g(x)/Σ_y g(y) · Σ_b R(x,b) · f(x,b)
//! ```
//!
//! λ = 0 rewards one large branch (recall), λ = 1 rewards many small ones
//! (accuracy). The blend is linear in λ, so a split accepted at some λ is
//! accepted at every larger λ.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::fields::Group;
use crate::ids::TermId;
use crate::terms::TermSet;

/// Global group frequencies of every term.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TermStats {
    group_freq: BTreeMap<TermId, u32>,
    total: u64,
}

impl TermStats {
    pub fn from_groups<'a>(groups: impl IntoIterator<Item = &'a Group>) -> Self {
        Self::from_term_sets(groups.into_iter().map(|g| &g.terms))
    }

    pub fn from_term_sets<'a>(sets: impl IntoIterator<Item = &'a TermSet>) -> Self {
        let mut group_freq: BTreeMap<TermId, u32> = BTreeMap::new();
        for s in sets {
            for t in s.iter() {
                *group_freq.entry(t).or_default() += 1;
            }
        }
        let total = group_freq.values().map(|&n| n as u64).sum();
        TermStats { group_freq, total }
    }

    pub fn group_freq(&self, term: TermId) -> u32 {
        self.group_freq.get(&term).copied().unwrap_or(0)
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Quality of the given blocks, each a list of group term sets.
///
/// Terms absent from every block contribute nothing, so passing only the
/// blocks of one branch yields the quality restricted to that branch's
/// terms.
pub fn branch_quality(blocks: &[Vec<&TermSet>], lambda: f64, stats: &TermStats) -> Result<f64> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Lambda(lambda));
    }
    if blocks.iter().any(Vec::is_empty) {
        return Err(Error::EmptyBranch);
    }
    let mut counts: BTreeMap<TermId, Vec<u32>> = BTreeMap::new();
    for (b, block) in blocks.iter().enumerate() {
        for terms in block {
            for t in terms.iter() {
                counts.entry(t).or_insert_with(|| vec![0; blocks.len()])[b] += 1;
            }
        }
    }
    if stats.total == 0 {
        return Ok(0.0);
    }
    let total = stats.total as f64;
    let mut quality = 0.0;
    for (term, per_block) in &counts {
        let g = stats.group_freq(*term) as f64;
        if g == 0.0 {
            continue;
        }
        let mut inner = 0.0;
        for (b, &n) in per_block.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let n = n as f64;
            let accuracy = n / blocks[b].len() as f64;
            let recall = n / g;
            inner += recall * (lambda * accuracy + (1.0 - lambda) * recall);
        }
        quality += g / total * inner;
    }
    Ok(quality)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ids: &[u32]) -> TermSet {
        ids.iter().map(|&i| TermId(i)).collect()
    }

    fn toy() -> Vec<TermSet> {
        vec![
            set(&[0, 1]),
            set(&[0]),
            set(&[0, 2]),
            set(&[1, 2]),
            set(&[2]),
            set(&[1, 2]),
        ]
    }

    #[test]
    fn endpoints() {
        let groups = toy();
        let stats = TermStats::from_term_sets(&groups);
        let all: Vec<&TermSet> = groups.iter().collect();
        let one = branch_quality(&[all], 0.0, &stats).unwrap();
        assert!((one - 1.0).abs() < 1e-12);
        let singles: Vec<Vec<&TermSet>> = groups.iter().map(|g| vec![g]).collect();
        let many = branch_quality(&singles, 1.0, &stats).unwrap();
        assert!((many - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hand_computed_two_block_partition() {
        // g = {0: 3, 1: 3, 2: 4}, Σg = 10.
        // Block A = groups 0..3 (|A| = 3): n(0)=3, n(1)=1, n(2)=1.
        // Block B = groups 3..6 (|B| = 3): n(1)=2, n(2)=3.
        // λ = 0.5, f = (A + R)/2, contribution R·f:
        //   term 0: A-block R=1,   f=(1+1)/2=1           → 1
        //   term 1: A-block R=1/3, f=(1/3+1/3)/2=1/3      → 1/9
        //           B-block R=2/3, f=(2/3+2/3)/2=2/3      → 4/9
        //   term 2: A-block R=1/4, f=(1/3+1/4)/2=7/24     → 7/96
        //           B-block R=3/4, f=(1+3/4)/2=7/8        → 21/32
        // F = 0.3·1 + 0.3·5/9 + 0.4·(7/96 + 63/96) = 0.3 + 1/6 + 7/24
        let groups = toy();
        let stats = TermStats::from_term_sets(&groups);
        let a: Vec<&TermSet> = groups[..3].iter().collect();
        let b: Vec<&TermSet> = groups[3..].iter().collect();
        let f = branch_quality(&[a, b], 0.5, &stats).unwrap();
        let want = 0.3 + 1.0 / 6.0 + 7.0 / 24.0;
        assert!((f - want).abs() < 1e-12, "{f} vs {want}");
    }

    #[test]
    fn errors() {
        let groups = toy();
        let stats = TermStats::from_term_sets(&groups);
        let all: Vec<&TermSet> = groups.iter().collect();
        assert!(matches!(
            branch_quality(std::slice::from_ref(&all), 1.5, &stats),
            Err(Error::Lambda(_))
        ));
        assert!(matches!(
            branch_quality(&[all, vec![]], 0.5, &stats),
            Err(Error::EmptyBranch)
        ));
    }
}
