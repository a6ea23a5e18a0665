//! Maximal frequent itemsets via closed-set enumeration.
//!
//! Every closed itemset is an intersection of transactions, and every
//! maximal frequent itemset is closed, so the maximal frequent sets are the
//! maximal elements among the frequent closed sets.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::ids::PeriodId;
use crate::terms::TermSet;

/// Maximal term sets contained in at least `min_support` transactions, with
/// their exact support, in ascending term-set order.
///
/// Fails with [`Error::PeriodTooDense`] when more than `cap` closed sets
/// accumulate.
pub fn maximal_frequent_itemsets(
    period: PeriodId,
    transactions: &[&TermSet],
    min_support: u32,
    cap: usize,
) -> Result<Vec<(TermSet, u32)>> {
    let min_support = min_support.max(1);
    if (transactions.len() as u64) < min_support as u64 {
        return Ok(Vec::new());
    }
    let mut closed: HashSet<TermSet> = HashSet::new();
    for &t in transactions.iter().filter(|t| !t.is_empty()) {
        if closed.contains(t) {
            continue;
        }
        let mut fresh: Vec<TermSet> = closed
            .iter()
            .map(|c| c.intersection(t))
            .filter(|i| !i.is_empty())
            .collect();
        fresh.push(t.clone());
        closed.extend(fresh);
        if closed.len() > cap {
            return Err(Error::PeriodTooDense {
                period: period.0,
                cap,
            });
        }
    }

    let mut frequent: Vec<(TermSet, u32)> = closed
        .into_iter()
        .filter_map(|c| {
            let support = transactions.iter().filter(|t| c.is_subset(t)).count() as u32;
            (support >= min_support).then_some((c, support))
        })
        .collect();
    // Larger sets first so maximality only needs to look backwards.
    frequent.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.0.cmp(&b.0)));
    let mut maximal: Vec<(TermSet, u32)> = Vec::new();
    for (set, support) in frequent {
        if !maximal
            .iter()
            .any(|(m, _)| m.len() > set.len() && set.is_subset(m))
        {
            maximal.push((set, support));
        }
    }
    maximal.sort();
    Ok(maximal)
}
