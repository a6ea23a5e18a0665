use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Group;
use crate::ids::TermId;

use super::dynamics::TermDynamics;

pub const TFIDF_FORMULA: &str =
    "tf(x,b) = groups of b containing x; idf(x) = ln(|branches| / |branches containing x|)";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchLabel {
    pub terms: Vec<TermId>,
    /// Set when the branch vocabulary holds a single term.
    pub single_term: bool,
}

struct Score<'a> {
    term: TermId,
    name: &'a str,
    emergence: usize,
    tf: usize,
    tfidf: f64,
}

/// Two-term label: the most frequently emerging term, then the best tf-idf
/// term of the branch. Without emerging terms, the two best tf-idf terms.
pub fn label_branch(
    groups: &[&Group],
    dynamics: &BTreeMap<TermId, TermDynamics>,
    branches_with: &BTreeMap<TermId, usize>,
    branch_count: usize,
) -> Result<BranchLabel> {
    if groups.is_empty() {
        return Err(Error::EmptyBranch);
    }
    let mut tf: BTreeMap<TermId, usize> = BTreeMap::new();
    for g in groups {
        for t in g.terms.iter() {
            *tf.entry(t).or_default() += 1;
        }
    }
    let scores: Vec<Score> = tf
        .iter()
        .map(|(&term, &tf)| {
            let d = &dynamics[&term];
            let emergence = groups
                .iter()
                .filter(|g| d.emerging_groups.binary_search(&g.id).is_ok())
                .count();
            let df = branches_with.get(&term).copied().unwrap_or(1).max(1);
            let idf = (branch_count.max(1) as f64 / df as f64).ln();
            Score {
                term,
                name: &d.label,
                emergence,
                tf,
                tfidf: tf as f64 * idf,
            }
        })
        .collect();

    let by_tfidf = |a: &&Score, b: &&Score| -> Ordering {
        b.tfidf
            .total_cmp(&a.tfidf)
            .then(b.tf.cmp(&a.tf))
            .then(a.name.cmp(b.name))
    };
    let first = scores.iter().filter(|s| s.emergence > 0).min_by(|a, b| {
        b.emergence
            .cmp(&a.emergence)
            .then(b.tf.cmp(&a.tf))
            .then(a.name.cmp(b.name))
    });
    let mut ranked: Vec<&Score> = scores.iter().collect();
    ranked.sort_by(by_tfidf);
    let terms: Vec<TermId> = match first {
        Some(f) => std::iter::once(f.term)
            .chain(ranked.iter().map(|s| s.term).find(|&t| t != f.term))
            .collect(),
        None => ranked.iter().take(2).map(|s| s.term).collect(),
    };
    Ok(BranchLabel {
        single_term: terms.len() < 2,
        terms,
    })
}
