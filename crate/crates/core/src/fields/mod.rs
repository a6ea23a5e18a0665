//! Per-period similarity graphs and field (group) detection.

mod cliques;
mod itemsets;
mod similarity;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{cooccurrence, DocumentSet, PeriodSet};
use crate::error::Result;
use crate::ids::{GroupId, PeriodId};
use crate::terms::TermSet;

pub use cliques::maximal_cliques;
pub use itemsets::maximal_frequent_itemsets;
pub use similarity::{build_similarity_graph, confidence, SimilarityGraph, Symmetrization};

/// A field: a set of root terms localized in one period.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub id: GroupId,
    pub period: PeriodId,
    pub terms: TermSet,
    /// Itemset mode: documents containing every term. Clique mode: documents
    /// containing at least one internal edge (two or more of the terms).
    pub support: u32,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum ClusteringMode {
    Cliques,
    Itemsets { min_support: u32 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FieldConfig {
    pub edge_threshold: f64,
    pub symmetrization: Symmetrization,
    pub clustering: ClusteringMode,
    pub keep_singletons: bool,
    /// Upper bound on cliques (or closed itemsets) per period.
    pub max_cliques: usize,
}

impl Default for FieldConfig {
    fn default() -> Self {
        FieldConfig {
            edge_threshold: 0.1,
            symmetrization: Symmetrization::Max,
            clustering: ClusteringMode::Cliques,
            keep_singletons: false,
            max_cliques: 100_000,
        }
    }
}

/// Groups of every period plus the similarity graphs they came from.
#[derive(Clone, Debug)]
pub struct Fields {
    pub groups: Vec<Group>,
    pub graphs: Vec<SimilarityGraph>,
}

pub fn detect_fields_cliques(
    graph: &SimilarityGraph,
    keep_singletons: bool,
    cap: usize,
) -> Result<Vec<TermSet>> {
    let mut cliques = maximal_cliques(graph, cap)?;
    if !keep_singletons {
        cliques.retain(|c| c.len() > 1);
    }
    Ok(cliques)
}

pub fn detect_fields_itemsets(
    period: PeriodId,
    transactions: &[&TermSet],
    min_support: u32,
    keep_singletons: bool,
    cap: usize,
) -> Result<Vec<(TermSet, u32)>> {
    let mut sets = maximal_frequent_itemsets(period, transactions, min_support, cap)?;
    if !keep_singletons {
        sets.retain(|(s, _)| s.len() > 1);
    }
    Ok(sets)
}

fn clique_support(terms: &TermSet, transactions: &[&TermSet]) -> u32 {
    let need = if terms.len() > 1 { 2 } else { 1 };
    transactions
        .iter()
        .filter(|t| t.intersection_len(terms) >= need)
        .count() as u32
}

/// Groups found in one period, before ids are assigned.
type PeriodGroups = Vec<(PeriodId, TermSet, u32)>;

/// Runs similarity and field detection for every period in parallel, then
/// sorts groups by period and term set and assigns ids in that order.
pub fn detect_groups(
    docs: &DocumentSet,
    periods: &PeriodSet,
    config: &FieldConfig,
) -> Result<Fields> {
    let per_period: Vec<(SimilarityGraph, PeriodGroups)> = periods
        .periods
        .par_iter()
        .map(|p| {
            let matrix = cooccurrence(periods, p.id, docs)?;
            let graph =
                build_similarity_graph(&matrix, config.edge_threshold, config.symmetrization);
            let transactions: Vec<&TermSet> = p
                .documents
                .iter()
                .map(|&i| &docs.documents[i].terms)
                .collect();
            let found = match config.clustering {
                ClusteringMode::Cliques => {
                    detect_fields_cliques(&graph, config.keep_singletons, config.max_cliques)?
                        .into_iter()
                        .map(|terms| {
                            let support = clique_support(&terms, &transactions);
                            (p.id, terms, support)
                        })
                        .collect()
                }
                ClusteringMode::Itemsets { min_support } => detect_fields_itemsets(
                    p.id,
                    &transactions,
                    min_support,
                    config.keep_singletons,
                    config.max_cliques,
                )?
                .into_iter()
                .map(|(terms, support)| (p.id, terms, support))
                .collect(),
            };
            Ok((graph, found))
        })
        .collect::<Result<_>>()?;

    let mut graphs = Vec::with_capacity(per_period.len());
    let mut found = Vec::new();
    for (g, f) in per_period {
        graphs.push(g);
        found.extend(f);
    }
    found.sort_by(|a, b| (a.0, &a.1).cmp(&(b.0, &b.1)));
    let groups = found
        .into_iter()
        .enumerate()
        .map(|(i, (period, terms, support))| Group {
            id: GroupId(i as u32),
            period,
            terms,
            support,
        })
        .collect();
    Ok(Fields { groups, graphs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{periodize, Document, PeriodSpec, PeriodUnit};
    use crate::ids::TermId;
    use chrono::NaiveDate;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn corpus(per_period: &[Vec<Vec<u32>>]) -> (DocumentSet, PeriodSet) {
        let mut docs = Vec::new();
        for (p, period_docs) in per_period.iter().enumerate() {
            for (i, terms) in period_docs.iter().enumerate() {
                let date = NaiveDate::from_ymd_opt(2000 + p as i32, 3, 1).unwrap();
                let mut d = Document::new(format!("p{p}d{i}"), date, "x");
                d.terms = terms.iter().map(|&t| TermId(t)).collect();
                docs.push(d);
            }
        }
        let docs = DocumentSet::from_documents(docs).unwrap();
        let periods = periodize(&docs, &PeriodSpec::new(PeriodUnit::Year, 1, None)).unwrap();
        (docs, periods)
    }

    #[test]
    fn groups_sorted_and_numbered() {
        let (docs, periods) = corpus(&[
            vec![vec![3, 4], vec![3, 4], vec![0, 1]],
            vec![vec![0, 1, 2], vec![0, 1, 2]],
        ]);
        let fields = detect_groups(&docs, &periods, &FieldConfig::default()).unwrap();
        let got: Vec<(usize, Vec<u32>, u32)> = fields
            .groups
            .iter()
            .map(|g| (g.period.0, g.terms.iter().map(|t| t.0).collect(), g.support))
            .collect();
        assert_eq!(
            got,
            vec![
                (0, vec![0, 1], 1),
                (0, vec![3, 4], 2),
                (1, vec![0, 1, 2], 2)
            ]
        );
        assert!(fields
            .groups
            .iter()
            .enumerate()
            .all(|(i, g)| g.id.0 as usize == i));
        assert_eq!(fields.graphs.len(), 2);
    }

    #[test]
    fn singletons_only_on_request() {
        let (docs, periods) = corpus(&[vec![vec![0], vec![1, 2]]]);
        let mut config = FieldConfig::default();
        assert_eq!(
            detect_groups(&docs, &periods, &config)
                .unwrap()
                .groups
                .len(),
            1
        );
        config.keep_singletons = true;
        assert_eq!(
            detect_groups(&docs, &periods, &config)
                .unwrap()
                .groups
                .len(),
            2
        );
    }

    #[test]
    fn itemset_mode_uses_exact_containment() {
        let (docs, periods) = corpus(&[vec![vec![0, 1], vec![0, 1], vec![0, 1, 2]]]);
        let config = FieldConfig {
            clustering: ClusteringMode::Itemsets { min_support: 2 },
            ..FieldConfig::default()
        };
        let groups = detect_groups(&docs, &periods, &config).unwrap().groups;
        assert_eq!(groups.len(), 1);
        assert_eq!(groups[0].support, 3);
    }

    #[test]
    fn clique_groups_are_fully_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let docs: Vec<Vec<u32>> = (0..30)
            .map(|_| (0..12u32).filter(|_| rng.gen_bool(0.25)).collect())
            .collect();
        let (docs, periods) = corpus(&[docs]);
        let config = FieldConfig {
            edge_threshold: 0.4,
            ..FieldConfig::default()
        };
        let fields = detect_groups(&docs, &periods, &config).unwrap();
        let graph = &fields.graphs[0];
        for g in &fields.groups {
            let t = g.terms.as_slice();
            for (i, &a) in t.iter().enumerate() {
                for &b in &t[i + 1..] {
                    assert!(graph.has_edge(a, b));
                }
            }
        }
    }

    #[test]
    fn raising_threshold_refines_clique_groups() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let docs: Vec<Vec<u32>> = (0..40)
            .map(|_| (0..10u32).filter(|_| rng.gen_bool(0.3)).collect())
            .collect();
        let (docs, periods) = corpus(&[docs]);
        let at = |theta: f64| {
            let config = FieldConfig {
                edge_threshold: theta,
                keep_singletons: true,
                ..FieldConfig::default()
            };
            detect_groups(&docs, &periods, &config).unwrap().groups
        };
        for (lo, hi) in [(0.1, 0.3), (0.3, 0.5), (0.5, 0.8)] {
            let low = at(lo);
            for g in at(hi) {
                let cover: BTreeSet<TermId> = low
                    .iter()
                    .filter(|l| l.terms.intersects(&g.terms))
                    .flat_map(|l| l.terms.iter())
                    .collect();
                assert!(g.terms.iter().all(|t| cover.contains(&t)));
                assert!(low.iter().any(|l| g.terms.is_subset(&l.terms)));
            }
        }
    }
}
