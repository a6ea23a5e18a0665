//! Projection of a phylomemy into its seabed and kinship views.

mod branches;
mod dynamics;
mod export;
mod labels;
mod layout;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::corpus::{DocumentSet, PeriodSet, RootList};
use crate::error::Result;
use crate::fields::Group;
use crate::ids::{BranchId, GroupId, TermId};
use crate::sea_level::Phylomemy;

pub use branches::{
    extract_network, filter_minor_branches, period_span, LeafBranch, Network, RemovedBranch,
};
pub use dynamics::{compute_term_dynamics, period_frequencies, TermDynamics};
pub use export::{
    BranchEntry, Counts, GhostEntry, GroupEntry, GroupTerm, LinkEntry, Metadata, PeriodEntry,
    PhyloExport, FLOAT_DIGITS, LARGE_PHYLOMEMY,
};
pub use labels::{label_branch, BranchLabel, TFIDF_FORMULA};
pub use layout::{
    count_crossings, drift_gaps, kinship_layout, seabed_coordinates, BandGroups, KinshipLayout,
    LayoutConfig, Point,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ProjectionConfig {
    /// Branches covering fewer periods are dropped.
    pub min_periods: usize,
    pub layout: LayoutConfig,
}

impl Default for ProjectionConfig {
    fn default() -> Self {
        ProjectionConfig {
            min_periods: 2,
            layout: LayoutConfig::default(),
        }
    }
}

/// Everything the projection reads.
#[derive(Clone, Copy)]
pub struct ProjectionInput<'a> {
    pub phylomemy: &'a Phylomemy,
    pub documents: &'a DocumentSet,
    pub periods: &'a PeriodSet,
    pub roots: &'a RootList,
}

pub fn project(
    input: ProjectionInput,
    config: &ProjectionConfig,
    config_echo: Value,
) -> Result<PhyloExport> {
    let phylo = input.phylomemy;
    let lookup: HashMap<GroupId, &Group> = phylo.groups.iter().map(|g| (g.id, g)).collect();
    let (network, removed) =
        filter_minor_branches(extract_network(phylo), &lookup, config.min_periods)?;

    let branch_of: HashMap<GroupId, BranchId> = network
        .leaves
        .iter()
        .flat_map(|l| l.groups.iter().map(move |&g| (g, l.id.clone())))
        .collect();
    let mut kept: Vec<&Group> = branch_of.keys().map(|g| lookup[g]).collect();
    kept.sort_by_key(|g| g.id);

    let mut dynamics = compute_term_dynamics(
        &kept,
        &branch_of,
        input.documents,
        input.periods,
        input.roots,
    );
    let branches_with: BTreeMap<TermId, usize> = dynamics
        .iter()
        .map(|(&t, d)| (t, d.branches.len()))
        .collect();

    let peaks = seabed_coordinates(&phylo.tree, &network.leaves);
    let gaps = drift_gaps(&phylo.tree, &network.leaves);
    let bands: Vec<BandGroups> = network
        .leaves
        .iter()
        .map(|l| l.groups.iter().map(|g| (*g, lookup[g].period)).collect())
        .collect();
    let mut links: Vec<(GroupId, GroupId, f64)> = phylo
        .links
        .iter()
        .map(|l| (l.parent, l.child, l.weight))
        .chain(
            phylo
                .submerged_links
                .iter()
                .map(|l| (l.parent, l.child, l.weight)),
        )
        .filter(|(p, c, _)| branch_of.contains_key(p) && branch_of.contains_key(c))
        .collect();
    links.sort_by_key(|&(p, c, _)| (c, p));
    let pairs: Vec<(GroupId, GroupId)> = links.iter().map(|&(p, c, _)| (p, c)).collect();
    let layout = kinship_layout(&bands, &pairs, &gaps, &config.layout);

    for d in dynamics.values_mut() {
        let n = d.emerging_groups.len() as f64;
        let (sx, sy) = d
            .emerging_groups
            .iter()
            .map(|g| layout.positions[g])
            .fold((0.0, 0.0), |acc, p| (acc.0 + p.x, acc.1 + p.y));
        d.emergence = Some(Point {
            x: sx / n,
            y: sy / n,
        });
    }

    let mut warnings = Vec::new();
    let mut branch_entries = Vec::with_capacity(network.leaves.len());
    for (leaf, peak) in network.leaves.iter().zip(&peaks) {
        let groups: Vec<&Group> = leaf.groups.iter().map(|g| lookup[g]).collect();
        let label = label_branch(&groups, &dynamics, &branches_with, network.leaves.len())?;
        if label.single_term {
            warnings.push(format!("branch {} has a single-term vocabulary", leaf.id));
        }
        let first = groups.iter().map(|g| g.period).min().unwrap_or_default();
        let last = groups.iter().map(|g| g.period).max().unwrap_or_default();
        branch_entries.push(BranchEntry {
            id: leaf.id.clone(),
            label: label
                .terms
                .iter()
                .map(|t| dynamics[t].label.clone())
                .collect(),
            label_terms: label.terms,
            label_single_term: label.single_term,
            peak: *peak,
            elevation: leaf.elevation,
            span: [first, last],
            groups: leaf.groups.clone(),
        });
    }

    let group_entries: Vec<GroupEntry> = kept
        .iter()
        .map(|g| {
            let at = layout.positions[&g.id];
            GroupEntry {
                id: g.id,
                branch: branch_of[&g.id].clone(),
                period: g.period,
                x: at.x,
                y: at.y,
                support: g.support,
                terms: g
                    .terms
                    .iter()
                    .map(|t| {
                        let d = &dynamics[&t];
                        GroupTerm {
                            id: t,
                            emerging: d.first_period == g.period,
                            decreasing: d.last_period == g.period,
                        }
                    })
                    .collect(),
            }
        })
        .collect();

    let mut search_index: BTreeMap<String, Vec<GroupId>> = BTreeMap::new();
    for g in &kept {
        for t in g.terms.iter() {
            search_index
                .entry(dynamics[&t].label.clone())
                .or_default()
                .push(g.id);
        }
    }

    let large = kept.len() > LARGE_PHYLOMEMY;
    if large {
        warnings.push(format!(
            "{} groups exceed {LARGE_PHYLOMEMY}; the views may be hard to read",
            kept.len()
        ));
    }
    if !removed.is_empty() {
        warnings.push(format!(
            "{} branches spanning fewer than {} periods removed",
            removed.len(),
            config.min_periods
        ));
    }

    let ghost_links: Vec<GhostEntry> = network
        .ghost_links
        .iter()
        .map(|g| GhostEntry {
            parent: g.parent,
            child: g.child,
            weight: g.weight,
            cut_level: g.cut_level,
        })
        .collect();
    let periods: Vec<PeriodEntry> = input
        .periods
        .periods
        .iter()
        .map(|p| PeriodEntry {
            id: p.id,
            start: p.start.to_string(),
            end: p.end.to_string(),
            documents: p.documents.len(),
        })
        .collect();

    let export = PhyloExport {
        metadata: Metadata {
            lambda: phylo.lambda,
            min_periods: config.min_periods,
            counts: Counts {
                documents: input.documents.len(),
                periods: periods.len(),
                groups: group_entries.len(),
                branches: branch_entries.len(),
                links: links.len(),
                ghost_links: ghost_links.len(),
                terms: dynamics.len(),
            },
            large_phylomemy_warning: large,
            warnings,
            removed_branches: removed,
            tfidf: TFIDF_FORMULA.to_string(),
            crossings_before: layout.crossings_before,
            crossings_after: layout.crossings_after,
            config: config_echo,
        },
        periods,
        branches: branch_entries,
        groups: group_entries,
        links: links
            .into_iter()
            .map(|(parent, child, weight)| LinkEntry {
                parent,
                child,
                weight,
            })
            .collect(),
        ghost_links,
        terms: dynamics.into_values().collect(),
        search_index,
    };
    export.canonicalize()
}
