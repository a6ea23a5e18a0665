use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Group;
use crate::ids::{BranchId, GroupId, PeriodId};
use crate::sea_level::{GhostLink, Phylomemy};

/// A leaf of the split tree, ready for projection.
#[derive(Clone, Debug, PartialEq)]
pub struct LeafBranch {
    pub id: BranchId,
    pub groups: Vec<GroupId>,
    pub elevation: f64,
}

/// Leaves in drift order and the ghost links between them.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    pub leaves: Vec<LeafBranch>,
    pub ghost_links: Vec<GhostLink>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemovedBranch {
    pub id: BranchId,
    pub groups: Vec<GroupId>,
    pub span: usize,
}

pub fn extract_network(phylomemy: &Phylomemy) -> Network {
    // The tree is stored in pre-order with children in id order.
    let leaves = phylomemy
        .tree
        .leaves()
        .map(|n| LeafBranch {
            id: n.id.clone(),
            groups: n.groups.clone(),
            elevation: n.elevation,
        })
        .collect();
    Network {
        leaves,
        ghost_links: phylomemy.ghost_links.clone(),
    }
}

/// Number of distinct periods covered by the groups.
pub fn period_span(groups: &[GroupId], lookup: &HashMap<GroupId, &Group>) -> usize {
    groups
        .iter()
        .map(|g| lookup[g].period)
        .collect::<BTreeSet<PeriodId>>()
        .len()
}

/// Drops branches covering fewer than `min_periods` periods together with
/// their ghost links. Returns the network of kept branches and the list of
/// removed ones.
pub fn filter_minor_branches(
    network: Network,
    lookup: &HashMap<GroupId, &Group>,
    min_periods: usize,
) -> Result<(Network, Vec<RemovedBranch>)> {
    if min_periods == 0 {
        return Err(Error::Config("min_periods must be ≥ 1".into()));
    }
    let total = network.leaves.len();
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    for leaf in network.leaves {
        let span = period_span(&leaf.groups, lookup);
        if span >= min_periods {
            kept.push(leaf);
        } else {
            removed.push(RemovedBranch {
                id: leaf.id,
                groups: leaf.groups,
                span,
            });
        }
    }
    if kept.is_empty() {
        return Err(Error::AllBranchesFiltered(total));
    }
    let gone: BTreeSet<GroupId> = removed
        .iter()
        .flat_map(|r| r.groups.iter().copied())
        .collect();
    let ghost_links = network
        .ghost_links
        .into_iter()
        .filter(|g| !gone.contains(&g.parent) && !gone.contains(&g.child))
        .collect();
    Ok((
        Network {
            leaves: kept,
            ghost_links,
        },
        removed,
    ))
}
