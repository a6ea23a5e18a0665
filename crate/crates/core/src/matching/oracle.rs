//! Unpruned reference matcher used to check [`build_kinship_graph`].
//!
//! It enumerates every candidate in every window with plain loops and
//! floating-point scores and shares no search code with the pruned path.
//!
//! [`build_kinship_graph`]: super::build_kinship_graph

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::fields::Group;
use crate::ids::GroupId;

use super::{
    merge_links, Direction, KinshipGraph, KinshipLink, MatchConfig, MatchPolicy, WindowExtension,
};

pub const DEFAULT_ORACLE_CAP: usize = 50;

struct Cand<'a> {
    members: Vec<&'a Group>,
    score: f64,
    gap: usize,
    overlap: usize,
}

fn score<'a>(group: &Group, members: Vec<&'a Group>) -> Cand<'a> {
    let mut union: Vec<_> = members.iter().flat_map(|m| m.terms.iter()).collect();
    union.sort();
    union.dedup();
    let overlap = union.iter().filter(|t| group.terms.contains(**t)).count();
    let all = group.terms.len() + union.len() - overlap;
    let gap = members
        .iter()
        .map(|m| group.period.0.abs_diff(m.period.0))
        .max()
        .unwrap_or(0);
    Cand {
        score: if all == 0 {
            0.0
        } else {
            overlap as f64 / all as f64
        },
        members,
        gap,
        overlap,
    }
}

fn better(a: &Cand, b: &Cand) -> Ordering {
    b.score
        .partial_cmp(&a.score)
        .unwrap()
        .then(a.gap.cmp(&b.gap))
        .then(b.overlap.cmp(&a.overlap))
        .then(a.members.len().cmp(&b.members.len()))
        .then_with(|| {
            let ia: Vec<GroupId> = a.members.iter().map(|m| m.id).collect();
            let ib: Vec<GroupId> = b.members.iter().map(|m| m.id).collect();
            ia.cmp(&ib)
        })
}

fn in_window(group: &Group, other: &Group, direction: Direction, window: usize) -> bool {
    let (p, q) = (group.period.0, other.period.0);
    match direction {
        Direction::Upstream => q < p && p - q <= window,
        Direction::Downstream => q > p && q - p <= window,
    }
}

fn match_one(
    group: &Group,
    groups: &[Group],
    period_count: usize,
    direction: Direction,
    config: &MatchConfig,
) -> (Vec<KinshipLink>, usize) {
    let window = config.window.max(1);
    let reach = match direction {
        Direction::Upstream => group.period.0,
        Direction::Downstream => period_count.saturating_sub(group.period.0 + 1),
    };
    let limit = if config.extend_window {
        reach.max(window)
    } else {
        window
    };
    for w in window..=limit {
        let mut pool: Vec<&Group> = groups
            .iter()
            .filter(|o| in_window(group, o, direction, w))
            .collect();
        pool.sort_by_key(|g| g.id);
        let mut cands: Vec<Cand> = Vec::new();
        for i in 0..pool.len() {
            cands.push(score(group, vec![pool[i]]));
            for j in i + 1..pool.len() {
                cands.push(score(group, vec![pool[i], pool[j]]));
            }
        }
        cands.retain(|c| c.score > config.floor);
        let mk = |other: GroupId, weight: f64| match direction {
            Direction::Upstream => KinshipLink {
                parent: other,
                child: group.id,
                weight,
            },
            Direction::Downstream => KinshipLink {
                parent: group.id,
                child: other,
                weight,
            },
        };
        let links: Vec<KinshipLink> = match config.policy {
            MatchPolicy::Best => {
                cands.sort_by(better);
                cands
                    .first()
                    .map(|c| c.members.iter().map(|m| mk(m.id, c.score)).collect())
                    .unwrap_or_default()
            }
            MatchPolicy::AllAboveFloor => cands
                .iter()
                .filter(|c| c.members.iter().all(|m| m.terms.intersects(&group.terms)))
                .flat_map(|c| {
                    c.members
                        .iter()
                        .map(|m| mk(m.id, c.score))
                        .collect::<Vec<_>>()
                })
                .collect(),
        };
        if !links.is_empty() {
            return (links, w);
        }
    }
    (Vec::new(), limit)
}

/// Same contract as [`build_kinship_graph`](super::build_kinship_graph),
/// computed by exhaustive enumeration. Refuses inputs above `cap` groups.
pub fn brute_force_oracle(
    groups: Vec<Group>,
    period_count: usize,
    config: &MatchConfig,
    cap: usize,
) -> Result<KinshipGraph> {
    if groups.len() > cap {
        return Err(Error::OracleCap {
            groups: groups.len(),
            cap,
        });
    }
    let window = config.window.max(1);
    let mut links = Vec::new();
    let mut extensions = Vec::new();
    if period_count >= 2 {
        for g in &groups {
            for direction in [Direction::Upstream, Direction::Downstream] {
                let (found, used) = match_one(g, &groups, period_count, direction, config);
                if !found.is_empty() && used > window {
                    extensions.push(WindowExtension {
                        group: g.id,
                        direction,
                        window_used: used,
                    });
                }
                links.extend(found);
            }
        }
    }
    Ok(KinshipGraph {
        links: merge_links(links),
        groups,
        window,
        period_count,
        extensions,
    })
}
