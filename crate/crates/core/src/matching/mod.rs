//! Inter-temporal matching: kinship links between groups of different
//! periods, scored by Jaccard similarity against single groups and unions of
//! group pairs.

mod candidates;
mod oracle;

use std::cmp::{Ordering, Reverse};
use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Group;
use crate::ids::GroupId;
use crate::terms::TermSet;

pub use candidates::{enumerate_candidates, Candidate, GroupIndex};
pub use oracle::{brute_force_oracle, DEFAULT_ORACLE_CAP};

/// An exact Jaccard ratio `num / den`, compared without rounding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Ratio {
    pub num: u32,
    pub den: u32,
}

impl Ratio {
    pub fn to_f64(self) -> f64 {
        if self.den == 0 {
            0.0
        } else {
            self.num as f64 / self.den as f64
        }
    }
}

impl Ord for Ratio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u64 * other.den as u64).cmp(&(other.num as u64 * self.den as u64))
    }
}

impl PartialOrd for Ratio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

pub(crate) fn jaccard_ratio(a: &TermSet, b: &TermSet) -> Ratio {
    Ratio {
        num: a.intersection_len(b) as u32,
        den: a.union_len(b) as u32,
    }
}

/// `|A ∩ B| / |A ∪ B|`.
pub fn jaccard(a: &TermSet, b: &TermSet) -> Result<f64> {
    if a.is_empty() && b.is_empty() {
        return Err(Error::EmptyTermSets);
    }
    Ok(jaccard_ratio(a, b).to_f64())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Candidates from strictly earlier periods (parents).
    Upstream,
    /// Candidates from strictly later periods (children).
    Downstream,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchPolicy {
    /// One winning candidate per group and direction.
    #[default]
    Best,
    /// Every single above the floor, and every pair whose two members each
    /// share a term with the group and whose union clears the floor.
    AllAboveFloor,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MatchConfig {
    /// Number of periods searched on each side before extension.
    pub window: usize,
    pub policy: MatchPolicy,
    /// A candidate must score strictly above this.
    pub floor: f64,
    /// Widen the window one period at a time when nothing clears the floor.
    pub extend_window: bool,
}

impl Default for MatchConfig {
    fn default() -> Self {
        MatchConfig {
            window: 1,
            policy: MatchPolicy::Best,
            floor: 0.0,
            extend_window: true,
        }
    }
}

/// A parent → child connection; the parent's period is strictly earlier.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinshipLink {
    pub parent: GroupId,
    pub child: GroupId,
    /// Jaccard score of the winning candidate, in (0, 1].
    pub weight: f64,
}

/// Records a match that needed a wider window than configured.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowExtension {
    pub group: GroupId,
    pub direction: Direction,
    pub window_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KinshipGraph {
    pub groups: Vec<Group>,
    /// Sorted by `(child, parent)`; at most one link per pair.
    pub links: Vec<KinshipLink>,
    pub window: usize,
    pub period_count: usize,
    pub extensions: Vec<WindowExtension>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MatchOutcome {
    pub links: Vec<KinshipLink>,
    /// Window that produced the links (or the widest one tried).
    pub window_used: usize,
}

/// Ranking of a candidate; smaller is better. Ties on score go to the
/// smaller period gap, then the larger term overlap, then singles over
/// pairs, then the lexicographically smaller member ids.
type RankKey = (Reverse<Ratio>, usize, Reverse<usize>, usize, Vec<GroupId>);

fn rank_key(delta: Ratio, gap: usize, overlap: usize, members: &[GroupId]) -> RankKey {
    (
        Reverse(delta),
        gap,
        Reverse(overlap),
        members.len(),
        members.to_vec(),
    )
}

struct Scored {
    pos: usize,
    shared: usize,
    union: usize,
    gap: usize,
}

fn link(direction: Direction, group: GroupId, other: GroupId, weight: f64) -> KinshipLink {
    match direction {
        Direction::Upstream => KinshipLink {
            parent: other,
            child: group,
            weight,
        },
        Direction::Downstream => KinshipLink {
            parent: group,
            child: other,
            weight,
        },
    }
}

/// Candidates within `window` sharing at least one term with the group.
/// Groups sharing nothing can never win: as a single they score 0, and as
/// a pair member they only enlarge the union without adding overlap.
fn sharing_pool(
    group: &Group,
    index: &GroupIndex,
    direction: Direction,
    window: usize,
) -> Vec<Scored> {
    let mut pool: Vec<usize> = index
        .window_periods(group.period, direction, window)
        .flat_map(|p| group.terms.iter().flat_map(move |t| index.with_term(p, t)))
        .copied()
        .collect();
    pool.sort_unstable();
    pool.dedup();
    pool.into_iter()
        .map(|pos| {
            let other = &index.groups()[pos];
            Scored {
                pos,
                shared: group.terms.intersection_len(&other.terms),
                union: group.terms.union_len(&other.terms),
                gap: group.period.0.abs_diff(other.period.0),
            }
        })
        .collect()
}

fn best_in_window(
    group: &Group,
    index: &GroupIndex,
    direction: Direction,
    window: usize,
    floor: f64,
) -> Option<(Vec<GroupId>, Ratio)> {
    let pool = sharing_pool(group, index, direction, window);
    let groups = index.groups();
    let mut best: Option<(RankKey, Ratio)> = None;
    let consider = |best: &mut Option<(RankKey, Ratio)>,
                    delta: Ratio,
                    gap: usize,
                    overlap: usize,
                    members: &[GroupId]| {
        if delta.to_f64() <= floor {
            return;
        }
        let key = rank_key(delta, gap, overlap, members);
        if best.as_ref().is_none_or(|(k, _)| key < *k) {
            *best = Some((key, delta));
        }
    };
    for s in &pool {
        let delta = Ratio {
            num: s.shared as u32,
            den: s.union as u32,
        };
        consider(&mut best, delta, s.gap, s.shared, &[groups[s.pos].id]);
    }
    for (i, a) in pool.iter().enumerate() {
        for b in &pool[i + 1..] {
            // |A ∩ (B ∪ C)| ≤ s_B + s_C and |A ∪ B ∪ C| ≥ max(u_B, u_C).
            let bound = Ratio {
                num: (a.shared + b.shared) as u32,
                den: a.union.max(b.union) as u32,
            };
            if let Some((key, _)) = &best {
                if bound < key.0 .0 {
                    continue;
                }
            }
            let (ga, gb) = (&groups[a.pos], &groups[b.pos]);
            let terms = ga.terms.union(&gb.terms);
            let delta = jaccard_ratio(&group.terms, &terms);
            let mut members = [ga.id, gb.id];
            members.sort();
            consider(
                &mut best,
                delta,
                a.gap.max(b.gap),
                delta.num as usize,
                &members,
            );
        }
    }
    best.map(|(key, delta)| (key.4, delta))
}

fn all_in_window(
    group: &Group,
    index: &GroupIndex,
    direction: Direction,
    window: usize,
    floor: f64,
) -> BTreeMap<GroupId, Ratio> {
    let pool = sharing_pool(group, index, direction, window);
    let groups = index.groups();
    let mut out: BTreeMap<GroupId, Ratio> = BTreeMap::new();
    let mut keep = |id: GroupId, delta: Ratio| {
        if delta.to_f64() > floor {
            let e = out.entry(id).or_insert(delta);
            *e = (*e).max(delta);
        }
    };
    for s in &pool {
        keep(
            groups[s.pos].id,
            Ratio {
                num: s.shared as u32,
                den: s.union as u32,
            },
        );
    }
    for (i, a) in pool.iter().enumerate() {
        for b in &pool[i + 1..] {
            let (ga, gb) = (&groups[a.pos], &groups[b.pos]);
            let delta = jaccard_ratio(&group.terms, &ga.terms.union(&gb.terms));
            keep(ga.id, delta);
            keep(gb.id, delta);
        }
    }
    out
}

/// Finds the kin of `group` in one direction.
pub fn match_group(
    group: &Group,
    index: &GroupIndex,
    direction: Direction,
    config: &MatchConfig,
) -> MatchOutcome {
    let window = config.window.max(1);
    let limit = if config.extend_window {
        index.max_window(group.period, direction).max(window)
    } else {
        window
    };
    for w in window..=limit {
        let links: Vec<KinshipLink> = match config.policy {
            MatchPolicy::Best => best_in_window(group, index, direction, w, config.floor)
                .map(|(members, delta)| {
                    members
                        .into_iter()
                        .map(|m| link(direction, group.id, m, delta.to_f64()))
                        .collect()
                })
                .unwrap_or_default(),
            MatchPolicy::AllAboveFloor => all_in_window(group, index, direction, w, config.floor)
                .into_iter()
                .map(|(m, delta)| link(direction, group.id, m, delta.to_f64()))
                .collect(),
        };
        if !links.is_empty() {
            return MatchOutcome {
                links,
                window_used: w,
            };
        }
    }
    MatchOutcome {
        links: Vec::new(),
        window_used: limit,
    }
}

/// Keeps one link per `(child, parent)` pair with the highest weight.
pub(crate) fn merge_links(links: impl IntoIterator<Item = KinshipLink>) -> Vec<KinshipLink> {
    let mut merged: BTreeMap<(GroupId, GroupId), f64> = BTreeMap::new();
    for l in links {
        let w = merged.entry((l.child, l.parent)).or_insert(l.weight);
        *w = w.max(l.weight);
    }
    merged
        .into_iter()
        .map(|((child, parent), weight)| KinshipLink {
            parent,
            child,
            weight,
        })
        .collect()
}

/// Matches every group upstream and downstream and unions the results.
pub fn build_kinship_graph(
    groups: Vec<Group>,
    period_count: usize,
    config: &MatchConfig,
) -> KinshipGraph {
    let index = GroupIndex::new(&groups, period_count);
    let window = config.window.max(1);
    let outcomes: Vec<(GroupId, Direction, MatchOutcome)> = if period_count < 2 {
        Vec::new()
    } else {
        groups
            .par_iter()
            .flat_map_iter(|g| {
                [Direction::Upstream, Direction::Downstream]
                    .into_iter()
                    .map(|d| (g.id, d, match_group(g, &index, d, config)))
            })
            .collect()
    };
    let extensions = outcomes
        .iter()
        .filter(|(_, _, o)| !o.links.is_empty() && o.window_used > window)
        .map(|(g, d, o)| WindowExtension {
            group: *g,
            direction: *d,
            window_used: o.window_used,
        })
        .collect();
    let links = merge_links(outcomes.into_iter().flat_map(|(_, _, o)| o.links));
    KinshipGraph {
        groups,
        links,
        window,
        period_count,
        extensions,
    }
}
