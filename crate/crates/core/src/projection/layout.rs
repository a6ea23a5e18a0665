//! Seabed peaks and kinship coordinates.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ids::{GroupId, PeriodId};
use crate::sea_level::SplitTree;

use super::branches::LeafBranch;

/// Smallest gap kept between consecutive peaks so x stays strictly
/// increasing even for branches separated at δ = 1.
const MIN_GAP: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

/// `1 − split level` of the common ancestor of each pair of consecutive
/// leaves.
pub fn drift_gaps(tree: &SplitTree, leaves: &[LeafBranch]) -> Vec<f64> {
    leaves
        .windows(2)
        .map(|w| (1.0 - tree.separation_level(&w[0].id, &w[1].id)).max(MIN_GAP))
        .collect()
}

/// Peak of every leaf: x from normalized cumulative drift gaps, y the final
/// elevation.
pub fn seabed_coordinates(tree: &SplitTree, leaves: &[LeafBranch]) -> Vec<Point> {
    if leaves.len() == 1 {
        return vec![Point {
            x: 0.5,
            y: leaves[0].elevation,
        }];
    }
    let gaps = drift_gaps(tree, leaves);
    let total: f64 = gaps.iter().sum();
    let mut x = 0.0;
    let mut out = Vec::with_capacity(leaves.len());
    for (i, leaf) in leaves.iter().enumerate() {
        if i > 0 {
            x += gaps[i - 1];
        }
        out.push(Point {
            x: if i + 1 == leaves.len() {
                1.0
            } else {
                x / total
            },
            y: leaf.elevation,
        });
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LayoutConfig {
    /// Down-up barycenter rounds.
    pub sweeps: usize,
    /// Glyph diameter: minimum distance between groups of the same row.
    pub separation: f64,
    /// Minimum band width, in glyph slots.
    pub min_band_slots: usize,
    /// Extra space between bands per unit of drift gap, in glyph slots.
    pub band_gap: f64,
}

impl Default for LayoutConfig {
    fn default() -> Self {
        LayoutConfig {
            sweeps: 4,
            separation: 1.0,
            min_band_slots: 2,
            band_gap: 2.0,
        }
    }
}

/// Groups of one branch with their periods.
pub type BandGroups = Vec<(GroupId, PeriodId)>;

#[derive(Clone, Debug, PartialEq)]
pub struct KinshipLayout {
    pub positions: HashMap<GroupId, Point>,
    pub crossings_before: usize,
    pub crossings_after: usize,
}

/// Per-row ordering of one band.
#[derive(Clone, Debug, PartialEq)]
struct Rows {
    periods: Vec<PeriodId>,
    order: Vec<Vec<GroupId>>,
}

impl Rows {
    fn new(groups: &BandGroups) -> Self {
        let mut by_row: BTreeMap<PeriodId, Vec<GroupId>> = BTreeMap::new();
        for &(g, p) in groups {
            by_row.entry(p).or_default().push(g);
        }
        for row in by_row.values_mut() {
            row.sort();
        }
        let (periods, order) = by_row.into_iter().unzip();
        Rows { periods, order }
    }

    /// Relative position of every group inside its row, in (0, 1).
    fn positions(&self) -> HashMap<GroupId, f64> {
        let mut pos = HashMap::new();
        for row in &self.order {
            let n = row.len() as f64;
            for (i, &g) in row.iter().enumerate() {
                pos.insert(g, (i as f64 + 0.5) / n);
            }
        }
        pos
    }
}

fn median(values: &mut [f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    values.sort_by(f64::total_cmp);
    let m = values.len() / 2;
    Some(if values.len() % 2 == 1 {
        values[m]
    } else {
        (values[m - 1] + values[m]) / 2.0
    })
}

/// Pairs of links joining the same two rows whose endpoints are in opposite
/// orders. Links sharing an endpoint never cross.
pub fn count_crossings(
    links: &[(GroupId, GroupId)],
    period: &HashMap<GroupId, PeriodId>,
    position: &HashMap<GroupId, f64>,
) -> usize {
    let mut by_rows: BTreeMap<(PeriodId, PeriodId), Vec<(f64, f64)>> = BTreeMap::new();
    for &(a, b) in links {
        let (top, bottom) = if period[&a] <= period[&b] {
            (a, b)
        } else {
            (b, a)
        };
        by_rows
            .entry((period[&top], period[&bottom]))
            .or_default()
            .push((position[&top], position[&bottom]));
    }
    by_rows
        .values()
        .map(|segs| {
            let mut n = 0;
            for i in 0..segs.len() {
                for j in i + 1..segs.len() {
                    if (segs[i].0 - segs[j].0) * (segs[i].1 - segs[j].1) < 0.0 {
                        n += 1;
                    }
                }
            }
            n
        })
        .sum()
}

fn sweep(
    rows: &mut Rows,
    neighbors: &HashMap<GroupId, Vec<GroupId>>,
    period: &HashMap<GroupId, PeriodId>,
    down: bool,
) {
    let indices: Vec<usize> = if down {
        (1..rows.order.len()).collect()
    } else {
        (0..rows.order.len().saturating_sub(1)).rev().collect()
    };
    for r in indices {
        let pos = rows.positions();
        let here = rows.periods[r];
        let mut keyed: Vec<(f64, usize, GroupId)> = rows.order[r]
            .iter()
            .enumerate()
            .map(|(i, &g)| {
                let mut xs: Vec<f64> = neighbors
                    .get(&g)
                    .into_iter()
                    .flatten()
                    .filter(|n| {
                        if down {
                            period[n] < here
                        } else {
                            period[n] > here
                        }
                    })
                    .map(|n| pos[n])
                    .collect();
                (median(&mut xs).unwrap_or(pos[&g]), i, g)
            })
            .collect();
        keyed.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        rows.order[r] = keyed.into_iter().map(|k| k.2).collect();
    }
}

/// Orders the rows of one band, returning the ordering and the crossing
/// counts before and after.
fn order_band(
    groups: &BandGroups,
    links: &[(GroupId, GroupId)],
    sweeps: usize,
) -> (Rows, usize, usize) {
    let period: HashMap<GroupId, PeriodId> = groups.iter().copied().collect();
    let mut neighbors: HashMap<GroupId, Vec<GroupId>> = HashMap::new();
    for &(a, b) in links {
        neighbors.entry(a).or_default().push(b);
        neighbors.entry(b).or_default().push(a);
    }
    let mut rows = Rows::new(groups);
    let before = count_crossings(links, &period, &rows.positions());
    let mut best = (rows.clone(), before);
    for _ in 0..sweeps {
        if best.1 == 0 {
            break;
        }
        sweep(&mut rows, &neighbors, &period, true);
        sweep(&mut rows, &neighbors, &period, false);
        let c = count_crossings(links, &period, &rows.positions());
        if c < best.1 {
            best = (rows.clone(), c);
        }
    }
    (best.0, before, best.1)
}

/// Kinship coordinates: y is the period index, each branch owns a band
/// (in the order given) spaced by its drift gap to the previous band, and
/// rows inside a band are ordered by median barycenter sweeps.
///
/// `links` are intra-branch links; `gaps` has one entry per pair of
/// consecutive bands.
pub fn kinship_layout(
    bands: &[BandGroups],
    links: &[(GroupId, GroupId)],
    gaps: &[f64],
    config: &LayoutConfig,
) -> KinshipLayout {
    let band_of: HashMap<GroupId, usize> = bands
        .iter()
        .enumerate()
        .flat_map(|(b, gs)| gs.iter().map(move |&(g, _)| (g, b)))
        .collect();
    let mut band_links: Vec<Vec<(GroupId, GroupId)>> = vec![Vec::new(); bands.len()];
    for &(a, b) in links {
        if let (Some(&ba), Some(&bb)) = (band_of.get(&a), band_of.get(&b)) {
            if ba == bb {
                band_links[ba].push((a, b));
            }
        }
    }
    let ordered: Vec<(Rows, usize, usize)> = bands
        .par_iter()
        .zip(band_links.par_iter())
        .map(|(groups, links)| order_band(groups, links, config.sweeps))
        .collect();

    let sep = config.separation;
    let mut positions = HashMap::new();
    let mut start = 0.0;
    for (b, (rows, _, _)) in ordered.iter().enumerate() {
        let widest = rows.order.iter().map(Vec::len).max().unwrap_or(0);
        let slots = widest.max(config.min_band_slots).max(1);
        for (period, row) in rows.periods.iter().zip(&rows.order) {
            let offset = (slots - row.len()) as f64 / 2.0 * sep;
            for (i, &g) in row.iter().enumerate() {
                positions.insert(
                    g,
                    Point {
                        x: start + offset + i as f64 * sep,
                        y: period.0 as f64,
                    },
                );
            }
        }
        let gap = gaps.get(b).copied().unwrap_or(0.0);
        start += slots as f64 * sep + config.band_gap * gap * sep;
    }
    KinshipLayout {
        positions,
        crossings_before: ordered.iter().map(|o| o.1).sum(),
        crossings_after: ordered.iter().map(|o| o.2).sum(),
    }
}
