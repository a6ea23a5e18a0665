//! Sea level rise: local, recursive elevation of the similarity threshold
//! inside branches, producing the foliation of the kinship graph.

mod quality;

use std::collections::{BTreeMap, HashMap};

use petgraph::unionfind::UnionFind;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::Group;
use crate::ids::{BranchId, GroupId, PeriodId};
use crate::matching::{KinshipGraph, KinshipLink};

pub use quality::{branch_quality, TermStats};

/// Minimum gain for a split to count as an improvement.
pub const SPLIT_TOLERANCE: f64 = 1e-12;
/// Step above the highest link weight of a branch.
pub const TOP_EPSILON: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchNode {
    pub id: BranchId,
    /// Sorted ascending.
    pub groups: Vec<GroupId>,
    /// Threshold at which this branch was separated from its parent (0 for
    /// roots); for leaves, the final local δ.
    pub elevation: f64,
    pub parent: Option<BranchId>,
    /// δ at which this branch split into its children; `None` for leaves.
    pub split_level: Option<f64>,
    pub children: Vec<BranchId>,
}

impl BranchNode {
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// History of splits. Nodes are stored in pre-order with children in id
/// order, so the leaves appear in drift order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SplitTree {
    nodes: Vec<BranchNode>,
}

impl SplitTree {
    pub fn from_nodes(nodes: Vec<BranchNode>) -> Self {
        SplitTree { nodes }
    }

    pub fn nodes(&self) -> &[BranchNode] {
        &self.nodes
    }

    pub fn get(&self, id: &BranchId) -> Option<&BranchNode> {
        self.nodes.iter().find(|n| &n.id == id)
    }

    pub fn roots(&self) -> impl Iterator<Item = &BranchNode> {
        self.nodes.iter().filter(|n| n.parent.is_none())
    }

    pub fn leaves(&self) -> impl Iterator<Item = &BranchNode> {
        self.nodes.iter().filter(|n| n.is_leaf())
    }

    /// Leaf branch of every group.
    pub fn leaf_of(&self) -> HashMap<GroupId, BranchId> {
        self.leaves()
            .flat_map(|l| l.groups.iter().map(move |&g| (g, l.id.clone())))
            .collect()
    }

    /// Split level of the lowest common ancestor, or 0 when the branches
    /// belong to different roots.
    pub fn separation_level(&self, a: &BranchId, b: &BranchId) -> f64 {
        let common = a
            .segments()
            .iter()
            .zip(b.segments())
            .take_while(|(x, y)| x == y)
            .count();
        if common == 0 {
            return 0.0;
        }
        let lca = BranchId::from_segments(&a.segments()[..common]);
        self.get(&lca).and_then(|n| n.split_level).unwrap_or(0.0)
    }
}

impl BranchId {
    pub(crate) fn from_segments(segments: &[u32]) -> Self {
        let mut id = BranchId::root(segments[0]);
        for &s in &segments[1..] {
            id = id.child(s);
        }
        id
    }
}

/// A kinship link cut by the rise, joining two different branches.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GhostLink {
    pub parent: GroupId,
    pub child: GroupId,
    pub weight: f64,
    pub cut_level: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decision {
    /// The raised threshold left the branch connected.
    Connected,
    Split,
    Freeze,
}

/// One considered threshold inside one branch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceStep {
    pub branch: BranchId,
    pub delta: f64,
    pub components: usize,
    pub quality_before: Option<f64>,
    pub quality_after: Option<f64>,
    pub decision: Decision,
}

/// A phylomemy reconstructed at one level of observation λ.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phylomemy {
    pub groups: Vec<Group>,
    pub period_count: usize,
    /// Links whose endpoints share a leaf and that sit above its elevation.
    pub links: Vec<KinshipLink>,
    /// Links cut between branches.
    pub ghost_links: Vec<GhostLink>,
    /// Links below a committed threshold whose endpoints still ended up in
    /// the same branch (they lie on a cycle with stronger links).
    pub submerged_links: Vec<GhostLink>,
    pub tree: SplitTree,
    pub lambda: f64,
    pub trace: Vec<TraceStep>,
}

impl Phylomemy {
    /// Every link of the original kinship graph with its weight.
    pub fn all_links(&self) -> impl Iterator<Item = (GroupId, GroupId, f64)> + '_ {
        self.links
            .iter()
            .map(|l| (l.parent, l.child, l.weight))
            .chain(
                self.ghost_links
                    .iter()
                    .chain(&self.submerged_links)
                    .map(|g| (g.parent, g.child, g.weight)),
            )
    }

    /// Thresholds of every committed split, ascending and distinct.
    pub fn committed_levels(&self) -> Vec<f64> {
        let mut levels: Vec<f64> = self
            .trace
            .iter()
            .filter(|s| s.decision == Decision::Split)
            .map(|s| s.delta)
            .collect();
        levels.sort_by(f64::total_cmp);
        levels.dedup();
        levels
    }

    pub fn group(&self, id: GroupId) -> Option<&Group> {
        self.groups
            .get(id.0 as usize)
            .filter(|g| g.id == id)
            .or_else(|| self.groups.iter().find(|g| g.id == id))
    }
}

struct Context<'a> {
    groups: &'a [Group],
    position: HashMap<GroupId, usize>,
    links: &'a [KinshipLink],
    stats: TermStats,
    lambda: f64,
}

impl Context<'_> {
    fn endpoints(&self, link: usize) -> (usize, usize) {
        let l = &self.links[link];
        (self.position[&l.parent], self.position[&l.child])
    }

    /// Connected components of `members` under `links`, ordered by earliest
    /// period and then smallest group id; members sorted within each.
    fn components(&self, members: &[usize], links: &[usize]) -> Vec<Vec<usize>> {
        let local: HashMap<usize, usize> =
            members.iter().enumerate().map(|(i, &m)| (m, i)).collect();
        let mut uf = UnionFind::<usize>::new(members.len());
        for &l in links {
            let (a, b) = self.endpoints(l);
            uf.union(local[&a], local[&b]);
        }
        let mut blocks: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, &m) in members.iter().enumerate() {
            blocks.entry(uf.find_mut(i)).or_default().push(m);
        }
        let mut out: Vec<Vec<usize>> = blocks.into_values().collect();
        for b in &mut out {
            b.sort_by_key(|&m| self.groups[m].id);
        }
        out.sort_by_key(|b| {
            let first = b
                .iter()
                .map(|&m| self.groups[m].period)
                .min()
                .unwrap_or(PeriodId(0));
            (first, self.groups[b[0]].id)
        });
        out
    }

    fn quality(&self, blocks: &[Vec<usize>]) -> f64 {
        let sets: Vec<Vec<_>> = blocks
            .iter()
            .map(|b| b.iter().map(|&m| &self.groups[m].terms).collect())
            .collect();
        branch_quality(&sets, self.lambda, &self.stats).expect("blocks are non-empty and λ checked")
    }

    fn node(&self, id: BranchId, members: &[usize], elevation: f64) -> BranchNode {
        BranchNode {
            parent: id.parent(),
            id,
            groups: members.iter().map(|&m| self.groups[m].id).collect(),
            elevation,
            split_level: None,
            children: Vec::new(),
        }
    }
}

#[derive(Default)]
struct Output {
    nodes: Vec<BranchNode>,
    surviving: Vec<usize>,
    ghosts: Vec<GhostLink>,
    submerged: Vec<GhostLink>,
    trace: Vec<TraceStep>,
}

fn rise_branch(
    ctx: &Context,
    id: BranchId,
    members: Vec<usize>,
    links: Vec<usize>,
    elevation: f64,
    out: &mut Output,
) {
    let mut weights: Vec<f64> = links.iter().map(|&l| ctx.links[l].weight).collect();
    weights.sort_by(f64::total_cmp);
    weights.dedup();
    let before = ctx.quality(std::slice::from_ref(&members));

    for (i, &w) in weights.iter().enumerate() {
        if w >= 1.0 {
            break;
        }
        let delta = match weights.get(i + 1) {
            Some(&next) => w + (next - w) / 2.0,
            None => (w + TOP_EPSILON).min(1.0),
        };
        let (active, removed): (Vec<usize>, Vec<usize>) =
            links.iter().partition(|&&l| ctx.links[l].weight >= delta);
        let blocks = ctx.components(&members, &active);
        if blocks.len() == 1 {
            out.trace.push(TraceStep {
                branch: id.clone(),
                delta,
                components: 1,
                quality_before: None,
                quality_after: None,
                decision: Decision::Connected,
            });
            continue;
        }
        let after = ctx.quality(&blocks);
        let improves = after > before + SPLIT_TOLERANCE;
        out.trace.push(TraceStep {
            branch: id.clone(),
            delta,
            components: blocks.len(),
            quality_before: Some(before),
            quality_after: Some(after),
            decision: if improves {
                Decision::Split
            } else {
                Decision::Freeze
            },
        });
        if !improves {
            break;
        }

        let mut block_of: HashMap<usize, usize> = HashMap::new();
        for (b, block) in blocks.iter().enumerate() {
            for &m in block {
                block_of.insert(m, b);
            }
        }
        for &l in &removed {
            let (a, b) = ctx.endpoints(l);
            let link = &ctx.links[l];
            let cut = GhostLink {
                parent: link.parent,
                child: link.child,
                weight: link.weight,
                cut_level: delta,
            };
            if block_of[&a] == block_of[&b] {
                out.submerged.push(cut);
            } else {
                out.ghosts.push(cut);
            }
        }
        let mut node = ctx.node(id.clone(), &members, elevation);
        node.split_level = Some(delta);
        node.children = (1..=blocks.len() as u32).map(|k| id.child(k)).collect();
        out.nodes.push(node);
        let mut child_links: Vec<Vec<usize>> = vec![Vec::new(); blocks.len()];
        for &l in &active {
            child_links[block_of[&ctx.endpoints(l).0]].push(l);
        }
        for (k, (block, child_links)) in blocks.into_iter().zip(child_links).enumerate() {
            rise_branch(ctx, id.child(k as u32 + 1), block, child_links, delta, out);
        }
        return;
    }

    out.surviving.extend(links);
    out.nodes.push(ctx.node(id, &members, elevation));
}

fn context<'a>(graph: &'a KinshipGraph, lambda: f64) -> Context<'a> {
    Context {
        groups: &graph.groups,
        position: graph
            .groups
            .iter()
            .enumerate()
            .map(|(i, g)| (g.id, i))
            .collect(),
        links: &graph.links,
        stats: TermStats::from_groups(&graph.groups),
        lambda,
    }
}

/// One root branch per weakly connected component of the kinship graph, at
/// elevation 0.
pub fn initial_continent(graph: &KinshipGraph) -> SplitTree {
    let ctx = context(graph, 0.0);
    let members: Vec<usize> = (0..graph.groups.len()).collect();
    let links: Vec<usize> = (0..graph.links.len()).collect();
    let nodes = ctx
        .components(&members, &links)
        .into_iter()
        .enumerate()
        .map(|(i, block)| ctx.node(BranchId::root(i as u32), &block, 0.0))
        .collect();
    SplitTree { nodes }
}

/// Runs the rise inside every root of `tree` at level of observation
/// `lambda`. Roots are processed in parallel and reassembled in order.
pub fn rise(tree: &SplitTree, graph: &KinshipGraph, lambda: f64) -> Result<Phylomemy> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Lambda(lambda));
    }
    let ctx = context(graph, lambda);
    let mut links_by_root: HashMap<usize, Vec<usize>> = HashMap::new();
    let root_of: HashMap<usize, usize> = tree
        .roots()
        .enumerate()
        .flat_map(|(r, n)| n.groups.iter().map(move |g| (*g, r)))
        .map(|(g, r)| (ctx.position[&g], r))
        .collect();
    for l in 0..graph.links.len() {
        let (a, b) = ctx.endpoints(l);
        let (ra, rb) = (root_of[&a], root_of[&b]);
        debug_assert_eq!(ra, rb, "roots are weakly connected components");
        links_by_root.entry(ra).or_default().push(l);
    }
    let roots: Vec<&BranchNode> = tree.roots().collect();
    let outputs: Vec<Output> = roots
        .par_iter()
        .enumerate()
        .map(|(r, node)| {
            let mut out = Output::default();
            let mut members: Vec<usize> = node.groups.iter().map(|g| ctx.position[g]).collect();
            members.sort_unstable();
            let links = links_by_root.get(&r).cloned().unwrap_or_default();
            rise_branch(
                &ctx,
                node.id.clone(),
                members,
                links,
                node.elevation,
                &mut out,
            );
            out
        })
        .collect();

    let mut all = Output::default();
    for o in outputs {
        all.nodes.extend(o.nodes);
        all.surviving.extend(o.surviving);
        all.ghosts.extend(o.ghosts);
        all.submerged.extend(o.submerged);
        all.trace.extend(o.trace);
    }
    all.surviving.sort_unstable();
    let key = |g: &GhostLink| (g.child, g.parent);
    all.ghosts.sort_by_key(key);
    all.submerged.sort_by_key(key);
    Ok(Phylomemy {
        groups: graph.groups.clone(),
        period_count: graph.period_count,
        links: all.surviving.iter().map(|&l| graph.links[l]).collect(),
        ghost_links: all.ghosts,
        submerged_links: all.submerged,
        tree: SplitTree { nodes: all.nodes },
        lambda,
        trace: all.trace,
    })
}

/// Partition of the groups into the components that remain after removing
/// every link weaker than `delta`. Blocks and their members are sorted by
/// group id.
pub fn foliation_slice(phylomemy: &Phylomemy, delta: f64) -> Vec<Vec<GroupId>> {
    let position: HashMap<GroupId, usize> = phylomemy
        .groups
        .iter()
        .enumerate()
        .map(|(i, g)| (g.id, i))
        .collect();
    let mut uf = UnionFind::<usize>::new(phylomemy.groups.len());
    for (p, c, w) in phylomemy.all_links() {
        if w >= delta {
            uf.union(position[&p], position[&c]);
        }
    }
    let mut blocks: BTreeMap<usize, Vec<GroupId>> = BTreeMap::new();
    for (i, g) in phylomemy.groups.iter().enumerate() {
        blocks.entry(uf.find_mut(i)).or_default().push(g.id);
    }
    let mut out: Vec<Vec<GroupId>> = blocks.into_values().collect();
    for b in &mut out {
        b.sort();
    }
    out.sort();
    out
}
