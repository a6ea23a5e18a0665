use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::corpus::CoocMatrix;
use crate::error::{Error, Result};
use crate::ids::{PeriodId, TermId};

/// How the two directional confidences `P(y|x)` and `P(x|y)` are combined.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Symmetrization {
    /// Keeps hypernym/hyponym pairs strongly linked.
    #[default]
    Max,
    Min,
}

pub fn confidence(matrix: &CoocMatrix, x: TermId, y: TermId, mode: Symmetrization) -> Result<f64> {
    let (ox, oy) = (matrix.occ(x), matrix.occ(y));
    if ox == 0 {
        return Err(Error::TermAbsent(x.0));
    }
    if oy == 0 {
        return Err(Error::TermAbsent(y.0));
    }
    let c = matrix.get(x, y) as f64;
    let (a, b) = (c / ox as f64, c / oy as f64);
    Ok(match mode {
        Symmetrization::Max => a.max(b),
        Symmetrization::Min => a.min(b),
    })
}

/// Per-period confidence graph over the terms present in the period.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SimilarityGraph {
    pub period: PeriodId,
    pub nodes: BTreeSet<TermId>,
    /// Keyed by `(x, y)` with `x < y`.
    pub edges: BTreeMap<(TermId, TermId), f64>,
}

impl SimilarityGraph {
    pub fn has_edge(&self, x: TermId, y: TermId) -> bool {
        let key = if x < y { (x, y) } else { (y, x) };
        self.edges.contains_key(&key)
    }

    pub fn neighbors(&self) -> BTreeMap<TermId, BTreeSet<TermId>> {
        let mut adj: BTreeMap<TermId, BTreeSet<TermId>> =
            self.nodes.iter().map(|&n| (n, BTreeSet::new())).collect();
        for &(x, y) in self.edges.keys() {
            adj.entry(x).or_default().insert(y);
            adj.entry(y).or_default().insert(x);
        }
        adj
    }
}

/// Keeps every co-occurring pair whose confidence reaches `edge_threshold`.
pub fn build_similarity_graph(
    matrix: &CoocMatrix,
    edge_threshold: f64,
    mode: Symmetrization,
) -> SimilarityGraph {
    let nodes = matrix.terms().map(|(t, _)| t).collect();
    let edges = matrix
        .pairs()
        .filter(|&(_, _, c)| c > 0)
        .filter_map(|(x, y, _)| {
            let w = confidence(matrix, x, y, mode).expect("co-occurring terms occur");
            (w >= edge_threshold).then_some(((x, y), w))
        })
        .collect();
    SimilarityGraph {
        period: matrix.period,
        nodes,
        edges,
    }
}
