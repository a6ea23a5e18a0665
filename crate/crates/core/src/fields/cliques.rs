//! Maximal clique enumeration (Bron–Kerbosch with Tomita pivoting) over
//! word-packed adjacency bitsets.

use crate::error::{Error, Result};
use crate::ids::TermId;
use crate::terms::TermSet;

use super::SimilarityGraph;

#[derive(Clone, PartialEq, Eq)]
struct Bits(Vec<u64>);

impl Bits {
    fn empty(n: usize) -> Self {
        Bits(vec![0; n.div_ceil(64)])
    }

    fn full(n: usize) -> Self {
        let mut b = Bits::empty(n);
        for i in 0..n {
            b.set(i);
        }
        b
    }

    fn set(&mut self, i: usize) {
        self.0[i / 64] |= 1 << (i % 64);
    }

    fn clear(&mut self, i: usize) {
        self.0[i / 64] &= !(1 << (i % 64));
    }

    fn is_empty(&self) -> bool {
        self.0.iter().all(|&w| w == 0)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & b).collect())
    }

    fn and_not(&self, other: &Bits) -> Bits {
        Bits(self.0.iter().zip(&other.0).map(|(a, b)| a & !b).collect())
    }

    fn and_count(&self, other: &Bits) -> u32 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().flat_map(|(w, &word)| {
            let mut word = word;
            std::iter::from_fn(move || {
                if word == 0 {
                    return None;
                }
                let bit = word.trailing_zeros() as usize;
                word &= word - 1;
                Some(w * 64 + bit)
            })
        })
    }
}

struct Enumerator<'a> {
    adj: &'a [Bits],
    nodes: &'a [TermId],
    cap: usize,
    out: Vec<TermSet>,
}

impl Enumerator<'_> {
    fn expand(&mut self, clique: &mut Vec<usize>, mut p: Bits, mut x: Bits) -> bool {
        if p.is_empty() && x.is_empty() {
            if self.out.len() == self.cap {
                return false;
            }
            self.out
                .push(clique.iter().map(|&i| self.nodes[i]).collect());
            return true;
        }
        // Pivot maximizing |P ∩ N(u)| over P ∪ X.
        let pivot = p
            .iter()
            .chain(x.iter())
            .max_by_key(|&u| (p.and_count(&self.adj[u]), std::cmp::Reverse(u)))
            .expect("P ∪ X is non-empty");
        let branch: Vec<usize> = p.and_not(&self.adj[pivot]).iter().collect();
        for v in branch {
            clique.push(v);
            let ok = self.expand(clique, p.and(&self.adj[v]), x.and(&self.adj[v]));
            clique.pop();
            if !ok {
                return false;
            }
            p.clear(v);
            x.set(v);
        }
        true
    }
}

/// Every maximal clique of `graph`, each returned as a sorted term set, in
/// ascending order. Isolated nodes come out as one-term cliques.
///
/// Fails with [`Error::PeriodTooDense`] when more than `cap` cliques exist.
pub fn maximal_cliques(graph: &SimilarityGraph, cap: usize) -> Result<Vec<TermSet>> {
    let nodes: Vec<TermId> = graph.nodes.iter().copied().collect();
    let n = nodes.len();
    let position = |t: TermId| nodes.binary_search(&t).expect("edge endpoint is a node");
    let mut adj = vec![Bits::empty(n); n];
    for &(a, b) in graph.edges.keys() {
        let (i, j) = (position(a), position(b));
        adj[i].set(j);
        adj[j].set(i);
    }
    let mut e = Enumerator {
        adj: &adj,
        nodes: &nodes,
        cap,
        out: Vec::new(),
    };
    if !e.expand(&mut Vec::new(), Bits::full(n), Bits::empty(n)) {
        return Err(Error::PeriodTooDense {
            period: graph.period.0,
            cap,
        });
    }
    let mut out = e.out;
    out.sort();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ids::PeriodId;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn graph(n: u32, edges: &[(u32, u32)]) -> SimilarityGraph {
        SimilarityGraph {
            period: PeriodId(0),
            nodes: (0..n).map(TermId).collect(),
            edges: edges
                .iter()
                .map(|&(a, b)| ((TermId(a.min(b)), TermId(a.max(b))), 1.0))
                .collect(),
        }
    }

    fn ids(sets: &[TermSet]) -> Vec<Vec<u32>> {
        sets.iter()
            .map(|s| s.iter().map(|t| t.0).collect())
            .collect()
    }

    #[test]
    fn triangle_and_path() {
        let tri = maximal_cliques(&graph(3, &[(0, 1), (1, 2), (0, 2)]), 100).unwrap();
        assert_eq!(ids(&tri), vec![vec![0, 1, 2]]);
        let path = maximal_cliques(&graph(3, &[(0, 1), (1, 2)]), 100).unwrap();
        assert_eq!(ids(&path), vec![vec![0, 1], vec![1, 2]]);
    }

    #[test]
    fn isolated_nodes_are_singletons() {
        let g = graph(3, &[(0, 1)]);
        assert_eq!(
            ids(&maximal_cliques(&g, 10).unwrap()),
            vec![vec![0, 1], vec![2]]
        );
    }

    #[test]
    fn cap_is_enforced() {
        let g = graph(6, &[(0, 1), (2, 3), (4, 5)]);
        let err = maximal_cliques(&g, 2).unwrap_err();
        assert!(matches!(err, Error::PeriodTooDense { cap: 2, .. }));
        assert!(err.to_string().contains("higher edge threshold"));
    }

    #[test]
    fn large_node_ids_cross_word_boundaries() {
        let g = graph(130, &[(3, 70), (70, 129), (3, 129), (64, 65)]);
        let cliques = maximal_cliques(&g, 1000).unwrap();
        assert!(ids(&cliques).contains(&vec![3, 70, 129]));
        assert!(ids(&cliques).contains(&vec![64, 65]));
        assert_eq!(cliques.len(), 2 + 130 - 5);
    }

    /// Exhaustive oracle: a subset is a maximal clique iff it is a clique and
    /// no outside vertex is adjacent to all of its members.
    fn brute_force(n: u32, edges: &BTreeSet<(u32, u32)>) -> Vec<Vec<u32>> {
        let adj = |a: u32, b: u32| edges.contains(&(a.min(b), a.max(b)));
        let mut out = Vec::new();
        for mask in 1u32..(1 << n) {
            let members: Vec<u32> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let clique = members
                .iter()
                .enumerate()
                .all(|(k, &a)| members[k + 1..].iter().all(|&b| adj(a, b)));
            if !clique {
                continue;
            }
            let extendable = (0..n)
                .filter(|v| mask & (1 << v) == 0)
                .any(|v| members.iter().all(|&m| adj(m, v)));
            if !extendable {
                out.push(members);
            }
        }
        out.sort();
        out
    }

    #[test]
    fn random_graphs_match_subset_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for density in [0.2, 0.4, 0.6] {
            for _ in 0..5 {
                let edges: BTreeSet<(u32, u32)> = (0..12u32)
                    .flat_map(|a| (a + 1..12).map(move |b| (a, b)))
                    .filter(|_| rng.gen_bool(density))
                    .collect();
                let e: Vec<_> = edges.iter().copied().collect();
                let got = ids(&maximal_cliques(&graph(12, &e), 10_000).unwrap());
                assert_eq!(got, brute_force(12, &edges));
            }
        }
    }
}
