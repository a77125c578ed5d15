//! Boundary edges (endpoints in different communities) and the nodes that
//! carry them.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::community::CommunityLabeling;
use crate::graph::Graph;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct BoundarySet {
    /// Cross-community edges as `(min, max)` pairs, ascending.
    pub boundary_edges: Vec<(usize, usize)>,
    /// Each boundary node mapped to its own community label. Keys iterate
    /// in ascending node id.
    pub home_community: BTreeMap<usize, usize>,
}

impl BoundarySet {
    pub fn boundary_nodes(&self) -> impl Iterator<Item = usize> + '_ {
        self.home_community.keys().copied()
    }

    pub fn num_nodes(&self) -> usize {
        self.home_community.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boundary_edges.is_empty()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.home_community.contains_key(&v)
    }
}

pub fn boundary_edges(g: &Graph, labeling: &CommunityLabeling) -> BoundarySet {
    let c = &labeling.labels;
    let mut edges: Vec<(usize, usize)> = g
        .edges()
        .iter()
        .copied()
        .filter(|&(u, v)| c[u] != c[v])
        .collect();
    edges.sort_unstable();
    let mut home_community = BTreeMap::new();
    for &(u, v) in &edges {
        home_community.insert(u, c[u]);
        home_community.insert(v, c[v]);
    }
    BoundarySet {
        boundary_edges: edges,
        home_community,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::community_mask;
    use proptest::prelude::*;

    fn bridged() -> Graph {
        Graph::new(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)]).unwrap()
    }

    #[test]
    fn single_cross_edge() {
        let g = bridged();
        let lab = CommunityLabeling::from_labels(&g, &[0, 0, 0, 1, 1, 1]).unwrap();
        let b = boundary_edges(&g, &lab);
        assert_eq!(b.boundary_edges, vec![(2, 3)]);
        assert_eq!(b.boundary_nodes().collect::<Vec<_>>(), vec![2, 3]);
        assert_eq!(b.home_community[&2], 0);
        assert_eq!(b.home_community[&3], 1);
    }

    #[test]
    fn one_community_has_no_boundary() {
        let g = bridged();
        let lab = CommunityLabeling::from_labels(&g, &[0; 6]).unwrap();
        let b = boundary_edges(&g, &lab);
        assert!(b.is_empty());
        assert_eq!(b.num_nodes(), 0);
    }

    fn arb_labeled_graph() -> impl Strategy<Value = (Graph, Vec<usize>)> {
        (2usize..12).prop_flat_map(|n| {
            (
                proptest::collection::vec((0..n, 0..n), 0..30),
                proptest::collection::vec(0usize..4, n),
            )
                .prop_map(move |(edges, labels)| (Graph::new(n, edges).unwrap(), labels))
        })
    }

    proptest! {
        #[test]
        fn masks_and_boundary_partition_edges((g, labels) in arb_labeled_graph()) {
            let lab = CommunityLabeling::from_labels(&g, &labels).unwrap();
            let b = boundary_edges(&g, &lab);
            let masked: usize = (0..lab.num_communities)
                .map(|c| community_mask(&g, &lab, c).unwrap().graph.num_edges())
                .sum();
            prop_assert_eq!(masked + b.boundary_edges.len(), g.num_edges());
            for &(u, v) in &b.boundary_edges {
                prop_assert_ne!(lab.labels[u], lab.labels[v]);
            }
            prop_assert!(b.num_nodes() <= 2 * b.boundary_edges.len());
        }

        #[test]
        fn relabeling_communities_keeps_boundary((g, labels) in arb_labeled_graph()) {
            let lab = CommunityLabeling::from_labels(&g, &labels).unwrap();
            // reverse the label order: a permutation of community ids
            let flipped: Vec<usize> = labels.iter().map(|&l| 10 - l).collect();
            let lab2 = CommunityLabeling::from_labels(&g, &flipped).unwrap();
            let a = boundary_edges(&g, &lab);
            let b = boundary_edges(&g, &lab2);
            prop_assert_eq!(&a.boundary_edges, &b.boundary_edges);
            prop_assert_eq!(
                a.boundary_nodes().collect::<Vec<_>>(),
                b.boundary_nodes().collect::<Vec<_>>()
            );
        }
    }
}
