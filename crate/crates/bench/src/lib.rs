//! Seeded benchmark instances.

use std::sync::Arc;

use plslab::enumerate::{random_connected_graph, with_random_weights, RollbackDsu};
use plslab::languages::{adjlist_labels, minimum_spanning_tree_by_enumeration};
use plslab::{Budget, Graph, LabelKind, LabeledGraph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(n: usize, seed: u64, extra: f64) -> (Graph, ChaCha8Rng) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (random_connected_graph(&mut rng, n, extra), rng)
}

/// A sparse random graph labeled with the spanning tree that keeps edges
/// greedily in edge order.
pub fn tree_member(n: usize, seed: u64) -> LabeledGraph {
    let (g, _) = graph(n, seed, 0.05);
    let mut dsu = RollbackDsu::new(g.n());
    let tree: Vec<usize> = (0..g.edge_count())
        .filter(|&k| dsu.union(g.edges()[k].0, g.edges()[k].1))
        .collect();
    let labels = adjlist_labels(&g, &tree);
    LabeledGraph::new(Arc::new(g), LabelKind::Adjlist, labels).expect("tree labels fit")
}

/// A random distinct-weight graph labeled with its minimum spanning tree.
pub fn mst_member(n: usize, seed: u64) -> LabeledGraph {
    let (g, mut rng) = graph(n, seed, 0.3);
    let g = Arc::new(with_random_weights(&mut rng, &g));
    let tree = minimum_spanning_tree_by_enumeration(&g, &mut Budget::unlimited().meter()).expect("weighted");
    LabeledGraph::new(g.clone(), LabelKind::Adjlist, adjlist_labels(&g, &tree)).expect("tree labels fit")
}
