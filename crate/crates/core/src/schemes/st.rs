use crate::enumerate::{bfs_tree, edge_subgraph_adjacency};
use crate::graph::{Graph, LabeledGraph, NodeId};
use crate::languages::{adjlist_targets, pointer_target, LanguageId};
use crate::pls::{BitReader, BitWriter, Certificate, LocalView, NeighborView, Params, ProveError, Scheme};

use super::{adjlist_symmetric, adjlist_within_neighbors, ensure_member, lists, pointer_within_neighbors, Pairwise};

/// Claimed root, parent (the node itself at the root), and hop distance to
/// the root.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StCert {
    pub root: NodeId,
    pub parent: NodeId,
    pub dist: u64,
}

impl StCert {
    pub fn root_at(id: NodeId) -> StCert {
        StCert {
            root: id,
            parent: id,
            dist: 0,
        }
    }

    pub fn bits(id_width: usize) -> usize {
        3 * id_width
    }

    pub fn write(&self, w: &mut BitWriter, id_width: usize) {
        w.uint(self.root.0, id_width);
        w.uint(self.parent.0, id_width);
        w.uint(self.dist, id_width);
    }

    pub fn read(r: &mut BitReader<'_>, id_width: usize) -> Option<StCert> {
        Some(StCert {
            root: NodeId(r.uint(id_width)?),
            parent: NodeId(r.uint(id_width)?),
            dist: r.uint(id_width)?,
        })
    }

    pub fn encode(&self, id_width: usize) -> Certificate {
        let mut w = BitWriter::new();
        self.write(&mut w, id_width);
        w.finish()
    }

    pub fn decode(bits: &Certificate, id_width: usize) -> Option<StCert> {
        let mut r = BitReader::new(bits);
        let c = StCert::read(&mut r, id_width)?;
        r.at_end().then_some(c)
    }

    /// `w` is the parent named by `self`, and its distance is one less.
    pub fn parent_step_ok(&self, w: NodeId, wc: &StCert) -> bool {
        w != self.parent || wc.dist + 1 == self.dist
    }
}

/// Certificates of the tree `adj` (index adjacency) rooted at `root`.
pub fn tree_certs(g: &Graph, adj: &[Vec<usize>], root: usize) -> Vec<StCert> {
    let (parent, dist) = bfs_tree(adj, root);
    (0..g.n())
        .map(|i| StCert {
            root: g.id(root),
            parent: g.id(parent[i].unwrap_or(i)),
            dist: dist[i] as u64,
        })
        .collect()
}

/// Spanning trees given as symmetric adjacency lists; certificates name a
/// root, a parent, and a distance.
#[derive(Clone, Copy, Debug, Default)]
pub struct StLScheme;

impl Pairwise for StLScheme {
    type Cert = StCert;

    fn node_ok(&self, view: &LocalView<'_, StCert>, c: &StCert) -> bool {
        if !adjlist_within_neighbors(view) || !adjlist_symmetric(view) {
            return false;
        }
        let me = view.me.id;
        if c.root == me {
            c.parent == me && c.dist == 0
        } else {
            c.parent != me && view.is_neighbor(c.parent) && lists(view.me.label, c.parent) && c.dist >= 1
        }
    }

    fn pair_ok(&self, view: &LocalView<'_, StCert>, c: &StCert, w: &NeighborView<'_, StCert>) -> bool {
        let me = view.me.id;
        let mine = lists(view.me.label, w.id);
        let Some(wc) = w.cert else {
            return false;
        };
        if wc.root != c.root {
            return false;
        }
        if c.root != me && w.id == c.parent {
            return c.parent_step_ok(w.id, wc);
        }
        !mine || (wc.dist == c.dist + 1 && wc.parent == me)
    }
}

impl Scheme for StLScheme {
    type Cert = StCert;

    fn name(&self) -> String {
        "st".into()
    }

    fn language(&self) -> LanguageId {
        LanguageId::StL
    }

    fn prove(&self, inst: &LabeledGraph) -> Result<Vec<StCert>, ProveError> {
        ensure_member(LanguageId::StL, inst)?;
        let g = inst.graph();
        let adj: Vec<Vec<usize>> = (0..g.n())
            .map(|i| adjlist_targets(g, i, inst.label(i)).expect("members are well-formed"))
            .collect();
        Ok(tree_certs(g, &adj, 0))
    }

    fn verify(&self, view: &LocalView<'_, StCert>) -> bool {
        self.verify_all(view)
    }

    fn rejects_early(&self, view: &LocalView<'_, StCert>) -> bool {
        self.rejects_with_partial(view)
    }

    fn encode(&self, c: &StCert, params: &Params) -> Certificate {
        c.encode(params.id_width)
    }

    fn decode(&self, bits: &Certificate, params: &Params) -> Option<StCert> {
        StCert::decode(bits, params.id_width)
    }

    fn size_bound(&self, params: &Params) -> Option<usize> {
        Some(StCert::bits(params.id_width))
    }

    fn filler(&self, inst: &LabeledGraph, i: usize) -> StCert {
        StCert::root_at(inst.graph().id(i))
    }
}

/// Spanning trees given as parent pointers, certified like adjacency-list
/// trees with the pointer as the parent.
#[derive(Clone, Copy, Debug, Default)]
pub struct StPScheme;

impl Pairwise for StPScheme {
    type Cert = StCert;

    fn node_ok(&self, view: &LocalView<'_, StCert>, c: &StCert) -> bool {
        let me = view.me.id;
        match pointer_within_neighbors(view) {
            None => false,
            Some(None) => c.root == me && c.parent == me && c.dist == 0,
            Some(Some(t)) => c.parent == t && c.dist >= 1,
        }
    }

    fn pair_ok(&self, _view: &LocalView<'_, StCert>, c: &StCert, w: &NeighborView<'_, StCert>) -> bool {
        w.cert.is_some_and(|wc| wc.root == c.root && c.parent_step_ok(w.id, wc))
    }
}

impl Scheme for StPScheme {
    type Cert = StCert;

    fn name(&self) -> String {
        "stp".into()
    }

    fn language(&self) -> LanguageId {
        LanguageId::StP
    }

    fn prove(&self, inst: &LabeledGraph) -> Result<Vec<StCert>, ProveError> {
        ensure_member(LanguageId::StP, inst)?;
        let g = inst.graph();
        let parent: Vec<Option<usize>> = (0..g.n())
            .map(|i| pointer_target(g, i, inst.label(i)).expect("members are well-formed"))
            .collect();
        let root = parent.iter().position(Option::is_none).expect("members have one null pointer");
        let edges: Vec<usize> = (0..g.n())
            .filter_map(|i| parent[i].map(|p| g.edge_position(i, p).expect("pointers follow edges")))
            .collect();
        let adj = edge_subgraph_adjacency(g, &edges);
        Ok(tree_certs(g, &adj, root))
    }

    fn verify(&self, view: &LocalView<'_, StCert>) -> bool {
        self.verify_all(view)
    }

    fn rejects_early(&self, view: &LocalView<'_, StCert>) -> bool {
        self.rejects_with_partial(view)
    }

    fn encode(&self, c: &StCert, params: &Params) -> Certificate {
        c.encode(params.id_width)
    }

    fn decode(&self, bits: &Certificate, params: &Params) -> Option<StCert> {
        StCert::decode(bits, params.id_width)
    }

    fn size_bound(&self, params: &Params) -> Option<usize> {
        Some(StCert::bits(params.id_width))
    }

    fn filler(&self, inst: &LabeledGraph, i: usize) -> StCert {
        StCert::root_at(inst.graph().id(i))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::{all_connected_graphs, spanning_trees};
    use crate::graph::{Label, LabelKind};
    use crate::languages::{adjlist_labels, pointer_labels};
    use crate::pls::{check_completeness, run_typed};
    use crate::Budget;
    use std::sync::Arc;

    fn adj_instance(g: &Arc<Graph>, edges: &[usize]) -> LabeledGraph {
        LabeledGraph::new(g.clone(), LabelKind::Adjlist, adjlist_labels(g, edges)).unwrap()
    }

    #[test]
    fn complete_on_every_spanning_tree_up_to_five_nodes() {
        let mut corpus = Vec::new();
        let mut ptr_corpus = Vec::new();
        for n in 1..=5 {
            for g in all_connected_graphs(n) {
                let trees = spanning_trees(&g, &mut Budget::unlimited().meter()).unwrap();
                for t in trees {
                    corpus.push(adj_instance(&g, &t));
                    for root in 0..n {
                        let labels = pointer_labels(&g, &t, root);
                        ptr_corpus.push(LabeledGraph::new(g.clone(), LabelKind::Pointer, labels).unwrap());
                    }
                }
            }
        }
        assert!(check_completeness(&StLScheme, LanguageId::StL, &corpus).unwrap().is_clean());
        assert!(check_completeness(&StPScheme, LanguageId::StP, &ptr_corpus).unwrap().is_clean());
    }

    #[test]
    fn prover_roots_at_minimum_id() {
        let g = Arc::new(Graph::from_edges(&[7, 3, 9], &[(7, 3), (3, 9)]).unwrap());
        let inst = adj_instance(&g, &[0, 1]);
        let certs = StLScheme.prove(&inst).unwrap();
        assert!(certs.iter().all(|c| c.root == NodeId(3)));
        assert_eq!(certs[g.index_of(NodeId(9)).unwrap()].dist, 1);
    }

    #[test]
    fn two_root_forest_is_rejected_across_the_cut() {
        // path 1-2-3-4 labeled as the forest {12},{34}, each part rooted at its min id
        let g = Arc::new(Graph::from_edges(&[1, 2, 3, 4], &[(1, 2), (2, 3), (3, 4)]).unwrap());
        let inst = adj_instance(&g, &[0, 2]);
        let certs = vec![
            StCert::root_at(NodeId(1)),
            StCert { root: NodeId(1), parent: NodeId(1), dist: 1 },
            StCert::root_at(NodeId(3)),
            StCert { root: NodeId(3), parent: NodeId(3), dist: 1 },
        ];
        let v = run_typed(&StLScheme, &inst, &certs);
        assert_eq!(v.accepted, vec![true, false, false, true]);
    }

    #[test]
    fn corrupted_distance_is_caught_near_the_corruption() {
        let g = Arc::new(Graph::from_edges(&[1, 2, 3, 4], &[(1, 2), (2, 3), (3, 4), (1, 4)]).unwrap());
        let inst = adj_instance(&g, &[0, 1, 2]);
        let honest = StLScheme.prove(&inst).unwrap();
        for i in 0..4 {
            let mut certs = honest.clone();
            certs[i].dist += 1;
            let v = run_typed(&StLScheme, &inst, &certs);
            let parent = g.index_of(honest[i].parent).unwrap();
            assert!(!v.accepted[i] || !v.accepted[parent]);
        }
    }

    #[test]
    fn parent_outside_the_label_is_rejected() {
        // triangle labeled with the single edge {2,3}: node 1 cannot hang off 2 without a labeled edge
        let g = Arc::new(Graph::from_edges(&[1, 2, 3], &[(1, 2), (2, 3), (1, 3)]).unwrap());
        let labels = vec![Label::adjlist([]), Label::adjlist([3]), Label::adjlist([2])];
        let inst = LabeledGraph::new(g, LabelKind::Adjlist, labels).unwrap();
        let certs = vec![
            StCert { root: NodeId(2), parent: NodeId(2), dist: 1 },
            StCert::root_at(NodeId(2)),
            StCert { root: NodeId(2), parent: NodeId(2), dist: 1 },
        ];
        let v = run_typed(&StLScheme, &inst, &certs);
        assert_eq!(v.accepted, vec![false, true, true]);
    }
}
