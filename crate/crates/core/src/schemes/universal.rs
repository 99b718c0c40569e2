use std::sync::Arc;

use crate::graph::{Graph, Label, LabeledGraph, NodeId, Weight};
use crate::languages::{decide_membership, LanguageId};
use crate::pls::{
    decode_label, encode_label, BitReader, BitWriter, Certificate, LocalView, NeighborView, Params, ProveError,
    Scheme,
};

use super::{ensure_member, Pairwise};

/// A full description of a labeled graph: ids in table order, the upper
/// triangle of the adjacency matrix, one label per id, and optionally one
/// weight per present edge (row-major order).
#[derive(Debug)]
pub struct Description {
    pub ids: Vec<NodeId>,
    pub adj: Vec<bool>,
    pub labels: Vec<Label>,
    pub weights: Option<Vec<Weight>>,
    member: bool,
}

fn pair_index(n: usize, a: usize, b: usize) -> usize {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    a * (2 * n - a - 1) / 2 + (b - a - 1)
}

impl Description {
    pub fn new(
        lang: LanguageId,
        ids: Vec<NodeId>,
        adj: Vec<bool>,
        labels: Vec<Label>,
        weights: Option<Vec<Weight>>,
    ) -> Description {
        let mut d = Description {
            ids,
            adj,
            labels,
            weights,
            member: false,
        };
        d.member = d.to_instance(lang).is_some_and(|inst| decide_membership(lang, &inst).unwrap_or(false));
        d
    }

    pub fn of(inst: &LabeledGraph, lang: LanguageId) -> Description {
        let g = inst.graph();
        let n = g.n();
        let mut adj = vec![false; n * n.saturating_sub(1) / 2];
        let mut weights = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                if g.has_edge(a, b) {
                    adj[pair_index(n, a, b)] = true;
                    if let Some(w) = g.weight(a, b) {
                        weights.push(*w);
                    }
                }
            }
        }
        let weights = g.is_weighted().then_some(weights);
        Description::new(lang, g.ids().to_vec(), adj, inst.labels().to_vec(), weights)
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a != b && self.adj[pair_index(self.n(), a, b)]
    }

    /// Weight of the edge `{a, b}`, if described.
    pub fn weight(&self, a: usize, b: usize) -> Option<&Weight> {
        let ws = self.weights.as_ref()?;
        if !self.has_edge(a, b) {
            return None;
        }
        let k = pair_index(self.n(), a, b);
        let rank = self.adj[..k].iter().filter(|x| **x).count();
        ws.get(rank)
    }

    /// Whether the described labeled graph is valid and in the language the
    /// description was built for.
    pub fn is_member(&self) -> bool {
        self.member
    }

    pub fn to_instance(&self, lang: LanguageId) -> Option<LabeledGraph> {
        let n = self.n();
        if self.labels.len() != n || self.adj.len() != n * n.saturating_sub(1) / 2 {
            return None;
        }
        let present = self.adj.iter().filter(|x| **x).count();
        if self.weights.as_ref().is_some_and(|w| w.len() != present) {
            return None;
        }
        let mut edges = Vec::with_capacity(present);
        let mut next = 0;
        for a in 0..n {
            for b in a + 1..n {
                if self.adj[pair_index(n, a, b)] {
                    let w = self.weights.as_ref().map(|ws| ws[next]);
                    next += 1;
                    edges.push((self.ids[a], self.ids[b], w));
                }
            }
        }
        let g = Graph::new(self.ids.iter().copied(), edges).ok()?;
        let labels = (0..g.n())
            .map(|i| {
                let pos = self.ids.iter().position(|id| *id == g.id(i)).expect("same id set");
                self.labels[pos].clone()
            })
            .collect();
        LabeledGraph::new(Arc::new(g), lang.label_kind(), labels).ok()
    }
}

impl PartialEq for Description {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.adj == other.adj && self.labels == other.labels && self.weights == other.weights
    }
}

/// Shared description; every node of an honest instance holds the same one.
#[derive(Clone, Debug)]
pub struct UniversalCert(pub Arc<Description>);

impl UniversalCert {
    pub fn of(inst: &LabeledGraph, lang: LanguageId) -> UniversalCert {
        UniversalCert(Arc::new(Description::of(inst, lang)))
    }
}

impl PartialEq for UniversalCert {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || *self.0 == *other.0
    }
}

/// Every node receives the whole instance and checks that its neighborhood
/// (ids, labels, edge weights) agrees with it and that the described instance is in the language.
#[derive(Clone, Copy, Debug)]
pub struct UniversalScheme {
    pub lang: LanguageId,
}

impl UniversalScheme {
    pub fn new(lang: LanguageId) -> Self {
        UniversalScheme { lang }
    }
}

impl Pairwise for UniversalScheme {
    type Cert = UniversalCert;

    fn node_ok(&self, view: &LocalView<'_, UniversalCert>, c: &UniversalCert) -> bool {
        let d = &*c.0;
        if !d.is_member() {
            return false;
        }
        let Some(i) = d.ids.iter().position(|id| *id == view.me.id) else {
            return false;
        };
        if d.labels[i] != *view.me.label {
            return false;
        }
        let row = (0..d.n()).filter(|&j| d.has_edge(i, j)).count();
        row == view.neighbors.len()
            && view.neighbors.iter().all(|w| {
                d.ids
                    .iter()
                    .position(|id| *id == w.id)
                    .is_some_and(|j| d.has_edge(i, j) && d.labels[j] == *w.label && d.weight(i, j) == w.weight)
            })
    }

    fn pair_ok(
        &self,
        _view: &LocalView<'_, UniversalCert>,
        c: &UniversalCert,
        w: &NeighborView<'_, UniversalCert>,
    ) -> bool {
        w.cert == Some(c)
    }
}

impl Scheme for UniversalScheme {
    type Cert = UniversalCert;

    fn name(&self) -> String {
        "universal".into()
    }

    fn language(&self) -> LanguageId {
        self.lang
    }

    fn prove(&self, inst: &LabeledGraph) -> Result<Vec<UniversalCert>, ProveError> {
        ensure_member(self.lang, inst)?;
        Ok(vec![UniversalCert::of(inst, self.lang); inst.n()])
    }

    fn verify(&self, view: &LocalView<'_, UniversalCert>) -> bool {
        self.verify_all(view)
    }

    fn rejects_early(&self, view: &LocalView<'_, UniversalCert>) -> bool {
        self.rejects_with_partial(view)
    }

    /// 16-bit node count, 8-bit id width `w`, the id table (`w` bits each),
    /// the upper adjacency triangle row by row, the labels, then a flag bit
    /// and, if set, each edge weight as a signed 64-bit numerator and 64-bit
    /// denominator.
    fn encode(&self, c: &UniversalCert, _params: &Params) -> Certificate {
        let d = &*c.0;
        let width = d.ids.iter().map(|id| crate::pls::ceil_log2(id.0 + 1)).max().unwrap_or(0);
        let mut w = BitWriter::new();
        w.uint(d.n() as u64, 16);
        w.uint(width as u64, 8);
        for id in &d.ids {
            w.uint(id.0, width);
        }
        for b in &d.adj {
            w.bit(*b);
        }
        for l in &d.labels {
            encode_label(&mut w, l, width);
        }
        w.bit(d.weights.is_some());
        for x in d.weights.iter().flatten() {
            w.uint(*x.numer() as u64, 64);
            w.uint(*x.denom() as u64, 64);
        }
        w.finish()
    }

    fn decode(&self, bits: &Certificate, _params: &Params) -> Option<UniversalCert> {
        let mut r = BitReader::new(bits);
        let n = r.uint(16)? as usize;
        let width = r.uint(8)? as usize;
        let ids = (0..n).map(|_| r.uint(width).map(NodeId)).collect::<Option<Vec<_>>>()?;
        let adj = (0..n * n.saturating_sub(1) / 2)
            .map(|_| r.bit())
            .collect::<Option<Vec<_>>>()?;
        let labels = (0..n)
            .map(|_| decode_label(&mut r, width))
            .collect::<Option<Vec<_>>>()?;
        let weights = if r.bit()? {
            let present = adj.iter().filter(|x| **x).count();
            let mut ws = Vec::with_capacity(present);
            for _ in 0..present {
                let p = r.uint(64)? as i64;
                let q = r.uint(64)? as i64;
                if q <= 0 {
                    return None;
                }
                ws.push(Weight::new(p, q));
            }
            Some(ws)
        } else {
            None
        };
        r.at_end()
            .then(|| UniversalCert(Arc::new(Description::new(self.lang, ids, adj, labels, weights))))
    }

    fn size_bound(&self, _params: &Params) -> Option<usize> {
        None
    }

    fn filler(&self, inst: &LabeledGraph, _i: usize) -> UniversalCert {
        UniversalCert::of(inst, self.lang)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumerate::all_connected_graphs;
    use crate::graph::LabelKind;
    use crate::languages::enumerate_members;
    use crate::pls::{check_completeness, prove_map, run_typed, run_verifier};
    use crate::Budget;

    #[test]
    fn complete_for_every_language_on_small_graphs() {
        for lang in LanguageId::ALL {
            if lang == LanguageId::MstL {
                continue;
            }
            let scheme = UniversalScheme::new(lang);
            let mut corpus = Vec::new();
            for n in 1..=4 {
                for g in all_connected_graphs(n) {
                    for labels in enumerate_members(lang, &g, Budget::default()).unwrap() {
                        corpus.push(LabeledGraph::new(g.clone(), lang.label_kind(), labels).unwrap());
                    }
                }
            }
            assert!(check_completeness(&scheme, lang, &corpus).unwrap().is_clean(), "{lang}");
        }
    }

    #[test]
    fn weighted_description_round_trips() {
        let g = Graph::new(
            [2, 5, 9].map(NodeId),
            [
                (NodeId(2), NodeId(5), Some(Weight::new(3, 2))),
                (NodeId(5), NodeId(9), Some(Weight::from_integer(1))),
                (NodeId(2), NodeId(9), Some(Weight::from_integer(4))),
            ],
        )
        .unwrap();
        let inst = LabeledGraph::new(
            Arc::new(g),
            LabelKind::Adjlist,
            vec![Label::adjlist([5]), Label::adjlist([2, 9]), Label::adjlist([5])],
        )
        .unwrap();
        let scheme = UniversalScheme::new(LanguageId::MstL);
        let certs = prove_map(&scheme, &inst).unwrap();
        assert_eq!(run_verifier(&scheme, &inst, &certs).unwrap().k, 0);
        let params = Params::of(&inst);
        let c = &scheme.prove(&inst).unwrap()[0];
        assert_eq!(scheme.decode(&scheme.encode(c, &params), &params).as_ref(), Some(c));
    }

    #[test]
    fn copied_description_of_a_different_labeling_is_caught_around_the_changed_node() {
        let g = Arc::new(Graph::from_edges(&[1, 2, 3], &[(1, 2), (2, 3)]).unwrap());
        let legal = LabeledGraph::new(g.clone(), LabelKind::Bool, vec![Label::Bool(true), Label::Bool(false), Label::Bool(false)]).unwrap();
        let two = legal.with_label(2, Label::Bool(true)).unwrap();
        let scheme = UniversalScheme::new(LanguageId::Leader);
        let certs = scheme.prove(&legal).unwrap();
        let v = run_typed(&scheme, &two, &certs);
        // node 3 holds the wrong label, node 2 sees it
        assert_eq!(v.accepted, vec![true, false, false]);
    }
}
