use crate::graph::LabeledGraph;
use crate::languages::{pointer_target, LanguageId};
use crate::pls::{BitReader, BitWriter, Certificate, LocalView, NeighborView, Params, ProveError, Scheme};

use super::{ensure_member, pointer_within_neighbors, Pairwise};

/// Each node holds its hop distance to the null pointer ending its path.
#[derive(Clone, Copy, Debug, Default)]
pub struct AcyclicScheme;

impl Pairwise for AcyclicScheme {
    type Cert = u64;

    fn node_ok(&self, view: &LocalView<'_, u64>, d: &u64) -> bool {
        match pointer_within_neighbors(view) {
            None => false,
            Some(None) => *d == 0,
            Some(Some(_)) => *d >= 1,
        }
    }

    fn pair_ok(&self, view: &LocalView<'_, u64>, d: &u64, w: &NeighborView<'_, u64>) -> bool {
        if view.me.label.as_pointer() != Some(Some(w.id)) {
            return true;
        }
        w.cert.is_some_and(|wd| wd + 1 == *d)
    }
}

impl Scheme for AcyclicScheme {
    type Cert = u64;

    fn name(&self) -> String {
        "acyclic".into()
    }

    fn language(&self) -> LanguageId {
        LanguageId::Acyclic
    }

    fn prove(&self, inst: &LabeledGraph) -> Result<Vec<u64>, ProveError> {
        ensure_member(LanguageId::Acyclic, inst)?;
        let g = inst.graph();
        let next: Vec<Option<usize>> = (0..g.n())
            .map(|i| pointer_target(g, i, inst.label(i)).expect("members have well-formed pointers"))
            .collect();
        let mut dist: Vec<Option<u64>> = vec![None; g.n()];
        for start in 0..g.n() {
            let mut walk = Vec::new();
            let mut v = start;
            let base = loop {
                if let Some(d) = dist[v] {
                    break d;
                }
                walk.push(v);
                match next[v] {
                    Some(p) => v = p,
                    None => {
                        dist[walk.pop().expect("non-empty")] = Some(0);
                        break 0;
                    }
                }
            };
            for (k, &u) in walk.iter().rev().enumerate() {
                dist[u] = Some(base + k as u64 + 1);
            }
        }
        Ok(dist.into_iter().map(|d| d.expect("every node reached")).collect())
    }

    fn verify(&self, view: &LocalView<'_, u64>) -> bool {
        self.verify_all(view)
    }

    fn rejects_early(&self, view: &LocalView<'_, u64>) -> bool {
        self.rejects_with_partial(view)
    }

    fn encode(&self, d: &u64, params: &Params) -> Certificate {
        let mut w = BitWriter::new();
        w.uint(*d, params.id_width);
        w.finish()
    }

    fn decode(&self, bits: &Certificate, params: &Params) -> Option<u64> {
        let mut r = BitReader::new(bits);
        let d = r.uint(params.id_width)?;
        r.at_end().then_some(d)
    }

    fn size_bound(&self, params: &Params) -> Option<usize> {
        Some(params.id_width)
    }

    fn filler(&self, _inst: &LabeledGraph, _i: usize) -> u64 {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Graph, Label, LabelKind, NodeId};
    use crate::pls::{run_typed, run_verifier, prove_map};
    use std::sync::Arc;

    fn pointers(g: Graph, targets: &[Option<u64>]) -> LabeledGraph {
        let labels = targets.iter().map(|t| Label::Pointer(t.map(NodeId))).collect();
        LabeledGraph::new(Arc::new(g), LabelKind::Pointer, labels).unwrap()
    }

    #[test]
    fn star_into_center() {
        let g = Graph::from_edges(&[1, 2, 3, 4], &[(1, 2), (1, 3), (1, 4)]).unwrap();
        let inst = pointers(g, &[None, Some(1), Some(1), Some(1)]);
        assert_eq!(AcyclicScheme.prove(&inst).unwrap(), vec![0, 1, 1, 1]);
        let certs = prove_map(&AcyclicScheme, &inst).unwrap();
        assert_eq!(run_verifier(&AcyclicScheme, &inst, &certs).unwrap().k, 0);
    }

    #[test]
    fn every_certificate_on_a_directed_triangle_rejects_somewhere() {
        let g = Graph::from_edges(&[1, 2, 3], &[(1, 2), (2, 3), (1, 3)]).unwrap();
        let inst = pointers(g, &[Some(2), Some(3), Some(1)]);
        assert!(AcyclicScheme.prove(&inst).is_err());
        let mut best = usize::MAX;
        for code in 0..27u64 {
            let certs = vec![code % 3, code / 3 % 3, code / 9];
            let v = run_typed(&AcyclicScheme, &inst, &certs);
            // the predecessor of a maximum-distance node rejects
            let max = *certs.iter().max().unwrap();
            let top = certs.iter().position(|d| *d == max).unwrap();
            let pred = (top + 2) % 3;
            assert!(!v.accepted[pred]);
            best = best.min(v.k);
        }
        assert_eq!(best, 1);
    }

    #[test]
    fn undecodable_certificate_rejects() {
        let g = Graph::from_edges(&[1, 2], &[(1, 2)]).unwrap();
        let inst = pointers(g, &[None, Some(1)]);
        let mut certs = prove_map(&AcyclicScheme, &inst).unwrap();
        certs.certs.insert(NodeId(1), Certificate::parse("101").unwrap());
        let v = run_verifier(&AcyclicScheme, &inst, &certs).unwrap();
        assert_eq!(v.accepted, vec![false, false]);
    }
}
