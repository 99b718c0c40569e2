use crate::enumerate::graph_adjacency;
use crate::graph::LabeledGraph;
use crate::languages::LanguageId;
use crate::pls::{BitReader, BitWriter, Certificate, LocalView, Params, ProveError, Scheme};

use super::st::{tree_certs, StCert};

#[derive(Clone, Debug, PartialEq)]
pub struct WrappedCert<C> {
    pub inner: C,
    /// Spanning tree of the whole graph.
    pub tree: StCert,
    pub b: bool,
}

/// Adds a spanning tree and one boolean per node to an inner scheme, so that
/// nodes may pass an inner rejection up the tree instead of rejecting. Only
/// the tree root is then obliged to reject.
#[derive(Clone, Copy, Debug)]
pub struct WrappedScheme<S> {
    pub inner: S,
}

impl<S: Scheme> WrappedScheme<S> {
    pub fn new(inner: S) -> Self {
        WrappedScheme { inner }
    }

    fn tree_node_ok(view: &LocalView<'_, WrappedCert<S::Cert>>, t: &StCert) -> bool {
        let me = view.me.id;
        if t.root == me {
            t.parent == me && t.dist == 0
        } else {
            t.parent != me && view.is_neighbor(t.parent) && t.dist >= 1
        }
    }

    fn tree_pair_ok(t: &StCert, w: crate::graph::NodeId, wt: &StCert) -> bool {
        wt.root == t.root && t.parent_step_ok(w, wt)
    }

    fn inner_view<'a>(view: &LocalView<'a, WrappedCert<S::Cert>>) -> LocalView<'a, S::Cert> {
        view.map(|c| &c.inner)
    }
}

impl<S: Scheme> Scheme for WrappedScheme<S> {
    type Cert = WrappedCert<S::Cert>;

    fn name(&self) -> String {
        format!("wrapped-{}", self.inner.name())
    }

    fn language(&self) -> LanguageId {
        self.inner.language()
    }

    fn prove(&self, inst: &LabeledGraph) -> Result<Vec<Self::Cert>, ProveError> {
        let inner = self.inner.prove(inst)?;
        let g = inst.graph();
        let tree = tree_certs(g, &graph_adjacency(g), 0);
        Ok(inner
            .into_iter()
            .zip(tree)
            .map(|(inner, tree)| WrappedCert { inner, tree, b: true })
            .collect())
    }

    fn verify(&self, view: &LocalView<'_, Self::Cert>) -> bool {
        let Some(c) = view.me.cert else {
            return false;
        };
        if !Self::tree_node_ok(view, &c.tree) {
            return false;
        }
        let mut child_false = false;
        for w in &view.neighbors {
            let Some(wc) = w.cert else {
                return false;
            };
            if !Self::tree_pair_ok(&c.tree, w.id, &wc.tree) {
                return false;
            }
            if wc.tree.parent == view.me.id && w.id != c.tree.parent {
                child_false |= !wc.b;
            }
        }
        let inner_ok = self.inner.verify(&Self::inner_view(view));
        if c.tree.root == view.me.id || c.b {
            inner_ok && !child_false
        } else {
            !inner_ok || child_false
        }
    }

    fn rejects_early(&self, view: &LocalView<'_, Self::Cert>) -> bool {
        let Some(c) = view.me.cert else {
            return false;
        };
        if !Self::tree_node_ok(view, &c.tree) {
            return true;
        }
        let mut child_false = false;
        for w in &view.neighbors {
            if let Some(wc) = w.cert {
                if !Self::tree_pair_ok(&c.tree, w.id, &wc.tree) {
                    return true;
                }
                if wc.tree.parent == view.me.id && w.id != c.tree.parent {
                    child_false |= !wc.b;
                }
            }
        }
        let root = c.tree.root == view.me.id;
        (root || c.b) && (child_false || self.inner.rejects_early(&Self::inner_view(view)))
    }

    /// Inner encoding, then the tree certificate, then the boolean.
    fn encode(&self, c: &Self::Cert, params: &Params) -> Certificate {
        let mut w = BitWriter::new();
        w.append(&self.inner.encode(&c.inner, params));
        c.tree.write(&mut w, params.id_width);
        w.bit(c.b);
        w.finish()
    }

    fn decode(&self, bits: &Certificate, params: &Params) -> Option<Self::Cert> {
        let tail = StCert::bits(params.id_width) + 1;
        let split = bits.len().checked_sub(tail)?;
        let inner = self.inner.decode(
            &Certificate {
                bits: bits.bits[..split].to_bitvec(),
            },
            params,
        )?;
        let rest = Certificate {
            bits: bits.bits[split..].to_bitvec(),
        };
        let mut r = BitReader::new(&rest);
        let tree = StCert::read(&mut r, params.id_width)?;
        let b = r.bit()?;
        Some(WrappedCert { inner, tree, b })
    }

    fn size_bound(&self, params: &Params) -> Option<usize> {
        self.inner
            .size_bound(params)
            .map(|s| s + StCert::bits(params.id_width) + 1)
    }

    fn filler(&self, inst: &LabeledGraph, i: usize) -> Self::Cert {
        WrappedCert {
            inner: self.inner.filler(inst, i),
            tree: StCert::root_at(inst.graph().id(i)),
            b: true,
        }
    }
}
