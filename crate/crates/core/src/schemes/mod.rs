//! Concrete schemes: distance certificates for acyclic pointers, rooted
//! spanning-tree certificates for both tree encodings, the universal scheme
//! that hands every node the whole instance, and a wrapper that turns any
//! scheme into one with a single possible rejecting node.

mod acyclic;
mod st;
mod universal;
mod wrapper;

pub use acyclic::AcyclicScheme;
pub use st::{tree_certs, StCert, StLScheme, StPScheme};
pub use universal::{UniversalCert, UniversalScheme};
pub use wrapper::{WrappedCert, WrappedScheme};

use crate::graph::{Label, LabeledGraph, NodeId};
use crate::languages::{decide_membership, LanguageId};
use crate::pls::{LocalView, NeighborView, ProveError};

pub(crate) fn ensure_member(lang: LanguageId, inst: &LabeledGraph) -> Result<(), ProveError> {
    if decide_membership(lang, inst)? {
        Ok(())
    } else {
        Err(ProveError::NotMember(lang))
    }
}

/// Whether an adjlist label lists `id`. Other label kinds list nothing.
pub(crate) fn lists(label: &Label, id: NodeId) -> bool {
    label.as_adjlist().is_some_and(|s| s.contains(&id))
}

/// Adjlist label naming only neighbors in the view.
pub(crate) fn adjlist_within_neighbors<C>(view: &LocalView<'_, C>) -> bool {
    view.me
        .label
        .as_adjlist()
        .is_some_and(|s| s.iter().all(|id| view.is_neighbor(*id)))
}

/// Pointer label that is null or names a neighbor: `Some(target)`.
pub(crate) fn pointer_within_neighbors<C>(view: &LocalView<'_, C>) -> Option<Option<NodeId>> {
    match view.me.label.as_pointer()? {
        None => Some(None),
        Some(t) => view.is_neighbor(t).then_some(Some(t)),
    }
}

/// Verifiers that are a conjunction of a test on the node alone and one test
/// per incident edge. This is what makes early rejection during certificate
/// search sound.
/// Whether every neighbor lists this node exactly when this node lists it.
pub(crate) fn adjlist_symmetric<C>(view: &LocalView<'_, C>) -> bool {
    view.neighbors
        .iter()
        .all(|w| lists(view.me.label, w.id) == lists(w.label, view.me.id))
}

pub(crate) trait Pairwise {
    type Cert;

    fn node_ok(&self, view: &LocalView<'_, Self::Cert>, cert: &Self::Cert) -> bool;

    /// `w.cert` is `None` when the neighbor's certificate is undecodable.
    fn pair_ok(&self, view: &LocalView<'_, Self::Cert>, cert: &Self::Cert, w: &NeighborView<'_, Self::Cert>) -> bool;

    fn verify_all(&self, view: &LocalView<'_, Self::Cert>) -> bool {
        let Some(c) = view.me.cert else {
            return false;
        };
        self.node_ok(view, c) && view.neighbors.iter().all(|w| self.pair_ok(view, c, w))
    }

    fn rejects_with_partial(&self, view: &LocalView<'_, Self::Cert>) -> bool {
        let Some(c) = view.me.cert else {
            return false;
        };
        !self.node_ok(view, c)
            || view
                .neighbors
                .iter()
                .any(|w| w.cert.is_some() && !self.pair_ok(view, c, w))
    }
}
