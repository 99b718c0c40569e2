//! Exhaustive search for pastings of two legal labelings that end up far
//! from the language relative to the pasting boundary.

use std::collections::HashMap;
use std::sync::Arc;

use super::OracleError;
use crate::budget::Budget;
use crate::enumerate::connected_graph_classes;
use crate::graph::{Graph, Label, LabeledGraph, NodeId, Weight};
use crate::languages::{edit_distance_to_language, enumerate_members, LanguageId};

/// A labeling `ell` of `g`, a labeling `ell_prime` of `g_prime`, both legal,
/// and a common subgraph `h` (induced by `h_nodes` in `g`) such that taking
/// `ell_prime` on `h` and `ell` elsewhere is far from the language.
#[derive(Clone, Debug)]
pub struct ProbeWitness {
    pub g: LabeledGraph,
    pub g_prime: LabeledGraph,
    pub h_nodes: Vec<NodeId>,
    pub pasted: LabeledGraph,
    /// Nodes of `h` with an edge outside `h` in `g` or in `g_prime`.
    pub boundary: usize,
    pub distance: usize,
}

#[derive(Clone, Debug)]
pub struct ProbeOutcome {
    pub language: LanguageId,
    pub max_n: usize,
    /// First witness per candidate parameter, in the order given.
    pub results: Vec<(u32, Option<ProbeWitness>)>,
    pub pastes_checked: u64,
}

fn weighted_if_needed(lang: LanguageId, g: Arc<Graph>) -> Arc<Graph> {
    if lang == LanguageId::MstL {
        Arc::new(crate::enumerate::reweighted(&g, |k| Weight::from_integer(k as i64 + 1)))
    } else {
        g
    }
}

/// Subgraph of `g` induced by the nodes in `mask`, if connected.
fn induced(g: &Graph, mask: u64) -> Option<Arc<Graph>> {
    let inside = |i: usize| mask >> i & 1 == 1;
    let nodes = (0..g.n()).filter(|&i| inside(i)).map(|i| g.id(i));
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .filter(|(_, &(a, b))| inside(a) && inside(b))
        .map(|(k, &(a, b))| (g.id(a), g.id(b), g.weight_of_edge(k).cloned()));
    Graph::new(nodes, edges).ok().map(Arc::new)
}

/// Searches connected graphs `G` with at most `max_n` nodes (one per
/// isomorphism class), node subsets `S` inducing `H = G[S]`, and
/// `G' in {G, H}`, for legal `ell` on `G` and `ell'` on `G'` whose pasting
/// is at distance more than `beta * |boundary|`. Pastings whose boundary
/// already makes the bound at least `n` are skipped, since no labeling is
/// farther than `n`. Stops once every candidate has a witness.
pub fn strong_local_stability_probe(
    lang: LanguageId,
    max_n: usize,
    betas: &[u32],
    budget: Budget,
) -> Result<ProbeOutcome, OracleError> {
    let mut results: Vec<(u32, Option<ProbeWitness>)> = betas.iter().map(|&b| (b, None)).collect();
    let mut pastes_checked = 0u64;
    'sizes: for n in 1..=max_n {
        for g in connected_graph_classes(n) {
            let g = weighted_if_needed(lang, g);
            let members_g = enumerate_members(lang, &g, budget)?;
            let mut distances: HashMap<Vec<Label>, usize> = HashMap::new();
            for mask in 1u64..(1 << n) {
                let inside = |i: usize| mask >> i & 1 == 1;
                let boundary_g = (0..n)
                    .filter(|&i| inside(i) && g.neighbors(i).iter().any(|&j| !inside(j)))
                    .count();
                let h = induced(&g, mask);
                // G' = G keeps the same boundary; G' = H adds none.
                let mut options: Vec<(Arc<Graph>, Vec<Vec<Label>>)> = vec![(g.clone(), members_g.clone())];
                if let Some(h) = h.filter(|h| h.n() < n) {
                    let members_h = enumerate_members(lang, &h, budget)?;
                    options.push((h, members_h));
                }
                let boundary = boundary_g;
                let open: Vec<usize> = (0..results.len())
                    .filter(|&r| results[r].1.is_none() && (results[r].0 as usize) * boundary < n)
                    .collect();
                if open.is_empty() || boundary == 0 {
                    // a zero boundary means S = V(G): the paste is `ell'` itself
                    continue;
                }
                for (gp, members_p) in &options {
                    for ell in &members_g {
                        for ell_p in members_p {
                            pastes_checked += 1;
                            let labels: Vec<Label> = (0..n)
                                .map(|i| {
                                    if inside(i) {
                                        let j = gp.index_of(g.id(i)).expect("H is inside G'");
                                        ell_p[j].clone()
                                    } else {
                                        ell[i].clone()
                                    }
                                })
                                .collect();
                            let distance = match distances.get(&labels) {
                                Some(&d) => d,
                                None => {
                                    let inst = LabeledGraph::new(g.clone(), lang.label_kind(), labels.clone())
                                        .expect("pasted labels fit G");
                                    let d = edit_distance_to_language(lang, &inst, budget)?;
                                    distances.insert(labels.clone(), d);
                                    d
                                }
                            };
                            for &r in &open {
                                let beta = results[r].0 as usize;
                                if results[r].1.is_none() && distance > beta * boundary {
                                    let lg = |graph: &Arc<Graph>, l: &[Label]| {
                                        LabeledGraph::new(graph.clone(), lang.label_kind(), l.to_vec())
                                            .expect("members fit their graph")
                                    };
                                    results[r].1 = Some(ProbeWitness {
                                        g: lg(&g, ell),
                                        g_prime: lg(gp, ell_p),
                                        h_nodes: (0..n).filter(|&i| inside(i)).map(|i| g.id(i)).collect(),
                                        pasted: lg(&g, &labels),
                                        boundary,
                                        distance,
                                    });
                                }
                            }
                            if results.iter().all(|r| r.1.is_some()) {
                                break 'sizes;
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(ProbeOutcome {
        language: lang,
        max_n,
        results,
        pastes_checked,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn leader_pastes_stay_close() {
        let out = strong_local_stability_probe(LanguageId::Leader, 5, &[1, 2], Budget::default()).unwrap();
        assert!(out.results.iter().all(|(_, w)| w.is_none()));
        assert!(out.pastes_checked > 0);
    }

    #[test]
    fn regular_witnesses_are_genuinely_far() {
        let out = strong_local_stability_probe(LanguageId::Regular, 6, &[1], Budget::default()).unwrap();
        let w = out.results[0].1.as_ref().expect("a far pasting exists on six nodes");
        let d = edit_distance_to_language(LanguageId::Regular, &w.pasted, Budget::default()).unwrap();
        assert_eq!(d, w.distance);
        assert!(d > w.boundary);
    }
}
