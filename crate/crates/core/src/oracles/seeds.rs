//! Adversarial starting assignments for the searches: stale or nearby
//! honest certificates, and certificates transferred from universal ones.

use crate::budget::Budget;
use crate::enumerate::RollbackDsu;
use crate::graph::LabeledGraph;
use crate::languages::{adjlist_targets, nearest_member, LanguageId};
use crate::mst::{run_certificates, MstCert, MstScheme};
use crate::pls::{run_typed, Scheme};
use crate::schemes::{StCert, StLScheme, UniversalCert};

use super::CorpusItem;

/// Edges listed at both endpoints, if they form a spanning tree.
pub fn labeled_spanning_tree(inst: &LabeledGraph) -> Option<Vec<usize>> {
    let g = inst.graph();
    let listed = |u: usize, w: usize| adjlist_targets(g, u, inst.label(u)).is_some_and(|t| t.contains(&w));
    let edges: Vec<usize> = (0..g.edge_count())
        .filter(|&k| {
            let (a, b) = g.edges()[k];
            listed(a, b) && listed(b, a)
        })
        .collect();
    let mut dsu = RollbackDsu::new(g.n());
    let spanning = edges.len() + 1 == g.n() && edges.iter().all(|&k| dsu.union(g.edges()[k].0, g.edges()[k].1));
    spanning.then_some(edges)
}

/// Prover certificates of the labeling the item was corrupted from and of
/// a nearest spanning tree.
pub fn st_seeds(item: &CorpusItem, budget: Budget) -> Vec<Vec<StCert>> {
    let mut seeds = Vec::new();
    if let Some(origin) = &item.origin {
        seeds.extend(StLScheme.prove(origin).ok());
    }
    if let Ok((_, near)) = nearest_member(LanguageId::StL, &item.instance, budget) {
        let member = item.instance.relabel(near).expect("nearest labels fit the graph");
        seeds.extend(StLScheme.prove(&member).ok());
    }
    seeds
}

/// The honest certificates of the minimum spanning tree and, when the
/// labels describe some other spanning tree, a run that certifies that tree
/// as if it were minimal and the honest run with that tree as the final
/// tree.
pub fn mst_seeds(item: &CorpusItem) -> Vec<Vec<MstCert>> {
    let inst = &item.instance;
    let g = inst.graph();
    let mut seeds = Vec::new();
    if let Some(origin) = &item.origin {
        seeds.extend(MstScheme.prove(origin).ok());
    }
    if let Some(tree) = labeled_spanning_tree(inst) {
        let all: Vec<usize> = (0..g.edge_count()).collect();
        seeds.push(run_certificates(g, &tree, &tree));
        seeds.push(run_certificates(g, &all, &tree));
    }
    seeds
}

/// Certificates for `scheme` built from a universal assignment: nodes that
/// accept the universal certificates, and their neighbors, get the prover's
/// certificates for the instance their accepting description shows; all
/// other nodes get the scheme's filler. Never rejects at a node that
/// accepted the universal assignment when the scheme only reads labels and
/// certificates of the closed neighborhood.
pub fn transfer_from_universal<S: Scheme>(
    scheme: &S,
    lang: LanguageId,
    inst: &LabeledGraph,
    universal: &[UniversalCert],
) -> Vec<S::Cert> {
    let g = inst.graph();
    let accepted = run_typed(&crate::schemes::UniversalScheme::new(lang), inst, universal).accepted;
    let mut source: Vec<Option<usize>> = vec![None; g.n()];
    for u in 0..g.n() {
        if accepted[u] {
            source[u] = Some(u);
            for &w in g.neighbors(u) {
                source[w].get_or_insert(u);
            }
        }
    }
    (0..g.n())
        .map(|u| {
            source[u]
                .and_then(|s| {
                    let member = universal[s].0.to_instance(lang)?;
                    let certs = scheme.prove(&member).ok()?;
                    let i = member.graph().index_of(g.id(u))?;
                    Some(certs[i].clone())
                })
                .unwrap_or_else(|| scheme.filler(inst, u))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracles::{mst_corruption_corpus, nonmember_corpus, universal_space, SearchConfig};
    use crate::schemes::{AcyclicScheme, UniversalScheme};

    #[test]
    fn transferred_certificates_reject_no_more_often() {
        let corpus = nonmember_corpus(LanguageId::Acyclic, 3, Budget::default()).unwrap();
        for item in &corpus {
            let space = universal_space(&item.instance, LanguageId::Acyclic, Budget::default()).unwrap();
            let u = crate::oracles::min_rejections(
                &UniversalScheme::new(LanguageId::Acyclic),
                &item.instance,
                &space,
                &[],
                &SearchConfig::default(),
            )
            .unwrap();
            let certs = transfer_from_universal(&AcyclicScheme, LanguageId::Acyclic, &item.instance, &u.witness);
            assert!(run_typed(&AcyclicScheme, &item.instance, &certs).k <= u.k, "{}", item.id);
        }
    }

    #[test]
    fn mst_seeds_run_on_every_corruption() {
        for item in mst_corruption_corpus(2, 30, 6).unwrap() {
            for s in mst_seeds(&item) {
                assert_eq!(s.len(), item.instance.n());
                assert!(run_typed(&MstScheme, &item.instance, &s).k >= 1);
            }
        }
    }
}
