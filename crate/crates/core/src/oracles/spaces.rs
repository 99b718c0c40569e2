//! Per-scheme certificate domains. Ids range over the ids present in the
//! instance, distances over `[0, n)`, booleans over both values, and
//! whole-instance descriptions over the members on the same graph.

use std::collections::HashSet;
use std::hash::Hash;

use super::{CertSpace, OracleError};
use crate::budget::Budget;
use crate::enumerate::{edge_subgraph_adjacency, spanning_trees};
use crate::graph::LabeledGraph;
use crate::languages::{enumerate_members, LanguageError, LanguageId};
use crate::mst::{run_certificates, MstCert};
use crate::schemes::{tree_certs, StCert, UniversalCert, WrappedCert};

fn distinct<T: Clone + Eq + Hash>(items: impl IntoIterator<Item = T>) -> Vec<T> {
    let mut seen = HashSet::new();
    items.into_iter().filter(|x| seen.insert(x.clone())).collect()
}

pub fn acyclic_space(inst: &LabeledGraph) -> CertSpace<u64> {
    let n = inst.n() as u64;
    CertSpace {
        domains: vec![(0..n).collect(); inst.n()],
    }
}

/// Every `(root, parent, dist)` with the parent the node itself or one of
/// its neighbors, in increasing order.
pub fn st_space(inst: &LabeledGraph) -> CertSpace<StCert> {
    let g = inst.graph();
    let n = g.n() as u64;
    let mut ids = g.ids().to_vec();
    ids.sort();
    let domains = (0..g.n())
        .map(|u| {
            let mut parents: Vec<_> = g.neighbors(u).iter().map(|&j| g.id(j)).collect();
            parents.push(g.id(u));
            parents.sort();
            let mut d = Vec::with_capacity(ids.len() * parents.len() * n as usize);
            for &root in &ids {
                for &parent in &parents {
                    for dist in 0..n {
                        d.push(StCert { root, parent, dist });
                    }
                }
            }
            d
        })
        .collect();
    CertSpace { domains }
}

/// Descriptions of every member of `lang` on the instance's graph, the same
/// pool at every node.
pub fn universal_space(inst: &LabeledGraph, lang: LanguageId, budget: Budget) -> Result<CertSpace<UniversalCert>, OracleError> {
    let pool: Vec<UniversalCert> = enumerate_members(lang, inst.graph_arc(), budget)?
        .into_iter()
        .map(|labels| {
            let member = inst.relabel(labels).expect("enumerated labels fit the graph");
            UniversalCert::of(&member, lang)
        })
        .collect();
    Ok(CertSpace {
        domains: vec![pool; inst.n()],
    })
}

/// Inner certificates paired with every tree certificate and both booleans.
pub fn wrapped_space<C: Clone>(inst: &LabeledGraph, inner: &CertSpace<C>) -> CertSpace<WrappedCert<C>> {
    let trees = st_space(inst);
    let domains = inner
        .domains
        .iter()
        .zip(&trees.domains)
        .map(|(ins, ts)| {
            let mut d = Vec::with_capacity(ins.len() * ts.len() * 2);
            for c in ins {
                for t in ts {
                    for b in [false, true] {
                        d.push(WrappedCert {
                            inner: c.clone(),
                            tree: *t,
                            b,
                        });
                    }
                }
            }
            d
        })
        .collect();
    CertSpace { domains }
}

/// The Borůvka run records of every spanning tree, each combined with the
/// rooted tree certificates of every spanning tree.
pub fn mst_space(inst: &LabeledGraph, budget: Budget) -> Result<CertSpace<MstCert>, OracleError> {
    let g = inst.graph();
    if g.edge_count() > 0 && !g.is_weighted() {
        return Err(LanguageError::MissingWeights.into());
    }
    let mut meter = budget.meter();
    let trees = spanning_trees(g, &mut meter)?;
    let runs: Vec<Vec<MstCert>> = trees.iter().map(|t| run_certificates(g, t, t)).collect();
    let lasts: Vec<Vec<StCert>> = trees
        .iter()
        .map(|t| tree_certs(g, &edge_subgraph_adjacency(g, t), 0))
        .collect();
    let mut domains = Vec::with_capacity(g.n());
    for u in 0..g.n() {
        let rounds = distinct(runs.iter().map(|r| r[u].rounds.clone()));
        let finals = distinct(lasts.iter().map(|l| l[u]));
        let mut d = Vec::with_capacity(rounds.len() * finals.len());
        for r in &rounds {
            for &last in &finals {
                meter.tick()?;
                d.push(MstCert { rounds: r.clone(), last });
            }
        }
        domains.push(d);
    }
    Ok(CertSpace { domains })
}
