//! Instance corpora: every nonmember labeling of small graphs, and seeded
//! corruptions of random legal trees.

use std::collections::HashSet;
use std::sync::Arc;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::OracleError;
use crate::budget::Budget;
use crate::enumerate::{all_connected_graphs, random_connected_graph, reweighted, with_random_weights};
use crate::graph::{Graph, Label, LabelKind, LabeledGraph, NodeId, Weight};
use crate::languages::{
    adjlist_labels, decide_membership, enumerate_members, minimum_spanning_tree_by_enumeration, LanguageId,
};

#[derive(Clone, Debug)]
pub struct CorpusItem {
    pub id: String,
    pub instance: LabeledGraph,
    /// The legal labeling the instance was corrupted from, if any.
    pub origin: Option<LabeledGraph>,
}

/// Weights `1..=m` in edge order, so every graph gets one fixed distinct
/// weighting.
fn weighted_if_needed(lang: LanguageId, g: &Arc<Graph>) -> Arc<Graph> {
    if lang == LanguageId::MstL {
        Arc::new(reweighted(g, |k| Weight::from_integer(k as i64 + 1)))
    } else {
        g.clone()
    }
}

/// Every label a node can carry: no pointer or a pointer to a neighbor, any
/// subset of its neighbors, or either boolean.
fn label_choices(g: &Graph, i: usize, kind: LabelKind) -> Vec<Label> {
    let nbrs: Vec<NodeId> = g.neighbors(i).iter().map(|&j| g.id(j)).collect();
    match kind {
        LabelKind::Pointer => std::iter::once(None)
            .chain(nbrs.iter().copied().map(Some))
            .map(Label::Pointer)
            .collect(),
        LabelKind::Adjlist => nbrs
            .iter()
            .copied()
            .powerset()
            .map(|s| Label::AdjList(s.into_iter().collect()))
            .collect(),
        LabelKind::Bool => vec![Label::Bool(false), Label::Bool(true)],
        LabelKind::Raw => Vec::new(),
    }
}

/// Every labeling of every connected graph on ids `1..=n`, `n <= max_n`,
/// that is not in `lang`. Ids are `n<n>-g<graph>-l<labeling>`.
pub fn nonmember_corpus(lang: LanguageId, max_n: usize, budget: Budget) -> Result<Vec<CorpusItem>, OracleError> {
    let mut meter = budget.meter();
    let mut out = Vec::new();
    for n in 1..=max_n {
        for (gi, g) in all_connected_graphs(n).iter().enumerate() {
            let g = weighted_if_needed(lang, g);
            let choices: Vec<Vec<Label>> = (0..n).map(|i| label_choices(&g, i, lang.label_kind())).collect();
            for (li, labels) in choices.iter().multi_cartesian_product().enumerate() {
                meter.tick()?;
                let inst = LabeledGraph::new(g.clone(), lang.label_kind(), labels.into_iter().cloned().collect())
                    .expect("choices fit the graph");
                if !decide_membership(lang, &inst)? {
                    out.push(CorpusItem {
                        id: format!("n{n}-g{gi}-l{li}"),
                        instance: inst,
                        origin: None,
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Every member of `lang` on every connected graph with `n <= max_n`.
pub fn member_corpus(lang: LanguageId, max_n: usize, budget: Budget) -> Result<Vec<CorpusItem>, OracleError> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        for (gi, g) in all_connected_graphs(n).iter().enumerate() {
            let g = weighted_if_needed(lang, g);
            for (li, labels) in enumerate_members(lang, &g, budget)?.into_iter().enumerate() {
                out.push(CorpusItem {
                    id: format!("n{n}-g{gi}-m{li}"),
                    instance: LabeledGraph::new(g.clone(), lang.label_kind(), labels).expect("members fit the graph"),
                    origin: None,
                });
            }
        }
    }
    Ok(out)
}

/// Canonical form under renaming of node ids: the smallest encoding over
/// all orderings of the nodes.
fn canonical_key(inst: &LabeledGraph) -> Vec<i64> {
    let g = inst.graph();
    let n = g.n();
    let mut best: Option<Vec<i64>> = None;
    for perm in (0..n).permutations(n) {
        // perm[i] is the new position of node i
        let pos = |id: &NodeId| perm[g.index_of(*id).expect("label ids are graph ids")] as i64;
        let mut key = vec![n as i64];
        let mut edges: Vec<(i64, i64, i64)> = (0..g.edge_count())
            .map(|k| {
                let (a, b) = g.edges()[k];
                let (a, b) = (perm[a] as i64, perm[b] as i64);
                (a.min(b), a.max(b), g.rank_of_edge(k).map_or(-1, i64::from))
            })
            .collect();
        edges.sort();
        for (a, b, r) in edges {
            key.extend([a, b, r]);
        }
        let mut by_pos = vec![Vec::new(); n];
        for (i, l) in inst.labels().iter().enumerate() {
            by_pos[perm[i]] = match l {
                Label::Pointer(p) => vec![-2, p.as_ref().map_or(-1, pos)],
                Label::AdjList(s) => {
                    let mut v: Vec<i64> = s.iter().map(pos).collect();
                    v.sort();
                    std::iter::once(-3 - v.len() as i64).chain(v).collect()
                }
                Label::Bool(b) => vec![-4, *b as i64],
                Label::Raw(bytes) => std::iter::once(-5 - bytes.len() as i64)
                    .chain(bytes.iter().map(|&b| i64::from(b)))
                    .collect(),
            };
        }
        key.extend(by_pos.into_iter().flatten());
        if best.as_ref().is_none_or(|b| key < *b) {
            best = Some(key);
        }
    }
    best.unwrap_or_default()
}

/// Keeps the first item of each class of instances equal up to renaming
/// node ids. Every scheme and certificate space here treats ids only as
/// names, so rejection minima and distances agree within a class.
pub fn dedup_isomorphic(items: Vec<CorpusItem>) -> Vec<CorpusItem> {
    let mut seen = HashSet::new();
    items
        .into_iter()
        .filter(|it| seen.insert(canonical_key(&it.instance)))
        .collect()
}

/// Replaces the labels of `1..=max(1, n/2)` random nodes by random subsets
/// of their neighbors, retrying until the result leaves the language.
fn corrupt(rng: &mut ChaCha8Rng, lang: LanguageId, member: &LabeledGraph) -> Option<LabeledGraph> {
    let g = member.graph();
    let n = g.n();
    for _ in 0..32 {
        let count = rng.gen_range(1..=(n / 2).max(1));
        let mut nodes: Vec<usize> = (0..n).collect();
        nodes.shuffle(rng);
        let mut labels = member.labels().to_vec();
        for &u in &nodes[..count] {
            let subset = g
                .neighbors(u)
                .iter()
                .filter(|_| rng.gen_bool(0.5))
                .map(|&j| g.id(j));
            labels[u] = Label::AdjList(subset.collect());
        }
        let inst = member.relabel(labels).expect("subsets of neighbors are valid");
        if !decide_membership(lang, &inst).expect("adjacency labels on a weighted graph") {
            return Some(inst);
        }
    }
    None
}

fn random_spanning_tree(rng: &mut ChaCha8Rng, g: &Graph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.edge_count()).collect();
    order.shuffle(rng);
    let mut dsu = crate::enumerate::RollbackDsu::new(g.n());
    let mut tree: Vec<usize> = order
        .into_iter()
        .filter(|&k| {
            let (a, b) = g.edges()[k];
            dsu.union(a, b)
        })
        .collect();
    tree.sort();
    tree
}

fn corruption_corpus(
    lang: LanguageId,
    seed: u64,
    count: usize,
    min_n: usize,
    max_n: usize,
) -> Result<Vec<CorpusItem>, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let prefix = if lang == LanguageId::MstL { "mst" } else { "stl" };
    while out.len() < count {
        let n = rng.gen_range(min_n..=max_n);
        let extra = rng.gen_range(0.1..0.6);
        let base = random_connected_graph(&mut rng, n, extra);
        let (g, tree) = if lang == LanguageId::MstL {
            let g = with_random_weights(&mut rng, &base);
            let mut meter = Budget::unlimited().meter();
            let tree = minimum_spanning_tree_by_enumeration(&g, &mut meter)?;
            (g, tree)
        } else {
            let tree = random_spanning_tree(&mut rng, &base);
            (base, tree)
        };
        let g = Arc::new(g);
        let member = LabeledGraph::new(g.clone(), LabelKind::Adjlist, adjlist_labels(&g, &tree))
            .expect("tree labels are valid");
        if let Some(inst) = corrupt(&mut rng, lang, &member) {
            out.push(CorpusItem {
                id: format!("{prefix}-{seed}-{}", out.len()),
                instance: inst,
                origin: Some(member),
            });
        }
    }
    Ok(out)
}

/// `count` corrupted spanning trees of random graphs with `2 <= n <= max_n`.
pub fn st_corruption_corpus(seed: u64, count: usize, max_n: usize) -> Result<Vec<CorpusItem>, OracleError> {
    corruption_corpus(LanguageId::StL, seed, count, 2, max_n)
}

/// `count` corrupted minimum spanning trees of randomly weighted graphs with
/// `2 <= n <= max_n`.
pub fn mst_corruption_corpus(seed: u64, count: usize, max_n: usize) -> Result<Vec<CorpusItem>, OracleError> {
    corruption_corpus(LanguageId::MstL, seed, count, 2, max_n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::languages::edit_distance_to_language;

    #[test]
    fn nonmembers_of_small_graphs() {
        // two nodes: one edge, labels in {none, other} each
        let acyclic = nonmember_corpus(LanguageId::Acyclic, 2, Budget::default()).unwrap();
        assert_eq!(acyclic.len(), 1);
        let leader = nonmember_corpus(LanguageId::Leader, 3, Budget::default()).unwrap();
        // 1 + 2 + 4 * (2^3 - 3) = every labeling without exactly one leader
        assert_eq!(leader.len(), 1 + 2 + 4 * 5);
        for it in &leader {
            assert!(!decide_membership(LanguageId::Leader, &it.instance).unwrap());
        }
    }

    #[test]
    fn isomorphic_copies_collapse() {
        let items = nonmember_corpus(LanguageId::Leader, 3, Budget::default()).unwrap();
        let classes = dedup_isomorphic(items);
        // n=1: none. n=2: none, both. path: none, both ends, end and middle, all.
        // triangle: none, two, all.
        assert_eq!(classes.len(), 1 + 2 + 4 + 3);
    }

    #[test]
    fn corruptions_are_deterministic_nonmembers() {
        let a = st_corruption_corpus(7, 20, 6).unwrap();
        let b = st_corruption_corpus(7, 20, 6).unwrap();
        assert_eq!(a.len(), 20);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.instance, y.instance);
            let d = edit_distance_to_language(LanguageId::StL, &x.instance, Budget::default()).unwrap();
            assert!(d >= 1);
        }
        for it in mst_corruption_corpus(3, 10, 5).unwrap() {
            assert!(it.instance.graph().is_weighted());
            assert!(decide_membership(LanguageId::MstL, it.origin.as_ref().unwrap()).unwrap());
        }
    }
}
