//! Explicit instances far from a language together with certificates under
//! which only a constant number of nodes reject.

use std::sync::Arc;

use thiserror::Error;

use crate::enumerate::{cycle_graph, graph_adjacency, path_graph, regular_offsets};
use crate::graph::{Graph, Label, LabelKind, LabeledGraph, NodeId};
use crate::languages::{adjlist_labels, LanguageId};
use crate::pls::{run_typed, Scheme};
use crate::schemes::{tree_certs, StCert, StPScheme, UniversalCert, WrappedCert, WrappedScheme};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("the path construction needs an even n >= 4, got {0}")]
    PathSize(usize),
    #[error("the two degrees must differ")]
    SameDegree,
    #[error("no connected {d}-regular circulant on {m} nodes")]
    NoRegularGraph { d: usize, m: usize },
    #[error("cycle constructions need n >= {min}, got {n}")]
    CycleSize { n: usize, min: usize },
}

/// Pointer labelings of the path `1 - ... - n`: every node toward `n`
/// ([`PathOrientation::TowardEnd`]), every node toward `1`, or the two
/// halves pointing away from each other.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathOrientation {
    TowardEnd,
    TowardStart,
    Split,
}

pub fn path_pointer_labels(n: usize, orientation: PathOrientation) -> Vec<Label> {
    let half = n / 2;
    (1..=n as u64)
        .map(|i| {
            let toward_start = match orientation {
                PathOrientation::TowardEnd => false,
                PathOrientation::TowardStart => true,
                PathOrientation::Split => i as usize <= half,
            };
            let target = if toward_start { i - 1 } else { i + 1 };
            Label::Pointer((1..=n as u64).contains(&target).then_some(NodeId(target)))
        })
        .collect()
}

/// The path `1 - ... - n` with its halves oriented away from each other
/// (two null pointers at the ends), and parent-pointer tree certificates
/// copied half from the labeling rooted at `1` and half from the labeling
/// rooted at `n`. Only the two middle nodes reject.
pub fn build_path_stp(n: usize) -> Result<(LabeledGraph, Vec<StCert>), ConstructionError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(ConstructionError::PathSize(n));
    }
    let g = Arc::new(path_graph(n));
    let member = |o| LabeledGraph::new(g.clone(), LabelKind::Pointer, path_pointer_labels(n, o)).expect("valid pointers");
    let from_start = StPScheme.prove(&member(PathOrientation::TowardStart)).expect("member");
    let from_end = StPScheme.prove(&member(PathOrientation::TowardEnd)).expect("member");
    let certs = (0..n)
        .map(|i| if i < n / 2 { from_start[i] } else { from_end[i] })
        .collect();
    Ok((member(PathOrientation::Split), certs))
}

fn circulant_edges(d: usize, m: usize, first: u64) -> Result<Vec<(u64, u64)>, ConstructionError> {
    // Degree one would disconnect the glued graph.
    let offsets = regular_offsets(d, m)
        .filter(|_| d >= 2)
        .ok_or(ConstructionError::NoRegularGraph { d, m })?;
    let mut edges = std::collections::BTreeSet::new();
    for i in 0..m as u64 {
        for &s in &offsets {
            let j = (i + s as u64) % m as u64;
            edges.insert((first + i.min(j), first + i.max(j)));
        }
    }
    if !edges.contains(&(first, first + 1)) {
        return Err(ConstructionError::NoRegularGraph { d, m });
    }
    Ok(edges.into_iter().collect())
}

fn full_adjacency(nodes: impl Iterator<Item = u64>, edges: &[(u64, u64)]) -> LabeledGraph {
    let g = Graph::new(
        nodes.map(NodeId),
        edges.iter().map(|&(a, b)| (NodeId(a), NodeId(b), None)),
    )
    .expect("gluing two connected graphs along two edges keeps them connected");
    let g = Arc::new(g);
    let all: Vec<usize> = (0..g.edge_count()).collect();
    let labels = adjlist_labels(&g, &all);
    LabeledGraph::new(g, LabelKind::Adjlist, labels).expect("adjacency labels are valid")
}

/// Two regular graphs joined by swapping one edge of each for two cross
/// edges, with every node labeled by its full adjacency.
#[derive(Clone, Debug)]
pub struct RegularGlue {
    /// The glued nonmember. Ids `1..=m1` form the first graph, the next `m2`
    /// ids the second.
    pub instance: LabeledGraph,
    /// Universal certificates copied from the two regular doubled graphs.
    pub certs: Vec<UniversalCert>,
    /// The doubled `d1`-regular member the first part's certificates describe.
    pub doubled_first: LabeledGraph,
    /// The doubled `d2`-regular member the second part's certificates describe.
    pub doubled_second: LabeledGraph,
}

/// Glues a `d1`-regular circulant on `m1` nodes to a `d2`-regular one on `m2`
/// nodes. Each part carries the universal certificate of the member obtained
/// by gluing that part to a copy of itself in the same way.
pub fn build_regular_glue(d1: usize, m1: usize, d2: usize, m2: usize) -> Result<RegularGlue, ConstructionError> {
    if d1 == d2 {
        return Err(ConstructionError::SameDegree);
    }
    let (m1u, m2u) = (m1 as u64, m2 as u64);
    let first = circulant_edges(d1, m1, 1)?;
    let second = circulant_edges(d2, m2, m1u + 1)?;
    let copy_first = circulant_edges(d1, m1, m1u + m2u + 1)?;
    let copy_second = circulant_edges(d2, m2, 2 * m1u + m2u + 1)?;

    // Removes the edge between the first two ids of each part and joins the
    // parts first-to-first and second-to-second.
    let glue = |a: &[(u64, u64)], a0: u64, b: &[(u64, u64)], b0: u64| -> Vec<(u64, u64)> {
        a.iter()
            .filter(|e| **e != (a0, a0 + 1))
            .chain(b.iter().filter(|e| **e != (b0, b0 + 1)))
            .copied()
            .chain([(a0.min(b0), a0.max(b0)), (a0.min(b0) + 1, a0.max(b0) + 1)])
            .collect()
    };

    let doubled_first = full_adjacency(
        (1..=m1u).chain(m1u + m2u + 1..=2 * m1u + m2u),
        &glue(&first, 1, &copy_first, m1u + m2u + 1),
    );
    let doubled_second = full_adjacency(
        (m1u + 1..=m1u + m2u).chain(2 * m1u + m2u + 1..=2 * m1u + 2 * m2u),
        &glue(&second, m1u + 1, &copy_second, 2 * m1u + m2u + 1),
    );
    let instance = full_adjacency(1..=m1u + m2u, &glue(&first, 1, &second, m1u + 1));

    let first_cert = UniversalCert::of(&doubled_first, LanguageId::Regular);
    let second_cert = UniversalCert::of(&doubled_second, LanguageId::Regular);
    let certs = (0..instance.n())
        .map(|i| {
            if i < m1 {
                first_cert.clone()
            } else {
                second_cert.clone()
            }
        })
        .collect();
    Ok(RegularGlue {
        instance,
        certs,
        doubled_first,
        doubled_second,
    })
}

/// The cycle `1 - ... - n` with every node pointing to its successor.
pub fn directed_cycle(n: usize) -> Result<LabeledGraph, ConstructionError> {
    if n < 3 {
        return Err(ConstructionError::CycleSize { n, min: 3 });
    }
    let labels = (0..n as u64)
        .map(|i| Label::Pointer(Some(NodeId((i + 1) % n as u64 + 1))))
        .collect();
    Ok(LabeledGraph::new(Arc::new(cycle_graph(n)), LabelKind::Pointer, labels).expect("valid pointers"))
}

/// The cycle `1 - ... - n` (`n` even) where nodes `2j-1` and `2j` point to
/// each other: `n/2` disjoint pointer cycles of length two.
pub fn paired_cycle(n: usize) -> Result<LabeledGraph, ConstructionError> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(ConstructionError::CycleSize { n, min: 4 });
    }
    let labels = (1..=n as u64)
        .map(|i| Label::Pointer(Some(NodeId(if i % 2 == 1 { i + 1 } else { i - 1 }))))
        .collect();
    Ok(LabeledGraph::new(Arc::new(cycle_graph(n)), LabelKind::Pointer, labels).expect("valid pointers"))
}

/// Wrapper certificates whose booleans are computed bottom-up on the prover's
/// tree: a node is `false` exactly when the inner verifier rejects it under
/// `inner` or one of its children is `false`. On a member, the honest
/// prover output is returned instead.
pub fn build_wrapper_fakes<S: Scheme>(
    scheme: &WrappedScheme<S>,
    inst: &LabeledGraph,
    inner: Option<Vec<S::Cert>>,
) -> Vec<WrappedCert<S::Cert>> {
    if let Ok(honest) = scheme.prove(inst) {
        return honest;
    }
    let g = inst.graph();
    let inner = inner.unwrap_or_else(|| (0..g.n()).map(|i| scheme.inner.filler(inst, i)).collect());
    let tree = tree_certs(g, &graph_adjacency(g), 0);
    let inner_ok = run_typed(&scheme.inner, inst, &inner).accepted;
    let mut order: Vec<usize> = (0..g.n()).collect();
    order.sort_by_key(|&i| std::cmp::Reverse(tree[i].dist));
    let mut b = vec![true; g.n()];
    for &u in &order {
        let child_false = g
            .neighbors(u)
            .iter()
            .any(|&w| tree[w].parent == g.id(u) && !b[w]);
        b[u] = inner_ok[u] && !child_false;
    }
    inner
        .into_iter()
        .zip(tree)
        .zip(b)
        .map(|((inner, tree), b)| WrappedCert { inner, tree, b })
        .collect()
}
