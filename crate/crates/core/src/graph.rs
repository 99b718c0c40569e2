//! Graphs, labels, and labeled instances.
//!
//! Nodes carry arbitrary positive identifiers. Internally every node also has a
//! dense index (its position in ascending-id order), which is what the search
//! code works with.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Exact edge weight.
pub type Weight = Ratio<i64>;

/// Node identity. Always positive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u64);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("graph has no nodes")]
    Empty,
    #[error("node id must be positive")]
    ZeroId,
    #[error("duplicate node id {0}")]
    DuplicateNode(NodeId),
    #[error("edge endpoint {0} is not a node")]
    UnknownNode(NodeId),
    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),
    #[error("parallel edge {0}-{1}")]
    ParallelEdge(NodeId, NodeId),
    #[error("either every edge or no edge must carry a weight")]
    PartialWeights,
    #[error("weight of edge {0}-{1} is not positive")]
    NonPositiveWeight(NodeId, NodeId),
    #[error("duplicate edge weight {0}")]
    DuplicateWeight(Weight),
    #[error("graph is disconnected")]
    Disconnected,
    #[error("pointer label of node {0} names unknown node {1}")]
    DanglingPointer(NodeId, NodeId),
    #[error("labeling has {labels} entries for {nodes} nodes")]
    LabelCount { labels: usize, nodes: usize },
    #[error("labeled graphs do not share the same underlying graph")]
    MismatchedGraphs,
}

/// The four label shapes used by the languages.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Pointer,
    Adjlist,
    Bool,
    Raw,
}

impl fmt::Display for LabelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            LabelKind::Pointer => "pointer",
            LabelKind::Adjlist => "adjlist",
            LabelKind::Bool => "bool",
            LabelKind::Raw => "raw",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    /// `None` is the null pointer.
    Pointer(Option<NodeId>),
    AdjList(BTreeSet<NodeId>),
    Bool(bool),
    Raw(Vec<u8>),
}

impl Label {
    pub fn kind(&self) -> LabelKind {
        match self {
            Label::Pointer(_) => LabelKind::Pointer,
            Label::AdjList(_) => LabelKind::Adjlist,
            Label::Bool(_) => LabelKind::Bool,
            Label::Raw(_) => LabelKind::Raw,
        }
    }

    pub fn adjlist<I: IntoIterator<Item = u64>>(ids: I) -> Label {
        Label::AdjList(ids.into_iter().map(NodeId).collect())
    }

    pub fn as_pointer(&self) -> Option<Option<NodeId>> {
        match self {
            Label::Pointer(p) => Some(*p),
            _ => None,
        }
    }

    pub fn as_adjlist(&self) -> Option<&BTreeSet<NodeId>> {
        match self {
            Label::AdjList(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            Label::Bool(b) => Some(*b),
            _ => None,
        }
    }

    /// The "empty" label of a kind: null pointer, empty list, false, no bytes.
    pub fn empty(kind: LabelKind) -> Label {
        match kind {
            LabelKind::Pointer => Label::Pointer(None),
            LabelKind::Adjlist => Label::AdjList(BTreeSet::new()),
            LabelKind::Bool => Label::Bool(false),
            LabelKind::Raw => Label::Raw(Vec::new()),
        }
    }
}

/// A simple undirected graph, optionally with distinct positive weights.
#[derive(Clone, Debug)]
pub struct Graph {
    ids: Vec<NodeId>,
    index: HashMap<NodeId, usize>,
    adj: Vec<Vec<usize>>,
    matrix: Vec<bool>,
    edges: Vec<(usize, usize)>,
    edge_index: HashMap<(usize, usize), usize>,
    weights: Option<Vec<Weight>>,
    ranks: Option<Vec<u32>>,
    connected: bool,
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.ids == other.ids && self.edges == other.edges && self.weights == other.weights
    }
}

impl Eq for Graph {}

fn ordered(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl Graph {
    /// Builds a connected graph.
    pub fn new<N, E>(nodes: N, edges: E) -> Result<Graph, GraphError>
    where
        N: IntoIterator<Item = NodeId>,
        E: IntoIterator<Item = (NodeId, NodeId, Option<Weight>)>,
    {
        Self::build(nodes, edges, false)
    }

    /// Unweighted convenience constructor over raw ids.
    pub fn from_edges(nodes: &[u64], edges: &[(u64, u64)]) -> Result<Graph, GraphError> {
        Self::new(
            nodes.iter().copied().map(NodeId),
            edges.iter().map(|&(u, v)| (NodeId(u), NodeId(v), None)),
        )
    }

    /// Weighted convenience constructor over raw ids and integer weights.
    pub fn from_weighted_edges(
        nodes: &[u64],
        edges: &[(u64, u64, i64)],
    ) -> Result<Graph, GraphError> {
        Self::new(
            nodes.iter().copied().map(NodeId),
            edges
                .iter()
                .map(|&(u, v, w)| (NodeId(u), NodeId(v), Some(Weight::from_integer(w)))),
        )
    }

    pub fn build<N, E>(nodes: N, edges: E, allow_disconnected: bool) -> Result<Graph, GraphError>
    where
        N: IntoIterator<Item = NodeId>,
        E: IntoIterator<Item = (NodeId, NodeId, Option<Weight>)>,
    {
        let mut ids: Vec<NodeId> = nodes.into_iter().collect();
        if ids.is_empty() {
            return Err(GraphError::Empty);
        }
        ids.sort();
        for w in ids.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateNode(w[0]));
            }
        }
        if ids[0].0 == 0 {
            return Err(GraphError::ZeroId);
        }
        let index: HashMap<NodeId, usize> = ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
        let n = ids.len();

        let mut raw: Vec<((usize, usize), Option<Weight>)> = Vec::new();
        for (u, v, w) in edges {
            let iu = *index.get(&u).ok_or(GraphError::UnknownNode(u))?;
            let iv = *index.get(&v).ok_or(GraphError::UnknownNode(v))?;
            if iu == iv {
                return Err(GraphError::SelfLoop(u));
            }
            raw.push((ordered(iu, iv), w));
        }
        raw.sort_by_key(|e| e.0);
        for w in raw.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(GraphError::ParallelEdge(ids[w[0].0 .0], ids[w[0].0 .1]));
            }
        }
        let weighted = raw.iter().filter(|e| e.1.is_some()).count();
        if weighted != 0 && weighted != raw.len() {
            return Err(GraphError::PartialWeights);
        }

        let mut adj = vec![Vec::new(); n];
        let mut matrix = vec![false; n * n];
        let mut edges = Vec::with_capacity(raw.len());
        let mut edge_index = HashMap::with_capacity(raw.len());
        let mut weights = Vec::new();
        for (k, ((a, b), w)) in raw.into_iter().enumerate() {
            adj[a].push(b);
            adj[b].push(a);
            matrix[a * n + b] = true;
            matrix[b * n + a] = true;
            edges.push((a, b));
            edge_index.insert((a, b), k);
            if let Some(w) = w {
                if w <= Weight::from_integer(0) {
                    return Err(GraphError::NonPositiveWeight(ids[a], ids[b]));
                }
                weights.push(w);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
        }

        let (weights, ranks) = if weighted > 0 {
            let mut order: Vec<usize> = (0..weights.len()).collect();
            order.sort_by(|&x, &y| weights[x].cmp(&weights[y]));
            for w in order.windows(2) {
                if weights[w[0]] == weights[w[1]] {
                    return Err(GraphError::DuplicateWeight(weights[w[0]]));
                }
            }
            let mut ranks = vec![0u32; weights.len()];
            for (r, &e) in order.iter().enumerate() {
                ranks[e] = r as u32;
            }
            (Some(weights), Some(ranks))
        } else {
            (None, None)
        };

        let mut g = Graph {
            ids,
            index,
            adj,
            matrix,
            edges,
            edge_index,
            weights,
            ranks,
            connected: false,
        };
        g.connected = g.compute_connected();
        if !g.connected && !allow_disconnected {
            return Err(GraphError::Disconnected);
        }
        Ok(g)
    }

    fn compute_connected(&self) -> bool {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &self.adj[u] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == n
    }

    pub fn n(&self) -> usize {
        self.ids.len()
    }

    pub fn ids(&self) -> &[NodeId] {
        &self.ids
    }

    pub fn id(&self, i: usize) -> NodeId {
        self.ids[i]
    }

    pub fn index_of(&self, id: NodeId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    pub fn max_id(&self) -> NodeId {
        *self.ids.last().expect("graphs are nonempty")
    }

    /// Neighbor indices of `i`, ascending.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i].len()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.matrix[i * self.n() + j]
    }

    pub fn has_edge_ids(&self, a: NodeId, b: NodeId) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.has_edge(i, j),
            _ => false,
        }
    }

    /// Edges as index pairs `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Position of edge `{i, j}` in [`Graph::edges`].
    pub fn edge_position(&self, i: usize, j: usize) -> Option<usize> {
        self.edge_index.get(&ordered(i, j)).copied()
    }

    pub fn is_weighted(&self) -> bool {
        self.weights.is_some()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<&Weight> {
        let k = self.edge_position(i, j)?;
        self.weights.as_ref().map(|w| &w[k])
    }

    pub fn weight_of_edge(&self, k: usize) -> Option<&Weight> {
        self.weights.as_ref().map(|w| &w[k])
    }

    /// Rank of the edge weight among all weights, 0 for the lightest.
    pub fn weight_rank(&self, i: usize, j: usize) -> Option<u32> {
        let k = self.edge_position(i, j)?;
        self.ranks.as_ref().map(|r| r[k])
    }

    pub fn rank_of_edge(&self, k: usize) -> Option<u32> {
        self.ranks.as_ref().map(|r| r[k])
    }

    pub fn is_connected(&self) -> bool {
        self.connected
    }
}

/// A graph together with one label per node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledGraph {
    graph: Arc<Graph>,
    kind: LabelKind,
    labels: Vec<Label>,
}

impl LabeledGraph {
    /// `labels[i]` belongs to the node of index `i`.
    pub fn new(graph: Arc<Graph>, kind: LabelKind, labels: Vec<Label>) -> Result<Self, GraphError> {
        if labels.len() != graph.n() {
            return Err(GraphError::LabelCount {
                labels: labels.len(),
                nodes: graph.n(),
            });
        }
        for (i, l) in labels.iter().enumerate() {
            if let Label::Pointer(Some(t)) = l {
                if graph.index_of(*t).is_none() {
                    return Err(GraphError::DanglingPointer(graph.id(i), *t));
                }
            }
        }
        Ok(LabeledGraph {
            graph,
            kind,
            labels,
        })
    }

    /// Builds from a map-like list of `(id, label)` pairs.
    pub fn from_pairs(
        graph: Arc<Graph>,
        kind: LabelKind,
        pairs: impl IntoIterator<Item = (NodeId, Label)>,
    ) -> Result<Self, GraphError> {
        let mut labels: Vec<Option<Label>> = vec![None; graph.n()];
        for (id, l) in pairs {
            let i = graph.index_of(id).ok_or(GraphError::UnknownNode(id))?;
            if labels[i].replace(l).is_some() {
                return Err(GraphError::DuplicateNode(id));
            }
        }
        let count = labels.iter().filter(|l| l.is_some()).count();
        if count != graph.n() {
            return Err(GraphError::LabelCount {
                labels: count,
                nodes: graph.n(),
            });
        }
        Self::new(graph, kind, labels.into_iter().map(Option::unwrap).collect())
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<Graph> {
        &self.graph
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &Label {
        &self.labels[i]
    }

    pub fn label_of(&self, id: NodeId) -> Option<&Label> {
        self.graph.index_of(id).map(|i| &self.labels[i])
    }

    /// Same graph, new labeling.
    pub fn relabel(&self, labels: Vec<Label>) -> Result<Self, GraphError> {
        Self::new(self.graph.clone(), self.kind, labels)
    }

    pub fn with_label(&self, i: usize, label: Label) -> Result<Self, GraphError> {
        let mut labels = self.labels.clone();
        labels[i] = label;
        self.relabel(labels)
    }
}

/// Number of nodes whose labels differ. Both instances must share the graph.
pub fn edit_distance_between(a: &LabeledGraph, b: &LabeledGraph) -> Result<usize, GraphError> {
    if !Arc::ptr_eq(&a.graph, &b.graph) && *a.graph != *b.graph {
        return Err(GraphError::MismatchedGraphs);
    }
    Ok(a.labels
        .iter()
        .zip(&b.labels)
        .filter(|(x, y)| x != y)
        .count())
}

/// Number of positions where two labelings of the same graph differ.
pub fn label_diff(a: &[Label], b: &[Label]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path4() -> Arc<Graph> {
        Arc::new(Graph::from_edges(&[1, 2, 3, 4], &[(1, 2), (2, 3), (3, 4)]).unwrap())
    }

    #[test]
    fn rejects_structural_errors() {
        assert_eq!(
            Graph::from_edges(&[1, 2], &[(1, 1)]).unwrap_err(),
            GraphError::SelfLoop(NodeId(1))
        );
        assert_eq!(
            Graph::from_edges(&[1, 2, 2], &[(1, 2)]).unwrap_err(),
            GraphError::DuplicateNode(NodeId(2))
        );
        assert_eq!(
            Graph::from_edges(&[1, 2], &[(1, 2), (2, 1)]).unwrap_err(),
            GraphError::ParallelEdge(NodeId(1), NodeId(2))
        );
        assert_eq!(
            Graph::from_edges(&[1, 2, 3], &[(1, 2)]).unwrap_err(),
            GraphError::Disconnected
        );
        assert!(matches!(
            Graph::from_weighted_edges(&[1, 2, 3], &[(1, 2, 1), (2, 3, 2), (1, 3, 2)]),
            Err(GraphError::DuplicateWeight(_))
        ));
    }

    #[test]
    fn disconnected_graphs_need_the_flag() {
        let g = Graph::build(
            [NodeId(1), NodeId(2)],
            std::iter::empty(),
            true,
        )
        .unwrap();
        assert!(!g.is_connected());
    }

    #[test]
    fn ranks_follow_weight_order() {
        let g = Graph::from_weighted_edges(&[1, 2, 3], &[(1, 2, 5), (2, 3, 1), (1, 3, 3)]).unwrap();
        assert_eq!(g.weight_rank(1, 2), Some(0));
        assert_eq!(g.weight_rank(0, 2), Some(1));
        assert_eq!(g.weight_rank(0, 1), Some(2));
    }

    #[test]
    fn distance_counts_differing_nodes() {
        let g = path4();
        let a = LabeledGraph::new(g.clone(), LabelKind::Bool, vec![Label::Bool(false); 4]).unwrap();
        let b = a
            .with_label(1, Label::Bool(true))
            .unwrap()
            .with_label(2, Label::Bool(true))
            .unwrap();
        assert_eq!(edit_distance_between(&a, &a).unwrap(), 0);
        assert_eq!(edit_distance_between(&a, &b).unwrap(), 2);
    }

    #[test]
    fn distance_requires_same_graph() {
        let a = LabeledGraph::new(path4(), LabelKind::Bool, vec![Label::Bool(false); 4]).unwrap();
        let other = Arc::new(Graph::from_edges(&[1, 2, 3, 4], &[(1, 2), (2, 3), (2, 4)]).unwrap());
        let b = LabeledGraph::new(other, LabelKind::Bool, vec![Label::Bool(false); 4]).unwrap();
        assert_eq!(edit_distance_between(&a, &b), Err(GraphError::MismatchedGraphs));
    }

    #[test]
    fn dangling_pointer_is_rejected() {
        let err = LabeledGraph::new(
            path4(),
            LabelKind::Pointer,
            vec![
                Label::Pointer(Some(NodeId(9))),
                Label::Pointer(None),
                Label::Pointer(None),
                Label::Pointer(None),
            ],
        )
        .unwrap_err();
        assert_eq!(err, GraphError::DanglingPointer(NodeId(1), NodeId(9)));
    }
}
