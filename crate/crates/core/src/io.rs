//! JSON instance files.
//!
//! ```json
//! {
//!   "label_kind": "pointer",
//!   "nodes": [{"id": 1, "label": 2}, {"id": 2, "label": null}],
//!   "edges": [{"u": 1, "v": 2, "weight": "3/2"}]
//! }
//! ```
//!
//! Labels: pointer is an id or `null`, adjlist a sorted id list, bool `0`/`1`,
//! raw a hex string. Weights may be integers or `"p/q"` strings and are written
//! back as strings. `"allow_disconnected": true` admits disconnected graphs.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::graph::{Graph, GraphError, Label, LabelKind, LabeledGraph, NodeId, Weight};

#[derive(Serialize, Deserialize)]
struct InstanceFile {
    label_kind: LabelKind,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    allow_disconnected: bool,
    nodes: Vec<NodeEntry>,
    edges: Vec<EdgeEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NodeEntry {
    id: u64,
    label: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EdgeEntry {
    u: u64,
    v: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    weight: Option<Value>,
}

fn malformed(msg: impl Into<String>) -> GraphError {
    GraphError::Malformed(msg.into())
}

pub fn parse_weight(v: &Value) -> Result<Weight, GraphError> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(Weight::from_integer)
            .ok_or_else(|| malformed(format!("weight {n} is not an integer"))),
        Value::String(s) => {
            let s = s.trim();
            let parsed = match s.split_once('/') {
                Some((p, q)) => p
                    .trim()
                    .parse::<i64>()
                    .ok()
                    .zip(q.trim().parse::<i64>().ok())
                    .filter(|&(_, q)| q != 0)
                    .map(|(p, q)| Weight::new(p, q)),
                None => s.parse::<i64>().ok().map(Weight::from_integer),
            };
            parsed.ok_or_else(|| malformed(format!("bad weight {s:?}")))
        }
        other => Err(malformed(format!("bad weight {other}"))),
    }
}

pub fn format_weight(w: &Weight) -> String {
    if *w.denom() == 1 {
        w.numer().to_string()
    } else {
        format!("{}/{}", w.numer(), w.denom())
    }
}

fn parse_id(v: &Value) -> Result<NodeId, GraphError> {
    v.as_u64()
        .map(NodeId)
        .ok_or_else(|| malformed(format!("bad node id {v}")))
}

fn parse_label(kind: LabelKind, v: &Value) -> Result<Label, GraphError> {
    match kind {
        LabelKind::Pointer => match v {
            Value::Null => Ok(Label::Pointer(None)),
            other => Ok(Label::Pointer(Some(parse_id(other)?))),
        },
        LabelKind::Adjlist => {
            let items = v
                .as_array()
                .ok_or_else(|| malformed(format!("adjlist label must be a list, got {v}")))?;
            let mut set = BTreeSet::new();
            for item in items {
                if !set.insert(parse_id(item)?) {
                    return Err(malformed(format!("repeated id in adjlist {v}")));
                }
            }
            Ok(Label::AdjList(set))
        }
        LabelKind::Bool => match v {
            Value::Bool(b) => Ok(Label::Bool(*b)),
            Value::Number(n) if n.as_u64() == Some(0) => Ok(Label::Bool(false)),
            Value::Number(n) if n.as_u64() == Some(1) => Ok(Label::Bool(true)),
            other => Err(malformed(format!("bool label must be 0 or 1, got {other}"))),
        },
        LabelKind::Raw => {
            let s = v
                .as_str()
                .ok_or_else(|| malformed(format!("raw label must be a hex string, got {v}")))?;
            hex::decode(s)
                .map(Label::Raw)
                .map_err(|e| malformed(format!("raw label {s:?}: {e}")))
        }
    }
}

fn label_value(label: &Label) -> Value {
    match label {
        Label::Pointer(None) => Value::Null,
        Label::Pointer(Some(id)) => Value::from(id.0),
        Label::AdjList(set) => Value::Array(set.iter().map(|id| Value::from(id.0)).collect()),
        Label::Bool(b) => Value::from(u8::from(*b)),
        Label::Raw(bytes) => Value::String(hex::encode(bytes)),
    }
}

pub fn parse_instance(text: &str) -> Result<LabeledGraph, GraphError> {
    let file: InstanceFile =
        serde_json::from_str(text).map_err(|e| malformed(e.to_string()))?;
    let mut edges = Vec::with_capacity(file.edges.len());
    for e in &file.edges {
        let w = e.weight.as_ref().map(parse_weight).transpose()?;
        edges.push((NodeId(e.u), NodeId(e.v), w));
    }
    let graph = Graph::build(
        file.nodes.iter().map(|n| NodeId(n.id)),
        edges,
        file.allow_disconnected,
    )?;
    let graph = Arc::new(graph);
    let mut pairs = Vec::with_capacity(file.nodes.len());
    for node in &file.nodes {
        pairs.push((NodeId(node.id), parse_label(file.label_kind, &node.label)?));
    }
    LabeledGraph::from_pairs(graph, file.label_kind, pairs)
}

/// Canonical text: nodes by id, edges lexicographically, trailing newline.
pub fn serialize_instance(instance: &LabeledGraph) -> String {
    let g = instance.graph();
    let nodes = (0..g.n())
        .map(|i| NodeEntry {
            id: g.id(i).0,
            label: label_value(instance.label(i)),
        })
        .collect();
    let edges = g
        .edges()
        .iter()
        .enumerate()
        .map(|(k, &(a, b))| EdgeEntry {
            u: g.id(a).0,
            v: g.id(b).0,
            weight: g.weight_of_edge(k).map(|w| Value::String(format_weight(w))),
        })
        .collect();
    let file = InstanceFile {
        label_kind: instance.kind(),
        allow_disconnected: !g.is_connected(),
        nodes,
        edges,
    };
    let mut text = serde_json::to_string_pretty(&file).expect("instance serialization is infallible");
    text.push('\n');
    text
}
