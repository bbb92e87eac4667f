//! IAT nodesets: typed nodes, directed edges and the structural queries the
//! dataset builder, pipeline and scorer are written against.

mod format;
mod validate;

pub use format::{parse_nodeset, serialize_nodeset};
pub use validate::{validate, Violation, ViolationCode};

use serde_json::Value;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Separator used whenever several node texts are joined into one context.
pub const CONTEXT_SEPARATOR: &str = " || ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    I,
    L,
    TA,
    YA,
    RA,
    CA,
    MA,
}

impl NodeKind {
    pub const ALL: [NodeKind; 7] = [
        NodeKind::I,
        NodeKind::L,
        NodeKind::TA,
        NodeKind::YA,
        NodeKind::RA,
        NodeKind::CA,
        NodeKind::MA,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NodeKind::I => "I",
            NodeKind::L => "L",
            NodeKind::TA => "TA",
            NodeKind::YA => "YA",
            NodeKind::RA => "RA",
            NodeKind::CA => "CA",
            NodeKind::MA => "MA",
        }
    }

    /// RA, CA and MA: the argumentative relation nodes.
    pub fn is_s_node(self) -> bool {
        matches!(self, NodeKind::RA | NodeKind::CA | NodeKind::MA)
    }
}

impl fmt::Display for NodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NodeKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        NodeKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| GraphError::UnknownNodeKind(s.to_string()))
    }
}

/// Kind of an argumentative relation node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SKind {
    RA,
    CA,
    MA,
}

impl SKind {
    pub const ALL: [SKind; 3] = [SKind::RA, SKind::CA, SKind::MA];

    pub fn as_str(self) -> &'static str {
        self.node_kind().as_str()
    }

    pub fn node_kind(self) -> NodeKind {
        match self {
            SKind::RA => NodeKind::RA,
            SKind::CA => NodeKind::CA,
            SKind::MA => NodeKind::MA,
        }
    }

    pub fn from_node_kind(kind: NodeKind) -> Option<SKind> {
        match kind {
            NodeKind::RA => Some(SKind::RA),
            NodeKind::CA => Some(SKind::CA),
            NodeKind::MA => Some(SKind::MA),
            _ => None,
        }
    }

    /// Node text given to freshly materialized S-nodes.
    pub fn default_text(self) -> &'static str {
        match self {
            SKind::RA => "Default Inference",
            SKind::CA => "Default Conflict",
            SKind::MA => "Default Rephrase",
        }
    }
}

impl fmt::Display for SKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SKind {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let kind: NodeKind = s.parse()?;
        SKind::from_node_kind(kind).ok_or_else(|| GraphError::UnknownNodeKind(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
    pub text: String,
    pub timestamp: Option<String>,
    /// Fields of the node record not interpreted here, kept for round-trips.
    pub extra: BTreeMap<String, Value>,
}

impl Node {
    pub fn new(id: impl Into<String>, kind: NodeKind, text: impl Into<String>) -> Self {
        Node {
            id: id.into(),
            kind,
            text: text.into(),
            timestamp: None,
            extra: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub id: String,
    pub from: String,
    pub to: String,
    pub extra: BTreeMap<String, Value>,
}

impl Edge {
    pub fn new(id: impl Into<String>, from: impl Into<String>, to: impl Into<String>) -> Self {
        Edge {
            id: id.into(),
            from: from.into(),
            to: to.into(),
            extra: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GraphError {
    #[error("malformed nodeset document: {0}")]
    MalformedDocument(String),
    #[error("unknown node kind {0:?}")]
    UnknownNodeKind(String),
    #[error("duplicate node id {0:?}")]
    DuplicateNodeId(String),
    #[error("edge endpoint {0:?} does not name a node")]
    DanglingEdgeEndpoint(String),
    #[error("edge {0:?} is a self-loop")]
    SelfLoop(String),
    #[error("{kind} node {id:?} has empty text")]
    EmptyText { id: String, kind: NodeKind },
    #[error("node {0:?} not found")]
    UnknownNode(String),
    #[error("node {0:?} is not a TA-node")]
    NotATaNode(String),
    #[error("node {0:?} is not an S-node")]
    NotAnSNode(String),
    #[error("invalid structure at {id:?}: {reason}")]
    InvalidStructure { id: String, reason: String },
}

/// A parsed nodeset. Immutable once built; node and edge order is the
/// document order.
#[derive(Debug, Clone)]
pub struct Nodeset {
    id: String,
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    locutions: Option<Value>,
    extra: BTreeMap<String, Value>,
    position: HashMap<String, usize>,
    incoming: Vec<Vec<usize>>,
    outgoing: Vec<Vec<usize>>,
}

impl PartialEq for Nodeset {
    fn eq(&self, other: &Self) -> bool {
        self.id == other.id
            && self.nodes == other.nodes
            && self.edges == other.edges
            && self.locutions == other.locutions
            && self.extra == other.extra
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SStructure {
    pub s_id: String,
    pub kind: SKind,
    pub premises: Vec<String>,
    pub conclusions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct YaAnchoring {
    pub ya_id: String,
    pub label: String,
    pub anchor_id: String,
    pub anchor_kind: NodeKind,
    pub target_id: String,
    pub target_kind: NodeKind,
}

impl Nodeset {
    pub fn new(id: impl Into<String>, nodes: Vec<Node>, edges: Vec<Edge>) -> Result<Self, GraphError> {
        Self::with_extras(id, nodes, edges, None, BTreeMap::new())
    }

    pub fn with_extras(
        id: impl Into<String>,
        nodes: Vec<Node>,
        edges: Vec<Edge>,
        locutions: Option<Value>,
        extra: BTreeMap<String, Value>,
    ) -> Result<Self, GraphError> {
        let mut position = HashMap::with_capacity(nodes.len());
        for (i, node) in nodes.iter().enumerate() {
            if position.insert(node.id.clone(), i).is_some() {
                return Err(GraphError::DuplicateNodeId(node.id.clone()));
            }
            if matches!(node.kind, NodeKind::I | NodeKind::L) && node.text.is_empty() {
                return Err(GraphError::EmptyText {
                    id: node.id.clone(),
                    kind: node.kind,
                });
            }
        }
        let mut incoming = vec![Vec::new(); nodes.len()];
        let mut outgoing = vec![Vec::new(); nodes.len()];
        for (e, edge) in edges.iter().enumerate() {
            let from = *position
                .get(&edge.from)
                .ok_or_else(|| GraphError::DanglingEdgeEndpoint(edge.from.clone()))?;
            let to = *position
                .get(&edge.to)
                .ok_or_else(|| GraphError::DanglingEdgeEndpoint(edge.to.clone()))?;
            if from == to {
                return Err(GraphError::SelfLoop(edge.id.clone()));
            }
            outgoing[from].push(e);
            incoming[to].push(e);
        }
        Ok(Nodeset {
            id: id.into(),
            nodes,
            edges,
            locutions,
            extra,
            position,
            incoming,
            outgoing,
        })
    }

    pub fn empty(id: impl Into<String>) -> Self {
        Nodeset::new(id, Vec::new(), Vec::new()).expect("empty nodeset is valid")
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn locutions(&self) -> Option<&Value> {
        self.locutions.as_ref()
    }

    pub fn extra(&self) -> &BTreeMap<String, Value> {
        &self.extra
    }

    pub fn node(&self, id: &str) -> Option<&Node> {
        self.position.get(id).map(|&i| &self.nodes[i])
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.position.get(id).copied()
    }

    pub fn kind_of(&self, id: &str) -> Option<NodeKind> {
        self.node(id).map(|n| n.kind)
    }

    pub fn nodes_of_kind(&self, kind: NodeKind) -> impl Iterator<Item = &Node> + '_ {
        self.nodes.iter().filter(move |n| n.kind == kind)
    }

    pub fn s_nodes(&self) -> impl Iterator<Item = &Node> + '_ {
        self.nodes.iter().filter(|n| n.kind.is_s_node())
    }

    pub fn count_kind(&self, kind: NodeKind) -> usize {
        self.nodes_of_kind(kind).count()
    }

    /// Source nodes of edges entering `id`, in edge order.
    pub fn predecessors(&self, id: &str) -> Vec<&Node> {
        match self.position.get(id) {
            Some(&i) => self.incoming[i]
                .iter()
                .map(|&e| &self.nodes[self.position[&self.edges[e].from]])
                .collect(),
            None => Vec::new(),
        }
    }

    /// Target nodes of edges leaving `id`, in edge order.
    pub fn successors(&self, id: &str) -> Vec<&Node> {
        match self.position.get(id) {
            Some(&i) => self.outgoing[i]
                .iter()
                .map(|&e| &self.nodes[self.position[&self.edges[e].to]])
                .collect(),
            None => Vec::new(),
        }
    }

    /// One record per S-node; fails on the first S-node lacking an I-node
    /// premise or conclusion.
    pub fn s_node_structures(&self) -> Result<Vec<SStructure>, GraphError> {
        let all = self.s_node_structures_lenient();
        for s in &all {
            if s.premises.is_empty() || s.conclusions.is_empty() {
                return Err(GraphError::InvalidStructure {
                    id: s.s_id.clone(),
                    reason: "S-node needs an incoming and an outgoing I-node edge".into(),
                });
            }
        }
        Ok(all)
    }

    /// Like [`Nodeset::s_node_structures`], but S-nodes with missing
    /// premises or conclusions are returned with empty lists.
    pub fn s_node_structures_lenient(&self) -> Vec<SStructure> {
        self.s_nodes()
            .map(|s| SStructure {
                s_id: s.id.clone(),
                kind: SKind::from_node_kind(s.kind).expect("filtered to S-nodes"),
                premises: self
                    .predecessors(&s.id)
                    .into_iter()
                    .filter(|n| n.kind == NodeKind::I)
                    .map(|n| n.id.clone())
                    .collect(),
                conclusions: self
                    .successors(&s.id)
                    .into_iter()
                    .filter(|n| n.kind == NodeKind::I)
                    .map(|n| n.id.clone())
                    .collect(),
            })
            .collect()
    }

    /// One record per YA-node; every YA-node must have exactly one anchor
    /// (L or TA) and exactly one target (I or S).
    pub fn ya_anchorings(&self) -> Result<Vec<YaAnchoring>, GraphError> {
        self.nodes_of_kind(NodeKind::YA)
            .map(|ya| {
                let preds = self.predecessors(&ya.id);
                let succs = self.successors(&ya.id);
                if preds.len() != 1 || succs.len() != 1 {
                    return Err(GraphError::InvalidStructure {
                        id: ya.id.clone(),
                        reason: format!(
                            "YA-node has {} incoming and {} outgoing edges, expected 1 and 1",
                            preds.len(),
                            succs.len()
                        ),
                    });
                }
                self.anchoring_from(ya, preds[0], succs[0]).ok_or_else(|| {
                    GraphError::InvalidStructure {
                        id: ya.id.clone(),
                        reason: format!(
                            "YA-node connects {} to {}",
                            preds[0].kind, succs[0].kind
                        ),
                    }
                })
            })
            .collect()
    }

    /// Anchorings for YA-nodes whose first incoming edge comes from an L or
    /// TA node and whose first outgoing edge reaches an I or S node; other
    /// YA-nodes are skipped.
    pub fn ya_anchorings_lenient(&self) -> Vec<YaAnchoring> {
        self.nodes_of_kind(NodeKind::YA)
            .filter_map(|ya| {
                let anchor = *self.predecessors(&ya.id).first()?;
                let target = *self.successors(&ya.id).first()?;
                self.anchoring_from(ya, anchor, target)
            })
            .collect()
    }

    fn anchoring_from(&self, ya: &Node, anchor: &Node, target: &Node) -> Option<YaAnchoring> {
        let anchor_ok = matches!(anchor.kind, NodeKind::L | NodeKind::TA);
        let target_ok = target.kind == NodeKind::I || target.kind.is_s_node();
        (anchor_ok && target_ok).then(|| YaAnchoring {
            ya_id: ya.id.clone(),
            label: ya.text.clone(),
            anchor_id: anchor.id.clone(),
            anchor_kind: anchor.kind,
            target_id: target.id.clone(),
            target_kind: target.kind,
        })
    }

    /// Texts of the L-nodes before and after a transition. Several L-nodes
    /// on one side are joined with [`CONTEXT_SEPARATOR`].
    pub fn ta_context(&self, ta_id: &str) -> Result<(String, String), GraphError> {
        let ta = self
            .node(ta_id)
            .ok_or_else(|| GraphError::UnknownNode(ta_id.to_string()))?;
        if ta.kind != NodeKind::TA {
            return Err(GraphError::NotATaNode(ta_id.to_string()));
        }
        let (before, after) = self.ta_context_lenient(ta_id);
        if before.is_empty() || after.is_empty() {
            return Err(GraphError::InvalidStructure {
                id: ta_id.to_string(),
                reason: "TA-node needs an incoming and an outgoing L-node edge".into(),
            });
        }
        Ok((before.join(CONTEXT_SEPARATOR), after.join(CONTEXT_SEPARATOR)))
    }

    pub(crate) fn ta_context_lenient(&self, ta_id: &str) -> (Vec<&str>, Vec<&str>) {
        (
            texts_of(self.predecessors(ta_id), NodeKind::L),
            texts_of(self.successors(ta_id), NodeKind::L),
        )
    }

    /// Premise texts followed by conclusion texts of an S-node.
    pub fn s_context(&self, s_id: &str) -> Result<Vec<String>, GraphError> {
        let s = self
            .node(s_id)
            .ok_or_else(|| GraphError::UnknownNode(s_id.to_string()))?;
        if !s.kind.is_s_node() {
            return Err(GraphError::NotAnSNode(s_id.to_string()));
        }
        let (premises, conclusions) = self.s_context_lenient(s_id);
        if premises.is_empty() || conclusions.is_empty() {
            return Err(GraphError::InvalidStructure {
                id: s_id.to_string(),
                reason: "S-node needs an incoming and an outgoing I-node edge".into(),
            });
        }
        Ok(premises
            .into_iter()
            .chain(conclusions)
            .map(str::to_string)
            .collect())
    }

    pub(crate) fn s_context_lenient(&self, s_id: &str) -> (Vec<&str>, Vec<&str>) {
        (
            texts_of(self.predecessors(s_id), NodeKind::I),
            texts_of(self.successors(s_id), NodeKind::I),
        )
    }
}

fn texts_of(nodes: Vec<&Node>, kind: NodeKind) -> Vec<&str> {
    nodes.into_iter().filter(|n| n.kind == kind).map(|n| n.text.as_str()).collect()
}
