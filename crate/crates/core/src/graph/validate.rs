use super::{NodeKind, Nodeset};
use crate::labels::{AnchorPattern, YaLabel};
use serde::Serialize;
use std::fmt;

/// Structural rules checked by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum ViolationCode {
    /// S-node without an incoming I-node edge or an outgoing I-node edge.
    V1,
    /// TA-node without an incoming L-node edge or an outgoing L-node edge.
    V2,
    /// YA-node without exactly one L/TA anchor and exactly one I/S target.
    V3,
    /// YA label not allowed for its anchor and target kinds.
    V4,
    /// Edge directly joining two I-nodes or two L-nodes.
    V5,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub node_or_edge_id: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {}: {}", self.code, self.node_or_edge_id, self.message)
    }
}

/// All structural violations in node order, then edge-level ones in edge
/// order. An empty list means the nodeset is well formed.
pub fn validate(ns: &Nodeset) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut push = |code, id: &str, message: String| {
        out.push(Violation {
            code,
            node_or_edge_id: id.to_string(),
            message,
        })
    };

    for node in ns.nodes() {
        let preds = ns.predecessors(&node.id);
        let succs = ns.successors(&node.id);
        match node.kind {
            k if k.is_s_node() => {
                let has_in = preds.iter().any(|n| n.kind == NodeKind::I);
                let has_out = succs.iter().any(|n| n.kind == NodeKind::I);
                if !has_in || !has_out {
                    push(
                        ViolationCode::V1,
                        &node.id,
                        format!("{k} node lacks an I-node {}", if has_in { "conclusion" } else { "premise" }),
                    );
                }
            }
            NodeKind::TA => {
                let has_in = preds.iter().any(|n| n.kind == NodeKind::L);
                let has_out = succs.iter().any(|n| n.kind == NodeKind::L);
                if !has_in || !has_out {
                    push(
                        ViolationCode::V2,
                        &node.id,
                        format!("TA node lacks {} L-node", if has_in { "a following" } else { "a preceding" }),
                    );
                }
            }
            NodeKind::YA => {
                let anchor_ok = preds.len() == 1 && matches!(preds[0].kind, NodeKind::L | NodeKind::TA);
                let target_ok = succs.len() == 1
                    && (succs[0].kind == NodeKind::I || succs[0].kind.is_s_node());
                if !anchor_ok || !target_ok {
                    push(
                        ViolationCode::V3,
                        &node.id,
                        format!(
                            "YA node has incoming {:?} and outgoing {:?}",
                            preds.iter().map(|n| n.kind.as_str()).collect::<Vec<_>>(),
                            succs.iter().map(|n| n.kind.as_str()).collect::<Vec<_>>()
                        ),
                    );
                    continue;
                }
                let (anchor, target) = (preds[0].kind, succs[0].kind);
                let legal = match (AnchorPattern::of(anchor, target), node.text.parse::<YaLabel>()) {
                    (Some(p), Ok(label)) => p.labels().contains(&label),
                    _ => false,
                };
                if !legal {
                    push(
                        ViolationCode::V4,
                        &node.id,
                        format!("label {:?} not allowed from {anchor} to {target}", node.text),
                    );
                }
            }
            _ => {}
        }
    }

    for edge in ns.edges() {
        let from = ns.kind_of(&edge.from);
        let to = ns.kind_of(&edge.to);
        if from == to && matches!(from, Some(NodeKind::I) | Some(NodeKind::L)) {
            push(
                ViolationCode::V5,
                &edge.id,
                format!("edge joins two {} nodes", from.unwrap()),
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fixtures, Edge, Node};

    fn codes(ns: &Nodeset) -> Vec<(ViolationCode, String)> {
        validate(ns)
            .into_iter()
            .map(|v| (v.code, v.node_or_edge_id))
            .collect()
    }

    #[test]
    fn fixtures_are_valid() {
        assert!(validate(&fixtures::asserting()).is_empty());
        assert!(validate(&fixtures::argued()).is_empty());
        assert!(validate(&Nodeset::empty("e")).is_empty());
    }

    #[test]
    fn ya_with_two_targets() {
        let ns = Nodeset::new(
            "x",
            vec![
                Node::new("L1", NodeKind::L, "a"),
                Node::new("I1", NodeKind::I, "a"),
                Node::new("I2", NodeKind::I, "b"),
                Node::new("YA1", NodeKind::YA, "Asserting"),
            ],
            vec![
                Edge::new("1", "L1", "YA1"),
                Edge::new("2", "YA1", "I1"),
                Edge::new("3", "YA1", "I2"),
            ],
        )
        .unwrap();
        assert_eq!(codes(&ns), vec![(ViolationCode::V3, "YA1".to_string())]);
    }

    #[test]
    fn transition_label_on_relation() {
        let ns = Nodeset::new(
            "x",
            vec![
                Node::new("L1", NodeKind::L, "a"),
                Node::new("L2", NodeKind::L, "b"),
                Node::new("TA1", NodeKind::TA, "Default Transition"),
                Node::new("I1", NodeKind::I, "p"),
                Node::new("I2", NodeKind::I, "q"),
                Node::new("RA1", NodeKind::RA, "Default Inference"),
                Node::new("YA1", NodeKind::YA, "Asserting"),
            ],
            vec![
                Edge::new("1", "L1", "TA1"),
                Edge::new("2", "TA1", "L2"),
                Edge::new("3", "I1", "RA1"),
                Edge::new("4", "RA1", "I2"),
                Edge::new("5", "TA1", "YA1"),
                Edge::new("6", "YA1", "RA1"),
            ],
        )
        .unwrap();
        assert_eq!(codes(&ns), vec![(ViolationCode::V4, "YA1".to_string())]);
    }

    #[test]
    fn structural_rules() {
        let ns = Nodeset::new(
            "x",
            vec![
                Node::new("I1", NodeKind::I, "p"),
                Node::new("I2", NodeKind::I, "q"),
                Node::new("L1", NodeKind::L, "a"),
                Node::new("L2", NodeKind::L, "b"),
                Node::new("CA1", NodeKind::CA, "Default Conflict"),
                Node::new("TA1", NodeKind::TA, "Default Transition"),
                Node::new("YA1", NodeKind::YA, "Default Transition"),
            ],
            vec![
                Edge::new("e1", "I1", "I2"),
                Edge::new("e2", "L1", "L2"),
                Edge::new("e3", "I1", "CA1"),
                Edge::new("e4", "L1", "TA1"),
                Edge::new("e5", "L2", "YA1"),
                Edge::new("e6", "YA1", "TA1"),
            ],
        )
        .unwrap();
        assert_eq!(
            codes(&ns),
            vec![
                (ViolationCode::V1, "CA1".into()),
                (ViolationCode::V2, "TA1".into()),
                (ViolationCode::V3, "YA1".into()),
                (ViolationCode::V5, "e1".into()),
                (ViolationCode::V5, "e2".into()),
            ]
        );
        assert_eq!(validate(&ns), validate(&ns));
    }
}
