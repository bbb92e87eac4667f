use super::{PipelineError, SPrediction, YaPrediction};
use crate::graph::{Edge, Node, NodeKind, Nodeset};
use std::collections::{HashMap, HashSet};

/// Hands out numeric ids above every numeric id already in use.
struct IdAllocator {
    next: u64,
    taken: HashSet<String>,
}

impl IdAllocator {
    fn new(ns: &Nodeset) -> Self {
        let taken: HashSet<String> = ns
            .nodes()
            .iter()
            .map(|n| n.id.clone())
            .chain(ns.edges().iter().map(|e| e.id.clone()))
            .collect();
        let max = taken.iter().filter_map(|id| id.parse::<u64>().ok()).max().unwrap_or(0);
        IdAllocator {
            next: max + 1,
            taken,
        }
    }

    fn fresh(&mut self) -> String {
        loop {
            let id = self.next.to_string();
            self.next += 1;
            if self.taken.insert(id.clone()) {
                return id;
            }
        }
    }
}

/// Builds the output nodeset: the input's L, I and TA nodes with the edges
/// between locutions and transitions, one new S-node per S prediction and
/// one new YA node per YA prediction.
///
/// Ids are allocated S-nodes first, so a view built from the S predictions
/// alone assigns the same S ids. YA predictions may target I-nodes or those
/// new S-nodes.
pub fn materialize(
    ns: &Nodeset,
    s_preds: &[SPrediction],
    ya_preds: &[YaPrediction],
) -> Result<Nodeset, PipelineError> {
    let mut ids = IdAllocator::new(ns);
    let mut nodes: Vec<Node> = ns
        .nodes()
        .iter()
        .filter(|n| matches!(n.kind, NodeKind::L | NodeKind::I | NodeKind::TA))
        .cloned()
        .collect();
    let mut kinds: HashMap<String, NodeKind> = nodes.iter().map(|n| (n.id.clone(), n.kind)).collect();
    let mut edges: Vec<Edge> = ns
        .edges()
        .iter()
        .filter(|e| {
            let from = kinds.get(&e.from).copied();
            let to = kinds.get(&e.to).copied();
            matches!(
                (from, to),
                (Some(NodeKind::L), Some(NodeKind::TA)) | (Some(NodeKind::TA), Some(NodeKind::L))
            )
        })
        .cloned()
        .collect();

    for p in s_preds {
        for end in [&p.head, &p.tail] {
            if kinds.get(end.as_str()) != Some(&NodeKind::I) {
                return Err(PipelineError::UnknownReference(end.clone()));
            }
        }
        if p.head == p.tail {
            return Err(PipelineError::InvalidPrediction(format!(
                "S prediction joins {} to itself",
                p.head
            )));
        }
        let s_id = ids.fresh();
        nodes.push(Node::new(s_id.clone(), p.kind.node_kind(), p.kind.default_text()));
        kinds.insert(s_id.clone(), p.kind.node_kind());
        edges.push(Edge::new(ids.fresh(), p.head.clone(), s_id.clone()));
        edges.push(Edge::new(ids.fresh(), s_id, p.tail.clone()));
    }

    for p in ya_preds {
        let anchor = kinds.get(p.anchor.as_str()).copied();
        let target = kinds.get(p.target.as_str()).copied();
        let (anchor, target) = match (anchor, target) {
            (Some(a), Some(t)) => (a, t),
            (None, _) => return Err(PipelineError::UnknownReference(p.anchor.clone())),
            (_, None) => return Err(PipelineError::UnknownReference(p.target.clone())),
        };
        if !p.label.is_legal(anchor, target) {
            return Err(PipelineError::InvalidPrediction(format!(
                "{} is not allowed from {anchor} {} to {target} {}",
                p.label, p.anchor, p.target
            )));
        }
        let ya_id = ids.fresh();
        nodes.push(Node::new(ya_id.clone(), NodeKind::YA, p.label.as_str()));
        edges.push(Edge::new(ids.fresh(), p.anchor.clone(), ya_id.clone()));
        edges.push(Edge::new(ids.fresh(), ya_id, p.target.clone()));
    }

    Ok(Nodeset::with_extras(
        ns.id(),
        nodes,
        edges,
        ns.locutions().cloned(),
        ns.extra().clone(),
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{fixtures, validate, SKind};
    use crate::labels::YaLabel;

    fn s(head: &str, kind: SKind, tail: &str) -> SPrediction {
        SPrediction {
            head: head.into(),
            kind,
            tail: tail.into(),
            existence: 1.0,
            type_score: 1.0,
        }
    }

    #[test]
    fn no_predictions_strip_relations() {
        let out = materialize(&fixtures::argued(), &[], &[]).unwrap();
        let ids: Vec<_> = out.nodes().iter().map(|n| n.id.as_str()).collect();
        assert_eq!(ids, vec!["L1", "L2", "TA1", "I1", "I2"]);
        let edges: Vec<_> = out.edges().iter().map(|e| e.id.as_str()).collect();
        assert_eq!(edges, vec!["E1", "E2"]);
    }

    #[test]
    fn one_inference() {
        let out = materialize(&fixtures::argued(), &[s("I1", SKind::RA, "I2")], &[]).unwrap();
        let ra: Vec<_> = out.nodes_of_kind(NodeKind::RA).collect();
        assert_eq!(ra.len(), 1);
        assert_eq!(ra[0].text, "Default Inference");
        let st = out.s_node_structures().unwrap();
        assert_eq!((st[0].premises.clone(), st[0].conclusions.clone()), (vec!["I1".to_string()], vec!["I2".to_string()]));
        assert!(validate(&out).is_empty());
    }

    #[test]
    fn ya_on_new_relation() {
        let ns = fixtures::argued();
        let view = materialize(&ns, &[s("I1", SKind::CA, "I2")], &[]).unwrap();
        let ca = view.nodes_of_kind(NodeKind::CA).next().unwrap().id.clone();
        let ya = YaPrediction {
            anchor: "TA1".into(),
            anchor_kind: NodeKind::TA,
            target: ca.clone(),
            target_kind: NodeKind::CA,
            label: YaLabel::Disagreeing,
            score: 0.9,
        };
        let out = materialize(&ns, &[s("I1", SKind::CA, "I2")], std::slice::from_ref(&ya)).unwrap();
        assert!(validate(&out).is_empty());
        assert_eq!(out.nodes_of_kind(NodeKind::CA).next().unwrap().id, ca);
        assert_eq!(out.ya_anchorings().unwrap()[0].target_id, ca);

        // The gold RA id no longer exists in the output.
        let stale = YaPrediction {
            target: "RA1".into(),
            target_kind: NodeKind::RA,
            ..ya
        };
        assert_eq!(
            materialize(&ns, &[], &[stale]).unwrap_err().to_string(),
            PipelineError::UnknownReference("RA1".into()).to_string()
        );
    }

    #[test]
    fn fresh_ids_skip_numeric_collisions() {
        let ns = Nodeset::new(
            "n",
            vec![
                Node::new("7", NodeKind::I, "a"),
                Node::new("9", NodeKind::I, "b"),
                Node::new("x", NodeKind::L, "c"),
            ],
            vec![],
        )
        .unwrap();
        let out = materialize(&ns, &[s("7", SKind::MA, "9")], &[]).unwrap();
        assert_eq!(out.nodes()[3].id, "10");
        assert_eq!(out.edges()[0].id, "11");
    }
}
