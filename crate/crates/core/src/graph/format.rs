use super::{Edge, GraphError, Node, NodeKind, Nodeset};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::collections::BTreeMap;

#[derive(Serialize, Deserialize)]
struct RawDocument {
    #[serde(default)]
    nodes: Vec<RawNode>,
    #[serde(default)]
    edges: Vec<RawEdge>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    locutions: Option<Value>,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct RawNode {
    #[serde(rename = "nodeID", deserialize_with = "id_string")]
    node_id: String,
    #[serde(default)]
    text: String,
    #[serde(rename = "type")]
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    timestamp: Option<String>,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

#[derive(Serialize, Deserialize)]
struct RawEdge {
    #[serde(rename = "edgeID", deserialize_with = "id_string")]
    edge_id: String,
    #[serde(rename = "fromID", deserialize_with = "id_string")]
    from_id: String,
    #[serde(rename = "toID", deserialize_with = "id_string")]
    to_id: String,
    #[serde(flatten)]
    extra: BTreeMap<String, Value>,
}

// Some corpus exports write numeric ids.
fn id_string<'de, D: serde::Deserializer<'de>>(d: D) -> Result<String, D::Error> {
    match Value::deserialize(d)? {
        Value::String(s) => Ok(s),
        Value::Number(n) => Ok(n.to_string()),
        other => Err(serde::de::Error::custom(format!(
            "expected string or number id, found {other}"
        ))),
    }
}

/// Parses an AIF nodeset document. `id` names the nodeset (usually the file
/// stem, e.g. `nodeset18321`).
pub fn parse_nodeset(id: &str, text: &str) -> Result<Nodeset, GraphError> {
    let raw: RawDocument =
        serde_json::from_str(text).map_err(|e| GraphError::MalformedDocument(e.to_string()))?;
    let nodes = raw
        .nodes
        .into_iter()
        .map(|n| {
            let kind: NodeKind = n.kind.parse()?;
            Ok(Node {
                id: n.node_id,
                kind,
                text: n.text,
                timestamp: n.timestamp,
                extra: n.extra,
            })
        })
        .collect::<Result<Vec<_>, GraphError>>()?;
    let edges = raw
        .edges
        .into_iter()
        .map(|e| Edge {
            id: e.edge_id,
            from: e.from_id,
            to: e.to_id,
            extra: e.extra,
        })
        .collect();
    Nodeset::with_extras(id, nodes, edges, raw.locutions, raw.extra)
}

/// Canonical pretty-printed document: fixed key order for known fields,
/// sorted order for everything else, trailing newline.
pub fn serialize_nodeset(ns: &Nodeset) -> String {
    let raw = RawDocument {
        nodes: ns
            .nodes()
            .iter()
            .map(|n| RawNode {
                node_id: n.id.clone(),
                text: n.text.clone(),
                kind: n.kind.as_str().to_string(),
                timestamp: n.timestamp.clone(),
                extra: n.extra.clone(),
            })
            .collect(),
        edges: ns
            .edges()
            .iter()
            .map(|e| RawEdge {
                edge_id: e.id.clone(),
                from_id: e.from.clone(),
                to_id: e.to.clone(),
                extra: e.extra.clone(),
            })
            .collect(),
        locutions: ns.locutions().cloned(),
        extra: ns.extra().clone(),
    };
    let mut out = serde_json::to_string_pretty(&raw).expect("nodeset serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures;
    use proptest::prelude::*;

    const FIXTURE: &str = r#"{
        "nodes": [
            {"nodeID": "L1", "text": "we should act", "type": "L", "timestamp": "2020-05-28 19:00:00"},
            {"nodeID": "I1", "text": "we should act", "type": "I"},
            {"nodeID": "YA1", "text": "Asserting", "type": "YA", "scheme": "Asserting"}
        ],
        "edges": [
            {"edgeID": "E1", "fromID": "L1", "toID": "YA1"},
            {"edgeID": "E2", "fromID": "YA1", "toID": "I1", "formEdgeID": null}
        ],
        "locutions": [{"personID": "7", "nodeID": "L1"}]
    }"#;

    #[test]
    fn parses_fixture() {
        let ns = parse_nodeset("nodeset1", FIXTURE).unwrap();
        assert_eq!(ns.nodes().len(), 3);
        assert_eq!(ns.edges().len(), 2);
        let kinds: Vec<_> = ns.nodes().iter().map(|n| n.kind).collect();
        assert_eq!(kinds, vec![NodeKind::L, NodeKind::I, NodeKind::YA]);
        assert_eq!(ns.nodes()[0].timestamp.as_deref(), Some("2020-05-28 19:00:00"));
        assert_eq!(ns.nodes()[2].extra["scheme"], Value::from("Asserting"));
        assert!(ns.edges()[1].extra.contains_key("formEdgeID"));
    }

    #[test]
    fn empty_document() {
        let ns = parse_nodeset("e", r#"{"nodes": [], "edges": []}"#).unwrap();
        assert!(ns.nodes().is_empty() && ns.edges().is_empty());
        assert_eq!(
            serialize_nodeset(&ns),
            "{\n  \"nodes\": [],\n  \"edges\": []\n}\n"
        );
    }

    #[test]
    fn parse_errors_name_the_offender() {
        let bad_kind = r#"{"nodes": [{"nodeID": "P1", "text": "x", "type": "PA"}], "edges": []}"#;
        assert_eq!(
            parse_nodeset("x", bad_kind).unwrap_err(),
            GraphError::UnknownNodeKind("PA".into())
        );
        let lower = r#"{"nodes": [{"nodeID": "P1", "text": "x", "type": "i"}], "edges": []}"#;
        assert!(matches!(parse_nodeset("x", lower), Err(GraphError::UnknownNodeKind(_))));
        let dangling = r#"{"nodes": [{"nodeID": "I1", "text": "x", "type": "I"}],
            "edges": [{"edgeID": "E", "fromID": "I1", "toID": "X9"}]}"#;
        assert_eq!(
            parse_nodeset("x", dangling).unwrap_err(),
            GraphError::DanglingEdgeEndpoint("X9".into())
        );
        let dup = r#"{"nodes": [{"nodeID": "I1", "text": "x", "type": "I"},
            {"nodeID": "I1", "text": "y", "type": "I"}], "edges": []}"#;
        assert_eq!(
            parse_nodeset("x", dup).unwrap_err(),
            GraphError::DuplicateNodeId("I1".into())
        );
        assert!(matches!(
            parse_nodeset("x", "{\"nodes\": [}"),
            Err(GraphError::MalformedDocument(_))
        ));
    }

    #[test]
    fn numeric_ids_become_strings() {
        let doc = r#"{"nodes": [{"nodeID": 12, "text": "x", "type": "I"},
            {"nodeID": 13, "text": "y", "type": "L"}],
            "edges": [{"edgeID": 1, "fromID": 13, "toID": 12}]}"#;
        let ns = parse_nodeset("n", doc).unwrap();
        assert_eq!(ns.edges()[0].from, "13");
    }

    #[test]
    fn round_trip_keeps_unknown_fields() {
        let ns = parse_nodeset("nodeset1", FIXTURE).unwrap();
        let text = serialize_nodeset(&ns);
        let again = parse_nodeset("nodeset1", &text).unwrap();
        assert_eq!(again, ns);
        assert_eq!(again.locutions(), ns.locutions());
        assert_eq!(serialize_nodeset(&again), text);
        assert!(text.find("\"nodeID\"").unwrap() < text.find("\"type\"").unwrap());

        let built = fixtures::argued();
        assert_eq!(parse_nodeset("nodeset2", &serialize_nodeset(&built)).unwrap(), built);
    }

    fn arb_nodeset() -> impl Strategy<Value = Nodeset> {
        let kind = prop::sample::select(NodeKind::ALL.to_vec());
        (
            prop::collection::vec((kind, "[a-z ]{1,12}", prop::option::of("[0-9:]{4}")), 0..12),
            prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 0..20),
            prop::option::of(prop::collection::vec(("[0-9]{1,3}", "[a-z]{1,4}"), 0..4)),
        )
            .prop_map(|(nodes, edges, locutions)| {
                let nodes: Vec<Node> = nodes
                    .into_iter()
                    .enumerate()
                    .map(|(i, (kind, text, ts))| {
                        let mut n = Node::new(format!("{}", 100 + i), kind, text);
                        n.timestamp = ts;
                        n
                    })
                    .collect();
                let edges = if nodes.len() < 2 {
                    Vec::new()
                } else {
                    edges
                        .into_iter()
                        .enumerate()
                        .filter_map(|(i, (a, b))| {
                            let (a, b) = (a.index(nodes.len()), b.index(nodes.len()));
                            (a != b).then(|| Edge::new(format!("e{i}"), nodes[a].id.clone(), nodes[b].id.clone()))
                        })
                        .collect()
                };
                let locutions = locutions.map(|l| {
                    Value::Array(
                        l.into_iter()
                            .map(|(p, n)| serde_json::json!({"personID": p, "nodeID": n}))
                            .collect(),
                    )
                });
                Nodeset::with_extras("nodeset9", nodes, edges, locutions, BTreeMap::new()).unwrap()
            })
    }

    proptest! {
        #[test]
        fn serialize_then_parse_is_identity(ns in arb_nodeset()) {
            let text = serialize_nodeset(&ns);
            let back = parse_nodeset("nodeset9", &text).unwrap();
            prop_assert_eq!(&back, &ns);
            prop_assert_eq!(serialize_nodeset(&back), text);
        }
    }
}
