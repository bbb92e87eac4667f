use crate::graph::{NodeKind, Nodeset};

/// Every (anchor, target) pair a YA node could connect: (L, I), then
/// (TA, S) for every S-node, then (TA, I); each group in node order.
///
/// With `window = Some(w)`, (L, I) and (TA, I) pairs are kept only when the
/// two nodes are at most `w` positions apart in node order.
pub fn gen_ya_candidates(ns: &Nodeset, window: Option<usize>) -> Vec<(String, String)> {
    let ids = |pred: fn(NodeKind) -> bool| -> Vec<(usize, &str)> {
        ns.nodes()
            .iter()
            .enumerate()
            .filter(|(_, n)| pred(n.kind))
            .map(|(i, n)| (i, n.id.as_str()))
            .collect()
    };
    let locutions = ids(|k| k == NodeKind::L);
    let propositions = ids(|k| k == NodeKind::I);
    let transitions = ids(|k| k == NodeKind::TA);
    let relations = ids(NodeKind::is_s_node);
    let near = |a: usize, b: usize| window.is_none_or(|w| a.abs_diff(b) <= w);

    let mut out = Vec::new();
    for &(li, l) in &locutions {
        for &(ii, i) in &propositions {
            if near(li, ii) {
                out.push((l.to_string(), i.to_string()));
            }
        }
    }
    for &(_, ta) in &transitions {
        for &(_, s) in &relations {
            out.push((ta.to_string(), s.to_string()));
        }
    }
    for &(ti, ta) in &transitions {
        for &(ii, i) in &propositions {
            if near(ti, ii) {
                out.push((ta.to_string(), i.to_string()));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Edge, Node};

    fn nodes(spec: &[(&str, NodeKind)]) -> Nodeset {
        Nodeset::new(
            "c",
            spec.iter().map(|(id, k)| Node::new(*id, *k, "t")).collect(),
            Vec::<Edge>::new(),
        )
        .unwrap()
    }

    #[test]
    fn counting() {
        use NodeKind::*;
        let ns = nodes(&[("L1", L), ("L2", L), ("I1", I), ("I2", I)]);
        assert_eq!(gen_ya_candidates(&ns, None).len(), 4);
        let ns = nodes(&[("L1", L), ("L2", L), ("I1", I), ("I2", I), ("T1", TA), ("R1", RA)]);
        let c = gen_ya_candidates(&ns, None);
        assert_eq!(c.len(), 7);
        assert_eq!(c[4], ("T1".to_string(), "R1".to_string()));
        assert!(gen_ya_candidates(&Nodeset::empty("e"), None).is_empty());
    }

    #[test]
    fn window_limits_distance() {
        use NodeKind::*;
        let ns = nodes(&[("L1", L), ("I1", I), ("L2", L), ("I2", I), ("T1", TA)]);
        let c = gen_ya_candidates(&ns, Some(1));
        assert_eq!(
            c,
            vec![
                ("L1".to_string(), "I1".to_string()),
                ("L2".to_string(), "I1".to_string()),
                ("L2".to_string(), "I2".to_string()),
                ("T1".to_string(), "I2".to_string()),
            ]
        );
    }
}
