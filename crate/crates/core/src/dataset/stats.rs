use crate::graph::{Nodeset, SKind};
use serde::Serialize;
use std::ops::AddAssign;

/// How S-node and YA-node "samples" are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CountingRule {
    /// One sample per directed premise x conclusion pair of each S-node,
    /// matching the number of step-2 training examples.
    #[default]
    PairProduct,
    /// One sample per S-node.
    PerNode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct CorpusStats {
    pub nodesets: usize,
    pub ra: usize,
    pub ca: usize,
    pub ma: usize,
    pub ya: usize,
}

impl AddAssign for CorpusStats {
    fn add_assign(&mut self, rhs: Self) {
        self.nodesets += rhs.nodesets;
        self.ra += rhs.ra;
        self.ca += rhs.ca;
        self.ma += rhs.ma;
        self.ya += rhs.ya;
    }
}

impl CorpusStats {
    pub fn of(ns: &Nodeset, rule: CountingRule) -> CorpusStats {
        let mut st = CorpusStats {
            nodesets: 1,
            ..Default::default()
        };
        for s in ns.s_node_structures_lenient() {
            let n = match rule {
                CountingRule::PairProduct => s
                    .premises
                    .iter()
                    .flat_map(|p| s.conclusions.iter().filter(move |c| *c != p))
                    .count(),
                CountingRule::PerNode => 1,
            };
            match s.kind {
                SKind::RA => st.ra += n,
                SKind::CA => st.ca += n,
                SKind::MA => st.ma += n,
            }
        }
        st.ya = ns.ya_anchorings_lenient().len();
        st
    }
}

/// Relation counts over a corpus. Irregular nodesets contribute whatever
/// structure they have; run `validate` to see what was skipped.
pub fn corpus_stats<'a, I>(nodesets: I, rule: CountingRule) -> CorpusStats
where
    I: IntoIterator<Item = &'a Nodeset>,
{
    let mut total = CorpusStats::default();
    for ns in nodesets {
        total += CorpusStats::of(ns, rule);
    }
    total
}
