//! Illocutionary (YA) label vocabulary and which labels may connect which
//! node kinds.

use crate::graph::NodeKind;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// YA labels in task order. `None` (index 0) marks the absence of an
/// illocutionary relation. "Challenging" and "Disagreeing" are one label each
/// regardless of the anchor kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum YaLabel {
    None,
    Asserting,
    Challenging,
    PureQuestioning,
    AssertiveQuestioning,
    RhetoricalQuestioning,
    Arguing,
    Disagreeing,
    DefaultIllocuting,
    Restating,
    Agreeing,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown YA label {0:?}")]
pub struct UnknownYaLabel(pub String);

/// Which side of the anchoring the relation lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AnchorPattern {
    /// Locution to proposition.
    LocutionProposition,
    /// Transition to argumentative relation.
    TransitionRelation,
    /// Transition to proposition.
    TransitionProposition,
}

impl AnchorPattern {
    pub fn of(anchor: NodeKind, target: NodeKind) -> Option<AnchorPattern> {
        match (anchor, target) {
            (NodeKind::L, NodeKind::I) => Some(AnchorPattern::LocutionProposition),
            (NodeKind::TA, t) if t.is_s_node() => Some(AnchorPattern::TransitionRelation),
            (NodeKind::TA, NodeKind::I) => Some(AnchorPattern::TransitionProposition),
            _ => None,
        }
    }

    pub fn labels(self) -> &'static [YaLabel] {
        use YaLabel::*;
        match self {
            AnchorPattern::LocutionProposition => &[
                Asserting,
                Challenging,
                PureQuestioning,
                AssertiveQuestioning,
                RhetoricalQuestioning,
            ],
            AnchorPattern::TransitionRelation => &[Arguing, Disagreeing, DefaultIllocuting, Restating],
            AnchorPattern::TransitionProposition => &[Agreeing, Challenging, Disagreeing],
        }
    }
}

impl YaLabel {
    pub const ALL: [YaLabel; 11] = [
        YaLabel::None,
        YaLabel::Asserting,
        YaLabel::Challenging,
        YaLabel::PureQuestioning,
        YaLabel::AssertiveQuestioning,
        YaLabel::RhetoricalQuestioning,
        YaLabel::Arguing,
        YaLabel::Disagreeing,
        YaLabel::DefaultIllocuting,
        YaLabel::Restating,
        YaLabel::Agreeing,
    ];

    /// Surface form as written in YA node texts.
    pub fn as_str(self) -> &'static str {
        match self {
            YaLabel::None => "None",
            YaLabel::Asserting => "Asserting",
            YaLabel::Challenging => "Challenging",
            YaLabel::PureQuestioning => "Pure Questioning",
            YaLabel::AssertiveQuestioning => "Assertive Questioning",
            YaLabel::RhetoricalQuestioning => "Rhetorical Questioning",
            YaLabel::Arguing => "Arguing",
            YaLabel::Disagreeing => "Disagreeing",
            YaLabel::DefaultIllocuting => "Default Illocuting",
            YaLabel::Restating => "Restating",
            YaLabel::Agreeing => "Agreeing",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<YaLabel> {
        YaLabel::ALL.get(i).copied()
    }

    /// Whether a YA node with this label may connect `anchor` to `target`.
    /// `None` is never legal as a materialized label.
    pub fn is_legal(self, anchor: NodeKind, target: NodeKind) -> bool {
        AnchorPattern::of(anchor, target).is_some_and(|p| p.labels().contains(&self))
    }
}

impl fmt::Display for YaLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for YaLabel {
    type Err = UnknownYaLabel;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        YaLabel::ALL
            .iter()
            .copied()
            .find(|l| l.as_str() == s)
            .ok_or_else(|| UnknownYaLabel(s.to_string()))
    }
}
