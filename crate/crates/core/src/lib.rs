//! Dialogical argument mining over IAT nodesets.
//!
//! The crate follows the two-stage approach: stage 1 decides, for every
//! ordered pair of propositions, whether an argumentative relation exists and
//! then which one (RA, CA or MA); stage 2 labels the illocutionary anchoring
//! (YA) of locutions and transitions, using the surrounding locutions and
//! propositions as context. Around that sit the nodeset model ([`graph`]),
//! training-data generation with negative sampling ([`dataset`]), a built-in
//! linear classifier plus a remote-inference client ([`classifier`]), the
//! inference [`pipeline`] and the ARI/ILO [`scorer`].

pub mod classifier;
pub mod cli;
pub mod corpus;
pub mod dataset;
pub mod graph;
pub mod labels;
pub mod par;
pub mod pipeline;
pub mod presets;
pub mod rng;
pub mod scorer;
pub mod synth;
pub mod workflow;

pub use graph::{Edge, Node, NodeKind, Nodeset, SKind};
pub use labels::YaLabel;
