//! Unsupervised extraction of dialogue-state transition structures from
//! task-oriented dialogue corpora.
//!
//! The pipeline runs in five steps:
//!
//! 1. [`corpus`] loads dialogues and converts slot annotations to nameless BIO tags.
//! 2. [`sbd`] trains a slot-boundary tagger over a pluggable contextual encoder,
//!    extracts spans and pools their hidden states.
//! 3. [`slotcluster`] groups span embeddings into `N` approximate slot types.
//! 4. [`statetrack`] counts per-group modifications turn by turn, yielding one
//!    integer state vector per turn, and [`structure`] turns the labeled corpus
//!    into a transition graph.
//! 5. [`augment`] uses the state labels to re-pair contexts with other valid
//!    responses (MRDA) or with frequent responses (MFS).
//!
//! [`evalmetrics`] and [`baselines`] supply the scoring and reference methods,
//! and [`pipeline`] wires everything into reproducible runs.

pub mod augment;
pub mod baselines;
pub mod corpus;
pub mod embedding_file;
pub mod error;
pub mod evalmetrics;
pub mod pipeline;
pub mod sbd;
pub mod seed;
pub mod slotcluster;
pub mod statetrack;
pub mod structure;
pub mod synthetic;
pub mod text;

pub use error::{Error, Result};
pub use statetrack::DialogueState;
