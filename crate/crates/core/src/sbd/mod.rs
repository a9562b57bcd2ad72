//! Slot-boundary detection: a three-way B/I/O token classifier over a
//! contextual encoder, span extraction from label sequences, span pooling and
//! F1 scoring.

mod encoder;
mod f1;
mod labels;
mod spans;
mod tagger;

pub use crate::corpus::{BioLabel, BioUtterance};
pub use encoder::{load_encoder, EncoderBackend, Encoding, HashingEncoder, HashingEncoderConfig, CLS, SEP};
pub use f1::{score_f1, F1Scores};
pub use labels::extract_spans;
pub use spans::{
    group_by_turn, pool_spans, read_span_predictions, write_span_predictions, SpanPrediction, SpanRef,
};
pub use tagger::{train_tagger, EpochStats, TaggerModel, TrainConfig, TrainedTagger};
