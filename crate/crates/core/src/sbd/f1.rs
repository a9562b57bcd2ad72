use std::collections::HashSet;

use super::labels::extract_spans;
use crate::corpus::{BioLabel, BioUtterance};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct F1Scores {
    /// Exact-match span F1.
    pub slot: f64,
    /// Token F1 with `{B, I}` as the positive class.
    pub token: f64,
}

#[derive(Default)]
struct Counts {
    tp: usize,
    fp: usize,
    fn_: usize,
}

impl Counts {
    fn f1(&self) -> f64 {
        if self.tp + self.fp + self.fn_ == 0 {
            return 1.0;
        }
        2.0 * self.tp as f64 / (2 * self.tp + self.fp + self.fn_) as f64
    }
}

/// Micro-averaged slot and token F1 over a corpus.
pub fn score_f1(gold: &[BioUtterance], predicted: &[Vec<BioLabel>]) -> Result<F1Scores> {
    if gold.len() != predicted.len() {
        return Err(Error::invalid(format!(
            "{} gold utterances but {} predictions",
            gold.len(),
            predicted.len()
        )));
    }
    let mut slot = Counts::default();
    let mut token = Counts::default();
    for (i, (g, p)) in gold.iter().zip(predicted).enumerate() {
        if g.labels.len() != p.len() {
            return Err(Error::invalid(format!(
                "utterance {i}: {} gold labels but {} predicted",
                g.labels.len(),
                p.len()
            )));
        }
        let gold_spans: HashSet<_> = extract_spans(&g.labels).into_iter().collect();
        let pred_spans: HashSet<_> = extract_spans(p).into_iter().collect();
        let hit = gold_spans.intersection(&pred_spans).count();
        slot.tp += hit;
        slot.fp += pred_spans.len() - hit;
        slot.fn_ += gold_spans.len() - hit;
        for (gl, pl) in g.labels.iter().zip(p) {
            match (gl.is_slot(), pl.is_slot()) {
                (true, true) => token.tp += 1,
                (false, true) => token.fp += 1,
                (true, false) => token.fn_ += 1,
                (false, false) => {}
            }
        }
    }
    Ok(F1Scores {
        slot: slot.f1(),
        token: token.f1(),
    })
}
