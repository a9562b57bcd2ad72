use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::encoder::Encoding;
use crate::embedding_file;
use crate::error::{Error, Result};

/// Identity of a detected span within a corpus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SpanRef {
    pub dialogue_id: String,
    pub turn: usize,
    pub start: usize,
    pub end: usize,
}

impl fmt::Display for SpanRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}#{}[{}..={}]", self.dialogue_id, self.turn, self.start, self.end)
    }
}

/// A detected slot mention with its pooled contextual embedding.
#[derive(Debug, Clone, PartialEq)]
pub struct SpanPrediction {
    pub dialogue_id: String,
    pub turn_index: usize,
    pub token_start: usize,
    /// Inclusive.
    pub token_end: usize,
    pub text: String,
    pub embedding: Vec<f32>,
}

impl SpanPrediction {
    pub fn span_ref(&self) -> SpanRef {
        SpanRef {
            dialogue_id: self.dialogue_id.clone(),
            turn: self.turn_index,
            start: self.token_start,
            end: self.token_end,
        }
    }
}

/// Mean of the hidden states of every subword inside each span.
///
/// Truncated words contribute nothing; a span with no encoded subword at all
/// is an error.
pub fn pool_spans(enc: &Encoding, spans: &[(usize, usize)]) -> Result<Vec<Vec<f32>>> {
    let dim = enc.hidden.first().map_or(0, Vec::len);
    spans
        .iter()
        .map(|&(start, end)| {
            if start > end || end >= enc.word_pieces.len() {
                return Err(Error::invalid(format!(
                    "span ({start}, {end}) outside utterance of {} words",
                    enc.word_pieces.len()
                )));
            }
            let rows: Vec<usize> = enc.word_pieces[start..=end].iter().flat_map(|r| r.clone()).collect();
            if rows.is_empty() {
                return Err(Error::invalid(format!("span ({start}, {end}) lies in the truncated tail")));
            }
            let mut acc = vec![0.0f64; dim];
            for &r in &rows {
                for (a, x) in acc.iter_mut().zip(&enc.hidden[r]) {
                    *a += f64::from(*x);
                }
            }
            Ok(acc.into_iter().map(|a| (a / rows.len() as f64) as f32).collect())
        })
        .collect()
}

/// Span refs keyed by dialogue then turn.
pub fn group_by_turn(spans: &[SpanPrediction]) -> HashMap<String, BTreeMap<usize, Vec<SpanRef>>> {
    let mut out: HashMap<String, BTreeMap<usize, Vec<SpanRef>>> = HashMap::new();
    for s in spans {
        out.entry(s.dialogue_id.clone())
            .or_default()
            .entry(s.turn_index)
            .or_default()
            .push(s.span_ref());
    }
    out
}

#[derive(Debug, Serialize, Deserialize)]
struct SpanLine {
    dialogue_id: String,
    turn: usize,
    start: usize,
    end: usize,
    text: String,
    emb_row: usize,
}

/// Writes the JSONL index and its SPEM embedding sidecar.
pub fn write_span_predictions(jsonl: impl AsRef<Path>, matrix: impl AsRef<Path>, spans: &[SpanPrediction]) -> Result<()> {
    let jsonl = jsonl.as_ref();
    let file = File::create(jsonl).map_err(|e| Error::io(jsonl, e))?;
    let mut out = BufWriter::new(file);
    for (row, s) in spans.iter().enumerate() {
        let line = SpanLine {
            dialogue_id: s.dialogue_id.clone(),
            turn: s.turn_index,
            start: s.token_start,
            end: s.token_end,
            text: s.text.clone(),
            emb_row: row,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n").map_err(|e| Error::io(jsonl, e))?;
    }
    out.flush().map_err(|e| Error::io(jsonl, e))?;
    let rows: Vec<&[f32]> = spans.iter().map(|s| s.embedding.as_slice()).collect();
    let cols = spans.first().map_or(0, |s| s.embedding.len());
    embedding_file::write_matrix(matrix, cols, &rows)
}

pub fn read_span_predictions(jsonl: impl AsRef<Path>, matrix: impl AsRef<Path>) -> Result<Vec<SpanPrediction>> {
    let jsonl = jsonl.as_ref();
    let mat = embedding_file::read_matrix(matrix.as_ref())?;
    let file = File::open(jsonl).map_err(|e| Error::io(jsonl, e))?;
    let mut spans = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(jsonl, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: SpanLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        let embedding = mat
            .row(rec.emb_row)
            .ok_or_else(|| Error::format(jsonl, format!("emb_row {} beyond {} matrix rows", rec.emb_row, mat.rows())))?
            .to_vec();
        spans.push(SpanPrediction {
            dialogue_id: rec.dialogue_id,
            turn_index: rec.turn,
            token_start: rec.start,
            token_end: rec.end,
            text: rec.text,
            embedding,
        });
    }
    Ok(spans)
}
