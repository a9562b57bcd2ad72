//! Reference structure extractors: random states, utterance-embedding
//! clustering and a noun-based slot detector.

mod pos;

pub use pos::{PosTag, PosTagger, RuleBasedPosTagger};

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::corpus::{Dialogue, Turn};
use crate::embedding_file;
use crate::error::{Error, Result};
use crate::evalmetrics::Assignment;
use crate::sbd::EncoderBackend;
use crate::slotcluster::{cluster_points, Algorithm};
use crate::text::tokenize;

/// Uniform i.i.d. labels in `1..=n_states`.
pub fn random_states(n_items: usize, n_states: usize, seed: u64) -> Result<Assignment> {
    if n_states == 0 {
        return Err(Error::invalid("random baseline needs at least one state"));
    }
    let mut rng = crate::seed::rng(seed);
    Ok(Assignment(
        (0..n_items).map(|_| rng.gen_range(1..=n_states as i64)).collect(),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddingSource {
    Cls,
    MeanSlotWords,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UtteranceEmbedding {
    pub dialogue_id: String,
    pub turn: usize,
    pub vector: Vec<f32>,
    pub source: EmbeddingSource,
}

/// Which text of a turn is fed to the encoder.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UtteranceText {
    /// User utterance followed by the system reply.
    #[default]
    Exchange,
    User,
}

impl FromStr for UtteranceText {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exchange" => Ok(UtteranceText::Exchange),
            "user" => Ok(UtteranceText::User),
            other => Err(Error::invalid(format!("unknown utterance text `{other}` (exchange|user)"))),
        }
    }
}

impl fmt::Display for UtteranceText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            UtteranceText::Exchange => "exchange",
            UtteranceText::User => "user",
        })
    }
}

pub fn turn_words(turn: &Turn, text: UtteranceText) -> Vec<String> {
    let mut words = turn.user_tokens.clone();
    if text == UtteranceText::Exchange {
        words.extend(tokenize(&turn.system_text));
    }
    words
}

/// The encoder's CLS vector for one turn.
pub fn cls_embedding(
    dialogue_id: &str,
    turn: &Turn,
    text: UtteranceText,
    encoder: &dyn EncoderBackend,
) -> Result<UtteranceEmbedding> {
    let enc = encoder.encode(&turn_words(turn, text))?;
    Ok(UtteranceEmbedding {
        dialogue_id: dialogue_id.to_string(),
        turn: turn.index,
        vector: enc.cls().to_vec(),
        source: EmbeddingSource::Cls,
    })
}

/// CLS embeddings for every turn of every dialogue, in corpus order.
pub fn corpus_cls_embeddings(
    dialogues: &[Dialogue],
    text: UtteranceText,
    encoder: &dyn EncoderBackend,
) -> Result<Vec<UtteranceEmbedding>> {
    dialogues
        .iter()
        .flat_map(|d| d.turns.iter().map(move |t| (d, t)))
        .map(|(d, t)| cls_embedding(&d.dialogue_id, t, text, encoder))
        .collect()
}

/// One cluster per turn, reusing the slot clustering backends.
pub fn cluster_utterances(
    embeddings: &[UtteranceEmbedding],
    n_clusters: usize,
    algorithm: Algorithm,
    seed: u64,
) -> Result<Assignment> {
    let points: Vec<&[f32]> = embeddings.iter().map(|e| e.vector.as_slice()).collect();
    let c = cluster_points(&points, n_clusters, algorithm, seed)?;
    Ok(c.labels.into())
}

/// Indices of user words tagged as common or proper nouns.
pub fn heuristic_slot_words(turn: &Turn, backend: Option<&dyn PosTagger>) -> Result<Vec<usize>> {
    let backend = backend.ok_or_else(|| {
        Error::BackendUnavailable(
            "no part-of-speech backend configured; pass a PosTagger such as RuleBasedPosTagger".into(),
        )
    })?;
    let tags = backend.tag(&turn.user_tokens);
    Ok(tags
        .iter()
        .enumerate()
        .filter(|(_, t)| t.is_noun())
        .map(|(i, _)| i)
        .collect())
}

/// Averages each chosen word over its subwords, then averages the words.
///
/// `words` is the sequence passed to the encoder and `indices` point into
/// it. An empty selection yields the zero vector.
pub fn mean_slot_word_embedding(
    dialogue_id: &str,
    turn: usize,
    words: &[String],
    indices: &[usize],
    encoder: &dyn EncoderBackend,
) -> Result<UtteranceEmbedding> {
    let dim = encoder.hidden_size();
    let mut idx = indices.to_vec();
    idx.sort_unstable();
    idx.dedup();
    if let Some(&bad) = idx.iter().find(|&&i| i >= words.len()) {
        return Err(Error::invalid(format!("word index {bad} beyond {} words", words.len())));
    }
    let mut acc = vec![0.0f64; dim];
    let mut used = 0usize;
    if !idx.is_empty() {
        let enc = encoder.encode(words)?;
        for &w in &idx {
            let range = enc.word_pieces[w].clone();
            if range.is_empty() {
                log::warn!("{dialogue_id}#{turn}: word {w} truncated by the encoder, skipped");
                continue;
            }
            let len = range.len() as f64;
            let mut word = vec![0.0f64; dim];
            for row in &enc.hidden[range] {
                for (a, &x) in word.iter_mut().zip(row) {
                    *a += f64::from(x);
                }
            }
            for (a, x) in acc.iter_mut().zip(word) {
                *a += x / len;
            }
            used += 1;
        }
    }
    if used == 0 {
        log::warn!("{dialogue_id}#{turn}: no slot words, using the zero vector");
        return Ok(UtteranceEmbedding {
            dialogue_id: dialogue_id.to_string(),
            turn,
            vector: vec![0.0; dim],
            source: EmbeddingSource::MeanSlotWords,
        });
    }
    Ok(UtteranceEmbedding {
        dialogue_id: dialogue_id.to_string(),
        turn,
        vector: acc.into_iter().map(|x| (x / used as f64) as f32).collect(),
        source: EmbeddingSource::MeanSlotWords,
    })
}

#[derive(Serialize, Deserialize)]
struct IndexLine {
    dialogue_id: String,
    turn: usize,
    source: EmbeddingSource,
    emb_row: usize,
}

/// Writes a JSONL index and a SPEM matrix of the vectors.
pub fn write_utterance_embeddings(
    jsonl: impl AsRef<Path>,
    matrix: impl AsRef<Path>,
    embeddings: &[UtteranceEmbedding],
) -> Result<()> {
    let jsonl = jsonl.as_ref();
    let file = File::create(jsonl).map_err(|e| Error::io(jsonl, e))?;
    let mut out = BufWriter::new(file);
    for (row, e) in embeddings.iter().enumerate() {
        let line = IndexLine {
            dialogue_id: e.dialogue_id.clone(),
            turn: e.turn,
            source: e.source,
            emb_row: row,
        };
        serde_json::to_writer(&mut out, &line)?;
        out.write_all(b"\n").map_err(|e| Error::io(jsonl, e))?;
    }
    out.flush().map_err(|e| Error::io(jsonl, e))?;
    let rows: Vec<&[f32]> = embeddings.iter().map(|e| e.vector.as_slice()).collect();
    let cols = embeddings.first().map_or(0, |e| e.vector.len());
    embedding_file::write_matrix(matrix, cols, &rows)
}

pub fn read_utterance_embeddings(jsonl: impl AsRef<Path>, matrix: impl AsRef<Path>) -> Result<Vec<UtteranceEmbedding>> {
    let jsonl = jsonl.as_ref();
    let mat = embedding_file::read_matrix(matrix.as_ref())?;
    let file = File::open(jsonl).map_err(|e| Error::io(jsonl, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(jsonl, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: IndexLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?;
        let vector = mat
            .row(rec.emb_row)
            .ok_or_else(|| Error::format(jsonl, format!("emb_row {} beyond {} rows", rec.emb_row, mat.rows())))?
            .to_vec();
        out.push(UtteranceEmbedding {
            dialogue_id: rec.dialogue_id,
            turn: rec.turn,
            vector,
            source: rec.source,
        });
    }
    Ok(out)
}
