use std::fs;
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::encoder::{load_encoder, EncoderBackend, Encoding};
use super::spans::{pool_spans, SpanPrediction};
use crate::corpus::{BioLabel, BioUtterance};
use crate::error::{Error, Result};
use crate::seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub dropout: f64,
    pub weight_decay: f64,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 5,
            learning_rate: 5e-5,
            dropout: 0.1,
            weight_decay: 0.01,
            batch_size: 32,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochStats {
    pub epoch: usize,
    pub train_loss: f64,
    pub valid_loss: f64,
}

pub struct TrainedTagger {
    pub model: TaggerModel,
    /// Entry 0 is the untrained initialisation.
    pub history: Vec<EpochStats>,
    pub best_epoch: usize,
}

/// Softmax projection from encoder hidden states onto `(B, I, O)`.
#[derive(Clone)]
pub struct TaggerModel {
    encoder: Arc<dyn EncoderBackend>,
    /// Row-major `3 × hidden_size`.
    weights: Vec<f32>,
    bias: [f32; 3],
    seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
struct CheckpointMeta {
    encoder_name: String,
    hidden_size: usize,
    max_sequence_length: usize,
    label_order: Vec<String>,
    seed: u64,
}

impl std::fmt::Debug for TaggerModel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TaggerModel")
            .field("encoder", &self.encoder.name())
            .field("hidden_size", &self.encoder.hidden_size())
            .field("seed", &self.seed)
            .finish()
    }
}

impl TaggerModel {
    pub fn new(encoder: Arc<dyn EncoderBackend>, weights: Vec<f32>, bias: [f32; 3], seed: u64) -> Result<Self> {
        if weights.len() != 3 * encoder.hidden_size() {
            return Err(Error::invalid(format!(
                "projection has {} weights, expected 3 × {}",
                weights.len(),
                encoder.hidden_size()
            )));
        }
        Ok(TaggerModel {
            encoder,
            weights,
            bias,
            seed,
        })
    }

    pub fn encoder(&self) -> &Arc<dyn EncoderBackend> {
        &self.encoder
    }

    pub fn hidden_size(&self) -> usize {
        self.encoder.hidden_size()
    }

    pub fn weights(&self) -> &[f32] {
        &self.weights
    }

    pub fn bias(&self) -> [f32; 3] {
        self.bias
    }

    fn logits(&self, h: &[f32]) -> [f64; 3] {
        let hs = self.hidden_size();
        let mut out = [0.0f64; 3];
        for (k, o) in out.iter_mut().enumerate() {
            let row = &self.weights[k * hs..(k + 1) * hs];
            *o = f64::from(self.bias[k]) + row.iter().zip(h).map(|(w, x)| f64::from(w * x)).sum::<f64>();
        }
        out
    }

    /// Label distribution for one hidden state, in `(B, I, O)` order.
    pub fn probabilities(&self, h: &[f32]) -> [f64; 3] {
        softmax(self.logits(h))
    }

    pub fn encode(&self, words: &[String]) -> Result<Encoding> {
        let enc = self
            .encoder
            .encode(words)
            .map_err(|e| Error::Encoder(format!("{}: {e}", self.encoder.name())))?;
        if enc.is_truncated() {
            log::warn!(
                "utterance of {} words truncated to {} by max_sequence_length {}",
                words.len(),
                enc.kept_words(),
                self.encoder.max_sequence_length()
            );
        }
        Ok(enc)
    }

    /// Word labels from an existing encoding: argmax at each word's first
    /// subword, `O` for truncated words.
    pub fn labels_for(&self, enc: &Encoding) -> Vec<BioLabel> {
        enc.word_pieces
            .iter()
            .map(|r| {
                if r.is_empty() {
                    BioLabel::O
                } else {
                    argmax_label(self.probabilities(&enc.hidden[r.start]))
                }
            })
            .collect()
    }

    pub fn predict_labels(&self, words: &[String]) -> Result<Vec<BioLabel>> {
        Ok(self.labels_for(&self.encode(words)?))
    }

    /// Pools the final hidden states of each span's subwords.
    pub fn embed_spans(
        &self,
        dialogue_id: &str,
        turn: usize,
        words: &[String],
        spans: &[(usize, usize)],
    ) -> Result<Vec<SpanPrediction>> {
        let enc = self.encode(words)?;
        spans_from_encoding(&enc, dialogue_id, turn, words, spans)
    }

    /// Predicts labels, extracts spans and embeds them in a single encoder pass.
    pub fn detect_spans(&self, dialogue_id: &str, turn: usize, words: &[String]) -> Result<Vec<SpanPrediction>> {
        if words.is_empty() {
            return Ok(Vec::new());
        }
        let enc = self.encode(words)?;
        let spans = super::extract_spans(&self.labels_for(&enc));
        spans_from_encoding(&enc, dialogue_id, turn, words, &spans)
    }

    pub fn save(&self, dir: impl AsRef<Path>) -> Result<()> {
        let dir = dir.as_ref();
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        self.encoder.save(dir)?;
        let mut bytes = Vec::with_capacity(4 * (self.weights.len() + 3));
        for x in self.weights.iter().chain(&self.bias) {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
        let proj = dir.join("projection.bin");
        fs::write(&proj, bytes).map_err(|e| Error::io(&proj, e))?;
        let meta = CheckpointMeta {
            encoder_name: self.encoder.name().to_string(),
            hidden_size: self.hidden_size(),
            max_sequence_length: self.encoder.max_sequence_length(),
            label_order: BioLabel::ALL.iter().map(|l| l.to_string()).collect(),
            seed: self.seed,
        };
        let meta_path = dir.join("meta.json");
        fs::write(&meta_path, serde_json::to_string_pretty(&meta)?).map_err(|e| Error::io(&meta_path, e))
    }

    /// Loads a checkpoint whose encoder is one of the built-in backends.
    pub fn load(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        let meta = read_meta(dir)?;
        let encoder = load_encoder(&meta.encoder_name, dir)?;
        Self::load_with(dir, encoder)
    }

    /// Loads the projection from `dir` on top of an externally built encoder.
    pub fn load_with(dir: impl AsRef<Path>, encoder: Arc<dyn EncoderBackend>) -> Result<Self> {
        let dir = dir.as_ref();
        let meta = read_meta(dir)?;
        let meta_path = dir.join("meta.json");
        if meta.hidden_size != encoder.hidden_size() || meta.encoder_name != encoder.name() {
            return Err(Error::format(&meta_path, "checkpoint does not match the supplied encoder"));
        }
        if meta.label_order != ["B", "I", "O"] {
            return Err(Error::format(&meta_path, format!("unsupported label order {:?}", meta.label_order)));
        }
        let proj = dir.join("projection.bin");
        let bytes = fs::read(&proj).map_err(|e| Error::io(&proj, e))?;
        let hs = meta.hidden_size;
        if bytes.len() != 4 * (3 * hs + 3) {
            return Err(Error::format(&proj, format!("expected {} bytes, found {}", 4 * (3 * hs + 3), bytes.len())));
        }
        let floats: Vec<f32> = bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
            .collect();
        let bias = [floats[3 * hs], floats[3 * hs + 1], floats[3 * hs + 2]];
        Self::new(encoder, floats[..3 * hs].to_vec(), bias, meta.seed)
    }
}

fn read_meta(dir: &Path) -> Result<CheckpointMeta> {
    let path = dir.join("meta.json");
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

fn spans_from_encoding(
    enc: &Encoding,
    dialogue_id: &str,
    turn: usize,
    words: &[String],
    spans: &[(usize, usize)],
) -> Result<Vec<SpanPrediction>> {
    let pooled = pool_spans(enc, spans)?;
    Ok(spans
        .iter()
        .zip(pooled)
        .map(|(&(start, end), embedding)| SpanPrediction {
            dialogue_id: dialogue_id.to_string(),
            turn_index: turn,
            token_start: start,
            token_end: end,
            text: words[start..=end].join(" "),
            embedding,
        })
        .collect())
}

fn softmax(logits: [f64; 3]) -> [f64; 3] {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps = logits.map(|l| (l - max).exp());
    let z: f64 = exps.iter().sum();
    exps.map(|e| e / z)
}

fn argmax_label(p: [f64; 3]) -> BioLabel {
    let mut best = 0;
    for k in 1..3 {
        if p[k] > p[best] {
            best = k;
        }
    }
    BioLabel::from_index(best).unwrap()
}

/// Subword positions of one utterance with propagated word labels.
struct Example {
    hidden: Vec<Vec<f32>>,
    targets: Vec<usize>,
}

fn prepare(model: &TaggerModel, data: &[BioUtterance]) -> Result<Vec<Example>> {
    data.iter()
        .map(|utt| {
            let enc = model.encode(&utt.tokens)?;
            let mut hidden = Vec::new();
            let mut targets = Vec::new();
            for (range, label) in enc.word_pieces.iter().zip(&utt.labels) {
                for row in range.clone() {
                    hidden.push(enc.hidden[row].clone());
                    targets.push(label.index());
                }
            }
            Ok(Example { hidden, targets })
        })
        .collect()
}

fn mean_loss(model: &TaggerModel, data: &[Example]) -> f64 {
    let (mut total, mut count) = (0.0, 0usize);
    for ex in data {
        for (h, &t) in ex.hidden.iter().zip(&ex.targets) {
            total -= model.probabilities(h)[t].max(1e-300).ln();
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}

/// AdamW moments over the flattened `weights ++ bias` parameter vector.
struct AdamW {
    m: Vec<f64>,
    v: Vec<f64>,
    step: i32,
}

impl AdamW {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(n: usize) -> Self {
        AdamW {
            m: vec![0.0; n],
            v: vec![0.0; n],
            step: 0,
        }
    }

    fn update(&mut self, model: &mut TaggerModel, grad: &[f64], lr: f64, weight_decay: f64) {
        self.step += 1;
        let bc1 = 1.0 - Self::BETA1.powi(self.step);
        let bc2 = 1.0 - Self::BETA2.powi(self.step);
        let nw = model.weights.len();
        for (i, &g) in grad.iter().enumerate() {
            self.m[i] = Self::BETA1 * self.m[i] + (1.0 - Self::BETA1) * g;
            self.v[i] = Self::BETA2 * self.v[i] + (1.0 - Self::BETA2) * g * g;
            let step = lr * (self.m[i] / bc1) / ((self.v[i] / bc2).sqrt() + Self::EPS);
            if i < nw {
                let w = f64::from(model.weights[i]);
                model.weights[i] = (w - step - lr * weight_decay * w) as f32;
            } else {
                let b = &mut model.bias[i - nw];
                *b = (f64::from(*b) - step) as f32;
            }
        }
    }
}

/// Trains the projection head with cross-entropy over every subword
/// position; word labels are copied to all of a word's subwords and special
/// positions are excluded. The encoder stays frozen. Returns the epoch with
/// the lowest validation loss (training loss if `valid` is empty).
pub fn train_tagger(
    encoder: Arc<dyn EncoderBackend>,
    train: &[BioUtterance],
    valid: &[BioUtterance],
    config: &TrainConfig,
) -> Result<TrainedTagger> {
    if train.is_empty() {
        return Err(Error::invalid("training set is empty"));
    }
    if config.batch_size == 0 || !(0.0..1.0).contains(&config.dropout) || config.learning_rate <= 0.0 {
        return Err(Error::invalid(format!("unusable training config {config:?}")));
    }
    for utt in train.iter().chain(valid) {
        if utt.tokens.len() != utt.labels.len() {
            return Err(Error::invalid("BIO utterance with mismatched token and label counts"));
        }
    }
    let hs = encoder.hidden_size();
    let mut rng = seed::rng(config.seed);
    let weights = (0..3 * hs).map(|_| rng.gen_range(-0.02f32..0.02)).collect();
    let mut model = TaggerModel::new(encoder, weights, [0.0; 3], config.seed)?;

    let train_ex = prepare(&model, train)?;
    let valid_ex = prepare(&model, valid)?;
    let selection = |m: &TaggerModel, train_loss: f64| {
        if valid_ex.is_empty() {
            train_loss
        } else {
            mean_loss(m, &valid_ex)
        }
    };

    let initial_train = mean_loss(&model, &train_ex);
    let mut history = vec![EpochStats {
        epoch: 0,
        train_loss: initial_train,
        valid_loss: selection(&model, initial_train),
    }];
    let mut best: Option<(f64, usize, TaggerModel)> = None;
    let mut opt = AdamW::new(3 * hs + 3);
    let mut order: Vec<usize> = (0..train_ex.len()).collect();
    let keep = 1.0 - config.dropout;
    let mut grad = vec![0.0f64; 3 * hs + 3];
    let mut dropped = vec![0.0f32; hs];

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        for batch in order.chunks(config.batch_size) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            let mut positions = 0usize;
            for &idx in batch {
                let ex = &train_ex[idx];
                for (h, &t) in ex.hidden.iter().zip(&ex.targets) {
                    for (d, x) in dropped.iter_mut().zip(h) {
                        *d = if config.dropout > 0.0 && rng.gen::<f64>() >= keep {
                            0.0
                        } else {
                            x / keep as f32
                        };
                    }
                    let p = model.probabilities(&dropped);
                    for k in 0..3 {
                        let delta = p[k] - if k == t { 1.0 } else { 0.0 };
                        let row = &mut grad[k * hs..(k + 1) * hs];
                        for (g, x) in row.iter_mut().zip(&dropped) {
                            *g += delta * f64::from(*x);
                        }
                        grad[3 * hs + k] += delta;
                    }
                    positions += 1;
                }
            }
            if positions == 0 {
                continue;
            }
            grad.iter_mut().for_each(|g| *g /= positions as f64);
            opt.update(&mut model, &grad, config.learning_rate, config.weight_decay);
        }
        let train_loss = mean_loss(&model, &train_ex);
        let valid_loss = selection(&model, train_loss);
        log::info!("epoch {epoch}: train loss {train_loss:.5}, valid loss {valid_loss:.5}");
        history.push(EpochStats {
            epoch,
            train_loss,
            valid_loss,
        });
        if best.as_ref().is_none_or(|(l, _, _)| valid_loss < *l) {
            best = Some((valid_loss, epoch, model.clone()));
        }
    }

    let (best_model, best_epoch) = match best {
        Some((_, epoch, m)) => (m, epoch),
        None => (model, 0),
    };
    Ok(TrainedTagger {
        model: best_model,
        history,
        best_epoch,
    })
}
