use std::fs;
use std::ops::Range;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::fnv1a;

pub const CLS: &str = "[CLS]";
pub const SEP: &str = "[SEP]";

/// Output of one encoder pass.
///
/// `hidden[0]` is the classification vector and the last row the separator
/// vector; everything in between is one row per subword. `word_pieces[w]` is
/// the range of `hidden` rows holding word `w`'s subwords, empty for words
/// dropped by truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoding {
    pub pieces: Vec<String>,
    pub hidden: Vec<Vec<f32>>,
    pub word_pieces: Vec<Range<usize>>,
}

impl Encoding {
    pub fn cls(&self) -> &[f32] {
        &self.hidden[0]
    }

    pub fn kept_words(&self) -> usize {
        self.word_pieces.iter().take_while(|r| !r.is_empty()).count()
    }

    pub fn is_truncated(&self) -> bool {
        self.kept_words() < self.word_pieces.len()
    }
}

/// A contextual subword encoder.
///
/// Implementations must be deterministic and safe to call concurrently.
/// `max_sequence_length` counts the two special positions.
pub trait EncoderBackend: Send + Sync {
    fn name(&self) -> &str;
    fn hidden_size(&self) -> usize;
    fn max_sequence_length(&self) -> usize;
    fn encode(&self, words: &[String]) -> Result<Encoding>;
    /// Writes backend-native weights into `dir`.
    fn save(&self, dir: &Path) -> Result<()>;
}

/// Rebuilds a saved encoder from its name and checkpoint directory.
pub fn load_encoder(name: &str, dir: &Path) -> Result<Arc<dyn EncoderBackend>> {
    match name {
        HashingEncoder::NAME => Ok(Arc::new(HashingEncoder::load(dir)?)),
        other => Err(Error::Encoder(format!(
            "no loader registered for encoder `{other}`; construct it directly and use TaggerModel::load_with"
        ))),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HashingEncoderConfig {
    pub hidden_size: usize,
    pub max_sequence_length: usize,
    /// Maximum characters per subword piece.
    pub piece_len: usize,
    /// Words up to this many characters are kept whole.
    pub whole_word_len: usize,
    /// Number of neighbouring words on each side mixed into a position.
    pub context_window: usize,
    pub seed: u64,
}

impl Default for HashingEncoderConfig {
    fn default() -> Self {
        HashingEncoderConfig {
            hidden_size: 256,
            max_sequence_length: 128,
            piece_len: 4,
            whole_word_len: 6,
            context_window: 2,
            seed: 0x5bd1_e995,
        }
    }
}

/// Deterministic contextual encoder built from hashed feature embeddings.
///
/// Every position sums random unit-scale vectors keyed by its subword, word,
/// word shape and suffix, plus decayed contributions from neighbouring words.
/// The result is contextual (the same word reads differently in different
/// sentences) without any trained weights, which makes it a reproducible
/// stand-in when no pretrained transformer is available.
#[derive(Debug, Clone)]
pub struct HashingEncoder {
    config: HashingEncoderConfig,
}

impl HashingEncoder {
    pub const NAME: &'static str = "hashing-contextual";

    pub fn new(config: HashingEncoderConfig) -> Result<Self> {
        if config.hidden_size == 0 || config.piece_len == 0 {
            return Err(Error::invalid("hidden_size and piece_len must be positive"));
        }
        if config.max_sequence_length < 3 {
            return Err(Error::invalid("max_sequence_length must leave room for one subword"));
        }
        Ok(HashingEncoder { config })
    }

    pub fn config(&self) -> &HashingEncoderConfig {
        &self.config
    }

    pub fn load(dir: &Path) -> Result<Self> {
        let path = dir.join("encoder.json");
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        Self::new(serde_json::from_str(&text)?)
    }

    /// Lower-cased greedy split into pieces; continuation pieces carry `##`.
    pub fn word_pieces(&self, word: &str) -> Vec<String> {
        let lower: Vec<char> = word.to_lowercase().chars().collect();
        if lower.len() <= self.config.whole_word_len {
            return vec![lower.into_iter().collect()];
        }
        lower
            .chunks(self.config.piece_len)
            .enumerate()
            .map(|(i, chunk)| {
                let s: String = chunk.iter().collect();
                if i == 0 {
                    s
                } else {
                    format!("##{s}")
                }
            })
            .collect()
    }

    fn add_feature(&self, out: &mut [f32], feature: &str, weight: f32) {
        let h = self.config.hidden_size;
        let scale = weight * (3.0 / h as f32).sqrt();
        let mut state = fnv1a(feature.as_bytes()) ^ self.config.seed;
        for v in out.iter_mut() {
            state = splitmix64(&mut state);
            // uniform in [-1, 1)
            let u = (state >> 40) as f32 / (1u64 << 23) as f32 - 1.0;
            *v += scale * u;
        }
    }

    fn position_vector(&self, words: &[String], w: usize, piece: &str, piece_idx: usize) -> Vec<f32> {
        let mut v = vec![0.0f32; self.config.hidden_size];
        let word = words[w].to_lowercase();
        self.add_feature(&mut v, &format!("piece:{piece}"), 1.0);
        self.add_feature(&mut v, &format!("word:{word}"), 1.0);
        self.add_feature(&mut v, &format!("shape:{}", word_shape(&words[w])), 1.0);
        let chars: Vec<char> = word.chars().collect();
        let suffix: String = chars[chars.len().saturating_sub(3)..].iter().collect();
        self.add_feature(&mut v, &format!("suf:{suffix}"), 0.5);
        if piece_idx > 0 {
            self.add_feature(&mut v, "continuation", 0.5);
        }
        for d in 1..=self.config.context_window {
            let weight = 0.6 / d as f32;
            let left = if w >= d {
                words[w - d].to_lowercase()
            } else {
                "<s>".into()
            };
            let right = words.get(w + d).map_or("</s>".into(), |s| s.to_lowercase());
            self.add_feature(&mut v, &format!("L{d}:{left}"), weight);
            self.add_feature(&mut v, &format!("R{d}:{right}"), weight);
        }
        v
    }
}

impl EncoderBackend for HashingEncoder {
    fn name(&self) -> &str {
        Self::NAME
    }

    fn hidden_size(&self) -> usize {
        self.config.hidden_size
    }

    fn max_sequence_length(&self) -> usize {
        self.config.max_sequence_length
    }

    fn encode(&self, words: &[String]) -> Result<Encoding> {
        let budget = self.config.max_sequence_length - 2;
        let mut pieces = vec![CLS.to_string()];
        let mut hidden = vec![vec![0.0f32; self.config.hidden_size]];
        let mut word_pieces = Vec::with_capacity(words.len());
        let mut full = false;
        for (w, word) in words.iter().enumerate() {
            let wp = self.word_pieces(word);
            if full || pieces.len() - 1 + wp.len() > budget {
                full = true;
                word_pieces.push(pieces.len()..pieces.len());
                continue;
            }
            let start = pieces.len();
            for (k, piece) in wp.into_iter().enumerate() {
                hidden.push(self.position_vector(words, w, &piece, k));
                pieces.push(piece);
            }
            word_pieces.push(start..pieces.len());
        }
        let n_body = hidden.len() - 1;
        let mut cls = vec![0.0f32; self.config.hidden_size];
        if n_body > 0 {
            for row in &hidden[1..] {
                for (c, x) in cls.iter_mut().zip(row) {
                    *c += x / n_body as f32;
                }
            }
        }
        self.add_feature(&mut cls, "special:cls", 1.0);
        hidden[0] = cls;
        let mut sep = vec![0.0f32; self.config.hidden_size];
        self.add_feature(&mut sep, "special:sep", 1.0);
        hidden.push(sep);
        pieces.push(SEP.to_string());
        // empty ranges of truncated words point past the body
        let sep_idx = pieces.len() - 1;
        for r in word_pieces.iter_mut().filter(|r| r.start == r.end) {
            *r = sep_idx..sep_idx;
        }
        Ok(Encoding {
            pieces,
            hidden,
            word_pieces,
        })
    }

    fn save(&self, dir: &Path) -> Result<()> {
        let path = dir.join("encoder.json");
        fs::write(&path, serde_json::to_string_pretty(&self.config)?).map_err(|e| Error::io(&path, e))
    }
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Collapsed character-class shape: `London` → `Xx`, `08:15` → `d:d`.
fn word_shape(word: &str) -> String {
    let mut shape = String::new();
    for c in word.chars() {
        let class = if c.is_uppercase() {
            'X'
        } else if c.is_lowercase() {
            'x'
        } else if c.is_ascii_digit() {
            'd'
        } else {
            c
        };
        if !shape.ends_with(class) {
            shape.push(class);
        }
    }
    shape
}
