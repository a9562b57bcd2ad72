use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::augment::Method;
use crate::baselines::UtteranceText;
use crate::error::{Error, Result};
use crate::slotcluster::Algorithm;

/// Which held-out-domain dialogues a run extracts structure from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetSplit {
    All,
    Train,
    Valid,
    Test,
}

impl std::str::FromStr for TargetSplit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(TargetSplit::All),
            "train" => Ok(TargetSplit::Train),
            "valid" => Ok(TargetSplit::Valid),
            "test" => Ok(TargetSplit::Test),
            other => Err(Error::invalid(format!("unknown split `{other}` (all|train|valid|test)"))),
        }
    }
}

impl std::fmt::Display for TargetSplit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TargetSplit::All => "all",
            TargetSplit::Train => "train",
            TargetSplit::Valid => "valid",
            TargetSplit::Test => "test",
        })
    }
}

/// Structure extractor scored by `evaluate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    /// The span-clustering pipeline itself.
    None,
    Random,
    /// Clustered CLS vectors.
    Cls,
    /// Noun words, averaged and clustered.
    Noun,
    /// Detected spans, averaged per turn and clustered.
    SbdEmbedding,
}

impl std::str::FromStr for Baseline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(Baseline::None),
            "random" => Ok(Baseline::Random),
            "cls" => Ok(Baseline::Cls),
            "noun" => Ok(Baseline::Noun),
            "sbd-embedding" => Ok(Baseline::SbdEmbedding),
            other => Err(Error::invalid(format!(
                "unknown baseline `{other}` (none|random|cls|noun|sbd-embedding)"
            ))),
        }
    }
}

impl std::fmt::Display for Baseline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Baseline::None => "none",
            Baseline::Random => "random",
            Baseline::Cls => "cls",
            Baseline::Noun => "noun",
            Baseline::SbdEmbedding => "sbd-embedding",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateSource {
    Predicted,
    Gold,
}

impl std::str::FromStr for StateSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "predicted" => Ok(StateSource::Predicted),
            "gold" => Ok(StateSource::Gold),
            other => Err(Error::invalid(format!("unknown state source `{other}` (predicted|gold)"))),
        }
    }
}

impl std::fmt::Display for StateSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            StateSource::Predicted => "predicted",
            StateSource::Gold => "gold",
        })
    }
}

/// Run configuration. Stored as a flat `key = value` file; `#` starts a
/// comment. Keys use underscores; dashes are accepted too.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub corpus: Option<PathBuf>,
    pub test_domain: String,
    pub encoder: String,
    pub hidden_size: usize,
    pub max_sequence_length: usize,
    pub n_slots: usize,
    pub sweep: Vec<usize>,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub epochs: usize,
    pub lr: f64,
    pub batch_size: usize,
    pub dropout: f64,
    pub weight_decay: f64,
    pub target_split: TargetSplit,
    pub baseline: Baseline,
    pub utterance_text: UtteranceText,
    pub r_train: f64,
    pub r_aug: f64,
    pub method: Method,
    pub states: StateSource,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            corpus: None,
            test_domain: "attraction".into(),
            encoder: crate::sbd::HashingEncoder::NAME.into(),
            hidden_size: 256,
            max_sequence_length: 128,
            n_slots: 3,
            sweep: (2..=8).collect(),
            algorithm: Algorithm::KMeans,
            seed: 0,
            out_dir: PathBuf::from("run"),
            epochs: 5,
            lr: 0.01,
            batch_size: 32,
            dropout: 0.1,
            weight_decay: 0.01,
            target_split: TargetSplit::All,
            baseline: Baseline::None,
            utterance_text: UtteranceText::Exchange,
            r_train: 1.0,
            r_aug: 1.0,
            method: Method::Mrda,
            states: StateSource::Predicted,
        }
    }
}

/// Every recognised key, in file order.
pub const KEYS: &[&str] = &[
    "corpus",
    "test_domain",
    "encoder",
    "hidden_size",
    "max_sequence_length",
    "n_slots",
    "sweep",
    "algorithm",
    "seed",
    "out_dir",
    "epochs",
    "lr",
    "batch_size",
    "dropout",
    "weight_decay",
    "target_split",
    "baseline",
    "utterance_text",
    "r_train",
    "r_aug",
    "method",
    "states",
];

fn num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("`{key}`: cannot parse `{value}`")))
}

/// `"2..8"` (inclusive) or `"2,3,5"`.
pub fn parse_range(value: &str) -> Result<Vec<usize>> {
    let value = value.trim();
    let out: Vec<usize> = if let Some((a, b)) = value.split_once("..") {
        let (a, b): (usize, usize) = (num("sweep", a.trim())?, num("sweep", b.trim_start_matches('=').trim())?);
        (a..=b).collect()
    } else {
        value
            .split(',')
            .map(|v| num("sweep", v.trim()))
            .collect::<Result<_>>()?
    };
    if out.is_empty() {
        return Err(Error::invalid(format!("sweep range `{value}` is empty")));
    }
    Ok(out)
}

impl PipelineConfig {
    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().replace('-', "_");
        let v = value.trim();
        match key.as_str() {
            "corpus" => self.corpus = Some(PathBuf::from(v)),
            "test_domain" => self.test_domain = v.to_string(),
            "encoder" => self.encoder = v.to_string(),
            "hidden_size" => self.hidden_size = num(&key, v)?,
            "max_sequence_length" => self.max_sequence_length = num(&key, v)?,
            "n_slots" => self.n_slots = num(&key, v)?,
            "sweep" => self.sweep = parse_range(v)?,
            "algorithm" => self.algorithm = v.parse()?,
            "seed" => self.seed = num(&key, v)?,
            "out_dir" => self.out_dir = PathBuf::from(v),
            "epochs" => self.epochs = num(&key, v)?,
            "lr" => self.lr = num(&key, v)?,
            "batch_size" => self.batch_size = num(&key, v)?,
            "dropout" => self.dropout = num(&key, v)?,
            "weight_decay" => self.weight_decay = num(&key, v)?,
            "target_split" => self.target_split = v.parse()?,
            "baseline" => self.baseline = v.parse()?,
            "utterance_text" => self.utterance_text = v.parse()?,
            "r_train" => self.r_train = num(&key, v)?,
            "r_aug" => self.r_aug = num(&key, v)?,
            "method" => self.method = v.parse()?,
            "states" => self.states = v.parse()?,
            other => return Err(Error::invalid(format!("unknown config key `{other}`"))),
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = PipelineConfig::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: i + 1,
                message: format!("expected `key = value`, got `{line}`"),
            })?;
            cfg.set(k, v).map_err(|e| Error::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
        }
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "corpus" => self.corpus.as_ref().map_or_else(String::new, |p| p.display().to_string()),
            "test_domain" => self.test_domain.clone(),
            "encoder" => self.encoder.clone(),
            "hidden_size" => self.hidden_size.to_string(),
            "max_sequence_length" => self.max_sequence_length.to_string(),
            "n_slots" => self.n_slots.to_string(),
            "sweep" => self.sweep.iter().map(usize::to_string).collect::<Vec<_>>().join(","),
            "algorithm" => self.algorithm.to_string(),
            "seed" => self.seed.to_string(),
            "out_dir" => self.out_dir.display().to_string(),
            "epochs" => self.epochs.to_string(),
            "lr" => self.lr.to_string(),
            "batch_size" => self.batch_size.to_string(),
            "dropout" => self.dropout.to_string(),
            "weight_decay" => self.weight_decay.to_string(),
            "target_split" => self.target_split.to_string(),
            "baseline" => self.baseline.to_string(),
            "utterance_text" => self.utterance_text.to_string(),
            "r_train" => self.r_train.to_string(),
            "r_aug" => self.r_aug.to_string(),
            "method" => self.method.to_string(),
            "states" => self.states.to_string(),
            _ => return None,
        })
    }

    /// Serialises back to the file format; `parse(to_text())` round-trips.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for key in KEYS {
            let v = self.get(key).unwrap_or_default();
            if *key == "corpus" && v.is_empty() {
                continue;
            }
            let _ = writeln!(out, "{key} = {v}");
        }
        out
    }

    /// Checks values that do not depend on which stage runs.
    pub fn validate(&self) -> Result<()> {
        if self.n_slots == 0 {
            return Err(Error::invalid("n_slots must be at least 1"));
        }
        if self.sweep.is_empty() {
            return Err(Error::invalid("sweep range is empty"));
        }
        if let Some(p) = &self.corpus {
            if !p.exists() {
                return Err(Error::invalid(format!("corpus {} does not exist", p.display())));
            }
        }
        Ok(())
    }
}
