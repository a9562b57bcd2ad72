//! Reproducible end-to-end runs.
//!
//! Every stage reads and writes fixed file names inside the output
//! directory, so stages can run one at a time from the command line or all
//! together through [`Pipeline::run_all`].
//!
//! | stage | reads | writes |
//! |-------|-------|--------|
//! | sbd-train | corpus | `tagger/`, `sbd_train.json` |
//! | sbd-predict | corpus, `tagger/` | `spans.jsonl`, `spans.spem` |
//! | cluster | spans | `grouping.json` |
//! | label-states | corpus, spans, grouping | `states.jsonl`, `gold_states.jsonl` |
//! | graph | states | `graph.{dot,json}`, `gold_graph.{dot,json}` |
//! | evaluate | states, spans, grouping | `report.json` |
//! | augment | corpus, states | `augmented.jsonl` |
//! | sweep-slots | corpus, spans | `sweep.csv` |

mod config;

pub use config::{parse_range, Baseline, PipelineConfig, StateSource, TargetSplit, KEYS};

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::augment::{self, Method};
use crate::baselines::{self, RuleBasedPosTagger, UtteranceEmbedding};
use crate::corpus::{self, to_bio, BioUtterance, Dialogue, DomainSplit};
use crate::error::{Error, Result};
use crate::evalmetrics::{adjusted_mutual_info, adjusted_rand_index, silhouette};
use crate::sbd::{
    group_by_turn, read_span_predictions, score_f1, train_tagger, write_span_predictions, EncoderBackend,
    HashingEncoder, HashingEncoderConfig, SpanPrediction, TaggerModel, TrainConfig,
};
use crate::seed::derive_seed;
use crate::slotcluster::{cluster_spans, read_grouping, write_grouping, SlotGrouping};
use crate::statetrack::{
    distinct_states, gold_slot_names, label_states, label_states_gold, read_states_file, state_assignment,
    write_states_file, LabeledDialogue,
};
use crate::structure::{build_graph, GraphFormat, TransitionGraph};

pub const STAGES: &[&str] = &[
    "sbd-train",
    "sbd-predict",
    "cluster",
    "label-states",
    "graph",
    "evaluate",
    "augment",
];

/// Names of the seeds derived from the global seed.
pub const SEED_STREAMS: &[&str] = &["split", "sbd-valid", "sbd-train", "cluster", "baseline", "augment"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub baseline: String,
    pub ari: f64,
    pub ami: f64,
    pub sc: Option<f64>,
    pub n: usize,
    pub distinct_states: usize,
    pub gold_states: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub scores: std::result::Result<(f64, f64), String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub seed: u64,
    pub stage_seeds: BTreeMap<String, u64>,
    pub config: BTreeMap<String, String>,
    pub inputs: BTreeMap<String, String>,
    pub artifacts: BTreeMap<String, String>,
}

fn stage<T>(name: &str, f: impl FnOnce() -> Result<T>) -> Result<T> {
    f().map_err(|e| match e {
        e @ Error::Stage { .. } => e,
        e => Error::Stage {
            stage: name.to_string(),
            source: Box::new(e),
        },
    })
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Builds the configured encoder from scratch.
pub fn build_encoder(cfg: &PipelineConfig) -> Result<Arc<dyn EncoderBackend>> {
    if cfg.encoder != HashingEncoder::NAME {
        return Err(Error::BackendUnavailable(format!(
            "encoder `{}` is not built in; available: {}",
            cfg.encoder,
            HashingEncoder::NAME
        )));
    }
    Ok(Arc::new(HashingEncoder::new(HashingEncoderConfig {
        hidden_size: cfg.hidden_size,
        max_sequence_length: cfg.max_sequence_length,
        ..Default::default()
    })?))
}

fn bio_of(dialogues: &[Dialogue]) -> Vec<BioUtterance> {
    dialogues
        .iter()
        .flat_map(|d| &d.turns)
        .map(|t| to_bio(t).utterance)
        .filter(|u| !u.tokens.is_empty())
        .collect()
}

pub struct Pipeline {
    pub config: PipelineConfig,
}

impl Pipeline {
    pub fn new(config: PipelineConfig) -> Result<Self> {
        config.validate()?;
        Ok(Pipeline { config })
    }

    pub fn out(&self, file: &str) -> PathBuf {
        self.config.out_dir.join(file)
    }

    pub fn stage_seed(&self, stream: &str) -> u64 {
        derive_seed(self.config.seed, stream)
    }

    fn ensure_out_dir(&self) -> Result<()> {
        fs::create_dir_all(&self.config.out_dir).map_err(|e| Error::io(&self.config.out_dir, e))
    }

    pub fn load_corpus(&self) -> Result<Vec<Dialogue>> {
        let path = self
            .config
            .corpus
            .as_ref()
            .ok_or_else(|| Error::invalid("config key `corpus` is required for this stage"))?;
        corpus::load_dialogue_corpus(path, None)
    }

    pub fn split(&self) -> Result<DomainSplit> {
        corpus::make_split(&self.load_corpus()?, &self.config.test_domain, self.stage_seed("split"))
    }

    /// Held-out-domain dialogues selected by `target_split`.
    pub fn target(&self, split: &DomainSplit) -> Vec<Dialogue> {
        match self.config.target_split {
            TargetSplit::All => split.target().cloned().collect(),
            TargetSplit::Train => split.train.clone(),
            TargetSplit::Valid => split.valid.clone(),
            TargetSplit::Test => split.test.clone(),
        }
    }

    fn train_config(&self) -> TrainConfig {
        TrainConfig {
            epochs: self.config.epochs,
            learning_rate: self.config.lr,
            dropout: self.config.dropout,
            weight_decay: self.config.weight_decay,
            batch_size: self.config.batch_size,
            seed: self.stage_seed("sbd-train"),
        }
    }

    /// Trains the boundary tagger on every dialogue outside the held-out
    /// domain, keeping a tenth of them for checkpoint selection.
    pub fn sbd_train(&self) -> Result<serde_json::Value> {
        stage("sbd-train", || {
            self.ensure_out_dir()?;
            let split = self.split()?;
            let mut source = split.source.clone();
            source.sort_by(|a, b| a.dialogue_id.cmp(&b.dialogue_id));
            rand::seq::SliceRandom::shuffle(source.as_mut_slice(), &mut crate::seed::rng(self.stage_seed("sbd-valid")));
            let n_valid = source.len() / 10;
            let valid = source.split_off(source.len() - n_valid);
            let (train_bio, valid_bio) = (bio_of(&source), bio_of(&valid));
            let trained = train_tagger(build_encoder(&self.config)?, &train_bio, &valid_bio, &self.train_config())?;
            trained.model.save(self.out("tagger"))?;

            let test_bio = bio_of(&split.test);
            let predicted = test_bio
                .iter()
                .map(|u| trained.model.predict_labels(&u.tokens))
                .collect::<Result<Vec<_>>>()?;
            let f1 = score_f1(&test_bio, &predicted)?;
            let summary = json!({
                "train_domains": split.train_domains,
                "test_domain": split.test_domain,
                "n_train": train_bio.len(),
                "n_valid": valid_bio.len(),
                "n_test": test_bio.len(),
                "best_epoch": trained.best_epoch,
                "history": trained.history,
                "f1_slot": f1.slot,
                "f1_token": f1.token,
            });
            write_text(&self.out("sbd_train.json"), &serde_json::to_string_pretty(&summary)?)?;
            log::info!("tagger: slot F1 {:.3}, token F1 {:.3} on held-out test", f1.slot, f1.token);
            Ok(summary)
        })
    }

    pub fn load_tagger(&self) -> Result<TaggerModel> {
        TaggerModel::load(self.out("tagger"))
    }

    /// Detects and embeds spans in every dialogue of the target selection.
    pub fn sbd_predict(&self) -> Result<Vec<SpanPrediction>> {
        stage("sbd-predict", || {
            self.ensure_out_dir()?;
            let split = self.split()?;
            let tagger = self.load_tagger()?;
            let mut spans = Vec::new();
            for d in self.target(&split) {
                for t in &d.turns {
                    spans.extend(tagger.detect_spans(&d.dialogue_id, t.index, &t.user_tokens)?);
                }
            }
            write_span_predictions(self.out("spans.jsonl"), self.out("spans.spem"), &spans)?;
            log::info!("{} spans detected", spans.len());
            Ok(spans)
        })
    }

    pub fn load_spans(&self) -> Result<Vec<SpanPrediction>> {
        read_span_predictions(self.out("spans.jsonl"), self.out("spans.spem"))
    }

    fn cluster_n(&self, spans: &[SpanPrediction], n: usize) -> Result<SlotGrouping> {
        cluster_spans(spans, n, self.config.algorithm, self.stage_seed("cluster"))
    }

    pub fn cluster(&self) -> Result<SlotGrouping> {
        stage("cluster", || {
            let spans = self.load_spans()?;
            let grouping = self.cluster_n(&spans, self.config.n_slots)?;
            write_grouping(self.out("grouping.json"), &grouping)?;
            Ok(grouping)
        })
    }

    fn label_all(&self, dialogues: &[Dialogue], spans: &[SpanPrediction], grouping: &SlotGrouping) -> Result<Vec<LabeledDialogue>> {
        let by_turn = group_by_turn(spans);
        let empty = BTreeMap::new();
        dialogues
            .iter()
            .map(|d| label_states(d, by_turn.get(&d.dialogue_id).unwrap_or(&empty), grouping))
            .collect()
    }

    fn label_gold(dialogues: &[Dialogue]) -> Result<Vec<LabeledDialogue>> {
        let order = gold_slot_names(dialogues);
        dialogues.iter().map(|d| label_states_gold(d, &order)).collect()
    }

    /// Predicted states from the clustered spans, plus gold states from the
    /// annotations for scoring.
    pub fn label_states(&self) -> Result<(Vec<LabeledDialogue>, Vec<LabeledDialogue>)> {
        stage("label-states", || {
            let target = self.target(&self.split()?);
            let spans = self.load_spans()?;
            let grouping = read_grouping(self.out("grouping.json"))?;
            let predicted = self.label_all(&target, &spans, &grouping)?;
            let gold = Self::label_gold(&target)?;
            write_states_file(self.out("states.jsonl"), &predicted)?;
            write_states_file(self.out("gold_states.jsonl"), &gold)?;
            Ok((predicted, gold))
        })
    }

    pub fn graph(&self) -> Result<TransitionGraph> {
        stage("graph", || {
            let predicted = build_graph(&read_states_file(self.out("states.jsonl"))?)?;
            predicted.export(GraphFormat::Dot, self.out("graph.dot"))?;
            predicted.export(GraphFormat::Json, self.out("graph.json"))?;
            let gold_path = self.out("gold_states.jsonl");
            if gold_path.exists() {
                let gold = build_graph(&read_states_file(&gold_path)?)?;
                gold.export(GraphFormat::Dot, self.out("gold_graph.dot"))?;
                gold.export(GraphFormat::Json, self.out("gold_graph.json"))?;
            }
            Ok(predicted)
        })
    }

    fn encoder_for_baselines(&self) -> Result<Arc<dyn EncoderBackend>> {
        if self.out("tagger").join("meta.json").exists() {
            Ok(self.load_tagger()?.encoder().clone())
        } else {
            build_encoder(&self.config)
        }
    }

    fn baseline_embeddings(&self, target: &[Dialogue]) -> Result<Vec<UtteranceEmbedding>> {
        let encoder = self.encoder_for_baselines()?;
        match self.config.baseline {
            Baseline::Cls => baselines::corpus_cls_embeddings(target, self.config.utterance_text, encoder.as_ref()),
            Baseline::Noun => {
                let pos = RuleBasedPosTagger::default();
                let mut out = Vec::new();
                for d in target {
                    for t in &d.turns {
                        let idx = baselines::heuristic_slot_words(t, Some(&pos))?;
                        out.push(baselines::mean_slot_word_embedding(&d.dialogue_id, t.index, &t.user_tokens, &idx, encoder.as_ref())?);
                    }
                }
                Ok(out)
            }
            Baseline::SbdEmbedding => {
                let spans = self.load_spans()?;
                let by_turn = group_by_turn(&spans);
                let mut out = Vec::new();
                for d in target {
                    for t in &d.turns {
                        let idx: Vec<usize> = by_turn
                            .get(&d.dialogue_id)
                            .and_then(|m| m.get(&t.index))
                            .into_iter()
                            .flatten()
                            .flat_map(|s| s.start..=s.end)
                            .collect();
                        out.push(baselines::mean_slot_word_embedding(&d.dialogue_id, t.index, &t.user_tokens, &idx, encoder.as_ref())?);
                    }
                }
                Ok(out)
            }
            Baseline::None | Baseline::Random => unreachable!("no embeddings for this baseline"),
        }
    }

    /// Scores predicted (or baseline) states against gold states.
    pub fn evaluate(&self) -> Result<Report> {
        stage("evaluate", || {
            let gold = read_states_file(self.out("gold_states.jsonl"))?;
            let gold_assign = state_assignment(&gold);
            let n_gold = distinct_states(&gold).len();
            let (pred, sc): (Vec<i64>, Option<f64>) = match self.config.baseline {
                Baseline::None => {
                    let predicted = read_states_file(self.out("states.jsonl"))?;
                    let spans = self.load_spans()?;
                    let grouping = read_grouping(self.out("grouping.json"))?;
                    let labels: Vec<i64> = spans
                        .iter()
                        .map(|s| grouping.group_of(&s.span_ref()).map(|g| g as i64))
                        .collect::<Option<_>>()
                        .ok_or_else(|| Error::MissingSpan("grouping does not cover spans.jsonl".into()))?;
                    let points: Vec<Vec<f32>> = spans.iter().map(|s| s.embedding.clone()).collect();
                    (state_assignment(&predicted), silhouette(&points, &labels).ok())
                }
                Baseline::Random => (baselines::random_states(gold_assign.len(), n_gold, self.stage_seed("baseline"))?.0, None),
                _ => {
                    let target = self.target(&self.split()?);
                    let embs = self.baseline_embeddings(&target)?;
                    baselines::write_utterance_embeddings(self.out("utterances.jsonl"), self.out("utterances.spem"), &embs)?;
                    let labels = baselines::cluster_utterances(&embs, n_gold, self.config.algorithm, self.stage_seed("baseline"))?;
                    let points: Vec<Vec<f32>> = embs.into_iter().map(|e| e.vector).collect();
                    let sc = silhouette(&points, &labels).ok();
                    (labels.0, sc)
                }
            };
            if pred.len() != gold_assign.len() {
                return Err(Error::invalid(format!(
                    "{} predicted turns against {} gold turns",
                    pred.len(),
                    gold_assign.len()
                )));
            }
            let report = Report {
                baseline: self.config.baseline.to_string(),
                ari: adjusted_rand_index(&gold_assign, &pred)?,
                ami: adjusted_mutual_info(&gold_assign, &pred)?,
                sc,
                n: pred.len(),
                distinct_states: {
                    let mut s = pred.clone();
                    s.sort_unstable();
                    s.dedup();
                    s.len()
                },
                gold_states: n_gold,
            };
            write_text(&self.out("report.json"), &serde_json::to_string_pretty(&report)?)?;
            Ok(report)
        })
    }

    /// Writes augmented training pairs for the held-out domain's train split.
    pub fn augment(&self) -> Result<Vec<augment::AugmentedExample>> {
        stage("augment", || {
            self.ensure_out_dir()?;
            let split = self.split()?;
            let train = &split.train;
            let gold = Self::label_gold(train)?;
            let seed = self.stage_seed("augment");
            let examples = match (self.config.method, self.config.states) {
                (Method::Mfs, _) => {
                    let records = augment::turn_records(train, &gold, Some(&gold))?;
                    augment::mfs_emit(&records, &build_graph(&gold)?, self.config.r_train, self.config.r_aug, seed)?
                }
                (Method::Mrda, StateSource::Gold) => {
                    let records = augment::turn_records(train, &gold, Some(&gold))?;
                    augment::mrda_emit(&records, self.config.r_train, self.config.r_aug, seed)?
                }
                (Method::Mrda, StateSource::Predicted) => {
                    let predicted = read_states_file(self.out("states.jsonl"))?;
                    let records = augment::turn_records(train, &predicted, Some(&gold))?;
                    augment::mrda_emit(&records, self.config.r_train, self.config.r_aug, seed)?
                }
            };
            augment::write_examples(self.out("augmented.jsonl"), &examples)?;
            Ok(examples)
        })
    }

    /// Repeats cluster → label → score for each slot count in `sweep`.
    pub fn sweep_slots(&self) -> Result<Vec<SweepRow>> {
        stage("sweep-slots", || {
            let target = self.target(&self.split()?);
            let spans = self.load_spans()?;
            let gold = state_assignment(&Self::label_gold(&target)?);
            let mut rows = Vec::new();
            let mut csv = String::from("n,ari,ami\n");
            for &n in &self.config.sweep {
                let scores = self
                    .cluster_n(&spans, n)
                    .and_then(|g| self.label_all(&target, &spans, &g))
                    .and_then(|labeled| {
                        let pred = state_assignment(&labeled);
                        Ok((adjusted_rand_index(&gold, &pred)?, adjusted_mutual_info(&gold, &pred)?))
                    })
                    .map_err(|e| e.to_string());
                match &scores {
                    Ok((ari, ami)) => csv.push_str(&format!("{n},{ari},{ami}\n")),
                    Err(e) => {
                        log::warn!("sweep N={n}: {e}");
                        csv.push_str(&format!("{n},error,error\n"));
                    }
                }
                rows.push(SweepRow { n, scores });
            }
            write_text(&self.out("sweep.csv"), &csv)?;
            Ok(rows)
        })
    }

    /// Runs every stage in order and records a manifest of inputs, seeds
    /// and artifact hashes.
    pub fn run_all(&self) -> Result<Manifest> {
        self.ensure_out_dir()?;
        write_text(&self.out("config.txt"), &self.config.to_text())?;
        self.sbd_train()?;
        self.sbd_predict()?;
        self.cluster()?;
        self.label_states()?;
        self.graph()?;
        self.evaluate()?;
        self.augment()?;
        stage("run-all", || {
            let manifest = self.manifest()?;
            write_text(&self.out("manifest.json"), &serde_json::to_string_pretty(&manifest)?)?;
            Ok(manifest)
        })
    }

    pub fn manifest(&self) -> Result<Manifest> {
        let mut inputs = BTreeMap::new();
        if let Some(p) = &self.config.corpus {
            inputs.insert(p.display().to_string(), sha256_file(p)?);
        }
        let mut artifacts = BTreeMap::new();
        collect_hashes(&self.config.out_dir, &self.config.out_dir, &mut artifacts)?;
        artifacts.remove("manifest.json");
        Ok(Manifest {
            seed: self.config.seed,
            stage_seeds: SEED_STREAMS.iter().map(|s| (s.to_string(), self.stage_seed(s))).collect(),
            config: KEYS
                .iter()
                .map(|k| (k.to_string(), self.config.get(k).unwrap_or_default()))
                .collect(),
            inputs,
            artifacts,
        })
    }
}

/// Validates `config` and runs the whole pipeline into its `out_dir`.
pub fn run_pipeline(config: PipelineConfig) -> Result<Manifest> {
    Pipeline::new(config)?.run_all()
}

fn collect_hashes(root: &Path, dir: &Path, out: &mut BTreeMap<String, String>) -> Result<()> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    for entry in entries {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_dir() {
            collect_hashes(root, &path, out)?;
        } else {
            let rel = path.strip_prefix(root).unwrap_or(&path).to_string_lossy().replace('\\', "/");
            out.insert(rel, sha256_file(&path)?);
        }
    }
    Ok(())
}
