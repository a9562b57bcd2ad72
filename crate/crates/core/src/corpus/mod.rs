//! Dialogue corpora: loading, validation, BIO conversion and domain splits.

mod bio;
mod split;

pub use bio::{read_bio_file, to_bio, write_bio_file, BioConversion, BioLabel, BioRecord, BioUtterance, SkippedSlot};
pub use split::{make_split, DomainSplit};

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statetrack::DialogueState;
use crate::text::tokenize;

/// The five MultiWOZ single-domain task types.
pub const MULTIWOZ_DOMAINS: [&str; 5] = ["taxi", "restaurant", "hotel", "attraction", "train"];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldSlot {
    pub name: String,
    pub value: String,
    /// Character offsets `[start, end)` into the user utterance.
    #[serde(default)]
    pub span: Option<(usize, usize)>,
}

/// One exchange: the user utterance and the system reply that follows it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Turn {
    pub index: usize,
    pub user_text: String,
    pub system_text: String,
    pub user_tokens: Vec<String>,
    pub gold_slots: Vec<GoldSlot>,
}

impl Turn {
    pub fn new(index: usize, user_text: impl Into<String>, system_text: impl Into<String>) -> Self {
        let user_text = user_text.into();
        Turn {
            index,
            user_tokens: tokenize(&user_text),
            user_text,
            system_text: system_text.into(),
            gold_slots: Vec::new(),
        }
    }

    pub fn with_slots(mut self, slots: Vec<GoldSlot>) -> Self {
        self.gold_slots = slots;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dialogue {
    pub dialogue_id: String,
    pub domain: String,
    pub turns: Vec<Turn>,
    pub gold_state_sequence: Option<Vec<DialogueState>>,
}

impl Dialogue {
    pub fn new(dialogue_id: impl Into<String>, domain: impl Into<String>, turns: Vec<Turn>) -> Self {
        Dialogue {
            dialogue_id: dialogue_id.into(),
            domain: domain.into(),
            turns,
            gold_state_sequence: None,
        }
    }

    /// Individual domains named by the `domain` field; multi-domain records
    /// join names with `+` or `,`.
    pub fn domains(&self) -> Vec<&str> {
        self.domain
            .split(['+', ','])
            .map(str::trim)
            .filter(|d| !d.is_empty())
            .collect()
    }

    pub fn is_single_domain(&self, domain: &str) -> bool {
        self.domains() == [domain]
    }

    pub fn touches_domain(&self, domain: &str) -> bool {
        self.domains().contains(&domain)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |message: String| Error::Validation {
            dialogue_id: self.dialogue_id.clone(),
            message,
        };
        if self.dialogue_id.is_empty() {
            return Err(fail("empty dialogue_id".into()));
        }
        for (i, turn) in self.turns.iter().enumerate() {
            if turn.index != i {
                return Err(fail(format!("turn {i} carries index {}", turn.index)));
            }
            if !turn.user_text.trim().is_empty() && turn.user_tokens.is_empty() {
                return Err(fail(format!("turn {i} has text but no tokens")));
            }
            let len = turn.user_text.chars().count();
            let mut spans: Vec<(usize, usize)> =
                turn.gold_slots.iter().filter_map(|s| s.span).collect();
            for &(start, end) in &spans {
                if start >= end || end > len {
                    return Err(fail(format!(
                        "turn {i}: slot span [{start}, {end}) outside utterance of {len} chars"
                    )));
                }
            }
            spans.sort_unstable();
            if let Some(w) = spans.windows(2).find(|w| w[1].0 < w[0].1) {
                return Err(fail(format!(
                    "turn {i}: overlapping slot spans {:?} and {:?}",
                    w[0], w[1]
                )));
            }
        }
        if let Some(states) = &self.gold_state_sequence {
            if states.len() != self.turns.len() {
                return Err(fail(format!(
                    "{} gold states for {} turns",
                    states.len(),
                    self.turns.len()
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct DialogueRecord {
    dialogue_id: String,
    domain: String,
    turns: Vec<TurnRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
struct TurnRecord {
    user: String,
    system: String,
    #[serde(default)]
    slots: Vec<GoldSlot>,
}

impl From<DialogueRecord> for Dialogue {
    fn from(rec: DialogueRecord) -> Self {
        let turns = rec
            .turns
            .into_iter()
            .enumerate()
            .map(|(i, t)| Turn::new(i, t.user, t.system).with_slots(t.slots))
            .collect();
        Dialogue::new(rec.dialogue_id, rec.domain, turns)
    }
}

impl From<&Dialogue> for DialogueRecord {
    fn from(d: &Dialogue) -> Self {
        DialogueRecord {
            dialogue_id: d.dialogue_id.clone(),
            domain: d.domain.clone(),
            turns: d
                .turns
                .iter()
                .map(|t| TurnRecord {
                    user: t.user_text.clone(),
                    system: t.system_text.clone(),
                    slots: t.gold_slots.clone(),
                })
                .collect(),
        }
    }
}

/// Parses JSON Lines dialogue records. Blank lines are ignored.
pub fn parse_dialogue_corpus<R: BufRead>(reader: R, domain_filter: Option<&str>) -> Result<Vec<Dialogue>> {
    let mut dialogues = Vec::new();
    let mut seen = HashSet::new();
    for (i, line) in reader.lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DialogueRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let dialogue = Dialogue::from(record);
        dialogue.validate()?;
        if !seen.insert(dialogue.dialogue_id.clone()) {
            return Err(Error::Validation {
                dialogue_id: dialogue.dialogue_id,
                message: "duplicate dialogue_id".into(),
            });
        }
        if domain_filter.is_none_or(|d| dialogue.is_single_domain(d)) {
            dialogues.push(dialogue);
        }
    }
    Ok(dialogues)
}

/// Loads a JSONL corpus. With a domain filter only dialogues whose domain is
/// exactly that single domain are kept.
pub fn load_dialogue_corpus(path: impl AsRef<Path>, domain_filter: Option<&str>) -> Result<Vec<Dialogue>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_dialogue_corpus(BufReader::new(file), domain_filter)
}

pub fn write_dialogue_corpus(path: impl AsRef<Path>, dialogues: &[Dialogue]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for d in dialogues {
        serde_json::to_writer(&mut out, &DialogueRecord::from(d))?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}
