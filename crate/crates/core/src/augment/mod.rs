//! Multi-response data augmentation driven by dialogue states.
//!
//! Turns that share a state are treated as interchangeable contexts: any
//! system response observed under a state is a valid reply to every context
//! in that state.

mod dictionary;
mod emit;

pub use dictionary::{build_dictionary, ResponseEntry, StateUtteranceDictionary};
pub use emit::{mfs_emit, mrda_emit, subsample};

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corpus::Dialogue;
use crate::error::{Error, Result};
use crate::statetrack::{DialogueState, LabeledDialogue};

/// One training exchange with its state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TurnRecord {
    pub dialogue_id: String,
    pub turn: usize,
    pub context: String,
    pub response: String,
    pub state: DialogueState,
    pub gold_state: Option<DialogueState>,
}

/// The previous system reply, if any, followed by the current user turn.
pub fn context_for(dialogue: &Dialogue, turn: usize) -> String {
    let user = &dialogue.turns[turn].user_text;
    if turn == 0 {
        format!("[usr] {user}")
    } else {
        format!("[sys] {} [usr] {user}", dialogue.turns[turn - 1].system_text)
    }
}

/// Joins dialogues with their state sequences, one record per turn.
pub fn turn_records(
    dialogues: &[Dialogue],
    states: &[LabeledDialogue],
    gold: Option<&[LabeledDialogue]>,
) -> Result<Vec<TurnRecord>> {
    let index = |labeled: &[LabeledDialogue]| -> HashMap<String, Vec<DialogueState>> {
        labeled.iter().map(|l| (l.dialogue_id.clone(), l.states.clone())).collect()
    };
    let states = index(states);
    let gold = gold.map(index);
    let lookup = |map: &HashMap<String, Vec<DialogueState>>, d: &Dialogue, what: &str| -> Result<Vec<DialogueState>> {
        let s = map.get(&d.dialogue_id).ok_or_else(|| Error::Validation {
            dialogue_id: d.dialogue_id.clone(),
            message: format!("no {what} states"),
        })?;
        if s.len() != d.turns.len() {
            return Err(Error::Validation {
                dialogue_id: d.dialogue_id.clone(),
                message: format!("{} {what} states for {} turns", s.len(), d.turns.len()),
            });
        }
        Ok(s.clone())
    };
    let mut out = Vec::new();
    for d in dialogues {
        let s = lookup(&states, d, "labeled")?;
        let g = gold.as_ref().map(|g| lookup(g, d, "gold")).transpose()?;
        for (i, t) in d.turns.iter().enumerate() {
            out.push(TurnRecord {
                dialogue_id: d.dialogue_id.clone(),
                turn: t.index,
                context: context_for(d, i),
                response: t.system_text.clone(),
                state: s[i].clone(),
                gold_state: g.as_ref().map(|g| g[i].clone()),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Original,
    Mrda,
    Mfs,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AugmentedExample {
    pub context: String,
    pub response: String,
    pub state: DialogueState,
    pub origin: Origin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Method {
    #[default]
    Mrda,
    Mfs,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mrda" => Ok(Method::Mrda),
            "mfs" => Ok(Method::Mfs),
            other => Err(Error::invalid(format!("unknown augmentation method `{other}` (mrda|mfs)"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Mrda => "mrda",
            Method::Mfs => "mfs",
        })
    }
}

pub fn write_examples(path: impl AsRef<Path>, examples: &[AugmentedExample]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for ex in examples {
        serde_json::to_writer(&mut out, ex)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_examples(path: impl AsRef<Path>) -> Result<Vec<AugmentedExample>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: i + 1,
            message: e.to_string(),
        })?);
    }
    Ok(out)
}
