use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{GoldSlot, Turn};
use crate::error::{Error, Result};
use crate::text::{tokenize, tokenize_with_offsets};

/// Nameless boundary label. The discriminants fix the classifier's output order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BioLabel {
    B = 0,
    I = 1,
    O = 2,
}

impl BioLabel {
    pub const ALL: [BioLabel; 3] = [BioLabel::B, BioLabel::I, BioLabel::O];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Self> {
        Self::ALL.get(i).copied()
    }

    pub fn is_slot(self) -> bool {
        self != BioLabel::O
    }
}

impl fmt::Display for BioLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BioLabel::B => "B",
            BioLabel::I => "I",
            BioLabel::O => "O",
        })
    }
}

impl FromStr for BioLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "B" => Ok(BioLabel::B),
            "I" => Ok(BioLabel::I),
            "O" => Ok(BioLabel::O),
            other => Err(Error::invalid(format!("not a BIO label: `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BioUtterance {
    pub tokens: Vec<String>,
    pub labels: Vec<BioLabel>,
}

impl BioUtterance {
    pub fn new(tokens: Vec<String>, labels: Vec<BioLabel>) -> Result<Self> {
        if tokens.len() != labels.len() {
            return Err(Error::invalid(format!(
                "{} tokens but {} labels",
                tokens.len(),
                labels.len()
            )));
        }
        Ok(BioUtterance { tokens, labels })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }
}

/// A gold slot that could not be placed on the token sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SkippedSlot {
    pub slot: GoldSlot,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BioConversion {
    pub utterance: BioUtterance,
    pub skipped: Vec<SkippedSlot>,
}

/// Converts a turn's gold slots to nameless BIO labels over its user tokens.
///
/// Slots carrying a character span label every token the span overlaps.
/// Slots without a span are located by a case-insensitive token match of the
/// value; the first occurrence not already labeled wins. Unlocatable or
/// overlapping slots are skipped and reported.
pub fn to_bio(turn: &Turn) -> BioConversion {
    let tokens = tokenize_with_offsets(&turn.user_text);
    let lowered: Vec<String> = tokens.iter().map(|t| t.text.to_lowercase()).collect();
    let mut labels = vec![BioLabel::O; tokens.len()];
    let mut skipped = Vec::new();

    for slot in &turn.gold_slots {
        let range = match slot.span {
            Some((start, end)) => {
                let covered: Vec<usize> = tokens
                    .iter()
                    .enumerate()
                    .filter(|(_, t)| t.start < end && start < t.end)
                    .map(|(i, _)| i)
                    .collect();
                covered.first().map(|&first| (first, *covered.last().unwrap()))
            }
            None => locate_value(&lowered, &labels, &slot.value),
        };
        let Some((first, last)) = range else {
            log::warn!(
                "slot {}={:?} not found in {:?}; skipped",
                slot.name,
                slot.value,
                turn.user_text
            );
            skipped.push(SkippedSlot {
                slot: slot.clone(),
                reason: "value not locatable in user utterance".into(),
            });
            continue;
        };
        if labels[first..=last].iter().any(|l| l.is_slot()) {
            log::warn!("slot {}={:?} overlaps an earlier slot; skipped", slot.name, slot.value);
            skipped.push(SkippedSlot {
                slot: slot.clone(),
                reason: "overlaps an earlier slot".into(),
            });
            continue;
        }
        labels[first] = BioLabel::B;
        for l in &mut labels[first + 1..=last] {
            *l = BioLabel::I;
        }
    }

    BioConversion {
        utterance: BioUtterance {
            tokens: tokens.into_iter().map(|t| t.text).collect(),
            labels,
        },
        skipped,
    }
}

fn locate_value(lowered: &[String], labels: &[BioLabel], value: &str) -> Option<(usize, usize)> {
    let needle: Vec<String> = tokenize(value).iter().map(|t| t.to_lowercase()).collect();
    if needle.is_empty() || needle.len() > lowered.len() {
        return None;
    }
    (0..=lowered.len() - needle.len())
        .find(|&i| {
            lowered[i..i + needle.len()] == needle[..]
                && labels[i..i + needle.len()].iter().all(|l| !l.is_slot())
        })
        .map(|i| (i, i + needle.len() - 1))
}

/// One utterance of a CoNLL-style BIO file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BioRecord {
    pub dialogue_id: String,
    pub turn: usize,
    pub utterance: BioUtterance,
}

pub fn write_bio_file(path: impl AsRef<Path>, records: &[BioRecord]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        for (i, rec) in records.iter().enumerate() {
            if i > 0 {
                writeln!(out)?;
            }
            writeln!(out, "# {} {}", rec.dialogue_id, rec.turn)?;
            for (tok, label) in rec.utterance.tokens.iter().zip(&rec.utterance.labels) {
                writeln!(out, "{tok}\t{label}")?;
            }
        }
        out.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

pub fn read_bio_file(path: impl AsRef<Path>) -> Result<Vec<BioRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    let mut current: Option<BioRecord> = None;
    let parse_err = |line: usize, message: String| Error::Parse { line, message };
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line_no = i + 1;
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            records.extend(current.take());
        } else if let Some(header) = line.strip_prefix("# ") {
            records.extend(current.take());
            let (id, turn) = header
                .rsplit_once(' ')
                .ok_or_else(|| parse_err(line_no, "header needs `# dialogue_id turn`".into()))?;
            let turn = turn
                .parse()
                .map_err(|_| parse_err(line_no, format!("bad turn index `{turn}`")))?;
            current = Some(BioRecord {
                dialogue_id: id.to_string(),
                turn,
                utterance: BioUtterance {
                    tokens: Vec::new(),
                    labels: Vec::new(),
                },
            });
        } else {
            let rec = current
                .as_mut()
                .ok_or_else(|| parse_err(line_no, "token line before header".into()))?;
            let (tok, label) = line
                .split_once('\t')
                .ok_or_else(|| parse_err(line_no, "expected token<TAB>label".into()))?;
            let label = label
                .parse()
                .map_err(|e: Error| parse_err(line_no, e.to_string()))?;
            rec.utterance.tokens.push(tok.to_string());
            rec.utterance.labels.push(label);
        }
    }
    records.extend(current);
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use BioLabel::{B, I, O};

    fn slot(name: &str, value: &str) -> GoldSlot {
        GoldSlot {
            name: name.into(),
            value: value.into(),
            span: None,
        }
    }

    fn labels(text: &str, slots: Vec<GoldSlot>) -> Vec<BioLabel> {
        to_bio(&Turn::new(0, text, "").with_slots(slots)).utterance.labels
    }

    #[test]
    fn multiwoz_train_example() {
        let got = labels(
            "[usr] a train to London King Cross that departs after 08:15",
            vec![slot("destination", "London King Cross"), slot("leave-at", "08:15")],
        );
        assert_eq!(got, [O, O, O, O, B, I, I, O, O, O, B]);
        let got = labels(
            "a train to London King Cross that departs after 08:15",
            vec![slot("destination", "London King Cross"), slot("leave-at", "08:15")],
        );
        assert_eq!(got, [O, O, O, B, I, I, O, O, O, B]);
    }

    #[test]
    fn atis_example() {
        let got = labels(
            "i want to fly from baltimore to dallas round trip",
            vec![slot("from", "baltimore"), slot("to", "dallas"), slot("type", "round trip")],
        );
        assert_eq!(got, [O, O, O, O, O, B, O, B, B, I]);
    }

    #[test]
    fn snips_example() {
        let got = labels(
            "book a restaurant for eight people in six years",
            vec![
                slot("restaurant_type", "restaurant"),
                slot("party_size", "eight"),
                slot("timeRange", "in six years"),
            ],
        );
        // "in six years" is annotated with the preposition in Snips.
        assert_eq!(got, [O, O, B, O, B, O, B, I, I]);
    }

    #[test]
    fn no_slots_all_outside() {
        assert_eq!(labels("hello there", vec![]), [O, O]);
    }

    #[test]
    fn char_spans_take_priority() {
        let mut s = slot("area", "centre");
        s.span = Some((22, 28));
        let got = labels("I'd like a sports place in the centre please", vec![s]);
        assert_eq!(got, [O, O, O, O, B, I, I, O, O]);
        let mut s = slot("area", "centre");
        s.span = Some((31, 37));
        let got = labels("I'd like a sports place in the centre please", vec![s]);
        assert_eq!(got, [O, O, O, O, O, O, O, B, O]);
    }

    #[test]
    fn unlocatable_value_is_skipped() {
        let conv = to_bio(&Turn::new(0, "a cheap one", "").with_slots(vec![slot("area", "north")]));
        assert_eq!(conv.utterance.labels, [O, O, O]);
        assert_eq!(conv.skipped.len(), 1);
    }

    #[test]
    fn repeated_value_uses_next_free_occurrence() {
        let got = labels("from cambridge to cambridge", vec![slot("a", "cambridge"), slot("b", "cambridge")]);
        assert_eq!(got, [O, B, O, B]);
    }

    #[test]
    fn bio_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.bio");
        let recs = vec![
            BioRecord {
                dialogue_id: "d 1".into(),
                turn: 0,
                utterance: BioUtterance::new(vec!["a".into(), "b".into()], vec![B, I]).unwrap(),
            },
            BioRecord {
                dialogue_id: "d2".into(),
                turn: 3,
                utterance: BioUtterance::new(vec!["c".into()], vec![O]).unwrap(),
            },
        ];
        write_bio_file(&path, &recs).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("# d 1 0\na\tB\nb\tI\n\n# d2 3\n"));
        assert_eq!(read_bio_file(&path).unwrap(), recs);
    }
}
