//! Deterministic dialogue-state labeling.
//!
//! A state is a vector of per-slot-group modification counts. It starts at
//! zero and every detected span (or gold value change) in a turn increments
//! its group's coordinate; each turn records the vector after its updates.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::Dialogue;
use crate::error::{Error, Result};
use crate::sbd::SpanRef;
use crate::slotcluster::SlotGrouping;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DialogueState(pub Vec<u32>);

impl DialogueState {
    pub fn zeros(n: usize) -> Self {
        DialogueState(vec![0; n])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    pub fn total(&self) -> u64 {
        self.0.iter().map(|&c| u64::from(c)).sum()
    }

    /// Moves coordinate `j` to position `perm[j]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut out = vec![0; self.0.len()];
        for (j, &c) in self.0.iter().enumerate() {
            out[perm[j]] = c;
        }
        DialogueState(out)
    }
}

impl fmt::Display for DialogueState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabeledDialogue {
    pub dialogue_id: String,
    pub states: Vec<DialogueState>,
}

impl LabeledDialogue {
    /// Transitions this dialogue contributes to a structure graph: one per
    /// consecutive pair of turns, plus the implicit start transition from
    /// the zero vector when the first turn already changed the state.
    pub fn transition_count(&self) -> usize {
        match self.states.first() {
            None => 0,
            Some(first) => self.states.len() - 1 + usize::from(!first.is_zero()),
        }
    }

    pub fn is_monotone(&self) -> bool {
        self.states
            .windows(2)
            .all(|w| w[0].0.iter().zip(&w[1].0).all(|(a, b)| a <= b))
    }
}

/// Labels a dialogue from its detected spans.
pub fn label_states(
    dialogue: &Dialogue,
    spans_by_turn: &BTreeMap<usize, Vec<SpanRef>>,
    grouping: &SlotGrouping,
) -> Result<LabeledDialogue> {
    let mut state = DialogueState::zeros(grouping.n_groups);
    let mut states = Vec::with_capacity(dialogue.turns.len());
    for turn in &dialogue.turns {
        for span in spans_by_turn.get(&turn.index).into_iter().flatten() {
            let group = grouping
                .group_of(span)
                .ok_or_else(|| Error::MissingSpan(span.to_string()))?;
            state.0[group] += 1;
        }
        states.push(state.clone());
    }
    Ok(LabeledDialogue {
        dialogue_id: dialogue.dialogue_id.clone(),
        states,
    })
}

/// Labels a dialogue from its gold slot annotations.
///
/// Each slot has a tracked value that starts unset. A turn annotating slot
/// `j` with a value different from the tracked one increments coordinate
/// `j` and replaces the tracked value. Turns that omit a slot leave both the
/// count and the tracked value untouched, so deletions never decrement.
pub fn label_states_gold(dialogue: &Dialogue, slot_order: &[String]) -> Result<LabeledDialogue> {
    let index: HashMap<&str, usize> = slot_order.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
    let mut current: Vec<Option<&str>> = vec![None; slot_order.len()];
    let mut state = DialogueState::zeros(slot_order.len());
    let mut states = Vec::with_capacity(dialogue.turns.len());
    for turn in &dialogue.turns {
        for slot in &turn.gold_slots {
            let j = *index
                .get(slot.name.as_str())
                .ok_or_else(|| Error::UnknownSlot(slot.name.clone()))?;
            if current[j] != Some(slot.value.as_str()) {
                current[j] = Some(slot.value.as_str());
                state.0[j] += 1;
            }
        }
        states.push(state.clone());
    }
    Ok(LabeledDialogue {
        dialogue_id: dialogue.dialogue_id.clone(),
        states,
    })
}

/// Sorted gold slot names appearing anywhere in `dialogues`.
pub fn gold_slot_names<'a>(dialogues: impl IntoIterator<Item = &'a Dialogue>) -> Vec<String> {
    dialogues
        .into_iter()
        .flat_map(|d| d.turns.iter().flat_map(|t| t.gold_slots.iter().map(|s| s.name.clone())))
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect()
}

pub fn distinct_states(labeled: &[LabeledDialogue]) -> BTreeSet<DialogueState> {
    labeled.iter().flat_map(|l| l.states.iter().cloned()).collect()
}

/// Distinct-state counts in each region of the train/valid/test Venn diagram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StateOverlap {
    pub train_only: usize,
    pub valid_only: usize,
    pub test_only: usize,
    pub train_valid: usize,
    pub train_test: usize,
    pub test_valid: usize,
    pub all: usize,
}

impl StateOverlap {
    pub fn total(&self) -> usize {
        self.train_only + self.valid_only + self.test_only + self.train_valid + self.train_test + self.test_valid + self.all
    }
}

pub fn state_overlap(train: &[LabeledDialogue], valid: &[LabeledDialogue], test: &[LabeledDialogue]) -> StateOverlap {
    let (tr, va, te) = (distinct_states(train), distinct_states(valid), distinct_states(test));
    let mut out = StateOverlap::default();
    for s in tr.union(&va).cloned().collect::<BTreeSet<_>>().union(&te) {
        match (tr.contains(s), va.contains(s), te.contains(s)) {
            (true, false, false) => out.train_only += 1,
            (false, true, false) => out.valid_only += 1,
            (false, false, true) => out.test_only += 1,
            (true, true, false) => out.train_valid += 1,
            (true, false, true) => out.train_test += 1,
            (false, true, true) => out.test_valid += 1,
            (true, true, true) => out.all += 1,
            (false, false, false) => unreachable!(),
        }
    }
    out
}

/// Flattens labeled dialogues into one integer label per turn, numbering
/// states in order of first appearance.
pub fn state_assignment(labeled: &[LabeledDialogue]) -> Vec<i64> {
    let mut ids: HashMap<&DialogueState, i64> = HashMap::new();
    labeled
        .iter()
        .flat_map(|l| &l.states)
        .map(|s| {
            let next = ids.len() as i64;
            *ids.entry(s).or_insert(next)
        })
        .collect()
}

pub fn write_states_file(path: impl AsRef<Path>, labeled: &[LabeledDialogue]) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for l in labeled {
        serde_json::to_writer(&mut out, l)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_states_file(path: impl AsRef<Path>) -> Result<Vec<LabeledDialogue>> {
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{GoldSlot, Turn};
    use crate::slotcluster::Algorithm;

    fn sref(turn: usize, start: usize) -> SpanRef {
        SpanRef {
            dialogue_id: "att".into(),
            turn,
            start,
            end: start,
        }
    }

    fn attraction_dialogue() -> Dialogue {
        Dialogue::new(
            "att",
            "attraction",
            vec![
                Turn::new(0, "Can you please help me find a place to go?", "I've found 79 places for you to go. Do you have any specific ideas in your mind?"),
                Turn::new(1, "I'd like a sports place in the centre please.", "There are no results matching your query. Can I try a different area or type?"),
                Turn::new(2, "Okay, are there any cinemas in the centre?", "We have vue cinema."),
            ],
        )
    }

    fn grouping(entries: &[(SpanRef, usize)], n: usize) -> SlotGrouping {
        SlotGrouping {
            n_groups: n,
            assignment: entries.iter().cloned().collect(),
            algorithm: Algorithm::KMeans,
            seed: 0,
            warnings: vec![],
        }
    }

    #[test]
    fn attraction_replay() {
        // groups ordered (name, type, area); tokens: sports=3, centre=7, cinemas=5
        let d = attraction_dialogue();
        let g = grouping(&[(sref(1, 3), 1), (sref(1, 7), 2), (sref(2, 5), 1)], 3);
        let mut by_turn = BTreeMap::new();
        by_turn.insert(1, vec![sref(1, 3), sref(1, 7)]);
        by_turn.insert(2, vec![sref(2, 5)]);
        let l = label_states(&d, &by_turn, &g).unwrap();
        let expect: Vec<DialogueState> = [[0, 0, 0], [0, 1, 1], [0, 2, 1]].iter().map(|s| DialogueState(s.to_vec())).collect();
        assert_eq!(l.states, expect);
        assert_eq!(l.states[2].to_string(), "[0, 2, 1]");
        assert!(l.is_monotone());
    }

    #[test]
    fn no_spans_gives_zero_states() {
        let d = attraction_dialogue();
        let l = label_states(&d, &BTreeMap::new(), &grouping(&[], 4)).unwrap();
        assert!(l.states.iter().all(|s| *s == DialogueState::zeros(4)));
        assert_eq!(l.transition_count(), 2);
    }

    #[test]
    fn two_spans_same_group_add_two() {
        let d = attraction_dialogue();
        let g = grouping(&[(sref(1, 3), 0), (sref(1, 7), 0)], 2);
        let mut by_turn = BTreeMap::new();
        by_turn.insert(1, vec![sref(1, 3), sref(1, 7)]);
        let l = label_states(&d, &by_turn, &g).unwrap();
        assert_eq!(l.states[1], DialogueState(vec![2, 0]));
    }

    #[test]
    fn missing_span_is_error() {
        let d = attraction_dialogue();
        let mut by_turn = BTreeMap::new();
        by_turn.insert(1, vec![sref(1, 3)]);
        assert!(matches!(label_states(&d, &by_turn, &grouping(&[], 2)), Err(Error::MissingSpan(_))));
    }

    fn gold_dialogue(values: &[&[(&str, &str)]]) -> Dialogue {
        let turns = values
            .iter()
            .enumerate()
            .map(|(i, slots)| {
                Turn::new(i, "u", "s").with_slots(
                    slots
                        .iter()
                        .map(|(n, v)| GoldSlot {
                            name: n.to_string(),
                            value: v.to_string(),
                            span: None,
                        })
                        .collect(),
                )
            })
            .collect();
        Dialogue::new("g", "taxi", turns)
    }

    #[test]
    fn gold_value_changes_count() {
        let order = vec!["area".to_string(), "type".to_string()];
        let d = gold_dialogue(&[&[("area", "A")], &[("area", "B")], &[("area", "A")]]);
        let l = label_states_gold(&d, &order).unwrap();
        let area: Vec<u32> = l.states.iter().map(|s| s.0[0]).collect();
        assert_eq!(area, [1, 2, 3]);
    }

    #[test]
    fn gold_constant_annotation_is_flat() {
        let order = vec!["area".to_string(), "type".to_string()];
        let d = gold_dialogue(&[
            &[("area", "north"), ("type", "museum")],
            &[("area", "north"), ("type", "museum")],
            &[("area", "north"), ("type", "museum")],
        ]);
        let l = label_states_gold(&d, &order).unwrap();
        assert!(l.states.iter().all(|s| *s == DialogueState(vec![1, 1])));
    }

    #[test]
    fn gold_deletion_does_not_decrement() {
        let order = vec!["area".to_string()];
        let d = gold_dialogue(&[&[("area", "north")], &[], &[("area", "north")], &[("area", "south")]]);
        let l = label_states_gold(&d, &order).unwrap();
        let area: Vec<u32> = l.states.iter().map(|s| s.0[0]).collect();
        assert_eq!(area, [1, 1, 1, 2]);
    }

    #[test]
    fn gold_unknown_slot_is_error() {
        let d = gold_dialogue(&[&[("stars", "4")]]);
        assert!(matches!(label_states_gold(&d, &["area".into()]), Err(Error::UnknownSlot(_))));
    }

    #[test]
    fn distinct_state_sets() {
        let one = LabeledDialogue {
            dialogue_id: "x".into(),
            states: vec![DialogueState::zeros(3)],
        };
        assert_eq!(distinct_states(std::slice::from_ref(&one)).len(), 1);
        let a = LabeledDialogue {
            dialogue_id: "a".into(),
            states: vec![DialogueState(vec![0, 1]), DialogueState(vec![1, 1])],
        };
        let b = LabeledDialogue {
            dialogue_id: "b".into(),
            ..a.clone()
        };
        assert_eq!(distinct_states(&[a.clone(), b]), distinct_states(&[a]));
    }

    fn single(id: &str, v: u32) -> LabeledDialogue {
        LabeledDialogue {
            dialogue_id: id.into(),
            states: vec![DialogueState(vec![v])],
        }
    }

    #[test]
    fn overlap_regions() {
        let same = [single("a", 0), single("b", 1)];
        let o = state_overlap(&same, &same, &same);
        assert_eq!(o, StateOverlap { all: 2, ..Default::default() });

        let o = state_overlap(&[single("a", 0)], &[single("b", 1)], &[single("c", 2)]);
        assert_eq!((o.train_only, o.valid_only, o.test_only, o.total()), (1, 1, 1, 3));

        // brute-force set algebra on a mixed case
        let tr = [single("a", 0), single("b", 1), single("c", 3)];
        let va = [single("d", 1), single("e", 2)];
        let te = [single("f", 2), single("g", 3), single("h", 4), single("i", 1)];
        let o = state_overlap(&tr, &va, &te);
        assert_eq!(
            o,
            StateOverlap {
                train_only: 1,
                valid_only: 0,
                test_only: 1,
                train_valid: 0,
                train_test: 1,
                test_valid: 1,
                all: 1
            }
        );
    }

    #[test]
    fn assignment_interns_states() {
        let a = LabeledDialogue {
            dialogue_id: "a".into(),
            states: vec![DialogueState(vec![0]), DialogueState(vec![2]), DialogueState(vec![0])],
        };
        assert_eq!(state_assignment(&[a]), [0, 1, 0]);
    }

    #[test]
    fn states_file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.jsonl");
        let l = vec![LabeledDialogue {
            dialogue_id: "a".into(),
            states: vec![DialogueState(vec![0, 1]), DialogueState(vec![2, 1])],
        }];
        write_states_file(&p, &l).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "{\"dialogue_id\":\"a\",\"states\":[[0,1],[2,1]]}\n");
        assert_eq!(read_states_file(&p).unwrap(), l);
    }
}
