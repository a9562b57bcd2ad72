use std::collections::BTreeMap;

use super::TurnRecord;
use crate::statetrack::DialogueState;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResponseEntry {
    pub text: String,
    /// First turn observed with this response.
    pub source: (String, usize),
}

/// Valid system responses observed under each state, deduplicated by exact
/// string and kept in first-seen order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct StateUtteranceDictionary {
    pub entries: BTreeMap<DialogueState, Vec<ResponseEntry>>,
}

impl StateUtteranceDictionary {
    pub fn responses(&self, state: &DialogueState) -> &[ResponseEntry] {
        self.entries.get(state).map_or(&[], Vec::as_slice)
    }

    pub fn contains(&self, state: &DialogueState, response: &str) -> bool {
        self.responses(state).iter().any(|r| r.text == response)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn build_dictionary(turns: &[TurnRecord]) -> StateUtteranceDictionary {
    let mut dict = StateUtteranceDictionary::default();
    for t in turns {
        let list = dict.entries.entry(t.state.clone()).or_default();
        if !list.iter().any(|r| r.text == t.response) {
            list.push(ResponseEntry {
                text: t.response.clone(),
                source: (t.dialogue_id.clone(), t.turn),
            });
        }
    }
    dict
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rec(id: &str, state: u32, response: &str) -> TurnRecord {
        TurnRecord {
            dialogue_id: id.into(),
            turn: 0,
            context: format!("[usr] {id}"),
            response: response.into(),
            state: DialogueState(vec![state]),
            gold_state: None,
        }
    }

    #[test]
    fn groups_and_dedups() {
        let d = build_dictionary(&[rec("a", 1, "r1"), rec("b", 1, "r2"), rec("c", 1, "r1"), rec("e", 2, "r3")]);
        assert_eq!(d.len(), 2);
        let z = DialogueState(vec![1]);
        assert_eq!(d.responses(&z).len(), 2);
        assert_eq!(d.responses(&z)[0].source.0, "a");
        assert!(d.contains(&DialogueState(vec![2]), "r3"));
        assert!(!d.contains(&DialogueState(vec![2]), "r1"));
    }
}
