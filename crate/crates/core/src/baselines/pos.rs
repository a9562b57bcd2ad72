use std::collections::HashMap;

use serde::{Deserialize, Serialize};

/// Universal part-of-speech categories.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PosTag {
    Noun,
    Propn,
    Verb,
    Aux,
    Adj,
    Adv,
    Pron,
    Det,
    Adp,
    Cconj,
    Sconj,
    Part,
    Num,
    Intj,
    Punct,
}

impl PosTag {
    pub fn is_noun(self) -> bool {
        matches!(self, PosTag::Noun | PosTag::Propn)
    }
}

/// Assigns one tag per word.
pub trait PosTagger: Send + Sync {
    fn name(&self) -> &str;
    fn tag(&self, words: &[String]) -> Vec<PosTag>;
}

const CLOSED: &[(PosTag, &[&str])] = &[
    (
        PosTag::Pron,
        &[
            "i", "me", "my", "mine", "you", "your", "yours", "he", "him", "his", "she", "her", "hers", "it", "its",
            "we", "us", "our", "ours", "they", "them", "their", "theirs", "myself", "yourself", "something",
            "anything", "nothing", "everything", "someone", "anyone", "one", "what", "which", "who", "whom",
            "whose", "i'd", "i'm", "i'll", "i've", "you're", "you'd", "you'll", "we're", "we'd", "we'll",
            "they're", "it's", "that's", "there's", "what's", "this", "that", "these", "those",
        ],
    ),
    (
        PosTag::Det,
        &["a", "an", "the", "any", "some", "all", "each", "every", "no", "another", "both", "either", "neither"],
    ),
    (
        PosTag::Adp,
        &[
            "in", "on", "at", "to", "from", "for", "with", "without", "by", "of", "about", "near", "into", "onto",
            "after", "before", "between", "around", "through", "during", "until", "till", "within", "towards",
            "toward", "across", "over", "under", "via", "per", "than",
        ],
    ),
    (PosTag::Cconj, &["and", "or", "but", "nor", "yet", "so", "plus"]),
    (PosTag::Sconj, &["if", "because", "while", "although", "whether", "since", "unless", "when", "where", "as"]),
    (PosTag::Part, &["not", "n't", "'s"]),
    (
        PosTag::Aux,
        &[
            "is", "am", "are", "was", "were", "be", "been", "being", "do", "does", "did", "have", "has", "had",
            "can", "could", "will", "would", "shall", "should", "may", "might", "must", "don't", "doesn't",
            "didn't", "can't", "won't", "isn't", "aren't", "wasn't",
        ],
    ),
    (
        PosTag::Intj,
        &["please", "thanks", "thank", "hello", "hi", "hey", "yes", "ok", "okay", "bye", "goodbye", "sure", "great"],
    ),
    (
        PosTag::Adv,
        &[
            "also", "too", "very", "just", "only", "there", "here", "then", "now", "again", "really", "else",
            "how", "why", "soon", "later", "today", "tomorrow", "tonight", "well", "instead",
        ],
    ),
    (
        PosTag::Num,
        &["two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven", "twelve"],
    ),
];

const VERBS: &[&str] = &[
    "like", "want", "need", "book", "find", "look", "looking", "go", "going", "leave", "leaving", "arrive",
    "arriving", "get", "getting", "know", "tell", "give", "make", "reserve", "help", "stay", "staying", "see",
    "visit", "travel", "travelling", "traveling", "depart", "departing", "take", "pick", "recommend", "suggest",
    "try", "eat", "serve", "serves", "serving", "let", "think", "check", "call", "provide", "send", "come",
    "booked", "found", "reserved", "prefer", "include", "includes", "love", "say", "said", "mean", "sounds",
    "sound", "wanted", "needs", "wants", "looks", "offer", "offers",
];

const ADJECTIVES: &[&str] = &[
    "cheap", "expensive", "moderate", "moderately", "free", "good", "nice", "best", "new", "old", "other",
    "same", "different", "local", "nearby", "available", "open", "closed", "big", "small", "large", "fine",
    "interesting", "popular", "certain", "particular", "specific", "many", "much", "more", "few",
    "first", "last", "next", "early", "late", "north", "south", "east", "west", "indian", "chinese", "italian",
];

/// Lexicon-driven tagger: closed-class words and a small open-class list,
/// with suffix fallbacks. Anything unrecognised is a noun.
#[derive(Debug, Clone)]
pub struct RuleBasedPosTagger {
    lexicon: HashMap<&'static str, PosTag>,
}

impl Default for RuleBasedPosTagger {
    fn default() -> Self {
        let mut lexicon = HashMap::new();
        for &v in VERBS {
            lexicon.insert(v, PosTag::Verb);
        }
        for &a in ADJECTIVES {
            lexicon.insert(a, PosTag::Adj);
        }
        for (tag, words) in CLOSED {
            for &w in *words {
                lexicon.insert(w, *tag);
            }
        }
        RuleBasedPosTagger { lexicon }
    }
}

impl RuleBasedPosTagger {
    fn tag_word(&self, word: &str) -> PosTag {
        let lower = word.to_lowercase();
        if let Some(t) = self.lexicon.get(lower.as_str()) {
            return *t;
        }
        if lower.chars().all(|c| !c.is_alphanumeric()) {
            return PosTag::Punct;
        }
        if lower.chars().any(|c| c.is_ascii_digit()) {
            return PosTag::Num;
        }
        if lower.len() > 4 && lower.ends_with("ly") {
            return PosTag::Adv;
        }
        if lower.ends_with("ful") || lower.ends_with("ous") || lower.ends_with("ive") || lower.ends_with("able") {
            return PosTag::Adj;
        }
        if word.chars().next().is_some_and(char::is_uppercase) {
            return PosTag::Propn;
        }
        PosTag::Noun
    }
}

impl PosTagger for RuleBasedPosTagger {
    fn name(&self) -> &str {
        "rule-based"
    }

    fn tag(&self, words: &[String]) -> Vec<PosTag> {
        words.iter().map(|w| self.tag_word(w)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    #[test]
    fn example_sentence() {
        let words = tokenize("I'd like a sports place in the centre please");
        let tags = RuleBasedPosTagger::default().tag(&words);
        let nouns: Vec<&str> = words
            .iter()
            .zip(&tags)
            .filter(|(_, t)| t.is_noun())
            .map(|(w, _)| w.as_str())
            .collect();
        assert_eq!(nouns, ["sports", "place", "centre"]);
    }

    #[test]
    fn no_nouns() {
        let words = tokenize("yes please");
        assert!(RuleBasedPosTagger::default().tag(&words).iter().all(|t| !t.is_noun()));
    }

    #[test]
    fn capitalised_unknown_is_proper() {
        let words = tokenize("to Cambridge");
        assert_eq!(RuleBasedPosTagger::default().tag(&words), [PosTag::Adp, PosTag::Propn]);
    }
}
