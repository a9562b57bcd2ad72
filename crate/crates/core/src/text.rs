//! Word tokenization shared by every module that addresses tokens by index.
//!
//! Text is split on whitespace, then leading and trailing punctuation is
//! detached into tokens of its own. Inner punctuation stays attached, so
//! `08:15`, `I'd` and `[usr]` are single tokens.

/// A token with its character (not byte) offsets in the source text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    pub start: usize,
    pub end: usize,
}

const TRAILING: &[char] = &['.', ',', '!', '?', ';', ':', ')', '"', '\''];
const LEADING: &[char] = &['(', '"', '\''];

pub fn tokenize_with_offsets(text: &str) -> Vec<Token> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        if chars[i].is_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        while i < chars.len() && !chars[i].is_whitespace() {
            i += 1;
        }
        split_chunk(&chars, start, i, &mut tokens);
    }
    tokens
}

fn split_chunk(chars: &[char], mut start: usize, mut end: usize, out: &mut Vec<Token>) {
    let mut leading = Vec::new();
    while end - start > 1 && LEADING.contains(&chars[start]) {
        leading.push(start);
        start += 1;
    }
    let mut trailing = Vec::new();
    while end - start > 1 && TRAILING.contains(&chars[end - 1]) {
        end -= 1;
        trailing.push(end);
    }
    let single = |at: usize| Token {
        text: chars[at].to_string(),
        start: at,
        end: at + 1,
    };
    out.extend(leading.into_iter().map(single));
    out.push(Token {
        text: chars[start..end].iter().collect(),
        start,
        end,
    });
    out.extend(trailing.into_iter().rev().map(single));
}

pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_with_offsets(text)
        .into_iter()
        .map(|t| t.text)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detaches_terminal_punctuation() {
        assert_eq!(
            tokenize("Okay, are there any cinemas in the centre?"),
            ["Okay", ",", "are", "there", "any", "cinemas", "in", "the", "centre", "?"]
        );
    }

    #[test]
    fn keeps_inner_punctuation() {
        assert_eq!(tokenize("I'd leave at 08:15."), ["I'd", "leave", "at", "08:15", "."]);
        assert_eq!(tokenize("[usr] hi"), ["[usr]", "hi"]);
    }

    #[test]
    fn offsets_are_character_based() {
        let toks = tokenize_with_offsets("café (ok)");
        assert_eq!(toks[0].text, "café");
        assert_eq!((toks[0].start, toks[0].end), (0, 4));
        assert_eq!(toks[1].text, "(");
        assert_eq!(toks[2].text, "ok");
        assert_eq!((toks[2].start, toks[2].end), (6, 8));
        assert_eq!(toks[3].text, ")");
    }

    #[test]
    fn empty_and_punctuation_only() {
        assert!(tokenize("   ").is_empty());
        assert_eq!(tokenize("?"), ["?"]);
        assert_eq!(tokenize("..."), [".", ".", "."]);
    }
}
