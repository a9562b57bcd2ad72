use std::collections::HashMap;

use crate::error::{Error, Result};

const MAX_ORDER: usize = 4;

fn ngrams(tokens: &[String], order: usize) -> HashMap<&[String], usize> {
    let mut out = HashMap::new();
    if tokens.len() >= order {
        for w in tokens.windows(order) {
            *out.entry(w).or_insert(0) += 1;
        }
    }
    out
}

/// Corpus-level BLEU-4 with uniform weights and brevity penalty, scaled to
/// [0, 100]. No smoothing: any n-gram order with zero matches gives 0.
pub fn corpus_bleu(references: &[Vec<String>], hypotheses: &[Vec<String>]) -> Result<f64> {
    if references.len() != hypotheses.len() {
        return Err(Error::invalid(format!(
            "{} references but {} hypotheses",
            references.len(),
            hypotheses.len()
        )));
    }
    let mut matched = [0usize; MAX_ORDER];
    let mut possible = [0usize; MAX_ORDER];
    let (mut ref_len, mut hyp_len) = (0usize, 0usize);
    for (r, h) in references.iter().zip(hypotheses) {
        ref_len += r.len();
        hyp_len += h.len();
        for order in 1..=MAX_ORDER {
            let rc = ngrams(r, order);
            for (g, c) in ngrams(h, order) {
                matched[order - 1] += c.min(rc.get(g).copied().unwrap_or(0));
                possible[order - 1] += c;
            }
        }
    }
    if hyp_len == 0 || matched.contains(&0) {
        return Ok(0.0);
    }
    let log_p: f64 = (0..MAX_ORDER)
        .map(|i| (matched[i] as f64 / possible[i] as f64).ln())
        .sum::<f64>()
        / MAX_ORDER as f64;
    let bp = if hyp_len > ref_len {
        1.0
    } else {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    };
    Ok(100.0 * bp * log_p.exp())
}
