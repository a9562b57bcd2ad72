use super::{comb2, Contingency};
use crate::error::Result;

/// Fraction of item pairs on which the two labelings agree (same cluster in
/// both, or different clusters in both).
pub fn rand_index(gold: &[i64], pred: &[i64]) -> Result<f64> {
    let t = Contingency::new(gold, pred)?;
    let total = comb2(t.n);
    let same_both: f64 = t.cells.iter().flatten().map(|&c| comb2(c)).sum();
    let same_gold: f64 = t.rows.iter().map(|&c| comb2(c)).sum();
    let same_pred: f64 = t.cols.iter().map(|&c| comb2(c)).sum();
    let diff_both = total - same_gold - same_pred + same_both;
    Ok((same_both + diff_both) / total)
}

/// Hubert–Arabie adjusted Rand index. Identical partitions score exactly 1,
/// including the degenerate single-cluster case.
pub fn adjusted_rand_index(gold: &[i64], pred: &[i64]) -> Result<f64> {
    let t = Contingency::new(gold, pred)?;
    if t.is_identity() {
        return Ok(1.0);
    }
    let index: f64 = t.cells.iter().flatten().map(|&c| comb2(c)).sum();
    let a: f64 = t.rows.iter().map(|&c| comb2(c)).sum();
    let b: f64 = t.cols.iter().map(|&c| comb2(c)).sum();
    let expected = a * b / comb2(t.n);
    let max = (a + b) / 2.0;
    Ok((index - expected) / (max - expected))
}
