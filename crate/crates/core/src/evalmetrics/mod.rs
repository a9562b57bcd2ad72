//! Partition-similarity metrics, the silhouette coefficient and corpus BLEU.
//!
//! | metric | range | chance level |
//! |--------|-------|--------------|
//! | [`rand_index`] | [0, 1] | depends on cluster sizes |
//! | [`adjusted_rand_index`] | [-1, 1] | 0 |
//! | [`adjusted_mutual_info`] | ≤ 1 | 0 |
//! | [`silhouette`] | [-1, 1] | n/a |
//! | [`corpus_bleu`] | [0, 100] | n/a |

mod ami;
mod bleu;
mod pairs;
mod silhouette;

pub use ami::{adjusted_mutual_info, entropy, expected_mutual_info, mutual_info};
pub use bleu::corpus_bleu;
pub use pairs::{adjusted_rand_index, rand_index};
pub use silhouette::silhouette;

use std::collections::HashMap;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One cluster label per item. Label values are arbitrary.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Assignment(pub Vec<i64>);

impl Deref for Assignment {
    type Target = [i64];

    fn deref(&self) -> &[i64] {
        &self.0
    }
}

impl From<Vec<i64>> for Assignment {
    fn from(v: Vec<i64>) -> Self {
        Assignment(v)
    }
}

impl From<Vec<usize>> for Assignment {
    fn from(v: Vec<usize>) -> Self {
        Assignment(v.into_iter().map(|x| x as i64).collect())
    }
}

/// Contingency table between two labelings with its margins.
#[derive(Debug, Clone)]
pub struct Contingency {
    pub n: usize,
    /// `cells[i][j]` = items with the i-th gold label and j-th predicted label.
    pub cells: Vec<Vec<usize>>,
    pub rows: Vec<usize>,
    pub cols: Vec<usize>,
}

impl Contingency {
    pub fn new(gold: &[i64], pred: &[i64]) -> Result<Self> {
        check_pair(gold, pred)?;
        let index = |labels: &[i64]| {
            let mut map = HashMap::new();
            let ids: Vec<usize> = labels
                .iter()
                .map(|l| {
                    let next = map.len();
                    *map.entry(*l).or_insert(next)
                })
                .collect();
            (ids, map.len())
        };
        let (gi, nr) = index(gold);
        let (pi, nc) = index(pred);
        let mut cells = vec![vec![0usize; nc]; nr];
        for (&r, &c) in gi.iter().zip(&pi) {
            cells[r][c] += 1;
        }
        let rows = cells.iter().map(|r| r.iter().sum()).collect();
        let cols = (0..nc).map(|c| cells.iter().map(|r| r[c]).sum()).collect();
        Ok(Contingency {
            n: gold.len(),
            cells,
            rows,
            cols,
        })
    }

    /// True when both labelings induce the same partition.
    pub fn is_identity(&self) -> bool {
        self.rows.len() == self.cols.len()
            && self.cells.iter().all(|r| r.iter().filter(|&&c| c > 0).count() == 1)
            && (0..self.cols.len()).all(|c| self.cells.iter().filter(|r| r[c] > 0).count() == 1)
    }
}

fn check_pair(gold: &[i64], pred: &[i64]) -> Result<()> {
    if gold.len() != pred.len() {
        return Err(Error::invalid(format!("assignments of length {} and {}", gold.len(), pred.len())));
    }
    if gold.len() < 2 {
        return Err(Error::invalid("pair-based metrics need at least two items"));
    }
    Ok(())
}

pub(crate) fn comb2(k: usize) -> f64 {
    (k as f64) * (k as f64 - 1.0) / 2.0
}
