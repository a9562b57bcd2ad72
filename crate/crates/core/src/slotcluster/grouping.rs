use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{cluster_points, Algorithm};
use crate::error::{Error, Result};
use crate::sbd::{SpanPrediction, SpanRef};

/// Assignment of every detected span to one of `n_groups` slot groups.
#[derive(Debug, Clone, PartialEq)]
pub struct SlotGrouping {
    pub n_groups: usize,
    pub assignment: BTreeMap<SpanRef, usize>,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub warnings: Vec<String>,
}

impl SlotGrouping {
    pub fn group_of(&self, span: &SpanRef) -> Option<usize> {
        self.assignment.get(span).copied()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.n_groups];
        for &g in self.assignment.values() {
            sizes[g] += 1;
        }
        sizes
    }

    /// Same grouping with group `g` renamed to `perm[g]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..self.n_groups).collect::<Vec<_>>() {
            return Err(Error::invalid(format!("{perm:?} is not a permutation of 0..{}", self.n_groups)));
        }
        Ok(SlotGrouping {
            assignment: self.assignment.iter().map(|(k, &g)| (k.clone(), perm[g])).collect(),
            ..self.clone()
        })
    }
}

/// Clusters span embeddings into `n_groups` groups.
pub fn cluster_spans(spans: &[SpanPrediction], n_groups: usize, algorithm: Algorithm, seed: u64) -> Result<SlotGrouping> {
    let mut seen = HashSet::new();
    for s in spans {
        if !seen.insert(s.span_ref()) {
            return Err(Error::invalid(format!("span {} listed twice", s.span_ref())));
        }
    }
    let points: Vec<&[f32]> = spans.iter().map(|s| s.embedding.as_slice()).collect();
    let clustering = cluster_points(&points, n_groups, algorithm, seed)?;
    Ok(SlotGrouping {
        n_groups,
        assignment: spans.iter().map(SpanPrediction::span_ref).zip(clustering.labels).collect(),
        algorithm,
        seed,
        warnings: clustering.warnings,
    })
}

/// Mean embedding of the members of `group`.
pub fn centroid(grouping: &SlotGrouping, spans: &[SpanPrediction], group: usize) -> Result<Vec<f32>> {
    let members: Vec<&SpanPrediction> = spans
        .iter()
        .filter(|s| grouping.group_of(&s.span_ref()) == Some(group))
        .collect();
    let Some(first) = members.first() else {
        return Err(Error::invalid(format!("group {group} has no members")));
    };
    let mut acc = vec![0.0f64; first.embedding.len()];
    for m in &members {
        for (a, x) in acc.iter_mut().zip(&m.embedding) {
            *a += f64::from(*x);
        }
    }
    Ok(acc.into_iter().map(|a| (a / members.len() as f64) as f32).collect())
}

#[derive(Serialize, Deserialize)]
struct GroupingFile {
    n_groups: usize,
    algorithm: Algorithm,
    seed: u64,
    assignment: Vec<AssignmentEntry>,
}

#[derive(Serialize, Deserialize)]
struct AssignmentEntry {
    span_ref: SpanRef,
    group: usize,
}

pub fn write_grouping(path: impl AsRef<Path>, grouping: &SlotGrouping) -> Result<()> {
    let path = path.as_ref();
    let file = GroupingFile {
        n_groups: grouping.n_groups,
        algorithm: grouping.algorithm,
        seed: grouping.seed,
        assignment: grouping
            .assignment
            .iter()
            .map(|(r, &g)| AssignmentEntry {
                span_ref: r.clone(),
                group: g,
            })
            .collect(),
    };
    fs::write(path, serde_json::to_string_pretty(&file)?).map_err(|e| Error::io(path, e))
}

pub fn read_grouping(path: impl AsRef<Path>) -> Result<SlotGrouping> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: GroupingFile = serde_json::from_str(&text)?;
    let mut assignment = BTreeMap::new();
    for entry in file.assignment {
        if entry.group >= file.n_groups {
            return Err(Error::format(path, format!("group {} outside [0, {})", entry.group, file.n_groups)));
        }
        if assignment.insert(entry.span_ref.clone(), entry.group).is_some() {
            return Err(Error::format(path, format!("span {} assigned twice", entry.span_ref)));
        }
    }
    Ok(SlotGrouping {
        n_groups: file.n_groups,
        assignment,
        algorithm: file.algorithm,
        seed: file.seed,
        warnings: Vec::new(),
    })
}
