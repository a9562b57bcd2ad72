//! Grouping of span embeddings into `N` approximate slot types.
//!
//! Three backends share one contract: Euclidean geometry on raw embeddings,
//! deterministic output for a fixed seed, and group ids renumbered by first
//! appearance in input order.

mod agglomerative;
mod birch;
mod grouping;
mod kmeans;

pub use agglomerative::ward_labels;
pub use birch::{birch_labels, BirchParams};
pub use grouping::{centroid, cluster_spans, read_grouping, write_grouping, SlotGrouping};
pub use kmeans::{kmeans_labels, KMeansParams};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    #[default]
    KMeans,
    Birch,
    Agglomerative,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algorithm::KMeans => "kmeans",
            Algorithm::Birch => "birch",
            Algorithm::Agglomerative => "agglomerative",
        })
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kmeans" => Ok(Algorithm::KMeans),
            "birch" => Ok(Algorithm::Birch),
            "agglomerative" | "agg" => Ok(Algorithm::Agglomerative),
            other => Err(Error::invalid(format!("unknown clustering algorithm `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    pub labels: Vec<usize>,
    pub warnings: Vec<String>,
}

/// Partitions `points` into `k` groups.
pub fn cluster_points<P: AsRef<[f32]>>(points: &[P], k: usize, algorithm: Algorithm, seed: u64) -> Result<Clustering> {
    if k == 0 {
        return Err(Error::invalid("number of groups must be at least 1"));
    }
    if points.len() < k {
        return Err(Error::invalid(format!("{} items cannot fill {k} groups", points.len())));
    }
    let dim = points[0].as_ref().len();
    if points.iter().any(|p| p.as_ref().len() != dim) {
        return Err(Error::invalid("embeddings differ in dimensionality"));
    }
    let data: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.as_ref().iter().map(|&x| f64::from(x)).collect())
        .collect();

    let mut warnings = Vec::new();
    if k == 1 {
        return Ok(Clustering {
            labels: vec![0; data.len()],
            warnings,
        });
    }
    if data.iter().all(|p| *p == data[0]) {
        let msg = format!("all {} embeddings are identical; groups 1..{k} left empty", data.len());
        log::warn!("{msg}");
        warnings.push(msg);
        return Ok(Clustering {
            labels: vec![0; data.len()],
            warnings,
        });
    }

    let raw = match algorithm {
        Algorithm::KMeans => kmeans_labels(&data, k, &KMeansParams { seed, ..Default::default() }),
        Algorithm::Birch => birch_labels(&data, k, &BirchParams::default()),
        Algorithm::Agglomerative => ward_labels(&data, k),
    };
    Ok(Clustering {
        labels: canonical_labels(&raw),
        warnings,
    })
}

/// Renumbers labels in order of first appearance.
pub fn canonical_labels(labels: &[usize]) -> Vec<usize> {
    let mut map = std::collections::HashMap::new();
    labels
        .iter()
        .map(|&l| {
            let next = map.len();
            *map.entry(l).or_insert(next)
        })
        .collect()
}

pub(crate) fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}
