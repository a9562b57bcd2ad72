use std::collections::HashMap;

use crate::error::{Error, Result};

fn dist(a: &[f32], b: &[f32]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let d = *x as f64 - *y as f64;
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

/// Mean silhouette coefficient under Euclidean distance. Items alone in
/// their cluster score 0.
pub fn silhouette(points: &[Vec<f32>], labels: &[i64]) -> Result<f64> {
    if points.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} embeddings but {} labels",
            points.len(),
            labels.len()
        )));
    }
    if points.len() < 3 {
        return Err(Error::invalid("silhouette needs at least three items"));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(Error::invalid("embeddings have different dimensions"));
    }
    let mut ids = HashMap::new();
    let cl: Vec<usize> = labels
        .iter()
        .map(|l| {
            let next = ids.len();
            *ids.entry(*l).or_insert(next)
        })
        .collect();
    let k = ids.len();
    if k < 2 {
        return Err(Error::invalid("silhouette is undefined for a single cluster"));
    }
    let mut sizes = vec![0usize; k];
    for &c in &cl {
        sizes[c] += 1;
    }
    let n = points.len();
    let mut total = 0.0;
    let mut sums = vec![0.0f64; k];
    for i in 0..n {
        if sizes[cl[i]] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for j in 0..n {
            if i != j {
                sums[cl[j]] += dist(&points[i], &points[j]);
            }
        }
        let a = sums[cl[i]] / (sizes[cl[i]] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != cl[i])
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    Ok(total / n as f64)
}
