use rand::Rng;

use super::sq_dist;
use crate::seed;

#[derive(Debug, Clone)]
pub struct KMeansParams {
    pub n_init: usize,
    pub max_iter: usize,
    /// Relative tolerance on centroid movement, scaled by the mean per-feature variance.
    pub tol: f64,
    pub seed: u64,
}

impl Default for KMeansParams {
    fn default() -> Self {
        KMeansParams {
            n_init: 10,
            max_iter: 300,
            tol: 1e-4,
            seed: 0,
        }
    }
}

/// Lloyd's algorithm with k-means++ seeding; the lowest-inertia restart wins.
///
/// A cluster that empties is reseeded with the point farthest from its
/// current centroid, so every one of the `k` labels is used whenever there
/// are at least `k` points.
pub fn kmeans_labels(data: &[Vec<f64>], k: usize, params: &KMeansParams) -> Vec<usize> {
    let tol = params.tol * mean_variance(data);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for run in 0..params.n_init.max(1) {
        let mut rng = seed::rng(params.seed.wrapping_add(run as u64));
        let (inertia, labels) = single_run(data, k, params.max_iter, tol, &mut rng);
        if best.as_ref().is_none_or(|(b, _)| inertia < *b) {
            best = Some((inertia, labels));
        }
    }
    best.map(|(_, l)| l).unwrap_or_default()
}

fn mean_variance(data: &[Vec<f64>]) -> f64 {
    let n = data.len() as f64;
    let dim = data[0].len();
    let mut total = 0.0;
    for j in 0..dim {
        let mean = data.iter().map(|p| p[j]).sum::<f64>() / n;
        total += data.iter().map(|p| (p[j] - mean).powi(2)).sum::<f64>() / n;
    }
    total / dim.max(1) as f64
}

fn plus_plus_init(data: &[Vec<f64>], k: usize, rng: &mut seed::Rng) -> Vec<Vec<f64>> {
    let mut centers = vec![data[rng.gen_range(0..data.len())].clone()];
    let mut closest: Vec<f64> = data.iter().map(|p| sq_dist(p, &centers[0])).collect();
    while centers.len() < k {
        let total: f64 = closest.iter().sum();
        let next = if total <= 0.0 {
            rng.gen_range(0..data.len())
        } else {
            let mut target = rng.gen::<f64>() * total;
            let mut pick = data.len() - 1;
            for (i, d) in closest.iter().enumerate() {
                if target < *d {
                    pick = i;
                    break;
                }
                target -= d;
            }
            pick
        };
        centers.push(data[next].clone());
        for (c, p) in closest.iter_mut().zip(data) {
            *c = c.min(sq_dist(p, &centers[centers.len() - 1]));
        }
    }
    centers
}

fn assign(data: &[Vec<f64>], centers: &[Vec<f64>], labels: &mut [usize]) -> f64 {
    let mut inertia = 0.0;
    for (p, l) in data.iter().zip(labels.iter_mut()) {
        let (best, d) = centers
            .iter()
            .enumerate()
            .map(|(j, c)| (j, sq_dist(p, c)))
            .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
        *l = best;
        inertia += d;
    }
    inertia
}

fn update_centers(data: &[Vec<f64>], labels: &[usize], centers: &mut [Vec<f64>]) {
    let dim = data[0].len();
    let mut sums = vec![vec![0.0; dim]; centers.len()];
    let mut counts = vec![0usize; centers.len()];
    for (p, &l) in data.iter().zip(labels) {
        counts[l] += 1;
        for (s, x) in sums[l].iter_mut().zip(p) {
            *s += x;
        }
    }
    for ((c, s), n) in centers.iter_mut().zip(sums).zip(counts) {
        if n > 0 {
            *c = s.into_iter().map(|x| x / n as f64).collect();
        }
    }
}

/// Moves the farthest points into empty clusters. Returns whether anything moved.
fn repair_empty(data: &[Vec<f64>], centers: &mut [Vec<f64>], labels: &mut [usize]) -> bool {
    let k = centers.len();
    let mut counts = vec![0usize; k];
    for &l in labels.iter() {
        counts[l] += 1;
    }
    let mut moved = false;
    let mut taken = vec![false; data.len()];
    for empty in 0..k {
        if counts[empty] > 0 {
            continue;
        }
        let far = (0..data.len())
            .filter(|&i| !taken[i] && counts[labels[i]] > 1)
            .max_by(|&a, &b| {
                let da = sq_dist(&data[a], &centers[labels[a]]);
                let db = sq_dist(&data[b], &centers[labels[b]]);
                da.total_cmp(&db).then(b.cmp(&a))
            });
        if let Some(i) = far {
            counts[labels[i]] -= 1;
            labels[i] = empty;
            counts[empty] = 1;
            taken[i] = true;
            centers[empty] = data[i].clone();
            moved = true;
        }
    }
    moved
}

fn single_run(data: &[Vec<f64>], k: usize, max_iter: usize, tol: f64, rng: &mut seed::Rng) -> (f64, Vec<usize>) {
    let mut centers = plus_plus_init(data, k, rng);
    let mut labels = vec![0usize; data.len()];
    for _ in 0..max_iter {
        assign(data, &centers, &mut labels);
        repair_empty(data, &mut centers, &mut labels);
        let previous = centers.clone();
        update_centers(data, &labels, &mut centers);
        let shift: f64 = previous.iter().zip(&centers).map(|(a, b)| sq_dist(a, b)).sum();
        if shift <= tol {
            break;
        }
    }
    assign(data, &centers, &mut labels);
    if repair_empty(data, &mut centers, &mut labels) {
        update_centers(data, &labels, &mut centers);
    }
    let inertia = data
        .iter()
        .zip(&labels)
        .map(|(p, &l)| sq_dist(p, &centers[l]))
        .sum();
    (inertia, labels)
}
