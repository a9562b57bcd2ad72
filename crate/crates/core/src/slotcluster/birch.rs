use super::agglomerative::ward_labels;
use super::sq_dist;

#[derive(Debug, Clone)]
pub struct BirchParams {
    /// Maximum radius of a leaf subcluster.
    pub threshold: f64,
    pub branching_factor: usize,
}

impl Default for BirchParams {
    fn default() -> Self {
        BirchParams {
            threshold: 0.5,
            branching_factor: 50,
        }
    }
}

/// Clustering feature: count, linear sum and sum of squared norms.
#[derive(Debug, Clone)]
struct Feature {
    n: usize,
    ls: Vec<f64>,
    ss: f64,
    child: Option<Box<Node>>,
    members: Vec<usize>,
}

impl Feature {
    fn point(i: usize, x: &[f64]) -> Self {
        Feature {
            n: 1,
            ls: x.to_vec(),
            ss: x.iter().map(|v| v * v).sum(),
            child: None,
            members: vec![i],
        }
    }

    fn centroid(&self) -> Vec<f64> {
        self.ls.iter().map(|v| v / self.n as f64).collect()
    }

    fn absorb(&mut self, other: &Feature) {
        self.n += other.n;
        for (a, b) in self.ls.iter_mut().zip(&other.ls) {
            *a += b;
        }
        self.ss += other.ss;
    }

    fn radius_with(&self, x: &[f64]) -> f64 {
        let n = (self.n + 1) as f64;
        let ss = self.ss + x.iter().map(|v| v * v).sum::<f64>();
        let c2: f64 = self.ls.iter().zip(x).map(|(a, b)| ((a + b) / n).powi(2)).sum();
        (ss / n - c2).max(0.0).sqrt()
    }
}

#[derive(Debug, Clone, Default)]
struct Node {
    entries: Vec<Feature>,
}

impl Node {
    fn is_leaf(&self) -> bool {
        self.entries.iter().all(|e| e.child.is_none())
    }

    fn closest(&self, x: &[f64]) -> usize {
        let mut best = (0, f64::INFINITY);
        for (i, e) in self.entries.iter().enumerate() {
            let d = sq_dist(&e.centroid(), x);
            if d < best.1 {
                best = (i, d);
            }
        }
        best.0
    }

    /// Inserts point `i`; returns two replacement nodes if this node overflowed.
    fn insert(&mut self, i: usize, x: &[f64], params: &BirchParams) -> Option<(Node, Node)> {
        if self.entries.is_empty() {
            self.entries.push(Feature::point(i, x));
            return None;
        }
        let at = self.closest(x);
        if self.entries[at].child.is_some() {
            let point = Feature::point(i, x);
            let split = self.entries[at].child.as_mut().unwrap().insert(i, x, params);
            match split {
                None => self.entries[at].absorb(&point),
                Some((left, right)) => {
                    self.entries.swap_remove(at);
                    self.entries.push(summarize(left));
                    self.entries.push(summarize(right));
                }
            }
        } else if self.entries[at].radius_with(x) <= params.threshold {
            let e = &mut self.entries[at];
            e.absorb(&Feature::point(i, x));
            e.members.push(i);
        } else {
            self.entries.push(Feature::point(i, x));
        }
        (self.entries.len() > params.branching_factor).then(|| self.split())
    }

    /// Splits around the two entries whose centroids are farthest apart.
    fn split(&mut self) -> (Node, Node) {
        let centroids: Vec<Vec<f64>> = self.entries.iter().map(Feature::centroid).collect();
        let mut far = (0, 1, -1.0);
        for a in 0..centroids.len() {
            for b in a + 1..centroids.len() {
                let d = sq_dist(&centroids[a], &centroids[b]);
                if d > far.2 {
                    far = (a, b, d);
                }
            }
        }
        let (mut left, mut right) = (Node::default(), Node::default());
        for (k, e) in std::mem::take(&mut self.entries).into_iter().enumerate() {
            let to_left = k == far.0
                || (k != far.1 && sq_dist(&centroids[k], &centroids[far.0]) <= sq_dist(&centroids[k], &centroids[far.1]));
            if to_left {
                left.entries.push(e);
            } else {
                right.entries.push(e);
            }
        }
        (left, right)
    }

    fn leaves(self, out: &mut Vec<Vec<usize>>) {
        for e in self.entries {
            match e.child {
                Some(child) => child.leaves(out),
                None => out.push(e.members),
            }
        }
    }
}

fn summarize(node: Node) -> Feature {
    let dim = node.entries[0].ls.len();
    let mut f = Feature {
        n: 0,
        ls: vec![0.0; dim],
        ss: 0.0,
        child: None,
        members: Vec::new(),
    };
    for e in &node.entries {
        f.absorb(e);
    }
    f.child = Some(Box::new(node));
    f
}

fn build_tree(data: &[Vec<f64>], params: &BirchParams) -> Vec<Vec<usize>> {
    let mut root = Node::default();
    for (i, x) in data.iter().enumerate() {
        if let Some((left, right)) = root.insert(i, x, params) {
            root = Node {
                entries: vec![summarize(left), summarize(right)],
            };
        }
    }
    debug_assert!(root.is_leaf() || root.entries.iter().any(|e| e.child.is_some()));
    let mut leaves = Vec::new();
    root.leaves(&mut leaves);
    leaves
}

/// BIRCH: a CF-tree compresses the data into leaf subclusters, which a Ward
/// agglomerative step then groups into `k` clusters. Each point takes the
/// label of the subcluster it was absorbed into.
///
/// When the tree yields fewer than `k` subclusters the threshold is halved
/// and the tree rebuilt; if duplicates still leave too few, subclusters are
/// split point by point.
pub fn birch_labels(data: &[Vec<f64>], k: usize, params: &BirchParams) -> Vec<usize> {
    let mut params = params.clone();
    let mut leaves = build_tree(data, &params);
    let mut attempts = 0;
    while leaves.len() < k && attempts < 30 {
        params.threshold /= 2.0;
        leaves = build_tree(data, &params);
        attempts += 1;
    }
    while leaves.len() < k {
        let pos = leaves.iter().position(|l| l.len() > 1).expect("at least k points");
        let moved = leaves[pos].pop().unwrap();
        leaves.push(vec![moved]);
    }
    let centroids: Vec<Vec<f64>> = leaves
        .iter()
        .map(|members| {
            let mut c = vec![0.0; data[0].len()];
            for &m in members {
                for (a, x) in c.iter_mut().zip(&data[m]) {
                    *a += x / members.len() as f64;
                }
            }
            c
        })
        .collect();
    let global = ward_labels(&centroids, k);
    let mut labels = vec![0; data.len()];
    for (leaf, members) in leaves.iter().enumerate() {
        for &m in members {
            labels[m] = global[leaf];
        }
    }
    labels
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn tree_partitions_points() {
        let mut rng = crate::seed::rng(5);
        let data: Vec<Vec<f64>> = (0..300).map(|_| vec![rng.gen_range(0.0..20.0), rng.gen_range(0.0..20.0)]).collect();
        let params = BirchParams {
            threshold: 0.8,
            branching_factor: 8,
        };
        let leaves = build_tree(&data, &params);
        let mut all: Vec<usize> = leaves.iter().flatten().copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..300).collect::<Vec<_>>());
        assert!(leaves.len() > 8, "splits must have happened");
    }

    #[test]
    fn separates_far_groups() {
        let data: Vec<Vec<f64>> = (0..30).map(|i| vec![(i / 10) as f64 * 50.0 + (i % 10) as f64 * 0.1]).collect();
        let labels = birch_labels(&data, 3, &BirchParams::default());
        for g in labels.chunks(10) {
            assert!(g.iter().all(|&l| l == g[0]));
        }
        assert_ne!(labels[0], labels[10]);
        assert_ne!(labels[10], labels[20]);
        assert_ne!(labels[0], labels[20]);
    }

    #[test]
    fn radius_of_merged_feature() {
        let f = Feature::point(0, &[0.0, 0.0]);
        assert!((f.radius_with(&[2.0, 0.0]) - 1.0).abs() < 1e-12);
    }
}
