use super::sq_dist;

/// One merge of the dendrogram: clusters `a` and `b` joined at `height`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Merge {
    pub a: usize,
    pub b: usize,
    pub height: f64,
}

/// Condensed upper-triangular distance matrix.
struct Condensed {
    n: usize,
    d: Vec<f64>,
}

impl Condensed {
    fn idx(&self, i: usize, j: usize) -> usize {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    fn get(&self, i: usize, j: usize) -> f64 {
        self.d[self.idx(i, j)]
    }

    fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.idx(i, j);
        self.d[k] = v;
    }
}

/// Ward-linkage dendrogram via the nearest-neighbour chain algorithm.
///
/// Distances are squared Euclidean and updated with the Lance–Williams Ward
/// recurrence. Cluster ids in the returned merges refer to the surviving
/// representative (the smaller input index), and merges are sorted by height.
pub(crate) fn ward_dendrogram(data: &[Vec<f64>]) -> Vec<Merge> {
    let n = data.len();
    let mut dist = Condensed {
        n,
        d: Vec::with_capacity(n * n.saturating_sub(1) / 2),
    };
    for i in 0..n {
        for j in i + 1..n {
            dist.d.push(sq_dist(&data[i], &data[j]));
        }
    }
    let mut size = vec![1usize; n];
    let mut active = vec![true; n];
    let mut merges = Vec::with_capacity(n.saturating_sub(1));
    let mut chain: Vec<usize> = Vec::new();

    while merges.len() + 1 < n {
        if chain.is_empty() {
            chain.push(active.iter().position(|&a| a).unwrap());
        }
        loop {
            let top = *chain.last().unwrap();
            let prev = chain.len().checked_sub(2).map(|i| chain[i]);
            // nearest active neighbour; ties prefer the chain predecessor, then the lowest id
            let mut best = prev;
            let mut best_d = prev.map_or(f64::INFINITY, |p| dist.get(top, p));
            for j in (0..n).filter(|&j| active[j] && j != top) {
                let d = dist.get(top, j);
                if d < best_d || (d == best_d && best.is_none_or(|b| Some(b) != prev && j < b)) {
                    best = Some(j);
                    best_d = d;
                }
            }
            let next = best.unwrap();
            if Some(next) == prev {
                chain.pop();
                chain.pop();
                let (a, b) = if top < next { (top, next) } else { (next, top) };
                let (na, nb) = (size[a] as f64, size[b] as f64);
                for k in (0..n).filter(|&k| active[k] && k != a && k != b) {
                    let nk = size[k] as f64;
                    let updated = ((na + nk) * dist.get(k, a) + (nb + nk) * dist.get(k, b) - nk * best_d)
                        / (na + nb + nk);
                    dist.set(k, a, updated);
                }
                active[b] = false;
                size[a] += size[b];
                merges.push(Merge {
                    a,
                    b,
                    height: best_d,
                });
                break;
            }
            chain.push(next);
        }
    }
    merges.sort_by(|x, y| x.height.total_cmp(&y.height));
    merges
}

/// Flat labels after applying the lowest `n - k` merges of a dendrogram.
pub(crate) fn cut(n: usize, merges: &[Merge], k: usize) -> Vec<usize> {
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    // merges refer to representatives at merge time; union-find resolves them
    for m in merges.iter().take(n.saturating_sub(k)) {
        let ra = find(&mut parent, m.a);
        let rb = find(&mut parent, m.b);
        if ra != rb {
            parent[ra.max(rb)] = ra.min(rb);
        }
    }
    (0..n).map(|i| find(&mut parent, i)).collect()
}

/// Ward agglomerative clustering cut at `k` clusters.
pub fn ward_labels(data: &[Vec<f64>], k: usize) -> Vec<usize> {
    let merges = ward_dendrogram(data);
    cut(data.len(), &merges, k)
}
