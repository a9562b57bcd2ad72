use super::Contingency;
use crate::error::Result;

/// Shannon entropy (nats) of cluster sizes.
pub fn entropy(sizes: &[usize]) -> f64 {
    let n: usize = sizes.iter().sum();
    if n == 0 {
        return 0.0;
    }
    let n = n as f64;
    -sizes
        .iter()
        .filter(|&&s| s > 0)
        .map(|&s| {
            let p = s as f64 / n;
            p * p.ln()
        })
        .sum::<f64>()
}

/// Mutual information (nats) of a contingency table.
pub fn mutual_info(t: &Contingency) -> f64 {
    let n = t.n as f64;
    let mut mi = 0.0;
    for (i, row) in t.cells.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = c as f64;
            mi += c / n * (n * c / (t.rows[i] as f64 * t.cols[j] as f64)).ln();
        }
    }
    mi.max(0.0)
}

/// `ln k!` for k in 0..=n.
fn log_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut acc = 0.0f64;
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// Expected mutual information under the hypergeometric model of
/// random labelings with fixed margins.
pub fn expected_mutual_info(rows: &[usize], cols: &[usize], n: usize) -> f64 {
    let lf = log_factorials(n);
    let nf = n as f64;
    let mut emi = 0.0;
    for &a in rows {
        for &b in cols {
            let lo = (a + b).saturating_sub(n).max(1);
            let hi = a.min(b);
            // Terms that do not depend on nij.
            let fixed = lf[a] + lf[b] + lf[n - a] + lf[n - b] - lf[n];
            for nij in lo..=hi {
                let x = nij as f64;
                let log_p = fixed
                    - lf[nij]
                    - lf[a - nij]
                    - lf[b - nij]
                    - lf[n + nij - a - b];
                emi += x / nf * (nf * x / (a as f64 * b as f64)).ln() * log_p.exp();
            }
        }
    }
    emi
}

/// Adjusted mutual information with arithmetic-mean normalisation.
pub fn adjusted_mutual_info(gold: &[i64], pred: &[i64]) -> Result<f64> {
    let t = Contingency::new(gold, pred)?;
    if t.is_identity() {
        return Ok(1.0);
    }
    let mi = mutual_info(&t);
    let emi = expected_mutual_info(&t.rows, &t.cols, t.n);
    let mean_h = (entropy(&t.rows) + entropy(&t.cols)) / 2.0;
    let mut denom = mean_h - emi;
    // Same guard as the usual reference implementation.
    if denom < 0.0 {
        denom = denom.min(-f64::EPSILON);
    } else {
        denom = denom.max(f64::EPSILON);
    }
    Ok((mi - emi) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn binom(n: usize, k: usize) -> f64 {
        if k > n {
            return 0.0;
        }
        let mut r = 1.0;
        for i in 0..k {
            r = r * (n - i) as f64 / (i + 1) as f64;
        }
        r
    }

    /// Direct hypergeometric summation with plain binomials.
    fn emi_direct(rows: &[usize], cols: &[usize], n: usize) -> f64 {
        let mut total = 0.0;
        for &a in rows {
            for &b in cols {
                for nij in 1..=a.min(b) {
                    let p = binom(a, nij) * binom(n - a, b - nij) / binom(n, b);
                    if p == 0.0 {
                        continue;
                    }
                    let x = nij as f64;
                    total += p * x / n as f64 * ((n as f64 * x) / (a * b) as f64).ln();
                }
            }
        }
        total
    }

    /// Average MI over all relabelings of `pred` positions.
    fn emi_permutations(gold: &[i64], pred: &[i64]) -> f64 {
        fn permute(k: usize, v: &mut Vec<i64>, gold: &[i64], acc: &mut (f64, usize)) {
            if k == v.len() {
                let t = Contingency::new(gold, v).unwrap();
                acc.0 += mutual_info(&t);
                acc.1 += 1;
                return;
            }
            for i in k..v.len() {
                v.swap(k, i);
                permute(k + 1, v, gold, acc);
                v.swap(k, i);
            }
        }
        let mut v = pred.to_vec();
        let mut acc = (0.0, 0);
        permute(0, &mut v, gold, &mut acc);
        acc.0 / acc.1 as f64
    }

    #[test]
    fn emi_matches_oracles() {
        let cases: &[(&[i64], &[i64])] = &[
            (&[0, 0, 1, 1], &[0, 1, 0, 1]),
            (&[0, 0, 0, 1, 1, 2], &[0, 1, 1, 1, 2, 2]),
            (&[0, 1, 1, 1, 1], &[0, 0, 1, 1, 1]),
        ];
        for (g, p) in cases {
            let t = Contingency::new(g, p).unwrap();
            let emi = expected_mutual_info(&t.rows, &t.cols, t.n);
            assert!((emi - emi_direct(&t.rows, &t.cols, t.n)).abs() < 1e-12);
            assert!((emi - emi_permutations(g, p)).abs() < 1e-12);
        }
    }

    #[test]
    fn perfect_and_degenerate() {
        assert_eq!(adjusted_mutual_info(&[0, 0, 1, 1], &[1, 1, 0, 0]).unwrap(), 1.0);
        assert_eq!(adjusted_mutual_info(&[2, 2, 2], &[0, 0, 0]).unwrap(), 1.0);
        // One side uninformative: MI = EMI = 0.
        let v = adjusted_mutual_info(&[0, 0, 0, 0], &[0, 1, 0, 1]).unwrap();
        assert!(v.abs() < 1e-12);
    }

    #[test]
    fn reference_implementation_values() {
        let cases: [(&[i64], &[i64], f64); 4] = [
            (&[0, 0, 0, 1, 1, 1, 2, 2, 2], &[0, 0, 1, 1, 1, 1, 2, 2, 2], 0.6917422851154034),
            (&[1, 0, 2, 0, 3, 3, 3, 3, 1, 0, 3, 0], &[1, 1, 2, 0, 2, 1, 1, 2, 0, 2, 0, 1], -0.18645777636264158),
            (&[0, 0, 0, 0, 3, 1, 3, 0, 1, 3, 3, 1], &[1, 0, 2, 0, 1, 1, 0, 1, 2, 2, 0, 0], -0.2554108134229803),
            (&[2, 0, 2, 3, 1, 2, 2, 3, 3, 0, 3, 1], &[2, 1, 1, 2, 0, 1, 2, 2, 2, 2, 1, 0], 0.16925209132431673),
        ];
        for (g, p, want) in cases {
            assert!((adjusted_mutual_info(g, p).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn entropy_of_uniform() {
        assert!((entropy(&[2, 2, 2, 2]) - 4f64.ln()).abs() < 1e-15);
        assert_eq!(entropy(&[5]), 0.0);
    }
}
