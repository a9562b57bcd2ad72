use std::collections::BTreeMap;

use proptest::prelude::*;

use dialstruct::augment::{mrda_emit, TurnRecord};
use dialstruct::corpus::BioLabel;
use dialstruct::evalmetrics::{adjusted_mutual_info, adjusted_rand_index, corpus_bleu, rand_index, silhouette};
use dialstruct::sbd::extract_spans;
use dialstruct::slotcluster::{cluster_points, Algorithm};
use dialstruct::statetrack::{DialogueState, LabeledDialogue};
use dialstruct::structure::build_graph;

fn label() -> impl Strategy<Value = BioLabel> {
    prop_oneof![Just(BioLabel::B), Just(BioLabel::I), Just(BioLabel::O)]
}

fn pair(max_n: usize) -> impl Strategy<Value = (Vec<i64>, Vec<i64>)> {
    (2..max_n).prop_flat_map(|n| (prop::collection::vec(0i64..5, n), prop::collection::vec(0i64..5, n)))
}

proptest! {
    #[test]
    fn trailing_outside_labels_do_not_change_spans(labels in prop::collection::vec(label(), 0..20), pad in 0usize..5) {
        let mut padded = labels.clone();
        padded.extend(std::iter::repeat_n(BioLabel::O, pad));
        prop_assert_eq!(extract_spans(&labels), extract_spans(&padded));
    }

    #[test]
    fn spans_are_ordered_disjoint_and_cover_slot_tokens(labels in prop::collection::vec(label(), 0..20)) {
        let spans = extract_spans(&labels);
        for w in spans.windows(2) {
            prop_assert!(w[0].1 < w[1].0);
        }
        let covered: usize = spans.iter().map(|(s, e)| e - s + 1).sum();
        prop_assert_eq!(covered, labels.iter().filter(|l| l.is_slot()).count());
    }

    #[test]
    fn pair_metrics_symmetric_and_bounded((g, p) in pair(30)) {
        let ri = rand_index(&g, &p).unwrap();
        prop_assert!((0.0..=1.0).contains(&ri));
        prop_assert!((ri - rand_index(&p, &g).unwrap()).abs() < 1e-12);
        let ari = adjusted_rand_index(&g, &p).unwrap();
        prop_assert!(ari <= 1.0 + 1e-12);
        prop_assert!((ari - adjusted_rand_index(&p, &g).unwrap()).abs() < 1e-12);
        let ami = adjusted_mutual_info(&g, &p).unwrap();
        prop_assert!(ami <= 1.0 + 1e-12);
        prop_assert!((ami - adjusted_mutual_info(&p, &g).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn metrics_ignore_label_names((g, p) in pair(30), shift in 1i64..100) {
        // bijective renaming of predicted labels
        let renamed: Vec<i64> = p.iter().map(|&x| (4 - x) * 7 + shift).collect();
        prop_assert!((adjusted_rand_index(&g, &p).unwrap() - adjusted_rand_index(&g, &renamed).unwrap()).abs() < 1e-12);
        prop_assert!((adjusted_mutual_info(&g, &p).unwrap() - adjusted_mutual_info(&g, &renamed).unwrap()).abs() < 1e-12);
        prop_assert_eq!(adjusted_rand_index(&g, &g).unwrap(), 1.0);
        prop_assert_eq!(adjusted_mutual_info(&renamed, &p).unwrap(), 1.0);
    }

    #[test]
    fn silhouette_invariant_to_rigid_motion(
        pts in prop::collection::vec((-10.0f32..10.0, -10.0f32..10.0), 4..25),
        angle in 0.0f32..std::f32::consts::TAU,
        dx in -50.0f32..50.0,
        dy in -50.0f32..50.0,
    ) {
        let labels: Vec<i64> = (0..pts.len() as i64).map(|i| i % 3).collect();
        let base: Vec<Vec<f32>> = pts.iter().map(|&(x, y)| vec![x, y]).collect();
        let (s, c) = angle.sin_cos();
        let moved: Vec<Vec<f32>> = pts.iter().map(|&(x, y)| vec![c * x - s * y + dx, s * x + c * y + dy]).collect();
        let a = silhouette(&base, &labels).unwrap();
        let b = silhouette(&moved, &labels).unwrap();
        prop_assert!((-1.0..=1.0).contains(&a));
        prop_assert!((a - b).abs() < 1e-3, "{} vs {}", a, b);
    }

    #[test]
    fn bleu_is_bounded(
        refs in prop::collection::vec(prop::collection::vec(0u8..6, 1..10), 1..5),
        seed in 0u64..1000,
    ) {
        let words = |v: &Vec<u8>| v.iter().map(|t| format!("w{t}")).collect::<Vec<_>>();
        let r: Vec<Vec<String>> = refs.iter().map(words).collect();
        let h: Vec<Vec<String>> = refs.iter().map(|v| {
            let mut v = v.clone();
            let k = (seed as usize) % v.len();
            v.rotate_left(k);
            words(&v)
        }).collect();
        let s = corpus_bleu(&r, &h).unwrap();
        prop_assert!((0.0..=100.0 + 1e-9).contains(&s));
    }

    #[test]
    fn kmeans_fills_every_group(points in prop::collection::vec((0i32..50, 0i32..50), 6..40), k in 2usize..6, seed in 0u64..50) {
        let distinct: std::collections::BTreeSet<_> = points.iter().collect();
        prop_assume!(distinct.len() >= k);
        let pts: Vec<Vec<f32>> = points.iter().map(|&(x, y)| vec![x as f32, y as f32]).collect();
        for algo in [Algorithm::KMeans, Algorithm::Agglomerative, Algorithm::Birch] {
            let c = cluster_points(&pts, k, algo, seed).unwrap();
            let mut sizes = vec![0; k];
            for &l in &c.labels {
                sizes[l] += 1;
            }
            prop_assert!(sizes.iter().all(|&s| s > 0), "{:?} {:?}", algo, sizes);
        }
    }

    #[test]
    fn duplicated_points_share_labels(points in prop::collection::vec((0i32..30, 0i32..30), 4..20), seed in 0u64..20) {
        let distinct: std::collections::BTreeSet<_> = points.iter().collect();
        prop_assume!(distinct.len() >= 3);
        let mut pts: Vec<Vec<f32>> = points.iter().map(|&(x, y)| vec![x as f32, y as f32]).collect();
        let n = pts.len();
        pts.extend(pts.clone());
        let c = cluster_points(&pts, 3, Algorithm::KMeans, seed).unwrap();
        for i in 0..n {
            prop_assert_eq!(c.labels[i], c.labels[i + n]);
        }
    }

    #[test]
    fn graph_rows_are_distributions(seqs in prop::collection::vec(prop::collection::vec(0u32..3, 1..6), 1..10)) {
        let labeled: Vec<LabeledDialogue> = seqs
            .iter()
            .enumerate()
            .map(|(i, incs)| {
                let mut s = DialogueState::zeros(3);
                let states = incs.iter().map(|&j| { s.0[j as usize] += 1; s.clone() }).collect();
                LabeledDialogue { dialogue_id: i.to_string(), states }
            })
            .collect();
        let g = build_graph(&labeled).unwrap();
        let mut sums: BTreeMap<usize, f64> = BTreeMap::new();
        for e in &g.edges {
            *sums.entry(e.src).or_default() += e.prob;
        }
        for (_, s) in sums {
            prop_assert!((s - 1.0).abs() < 1e-9);
        }
        let total: usize = labeled.iter().map(LabeledDialogue::transition_count).sum();
        prop_assert_eq!(g.total_transitions(), total);
    }

    #[test]
    fn mrda_sizes(n in 1usize..60, r_train in 0.05f64..1.0, r_aug in 0.0f64..3.0, seed in 0u64..100) {
        let turns: Vec<TurnRecord> = (0..n)
            .map(|i| TurnRecord {
                dialogue_id: format!("d{}", i / 4),
                turn: i % 4,
                context: format!("c{i}"),
                response: format!("r{}", i % 7),
                state: DialogueState(vec![(i % 3) as u32]),
                gold_state: None,
            })
            .collect();
        let out = mrda_emit(&turns, r_train, r_aug, seed).unwrap();
        let used = (r_train * n as f64).floor() as usize;
        prop_assert_eq!(out.len(), used + (r_aug * used as f64).floor() as usize);
    }
}
