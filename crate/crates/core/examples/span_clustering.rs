// Groups gold slot spans of one domain by their contextual embeddings with
// each clustering backend and prints what landed together.

use std::collections::BTreeMap;

use dialstruct::corpus::to_bio;
use dialstruct::evalmetrics::adjusted_rand_index;
use dialstruct::sbd::{extract_spans, EncoderBackend, HashingEncoder, HashingEncoderConfig, SpanPrediction, pool_spans};
use dialstruct::slotcluster::{cluster_spans, Algorithm};
use dialstruct::synthetic::{generate_corpus, SyntheticConfig};

fn run_example() -> dialstruct::Result<()> {
    let corpus = generate_corpus(&SyntheticConfig { dialogues_per_domain: 30, multi_domain: 0, seed: 5, ..Default::default() });
    let encoder = HashingEncoder::new(HashingEncoderConfig::default())?;

    let mut spans = Vec::new();
    let mut gold = Vec::new();
    for d in corpus.iter().filter(|d| d.domain == "restaurant") {
        for t in &d.turns {
            let bio = to_bio(t).utterance;
            let ranges = extract_spans(&bio.labels);
            let enc = encoder.encode(&bio.tokens)?;
            for (&(s, e), emb) in ranges.iter().zip(pool_spans(&enc, &ranges)?) {
                spans.push(SpanPrediction {
                    dialogue_id: d.dialogue_id.clone(),
                    turn_index: t.index,
                    token_start: s,
                    token_end: e,
                    text: bio.tokens[s..=e].join(" "),
                    embedding: emb,
                });
                let name = t.gold_slots.iter().find(|g| g.value == bio.tokens[s..=e].join(" ")).map(|g| g.name.clone());
                gold.push(name.unwrap_or_default());
            }
        }
    }
    let gold_ids: Vec<i64> = {
        let mut ids = BTreeMap::new();
        gold.iter().map(|g| { let n = ids.len() as i64; *ids.entry(g.clone()).or_insert(n) }).collect()
    };
    println!("{} spans, {} gold slot types", spans.len(), gold_ids.iter().max().map_or(0, |m| m + 1));

    for algo in [Algorithm::KMeans, Algorithm::Birch, Algorithm::Agglomerative] {
        let g = cluster_spans(&spans, 4, algo, 3)?;
        let pred: Vec<i64> = spans.iter().map(|s| g.group_of(&s.span_ref()).unwrap() as i64).collect();
        println!("\n{algo}: sizes {:?}, ARI vs slot names {:.3}", g.group_sizes(), adjusted_rand_index(&gold_ids, &pred)?);
        let mut samples: BTreeMap<usize, Vec<&str>> = BTreeMap::new();
        for s in &spans {
            let v = samples.entry(g.group_of(&s.span_ref()).unwrap()).or_default();
            if v.len() < 6 && !v.contains(&s.text.as_str()) {
                v.push(&s.text);
            }
        }
        for (group, words) in samples {
            println!("  group {group}: {}", words.join(", "));
        }
    }
    Ok(())
}

fn main() -> dialstruct::Result<()> {
    run_example()
}
