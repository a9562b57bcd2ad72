// Scores the reference extractors against gold states on one held-out
// domain: random labels, clustered CLS vectors and clustered noun vectors.

use dialstruct::baselines::{
    cluster_utterances, corpus_cls_embeddings, heuristic_slot_words, mean_slot_word_embedding, random_states,
    RuleBasedPosTagger, UtteranceText,
};
use dialstruct::corpus::{make_split, Dialogue};
use dialstruct::evalmetrics::{adjusted_mutual_info, adjusted_rand_index, Assignment};
use dialstruct::sbd::{HashingEncoder, HashingEncoderConfig};
use dialstruct::slotcluster::Algorithm;
use dialstruct::statetrack::{distinct_states, gold_slot_names, label_states_gold, state_assignment};
use dialstruct::synthetic::{generate_corpus, SyntheticConfig};

fn report(name: &str, gold: &[i64], pred: &Assignment) -> dialstruct::Result<()> {
    println!(
        "{name:<14} ARI {:>6.3}  AMI {:>6.3}",
        adjusted_rand_index(gold, pred)?,
        adjusted_mutual_info(gold, pred)?
    );
    Ok(())
}

fn run_example() -> dialstruct::Result<()> {
    let corpus = generate_corpus(&SyntheticConfig { dialogues_per_domain: 60, seed: 8, ..Default::default() });
    let split = make_split(&corpus, "attraction", 0)?;
    let target: Vec<Dialogue> = split.target().cloned().collect();
    let order = gold_slot_names(&target);
    let labeled = target
        .iter()
        .map(|d| label_states_gold(d, &order))
        .collect::<dialstruct::Result<Vec<_>>>()?;
    let gold = state_assignment(&labeled);
    let k = distinct_states(&labeled).len();
    println!("{} turns, {k} gold states\n", gold.len());

    report("random", &gold, &random_states(gold.len(), k, 1)?)?;

    let encoder = HashingEncoder::new(HashingEncoderConfig::default())?;
    for text in [UtteranceText::Exchange, UtteranceText::User] {
        let embs = corpus_cls_embeddings(&target, text, &encoder)?;
        report(&format!("cls ({text})"), &gold, &cluster_utterances(&embs, k, Algorithm::KMeans, 1)?)?;
    }

    let pos = RuleBasedPosTagger::default();
    let mut nouns = Vec::new();
    for d in &target {
        for t in &d.turns {
            let idx = heuristic_slot_words(t, Some(&pos))?;
            nouns.push(mean_slot_word_embedding(&d.dialogue_id, t.index, &t.user_tokens, &idx, &encoder)?);
        }
    }
    report("noun words", &gold, &cluster_utterances(&nouns, k, Algorithm::KMeans, 1)?)?;
    Ok(())
}

fn main() -> dialstruct::Result<()> {
    run_example()
}
