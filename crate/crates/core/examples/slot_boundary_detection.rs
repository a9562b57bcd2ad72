// Trains the boundary tagger on four synthetic domains and tests it on the
// fifth, then detects and embeds spans in a new utterance.

use std::sync::Arc;

use dialstruct::corpus::{make_split, to_bio, BioUtterance, Dialogue};
use dialstruct::sbd::{score_f1, train_tagger, HashingEncoder, HashingEncoderConfig, TrainConfig};
use dialstruct::synthetic::{generate_corpus, SyntheticConfig};
use dialstruct::text::tokenize;

fn bio(dialogues: &[Dialogue]) -> Vec<BioUtterance> {
    dialogues.iter().flat_map(|d| &d.turns).map(|t| to_bio(t).utterance).collect()
}

fn run_example() -> dialstruct::Result<()> {
    let corpus = generate_corpus(&SyntheticConfig { dialogues_per_domain: 50, seed: 11, ..Default::default() });
    let split = make_split(&corpus, "attraction", 1)?;
    let n_valid = split.source.len() / 10;
    let (train, valid) = split.source.split_at(split.source.len() - n_valid);

    let encoder = Arc::new(HashingEncoder::new(HashingEncoderConfig { hidden_size: 128, ..Default::default() })?);
    let config = TrainConfig { learning_rate: 0.01, epochs: 8, ..Default::default() };
    let trained = train_tagger(encoder, &bio(train), &bio(valid), &config)?;
    for e in &trained.history {
        println!("epoch {:>2}  train {:.4}  valid {:.4}", e.epoch, e.train_loss, e.valid_loss);
    }
    println!("kept epoch {}", trained.best_epoch);

    let test = bio(&split.test);
    let predicted = test
        .iter()
        .map(|u| trained.model.predict_labels(&u.tokens))
        .collect::<dialstruct::Result<Vec<_>>>()?;
    let f1 = score_f1(&test, &predicted)?;
    println!("held-out attraction: slot F1 {:.3}, token F1 {:.3}", f1.slot, f1.token);

    let words = tokenize("I'd like a museum place in the north please");
    for span in trained.model.detect_spans("demo", 0, &words)? {
        println!("span {:?} [{}..={}] dim {}", span.text, span.token_start, span.token_end, span.embedding.len());
    }
    Ok(())
}

fn main() -> dialstruct::Result<()> {
    run_example()
}
