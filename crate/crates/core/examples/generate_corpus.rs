// Writes a synthetic five-domain corpus in the dialogue JSONL format.
//
// `cargo run --example generate_corpus -- [out.jsonl] [dialogues_per_domain]`

use std::collections::BTreeMap;
use std::path::PathBuf;

use dialstruct::corpus::{load_dialogue_corpus, write_dialogue_corpus};
use dialstruct::synthetic::{generate_corpus, SyntheticConfig};

fn run_example(out: PathBuf, per_domain: usize) -> dialstruct::Result<()> {
    let corpus = generate_corpus(&SyntheticConfig {
        dialogues_per_domain: per_domain,
        multi_domain: per_domain / 4,
        seed: 7,
        ..Default::default()
    });
    write_dialogue_corpus(&out, &corpus)?;

    let reloaded = load_dialogue_corpus(&out, None)?;
    assert_eq!(reloaded, corpus);
    let mut per_domain: BTreeMap<&str, (usize, usize)> = BTreeMap::new();
    for d in &reloaded {
        let e = per_domain.entry(d.domain.as_str()).or_default();
        e.0 += 1;
        e.1 += d.turns.len();
    }
    println!("{} dialogues -> {}", reloaded.len(), out.display());
    for (domain, (dialogues, turns)) in per_domain {
        println!("  {domain:<22} {dialogues:>4} dialogues {turns:>5} turns");
    }
    let first = &reloaded[0].turns[0];
    println!("\nfirst turn: {:?}", first.user_text);
    for slot in &first.gold_slots {
        println!("  {} = {:?} at {:?}", slot.name, slot.value, slot.span);
    }
    Ok(())
}

fn main() -> dialstruct::Result<()> {
    let mut args = std::env::args().skip(1);
    let out = args.next().map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("dialstruct_corpus.jsonl"));
    let per_domain = args.next().and_then(|n| n.parse().ok()).unwrap_or(60);
    run_example(out, per_domain)
}
