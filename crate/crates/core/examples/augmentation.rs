// Builds the state-to-response dictionary and emits augmented training
// pairs with MRDA and with the most-frequent-response baseline.

use dialstruct::augment::{build_dictionary, mfs_emit, mrda_emit, turn_records, write_examples, Origin};
use dialstruct::corpus::{make_split, Dialogue};
use dialstruct::statetrack::{gold_slot_names, label_states_gold};
use dialstruct::structure::build_graph;
use dialstruct::synthetic::{generate_corpus, SyntheticConfig};

fn run_example() -> dialstruct::Result<()> {
    let corpus = generate_corpus(&SyntheticConfig { dialogues_per_domain: 60, seed: 9, ..Default::default() });
    let split = make_split(&corpus, "hotel", 0)?;
    let train: &[Dialogue] = &split.train;
    let order = gold_slot_names(train);
    let gold = train
        .iter()
        .map(|d| label_states_gold(d, &order))
        .collect::<dialstruct::Result<Vec<_>>>()?;
    let records = turn_records(train, &gold, Some(&gold))?;

    let dict = build_dictionary(&records);
    let multi = dict.entries.values().filter(|v| v.len() > 1).count();
    println!("{} training turns, {} states, {multi} with several responses", records.len(), dict.len());

    for (r_train, r_aug) in [(1.0, 1.0), (0.5, 1.0), (0.5, 0.5)] {
        let out = mrda_emit(&records, r_train, r_aug, 42)?;
        let aug = out.iter().filter(|e| e.origin == Origin::Mrda).count();
        println!("mrda r_train={r_train} r_aug={r_aug}: {} originals + {aug} augmented", out.len() - aug);
    }

    let out = mrda_emit(&records, 1.0, 1.0, 42)?;
    if let Some(ex) = out.iter().find(|e| e.origin == Origin::Mrda) {
        println!("\ncontext : {}\nresponse: {}\nstate   : {}", ex.context, ex.response, ex.state);
    }
    let path = std::env::temp_dir().join("dialstruct_mrda.jsonl");
    write_examples(&path, &out)?;
    println!("wrote {}", path.display());

    let mfs = mfs_emit(&records, &build_graph(&gold)?, 1.0, 1.0, 42)?;
    if let Some(ex) = mfs.iter().find(|e| e.origin == Origin::Mfs) {
        println!("\nmfs     : {} -> {}", ex.context, ex.response);
    }
    Ok(())
}

fn main() -> dialstruct::Result<()> {
    run_example()
}
