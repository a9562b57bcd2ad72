// Turns detected spans into per-turn state vectors, and compares with the
// vectors implied by gold annotations.

use std::collections::BTreeMap;

use dialstruct::corpus::{make_split, Dialogue, Turn};
use dialstruct::sbd::SpanRef;
use dialstruct::slotcluster::{Algorithm, SlotGrouping};
use dialstruct::statetrack::{distinct_states, gold_slot_names, label_states, label_states_gold, state_overlap, LabeledDialogue};
use dialstruct::synthetic::{generate_corpus, SyntheticConfig};

fn span(turn: usize, at: usize) -> SpanRef {
    SpanRef { dialogue_id: "att".into(), turn, start: at, end: at }
}

fn gold(dialogues: &[Dialogue], order: &[String]) -> dialstruct::Result<Vec<LabeledDialogue>> {
    dialogues.iter().map(|d| label_states_gold(d, order)).collect()
}

fn run_example() -> dialstruct::Result<()> {
    let d = Dialogue::new(
        "att",
        "attraction",
        vec![
            Turn::new(0, "Can you please help me find a place to go?", "I've found 79 places for you to go."),
            Turn::new(1, "I'd like a sports place in the centre please.", "There are no results matching your query."),
            Turn::new(2, "Okay, are there any cinemas in the centre?", "We have vue cinema."),
        ],
    );
    // groups: 0 = name, 1 = type, 2 = area
    let grouping = SlotGrouping {
        n_groups: 3,
        assignment: [(span(1, 3), 1), (span(1, 7), 2), (span(2, 5), 1)].into_iter().collect(),
        algorithm: Algorithm::KMeans,
        seed: 0,
        warnings: vec![],
    };
    let mut by_turn = BTreeMap::new();
    by_turn.insert(1, vec![span(1, 3), span(1, 7)]);
    by_turn.insert(2, vec![span(2, 5)]);
    let labeled = label_states(&d, &by_turn, &grouping)?;
    for (t, s) in d.turns.iter().zip(&labeled.states) {
        println!("{s}  {}", t.user_text);
    }

    let corpus = generate_corpus(&SyntheticConfig { dialogues_per_domain: 60, seed: 2, ..Default::default() });
    let split = make_split(&corpus, "taxi", 0)?;
    let all: Vec<Dialogue> = split.target().cloned().collect();
    let order = gold_slot_names(&all);
    let (train, valid, test) = (gold(&split.train, &order)?, gold(&split.valid, &order)?, gold(&split.test, &order)?);
    let every: Vec<LabeledDialogue> = train.iter().chain(&valid).chain(&test).cloned().collect();
    println!("\ntaxi slots {order:?}: {} distinct gold states", distinct_states(&every).len());
    let o = state_overlap(&train, &valid, &test);
    println!("overlap {o:?}");
    Ok(())
}

fn main() -> dialstruct::Result<()> {
    run_example()
}
