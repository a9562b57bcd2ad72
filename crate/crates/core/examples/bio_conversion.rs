// Converts slot annotations into nameless B/I/O tags and writes them in
// CoNLL layout.

use dialstruct::corpus::{read_bio_file, to_bio, write_bio_file, BioRecord, GoldSlot, Turn};

fn slot(name: &str, value: &str) -> GoldSlot {
    GoldSlot { name: name.into(), value: value.into(), span: None }
}

fn run_example() -> dialstruct::Result<()> {
    let turns = [
        Turn::new(0, "[usr] Can you find a place in the city centre for me ? I'm an architecture fan", "")
            .with_slots(vec![slot("attraction-area", "city centre"), slot("attraction-type", "architecture")]),
        Turn::new(1, "I want to fly from Baltimore to Dallas round trip", "")
            .with_slots(vec![slot("fromloc", "Baltimore"), slot("toloc", "Dallas"), slot("round_trip", "round trip")]),
        Turn::new(2, "Add Tranquility to my Pop Hits Of The Eighties playlist", "")
            .with_slots(vec![slot("track", "Tranquility"), slot("playlist", "Pop Hits Of The Eighties")]),
    ];

    let mut records = Vec::new();
    for t in &turns {
        let conv = to_bio(t);
        for s in &conv.skipped {
            println!("skipped {s:?}");
        }
        let line: Vec<String> = conv
            .utterance
            .tokens
            .iter()
            .zip(&conv.utterance.labels)
            .map(|(w, l)| format!("{w}/{l}"))
            .collect();
        println!("{}", line.join(" "));
        records.push(BioRecord { dialogue_id: "demo".into(), turn: t.index, utterance: conv.utterance });
    }

    let path = std::env::temp_dir().join("dialstruct_bio.conll");
    write_bio_file(&path, &records)?;
    let back = read_bio_file(&path)?;
    assert_eq!(back, records);
    println!("\nwrote {} utterances to {}", back.len(), path.display());
    Ok(())
}

fn main() -> dialstruct::Result<()> {
    run_example()
}
