// Full run on a synthetic corpus: tagger training, span detection,
// clustering, state labeling, graph export, scoring and augmentation,
// followed by a sweep over the number of slot groups.
//
// `cargo run --release --example end_to_end -- [out_dir]`

use std::path::PathBuf;

use dialstruct::corpus::write_dialogue_corpus;
use dialstruct::pipeline::{Pipeline, PipelineConfig};
use dialstruct::synthetic::{generate_corpus, SyntheticConfig};

fn run_example(out_dir: PathBuf) -> dialstruct::Result<()> {
    std::fs::create_dir_all(&out_dir).map_err(|e| dialstruct::Error::InvalidInput(e.to_string()))?;
    let corpus_path = out_dir.join("corpus.jsonl");
    let corpus = generate_corpus(&SyntheticConfig { dialogues_per_domain: 60, seed: 1, ..Default::default() });
    write_dialogue_corpus(&corpus_path, &corpus)?;

    let config = PipelineConfig::parse(&format!(
        "corpus = {}\nout_dir = {}\ntest_domain = attraction\nn_slots = 3\nsweep = 2..6\nseed = 7\n",
        corpus_path.display(),
        out_dir.join("run").display()
    ))?;
    let pipeline = Pipeline::new(config)?;
    let manifest = pipeline.run_all()?;
    println!("{} artifacts under {}", manifest.artifacts.len(), pipeline.config.out_dir.display());

    let report = std::fs::read_to_string(pipeline.out("report.json")).unwrap_or_default();
    println!("report: {report}");
    for row in pipeline.sweep_slots()? {
        match row.scores {
            Ok((ari, ami)) => println!("N={:<2} ARI {ari:.3} AMI {ami:.3}", row.n),
            Err(e) => println!("N={:<2} error: {e}", row.n),
        }
    }
    Ok(())
}

fn main() -> dialstruct::Result<()> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("dialstruct_e2e"));
    run_example(out)
}
