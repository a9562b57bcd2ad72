use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dialstruct::pipeline::{Pipeline, PipelineConfig};
use dialstruct::Result;

#[derive(Parser)]
#[command(name = "dialstruct", version, about = "Extract dialogue-state structures and augment training data")]
struct Cli {
    /// Flat `key = value` config file; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(flatten)]
    overrides: Overrides,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Overrides {
    #[arg(long, global = true)]
    seed: Option<String>,
    #[arg(long, global = true)]
    out_dir: Option<String>,
    #[arg(long, global = true)]
    corpus: Option<String>,
    #[arg(long, global = true)]
    test_domain: Option<String>,
    #[arg(long, global = true)]
    encoder: Option<String>,
    #[arg(long, global = true)]
    hidden_size: Option<String>,
    #[arg(long, global = true)]
    max_sequence_length: Option<String>,
    #[arg(long, global = true)]
    n_slots: Option<String>,
    /// `lo..hi` or a comma list.
    #[arg(long, global = true)]
    sweep: Option<String>,
    /// kmeans, birch or agglomerative.
    #[arg(long, global = true)]
    algorithm: Option<String>,
    #[arg(long, global = true)]
    epochs: Option<String>,
    #[arg(long, global = true)]
    lr: Option<String>,
    #[arg(long, global = true)]
    batch_size: Option<String>,
    #[arg(long, global = true)]
    dropout: Option<String>,
    #[arg(long, global = true)]
    weight_decay: Option<String>,
    /// all, train, valid or test.
    #[arg(long, global = true)]
    target_split: Option<String>,
    /// none, random, cls, noun or sbd-embedding.
    #[arg(long, global = true)]
    baseline: Option<String>,
    /// exchange or user.
    #[arg(long, global = true)]
    utterance_text: Option<String>,
    #[arg(long, global = true)]
    r_train: Option<String>,
    #[arg(long, global = true)]
    r_aug: Option<String>,
    /// mrda or mfs.
    #[arg(long, global = true)]
    method: Option<String>,
    /// predicted or gold.
    #[arg(long, global = true)]
    states: Option<String>,
}

impl Overrides {
    fn pairs(&self) -> [(&'static str, &Option<String>); 22] {
        [
            ("seed", &self.seed),
            ("out_dir", &self.out_dir),
            ("corpus", &self.corpus),
            ("test_domain", &self.test_domain),
            ("encoder", &self.encoder),
            ("hidden_size", &self.hidden_size),
            ("max_sequence_length", &self.max_sequence_length),
            ("n_slots", &self.n_slots),
            ("sweep", &self.sweep),
            ("algorithm", &self.algorithm),
            ("epochs", &self.epochs),
            ("lr", &self.lr),
            ("batch_size", &self.batch_size),
            ("dropout", &self.dropout),
            ("weight_decay", &self.weight_decay),
            ("target_split", &self.target_split),
            ("baseline", &self.baseline),
            ("utterance_text", &self.utterance_text),
            ("r_train", &self.r_train),
            ("r_aug", &self.r_aug),
            ("method", &self.method),
            ("states", &self.states),
        ]
    }
}

#[derive(Subcommand)]
enum Command {
    /// Train the slot-boundary tagger on the non-held-out domains.
    SbdTrain,
    /// Detect and embed spans in the held-out domain.
    SbdPredict,
    /// Group span embeddings into `n_slots` slot groups.
    Cluster,
    /// Count per-group modifications into turn states.
    LabelStates,
    /// Export the transition graph as DOT and JSON.
    Graph,
    /// Score states (or a baseline) against gold states.
    Evaluate,
    /// Emit augmented response-generation pairs.
    Augment,
    /// Sweep the number of slot groups.
    SweepSlots,
    /// Run every stage and write a manifest.
    RunAll,
}

fn run(cli: Cli) -> Result<String> {
    let mut cfg = match &cli.config {
        Some(p) => PipelineConfig::load(p)?,
        None => PipelineConfig::default(),
    };
    for (key, value) in cli.overrides.pairs() {
        if let Some(v) = value {
            cfg.set(key, v)?;
        }
    }
    let p = Pipeline::new(cfg)?;
    let out = match cli.command {
        Command::SbdTrain => serde_json::to_string_pretty(&p.sbd_train()?)?,
        Command::SbdPredict => format!("{} spans -> {}", p.sbd_predict()?.len(), p.out("spans.jsonl").display()),
        Command::Cluster => {
            let g = p.cluster()?;
            format!("group sizes {:?} -> {}", g.group_sizes(), p.out("grouping.json").display())
        }
        Command::LabelStates => {
            let (pred, gold) = p.label_states()?;
            format!("{} dialogues labeled ({} gold)", pred.len(), gold.len())
        }
        Command::Graph => {
            let g = p.graph()?;
            format!("{} nodes, {} edges -> {}", g.nodes.len(), g.edges.len(), p.out("graph.dot").display())
        }
        Command::Evaluate => serde_json::to_string_pretty(&p.evaluate()?)?,
        Command::Augment => format!("{} examples -> {}", p.augment()?.len(), p.out("augmented.jsonl").display()),
        Command::SweepSlots => {
            p.sweep_slots()?;
            std::fs::read_to_string(p.out("sweep.csv")).unwrap_or_default()
        }
        Command::RunAll => serde_json::to_string_pretty(&p.run_all()?)?,
    };
    Ok(out)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(out) => {
            println!("{}", out.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
