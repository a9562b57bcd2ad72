// Builds the state transition graph of a labeled corpus and exports it as
// Graphviz DOT and JSON.

use dialstruct::corpus::Dialogue;
use dialstruct::statetrack::{gold_slot_names, label_states_gold};
use dialstruct::structure::{build_graph, GraphFormat, TransitionGraph};
use dialstruct::synthetic::{generate_corpus, SyntheticConfig};

fn run_example() -> dialstruct::Result<()> {
    let corpus = generate_corpus(&SyntheticConfig { dialogues_per_domain: 25, multi_domain: 0, seed: 4, ..Default::default() });
    let attraction: Vec<Dialogue> = corpus.into_iter().filter(|d| d.domain == "attraction").collect();
    let order = gold_slot_names(&attraction);
    let labeled = attraction
        .iter()
        .map(|d| label_states_gold(d, &order))
        .collect::<dialstruct::Result<Vec<_>>>()?;

    let graph = build_graph(&labeled)?;
    println!("{} nodes, {} edges, {} transitions", graph.nodes.len(), graph.edges.len(), graph.total_transitions());
    let mut busiest: Vec<_> = graph.nodes.iter().collect();
    busiest.sort_by_key(|n| std::cmp::Reverse(n.visit_count));
    for n in busiest.iter().take(4) {
        let out: Vec<String> = graph.outgoing(n.id).map(|e| format!("{}:{:.2}", e.dst, e.prob)).collect();
        println!("  node {} {} visits {} -> {}", n.id, n.state, n.visit_count, out.join(" "));
    }

    let dir = std::env::temp_dir();
    graph.export(GraphFormat::Dot, dir.join("dialstruct_graph.dot"))?;
    graph.export(GraphFormat::Json, dir.join("dialstruct_graph.json"))?;
    let back = TransitionGraph::import(dir.join("dialstruct_graph.json"))?;
    assert_eq!(back.edges, graph.edges);
    println!("\n{}", graph.to_dot().lines().take(6).collect::<Vec<_>>().join("\n"));
    println!("...\nrender with: dot -Tpng {} -o graph.png", dir.join("dialstruct_graph.dot").display());
    Ok(())
}

fn main() -> dialstruct::Result<()> {
    run_example()
}
