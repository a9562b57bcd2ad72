//! Transition graphs over distinct dialogue states.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::statetrack::{DialogueState, LabeledDialogue};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    pub state: DialogueState,
    /// Trajectory positions at this state, including implicit start visits.
    #[serde(rename = "count")]
    pub visit_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub src: usize,
    pub dst: usize,
    pub count: usize,
    pub prob: f64,
}

/// Nodes are numbered by first visit; edges are sorted by `(src, dst)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionGraph {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub initial_state_id: Option<usize>,
}

#[derive(Serialize, Deserialize)]
struct GraphFile {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GraphFormat {
    Dot,
    Json,
}

impl std::str::FromStr for GraphFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "dot" => Ok(GraphFormat::Dot),
            "json" => Ok(GraphFormat::Json),
            other => Err(Error::invalid(format!("unknown graph format `{other}`"))),
        }
    }
}

/// Builds the graph. Every trajectory starts at the zero vector: when a
/// dialogue's first turn already changed the state, a start transition from
/// zero is counted. Turns that leave the state unchanged add self-loops.
pub fn build_graph(labeled: &[LabeledDialogue]) -> Result<TransitionGraph> {
    let width = labeled
        .iter()
        .find_map(|l| l.states.first().map(DialogueState::len))
        .ok_or_else(|| Error::invalid("cannot build a graph from no labeled turns"))?;
    if labeled.iter().flat_map(|l| &l.states).any(|s| s.len() != width) {
        return Err(Error::invalid("labeled dialogues disagree on state width"));
    }

    let mut ids: HashMap<DialogueState, usize> = HashMap::new();
    let mut nodes: Vec<Node> = Vec::new();
    let mut visit = |state: &DialogueState, nodes: &mut Vec<Node>| -> usize {
        let id = *ids.entry(state.clone()).or_insert_with(|| {
            nodes.push(Node {
                id: nodes.len(),
                state: state.clone(),
                visit_count: 0,
            });
            nodes.len() - 1
        });
        nodes[id].visit_count += 1;
        id
    };
    let zero = DialogueState::zeros(width);
    let mut counts: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for l in labeled {
        let Some(first) = l.states.first() else { continue };
        let mut prev = if first.is_zero() {
            visit(first, &mut nodes)
        } else {
            let start = visit(&zero, &mut nodes);
            let id = visit(first, &mut nodes);
            *counts.entry((start, id)).or_default() += 1;
            id
        };
        for s in &l.states[1..] {
            let id = visit(s, &mut nodes);
            *counts.entry((prev, id)).or_default() += 1;
            prev = id;
        }
    }

    let mut out_totals = vec![0usize; nodes.len()];
    for (&(src, _), &c) in &counts {
        out_totals[src] += c;
    }
    let edges = counts
        .into_iter()
        .map(|((src, dst), count)| Edge {
            src,
            dst,
            count,
            prob: count as f64 / out_totals[src] as f64,
        })
        .collect();
    let initial_state_id = nodes.iter().find(|n| n.state.is_zero()).map(|n| n.id);
    Ok(TransitionGraph {
        nodes,
        edges,
        initial_state_id,
    })
}

impl TransitionGraph {
    pub fn node_of(&self, state: &DialogueState) -> Option<&Node> {
        self.nodes.iter().find(|n| n.state == *state)
    }

    pub fn outgoing(&self, src: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.src == src)
    }

    pub fn incoming(&self, dst: usize) -> impl Iterator<Item = &Edge> {
        self.edges.iter().filter(move |e| e.dst == dst)
    }

    pub fn total_transitions(&self) -> usize {
        self.edges.iter().map(|e| e.count).sum()
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph structure {\n  node [shape=circle];\n");
        for n in &self.nodes {
            let _ = writeln!(out, "  {} [label=\"{}\\n{}\", xlabel=\"{}\"];", n.id, n.id, n.state, n.visit_count);
        }
        for e in &self.edges {
            let _ = writeln!(out, "  {} -> {} [label=\"{:.2}\"];", e.src, e.dst, e.prob);
        }
        out.push_str("}\n");
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let file = GraphFile {
            nodes: self.nodes.clone(),
            edges: self.edges.clone(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: GraphFile = serde_json::from_str(text)?;
        for (i, n) in file.nodes.iter().enumerate() {
            if n.id != i {
                return Err(Error::invalid(format!("node at position {i} has id {}", n.id)));
            }
        }
        if file.edges.iter().any(|e| e.src >= file.nodes.len() || e.dst >= file.nodes.len()) {
            return Err(Error::invalid("edge refers to a missing node"));
        }
        let initial_state_id = file.nodes.iter().find(|n| n.state.is_zero()).map(|n| n.id);
        Ok(TransitionGraph {
            nodes: file.nodes,
            edges: file.edges,
            initial_state_id,
        })
    }

    pub fn export(&self, format: GraphFormat, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let text = match format {
            GraphFormat::Dot => self.to_dot(),
            GraphFormat::Json => self.to_json()?,
        };
        fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn import(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}

pub fn export_graph(graph: &TransitionGraph, format: GraphFormat, path: impl AsRef<Path>) -> Result<()> {
    graph.export(format, path)
}
