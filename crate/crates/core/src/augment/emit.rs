use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::seq::{index, SliceRandom};

use super::{build_dictionary, AugmentedExample, Origin, TurnRecord};
use crate::error::{Error, Result};
use crate::seed::Rng;
use crate::statetrack::DialogueState;
use crate::structure::TransitionGraph;

/// Keeps ⌊r_train·n⌋ turns chosen uniformly without replacement, in their
/// original order.
pub fn subsample(turns: &[TurnRecord], r_train: f64, rng: &mut Rng) -> Result<Vec<TurnRecord>> {
    if !(r_train > 0.0 && r_train <= 1.0) {
        return Err(Error::invalid(format!("r_train must lie in (0, 1], got {r_train}")));
    }
    let m = (r_train * turns.len() as f64).floor() as usize;
    let mut picked = index::sample(rng, turns.len(), m).into_vec();
    picked.sort_unstable();
    Ok(picked.into_iter().map(|i| turns[i].clone()).collect())
}

fn quota(r_aug: f64, used: usize) -> Result<usize> {
    if !(r_aug >= 0.0 && r_aug.is_finite()) {
        return Err(Error::invalid(format!("r_aug must be a non-negative number, got {r_aug}")));
    }
    Ok((r_aug * used as f64).floor() as usize)
}

fn original(t: &TurnRecord, state: &DialogueState) -> AugmentedExample {
    AugmentedExample {
        context: t.context.clone(),
        response: t.response.clone(),
        state: state.clone(),
        origin: Origin::Original,
    }
}

/// Walks `order` round-robin, taking one item per visit from that turn's
/// shuffled pool, or its fallback once the pool is spent.
fn round_robin<F>(order: &[usize], quota: usize, mut pool: F, fallback: impl Fn(usize) -> String, rng: &mut Rng) -> Vec<(usize, String)>
where
    F: FnMut(usize) -> Vec<String>,
{
    let mut pools: HashMap<usize, Vec<String>> = HashMap::new();
    let mut out = Vec::with_capacity(quota);
    for k in 0..quota {
        let i = order[k % order.len()];
        let p = pools.entry(i).or_insert_with(|| {
            let mut v = pool(i);
            v.shuffle(rng);
            v
        });
        let pick = p.pop().unwrap_or_else(|| fallback(i));
        out.push((i, pick));
    }
    out
}

/// Originals of the used subset followed by ⌊r_aug·used⌋ examples that pair
/// each context with another response seen under the same state.
///
/// The response dictionary is built from the used subset only.
pub fn mrda_emit(train: &[TurnRecord], r_train: f64, r_aug: f64, seed: u64) -> Result<Vec<AugmentedExample>> {
    let mut rng = crate::seed::rng(seed);
    let used = subsample(train, r_train, &mut rng)?;
    let q = quota(r_aug, used.len())?;
    let dict = build_dictionary(&used);
    let mut out: Vec<AugmentedExample> = used.iter().map(|t| original(t, &t.state)).collect();
    let order: Vec<usize> = (0..used.len()).collect();
    let picks = round_robin(
        &order,
        q,
        |i| {
            dict.responses(&used[i].state)
                .iter()
                .filter(|r| r.text != used[i].response)
                .map(|r| r.text.clone())
                .collect()
        },
        |i| used[i].response.clone(),
        &mut rng,
    );
    out.extend(picks.into_iter().map(|(i, response)| AugmentedExample {
        context: used[i].context.clone(),
        response,
        state: used[i].state.clone(),
        origin: Origin::Mrda,
    }));
    Ok(out)
}

/// Most-frequent-response baseline over annotated states.
///
/// For each state the most frequent response (ties broken by string order)
/// is paired with other contexts that entered the same state. Turns are
/// visited by decreasing state visit count in `graph`.
pub fn mfs_emit(
    train: &[TurnRecord],
    graph: &TransitionGraph,
    r_train: f64,
    r_aug: f64,
    seed: u64,
) -> Result<Vec<AugmentedExample>> {
    if let Some(t) = train.iter().find(|t| t.gold_state.is_none()) {
        return Err(Error::Validation {
            dialogue_id: t.dialogue_id.clone(),
            message: "the most-frequent-response baseline needs annotated states".into(),
        });
    }
    let mut rng = crate::seed::rng(seed);
    let used = subsample(train, r_train, &mut rng)?;
    let q = quota(r_aug, used.len())?;
    let gold = |i: usize| used[i].gold_state.as_ref().expect("checked above");

    let mut members: BTreeMap<&DialogueState, Vec<usize>> = BTreeMap::new();
    for i in 0..used.len() {
        members.entry(gold(i)).or_default().push(i);
    }
    let mut top: HashMap<&DialogueState, String> = HashMap::new();
    for (z, idx) in &members {
        let mut freq: BTreeMap<&str, usize> = BTreeMap::new();
        for &i in idx {
            *freq.entry(used[i].response.as_str()).or_default() += 1;
        }
        // BTreeMap iterates in string order, so max_by_key keeps the last
        // maximum; reverse to keep the first.
        let best = freq.iter().rev().max_by_key(|(_, &c)| c).map(|(r, _)| r.to_string());
        top.insert(*z, best.expect("non-empty group"));
    }

    let visits = |z: &DialogueState| graph.node_of(z).map_or(0, |n| n.visit_count);
    let mut order: Vec<usize> = (0..used.len()).collect();
    order.sort_by(|&a, &b| visits(gold(b)).cmp(&visits(gold(a))).then(gold(a).cmp(gold(b))).then(a.cmp(&b)));

    let mut out: Vec<AugmentedExample> = used.iter().map(|t| original(t, t.gold_state.as_ref().unwrap())).collect();
    let picks = round_robin(
        &order,
        q,
        |i| {
            let own = &used[i].context;
            let alts: BTreeSet<&String> = members[gold(i)]
                .iter()
                .map(|&j| &used[j].context)
                .filter(|c| *c != own)
                .collect();
            alts.into_iter().cloned().collect()
        },
        |i| used[i].context.clone(),
        &mut rng,
    );
    out.extend(picks.into_iter().map(|(i, context)| AugmentedExample {
        context,
        response: top[gold(i)].clone(),
        state: gold(i).clone(),
        origin: Origin::Mfs,
    }));
    Ok(out)
}
