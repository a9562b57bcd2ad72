//! Seeded template-based task-oriented dialogues with gold slot annotations.
//!
//! Useful for demos and tests when no annotated corpus is at hand. Each
//! domain has its own slots and value lists; user turns fill templates and
//! record the character span of every value.

use rand::seq::SliceRandom;
use rand::Rng as _;

use crate::corpus::{Dialogue, GoldSlot, Turn};
use crate::seed::Rng;

struct SlotSpec {
    name: &'static str,
    values: &'static [&'static str],
}

struct DomainSpec {
    name: &'static str,
    slots: &'static [SlotSpec],
    /// `{slot}` placeholders name a slot of this domain.
    single: &'static [&'static str],
    pair: &'static [&'static str],
    asks: &'static [&'static str],
}

const AREAS: &[&str] = &["centre", "north", "south", "east", "west"];
const PRICES: &[&str] = &["cheap", "moderate", "expensive"];
const PLACES: &[&str] = &[
    "cambridge", "ely", "stansted", "peterborough", "norwich", "london", "stevenage", "kings lynn",
];
const TIMES: &[&str] = &["08:15", "09:30", "10:45", "12:00", "13:15", "15:30", "17:45", "19:00"];
const DAYS: &[&str] = &["monday", "tuesday", "wednesday", "thursday", "friday", "saturday", "sunday"];
const COUNTS: &[&str] = &["1", "2", "3", "4", "5", "6"];

const DOMAINS: &[DomainSpec] = &[
    DomainSpec {
        name: "attraction",
        slots: &[
            SlotSpec { name: "attraction-type", values: &["museum", "park", "theatre", "cinema", "college", "nightclub", "sports", "gallery"] },
            SlotSpec { name: "attraction-area", values: AREAS },
            SlotSpec { name: "attraction-name", values: &["byard art", "kettles yard", "the place", "castle galleries", "cherry hinton"] },
        ],
        single: &[
            "I am looking for a {attraction-type} to visit",
            "is there anything in the {attraction-area} ?",
            "can you tell me about {attraction-name} ?",
            "I would prefer the {attraction-area} please",
            "what about a {attraction-type} instead ?",
        ],
        pair: &[
            "I'd like a {attraction-type} place in the {attraction-area} please",
            "find me a {attraction-type} in the {attraction-area}",
        ],
        asks: &["what is the entrance fee ?", "can I get the phone number ?", "what is the postcode ?"],
    },
    DomainSpec {
        name: "restaurant",
        slots: &[
            SlotSpec { name: "restaurant-food", values: &["italian", "chinese", "indian", "thai", "british", "french", "korean"] },
            SlotSpec { name: "restaurant-area", values: AREAS },
            SlotSpec { name: "restaurant-pricerange", values: PRICES },
            SlotSpec { name: "restaurant-people", values: COUNTS },
        ],
        single: &[
            "I want to eat {restaurant-food} food",
            "somewhere in the {restaurant-area} would be good",
            "it should be {restaurant-pricerange} please",
            "a table for {restaurant-people} people",
            "actually make it {restaurant-food} instead",
        ],
        pair: &[
            "I need a {restaurant-pricerange} restaurant serving {restaurant-food} food",
            "a {restaurant-food} place in the {restaurant-area} please",
        ],
        asks: &["what is the address ?", "can I have the phone number ?"],
    },
    DomainSpec {
        name: "hotel",
        slots: &[
            SlotSpec { name: "hotel-area", values: AREAS },
            SlotSpec { name: "hotel-pricerange", values: PRICES },
            SlotSpec { name: "hotel-stay", values: COUNTS },
            SlotSpec { name: "hotel-day", values: DAYS },
        ],
        single: &[
            "I need a place to stay in the {hotel-area}",
            "it should be in the {hotel-pricerange} price range",
            "for {hotel-stay} nights please",
            "starting on {hotel-day}",
        ],
        pair: &[
            "a {hotel-pricerange} hotel in the {hotel-area} please",
            "book it for {hotel-stay} nights from {hotel-day}",
        ],
        asks: &["does it have free parking ?", "does it have wifi ?"],
    },
    DomainSpec {
        name: "taxi",
        slots: &[
            SlotSpec { name: "taxi-departure", values: PLACES },
            SlotSpec { name: "taxi-destination", values: PLACES },
            SlotSpec { name: "taxi-leaveat", values: TIMES },
        ],
        single: &[
            "I need a taxi from {taxi-departure}",
            "I am going to {taxi-destination}",
            "I want to leave at {taxi-leaveat}",
            "pick me up at {taxi-leaveat} please",
        ],
        pair: &[
            "book a taxi from {taxi-departure} to {taxi-destination}",
            "I need to get to {taxi-destination} by {taxi-leaveat}",
        ],
        asks: &["what is the car type ?", "can I have the contact number ?"],
    },
    DomainSpec {
        name: "train",
        slots: &[
            SlotSpec { name: "train-departure", values: PLACES },
            SlotSpec { name: "train-destination", values: PLACES },
            SlotSpec { name: "train-day", values: DAYS },
            SlotSpec { name: "train-leaveat", values: TIMES },
        ],
        single: &[
            "I need a train leaving from {train-departure}",
            "I am travelling to {train-destination}",
            "it should be on {train-day}",
            "after {train-leaveat} please",
        ],
        pair: &[
            "a train from {train-departure} to {train-destination} please",
            "I want to travel on {train-day} after {train-leaveat}",
        ],
        asks: &["what is the travel time ?", "how much is a ticket ?"],
    },
];

const SYSTEM_OPEN: &[&str] = &[
    "sure , what are you looking for ?",
    "I can help with that . any preferences ?",
    "okay , do you have anything else in mind ?",
];
const SYSTEM_MORE: &[&str] = &[
    "I have several options that match . anything else to narrow it down ?",
    "there are a few choices . do you have another preference ?",
    "I found some matches . what else can I note down ?",
];
const SYSTEM_DONE: &[&str] = &[
    "great , I have booked that for you .",
    "all set . your reference number is ready .",
    "that is booked . is there anything else ?",
];
const SYSTEM_INFO: &[&str] = &[
    "here is the information you asked for .",
    "the details are on your booking page .",
];
const SYSTEM_BYE: &[&str] = &["you are welcome , goodbye .", "have a nice day !", "glad I could help ."];
const USER_BYE: &[&str] = &["thank you , that is all", "no that is everything , thanks", "great , bye"];

#[derive(Debug, Clone)]
pub struct SyntheticConfig {
    pub dialogues_per_domain: usize,
    /// Extra two-domain dialogues.
    pub multi_domain: usize,
    pub min_turns: usize,
    pub max_turns: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            dialogues_per_domain: 40,
            multi_domain: 10,
            min_turns: 3,
            max_turns: 6,
            seed: 0,
        }
    }
}

pub fn domain_names() -> Vec<&'static str> {
    DOMAINS.iter().map(|d| d.name).collect()
}

/// Slot names of one synthetic domain, in declaration order.
pub fn domain_slots(domain: &str) -> Vec<&'static str> {
    DOMAINS
        .iter()
        .find(|d| d.name == domain)
        .map(|d| d.slots.iter().map(|s| s.name).collect())
        .unwrap_or_default()
}

fn fill(template: &str, domain: &DomainSpec, chosen: &mut Vec<(usize, &'static str)>, rng: &mut Rng) -> (String, Vec<GoldSlot>) {
    let mut text = String::new();
    let mut slots = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let close = open + rest[open..].find('}').expect("template braces balance");
        text.push_str(&rest[..open]);
        let name = &rest[open + 1..close];
        let si = domain
            .slots
            .iter()
            .position(|s| s.name == name)
            .expect("template names a known slot");
        let value = *domain.slots[si].values.choose(rng).unwrap();
        let start = text.chars().count();
        text.push_str(value);
        slots.push(GoldSlot {
            name: name.to_string(),
            value: value.to_string(),
            span: Some((start, start + value.chars().count())),
        });
        chosen.push((si, value));
        rest = &rest[close + 1..];
    }
    text.push_str(rest);
    (text, slots)
}

fn domain_turns(domain: &DomainSpec, n_turns: usize, rng: &mut Rng) -> Vec<(String, Vec<GoldSlot>, &'static str)> {
    let mut out = Vec::new();
    let mut informed = 0usize;
    for t in 0..n_turns {
        let last = t + 1 == n_turns;
        let roll: f64 = rng.gen();
        let mut chosen = Vec::new();
        let (text, slots) = if last {
            (USER_BYE.choose(rng).unwrap().to_string(), Vec::new())
        } else if informed > 0 && roll < 0.15 {
            (domain.asks.choose(rng).unwrap().to_string(), Vec::new())
        } else if roll < 0.45 {
            fill(domain.pair.choose(rng).unwrap(), domain, &mut chosen, rng)
        } else {
            fill(domain.single.choose(rng).unwrap(), domain, &mut chosen, rng)
        };
        informed += slots.len();
        let system = if last {
            SYSTEM_BYE
        } else if slots.is_empty() {
            SYSTEM_INFO
        } else if t == 0 {
            SYSTEM_OPEN
        } else if informed >= domain.slots.len() {
            SYSTEM_DONE
        } else {
            SYSTEM_MORE
        };
        out.push((text, slots, *system.choose(rng).unwrap()));
    }
    out
}

/// Generates the corpus. Dialogue ids are `<domain>-<n>` and
/// `multi-<n>` for the two-domain extras.
pub fn generate_corpus(config: &SyntheticConfig) -> Vec<Dialogue> {
    let mut rng = crate::seed::rng(config.seed);
    let span = config.min_turns.max(2)..=config.max_turns.max(config.min_turns.max(2));
    let mut out = Vec::new();
    for domain in DOMAINS {
        for n in 0..config.dialogues_per_domain {
            let k = rng.gen_range(span.clone());
            let turns = domain_turns(domain, k, &mut rng)
                .into_iter()
                .enumerate()
                .map(|(i, (u, slots, s))| Turn::new(i, u, s).with_slots(slots))
                .collect();
            out.push(Dialogue::new(format!("{}-{n:03}", domain.name), domain.name, turns));
        }
    }
    for n in 0..config.multi_domain {
        let pick: Vec<&DomainSpec> = DOMAINS.choose_multiple(&mut rng, 2).collect();
        let mut turns = Vec::new();
        for (j, d) in pick.iter().enumerate() {
            let k = rng.gen_range(span.clone());
            let mut part = domain_turns(d, k, &mut rng);
            if j == 0 {
                // only the final domain says goodbye
                part.pop();
            }
            turns.extend(part);
        }
        let turns = turns
            .into_iter()
            .enumerate()
            .map(|(i, (u, slots, s))| Turn::new(i, u, s).with_slots(slots))
            .collect();
        out.push(Dialogue::new(format!("multi-{n:03}"), format!("{}+{}", pick[0].name, pick[1].name), turns));
    }
    out
}
