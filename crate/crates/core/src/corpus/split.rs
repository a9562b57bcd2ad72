use std::collections::BTreeSet;

use rand::seq::SliceRandom;

use super::Dialogue;
use crate::error::{Error, Result};
use crate::seed;

/// Leave-one-domain-out split.
///
/// `source` holds every dialogue that never touches the held-out domain and
/// feeds slot-boundary training. The held-out domain's single-domain
/// dialogues are shuffled and cut 60/20/20 into `train`/`valid`/`test`.
#[derive(Debug, Clone)]
pub struct DomainSplit {
    pub train_domains: BTreeSet<String>,
    pub test_domain: String,
    pub source: Vec<Dialogue>,
    pub train: Vec<Dialogue>,
    pub valid: Vec<Dialogue>,
    pub test: Vec<Dialogue>,
}

impl DomainSplit {
    /// All held-out-domain dialogues in split order.
    pub fn target(&self) -> impl Iterator<Item = &Dialogue> {
        self.train.iter().chain(&self.valid).chain(&self.test)
    }
}

/// Split sizes `⌊0.6n⌋ / ⌊0.2n⌋ / rest`.
pub fn split_sizes(n: usize) -> (usize, usize, usize) {
    let train = n * 6 / 10;
    let valid = n * 2 / 10;
    (train, valid, n - train - valid)
}

pub fn make_split(corpus: &[Dialogue], test_domain: &str, seed: u64) -> Result<DomainSplit> {
    let domains: BTreeSet<&str> = corpus.iter().flat_map(|d| d.domains()).collect();
    if !domains.contains(test_domain) {
        return Err(Error::invalid(format!("domain `{test_domain}` not present in corpus")));
    }
    if domains.len() < 2 {
        return Err(Error::invalid("a domain split needs dialogues from at least two domains"));
    }

    let source: Vec<Dialogue> = corpus
        .iter()
        .filter(|d| !d.touches_domain(test_domain))
        .cloned()
        .collect();
    let train_domains = source
        .iter()
        .flat_map(|d| d.domains())
        .map(str::to_string)
        .collect();

    let mut target: Vec<Dialogue> = corpus
        .iter()
        .filter(|d| d.is_single_domain(test_domain))
        .cloned()
        .collect();
    target.sort_by(|a, b| a.dialogue_id.cmp(&b.dialogue_id));
    target.shuffle(&mut seed::rng(seed));

    let (n_train, n_valid, _) = split_sizes(target.len());
    let test = target.split_off(n_train + n_valid);
    let valid = target.split_off(n_train);
    Ok(DomainSplit {
        train_domains,
        test_domain: test_domain.to_string(),
        source,
        train: target,
        valid,
        test,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Turn;
    use std::collections::HashSet;

    fn corpus(n_attraction: usize) -> Vec<Dialogue> {
        let mut out: Vec<Dialogue> = (0..n_attraction)
            .map(|i| Dialogue::new(format!("att{i:03}"), "attraction", vec![Turn::new(0, "hi", "hello")]))
            .collect();
        out.push(Dialogue::new("taxi0", "taxi", vec![]));
        out.push(Dialogue::new("mixed", "attraction+taxi", vec![]));
        out
    }

    #[test]
    fn sizes_follow_floor_arithmetic() {
        assert_eq!(split_sizes(150), (90, 30, 30));
        assert_eq!(split_sizes(1), (0, 0, 1));
        assert_eq!(split_sizes(7), (4, 1, 2));
    }

    #[test]
    fn attraction_split() {
        let s = make_split(&corpus(150), "attraction", 3).unwrap();
        assert_eq!((s.train.len(), s.valid.len(), s.test.len()), (90, 30, 30));
        assert!(!s.train_domains.contains("attraction"));
        assert_eq!(s.source.len(), 1);
        let ids: HashSet<_> = s.target().map(|d| d.dialogue_id.clone()).collect();
        assert_eq!(ids.len(), 150);
    }

    #[test]
    fn deterministic_given_seed() {
        let c = corpus(20);
        let ids = |s: &DomainSplit| s.target().map(|d| d.dialogue_id.clone()).collect::<Vec<_>>();
        let a = make_split(&c, "attraction", 11).unwrap();
        let b = make_split(&c, "attraction", 11).unwrap();
        let other = make_split(&c, "attraction", 12).unwrap();
        assert_eq!(ids(&a), ids(&b));
        assert_ne!(ids(&a), ids(&other));
        let mut shuffled = c.clone();
        shuffled.reverse();
        assert_eq!(ids(&make_split(&shuffled, "attraction", 11).unwrap()), ids(&a));
    }

    #[test]
    fn single_target_dialogue_goes_to_test() {
        let s = make_split(&corpus(1), "attraction", 0).unwrap();
        assert_eq!((s.train.len(), s.valid.len(), s.test.len()), (0, 0, 1));
    }

    #[test]
    fn missing_domain_is_error() {
        assert!(make_split(&corpus(3), "hotel", 0).is_err());
        let only = vec![Dialogue::new("a", "attraction", vec![])];
        assert!(make_split(&only, "attraction", 0).is_err());
    }
}
