//! Connector search and the finite-irreducibility / BIP checks.
//!
//! Everything here is decided on the truncation at hand; a certificate says
//! nothing about the untruncated graph.

use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::{LanguageAutomaton, ShiftSpace};
use crate::error::{Error, Result};
use crate::word::{Symbol, Word};

/// Default cap on the number of `(u, v)` pairs a certificate may examine.
pub const DEFAULT_PAIR_CAP: u128 = 4_000_000;

/// Visit allowable continuations of length `len` from `from`, in
/// lexicographic order, until `f` returns `true`.
fn search_from(
    auto: &LanguageAutomaton,
    from: u32,
    len: usize,
    buf: &mut Vec<Symbol>,
    f: &mut dyn FnMut(&[Symbol], u32) -> bool,
) -> bool {
    if len == 0 {
        return f(buf, from);
    }
    for &(b, next) in auto.transitions(from) {
        buf.push(b);
        let done = search_from(auto, next, len - 1, buf, f);
        buf.pop();
        if done {
            return true;
        }
    }
    false
}

fn connector_from_state(
    auto: &LanguageAutomaton,
    q: u32,
    v: &[Symbol],
    lengths: impl Iterator<Item = usize>,
) -> Option<Word> {
    for len in lengths {
        let mut found = None;
        let mut buf = Vec::with_capacity(len);
        search_from(auto, q, len, &mut buf, &mut |w, end| {
            if auto.run(end, v).is_some() {
                found = Some(Word::from(w));
                true
            } else {
                false
            }
        });
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Shortest (then lexicographically first) `w` with `|w| ≤ p_max` and `u·w·v`
/// allowable. `ε` is tried first.
pub fn find_connector(shift: &ShiftSpace, u: &Word, v: &Word, p_max: usize) -> Result<Option<Word>> {
    let auto = shift.automaton()?;
    let Some(q) = auto.run(LanguageAutomaton::START, u.symbols()) else {
        return Ok(None);
    };
    Ok(connector_from_state(&auto, q, v.symbols(), 0..=p_max))
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectorEntry {
    pub u: Word,
    pub v: Word,
    pub w: Word,
}

/// Finite connector set covering every pair of words up to `n_max`.
#[derive(Clone, Debug, Serialize)]
pub struct SpecificationCertificate {
    /// Always `"truncation"`: the certificate covers this finite graph only.
    pub scope: &'static str,
    pub n_max: usize,
    pub p: usize,
    pub connectors: BTreeSet<Word>,
    /// Smallest `p*` such that every pair is glued by a word of length
    /// exactly `p*` (finitely primitive variant), when one exists ≤ `p_max`.
    pub strong_p: Option<usize>,
    pub strong_connectors: BTreeSet<Word>,
    pub pairs_checked: usize,
    #[serde(skip)]
    pub connector_table: Vec<ConnectorEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FailureReport {
    pub u: Word,
    pub v: Word,
    pub p_max: usize,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum CertificateOutcome {
    Certified(SpecificationCertificate),
    Failed(FailureReport),
}

impl CertificateOutcome {
    pub fn certificate(&self) -> Option<&SpecificationCertificate> {
        match self {
            CertificateOutcome::Certified(c) => Some(c),
            CertificateOutcome::Failed(_) => None,
        }
    }
}

/// Words of lengths `1..=n_max` in length-then-lexicographic order.
pub(crate) fn words_up_to(shift: &ShiftSpace, n_max: usize) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for n in 1..=n_max {
        out.extend(shift.enumerate_words(n, None)?);
    }
    Ok(out)
}

pub fn check_finite_irreducibility(
    shift: &ShiftSpace,
    n_max: usize,
    p_max: usize,
    pair_cap: Option<u128>,
) -> Result<CertificateOutcome> {
    let cap = pair_cap.unwrap_or(DEFAULT_PAIR_CAP);
    let mut total: u128 = 0;
    for n in 1..=n_max {
        total = total.saturating_add(shift.count_words(n)?);
    }
    let pairs = total.saturating_mul(total);
    if pairs > cap {
        return Err(Error::BudgetExceeded {
            what: "connector pair",
            count: pairs,
            cap,
        });
    }
    let auto = shift.automaton()?;
    let words = words_up_to(shift, n_max)?;
    let states: Vec<u32> = words
        .iter()
        .map(|u| auto.run(LanguageAutomaton::START, u.symbols()).expect("enumerated"))
        .collect();

    // A connector depends on u only through the automaton state it reaches.
    let mut weak: HashMap<(u32, usize), Option<Word>> = HashMap::new();
    let mut table = Vec::with_capacity(words.len() * words.len());
    let mut connectors = BTreeSet::new();
    let mut p = 0;
    for (u, &q) in words.iter().zip(&states) {
        for (vi, v) in words.iter().enumerate() {
            let found = weak
                .entry((q, vi))
                .or_insert_with(|| connector_from_state(&auto, q, v.symbols(), 0..=p_max))
                .clone();
            match found {
                Some(w) => {
                    p = p.max(w.len());
                    connectors.insert(w.clone());
                    table.push(ConnectorEntry {
                        u: u.clone(),
                        v: v.clone(),
                        w,
                    });
                }
                None => {
                    return Ok(CertificateOutcome::Failed(FailureReport {
                        u: u.clone(),
                        v: v.clone(),
                        p_max,
                    }))
                }
            }
        }
    }

    let mut distinct_states: Vec<u32> = states.clone();
    distinct_states.sort_unstable();
    distinct_states.dedup();
    let mut strong_p = None;
    let mut strong_connectors = BTreeSet::new();
    'len: for len in 0..=p_max {
        let mut chosen = BTreeSet::new();
        for &q in &distinct_states {
            for v in &words {
                match connector_from_state(&auto, q, v.symbols(), std::iter::once(len)) {
                    Some(w) => {
                        chosen.insert(w);
                    }
                    None => continue 'len,
                }
            }
        }
        strong_p = Some(len);
        strong_connectors = chosen;
        break;
    }

    Ok(CertificateOutcome::Certified(SpecificationCertificate {
        scope: "truncation",
        n_max,
        p,
        connectors,
        strong_p,
        strong_connectors,
        pairs_checked: table.len(),
        connector_table: table,
    }))
}

#[derive(Clone, Debug, Serialize)]
pub struct BipReport {
    pub holds: bool,
    pub witnesses: Vec<Symbol>,
}

/// Greedy set cover for the big-images-and-preimages property on the cover
/// graph: every symbol needs a witness with an edge into it and a witness
/// it has an edge to. Ties go to the smallest symbol.
pub fn check_bip(shift: &ShiftSpace) -> BipReport {
    let k = shift.alphabet_size();
    let mut pred: Vec<Vec<Symbol>> = vec![Vec::new(); k];
    for (i, j) in shift.edges() {
        pred[j as usize - 1].push(i);
    }
    // need_in[a]: a still lacks a witness b with b→a; need_out[a]: lacks a→b.
    let mut need_in = vec![true; k];
    let mut need_out = vec![true; k];
    let mut remaining = 2 * k;
    let mut witnesses = Vec::new();
    while remaining > 0 {
        let mut best: Option<(usize, Symbol)> = None;
        for b in 1..=k as Symbol {
            let gain = shift
                .successors(b)
                .iter()
                .filter(|&&a| need_in[a as usize - 1])
                .count()
                + pred[b as usize - 1]
                    .iter()
                    .filter(|&&a| need_out[a as usize - 1])
                    .count();
            if gain > 0 && best.is_none_or(|(g, _)| gain > g) {
                best = Some((gain, b));
            }
        }
        let Some((_, b)) = best else {
            return BipReport {
                holds: false,
                witnesses,
            };
        };
        for &a in shift.successors(b) {
            if std::mem::take(&mut need_in[a as usize - 1]) {
                remaining -= 1;
            }
        }
        for &a in &pred[b as usize - 1] {
            if std::mem::take(&mut need_out[a as usize - 1]) {
                remaining -= 1;
            }
        }
        witnesses.push(b);
    }
    witnesses.sort_unstable();
    BipReport {
        holds: true,
        witnesses,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::w;

    #[test]
    fn connectors_on_small_graphs() {
        let g = ShiftSpace::golden_mean();
        assert_eq!(find_connector(&g, &w("2"), &w("2"), 2).unwrap(), Some(w("1")));
        assert_eq!(find_connector(&g, &w("1"), &w("1"), 2).unwrap(), Some(Word::empty()));
        assert_eq!(find_connector(&g, &w("2"), &w("2"), 0).unwrap(), None);
        let full = ShiftSpace::full(3).unwrap();
        assert_eq!(find_connector(&full, &w("31"), &w("2"), 2).unwrap(), Some(Word::empty()));
    }

    #[test]
    fn nofinite_connector_has_length_three() {
        // u ends in block F_2 (symbol 3), v starts in block F_3 (symbol 5):
        // the only route is 3 → 2 → 1 → 4 → 5.
        let s = ShiftSpace::example_nofinite(6).unwrap();
        let c = find_connector(&s, &w("3"), &w("5"), 4).unwrap().unwrap();
        assert_eq!(c, w("214"));
    }

    #[test]
    fn certificates() {
        let full = ShiftSpace::full(3).unwrap();
        let c = check_finite_irreducibility(&full, 3, 2, None).unwrap();
        let c = c.certificate().unwrap();
        assert_eq!(c.p, 0);
        assert_eq!(c.connectors, BTreeSet::from([Word::empty()]));
        assert_eq!(c.strong_p, Some(0));

        let g = ShiftSpace::golden_mean();
        let c = check_finite_irreducibility(&g, 4, 2, None).unwrap();
        let c = c.certificate().unwrap();
        assert_eq!(c.p, 1);
        assert_eq!(c.connectors, BTreeSet::from([Word::empty(), w("1")]));
        assert_eq!(c.strong_p, Some(1));
    }

    #[test]
    fn failure_names_a_pair() {
        let g = ShiftSpace::golden_mean();
        match check_finite_irreducibility(&g, 2, 0, None).unwrap() {
            CertificateOutcome::Failed(f) => {
                assert_eq!(f.u.last(), Some(2));
                assert_eq!(f.v.first(), Some(2));
            }
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn pair_budget() {
        let full = ShiftSpace::full(4).unwrap();
        assert!(matches!(
            check_finite_irreducibility(&full, 6, 1, Some(1000)),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn bip_witnesses() {
        let full = ShiftSpace::full(4).unwrap();
        let r = check_bip(&full);
        assert!(r.holds);
        assert_eq!(r.witnesses, vec![1]);

        let mut edges = Vec::new();
        for a in 1..=3 {
            for b in 1..=3 {
                edges.push((a, b));
                edges.push((a + 3, b + 3));
            }
        }
        let union = ShiftSpace::new(6, edges).unwrap();
        let r = check_bip(&union);
        assert!(r.holds);
        assert_eq!(r.witnesses, vec![1, 4]);
    }
}
