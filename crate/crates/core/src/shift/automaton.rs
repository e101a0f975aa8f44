//! Deterministic presentation of a shift's language.
//!
//! A state is the set of cover symbols that can end a path whose image is
//! the word read so far. State 0 is the start state (nothing read). Reading
//! visible symbol `b` from state `S` moves to
//! `{t : π(t) = b, s → t for some s ∈ S}`; words whose run reaches the empty
//! set are not allowable, so those transitions are simply absent. For a
//! Markov shift (identity map) every non-start state is a singleton.

use std::collections::HashMap;
use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::word::Symbol;

/// Hard cap on the number of subset states.
pub const MAX_STATES: usize = 200_000;

#[derive(Clone, Debug)]
pub struct LanguageAutomaton {
    states: Vec<Vec<Symbol>>,
    trans: Vec<Vec<(Symbol, u32)>>,
    last: Vec<Symbol>,
}

impl LanguageAutomaton {
    /// Subset construction over the cover graph.
    ///
    /// `succ[s-1]` lists the cover successors of `s`; `image[s-1]` is the
    /// visible symbol of `s`.
    pub(crate) fn build(
        succ: &[Vec<Symbol>],
        image: &[Symbol],
        visible_size: usize,
    ) -> Result<Self> {
        let mut states: Vec<Vec<Symbol>> = vec![Vec::new()];
        let mut last: Vec<Symbol> = vec![0];
        let mut trans: Vec<Vec<(Symbol, u32)>> = vec![Vec::new()];
        let mut index: HashMap<Vec<Symbol>, u32> = HashMap::new();
        let mut queue = VecDeque::new();

        let mut intern = |set: Vec<Symbol>,
                          b: Symbol,
                          states: &mut Vec<Vec<Symbol>>,
                          last: &mut Vec<Symbol>,
                          trans: &mut Vec<Vec<(Symbol, u32)>>,
                          queue: &mut VecDeque<u32>|
         -> Result<u32> {
            if let Some(&id) = index.get(&set) {
                return Ok(id);
            }
            let id = states.len() as u32;
            if states.len() >= MAX_STATES {
                return Err(Error::BudgetExceeded {
                    what: "subset-construction state",
                    count: states.len() as u128 + 1,
                    cap: MAX_STATES as u128,
                });
            }
            index.insert(set.clone(), id);
            states.push(set);
            last.push(b);
            trans.push(Vec::new());
            queue.push_back(id);
            Ok(id)
        };

        // Start state: every cover symbol can begin a word.
        let mut buckets: Vec<Vec<Symbol>> = vec![Vec::new(); visible_size];
        for (i, &b) in image.iter().enumerate() {
            buckets[b as usize - 1].push(i as Symbol + 1);
        }
        let mut start_trans = Vec::new();
        for (bi, bucket) in buckets.into_iter().enumerate() {
            if bucket.is_empty() {
                continue;
            }
            let b = bi as Symbol + 1;
            let id = intern(bucket, b, &mut states, &mut last, &mut trans, &mut queue)?;
            start_trans.push((b, id));
        }
        trans[0] = start_trans;

        let mut buckets: Vec<Vec<Symbol>> = vec![Vec::new(); visible_size];
        while let Some(id) = queue.pop_front() {
            for bucket in buckets.iter_mut() {
                bucket.clear();
            }
            for &s in &states[id as usize] {
                for &t in &succ[s as usize - 1] {
                    buckets[image[t as usize - 1] as usize - 1].push(t);
                }
            }
            let mut row = Vec::new();
            for (bi, bucket) in buckets.iter_mut().enumerate() {
                if bucket.is_empty() {
                    continue;
                }
                bucket.sort_unstable();
                bucket.dedup();
                let b = bi as Symbol + 1;
                let next = intern(
                    bucket.clone(),
                    b,
                    &mut states,
                    &mut last,
                    &mut trans,
                    &mut queue,
                )?;
                row.push((b, next));
            }
            trans[id as usize] = row;
        }
        Ok(LanguageAutomaton {
            states,
            trans,
            last,
        })
    }

    pub const START: u32 = 0;

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    /// Outgoing transitions of `state`, sorted by symbol.
    pub fn transitions(&self, state: u32) -> &[(Symbol, u32)] {
        &self.trans[state as usize]
    }

    pub fn step(&self, state: u32, b: Symbol) -> Option<u32> {
        let row = &self.trans[state as usize];
        row.binary_search_by_key(&b, |&(s, _)| s)
            .ok()
            .map(|i| row[i].1)
    }

    pub fn run(&self, from: u32, word: &[Symbol]) -> Option<u32> {
        let mut q = from;
        for &b in word {
            q = self.step(q, b)?;
        }
        Some(q)
    }

    /// Cover symbols that can end a path labelled by the word read so far.
    pub fn cover_set(&self, state: u32) -> &[Symbol] {
        &self.states[state as usize]
    }

    /// Last visible symbol read to reach `state` (0 for the start state).
    pub fn last_symbol(&self, state: u32) -> Symbol {
        self.last[state as usize]
    }
}
