#![allow(dead_code)]

use std::collections::HashMap;

use proptest::prelude::*;
use thermoshift::{ShiftSpace, Symbol, WeightSystem, Word};

/// Random Markov shift on 2..=max_k symbols; every symbol keeps an out-edge.
pub fn markov(max_k: usize) -> impl Strategy<Value = ShiftSpace> {
    (2..=max_k)
        .prop_flat_map(|k| (Just(k), proptest::collection::vec(any::<bool>(), k * k)))
        .prop_filter_map("no valid graph", |(k, bits)| {
            let mut edges = Vec::new();
            for i in 0..k {
                for j in 0..k {
                    if bits[i * k + j] || j == (i + 1) % k {
                        edges.push((i as Symbol + 1, j as Symbol + 1));
                    }
                }
            }
            ShiftSpace::new(k, edges).ok()
        })
}

/// Random Markov cover with a surjective one-block map onto 1..=k'.
pub fn sofic(max_k: usize) -> impl Strategy<Value = ShiftSpace> {
    markov(max_k)
        .prop_flat_map(|s| {
            let k = s.alphabet_size();
            (Just(s), 1..k, any::<u64>())
        })
        .prop_filter_map("bad map", |(s, images, seed)| {
            let k = s.alphabet_size();
            // Symbols 1..=images map to themselves; the rest are scattered.
            let map: Vec<Symbol> = (0..k)
                .map(|i| {
                    if i < images {
                        i as Symbol + 1
                    } else {
                        ((seed >> (i % 60)) as usize % images) as Symbol + 1
                    }
                })
                .collect();
            s.with_factor_map(map).ok()
        })
}

/// Depth-2 additive potential on the edges of `shift`, values in [-1, 1).
pub fn depth2(shift: &ShiftSpace, raw: &[f64]) -> WeightSystem {
    let mut values = HashMap::new();
    for (idx, (i, j)) in shift.edges().enumerate() {
        values.insert(vec![i, j], raw[idx % raw.len()]);
    }
    WeightSystem::additive(2, values, 0.0).unwrap()
}

pub fn depth1(k: usize, raw: &[f64]) -> WeightSystem {
    let values = (1..=k as Symbol).map(|s| (vec![s], raw[(s as usize - 1) % raw.len()])).collect();
    WeightSystem::additive(1, values, 0.0).unwrap()
}

/// Every word over `1..=k` of length `n`, lexicographic.
pub fn all_words(k: usize, n: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|w: Vec<Symbol>| {
                (1..=k as Symbol).map(move |s| {
                    let mut x = w.clone();
                    x.push(s);
                    x
                })
            })
            .collect();
    }
    out.into_iter().map(Word::from).collect()
}

pub fn weights() -> impl Strategy<Value = Vec<f64>> {
    proptest::collection::vec(-1.0f64..1.0, 16)
}
