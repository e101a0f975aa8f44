//! Dynamic-programming partition sums for weight systems with a
//! [`TransferForm`].
//!
//! `Z_n` for a visible form is a forward pass over the language automaton;
//! for a cover form it is a forward pass over the cover graph, since every
//! cover path has exactly one visible image. Periodic sums track, for each
//! visible prefix, the set of `(first, last)` cover symbols of its preimage
//! paths: `w·w` is allowable iff two of those paths can be chained.
//!
//! Passes are sequential so results do not depend on the thread count.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::numeric::LogSum;
use crate::potential::{LocalForm, TransferForm};
use crate::shift::{LanguageAutomaton, ShiftSpace};
use crate::word::Symbol;

/// Cap on distinct `(first, last)` patterns in a periodic pass.
pub const PATTERN_CAP: usize = 200_000;

/// `log Z_k` for `k = 1..=n_max`, offsets included.
pub fn log_partition_series(form: &TransferForm, shift: &ShiftSpace, n_max: usize) -> Result<Vec<f64>> {
    let raw = match form {
        TransferForm::Visible(l) => visible_series(l, shift, n_max)?,
        TransferForm::Cover(l) => cover_series(l, shift, n_max),
    };
    let l = local(form);
    Ok(raw
        .into_iter()
        .enumerate()
        .map(|(i, v)| v + l.offset.at(i + 1))
        .collect())
}

fn local(form: &TransferForm) -> &LocalForm {
    match form {
        TransferForm::Visible(l) | TransferForm::Cover(l) => l,
    }
}

fn visible_series(l: &LocalForm, shift: &ShiftSpace, n_max: usize) -> Result<Vec<f64>> {
    let auto = shift.automaton()?;
    let ns = auto.num_states();
    let mut cur = vec![f64::NEG_INFINITY; ns];
    cur[LanguageAutomaton::START as usize] = 0.0;
    let mut out = Vec::with_capacity(n_max);
    for _ in 0..n_max {
        let mut next: Vec<LogSum> = vec![LogSum::new(); ns];
        for (q, &v) in cur.iter().enumerate() {
            if v == f64::NEG_INFINITY {
                continue;
            }
            let prev = auto.last_symbol(q as u32);
            for &(b, r) in auto.transitions(q as u32) {
                let mut x = v + l.node(b);
                if prev != 0 {
                    x += l.pair(prev, b);
                }
                next[r as usize].add(x);
            }
        }
        cur = next.iter().map(LogSum::value).collect();
        let mut total = LogSum::new();
        for &v in &cur {
            total.add(v);
        }
        out.push(total.value());
    }
    Ok(out)
}

fn cover_series(l: &LocalForm, shift: &ShiftSpace, n_max: usize) -> Vec<f64> {
    let k = shift.alphabet_size();
    let mut cur: Vec<f64> = (1..=k as Symbol).map(|s| l.node(s)).collect();
    let mut out = Vec::with_capacity(n_max);
    for step in 0..n_max {
        if step > 0 {
            let mut next: Vec<LogSum> = vec![LogSum::new(); k];
            for (si, &v) in cur.iter().enumerate() {
                if v == f64::NEG_INFINITY {
                    continue;
                }
                let s = si as Symbol + 1;
                for &t in shift.successors(s) {
                    next[t as usize - 1].add(v + l.pair(s, t) + l.node(t));
                }
            }
            cur = next.iter().map(LogSum::value).collect();
        }
        let mut total = LogSum::new();
        for &v in &cur {
            total.add(v);
        }
        out.push(total.value());
    }
    out
}

type Pattern = Vec<(Symbol, Symbol)>;

/// Accumulated weight of all words sharing a pattern.
enum Acc {
    /// Visible forms: one value for the whole word.
    Scalar(LogSum),
    /// Cover forms: one value per `(first, last)` pair of the pattern.
    PerPair(Vec<LogSum>),
}

/// `log Z_k(F, a)` for `k = 1..=n_max`: the sum of `exp(eval(w))` over
/// words `w` of length `k` with `w₁ = a` and `w·w` allowable.
pub fn gurevich_series(
    form: &TransferForm,
    shift: &ShiftSpace,
    a: Symbol,
    n_max: usize,
) -> Result<Vec<f64>> {
    let vk = shift.visible_alphabet_size();
    if a == 0 || a as usize > vk {
        return Err(Error::InvalidWord(a.to_string(), format!("anchor outside 1..={vk}")));
    }
    let l = local(form);
    let cover = matches!(form, TransferForm::Cover(_));
    let fiber: Vec<Symbol> = match shift.factor_map() {
        Some(f) => f.fiber(a),
        None => vec![a],
    };

    let mut layer: BTreeMap<Pattern, Acc> = BTreeMap::new();
    let start: Pattern = fiber.iter().map(|&s| (s, s)).collect();
    let acc = if cover {
        Acc::PerPair(
            fiber
                .iter()
                .map(|&s| {
                    let mut x = LogSum::new();
                    x.add(l.node(s));
                    x
                })
                .collect(),
        )
    } else {
        let mut x = LogSum::new();
        x.add(l.node(a));
        Acc::Scalar(x)
    };
    layer.insert(start, acc);

    let mut out = Vec::with_capacity(n_max);
    for step in 1..=n_max {
        if step > 1 {
            layer = advance(&layer, shift, l)?;
        }
        let mut total = LogSum::new();
        for (pat, acc) in &layer {
            if !closes(shift, pat) {
                continue;
            }
            match acc {
                Acc::Scalar(x) => total.add(x.value()),
                Acc::PerPair(xs) => xs.iter().for_each(|x| total.add(x.value())),
            }
        }
        out.push(total.value() + l.offset.at(step));
    }
    Ok(out)
}

fn closes(shift: &ShiftSpace, pat: &Pattern) -> bool {
    pat.iter()
        .any(|&(_, t)| pat.iter().any(|&(s, _)| shift.has_edge(t, s)))
}

fn advance(
    layer: &BTreeMap<Pattern, Acc>,
    shift: &ShiftSpace,
    l: &LocalForm,
) -> Result<BTreeMap<Pattern, Acc>> {
    let mut next: BTreeMap<Pattern, Acc> = BTreeMap::new();
    // Successor pairs bucketed by the visible symbol read.
    let mut by_symbol: BTreeMap<Symbol, Vec<(usize, Symbol, Symbol)>> = BTreeMap::new();
    for (pat, acc) in layer {
        by_symbol.clear();
        for (pi, &(s, t)) in pat.iter().enumerate() {
            for &u in shift.successors(t) {
                by_symbol.entry(shift.image(u)).or_default().push((pi, s, u));
            }
        }
        let prev_visible = shift.image(pat[0].1);
        for (&b, moves) in &by_symbol {
            let mut new_pat: Pattern = moves.iter().map(|&(_, s, u)| (s, u)).collect();
            new_pat.sort_unstable();
            new_pat.dedup();
            if !next.contains_key(&new_pat) && next.len() >= PATTERN_CAP {
                return Err(Error::BudgetExceeded {
                    what: "periodic pattern",
                    count: next.len() as u128 + 1,
                    cap: PATTERN_CAP as u128,
                });
            }
            match acc {
                Acc::Scalar(x) => {
                    let v = x.value() + l.node(b) + l.pair(prev_visible, b);
                    let entry = next
                        .entry(new_pat)
                        .or_insert_with(|| Acc::Scalar(LogSum::new()));
                    if let Acc::Scalar(e) = entry {
                        e.add(v);
                    }
                }
                Acc::PerPair(xs) => {
                    let n = new_pat.len();
                    let entry = next
                        .entry(new_pat.clone())
                        .or_insert_with(|| Acc::PerPair(vec![LogSum::new(); n]));
                    if let Acc::PerPair(es) = entry {
                        for &(pi, s, u) in moves {
                            let (_, t) = pat[pi];
                            let idx = new_pat.binary_search(&(s, u)).expect("pair in pattern");
                            es[idx].add(xs[pi].value() + l.pair(t, u) + l.node(u));
                        }
                    }
                }
            }
        }
    }
    Ok(next)
}
