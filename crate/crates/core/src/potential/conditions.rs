//! Empirical estimates of the regularity constants of a weight system on a
//! finite truncation: the (sub/super-)additivity defects, the gluing
//! constants `D, p, W` and the partial sums of `Z₁`.
//!
//! Everything is a finite scan. Nothing here certifies a property of the
//! untruncated shift.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::WeightSystem;
use crate::error::{Error, Result};
use crate::numeric::{log_gap, snap_zero, ExtReal, LogSum};
use crate::parallel;
use crate::shift::{FailureReport, LanguageAutomaton, ShiftSpace};
use crate::word::{Symbol, Word};

/// Cap on words visited by a single scan.
pub const WORD_BUDGET: u128 = 10_000_000;
/// Default cap on `(u, v)` pairs examined by [`estimate_c2`].
pub const PAIR_BUDGET: u128 = 4_000_000;
/// Relative tolerance under which two gaps count as tied.
const TIE_TOL: f64 = 1e-12;

fn check_word_budget(shift: &ShiftSpace, lengths: impl Iterator<Item = usize>) -> Result<u128> {
    let mut total: u128 = 0;
    for n in lengths {
        total = total.saturating_add(shift.count_words(n)?);
    }
    if total > WORD_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "word",
            count: total,
            cap: WORD_BUDGET,
        });
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectRow {
    pub n: usize,
    pub c_hat: ExtReal,
    pub c_lower_hat: ExtReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct DefectEstimate {
    pub n_max: usize,
    /// `max [eval(uv) − eval(u) − eval(v)]⁺` over `|u| + |v| ≤ n_max`.
    pub c_hat: ExtReal,
    /// `max [eval(u) + eval(v) − eval(uv)]⁺`.
    pub c_lower_hat: ExtReal,
    pub sub_additive: bool,
    pub almost_additive: bool,
    /// Running maxima by total length `|u| + |v|`.
    pub by_length: Vec<DefectRow>,
}

/// Sub- and super-additivity defects over all allowable `uv`,
/// `|u|, |v| ≥ 1`, `|u| + |v| ≤ n_max`.
pub fn subadditivity_defect(ws: &WeightSystem, shift: &ShiftSpace, n_max: usize) -> Result<DefectEstimate> {
    if n_max < 2 {
        return Err(Error::Degenerate("subadditivity_defect needs n_max >= 2".into()));
    }
    ws.check_compatible(shift)?;
    check_word_budget(shift, 2..=n_max)?;
    let ev = ws.evaluator(shift);
    let mut c_hat = 0.0f64;
    let mut c_low = 0.0f64;
    let mut by_length = Vec::new();
    for n in 2..=n_max {
        let parts = shift.fold_partitions(n, |visit| {
            let (mut hi, mut lo) = (0.0f64, 0.0f64);
            visit(&mut |x| {
                let whole = ev.eval(x);
                for i in 1..x.len() {
                    let parts = ev.eval(&x[..i]) + ev.eval(&x[i..]);
                    let Some(d) = log_gap(whole, parts) else {
                        continue;
                    };
                    let d = if d.is_finite() {
                        snap_zero(d, whole.abs() + parts.abs())
                    } else {
                        d
                    };
                    hi = hi.max(d);
                    lo = lo.max(-d);
                }
            });
            (hi, lo)
        })?;
        for (hi, lo) in parts {
            c_hat = c_hat.max(hi);
            c_low = c_low.max(lo);
        }
        by_length.push(DefectRow {
            n,
            c_hat: ExtReal(c_hat),
            c_lower_hat: ExtReal(c_low),
        });
    }
    Ok(DefectEstimate {
        n_max,
        c_hat: ExtReal(c_hat),
        c_lower_hat: ExtReal(c_low),
        sub_additive: c_hat == 0.0,
        almost_additive: c_hat.is_finite() && c_low.is_finite(),
        by_length,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct DEntry {
    pub n: usize,
    pub m: usize,
    /// `min_{|u|=n, |v|=m} max_w [eval(uwv) − eval(u) − eval(v)]`.
    pub log_d: ExtReal,
    /// `log_d / (n + m)`.
    pub trend: ExtReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct C2Estimate {
    pub n_max: usize,
    pub p_max: usize,
    pub log_d_hat: ExtReal,
    pub d_hat: ExtReal,
    pub p_hat: usize,
    pub w_hat: BTreeSet<Word>,
    pub d_table: Vec<DEntry>,
    pub failure: Option<FailureReport>,
    pub pairs_checked: usize,
    /// Pairs skipped because `f` vanishes on `[u]` or `[v]`.
    pub pairs_trivial: usize,
}

impl C2Estimate {
    /// Whether every pair was glued with a positive constant.
    pub fn satisfied(&self) -> bool {
        self.failure.is_none() && self.log_d_hat.0.is_finite()
    }
}

struct PairResult {
    n: usize,
    m: usize,
    gap: f64,
    w: Word,
}

enum URow {
    Done(Vec<PairResult>, usize),
    Failed(FailureReport),
}

/// Search, for every pair `|u|, |v| ≤ n_max`, the connector `|w| ≤ p_max`
/// maximizing `eval(uwv) − eval(u) − eval(v)`; lengths ascend from 0 and
/// the first maximizer in lexicographic order wins.
pub fn estimate_c2(
    ws: &WeightSystem,
    shift: &ShiftSpace,
    n_max: usize,
    p_max: usize,
    pair_cap: Option<u128>,
) -> Result<C2Estimate> {
    if n_max == 0 {
        return Err(Error::Degenerate("estimate_c2 needs n_max >= 1".into()));
    }
    ws.check_compatible(shift)?;
    let total = check_word_budget(shift, 1..=n_max)?;
    let cap = pair_cap.unwrap_or(PAIR_BUDGET);
    if total.saturating_mul(total) > cap {
        return Err(Error::BudgetExceeded {
            what: "(C2) pair",
            count: total.saturating_mul(total),
            cap,
        });
    }
    let auto = shift.automaton()?;
    let ev = ws.evaluator(shift);
    let words = crate::shift::words_up_to(shift, n_max)?;
    let evals: Vec<f64> = words.iter().map(|u| ev.eval(u.symbols())).collect();
    let states: Vec<u32> = words
        .iter()
        .map(|u| auto.run(LanguageAutomaton::START, u.symbols()).expect("enumerated"))
        .collect();

    // Candidate connectors per automaton state, in search order.
    let mut cands: BTreeMap<u32, Vec<(Vec<Symbol>, u32)>> = BTreeMap::new();
    for &q in &states {
        cands.entry(q).or_insert_with(|| {
            let mut out = Vec::new();
            for len in 0..=p_max {
                let mut buf = Vec::with_capacity(len);
                shift.visit_from(&auto, q, len, &mut buf, &mut |w, end| out.push((w.to_vec(), end)));
            }
            out
        });
    }

    let idx: Vec<usize> = (0..words.len()).collect();
    let rows = parallel::map_ordered(&idx, |&ui| {
        let u = &words[ui];
        let eu = evals[ui];
        let mut out = Vec::new();
        let mut trivial = 0;
        let cand = &cands[&states[ui]];
        for (vi, v) in words.iter().enumerate() {
            let evv = evals[vi];
            if eu == f64::NEG_INFINITY || evv == f64::NEG_INFINITY {
                trivial += 1;
                continue;
            }
            let parts = eu + evv;
            let mut best: Option<(f64, &[Symbol])> = None;
            let mut any = false;
            for (w, end) in cand {
                if auto.run(*end, v.symbols()).is_none() {
                    continue;
                }
                any = true;
                let whole = ev.eval(Word::join3(u.symbols(), w, v.symbols()).symbols());
                let gap = match log_gap(whole, parts) {
                    Some(g) if g.is_finite() => snap_zero(g, whole.abs() + parts.abs()),
                    Some(g) => g,
                    None => continue,
                };
                let better = match best {
                    None => true,
                    Some((b, _)) => gap > b + TIE_TOL * (1.0 + b.abs()),
                };
                if better {
                    best = Some((gap, w));
                }
            }
            if !any {
                return URow::Failed(FailureReport {
                    u: u.clone(),
                    v: v.clone(),
                    p_max,
                });
            }
            let (gap, w) = best.unwrap_or((f64::NEG_INFINITY, &[]));
            out.push(PairResult {
                n: u.len(),
                m: v.len(),
                gap,
                w: Word::from(w),
            });
        }
        URow::Done(out, trivial)
    });

    let mut log_d = f64::INFINITY;
    let mut p_hat = 0;
    let mut w_hat = BTreeSet::new();
    let mut table: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    let mut checked = 0;
    let mut trivial_total = 0;
    let mut failure = None;
    for row in rows {
        match row {
            URow::Failed(f) => {
                failure = Some(f);
                break;
            }
            URow::Done(results, trivial) => {
                trivial_total += trivial;
                for r in results {
                    checked += 1;
                    log_d = log_d.min(r.gap);
                    p_hat = p_hat.max(r.w.len());
                    let e = table.entry((r.n, r.m)).or_insert(f64::INFINITY);
                    *e = e.min(r.gap);
                    w_hat.insert(r.w);
                }
            }
        }
    }
    if checked == 0 {
        log_d = f64::NEG_INFINITY;
    }
    let d_table = table
        .into_iter()
        .map(|((n, m), g)| DEntry {
            n,
            m,
            log_d: ExtReal(g),
            trend: ExtReal(g / (n + m) as f64),
        })
        .collect();
    Ok(C2Estimate {
        n_max,
        p_max,
        log_d_hat: ExtReal(log_d),
        d_hat: ExtReal(log_d.exp()),
        p_hat,
        w_hat,
        d_table,
        failure,
        pairs_checked: checked,
        pairs_trivial: trivial_total,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct Z1Report {
    pub level: usize,
    /// `log Σ_{i ≤ j} exp(eval(i))` for `j = 1..=level`.
    pub log_partial_sums: Vec<ExtReal>,
    pub log_z1: ExtReal,
    /// Least-squares slope of `log term` against `log i` over the upper half.
    pub tail_exponent: Option<f64>,
    pub divergence_suspected: bool,
    pub tail_note: String,
}

/// Partial sums of `Z₁ = Σ_i exp(eval(i))` over visible symbols `1..=level`.
pub fn z1(ws: &WeightSystem, shift: &ShiftSpace, level: Option<usize>) -> Result<Z1Report> {
    ws.check_compatible(shift)?;
    let vk = shift.visible_alphabet_size();
    let level = level.unwrap_or(vk);
    if level == 0 || level > vk {
        return Err(Error::InvalidShift(format!("z1 level {level} outside 1..={vk}")));
    }
    let ev = ws.evaluator(shift);
    let terms: Vec<f64> = (1..=level as Symbol).map(|i| ev.eval(&[i])).collect();
    let mut acc = LogSum::new();
    let mut partial = Vec::with_capacity(level);
    for &t in &terms {
        acc.add(t);
        partial.push(ExtReal(acc.value()));
    }
    let tail: Vec<(f64, f64)> = (level / 2..level)
        .filter(|&i| terms[i].is_finite())
        .map(|i| (((i + 1) as f64).ln(), terms[i]))
        .collect();
    let (tail_exponent, divergence_suspected, tail_note) = if tail.len() < 4 {
        (
            None,
            false,
            format!("only {} finite tail terms; no tail assessment", tail.len()),
        )
    } else {
        let k = tail.len() as f64;
        let mx = tail.iter().map(|p| p.0).sum::<f64>() / k;
        let my = tail.iter().map(|p| p.1).sum::<f64>() / k;
        let sxy: f64 = tail.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = tail.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
        let suspected = slope >= -1.0;
        let note = if suspected {
            format!("tail terms decay like i^{slope:.3}; divergence suspected as the truncation grows")
        } else {
            format!("tail terms decay like i^{slope:.3}; consistent with a finite Z1")
        };
        (Some(slope), suspected, note)
    };
    Ok(Z1Report {
        level,
        log_z1: ExtReal(acc.value()),
        log_partial_sums: partial,
        tail_exponent,
        divergence_suspected,
        tail_note,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionEstimate {
    pub defect: DefectEstimate,
    pub c2: C2Estimate,
    pub z1: Z1Report,
}

/// Defects, gluing constants and `Z₁` in one pass.
pub fn estimate_conditions(
    ws: &WeightSystem,
    shift: &ShiftSpace,
    defect_n_max: usize,
    c2_n_max: usize,
    p_max: usize,
) -> Result<ConditionEstimate> {
    Ok(ConditionEstimate {
        defect: subadditivity_defect(ws, shift, defect_n_max)?,
        c2: estimate_c2(ws, shift, c2_n_max, p_max, None)?,
        z1: z1(ws, shift, None)?,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct C3Level {
    pub level: usize,
    pub skipped: Option<String>,
    pub log_d_hat: Option<ExtReal>,
    pub w_size: Option<usize>,
    pub p_hat: Option<usize>,
    pub failure: Option<FailureReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct C3Scan {
    pub n_max: usize,
    pub p_max: usize,
    pub levels: Vec<C3Level>,
    /// No sign that the connector set must grow without bound.
    pub finite: bool,
    pub note: String,
}

/// Run [`estimate_c2`] at every ladder level and look for the two ways a
/// finite connector set can fail to exist: the chosen set keeps growing, or
/// the gluing constant keeps shrinking.
///
/// With at least three assessed levels the scan fails when `|W_hat|`
/// strictly increases at every step or `D_hat` strictly decreases at every
/// step; it also fails when some level has a pair with no connector.
pub fn c3_scan(ws: &WeightSystem, shift: &ShiftSpace, n_max: usize, p_max: usize) -> Result<C3Scan> {
    let ladder = shift.ladder().to_vec();
    if ladder.is_empty() {
        return Err(Error::InvalidShift("c3 scan needs a ladder".into()));
    }
    let mut levels = Vec::new();
    for &l in &ladder {
        let t = match shift.truncate(l) {
            Ok(t) => t,
            Err(e) => {
                levels.push(C3Level {
                    level: l,
                    skipped: Some(e.to_string()),
                    log_d_hat: None,
                    w_size: None,
                    p_hat: None,
                    failure: None,
                });
                continue;
            }
        };
        if !t.is_irreducible() {
            levels.push(C3Level {
                level: l,
                skipped: Some("truncation is reducible".into()),
                log_d_hat: None,
                w_size: None,
                p_hat: None,
                failure: None,
            });
            continue;
        }
        let est = estimate_c2(ws, &t, n_max, p_max, None)?;
        levels.push(C3Level {
            level: l,
            skipped: None,
            log_d_hat: Some(est.log_d_hat),
            w_size: Some(est.w_hat.len()),
            p_hat: Some(est.p_hat),
            failure: est.failure,
        });
    }
    let assessed: Vec<&C3Level> = levels.iter().filter(|l| l.skipped.is_none()).collect();
    let (finite, note) = if let Some(f) = assessed.iter().find(|l| l.failure.is_some()) {
        (
            false,
            format!("level {}: some pair has no connector of length <= {p_max}", f.level),
        )
    } else if assessed.len() < 3 {
        (
            true,
            format!("only {} assessed levels; growth trend not assessed", assessed.len()),
        )
    } else {
        let ws_sizes: Vec<usize> = assessed.iter().map(|l| l.w_size.unwrap()).collect();
        let ds: Vec<f64> = assessed.iter().map(|l| l.log_d_hat.unwrap().0).collect();
        let w_grows = ws_sizes.windows(2).all(|p| p[1] > p[0]);
        let d_shrinks = ds
            .windows(2)
            .all(|p| p[1] < p[0] - 1e-9 * (1.0 + p[0].abs()) || p[1] == f64::NEG_INFINITY);
        match (w_grows, d_shrinks) {
            (true, _) => (false, "connector set grows at every ladder step".into()),
            (_, true) => (false, "gluing constant shrinks at every ladder step".into()),
            _ => (true, "connector set and gluing constant stabilise along the ladder".into()),
        }
    };
    Ok(C3Scan {
        n_max,
        p_max,
        levels,
        finite,
        note,
    })
}
