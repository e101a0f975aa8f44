//! Partition sums, two-sided pressure brackets, Gurevich sums and the
//! truncation ladder.
//!
//! For a fixed truncation with sub-additivity constant `C` and gluing data
//! `D, p`, every `n` gives
//!
//! ```text
//! (log Z_n + log C₁)/n  ≤  P  ≤  (log Z_n + C)/n,
//! C₁ = D / (e^{Cp} K (p + 1)),   K = max(1, Z₁^p).
//! ```
//!
//! The reported `p_best` intersects these intervals over all computed `n`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{ExtReal, LogSum};
use crate::potential::{
    estimate_c2, subadditivity_defect, z1, C2Estimate, WeightSystem, Z1Report, WORD_BUDGET,
};
use crate::shift::ShiftSpace;
use crate::transfer;
use crate::word::Symbol;

/// `log Z_k(F)` for `k = 1..=n_max`.
///
/// Uses the transfer DP when the weights have a local form, otherwise
/// enumerates `B_k` (at most [`WORD_BUDGET`] words in total).
pub fn log_partition_series(ws: &WeightSystem, shift: &ShiftSpace, n_max: usize) -> Result<Vec<f64>> {
    ws.check_compatible(shift)?;
    if let Some(form) = ws.transfer_form(shift) {
        return transfer::log_partition_series(&form, shift, n_max);
    }
    check_budget(shift, n_max)?;
    let ev = ws.evaluator(shift);
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let parts = shift.fold_partitions(n, |visit| {
            let mut acc = LogSum::new();
            visit(&mut |w| acc.add(ev.eval(w)));
            acc
        })?;
        let mut total = LogSum::new();
        for p in &parts {
            total.merge(p);
        }
        out.push(total.value());
    }
    Ok(out)
}

fn check_budget(shift: &ShiftSpace, n_max: usize) -> Result<()> {
    let mut total: u128 = 0;
    for n in 1..=n_max {
        total = total.saturating_add(shift.count_words(n)?);
    }
    if total > WORD_BUDGET {
        return Err(Error::BudgetExceeded {
            what: "word",
            count: total,
            cap: WORD_BUDGET,
        });
    }
    Ok(())
}

/// `log Z_n(F) = log Σ_{w ∈ B_n} exp(eval(w))`.
pub fn log_partition(ws: &WeightSystem, shift: &ShiftSpace, n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::Degenerate("log_partition needs n >= 1".into()));
    }
    Ok(log_partition_series(ws, shift, n)?[n - 1])
}

/// `log Z_k(F, a)` for `k = 1..=n_max`.
pub fn gurevich_series(
    ws: &WeightSystem,
    shift: &ShiftSpace,
    a: Symbol,
    n_max: usize,
) -> Result<Vec<f64>> {
    ws.check_compatible(shift)?;
    if let Some(form) = ws.transfer_form(shift) {
        match transfer::gurevich_series(&form, shift, a, n_max) {
            Err(Error::BudgetExceeded { .. }) => {}
            other => return other,
        }
    }
    check_budget(shift, n_max)?;
    let ev = ws.evaluator(shift);
    let mut out = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        let mut acc = LogSum::new();
        for w in shift.periodic_words(n, a)? {
            acc.add(ev.eval(w.symbols()));
        }
        out.push(acc.value());
    }
    Ok(out)
}

/// `log Z_n(F, a)`: periodic words of length `n` through `a`; `-inf` when
/// there are none.
pub fn gurevich_log_sum(ws: &WeightSystem, shift: &ShiftSpace, n: usize, a: Symbol) -> Result<f64> {
    if n == 0 {
        return Err(Error::Degenerate("gurevich_log_sum needs n >= 1".into()));
    }
    Ok(gurevich_series(ws, shift, a, n)?[n - 1])
}

/// Constants feeding the bracket.
#[derive(Clone, Debug, Serialize)]
pub struct BracketConstants {
    /// Sub-additivity constant `C` (declared, else estimated).
    pub c: ExtReal,
    pub c_source: &'static str,
    /// `log D`; `None` when no gluing certificate is available.
    pub log_d: Option<ExtReal>,
    pub p: usize,
    pub log_z1: ExtReal,
    /// `log C₁`; `None` when the lower bound is unavailable.
    pub log_c1: Option<ExtReal>,
}

impl BracketConstants {
    pub fn new(c: f64, c_source: &'static str, log_d: Option<f64>, p: usize, log_z1: f64) -> Self {
        let log_c1 = log_d.filter(|d| d.is_finite()).and_then(|d| {
            let log_k = p as f64 * log_z1.max(0.0);
            let v = d - c * p as f64 - log_k - ((p + 1) as f64).ln();
            v.is_finite().then_some(v)
        });
        BracketConstants {
            c: ExtReal(c),
            c_source,
            log_d: log_d.map(ExtReal),
            p,
            log_z1: ExtReal(log_z1),
            log_c1: log_c1.map(ExtReal),
        }
    }
}

/// `(lower_n, upper_n)` from `log Z_n`.
pub fn pressure_bracket(log_z: f64, n: usize, k: &BracketConstants) -> (Option<f64>, f64) {
    let n = n as f64;
    let upper = (log_z + k.c.0) / n;
    let lower = k.log_c1.map(|c1| (log_z + c1.0) / n);
    (lower, upper)
}

#[derive(Clone, Debug, Serialize)]
pub struct PressureRow {
    pub n: usize,
    pub log_z: ExtReal,
    pub upper: ExtReal,
    pub lower: Option<ExtReal>,
}

#[derive(Clone, Debug, Serialize)]
pub struct GurevichRow {
    pub n: usize,
    pub a: Symbol,
    pub log_z: ExtReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct LadderRow {
    pub level: usize,
    pub skipped: Option<String>,
    pub log_z: Option<ExtReal>,
    /// `log Z_n / n` at the level.
    pub estimate: Option<ExtReal>,
    pub upper: Option<ExtReal>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PressureStatus {
    Finite,
    SuspectedInfinite,
    SuspectedMinusInfinite,
}

#[derive(Clone, Debug, Serialize)]
pub struct Interval {
    pub lower: Option<ExtReal>,
    pub upper: ExtReal,
}

impl Interval {
    pub fn midpoint(&self) -> f64 {
        match self.lower {
            Some(l) => 0.5 * (l.0 + self.upper.0),
            None => self.upper.0,
        }
    }

    pub fn half_width(&self) -> f64 {
        match self.lower {
            Some(l) => 0.5 * (self.upper.0 - l.0),
            None => f64::INFINITY,
        }
    }

    pub fn contains(&self, x: f64, tol: f64) -> bool {
        x <= self.upper.0 + tol && self.lower.is_none_or(|l| l.0 - tol <= x)
    }

    pub fn overlaps(&self, other: &Interval, tol: f64) -> bool {
        let lo = |i: &Interval| i.lower.map_or(f64::NEG_INFINITY, |l| l.0);
        lo(self) <= other.upper.0 + tol && lo(other) <= self.upper.0 + tol
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PressureReport {
    pub potential: String,
    pub regime: &'static str,
    pub constants: BracketConstants,
    pub per_n: Vec<PressureRow>,
    pub gurevich_per_n: Vec<GurevichRow>,
    pub ladder: Vec<LadderRow>,
    pub p_best: Interval,
    pub status: PressureStatus,
    pub z1: Z1Report,
    pub c2: Option<C2Estimate>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PressureOptions {
    pub n_max: usize,
    pub anchors: Vec<Symbol>,
    /// Word length bound for the defect scan (when `C` is not declared).
    pub defect_n_max: usize,
    /// Word length bound for the gluing scan.
    pub c2_n_max: usize,
    pub p_max: usize,
    /// `n` used at every ladder level.
    pub ladder_n: usize,
}

impl Default for PressureOptions {
    fn default() -> Self {
        PressureOptions {
            n_max: 20,
            anchors: Vec::new(),
            defect_n_max: 8,
            c2_n_max: 3,
            p_max: 2,
            ladder_n: 10,
        }
    }
}

/// Sub-additivity constant, gluing constants and `Z₁` for a truncation.
pub fn bracket_constants(
    ws: &WeightSystem,
    shift: &ShiftSpace,
    opts: &PressureOptions,
) -> Result<(BracketConstants, Z1Report, Option<C2Estimate>, Vec<String>)> {
    let mut notes = Vec::new();
    let (c, source) = match (ws.declared_c(), ws.structural_c()) {
        (Some(c), _) => (c, "declared"),
        (None, Some(c)) => (c, "structural"),
        (None, None) => {
            // Longest scan that fits the word budget.
            let mut n = opts.defect_n_max.max(2);
            let mut words: u128 = (2..=n).map(|k| shift.count_words(k)).sum::<Result<u128>>()?;
            while n > 2 && words > WORD_BUDGET {
                words -= shift.count_words(n)?;
                n -= 1;
            }
            let d = subadditivity_defect(ws, shift, n)?;
            notes.push(format!("C estimated from words of total length <= {n}"));
            (d.c_hat.0, "estimated")
        }
    };
    let z = z1(ws, shift, None)?;
    let c2 = match estimate_c2(ws, shift, opts.c2_n_max, opts.p_max, None) {
        Ok(e) => Some(e),
        Err(Error::BudgetExceeded { what, count, cap }) => {
            notes.push(format!(
                "gluing scan skipped: {what} budget exceeded ({count} > {cap}); lower bounds unavailable"
            ));
            None
        }
        Err(e) => return Err(e),
    };
    let (log_d, p) = match &c2 {
        Some(e) if e.satisfied() => (Some(e.log_d_hat.0), e.p_hat),
        Some(e) => {
            if let Some(f) = &e.failure {
                notes.push(format!(
                    "no connector of length <= {} for ({}, {}); lower bounds unavailable",
                    f.p_max, f.u, f.v
                ));
            }
            (None, 0)
        }
        None => (None, 0),
    };
    Ok((BracketConstants::new(c, source, log_d, p, z.log_z1.0), z, c2, notes))
}

/// Brackets at every ladder level, using `log Z_n / n` at `n = ladder_n`.
pub fn approximation_ladder(ws: &WeightSystem, shift: &ShiftSpace, n: usize) -> Result<Vec<LadderRow>> {
    if shift.ladder().is_empty() {
        return Err(Error::InvalidShift("shift has no ladder".into()));
    }
    let c = ws.declared_c();
    let mut rows = Vec::new();
    for &l in shift.ladder() {
        let skipped = |why: String| LadderRow {
            level: l,
            skipped: Some(why),
            log_z: None,
            estimate: None,
            upper: None,
        };
        let t = match shift.truncate(l) {
            Ok(t) => t,
            Err(e) => {
                rows.push(skipped(e.to_string()));
                continue;
            }
        };
        if !t.is_irreducible() {
            rows.push(skipped("truncation is reducible".into()));
            continue;
        }
        let lz = log_partition(ws, &t, n)?;
        rows.push(LadderRow {
            level: l,
            skipped: None,
            log_z: Some(ExtReal(lz)),
            estimate: Some(ExtReal(lz / n as f64)),
            upper: c.map(|c| ExtReal((lz + c) / n as f64)),
        });
    }
    if rows.iter().all(|r| r.skipped.is_some()) {
        return Err(Error::Condition("every ladder level is reducible".into()));
    }
    Ok(rows)
}

/// Full report: per-`n` brackets, Gurevich sums, ladder and status.
pub fn pressure_report(ws: &WeightSystem, shift: &ShiftSpace, opts: &PressureOptions) -> Result<PressureReport> {
    if opts.n_max == 0 {
        return Err(Error::Degenerate("pressure report needs n_max >= 1".into()));
    }
    let (constants, z, c2, mut notes) = bracket_constants(ws, shift, opts)?;
    let series = log_partition_series(ws, shift, opts.n_max)?;
    let mut per_n = Vec::with_capacity(series.len());
    let mut best_lo = f64::NEG_INFINITY;
    let mut best_hi = f64::INFINITY;
    for (i, &lz) in series.iter().enumerate() {
        let n = i + 1;
        let (lo, hi) = pressure_bracket(lz, n, &constants);
        if let Some(lo) = lo {
            best_lo = best_lo.max(lo);
        }
        best_hi = best_hi.min(hi);
        per_n.push(PressureRow {
            n,
            log_z: ExtReal(lz),
            upper: ExtReal(hi),
            lower: lo.map(ExtReal),
        });
    }
    if best_lo > best_hi {
        if best_lo - best_hi <= 1e-12 * (1.0 + best_hi.abs()) {
            // Rounding only; the bracket has collapsed to a point.
            best_lo = best_hi;
        } else {
            notes.push("bracket is empty: the estimated constants are not valid bounds".into());
        }
    }
    let p_best = Interval {
        lower: constants.log_c1.map(|_| ExtReal(best_lo)),
        upper: ExtReal(best_hi),
    };

    let mut gurevich_per_n = Vec::new();
    for &a in &opts.anchors {
        let g = gurevich_series(ws, shift, a, opts.n_max)?;
        for (i, v) in g.into_iter().enumerate() {
            gurevich_per_n.push(GurevichRow {
                n: i + 1,
                a,
                log_z: ExtReal(v),
            });
        }
    }

    let ladder = if shift.ladder().is_empty() {
        Vec::new()
    } else {
        approximation_ladder(ws, shift, opts.ladder_n)?
    };

    let status = if series.iter().any(|&v| v == f64::NEG_INFINITY) {
        PressureStatus::SuspectedMinusInfinite
    } else {
        let est: Vec<f64> = ladder.iter().filter_map(|r| r.estimate.map(|e| e.0)).collect();
        let growing = est.len() >= 2 && est.windows(2).all(|p| p[1] > p[0] + 1e-12);
        if z.divergence_suspected && growing {
            PressureStatus::SuspectedInfinite
        } else {
            PressureStatus::Finite
        }
    };
    if ws.regime() != "exact" {
        notes.push(format!(
            "cylinder weights carry a Bowen slack of log M = {}",
            ws.declared_m().ln()
        ));
    }
    Ok(PressureReport {
        potential: ws.describe(),
        regime: ws.regime(),
        constants,
        per_n,
        gurevich_per_n,
        ladder,
        p_best,
        status,
        z1: z,
        c2,
        notes,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareRow {
    pub n: usize,
    /// `|(1/n) log Z_n(F, a) − (1/n) log Z_n(F)|` per anchor.
    pub per_anchor: Vec<ExtReal>,
    pub max: ExtReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct CompareReport {
    pub anchors: Vec<Symbol>,
    pub rows: Vec<CompareRow>,
    /// `max` is nonincreasing over the rows with `n ≥ n_from`.
    pub nonincreasing: bool,
    pub final_max: ExtReal,
    pub pass: bool,
}

/// Discrepancy between Gurevich and partition-sum growth rates over
/// `n_from..=n_to`; passes when nonincreasing and at most `tol` at `n_to`.
pub fn pressure_compare(
    ws: &WeightSystem,
    shift: &ShiftSpace,
    n_from: usize,
    n_to: usize,
    anchors: &[Symbol],
    tol: f64,
) -> Result<CompareReport> {
    if n_from == 0 || n_from > n_to || anchors.is_empty() {
        return Err(Error::Degenerate("pressure_compare needs 1 <= n_from <= n_to and anchors".into()));
    }
    let z = log_partition_series(ws, shift, n_to)?;
    let gs: Vec<Vec<f64>> = anchors
        .iter()
        .map(|&a| gurevich_series(ws, shift, a, n_to))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for n in n_from..=n_to {
        let zn = z[n - 1] / n as f64;
        let per: Vec<f64> = gs
            .iter()
            .map(|g| {
                let v = g[n - 1];
                if v == f64::NEG_INFINITY {
                    f64::INFINITY
                } else {
                    (v / n as f64 - zn).abs()
                }
            })
            .collect();
        let max = per.iter().copied().fold(0.0f64, f64::max);
        rows.push(CompareRow {
            n,
            per_anchor: per.into_iter().map(ExtReal).collect(),
            max: ExtReal(max),
        });
    }
    // Every anchor's discrepancy must be nonincreasing, not just the max.
    let nonincreasing = (0..anchors.len()).all(|j| {
        rows.windows(2)
            .all(|p| p[1].per_anchor[j].0 <= p[0].per_anchor[j].0 + 1e-12)
    });
    let final_max = rows.last().map(|r| r.max).unwrap_or(ExtReal(f64::NAN));
    Ok(CompareReport {
        anchors: anchors.to_vec(),
        pass: nonincreasing && final_max.0 <= tol,
        rows,
        nonincreasing,
        final_max,
    })
}
