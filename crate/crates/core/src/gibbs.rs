//! Finite-truncation Gibbs measures: the normalized cylinder weights `ν_l`,
//! their Cesàro averages, and the checks run against them (Gibbs ratios,
//! the mixing inequality, entropy and energy).
//!
//! Measures are exact tables over `B_l`; every pullback is an exact sum.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{ExtReal, LogSum};
use crate::potential::WeightSystem;
use crate::pressure::Interval;
use crate::shift::ShiftSpace;
use crate::word::{Symbol, Word};

/// Largest table a measure may hold.
pub const TABLE_CAP: u128 = 4_000_000;

/// Probability weights on words of one length, in lexicographic order.
///
/// Only words of positive mass need be listed; the mass of a shorter
/// cylinder is the sum over its extensions.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CylinderMeasure {
    depth: usize,
    words: Vec<Word>,
    masses: Vec<f64>,
}

impl CylinderMeasure {
    /// Table from `(word, mass)` pairs; words must share length `depth` and
    /// masses must be nonnegative with total 1 (within `1e-9`).
    pub fn new(depth: usize, mut entries: Vec<(Word, f64)>) -> Result<Self> {
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        if entries.windows(2).any(|p| p[0].0 == p[1].0) {
            return Err(Error::Degenerate("duplicate word in measure table".into()));
        }
        if let Some((w, _)) = entries.iter().find(|(w, _)| w.len() != depth) {
            return Err(Error::DimensionMismatch(format!("word {w} in a depth-{depth} measure")));
        }
        if entries.iter().any(|(_, m)| !(*m >= 0.0 && m.is_finite())) {
            return Err(Error::Degenerate("masses must be finite and nonnegative".into()));
        }
        let total: f64 = entries.iter().map(|e| e.1).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::Degenerate(format!("total mass {total}, expected 1")));
        }
        let (words, masses) = entries.into_iter().unzip();
        Ok(CylinderMeasure { depth, words, masses })
    }

    fn from_sorted(depth: usize, words: Vec<Word>, masses: Vec<f64>) -> Self {
        CylinderMeasure { depth, words, masses }
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.masses.iter().sum()
    }

    /// Index range of the words starting with `u` (contiguous by ordering).
    fn prefix_range(&self, u: &[Symbol]) -> std::ops::Range<usize> {
        let lo = self.words.partition_point(|w| &w.symbols()[..u.len()] < u);
        let hi = self.words.partition_point(|w| &w.symbols()[..u.len()] <= u);
        lo..hi
    }

    /// `m([u])` for `|u| ≤ depth`.
    pub fn mass_of(&self, u: &[Symbol]) -> Result<f64> {
        if u.len() > self.depth {
            return Err(Error::Degenerate(format!(
                "cylinder of length {} deeper than measure depth {}",
                u.len(),
                self.depth
            )));
        }
        Ok(self.masses[self.prefix_range(u)].iter().sum())
    }

    /// Depth-`k` marginal.
    pub fn marginal(&self, k: usize) -> Result<CylinderMeasure> {
        if k > self.depth {
            return Err(Error::Degenerate(format!(
                "marginal depth {k} exceeds measure depth {}",
                self.depth
            )));
        }
        let mut words: Vec<Word> = Vec::new();
        let mut masses: Vec<f64> = Vec::new();
        for (w, &m) in self.words.iter().zip(&self.masses) {
            let p = &w.symbols()[..k];
            if words.last().is_some_and(|l| l.symbols() == p) {
                *masses.last_mut().unwrap() += m;
            } else {
                words.push(Word::from(p));
                masses.push(m);
            }
        }
        Ok(CylinderMeasure::from_sorted(k, words, masses))
    }

    /// Largest `|m([w]) − m'([w])|` summed over words (total variation × 2).
    pub fn l1_distance(&self, other: &CylinderMeasure) -> Result<f64> {
        if self.depth != other.depth {
            return Err(Error::DimensionMismatch("measures of different depth".into()));
        }
        let mut all: BTreeMap<&Word, (f64, f64)> = BTreeMap::new();
        for (w, &m) in self.words.iter().zip(&self.masses) {
            all.entry(w).or_default().0 = m;
        }
        for (w, &m) in other.words.iter().zip(&other.masses) {
            all.entry(w).or_default().1 = m;
        }
        Ok(all.values().map(|(a, b)| (a - b).abs()).sum())
    }
}

/// `ν_l([w]) = exp(eval(w)) / α_l` over `B_l`.
pub fn build_nu(ws: &WeightSystem, shift: &ShiftSpace, l: usize) -> Result<CylinderMeasure> {
    if l == 0 {
        return Err(Error::Degenerate("build_nu needs l >= 1".into()));
    }
    ws.check_compatible(shift)?;
    let count = shift.count_words(l)?;
    if count > TABLE_CAP {
        return Err(Error::BudgetExceeded {
            what: "measure table",
            count,
            cap: TABLE_CAP,
        });
    }
    let ev = ws.evaluator(shift);
    let parts = shift.fold_partitions(l, |visit| {
        let mut out = Vec::new();
        visit(&mut |w| out.push((Word::from(w), ev.eval(w))));
        out
    })?;
    let entries: Vec<(Word, f64)> = parts.into_iter().flatten().collect();
    let mut alpha = LogSum::new();
    for (_, v) in &entries {
        alpha.add(*v);
    }
    let log_alpha = alpha.value();
    if log_alpha == f64::NEG_INFINITY {
        return Err(Error::Degenerate("every cylinder weight vanishes".into()));
    }
    let (words, masses) = entries
        .into_iter()
        .filter(|(_, v)| *v > f64::NEG_INFINITY)
        .map(|(w, v)| (w, (v - log_alpha).exp()))
        .unzip();
    Ok(CylinderMeasure::from_sorted(l, words, masses))
}

/// `μ_n([u]) = (1/n) Σ_{i=1}^{n} ν(σ^{-i}[u])` at depth `l − n`.
pub fn cesaro_average(nu: &CylinderMeasure, n_steps: usize) -> Result<CylinderMeasure> {
    if n_steps == 0 || n_steps >= nu.depth {
        return Err(Error::Degenerate(format!(
            "cesaro steps must lie in 1..{}, got {n_steps}",
            nu.depth
        )));
    }
    let d = nu.depth - n_steps;
    let mut acc: BTreeMap<&[Symbol], f64> = BTreeMap::new();
    for i in 1..=n_steps {
        for (w, &m) in nu.words.iter().zip(&nu.masses) {
            *acc.entry(&w.symbols()[i..i + d]).or_insert(0.0) += m;
        }
    }
    let scale = 1.0 / n_steps as f64;
    let (words, masses) = acc
        .into_iter()
        .map(|(w, m)| (Word::from(w), m * scale))
        .unzip();
    Ok(CylinderMeasure::from_sorted(d, words, masses))
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioRow {
    pub n: usize,
    pub min_ratio: ExtReal,
    pub max_ratio: ExtReal,
    /// `max(max_ratio, 1/min_ratio)`.
    pub c0: ExtReal,
    pub cylinders: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct RatioReport {
    pub p_used: f64,
    pub p_half_width: ExtReal,
    pub rows: Vec<RatioRow>,
    /// Largest per-`n` constant.
    pub c0: ExtReal,
    /// `c0 · e^{n_max · half_width}`: the constant allowing for any `P` in
    /// the bracket.
    pub c0_with_uncertainty: ExtReal,
}

/// Ratios `m([w]) e^{nP} / exp(eval(w))` over positive-mass cylinders,
/// `n = 1..=n_max`, with `P` the bracket midpoint.
pub fn gibbs_ratio_report(
    m: &CylinderMeasure,
    ws: &WeightSystem,
    shift: &ShiftSpace,
    p: &Interval,
    n_max: usize,
) -> Result<RatioReport> {
    if n_max == 0 || n_max > m.depth {
        return Err(Error::Degenerate(format!(
            "ratio depth {n_max} outside 1..={}",
            m.depth
        )));
    }
    let pm = p.midpoint();
    let hw = p.half_width();
    let ev = ws.evaluator(shift);
    let mut rows = Vec::with_capacity(n_max);
    let mut c0 = 1.0f64;
    for n in 1..=n_max {
        let mk = m.marginal(n)?;
        let mut lo = f64::INFINITY;
        let mut hi = 0.0f64;
        let mut count = 0;
        for (w, &mass) in mk.words.iter().zip(&mk.masses) {
            if mass <= 0.0 {
                continue;
            }
            let e = ev.eval(w.symbols());
            let r = if e == f64::NEG_INFINITY {
                f64::INFINITY
            } else {
                (mass.ln() + n as f64 * pm - e).exp()
            };
            lo = lo.min(r);
            hi = hi.max(r);
            count += 1;
        }
        let c = hi.max(1.0 / lo);
        c0 = c0.max(c);
        rows.push(RatioRow {
            n,
            min_ratio: ExtReal(lo),
            max_ratio: ExtReal(hi),
            c0: ExtReal(c),
            cylinders: count,
        });
    }
    Ok(RatioReport {
        p_used: pm,
        p_half_width: ExtReal(hw),
        rows,
        c0: ExtReal(c0),
        c0_with_uncertainty: ExtReal(c0 * (n_max as f64 * hw).exp()),
    })
}

/// One `(u, v, t)` triple for the mixing check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct MixingSample {
    pub u: Word,
    pub v: Word,
    pub t: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingRow {
    pub u: Word,
    pub v: Word,
    pub t: usize,
    pub best_i: usize,
    pub ratio: ExtReal,
}

#[derive(Clone, Debug, Serialize)]
pub struct MixingReport {
    pub p: usize,
    pub c_min: f64,
    pub rows: Vec<MixingRow>,
    pub min_ratio: ExtReal,
    pub pass: bool,
}

/// `m([u] ∩ σ^{-k}[v])`.
fn joint_mass(m: &CylinderMeasure, u: &[Symbol], v: &[Symbol], k: usize) -> f64 {
    let range = m.prefix_range(u);
    m.words[range.clone()]
        .iter()
        .zip(&m.masses[range])
        .filter(|(w, _)| &w.symbols()[k..k + v.len()] == v)
        .map(|(_, &x)| x)
        .sum()
}

/// For each sample, the best `i ≤ 2p` for
/// `m([u] ∩ σ^{-(|u|+t+i)}[v]) / (m([u]) m([v]))`.
pub fn mixing_report(
    m: &CylinderMeasure,
    p: usize,
    samples: &[MixingSample],
    c_min: f64,
) -> Result<MixingReport> {
    let mut rows = Vec::with_capacity(samples.len());
    let mut min_ratio = f64::INFINITY;
    for s in samples {
        let need = s.u.len() + s.t + 2 * p + s.v.len();
        if need > m.depth {
            return Err(Error::Degenerate(format!(
                "sample ({}, {}, {}) needs depth {need}, measure has {}",
                s.u, s.v, s.t, m.depth
            )));
        }
        let mu = m.mass_of(s.u.symbols())?;
        let mv = m.mass_of(s.v.symbols())?;
        let mut best = (0, f64::NEG_INFINITY);
        for i in 0..=2 * p {
            let joint = joint_mass(m, s.u.symbols(), s.v.symbols(), s.u.len() + s.t + i);
            let r = if mu > 0.0 && mv > 0.0 {
                joint / (mu * mv)
            } else {
                f64::NAN
            };
            if r > best.1 {
                best = (i, r);
            }
        }
        if best.1.is_finite() {
            min_ratio = min_ratio.min(best.1);
        }
        rows.push(MixingRow {
            u: s.u.clone(),
            v: s.v.clone(),
            t: s.t,
            best_i: best.0,
            ratio: ExtReal(best.1),
        });
    }
    let pass = rows.iter().all(|r| r.ratio.0 >= c_min);
    Ok(MixingReport {
        p,
        c_min,
        rows,
        min_ratio: ExtReal(min_ratio),
        pass,
    })
}

/// `count` triples drawn from positive-mass cylinders, with
/// `|u|, |v| ≤ max_len` and `|u| + t + 2p + |v| ≤ depth`.
pub fn sample_triples(
    m: &CylinderMeasure,
    p: usize,
    count: usize,
    max_len: usize,
    seed: u64,
) -> Result<Vec<MixingSample>> {
    if m.depth < 2 + 2 * p {
        return Err(Error::Degenerate(format!(
            "measure depth {} too small for p = {p}",
            m.depth
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let budget = m.depth - 2 * p;
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let lu = rng.gen_range(1..=max_len.min(budget - 1).max(1));
        let lv = rng.gen_range(1..=max_len.min(budget - lu).max(1));
        let t = rng.gen_range(0..=budget - lu - lv);
        let pick = |rng: &mut ChaCha8Rng, len: usize| {
            let w = &m.words[rng.gen_range(0..m.words.len())];
            Word::from(&w.symbols()[..len])
        };
        let u = pick(&mut rng, lu);
        let v = pick(&mut rng, lv);
        out.push(MixingSample { u, v, t });
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct EntropyEnergy {
    pub n: usize,
    /// `−(1/n) Σ m([w]) log m([w])`.
    pub entropy: f64,
    /// `(1/n) Σ m([w]) eval(w)`.
    pub energy: ExtReal,
    /// `entropy + energy`.
    pub balance: ExtReal,
}

pub fn entropy_energy(m: &CylinderMeasure, ws: &WeightSystem, shift: &ShiftSpace, n: usize) -> Result<EntropyEnergy> {
    if n == 0 {
        return Err(Error::Degenerate("entropy_energy needs n >= 1".into()));
    }
    let mk = m.marginal(n)?;
    let ev = ws.evaluator(shift);
    let mut h = 0.0;
    let mut e = 0.0;
    for (w, &x) in mk.words.iter().zip(&mk.masses) {
        if x <= 0.0 {
            continue;
        }
        h -= x * x.ln();
        let v = ev.eval(w.symbols());
        e += if v == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            x * v
        };
    }
    let nf = n as f64;
    Ok(EntropyEnergy {
        n,
        entropy: h / nf,
        energy: ExtReal(e / nf),
        balance: ExtReal((h + e) / nf),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct GibbsReport {
    pub depth: usize,
    pub cesaro_steps: usize,
    pub measure_depth: usize,
    pub pressure: Interval,
    pub ratios: RatioReport,
    pub entropy_energy: Vec<EntropyEnergy>,
    /// `entropy_n + energy_n ≤ upper_n + C/n` for every `n`.
    pub variational_ok: bool,
    pub mixing: Option<MixingReport>,
}

/// `ν_depth`, its Cesàro average over `cesaro_steps`, and the checks.
#[allow(clippy::too_many_arguments)]
pub fn gibbs_report(
    ws: &WeightSystem,
    shift: &ShiftSpace,
    depth: usize,
    cesaro_steps: usize,
    pressure: &crate::pressure::PressureReport,
    samples: Option<(&[MixingSample], usize, f64)>,
    tol: f64,
) -> Result<GibbsReport> {
    let nu = build_nu(ws, shift, depth)?;
    let mu = if cesaro_steps == 0 {
        nu
    } else {
        cesaro_average(&nu, cesaro_steps)?
    };
    let d = mu.depth();
    let ratios = gibbs_ratio_report(&mu, ws, shift, &pressure.p_best, d)?;
    let mut ee = Vec::with_capacity(d);
    let mut ok = true;
    let c = pressure.constants.c.0;
    for n in 1..=d {
        let row = entropy_energy(&mu, ws, shift, n)?;
        if let Some(pr) = pressure.per_n.get(n - 1) {
            if row.balance.0 > pr.upper.0 + c / n as f64 + tol {
                ok = false;
            }
        }
        ee.push(row);
    }
    let mixing = match samples {
        Some((s, p, c_min)) => Some(mixing_report(&mu, p, s, c_min)?),
        None => None,
    };
    Ok(GibbsReport {
        depth,
        cesaro_steps,
        measure_depth: d,
        pressure: pressure.p_best.clone(),
        ratios,
        entropy_energy: ee,
        variational_ok: ok,
        mixing,
    })
}
