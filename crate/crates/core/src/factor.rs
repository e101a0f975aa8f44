//! One-block factor maps between a Markov cover and its sofic image.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::gibbs::{build_nu, cesaro_average, gibbs_ratio_report, CylinderMeasure, RatioReport};
use crate::potential::WeightSystem;
use crate::pressure::{pressure_report, Interval, PressureOptions};
use crate::shift::{check_finite_irreducibility, CertificateOutcome, ShiftSpace};
use crate::word::{Symbol, Word};

#[derive(Clone, Debug)]
pub struct FactorMap {
    domain: ShiftSpace,
    codomain: ShiftSpace,
}

impl FactorMap {
    /// `domain` must be a Markov shift; `map[s-1]` is the image of `s`.
    pub fn new(domain: ShiftSpace, map: Vec<Symbol>) -> Result<Self> {
        if domain.is_sofic() {
            return Err(Error::InvalidShift("factor map domain must be a Markov shift".into()));
        }
        let codomain = domain.clone().with_factor_map(map)?;
        Ok(FactorMap { domain, codomain })
    }

    /// Factor map of a sofic presentation onto its visible shift.
    pub fn from_sofic(shift: &ShiftSpace) -> Result<Self> {
        if !shift.is_sofic() {
            return Err(Error::InvalidShift("shift has no factor map".into()));
        }
        Ok(FactorMap {
            domain: shift.cover(),
            codomain: shift.clone(),
        })
    }

    pub fn domain(&self) -> &ShiftSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &ShiftSpace {
        &self.codomain
    }

    pub fn symbol_image(&self, s: Symbol) -> Symbol {
        self.codomain.image(s)
    }

    pub fn image_word(&self, u: &Word) -> Result<Word> {
        if !self.domain.is_cover_path(u.symbols()) {
            return Err(Error::NotAllowable(u.clone()));
        }
        Ok(u.symbols().iter().map(|&s| self.symbol_image(s)).collect::<Vec<_>>().into())
    }

    /// Allowable domain words mapping onto `v`, lexicographic.
    pub fn preimage_words(&self, v: &Word) -> Result<Vec<Word>> {
        if !self.codomain.is_allowable(v) {
            return Err(Error::NotAllowable(v.clone()));
        }
        Ok(self.codomain.preimage_paths(v.symbols()))
    }

    /// `Φ`, read on the codomain.
    pub fn preimage_count_weight(&self) -> WeightSystem {
        WeightSystem::preimage_count()
    }

    /// `G`, read on the codomain, from `ws` on the domain.
    pub fn pushforward_weight(&self, ws: WeightSystem) -> WeightSystem {
        WeightSystem::pushforward(ws)
    }

    /// `πm([v]) = Σ_{π(u) = v} m([u])`.
    pub fn pushforward_measure(&self, m: &CylinderMeasure) -> Result<CylinderMeasure> {
        let mut acc: BTreeMap<Word, f64> = BTreeMap::new();
        for (u, &x) in m.words().iter().zip(m.masses()) {
            *acc.entry(self.image_word(u)?).or_insert(0.0) += x;
        }
        CylinderMeasure::new(m.depth(), acc.into_iter().collect())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HiddenGibbsReport {
    pub certificate: CertificateOutcome,
    pub regime: &'static str,
    pub pressure_f: Interval,
    pub pressure_g: Interval,
    pub overlap: bool,
    pub ratios_f: RatioReport,
    pub ratios_g: RatioReport,
    /// `C₀` of the pushed measure at `n_max / 2` and `n_max`.
    pub c0_half: f64,
    pub c0_full: f64,
    pub c0_stable: bool,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HiddenGibbsOptions {
    pub depth: usize,
    pub cesaro_steps: usize,
    pub cert_n_max: usize,
    pub pressure: PressureOptions,
    pub tol: f64,
}

/// Gibbs ratios of `π(Cesàro ν)` against `G`, and the pressure brackets of
/// `F` on the cover and `G` on the image.
pub fn hidden_gibbs_report(
    fm: &FactorMap,
    ws: &WeightSystem,
    opts: &HiddenGibbsOptions,
) -> Result<HiddenGibbsReport> {
    let certificate = check_finite_irreducibility(
        fm.domain(),
        opts.cert_n_max,
        opts.pressure.p_max,
        None,
    )?;
    if let CertificateOutcome::Failed(f) = &certificate {
        return Err(Error::Condition(format!(
            "cover is not finitely irreducible at this scale: no connector for ({}, {})",
            f.u, f.v
        )));
    }
    let g = fm.pushforward_weight(ws.clone());
    let pf = pressure_report(ws, fm.domain(), &opts.pressure)?;
    let pg = pressure_report(&g, fm.codomain(), &opts.pressure)?;

    let nu = build_nu(ws, fm.domain(), opts.depth)?;
    let mu = if opts.cesaro_steps == 0 {
        nu
    } else {
        cesaro_average(&nu, opts.cesaro_steps)?
    };
    let n_max = mu.depth();
    let ratios_f = gibbs_ratio_report(&mu, ws, fm.domain(), &pf.p_best, n_max)?;
    let pushed = fm.pushforward_measure(&mu)?;
    let ratios_g = gibbs_ratio_report(&pushed, &g, fm.codomain(), &pg.p_best, n_max)?;
    let half = (n_max / 2).max(1);
    let c0_half = ratios_g.rows[half - 1].c0.0;
    let c0_full = ratios_g.rows[n_max - 1].c0.0;
    let c0_stable = c0_full.is_finite() && (c0_full - c0_half).abs() <= 0.1 * c0_half;
    let overlap = pf.p_best.overlaps(&pg.p_best, opts.tol);
    Ok(HiddenGibbsReport {
        certificate,
        regime: ws.regime(),
        pressure_f: pf.p_best,
        pressure_g: pg.p_best,
        overlap,
        ratios_f,
        ratios_g,
        c0_half,
        c0_full,
        c0_stable,
        pass: overlap && c0_stable,
    })
}
