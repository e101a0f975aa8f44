//! Command-line front end.
//!
//! Every subcommand reads JSON spec files, runs one computation and writes a
//! report `{version, config, report}` (or a CSV table with `--csv`). Exit
//! status is 0 on success, 1 on bad input and 2 when a checked condition
//! fails; the report is still written in the last case.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::cocycle::{lyapunov_estimate, singular_values, LyapunovMeasure, MatrixFamily, Norm};
use crate::error::{Error, Result};
use crate::factor::{hidden_gibbs_report, FactorMap, HiddenGibbsOptions};
use crate::gibbs::{
    build_nu, cesaro_average, gibbs_report, sample_triples, CylinderMeasure, MixingSample,
};
use crate::numeric::ExtReal;
use crate::potential::{c3_scan, estimate_conditions, PotentialSpec, WeightSystem};
use crate::pressure::{pressure_compare, pressure_report, PressureOptions, PressureReport};
use crate::shift::{check_bip, check_finite_irreducibility, CertificateOutcome, ShiftSpace, ShiftSpec};
use crate::word::Symbol;

/// Largest word list `words --list` will print.
const LIST_CAP: u128 = 100_000;

#[derive(Parser, Debug, Serialize)]
#[command(name = "thermoshift", version, about = "Pressure, Gibbs measures and factor maps on truncated Markov and sofic shifts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,

    /// Same as `--format csv`.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub csv: bool,

    /// Write the report to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Count (and optionally list) allowable or periodic words.
    Words(WordsArgs),
    /// Irreducibility, finite-irreducibility certificate, BIP and, with a
    /// potential, the condition estimates.
    Check(CheckArgs),
    /// Partition sums and the two-sided pressure bracket.
    Pressure(PressureArgs),
    /// Pressure report plus the periodic-orbit comparison per anchor.
    Gurevich(GurevichArgs),
    /// Finite-depth Gibbs measure, ratios, entropy/energy and mixing.
    Gibbs(GibbsArgs),
    /// Factor-map operations between a cover and its sofic image.
    Factor(FactorArgs),
    /// Lyapunov exponent of a matrix cocycle and singular values.
    Lyapunov(LyapunovArgs),
}

#[derive(Args, Debug, Serialize)]
pub struct WordsArgs {
    /// Shift spec file.
    #[arg(long)]
    pub shift: PathBuf,
    /// Largest word length.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Ladder level to truncate to (0-based).
    #[arg(long)]
    pub level: Option<usize>,
    /// List the length-`n` cycles through this anchor instead.
    #[arg(long)]
    pub periodic: Option<Symbol>,
    /// Also list the words of length `n`.
    #[arg(long)]
    pub list: bool,
}

#[derive(Args, Debug, Serialize)]
pub struct CheckArgs {
    #[arg(long)]
    pub shift: PathBuf,
    /// Potential spec file; adds the condition estimates.
    #[arg(long)]
    pub potential: Option<PathBuf>,
    /// Longest words glued by the connector search.
    #[arg(long, default_value_t = 3)]
    pub n_max: usize,
    /// Longest connector tried.
    #[arg(long, default_value_t = 2)]
    pub p_max: usize,
    /// Word length bound for the defect scan.
    #[arg(long, default_value_t = 6)]
    pub defect_n: usize,
}

#[derive(Args, Debug, Serialize)]
pub struct PressureArgs {
    #[arg(long)]
    pub shift: PathBuf,
    #[arg(long)]
    pub potential: PathBuf,
    /// Largest `n` for the partition sums.
    #[arg(long, default_value_t = 20)]
    pub n: usize,
    /// Anchor symbols for periodic sums, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub anchors: Vec<Symbol>,
    /// Word length bound for the defect scan.
    #[arg(long, default_value_t = 8)]
    pub defect_n: usize,
    /// Word length bound for the gluing scan.
    #[arg(long, default_value_t = 3)]
    pub c2_n: usize,
    /// Longest connector tried.
    #[arg(long, default_value_t = 2)]
    pub p_max: usize,
    /// `n` used at every ladder level.
    #[arg(long, default_value_t = 10)]
    pub ladder_n: usize,
}

impl PressureArgs {
    fn options(&self, anchors: Vec<Symbol>) -> PressureOptions {
        PressureOptions {
            n_max: self.n,
            anchors,
            defect_n_max: self.defect_n,
            c2_n_max: self.c2_n,
            p_max: self.p_max,
            ladder_n: self.ladder_n,
        }
    }
}

#[derive(Args, Debug, Serialize)]
pub struct GurevichArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pressure: PressureArgs,
    /// First `n` of the monotonicity check.
    #[arg(long, default_value_t = 8)]
    pub from: usize,
    /// Largest discrepancy accepted at the last `n`.
    #[arg(long, default_value_t = 0.1)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct GibbsArgs {
    #[arg(long)]
    pub shift: PathBuf,
    #[arg(long)]
    pub potential: PathBuf,
    /// Depth of the finite-volume measure.
    #[arg(long, default_value_t = 10)]
    pub depth: usize,
    /// Cesàro averaging steps (0 keeps the raw measure).
    #[arg(long, default_value_t = 0)]
    pub cesaro: usize,
    /// Largest `n` of the pressure bracket used for the ratios.
    #[arg(long, default_value_t = 30)]
    pub n: usize,
    /// Number of sampled (u, v, t) triples for the mixing check.
    #[arg(long)]
    pub mixing: Option<usize>,
    /// JSON list of {"u", "v", "t"} triples for the mixing check.
    #[arg(long)]
    pub samples: Option<PathBuf>,
    /// Seed for sampled triples.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Longest sampled u and v.
    #[arg(long, default_value_t = 3)]
    pub max_len: usize,
    /// Mixing constant required of every triple.
    #[arg(long, default_value_t = 0.1)]
    pub c_min: f64,
    /// Word length bound for the connector certificate giving `p`.
    #[arg(long, default_value_t = 3)]
    pub cert_n: usize,
    #[arg(long, default_value_t = 2)]
    pub p_max: usize,
    /// Tolerance of the variational check.
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorOp {
    /// Preimage counts of visible words.
    Phi,
    /// Induced potential on the image.
    PushWeight,
    /// Pushforward of the cover's Gibbs measure.
    PushMeasure,
    /// Gibbs check of the pushed measure against the induced potential.
    HiddenGibbs,
}

#[derive(Args, Debug, Serialize)]
pub struct FactorArgs {
    /// Shift spec with a `factor_map`.
    #[arg(long)]
    pub shift: PathBuf,
    /// Potential on the cover (zero when omitted).
    #[arg(long)]
    pub potential: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub op: FactorOp,
    /// Word length for `phi`, `push-weight` and `push-measure`.
    #[arg(long, default_value_t = 3)]
    pub n: usize,
    /// Depth of the cover measure.
    #[arg(long, default_value_t = 8)]
    pub depth: usize,
    #[arg(long, default_value_t = 0)]
    pub cesaro: usize,
    /// Largest `n` of both pressure brackets.
    #[arg(long, default_value_t = 20)]
    pub pressure_n: usize,
    #[arg(long, default_value_t = 3)]
    pub cert_n: usize,
    #[arg(long, default_value_t = 2)]
    pub p_max: usize,
    /// Overlap tolerance for the two brackets.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
}

#[derive(Args, Debug, Serialize)]
pub struct LyapunovArgs {
    /// JSON list of row-major d×d matrices, one per symbol.
    #[arg(long)]
    pub matrices: PathBuf,
    /// `bernoulli:q` (two symbols), `bernoulli:p1,p2,…`, or `gibbs`.
    #[arg(long, default_value = "gibbs")]
    pub measure: String,
    #[arg(long, default_value_t = 12)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = NormArg::MaxRowSum)]
    pub norm: NormArg,
    /// Shift for `--measure gibbs`.
    #[arg(long)]
    pub shift: Option<PathBuf>,
    /// Potential for `--measure gibbs`.
    #[arg(long)]
    pub potential: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub cesaro: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormArg {
    MaxRowSum,
    Spectral,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Self {
        match n {
            NormArg::MaxRowSum => Norm::MaxRowSum,
            NormArg::Spectral => Norm::Spectral,
        }
    }
}

/// A finished run: report body, CSV table, and whether a condition failed.
struct Outcome {
    report: Value,
    csv: Option<String>,
    condition_failed: bool,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn json_err(path: &Path, source: serde_json::Error) -> Error {
    Error::Json {
        context: path.display().to_string(),
        source,
    }
}

fn load_shift(path: &Path, config: &mut Vec<(&'static str, Value)>) -> Result<ShiftSpace> {
    let spec: ShiftSpec = serde_json::from_str(&read(path)?).map_err(|e| json_err(path, e))?;
    let shift = spec.build()?;
    config.push(("shift_spec", serde_json::to_value(&spec).expect("serializable")));
    Ok(shift)
}

fn load_potential(path: &Path, config: &mut Vec<(&'static str, Value)>) -> Result<WeightSystem> {
    let spec: PotentialSpec = serde_json::from_str(&read(path)?).map_err(|e| json_err(path, e))?;
    let ws = spec.build()?;
    config.push(("potential_spec", serde_json::to_value(&spec).expect("serializable")));
    Ok(ws)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("reports serialize")
}

fn num(x: f64) -> String {
    match x {
        f64::INFINITY => "inf".into(),
        f64::NEG_INFINITY => "-inf".into(),
        x if x.is_nan() => "nan".into(),
        x => x.to_string(),
    }
}

fn run_words(a: &WordsArgs, config: &mut Vec<(&'static str, Value)>) -> Result<Outcome> {
    let shift = load_shift(&a.shift, config)?;
    let shift = match a.level {
        Some(l) => shift.level(l)?,
        None => shift,
    };
    let mut counts = Vec::with_capacity(a.n);
    let mut csv = String::from("n,count\n");
    for n in 1..=a.n {
        let c = shift.count_words(n)?;
        counts.push(json!({"n": n, "count": c}));
        let _ = writeln!(csv, "{n},{c}");
    }
    let listed = if let Some(anchor) = a.periodic {
        Some(shift.periodic_words(a.n, anchor)?)
    } else if a.list {
        let c = shift.count_words(a.n)?;
        if c > LIST_CAP {
            return Err(Error::BudgetExceeded {
                what: "listed word",
                count: c,
                cap: LIST_CAP,
            });
        }
        Some(shift.enumerate_words(a.n, None)?)
    } else {
        None
    };
    Ok(Outcome {
        report: json!({
            "alphabet_size": shift.visible_alphabet_size(),
            "sofic": shift.is_sofic(),
            "counts": counts,
            "words": listed,
        }),
        csv: Some(csv),
        condition_failed: false,
    })
}

fn run_check(a: &CheckArgs, config: &mut Vec<(&'static str, Value)>) -> Result<Outcome> {
    let shift = load_shift(&a.shift, config)?;
    let irreducible = shift.is_irreducible();
    let certificate = check_finite_irreducibility(&shift, a.n_max, a.p_max, None)?;
    let bip = check_bip(&shift);
    let mut failed = !irreducible || matches!(certificate, CertificateOutcome::Failed(_));
    let mut report = json!({
        "irreducible": irreducible,
        "certificate": to_value(&certificate),
        "bip": to_value(&bip),
    });
    if let Some(p) = &a.potential {
        let ws = load_potential(p, config)?;
        let cond = estimate_conditions(&ws, &shift, a.defect_n, a.n_max, a.p_max)?;
        failed |= !cond.c2.satisfied();
        report["conditions"] = to_value(&cond);
        if shift.ladder().len() > 1 {
            let scan = c3_scan(&ws, &shift, a.n_max, a.p_max)?;
            failed |= !scan.finite;
            report["c3_scan"] = to_value(&scan);
        }
    }
    Ok(Outcome {
        report,
        csv: None,
        condition_failed: failed,
    })
}

fn pressure_csv(r: &PressureReport) -> String {
    let mut anchors: Vec<Symbol> = r.gurevich_per_n.iter().map(|g| g.a).collect();
    anchors.sort_unstable();
    anchors.dedup();
    let mut out = String::from("n,logZ,lower,upper");
    for a in &anchors {
        let _ = write!(out, ",gurevich_a{a}");
    }
    out.push('\n');
    for row in &r.per_n {
        let lower = row.lower.map(|l| num(l.0)).unwrap_or_default();
        let _ = write!(out, "{},{},{},{}", row.n, num(row.log_z.0), lower, num(row.upper.0));
        for a in &anchors {
            let g = r
                .gurevich_per_n
                .iter()
                .find(|g| g.a == *a && g.n == row.n)
                .map(|g| num(g.log_z.0))
                .unwrap_or_default();
            let _ = write!(out, ",{g}");
        }
        out.push('\n');
    }
    out
}

fn run_pressure(a: &PressureArgs, config: &mut Vec<(&'static str, Value)>) -> Result<Outcome> {
    let shift = load_shift(&a.shift, config)?;
    let ws = load_potential(&a.potential, config)?;
    let r = pressure_report(&ws, &shift, &a.options(a.anchors.clone()))?;
    Ok(Outcome {
        csv: Some(pressure_csv(&r)),
        report: to_value(&r),
        condition_failed: false,
    })
}

fn run_gurevich(a: &GurevichArgs, config: &mut Vec<(&'static str, Value)>) -> Result<Outcome> {
    let p = &a.pressure;
    let shift = load_shift(&p.shift, config)?;
    let ws = load_potential(&p.potential, config)?;
    let anchors = if p.anchors.is_empty() { vec![1] } else { p.anchors.clone() };
    let r = pressure_report(&ws, &shift, &p.options(anchors.clone()))?;
    let cmp = pressure_compare(&ws, &shift, a.from.min(p.n).max(1), p.n, &anchors, a.tol)?;
    let mut report = to_value(&r);
    report["compare"] = to_value(&cmp);
    Ok(Outcome {
        csv: Some(pressure_csv(&r)),
        report,
        condition_failed: false,
    })
}

fn certified_p(shift: &ShiftSpace, n_max: usize, p_max: usize) -> Result<usize> {
    match check_finite_irreducibility(shift, n_max, p_max, None)? {
        CertificateOutcome::Certified(c) => Ok(c.p),
        CertificateOutcome::Failed(f) => Err(Error::Condition(format!(
            "no connector of length <= {} for ({}, {})",
            f.p_max, f.u, f.v
        ))),
    }
}

fn run_gibbs(a: &GibbsArgs, config: &mut Vec<(&'static str, Value)>) -> Result<Outcome> {
    let shift = load_shift(&a.shift, config)?;
    let ws = load_potential(&a.potential, config)?;
    let pr = pressure_report(
        &ws,
        &shift,
        &PressureOptions {
            n_max: a.n,
            p_max: a.p_max,
            ..Default::default()
        },
    )?;
    let samples: Option<(Vec<MixingSample>, usize)> = if let Some(path) = &a.samples {
        let s: Vec<MixingSample> = serde_json::from_str(&read(path)?).map_err(|e| json_err(path, e))?;
        Some((s, certified_p(&shift, a.cert_n, a.p_max)?))
    } else if let Some(count) = a.mixing {
        let p = certified_p(&shift, a.cert_n, a.p_max)?;
        let nu = build_nu(&ws, &shift, a.depth)?;
        let mu = if a.cesaro == 0 { nu } else { cesaro_average(&nu, a.cesaro)? };
        Some((sample_triples(&mu, p, count, a.max_len, a.seed)?, p))
    } else {
        None
    };
    let g = gibbs_report(
        &ws,
        &shift,
        a.depth,
        a.cesaro,
        &pr,
        samples.as_ref().map(|(s, p)| (s.as_slice(), *p, a.c_min)),
        a.tol,
    )?;
    let mut csv = String::from("n,min_ratio,max_ratio,c0,entropy,energy,balance\n");
    for (r, e) in g.ratios.rows.iter().zip(&g.entropy_energy) {
        let _ = writeln!(
            csv,
            "{},{},{},{},{},{},{}",
            r.n,
            num(r.min_ratio.0),
            num(r.max_ratio.0),
            num(r.c0.0),
            num(e.entropy),
            num(e.energy.0),
            num(e.balance.0)
        );
    }
    let failed = g.mixing.as_ref().is_some_and(|m| !m.pass);
    Ok(Outcome {
        report: to_value(&g),
        csv: Some(csv),
        condition_failed: failed,
    })
}

fn measure_rows(m: &CylinderMeasure) -> (Value, String) {
    let mut csv = String::from("word,mass\n");
    let rows: Vec<Value> = m
        .words()
        .iter()
        .zip(m.masses())
        .map(|(w, &x)| {
            let _ = writeln!(csv, "{w},{}", num(x));
            json!({"word": w, "mass": x})
        })
        .collect();
    (Value::Array(rows), csv)
}

fn run_factor(a: &FactorArgs, config: &mut Vec<(&'static str, Value)>) -> Result<Outcome> {
    let shift = load_shift(&a.shift, config)?;
    let fm = FactorMap::from_sofic(&shift)?;
    let ws = match &a.potential {
        Some(p) => load_potential(p, config)?,
        None => WeightSystem::zero(),
    };
    let mut condition_failed = false;
    let (report, csv) = match a.op {
        FactorOp::Phi => {
            let mut csv = String::from("word,preimages\n");
            let mut rows = Vec::new();
            for v in fm.codomain().enumerate_words(a.n, None)? {
                let count = fm.preimage_words(&v)?.len();
                let _ = writeln!(csv, "{v},{count}");
                rows.push(json!({"word": v, "preimages": count}));
            }
            (json!({"n": a.n, "rows": rows}), csv)
        }
        FactorOp::PushWeight => {
            let g = fm.pushforward_weight(ws.clone());
            let ev = g.evaluator(fm.codomain());
            let mut csv = String::from("word,log_g\n");
            let mut rows = Vec::new();
            for v in fm.codomain().enumerate_words(a.n, None)? {
                let x = ev.eval(v.symbols());
                let _ = writeln!(csv, "{v},{}", num(x));
                rows.push(json!({"word": v, "log_g": ExtReal(x)}));
            }
            (json!({"n": a.n, "describe": g.describe(), "rows": rows}), csv)
        }
        FactorOp::PushMeasure => {
            let nu = build_nu(&ws, fm.domain(), a.depth)?;
            let mu = if a.cesaro == 0 { nu } else { cesaro_average(&nu, a.cesaro)? };
            let pushed = fm.pushforward_measure(&mu)?.marginal(a.n.min(mu.depth()))?;
            let (rows, csv) = measure_rows(&pushed);
            (json!({"n": pushed.depth(), "rows": rows}), csv)
        }
        FactorOp::HiddenGibbs => {
            let r = hidden_gibbs_report(
                &fm,
                &ws,
                &HiddenGibbsOptions {
                    depth: a.depth,
                    cesaro_steps: a.cesaro,
                    cert_n_max: a.cert_n,
                    pressure: PressureOptions {
                        n_max: a.pressure_n,
                        p_max: a.p_max,
                        ..Default::default()
                    },
                    tol: a.tol,
                },
            )?;
            condition_failed = !r.pass;
            let mut csv = String::from("n,c0_f,c0_g\n");
            for (f, g) in r.ratios_f.rows.iter().zip(&r.ratios_g.rows) {
                let _ = writeln!(csv, "{},{},{}", f.n, num(f.c0.0), num(g.c0.0));
            }
            (to_value(&r), csv)
        }
    };
    Ok(Outcome {
        report,
        csv: Some(csv),
        condition_failed,
    })
}

fn parse_measure(spec: &str, symbols: usize) -> Result<Option<Vec<f64>>> {
    if spec == "gibbs" {
        return Ok(None);
    }
    let bad = || Error::InvalidPotential(format!("measure `{spec}`: expected `gibbs` or `bernoulli:q[,q…]`"));
    let rest = spec.strip_prefix("bernoulli:").ok_or_else(bad)?;
    let mut probs: Vec<f64> = rest
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| bad()))
        .collect::<Result<_>>()?;
    if probs.len() + 1 == symbols {
        probs.push(1.0 - probs.iter().sum::<f64>());
    }
    Ok(Some(probs))
}

fn run_lyapunov(a: &LyapunovArgs, config: &mut Vec<(&'static str, Value)>) -> Result<Outcome> {
    let path = &a.matrices;
    let nested: Vec<Vec<Vec<f64>>> = serde_json::from_str(&read(path)?).map_err(|e| json_err(path, e))?;
    config.push(("matrices", to_value(&nested)));
    let mf = MatrixFamily::new(nested, a.norm.into())?;
    let report = match parse_measure(&a.measure, mf.len())? {
        Some(probs) => lyapunov_estimate(LyapunovMeasure::Bernoulli(&probs), &mf, a.n)?,
        None => {
            let (Some(s), Some(p)) = (&a.shift, &a.potential) else {
                return Err(Error::InvalidPotential(
                    "--measure gibbs needs --shift and --potential".into(),
                ));
            };
            let shift = load_shift(s, config)?;
            let ws = load_potential(p, config)?;
            let nu = build_nu(&ws, &shift, a.n)?;
            let mu = if a.cesaro == 0 { nu } else { cesaro_average(&nu, a.cesaro)? };
            lyapunov_estimate(LyapunovMeasure::Table(&mu), &mf, a.n)?
        }
    };
    let singular: Vec<Value> = if mf.dim() <= 3 {
        (1..=mf.len() as Symbol)
            .map(|s| singular_values(mf.matrix(s), mf.dim()).map(|v| to_value(&v)))
            .collect::<Result<_>>()?
    } else {
        Vec::new()
    };
    let mut csv = String::from("n,mean_log_norm,estimate,increment,envelope\n");
    for r in &report.rows {
        let _ = writeln!(
            csv,
            "{},{},{},{},{}",
            r.n,
            num(r.mean_log_norm.0),
            num(r.estimate.0),
            num(r.increment.0),
            num(r.envelope.0)
        );
    }
    let mut value = to_value(&report);
    value["singular_values"] = Value::Array(singular);
    Ok(Outcome {
        report: value,
        csv: Some(csv),
        condition_failed: false,
    })
}

fn dispatch(cli: &Cli, config: &mut Vec<(&'static str, Value)>) -> Result<Outcome> {
    match &cli.command {
        Command::Words(a) => run_words(a, config),
        Command::Check(a) => run_check(a, config),
        Command::Pressure(a) => run_pressure(a, config),
        Command::Gurevich(a) => run_gurevich(a, config),
        Command::Gibbs(a) => run_gibbs(a, config),
        Command::Factor(a) => run_factor(a, config),
        Command::Lyapunov(a) => run_lyapunov(a, config),
    }
}

fn emit(cli: &Cli, text: &str) -> Result<()> {
    match &cli.out {
        Some(path) => std::fs::write(path, text).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        }),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|source| Error::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

/// Run a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> u8 {
    let mut config = Vec::new();
    let result = dispatch(&cli, &mut config).and_then(|o| {
        let csv = cli.csv || cli.format == Format::Csv;
        let text = if csv {
            o.csv.clone().ok_or_else(|| {
                Error::InvalidShift("this subcommand has no CSV table; use --format json".into())
            })?
        } else {
            let mut resolved = serde_json::Map::new();
            resolved.insert("args".into(), to_value(&cli));
            for (k, v) in config {
                resolved.insert(k.into(), v);
            }
            let doc = json!({
                "version": crate::VERSION,
                "config": resolved,
                "report": o.report,
            });
            let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
            s.push('\n');
            s
        };
        emit(&cli, &text)?;
        Ok(o.condition_failed)
    });
    match result {
        Ok(false) => 0,
        Ok(true) => 2,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::Condition(_)) {
                2
            } else {
                1
            }
        }
    }
}

pub fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(cli))
}
