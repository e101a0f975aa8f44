//! Potential sequences `F = {log f_n}` as log-sup weights on cylinders.
//!
//! `eval(w)` is `log sup{f_n(x) : x ∈ [w]}` with `n = |w|`; `-inf` means
//! `f_n` vanishes on the cylinder and `eval(ε) = 0`. Every built-in kind is
//! locally constant, so the supremum is attained everywhere on the
//! cylinder and the Bowen constant is `M = 1`.
//!
//! Additive cylinder potentials of depth `d` sum the depth-`d` windows that
//! lie inside the word; words shorter than `d` get the empty sum.

mod conditions;
mod spec;

use std::collections::HashMap;

pub use conditions::{
    c3_scan, estimate_c2, estimate_conditions, subadditivity_defect, z1, C2Estimate, C3Level,
    C3Scan, ConditionEstimate, DEntry, DefectEstimate, DefectRow, Z1Report, PAIR_BUDGET,
    WORD_BUDGET,
};
pub use spec::PotentialSpec;

use crate::cocycle::MatrixFamily;
use crate::error::{Error, Result};
use crate::numeric::LogSum;
use crate::shift::ShiftSpace;
use crate::word::{Symbol, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    AdditiveCylinder,
    AlmostAdditiveTabulated,
    MatrixCocycle,
    PreimageCount,
    FiberPower,
    Pushforward,
    Scaled,
}

/// Closed-form scalar sequences `c_n` for tabulated almost-additive weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CSequence {
    /// `c_n = 1`.
    One,
    /// `c_n = 2 + (−1)ⁿ`.
    Alternating,
    /// `c_n = rⁿ`.
    Geometric(f64),
}

impl CSequence {
    pub fn parse(id: &str) -> Result<Self> {
        let id = id.trim();
        match id {
            "one" => Ok(CSequence::One),
            "alternating" => Ok(CSequence::Alternating),
            _ => {
                if let Some(r) = id.strip_prefix("geometric:") {
                    let r: f64 = r.trim().parse().map_err(|_| {
                        Error::InvalidPotential(format!("bad ratio in c-sequence `{id}`"))
                    })?;
                    if !(r > 0.0 && r.is_finite()) {
                        return Err(Error::InvalidPotential(format!(
                            "geometric ratio must be positive, got {r}"
                        )));
                    }
                    return Ok(CSequence::Geometric(r));
                }
                Err(Error::InvalidPotential(format!(
                    "unknown c-sequence `{id}` (expected one, alternating, geometric:r)"
                )))
            }
        }
    }

    pub fn id(&self) -> String {
        match self {
            CSequence::One => "one".into(),
            CSequence::Alternating => "alternating".into(),
            CSequence::Geometric(r) => format!("geometric:{r}"),
        }
    }

    /// `log c_n`, with `log c_0 = 0`.
    pub fn log_c(&self, n: usize) -> f64 {
        if n == 0 {
            return 0.0;
        }
        match self {
            CSequence::One => 0.0,
            CSequence::Alternating => {
                if n % 2 == 0 {
                    3f64.ln()
                } else {
                    0.0
                }
            }
            CSequence::Geometric(r) => n as f64 * r.ln(),
        }
    }

    /// `sup_{n,m} log c_{n+m} − log c_n − log c_m`.
    pub fn subadditivity_constant(&self) -> f64 {
        match self {
            CSequence::Alternating => 3f64.ln(),
            _ => 0.0,
        }
    }
}

/// Length-dependent additive term `per_step · n + log c_n`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Offset {
    pub per_step: f64,
    pub c: CSequence,
}

impl Offset {
    pub fn zero() -> Self {
        Offset {
            per_step: 0.0,
            c: CSequence::One,
        }
    }

    pub fn at(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.per_step * n as f64 + self.c.log_c(n)
        }
    }
}

/// Weights of a word read off nodes and consecutive pairs:
/// `Σ node(w_i) + Σ pair(w_i, w_{i+1}) + offset(n)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalForm {
    pub size: usize,
    pub node: Vec<f64>,
    /// Row-major `size × size`, when present.
    pub pair: Option<Vec<f64>>,
    pub offset: Offset,
}

impl LocalForm {
    pub fn zero(size: usize) -> Self {
        LocalForm {
            size,
            node: vec![0.0; size],
            pair: None,
            offset: Offset::zero(),
        }
    }

    #[inline]
    pub fn node(&self, s: Symbol) -> f64 {
        self.node[s as usize - 1]
    }

    #[inline]
    pub fn pair(&self, s: Symbol, t: Symbol) -> f64 {
        match &self.pair {
            Some(p) => p[(s as usize - 1) * self.size + t as usize - 1],
            None => 0.0,
        }
    }

    pub fn eval(&self, w: &[Symbol]) -> f64 {
        if w.is_empty() {
            return 0.0;
        }
        let mut acc = self.offset.at(w.len());
        for (i, &s) in w.iter().enumerate() {
            acc += self.node(s);
            if i > 0 {
                acc += self.pair(w[i - 1], s);
            }
        }
        acc
    }

    fn shifted(mut self, c: f64) -> Self {
        self.offset.per_step += c;
        self
    }
}

/// How a weight system can be summed by dynamic programming.
#[derive(Clone, Debug, PartialEq)]
pub enum TransferForm {
    /// `eval(w)` is the local form of the visible word itself.
    Visible(LocalForm),
    /// `eval(w) = log Σ_{u ∈ π⁻¹(w)} exp(L(u))` for a local form `L` on
    /// cover symbols.
    Cover(LocalForm),
}

impl TransferForm {
    fn shifted(self, c: f64) -> Self {
        match self {
            TransferForm::Visible(l) => TransferForm::Visible(l.shifted(c)),
            TransferForm::Cover(l) => TransferForm::Cover(l.shifted(c)),
        }
    }

    fn into_local(self) -> LocalForm {
        match self {
            TransferForm::Visible(l) | TransferForm::Cover(l) => l,
        }
    }

    pub fn eval(&self, shift: &ShiftSpace, w: &[Symbol]) -> f64 {
        match self {
            TransferForm::Visible(l) => l.eval(w),
            TransferForm::Cover(l) => cover_sum(shift, l, w),
        }
    }
}

/// `log Σ_{u ∈ π⁻¹(w)} exp(L(u))` by a forward pass over the fibers.
fn cover_sum(shift: &ShiftSpace, l: &LocalForm, w: &[Symbol]) -> f64 {
    if w.is_empty() {
        return 0.0;
    }
    let fiber = |b: Symbol| -> Vec<Symbol> {
        match shift.factor_map() {
            Some(f) => f.fiber(b),
            None => vec![b],
        }
    };
    let mut cur: Vec<(Symbol, f64)> = fiber(w[0]).into_iter().map(|s| (s, l.node(s))).collect();
    for &b in &w[1..] {
        let next: Vec<(Symbol, f64)> = fiber(b)
            .into_iter()
            .map(|t| {
                let mut acc = LogSum::new();
                for &(s, v) in &cur {
                    if shift.has_edge(s, t) {
                        acc.add(v + l.pair(s, t));
                    }
                }
                (t, acc.value() + l.node(t))
            })
            .collect();
        cur = next;
    }
    let mut acc = LogSum::new();
    for &(_, v) in &cur {
        acc.add(v);
    }
    acc.value() + l.offset.at(w.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Side {
    Visible,
    Cover,
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct AdditiveTable {
    depth: usize,
    values: HashMap<Vec<Symbol>, f64>,
    default: f64,
}

impl AdditiveTable {
    fn window(&self, w: &[Symbol]) -> f64 {
        self.values.get(w).copied().unwrap_or(self.default)
    }

    fn eval(&self, w: &[Symbol]) -> f64 {
        if w.len() < self.depth {
            return 0.0;
        }
        w.windows(self.depth).map(|x| self.window(x)).sum()
    }

    fn local(&self, size: usize) -> Option<LocalForm> {
        let syms = 1..=size as Symbol;
        match self.depth {
            1 => Some(LocalForm {
                size,
                node: syms.map(|s| self.window(&[s])).collect(),
                pair: None,
                offset: Offset::zero(),
            }),
            2 => {
                let mut pair = Vec::with_capacity(size * size);
                for s in 1..=size as Symbol {
                    for t in 1..=size as Symbol {
                        pair.push(self.window(&[s, t]));
                    }
                }
                Some(LocalForm {
                    size,
                    node: vec![0.0; size],
                    pair: Some(pair),
                    offset: Offset::zero(),
                })
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    Additive(AdditiveTable),
    Tabulated { log_lambda: Vec<f64>, c: CSequence },
    Cocycle(MatrixFamily),
    PreimageCount,
    FiberPower { exponent: f64 },
    Pushforward(Box<WeightSystem>),
    Scaled { inner: Box<WeightSystem>, per_step: f64 },
}

/// A potential sequence with optional declared regularity constants.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSystem {
    repr: Repr,
    declared_c: Option<f64>,
    declared_m: Option<f64>,
}

impl WeightSystem {
    fn from_repr(repr: Repr) -> Self {
        WeightSystem {
            repr,
            declared_c: None,
            declared_m: None,
        }
    }

    /// Additive potential of depth `d`: `values` maps depth-`d` windows to
    /// log weights; windows not listed get `default`.
    pub fn additive(depth: usize, values: HashMap<Vec<Symbol>, f64>, default: f64) -> Result<Self> {
        if depth == 0 {
            return Err(Error::InvalidPotential("additive depth must be >= 1".into()));
        }
        if let Some(k) = values.keys().find(|k| k.len() != depth) {
            return Err(Error::InvalidPotential(format!(
                "window {} has length {}, depth is {depth}",
                Word::from(k.as_slice()),
                k.len()
            )));
        }
        if values.values().chain([&default]).any(|v| v.is_nan() || *v == f64::INFINITY) {
            return Err(Error::InvalidPotential("window values must be < +inf".into()));
        }
        Ok(Self::from_repr(Repr::Additive(AdditiveTable {
            depth,
            values,
            default,
        })))
    }

    /// `F = 0`.
    pub fn zero() -> Self {
        Self::additive(1, HashMap::new(), 0.0).expect("zero potential")
    }

    /// Depth-1 additive potential with `log p_i` on symbol `i`.
    pub fn bernoulli(probs: &[f64]) -> Result<Self> {
        let values = probs
            .iter()
            .enumerate()
            .map(|(i, &p)| (vec![i as Symbol + 1], p.ln()))
            .collect();
        Self::additive(1, values, f64::NEG_INFINITY)
    }

    /// `g_n = c_n λ_{w_1} ⋯ λ_{w_n}` with `λ_i > 0`.
    pub fn tabulated(lambda: &[f64], c: CSequence) -> Result<Self> {
        if lambda.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
            return Err(Error::InvalidPotential("lambda entries must be positive".into()));
        }
        let mut ws = Self::from_repr(Repr::Tabulated {
            log_lambda: lambda.iter().map(|l| l.ln()).collect(),
            c,
        });
        ws.declared_c = Some(c.subadditivity_constant());
        Ok(ws)
    }

    pub fn cocycle(mf: MatrixFamily) -> Self {
        let mut ws = Self::from_repr(Repr::Cocycle(mf));
        ws.declared_c = Some(0.0);
        ws
    }

    /// `Φ`: `eval(v) = log |π⁻¹(v)|`.
    pub fn preimage_count() -> Self {
        let mut ws = Self::from_repr(Repr::PreimageCount);
        ws.declared_c = Some(0.0);
        ws
    }

    /// `ψ_n(v) = |π⁻¹(v)| / (|π⁻¹(v_1)| ⋯ |π⁻¹(v_n)|)^k`.
    pub fn fiber_power(exponent: f64) -> Result<Self> {
        if !exponent.is_finite() {
            return Err(Error::InvalidPotential("fiber-power exponent must be finite".into()));
        }
        Ok(Self::from_repr(Repr::FiberPower { exponent }))
    }

    /// `G`: `eval(v) = log Σ_{u ∈ π⁻¹(v)} exp(inner(u))`, `inner` read on the cover.
    pub fn pushforward(inner: WeightSystem) -> Self {
        Self::from_repr(Repr::Pushforward(Box::new(inner)))
    }

    /// `f_n ↦ e^{c n} f_n`.
    pub fn scaled(inner: WeightSystem, per_step: f64) -> Self {
        let declared_c = inner.declared_c;
        let declared_m = inner.declared_m;
        let mut ws = Self::from_repr(Repr::Scaled {
            inner: Box::new(inner),
            per_step,
        });
        ws.declared_c = declared_c;
        ws.declared_m = declared_m;
        ws
    }

    pub fn with_declared(mut self, c: Option<f64>, m: Option<f64>) -> Result<Self> {
        if let Some(c) = c {
            if !(c >= 0.0 && c.is_finite()) {
                return Err(Error::InvalidPotential("declared C must be finite and >= 0".into()));
            }
            self.declared_c = Some(c);
        }
        if let Some(m) = m {
            if !(m >= 1.0 && m.is_finite()) {
                return Err(Error::InvalidPotential("declared M must be finite and >= 1".into()));
            }
            self.declared_m = Some(m);
        }
        Ok(self)
    }

    pub fn kind(&self) -> Kind {
        match &self.repr {
            Repr::Additive(_) => Kind::AdditiveCylinder,
            Repr::Tabulated { .. } => Kind::AlmostAdditiveTabulated,
            Repr::Cocycle(_) => Kind::MatrixCocycle,
            Repr::PreimageCount => Kind::PreimageCount,
            Repr::FiberPower { .. } => Kind::FiberPower,
            Repr::Pushforward(_) => Kind::Pushforward,
            Repr::Scaled { .. } => Kind::Scaled,
        }
    }

    pub fn declared_c(&self) -> Option<f64> {
        self.declared_c
    }

    /// `C` known from the structure of the weights: exact additivity for
    /// depth-1 additive systems (scaling does not change it).
    pub fn structural_c(&self) -> Option<f64> {
        match &self.repr {
            Repr::Additive(t) if t.depth == 1 => Some(0.0),
            Repr::Scaled { inner, .. } => inner.structural_c(),
            _ => None,
        }
    }

    /// Bowen constant; every built-in kind is locally constant, so `1`
    /// unless declared otherwise.
    pub fn declared_m(&self) -> f64 {
        self.declared_m.unwrap_or(1.0)
    }

    /// Depth of an additive system (through scaling).
    pub fn depth(&self) -> Option<usize> {
        match &self.repr {
            Repr::Additive(t) => Some(t.depth),
            Repr::Scaled { inner, .. } => inner.depth(),
            _ => None,
        }
    }

    /// `"exact"` when cylinder sups are exact (`M = 1`), else `"bowen-slack"`.
    pub fn regime(&self) -> &'static str {
        if self.declared_m() == 1.0 {
            "exact"
        } else {
            "bowen-slack"
        }
    }

    /// Check that every visible symbol of `shift` has the data it needs.
    pub fn check_compatible(&self, shift: &ShiftSpace) -> Result<()> {
        self.check_side(shift, Side::Visible)
    }

    fn check_side(&self, shift: &ShiftSpace, side: Side) -> Result<()> {
        let size = match side {
            Side::Visible => shift.visible_alphabet_size(),
            Side::Cover => shift.alphabet_size(),
        };
        match &self.repr {
            Repr::Tabulated { log_lambda, .. } if log_lambda.len() < size => {
                Err(Error::DimensionMismatch(format!(
                    "lambda has {} entries, alphabet has {size} symbols",
                    log_lambda.len()
                )))
            }
            Repr::Cocycle(mf) if mf.len() < size => Err(Error::DimensionMismatch(format!(
                "matrix family has {} matrices, alphabet has {size} symbols",
                mf.len()
            ))),
            Repr::Pushforward(inner) => inner.check_side(shift, Side::Cover),
            Repr::Scaled { inner, .. } => inner.check_side(shift, side),
            _ => Ok(()),
        }
    }

    /// DP-friendly description of the weights on `shift`, when one exists.
    pub fn transfer_form(&self, shift: &ShiftSpace) -> Option<TransferForm> {
        self.form(shift, Side::Visible)
    }

    fn form(&self, shift: &ShiftSpace, side: Side) -> Option<TransferForm> {
        let (size, sofic) = match side {
            Side::Visible => (shift.visible_alphabet_size(), shift.is_sofic()),
            Side::Cover => (shift.alphabet_size(), false),
        };
        match &self.repr {
            Repr::Additive(t) => t.local(size).map(TransferForm::Visible),
            Repr::Tabulated { log_lambda, c } => {
                if log_lambda.len() < size {
                    return None;
                }
                Some(TransferForm::Visible(LocalForm {
                    size,
                    node: log_lambda[..size].to_vec(),
                    pair: None,
                    offset: Offset {
                        per_step: 0.0,
                        c: *c,
                    },
                }))
            }
            Repr::Cocycle(_) => None,
            Repr::PreimageCount => Some(if sofic {
                TransferForm::Cover(LocalForm::zero(shift.alphabet_size()))
            } else {
                TransferForm::Visible(LocalForm::zero(size))
            }),
            Repr::FiberPower { exponent } => Some(if sofic {
                let f = shift.factor_map().expect("sofic");
                let mut fiber_size = vec![0usize; f.image_size()];
                for &b in f.as_slice() {
                    fiber_size[b as usize - 1] += 1;
                }
                let node = f
                    .as_slice()
                    .iter()
                    .map(|&b| -exponent * (fiber_size[b as usize - 1] as f64).ln())
                    .collect();
                TransferForm::Cover(LocalForm {
                    size: shift.alphabet_size(),
                    node,
                    pair: None,
                    offset: Offset::zero(),
                })
            } else {
                TransferForm::Visible(LocalForm::zero(size))
            }),
            Repr::Pushforward(inner) => {
                let l = inner.form(shift, Side::Cover)?.into_local();
                Some(if sofic {
                    TransferForm::Cover(l)
                } else {
                    TransferForm::Visible(l)
                })
            }
            Repr::Scaled { inner, per_step } => {
                inner.form(shift, side).map(|f| f.shifted(*per_step))
            }
        }
    }

    /// `log sup f_n` on `[w]` for an allowable visible word `w`.
    pub fn log_weight(&self, shift: &ShiftSpace, w: &Word) -> Result<f64> {
        if !shift.is_allowable(w) {
            return Err(Error::NotAllowable(w.clone()));
        }
        self.check_compatible(shift)?;
        Ok(self.eval(shift, w.symbols()))
    }

    /// As [`log_weight`](Self::log_weight) without the allowability check.
    pub fn eval(&self, shift: &ShiftSpace, w: &[Symbol]) -> f64 {
        self.eval_side(shift, w, Side::Visible)
    }

    fn eval_side(&self, shift: &ShiftSpace, w: &[Symbol], side: Side) -> f64 {
        if w.is_empty() {
            return 0.0;
        }
        if let Some(f) = self.form(shift, side) {
            return match (f, side) {
                (TransferForm::Visible(l), _) => l.eval(w),
                (TransferForm::Cover(l), _) => cover_sum(shift, &l, w),
            };
        }
        match &self.repr {
            Repr::Additive(t) => t.eval(w),
            Repr::Cocycle(mf) => {
                if w.iter().any(|&s| s as usize > mf.len()) {
                    return f64::NAN;
                }
                mf.log_weight_unchecked(w)
            }
            Repr::Pushforward(inner) => match side {
                Side::Cover => inner.eval_side(shift, w, Side::Cover),
                Side::Visible if !shift.is_sofic() => inner.eval_side(shift, w, Side::Cover),
                Side::Visible => {
                    let mut acc = LogSum::new();
                    for u in shift.preimage_paths(w) {
                        acc.add(inner.eval_side(shift, u.symbols(), Side::Cover));
                    }
                    acc.value()
                }
            },
            Repr::Scaled { inner, per_step } => {
                inner.eval_side(shift, w, side) + per_step * w.len() as f64
            }
            Repr::Tabulated { .. } => f64::NAN,
            Repr::PreimageCount | Repr::FiberPower { .. } => {
                unreachable!("always has a transfer form")
            }
        }
    }

    /// Evaluator with the transfer form resolved once, for hot loops.
    pub fn evaluator<'a>(&'a self, shift: &'a ShiftSpace) -> Evaluator<'a> {
        Evaluator {
            ws: self,
            shift,
            form: self.transfer_form(shift),
        }
    }

    /// Short human-readable description for reports.
    pub fn describe(&self) -> String {
        match &self.repr {
            Repr::Additive(t) => format!("additive-cylinder(depth {})", t.depth),
            Repr::Tabulated { c, .. } => format!("tabulated-aa(c = {})", c.id()),
            Repr::Cocycle(mf) => format!("matrix-cocycle(d = {}, {} matrices)", mf.dim(), mf.len()),
            Repr::PreimageCount => "preimage-count".into(),
            Repr::FiberPower { exponent } => format!("fiber-power(k = {exponent})"),
            Repr::Pushforward(inner) => format!("pushforward({})", inner.describe()),
            Repr::Scaled { inner, per_step } => format!("scaled({}, {per_step})", inner.describe()),
        }
    }
}

/// [`WeightSystem::eval`] bound to one shift.
pub struct Evaluator<'a> {
    ws: &'a WeightSystem,
    shift: &'a ShiftSpace,
    form: Option<TransferForm>,
}

impl Evaluator<'_> {
    pub fn eval(&self, w: &[Symbol]) -> f64 {
        match &self.form {
            Some(f) => f.eval(self.shift, w),
            None => self.ws.eval(self.shift, w),
        }
    }

    pub fn form(&self) -> Option<&TransferForm> {
        self.form.as_ref()
    }
}
