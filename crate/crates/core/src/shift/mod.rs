//! Truncated countable Markov shifts and their one-block sofic images.
//!
//! A [`ShiftSpace`] is always a finite edge graph on symbols `1..=k` (the
//! Markov cover). An optional symbol map `m: 1..=k → 1..=k'` turns it into a
//! sofic presentation whose visible words are images of cover paths. All
//! language questions on the visible side go through a cached
//! [`LanguageAutomaton`].

mod automaton;
mod builtin;
mod spec;
mod specification;

use std::sync::{Arc, OnceLock};

pub use automaton::LanguageAutomaton;
pub use spec::{Builtin, ShiftSpec};
pub(crate) use specification::words_up_to;
pub use specification::{
    check_bip, check_finite_irreducibility, find_connector, BipReport, CertificateOutcome,
    FailureReport, SpecificationCertificate,
};

use crate::error::{Error, Result};
use crate::parallel;
use crate::word::{Symbol, Word};

#[derive(Clone, Debug)]
pub struct ShiftSpace {
    alphabet_size: usize,
    succ: Vec<Vec<Symbol>>,
    adj: Vec<Vec<u64>>,
    ladder: Vec<usize>,
    factor: Option<SymbolMap>,
    automaton: OnceLock<Arc<LanguageAutomaton>>,
}

/// One-block symbol map of a sofic presentation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolMap {
    map: Vec<Symbol>,
    image_size: usize,
}

impl SymbolMap {
    pub fn image(&self, s: Symbol) -> Symbol {
        self.map[s as usize - 1]
    }

    pub fn as_slice(&self) -> &[Symbol] {
        &self.map
    }

    pub fn image_size(&self) -> usize {
        self.image_size
    }

    /// Cover symbols mapping to `b`, ascending.
    pub fn fiber(&self, b: Symbol) -> Vec<Symbol> {
        self.map
            .iter()
            .enumerate()
            .filter(|(_, &m)| m == b)
            .map(|(i, _)| i as Symbol + 1)
            .collect()
    }
}

fn bit(row: &[u64], j: usize) -> bool {
    row[j / 64] >> (j % 64) & 1 == 1
}

impl ShiftSpace {
    /// Build a Markov shift on `1..=alphabet_size` from its edge list.
    pub fn new(alphabet_size: usize, edges: impl IntoIterator<Item = (Symbol, Symbol)>) -> Result<Self> {
        let space = Self::from_edges(alphabet_size, edges)?;
        space.validate_rows_and_columns()?;
        Ok(space)
    }

    fn from_edges(
        alphabet_size: usize,
        edges: impl IntoIterator<Item = (Symbol, Symbol)>,
    ) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::InvalidShift("alphabet_size must be positive".into()));
        }
        let words = alphabet_size.div_ceil(64);
        let mut adj = vec![vec![0u64; words]; alphabet_size];
        for (i, j) in edges {
            for s in [i, j] {
                if s == 0 || s as usize > alphabet_size {
                    return Err(Error::InvalidShift(format!(
                        "edge ({i}, {j}) leaves the alphabet 1..={alphabet_size}"
                    )));
                }
            }
            let (a, b) = (i as usize - 1, j as usize - 1);
            adj[a][b / 64] |= 1 << (b % 64);
        }
        let succ = adj
            .iter()
            .map(|row| {
                (0..alphabet_size)
                    .filter(|&j| bit(row, j))
                    .map(|j| j as Symbol + 1)
                    .collect()
            })
            .collect();
        Ok(ShiftSpace {
            alphabet_size,
            succ,
            adj,
            ladder: Vec::new(),
            factor: None,
            automaton: OnceLock::new(),
        })
    }

    fn validate_rows_and_columns(&self) -> Result<()> {
        let mut has_in = vec![false; self.alphabet_size];
        for (i, row) in self.succ.iter().enumerate() {
            if row.is_empty() {
                return Err(Error::InvalidShift(format!("symbol {} has no out-edge", i + 1)));
            }
            for &t in row {
                has_in[t as usize - 1] = true;
            }
        }
        if let Some(i) = has_in.iter().position(|&x| !x) {
            return Err(Error::InvalidShift(format!("symbol {} has no in-edge", i + 1)));
        }
        Ok(())
    }

    /// Full shift on `k` symbols.
    pub fn full(k: usize) -> Result<Self> {
        let k32 = k as Symbol;
        Self::new(k, (1..=k32).flat_map(|i| (1..=k32).map(move |j| (i, j))))
    }

    /// Attach a ladder of truncation levels `l₁ < l₂ < … ≤ k`.
    pub fn with_ladder(mut self, ladder: Vec<usize>) -> Result<Self> {
        for (i, &l) in ladder.iter().enumerate() {
            if l == 0 || l > self.alphabet_size {
                return Err(Error::InvalidShift(format!(
                    "ladder level {l} outside 1..={}",
                    self.alphabet_size
                )));
            }
            if i > 0 && ladder[i - 1] >= l {
                return Err(Error::InvalidShift("ladder must be strictly increasing".into()));
            }
        }
        self.ladder = ladder;
        Ok(self)
    }

    /// Doubling ladder `2, 4, 8, …` capped by (and ending at) the alphabet size.
    pub fn with_doubling_ladder(self) -> Result<Self> {
        let k = self.alphabet_size;
        let mut ladder = Vec::new();
        let mut l = 2usize.min(k);
        while l < k {
            ladder.push(l);
            l *= 2;
        }
        ladder.push(k);
        self.with_ladder(ladder)
    }

    /// Attach a one-block factor map; `map[s-1]` is the image of cover symbol `s`.
    pub fn with_factor_map(mut self, map: Vec<Symbol>) -> Result<Self> {
        let sm = Self::check_map(self.alphabet_size, map, true)?;
        self.factor = Some(sm);
        self.automaton = OnceLock::new();
        Ok(self)
    }

    fn check_map(alphabet_size: usize, map: Vec<Symbol>, require_onto: bool) -> Result<SymbolMap> {
        if map.len() != alphabet_size {
            return Err(Error::InvalidShift(format!(
                "factor_map has {} entries, alphabet has {alphabet_size}",
                map.len()
            )));
        }
        if map.iter().any(|&m| m == 0) {
            return Err(Error::InvalidShift("factor_map images are 1-based".into()));
        }
        let image_size = *map.iter().max().unwrap() as usize;
        if require_onto {
            let mut hit = vec![false; image_size];
            for &m in &map {
                hit[m as usize - 1] = true;
            }
            if let Some(j) = hit.iter().position(|&h| !h) {
                return Err(Error::InvalidShift(format!(
                    "factor_map fiber of image symbol {} is empty",
                    j + 1
                )));
            }
        }
        Ok(SymbolMap { map, image_size })
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    /// Size of the alphabet words are written in (the image alphabet when sofic).
    pub fn visible_alphabet_size(&self) -> usize {
        self.factor
            .as_ref()
            .map_or(self.alphabet_size, |f| f.image_size)
    }

    pub fn is_sofic(&self) -> bool {
        self.factor.is_some()
    }

    pub fn factor_map(&self) -> Option<&SymbolMap> {
        self.factor.as_ref()
    }

    pub fn ladder(&self) -> &[usize] {
        &self.ladder
    }

    pub fn has_edge(&self, i: Symbol, j: Symbol) -> bool {
        let (a, b) = (i as usize, j as usize);
        if a == 0 || b == 0 || a > self.alphabet_size || b > self.alphabet_size {
            return false;
        }
        bit(&self.adj[a - 1], b - 1)
    }

    /// Cover successors of `s`, ascending.
    pub fn successors(&self, s: Symbol) -> &[Symbol] {
        &self.succ[s as usize - 1]
    }

    pub fn edges(&self) -> impl Iterator<Item = (Symbol, Symbol)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |&j| (i as Symbol + 1, j)))
    }

    pub fn edge_count(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    /// Visible image of cover symbol `s`.
    pub fn image(&self, s: Symbol) -> Symbol {
        self.factor.as_ref().map_or(s, |f| f.image(s))
    }

    /// The Markov cover alone (factor map and ladder dropped).
    pub fn cover(&self) -> ShiftSpace {
        ShiftSpace {
            alphabet_size: self.alphabet_size,
            succ: self.succ.clone(),
            adj: self.adj.clone(),
            ladder: Vec::new(),
            factor: None,
            automaton: OnceLock::new(),
        }
    }

    /// Induced shift on cover symbols `1..=level`.
    ///
    /// Fails when the induced graph has a symbol without in- or out-edges.
    pub fn truncate(&self, level: usize) -> Result<ShiftSpace> {
        if level == 0 || level > self.alphabet_size {
            return Err(Error::InvalidShift(format!(
                "truncation level {level} outside 1..={}",
                self.alphabet_size
            )));
        }
        if level == self.alphabet_size {
            let mut s = self.clone();
            s.ladder.clear();
            return Ok(s);
        }
        let l32 = level as Symbol;
        let edges: Vec<_> = self.edges().filter(|&(i, j)| i <= l32 && j <= l32).collect();
        let mut t = Self::from_edges(level, edges)?;
        t.validate_rows_and_columns().map_err(|e| {
            Error::Condition(format!("truncation to level {level} is degenerate ({e})"))
        })?;
        if let Some(f) = &self.factor {
            t.factor = Some(Self::check_map(level, f.map[..level].to_vec(), false)?);
        }
        Ok(t)
    }

    /// Truncation at ladder index `index` (0-based).
    pub fn level(&self, index: usize) -> Result<ShiftSpace> {
        let l = *self.ladder.get(index).ok_or(Error::LevelOutOfRange {
            index,
            len: self.ladder.len(),
        })?;
        self.truncate(l)
    }

    fn resolve_level(&self, level: Option<usize>) -> Result<std::borrow::Cow<'_, ShiftSpace>> {
        match level {
            None => Ok(std::borrow::Cow::Borrowed(self)),
            Some(i) => Ok(std::borrow::Cow::Owned(self.level(i)?)),
        }
    }

    /// Deterministic presentation of the visible language (built once).
    pub fn automaton(&self) -> Result<Arc<LanguageAutomaton>> {
        if let Some(a) = self.automaton.get() {
            return Ok(a.clone());
        }
        let image: Vec<Symbol> = (1..=self.alphabet_size as Symbol).map(|s| self.image(s)).collect();
        let built = Arc::new(LanguageAutomaton::build(
            &self.succ,
            &image,
            self.visible_alphabet_size(),
        )?);
        Ok(self.automaton.get_or_init(|| built).clone())
    }

    /// Whether every symbol reaches every other symbol in the cover graph.
    pub fn is_irreducible(&self) -> bool {
        let k = self.alphabet_size;
        let reach = |forward: bool| {
            let mut pred: Vec<Vec<Symbol>> = Vec::new();
            if !forward {
                pred = vec![Vec::new(); k];
                for (i, j) in self.edges() {
                    pred[j as usize - 1].push(i);
                }
            }
            let mut seen = vec![false; k];
            let mut stack = vec![1 as Symbol];
            seen[0] = true;
            while let Some(s) = stack.pop() {
                let next = if forward {
                    &self.succ[s as usize - 1]
                } else {
                    &pred[s as usize - 1]
                };
                for &t in next {
                    if !seen[t as usize - 1] {
                        seen[t as usize - 1] = true;
                        stack.push(t);
                    }
                }
            }
            seen.into_iter().all(|x| x)
        };
        reach(true) && reach(false)
    }

    /// Whether `w` belongs to the (visible) language.
    pub fn is_allowable(&self, w: &Word) -> bool {
        self.is_allowable_symbols(w.symbols())
    }

    pub(crate) fn is_allowable_symbols(&self, w: &[Symbol]) -> bool {
        let vk = self.visible_alphabet_size() as Symbol;
        if w.iter().any(|&s| s == 0 || s > vk) {
            return false;
        }
        if self.factor.is_none() {
            return w.windows(2).all(|p| self.has_edge(p[0], p[1]));
        }
        match self.automaton() {
            Ok(a) => a.run(LanguageAutomaton::START, w).is_some(),
            Err(_) => false,
        }
    }

    /// Whether a cover word is a path of the Markov cover.
    pub fn is_cover_path(&self, w: &[Symbol]) -> bool {
        w.iter().all(|&s| s >= 1 && s as usize <= self.alphabet_size)
            && w.windows(2).all(|p| self.has_edge(p[0], p[1]))
    }

    /// Number of allowable words of length `n` (saturating).
    pub fn count_words(&self, n: usize) -> Result<u128> {
        if n == 0 {
            return Ok(1);
        }
        let a = self.automaton()?;
        let mut cur = vec![0u128; a.num_states()];
        cur[0] = 1;
        for _ in 0..n {
            let mut next = vec![0u128; a.num_states()];
            for (q, &c) in cur.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for &(_, r) in a.transitions(q as u32) {
                    next[r as usize] = next[r as usize].saturating_add(c);
                }
            }
            cur = next;
        }
        Ok(cur.iter().fold(0u128, |acc, &c| acc.saturating_add(c)))
    }

    /// Visit every allowable word of length `n` starting at automaton state
    /// `from`, in lexicographic order.
    pub(crate) fn visit_from(
        &self,
        automaton: &LanguageAutomaton,
        from: u32,
        n: usize,
        prefix: &mut Vec<Symbol>,
        f: &mut dyn FnMut(&[Symbol], u32),
    ) {
        if n == 0 {
            f(prefix, from);
            return;
        }
        for &(b, next) in automaton.transitions(from) {
            prefix.push(b);
            self.visit_from(automaton, next, n - 1, prefix, f);
            prefix.pop();
        }
    }

    /// Visit `B_n` in lexicographic order.
    pub fn for_each_word(&self, n: usize, mut f: impl FnMut(&[Symbol])) -> Result<()> {
        let a = self.automaton()?;
        let mut buf = Vec::with_capacity(n);
        self.visit_from(&a, LanguageAutomaton::START, n, &mut buf, &mut |w, _| f(w));
        Ok(())
    }

    /// Per-first-symbol partitions of `B_n`, folded in parallel and returned
    /// in symbol order. `n = 0` yields a single partition holding `ε`.
    pub(crate) fn fold_partitions<R, F>(&self, n: usize, fold: F) -> Result<Vec<R>>
    where
        R: Send,
        F: Fn(&mut dyn FnMut(&mut dyn FnMut(&[Symbol]))) -> R + Sync + Send,
    {
        let a = self.automaton()?;
        if n == 0 {
            return Ok(vec![fold(&mut |g| g(&[]))]);
        }
        let firsts: Vec<(Symbol, u32)> = a.transitions(LanguageAutomaton::START).to_vec();
        Ok(parallel::map_ordered(&firsts, |&(b, q)| {
            fold(&mut |g| {
                let mut buf = Vec::with_capacity(n);
                buf.push(b);
                self.visit_from(&a, q, n - 1, &mut buf, &mut |w, _| g(w));
            })
        }))
    }

    /// `B_n` at the given ladder level, lexicographically ordered.
    pub fn enumerate_words(&self, n: usize, level: Option<usize>) -> Result<Vec<Word>> {
        let space = self.resolve_level(level)?;
        let parts = space.fold_partitions(n, |visit| {
            let mut out = Vec::new();
            visit(&mut |w| out.push(Word::from(w)));
            out
        })?;
        Ok(parts.into_iter().flatten().collect())
    }

    /// Words `w` of length `n` with `w₁ = a` and `w·w` allowable, lexicographic.
    pub fn periodic_words(&self, n: usize, a: Symbol) -> Result<Vec<Word>> {
        let vk = self.visible_alphabet_size();
        if a == 0 || a as usize > vk {
            return Err(Error::InvalidWord(
                a.to_string(),
                format!("anchor outside 1..={vk}"),
            ));
        }
        if n == 0 {
            return Ok(Vec::new());
        }
        let auto = self.automaton()?;
        let Some(q) = auto.step(LanguageAutomaton::START, a) else {
            return Ok(Vec::new());
        };
        let mut out = Vec::new();
        let mut buf = vec![a];
        self.visit_from(&auto, q, n - 1, &mut buf, &mut |w, end| {
            let closes = if self.factor.is_none() {
                self.has_edge(w[w.len() - 1], w[0])
            } else {
                auto.run(end, w).is_some()
            };
            if closes {
                out.push(Word::from(w));
            }
        });
        Ok(out)
    }

    /// Cover paths mapping onto the visible word `v`, lexicographic.
    pub fn preimage_paths(&self, v: &[Symbol]) -> Vec<Word> {
        let mut out = Vec::new();
        if v.is_empty() {
            out.push(Word::empty());
            return out;
        }
        let fibers: Vec<Vec<Symbol>> = match &self.factor {
            None => v.iter().map(|&b| vec![b]).collect(),
            Some(f) => v.iter().map(|&b| f.fiber(b)).collect(),
        };
        if fibers.iter().any(Vec::is_empty) {
            return out;
        }
        fn rec(
            space: &ShiftSpace,
            fibers: &[Vec<Symbol>],
            buf: &mut Vec<Symbol>,
            out: &mut Vec<Word>,
        ) {
            let i = buf.len();
            if i == fibers.len() {
                out.push(Word::from(buf.as_slice()));
                return;
            }
            for &s in &fibers[i] {
                if i == 0 || space.has_edge(buf[i - 1], s) {
                    buf.push(s);
                    rec(space, fibers, buf, out);
                    buf.pop();
                }
            }
        }
        let mut buf = Vec::with_capacity(v.len());
        rec(self, &fibers, &mut buf, &mut out);
        out
    }
}
