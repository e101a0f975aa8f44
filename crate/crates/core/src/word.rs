//! Finite words over a 1-based symbol alphabet.
//!
//! Text form: symbols separated by `.`, `,` or whitespace (`3.12.4`), or a
//! compact form with one character per symbol (`121`, `aab`; letters map
//! `a = 1 … z = 26`). The empty word is written `""` or `ε`. `Display`
//! uses the compact digit form when every symbol is at most 9 and the
//! dotted form otherwise, so printed words always parse back.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::Error;

/// A symbol of the alphabet `1..=k`.
pub type Symbol = u32;

#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<Symbol>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(symbols: Vec<Symbol>) -> Self {
        Word(symbols)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<Symbol> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<Symbol> {
        self.0.last().copied()
    }

    /// `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        let mut v = Vec::with_capacity(self.len() + other.len());
        v.extend_from_slice(&self.0);
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// `a · b · c` without intermediate allocation.
    pub fn join3(a: &[Symbol], b: &[Symbol], c: &[Symbol]) -> Word {
        let mut v = Vec::with_capacity(a.len() + b.len() + c.len());
        v.extend_from_slice(a);
        v.extend_from_slice(b);
        v.extend_from_slice(c);
        Word(v)
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }
}

impl From<Vec<Symbol>> for Word {
    fn from(v: Vec<Symbol>) -> Self {
        Word(v)
    }
}

impl From<&[Symbol]> for Word {
    fn from(v: &[Symbol]) -> Self {
        Word(v.to_vec())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        if self.0.iter().all(|&s| (1..=9).contains(&s)) {
            for s in &self.0 {
                write!(f, "{s}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|s| s.to_string()).collect();
            f.write_str(&parts.join("."))
        }
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.is_empty() || t == "ε" || t.eq_ignore_ascii_case("eps") {
            return Ok(Word::empty());
        }
        let bad = |why: &str| Error::InvalidWord(s.to_string(), why.to_string());
        if t.contains(['.', ',', ' ', '\t']) {
            let mut out = Vec::new();
            for part in t.split(['.', ',', ' ', '\t']).filter(|p| !p.is_empty()) {
                let v: Symbol = part.parse().map_err(|_| bad("non-numeric symbol"))?;
                if v == 0 {
                    return Err(bad("symbols are 1-based"));
                }
                out.push(v);
            }
            return Ok(Word(out));
        }
        let mut out = Vec::with_capacity(t.len());
        for c in t.chars() {
            let v = match c {
                '1'..='9' => c as Symbol - '0' as Symbol,
                'a'..='z' => c as Symbol - 'a' as Symbol + 1,
                '0' => return Err(bad("symbols are 1-based")),
                _ => return Err(bad("unexpected character")),
            };
            out.push(v);
        }
        Ok(Word(out))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Word {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse a word literal in tests and examples; panics on malformed input.
pub fn w(s: &str) -> Word {
    s.parse().expect("malformed word literal")
}
