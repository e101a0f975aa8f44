//! JSON shift spec files.
//!
//! ```json
//! { "alphabet_size": 15, "builtin": "example-e1", "ladder": [3, 6, 10, 15],
//!   "factor_map": "natural" }
//! ```
//!
//! `edges` (list of `[i, j]`), `"full": true` or `builtin` give the graph;
//! `builtin` wins when several are present. `factor_map` is either an
//! explicit array `[m(1), …, m(k)]` or `"natural"`, the block-index map
//! used by the `example-e1` and `example-nofinite` fixtures.

use serde::{Deserialize, Serialize};

use super::ShiftSpace;
use crate::error::{Error, Result};
use crate::word::Symbol;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Builtin {
    Full,
    GoldenMean,
    ExampleE1,
    ExampleDif,
    ExampleNofinite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FactorMapSpec {
    Explicit(Vec<Symbol>),
    Named(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShiftSpec {
    pub alphabet_size: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub edges: Option<Vec<[Symbol; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ladder: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factor_map: Option<FactorMapSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub builtin: Option<Builtin>,
}

impl ShiftSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            context: "shift spec".into(),
            source,
        })
    }

    pub fn build(&self) -> Result<ShiftSpace> {
        let k = self.alphabet_size;
        let space = match self.builtin {
            Some(Builtin::Full) => ShiftSpace::full(k)?,
            Some(Builtin::GoldenMean) => {
                if k != 2 {
                    return Err(Error::InvalidShift(
                        "builtin `golden-mean` has alphabet_size 2".into(),
                    ));
                }
                ShiftSpace::golden_mean()
            }
            Some(Builtin::ExampleE1) => ShiftSpace::example_e1(k)?,
            Some(Builtin::ExampleDif) => ShiftSpace::example_dif(k)?,
            Some(Builtin::ExampleNofinite) => ShiftSpace::example_nofinite(k)?,
            None => match (&self.edges, self.full) {
                (_, Some(true)) => ShiftSpace::full(k)?,
                (Some(edges), _) => ShiftSpace::new(k, edges.iter().map(|e| (e[0], e[1])))?,
                (None, _) => {
                    return Err(Error::InvalidShift(
                        "one of `edges`, `full: true` or `builtin` is required".into(),
                    ))
                }
            },
        };
        let space = match &self.ladder {
            Some(l) => space.with_ladder(l.clone())?,
            None => space.with_doubling_ladder()?,
        };
        match &self.factor_map {
            None => Ok(space),
            Some(FactorMapSpec::Explicit(m)) => space.with_factor_map(m.clone()),
            Some(FactorMapSpec::Named(name)) if name == "natural" => match self.builtin {
                Some(Builtin::ExampleE1) | Some(Builtin::ExampleNofinite) => {
                    space.with_factor_map(ShiftSpace::triangular_factor_map(k))
                }
                _ => Err(Error::InvalidShift(
                    "factor_map \"natural\" is only defined for example-e1 and example-nofinite"
                        .into(),
                )),
            },
            Some(FactorMapSpec::Named(other)) => Err(Error::InvalidShift(format!(
                "unknown factor_map `{other}`"
            ))),
        }
    }
}

impl ShiftSpace {
    pub fn from_json(text: &str) -> Result<ShiftSpace> {
        ShiftSpec::from_json(text)?.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_edges_and_builtins() {
        let s = ShiftSpace::from_json(r#"{"alphabet_size":2,"edges":[[1,1],[1,2],[2,1]]}"#).unwrap();
        assert_eq!(s.edge_count(), 3);
        assert_eq!(s.ladder(), &[2]);
        let e1 = ShiftSpace::from_json(
            r#"{"alphabet_size":15,"builtin":"example-e1","factor_map":"natural","ladder":[3,6,10,15]}"#,
        )
        .unwrap();
        assert_eq!(e1.visible_alphabet_size(), 5);
        assert_eq!(e1.ladder(), &[3, 6, 10, 15]);
        let full = ShiftSpace::from_json(r#"{"alphabet_size":8,"full":true}"#).unwrap();
        assert_eq!(full.ladder(), &[2, 4, 8]);
    }

    #[test]
    fn diagnostics_name_the_field() {
        let err = ShiftSpace::from_json(r#"{"alphabet_size":2,"edgez":[]}"#).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("edgez") && msg.contains("line 1"), "{msg}");
        let err = ShiftSpace::from_json(r#"{"alphabet_size":2}"#).unwrap_err();
        assert!(err.to_string().contains("edges"));
        let err = ShiftSpace::from_json(r#"{"alphabet_size":3,"builtin":"golden-mean"}"#).unwrap_err();
        assert!(err.to_string().contains("golden-mean"));
    }
}
