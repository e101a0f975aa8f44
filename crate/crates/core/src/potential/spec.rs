//! JSON potential spec files.
//!
//! ```json
//! {"type": "additive-cylinder", "depth": 1, "values": {"1": -1.2039, "2": -0.3567}}
//! {"type": "matrix-cocycle", "matrices": [[[2, 0], [0, 1]]], "norm": "max-row-sum"}
//! {"type": "preimage-count"}
//! {"type": "pushforward", "inner": {"type": "additive-cylinder", "depth": 1, "values": {}}}
//! {"type": "tabulated-aa", "lambda": [0.5, 0.25], "c": "alternating"}
//! {"type": "scaled", "inner": {"type": "preimage-count"}, "per-step": -0.5}
//! {"type": "fiber-power", "exponent": 3}
//! ```
//!
//! Additive `values` are log weights keyed by depth-`d` words; unlisted
//! windows get `default` (0 unless given). With `"scale": "linear"` the
//! values are weights and are logged on load. Every kind accepts optional
//! `declared_c` and `declared_m`.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use super::{CSequence, WeightSystem};
use crate::cocycle::{MatrixFamily, Norm};
use crate::error::{Error, Result};
use crate::word::Word;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scale {
    #[default]
    Log,
    Linear,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    AdditiveCylinder {
        depth: usize,
        #[serde(default)]
        values: BTreeMap<String, f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        default: Option<f64>,
        #[serde(default)]
        scale: Scale,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_m: Option<f64>,
    },
    TabulatedAa {
        lambda: Vec<f64>,
        c: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_m: Option<f64>,
    },
    MatrixCocycle {
        matrices: Vec<Vec<Vec<f64>>>,
        #[serde(default)]
        norm: Norm,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_m: Option<f64>,
    },
    PreimageCount {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_m: Option<f64>,
    },
    FiberPower {
        exponent: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_m: Option<f64>,
    },
    Pushforward {
        inner: Box<PotentialSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_m: Option<f64>,
    },
    Scaled {
        inner: Box<PotentialSpec>,
        #[serde(rename = "per-step")]
        per_step: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_c: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        declared_m: Option<f64>,
    },
}

impl PotentialSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|source| Error::Json {
            context: "potential spec".into(),
            source,
        })
    }

    pub fn build(&self) -> Result<WeightSystem> {
        let (ws, c, m) = match self {
            PotentialSpec::AdditiveCylinder {
                depth,
                values,
                default,
                scale,
                declared_c,
                declared_m,
            } => {
                let conv = |v: f64| match scale {
                    Scale::Log => v,
                    Scale::Linear => v.ln(),
                };
                if *scale == Scale::Linear && values.values().chain(default).any(|&v| v < 0.0) {
                    return Err(Error::InvalidPotential(
                        "linear-scale values must be nonnegative".into(),
                    ));
                }
                let mut table = HashMap::with_capacity(values.len());
                for (k, &v) in values {
                    let word: Word = k.parse()?;
                    if word.len() != *depth {
                        return Err(Error::InvalidPotential(format!(
                            "values key `{k}` has length {}, depth is {depth}",
                            word.len()
                        )));
                    }
                    table.insert(word.into_symbols(), conv(v));
                }
                let default = default.map_or(0.0, conv);
                (WeightSystem::additive(*depth, table, default)?, declared_c, declared_m)
            }
            PotentialSpec::TabulatedAa {
                lambda,
                c,
                declared_c,
                declared_m,
            } => (
                WeightSystem::tabulated(lambda, CSequence::parse(c)?)?,
                declared_c,
                declared_m,
            ),
            PotentialSpec::MatrixCocycle {
                matrices,
                norm,
                declared_c,
                declared_m,
            } => (
                WeightSystem::cocycle(MatrixFamily::new(matrices.clone(), *norm)?),
                declared_c,
                declared_m,
            ),
            PotentialSpec::PreimageCount {
                declared_c,
                declared_m,
            } => (WeightSystem::preimage_count(), declared_c, declared_m),
            PotentialSpec::FiberPower {
                exponent,
                declared_c,
                declared_m,
            } => (WeightSystem::fiber_power(*exponent)?, declared_c, declared_m),
            PotentialSpec::Pushforward {
                inner,
                declared_c,
                declared_m,
            } => (WeightSystem::pushforward(inner.build()?), declared_c, declared_m),
            PotentialSpec::Scaled {
                inner,
                per_step,
                declared_c,
                declared_m,
            } => {
                if !per_step.is_finite() {
                    return Err(Error::InvalidPotential("per-step must be finite".into()));
                }
                (WeightSystem::scaled(inner.build()?, *per_step), declared_c, declared_m)
            }
        };
        ws.with_declared(*c, *m)
    }
}

impl WeightSystem {
    pub fn from_json(text: &str) -> Result<WeightSystem> {
        PotentialSpec::from_json(text)?.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shift::ShiftSpace;
    use crate::word::w;

    #[test]
    fn parses_every_kind() {
        let full2 = ShiftSpace::full(2).unwrap();
        let bern = WeightSystem::from_json(
            r#"{"type":"additive-cylinder","depth":1,"values":{"1":0.3,"2":0.7},"scale":"linear"}"#,
        )
        .unwrap();
        assert!((bern.eval(&full2, &[1, 2]) - 0.21f64.ln()).abs() < 1e-12);

        let mc = WeightSystem::from_json(
            r#"{"type":"matrix-cocycle","matrices":[[[2,0],[0,1]],[[3,0],[0,1]]]}"#,
        )
        .unwrap();
        assert!((mc.eval(&full2, &[1, 2, 2, 1]) - 36f64.ln()).abs() < 1e-12);

        let tab = WeightSystem::from_json(r#"{"type":"tabulated-aa","lambda":[0.5,0.5],"c":"one"}"#)
            .unwrap();
        assert!((tab.eval(&full2, &[1, 1]) - 0.25f64.ln()).abs() < 1e-12);

        let sc = WeightSystem::from_json(
            r#"{"type":"scaled","per-step":1.5,"inner":{"type":"preimage-count"}}"#,
        )
        .unwrap();
        assert!((sc.eval(&full2, &[1, 2]) - 3.0).abs() < 1e-12);

        let pf = WeightSystem::from_json(
            r#"{"type":"pushforward","inner":{"type":"additive-cylinder","depth":1,"values":{}}}"#,
        )
        .unwrap();
        let s = ShiftSpace::full(3).unwrap().with_factor_map(vec![1, 1, 2]).unwrap();
        assert!((pf.log_weight(&s, &w("aab")).unwrap() - 4f64.ln()).abs() < 1e-12);

        let fp = WeightSystem::from_json(r#"{"type":"fiber-power","exponent":1,"declared_c":0}"#)
            .unwrap();
        assert!((fp.eval(&s, &[1, 1]) - 0.0).abs() < 1e-12);
        assert_eq!(fp.declared_c(), Some(0.0));
    }

    #[test]
    fn diagnostics() {
        let e = WeightSystem::from_json(r#"{"type":"additive-cylinder","depth":2,"values":{"1":0}}"#)
            .unwrap_err();
        assert!(e.to_string().contains("depth is 2"), "{e}");
        let e = WeightSystem::from_json(r#"{"type":"bogus"}"#).unwrap_err();
        assert!(e.to_string().contains("bogus"), "{e}");
        let e = WeightSystem::from_json("{\"type\":\"preimage-count\",\n\"extra\":1}").unwrap_err();
        assert!(e.to_string().contains("extra"), "{e}");
        let e = WeightSystem::from_json("{\"type\":\"preimage-count\",\n\"declared_c\": }").unwrap_err();
        assert!(e.to_string().contains("line 2"), "{e}");
        let e = WeightSystem::from_json(r#"{"type":"tabulated-aa","lambda":[1],"c":"weird"}"#)
            .unwrap_err();
        assert!(e.to_string().contains("weird"));
    }
}
