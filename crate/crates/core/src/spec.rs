//! Channel specification files and the built-in channel library.
//!
//! Complex matrices are row-major nested arrays of `[re, im]` pairs. A spec
//! gives either Kraus operators or a row-stochastic `classical_matrix`, and
//! with Kraus operators optionally a fixed state set and POVM.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adjacency::{AdjacencyError, StateSet};
use crate::classical::{check_stochastic, embed_classical, embedding_dim, pentagon_matrix, ClassicalError};
use crate::quantum::{
    pauli_x, pauli_y, pauli_z, ComplexMatrix, DensityMatrix, Povm, QuantumChannel, QuantumError, Tolerances,
};

/// `[re, im]` entries, row-major.
pub type JsonMatrix = Vec<Vec<[f64; 2]>>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("spec must give exactly one of `kraus` and `classical_matrix`")]
    Source,
    #[error("{what}: {detail}")]
    Shape { what: String, detail: String },
    #[error("`states` and `povm` must be given together")]
    Incomplete,
    #[error("`states` and `povm` are fixed by the embedding and cannot be given with `classical_matrix`")]
    ClassicalOverride,
    #[error("declared dim {declared} but the data has dimension {actual}")]
    DimMismatch { declared: usize, actual: usize },
    #[error("{what}: {source}")]
    Quantum {
        what: String,
        #[source]
        source: QuantumError,
    },
    #[error(transparent)]
    Classical(#[from] ClassicalError),
    #[error(transparent)]
    Adjacency(#[from] AdjacencyError),
    #[error("unknown builtin `{0}`")]
    UnknownBuiltin(String),
}

pub type Result<T, E = SpecError> = std::result::Result<T, E>;

pub fn to_json_matrix(m: &ComplexMatrix) -> JsonMatrix {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
        .collect()
}

/// Square matrix of size `dim` from its JSON form.
pub fn from_json_matrix(rows: &JsonMatrix, dim: usize, what: &str) -> Result<ComplexMatrix> {
    let shape = |detail: String| SpecError::Shape {
        what: what.to_string(),
        detail,
    };
    if rows.len() != dim {
        return Err(shape(format!("expected {dim} rows, found {}", rows.len())));
    }
    let mut m = ComplexMatrix::zeros(dim, dim);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != dim {
            return Err(shape(format!("row {r} has {} entries, expected {dim}", row.len())));
        }
        for (c, &[re, im]) in row.iter().enumerate() {
            if !(re.is_finite() && im.is_finite()) {
                return Err(shape(format!("entry ({r}, {c}) is not finite")));
            }
            m[(r, c)] = Complex64::new(re, im);
        }
    }
    Ok(m)
}

/// On-disk channel description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub name: String,
    /// Required with `kraus`; optional with `classical_matrix`, where it
    /// must equal `max(inputs, outputs)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kraus: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub povm: Option<Vec<JsonMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub classical_matrix: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelSource {
    Kraus,
    Classical,
}

/// Validated spec: the channel plus a fixed `(S, P)` when one was given.
#[derive(Debug, Clone)]
pub struct Problem {
    pub name: String,
    pub source: ChannelSource,
    pub channel: QuantumChannel,
    pub fixed: Option<(StateSet, Povm)>,
}

impl ChannelSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| SpecError::Json(e.to_string()))
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    /// Checks shapes and the physical constraints; `allow_overcomplete`
    /// admits more given states than the dimension.
    pub fn validate(&self, allow_overcomplete: bool) -> Result<Problem> {
        let tol = Tolerances::default();
        match (&self.kraus, &self.classical_matrix) {
            (Some(kraus), None) => {
                let dim = self.dim.ok_or_else(|| SpecError::Shape {
                    what: "dim".into(),
                    detail: "required with `kraus`".into(),
                })?;
                if dim == 0 {
                    return Err(SpecError::Shape {
                        what: "dim".into(),
                        detail: "must be at least 1".into(),
                    });
                }
                let ops = kraus
                    .iter()
                    .enumerate()
                    .map(|(i, k)| from_json_matrix(k, dim, &format!("kraus[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                let channel = QuantumChannel::new(ops, &tol).map_err(|source| SpecError::Quantum {
                    what: "kraus".into(),
                    source,
                })?;
                let fixed = match (&self.states, &self.povm) {
                    (None, None) => None,
                    (Some(states), Some(povm)) => Some(self.fixed_pair(states, povm, dim, allow_overcomplete, &tol)?),
                    _ => return Err(SpecError::Incomplete),
                };
                Ok(Problem {
                    name: self.name.clone(),
                    source: ChannelSource::Kraus,
                    channel,
                    fixed,
                })
            }
            (None, Some(w)) => {
                if self.states.is_some() || self.povm.is_some() {
                    return Err(SpecError::ClassicalOverride);
                }
                check_stochastic(w)?;
                let actual = embedding_dim(w)?;
                if let Some(declared) = self.dim {
                    if declared != actual {
                        return Err(SpecError::DimMismatch { declared, actual });
                    }
                }
                let e = embed_classical(w)?;
                Ok(Problem {
                    name: self.name.clone(),
                    source: ChannelSource::Classical,
                    channel: e.channel,
                    fixed: Some((e.states, e.povm)),
                })
            }
            _ => Err(SpecError::Source),
        }
    }

    fn fixed_pair(
        &self,
        states: &[JsonMatrix],
        povm: &[JsonMatrix],
        dim: usize,
        allow_overcomplete: bool,
        tol: &Tolerances,
    ) -> Result<(StateSet, Povm)> {
        let rhos = states
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let what = format!("states[{i}]");
                let mat = from_json_matrix(m, dim, &what)?;
                DensityMatrix::new(mat, tol).map_err(|source| SpecError::Quantum { what, source })
            })
            .collect::<Result<Vec<_>>>()?;
        let elements = povm
            .iter()
            .enumerate()
            .map(|(i, m)| from_json_matrix(m, dim, &format!("povm[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let p = Povm::new(elements, tol).map_err(|source| SpecError::Quantum {
            what: "povm".into(),
            source,
        })?;
        Ok((StateSet::new(rhos, allow_overcomplete)?, p))
    }
}

/// Spec with the given Kraus operators and no fixed `(S, P)`.
pub fn kraus_spec(name: &str, kraus: &[ComplexMatrix]) -> ChannelSpec {
    ChannelSpec {
        name: name.to_string(),
        dim: kraus.first().map(|k| k.nrows()),
        kraus: Some(kraus.iter().map(to_json_matrix).collect()),
        states: None,
        povm: None,
        classical_matrix: None,
    }
}

/// JSON form of a state set.
pub fn states_to_json(s: &StateSet) -> Vec<JsonMatrix> {
    s.states().iter().map(|r| to_json_matrix(r.matrix())).collect()
}

pub fn povm_to_json(p: &Povm) -> Vec<JsonMatrix> {
    p.elements().iter().map(to_json_matrix).collect()
}

/// Names accepted by [`builtin`], as patterns.
pub const BUILTIN_NAMES: &[&str] = &["identity-d<K>", "depolarizing-p<P>", "dephasing-p<P>", "bitflip-p<P>", "pentagon"];

fn parse_probability(name: &str, raw: &str) -> Result<f64> {
    match raw.parse::<f64>() {
        Ok(p) if (0.0..=1.0).contains(&p) => Ok(p),
        _ => Err(SpecError::UnknownBuiltin(name.to_string())),
    }
}

fn scaled(m: ComplexMatrix, weight: f64) -> ComplexMatrix {
    m.scale(weight.sqrt())
}

/// Built-in channels:
///
/// * `identity-d<K>`: the identity channel on dimension `K >= 1`.
/// * `depolarizing-p<P>`: `{sqrt(1 - 3P/4) I, sqrt(P/4) X, sqrt(P/4) Y, sqrt(P/4) Z}`,
///   so `rho -> (1 - P) rho + P I/2`; `P = 1` is fully depolarizing.
/// * `dephasing-p<P>`: `{sqrt(1 - P) I, sqrt(P) Z}`.
/// * `bitflip-p<P>`: `{sqrt(1 - P) I, sqrt(P) X}`.
/// * `pentagon`: classical channel with `W(j|i) = 1/2` for `j in {i, i + 1 mod 5}`.
///
/// The Kraus builtins fix no `(S, P)`; analysis searches for one.
pub fn builtin(name: &str) -> Result<ChannelSpec> {
    let unknown = || SpecError::UnknownBuiltin(name.to_string());
    let id2 = || ComplexMatrix::identity(2, 2);
    if name == "pentagon" {
        return Ok(ChannelSpec {
            name: name.to_string(),
            dim: Some(5),
            kraus: None,
            states: None,
            povm: None,
            classical_matrix: Some(pentagon_matrix()),
        });
    }
    if let Some(k) = name.strip_prefix("identity-d") {
        let d: usize = k.parse().map_err(|_| unknown())?;
        if d == 0 {
            return Err(unknown());
        }
        return Ok(kraus_spec(name, &[ComplexMatrix::identity(d, d)]));
    }
    let kraus = if let Some(raw) = name.strip_prefix("depolarizing-p") {
        let p = parse_probability(name, raw)?;
        vec![
            scaled(id2(), 1.0 - 0.75 * p),
            scaled(pauli_x(), p / 4.0),
            scaled(pauli_y(), p / 4.0),
            scaled(pauli_z(), p / 4.0),
        ]
    } else if let Some(raw) = name.strip_prefix("dephasing-p") {
        let p = parse_probability(name, raw)?;
        vec![scaled(id2(), 1.0 - p), scaled(pauli_z(), p)]
    } else if let Some(raw) = name.strip_prefix("bitflip-p") {
        let p = parse_probability(name, raw)?;
        vec![scaled(id2(), 1.0 - p), scaled(pauli_x(), p)]
    } else {
        return Err(unknown());
    };
    Ok(kraus_spec(name, &kraus))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adjacency::probability_table;

    #[test]
    fn matrix_json_roundtrip() {
        let m = pauli_y();
        let j = to_json_matrix(&m);
        assert_eq!(j[0][1], [0.0, -1.0]);
        assert_eq!(from_json_matrix(&j, 2, "m").unwrap(), m);
        assert!(matches!(from_json_matrix(&j, 3, "m"), Err(SpecError::Shape { .. })));
    }

    #[test]
    fn builtins_validate() {
        for name in [
            "identity-d1",
            "identity-d2",
            "identity-d3",
            "identity-d5",
            "depolarizing-p1",
            "depolarizing-p0.3",
            "dephasing-p0.5",
            "bitflip-p0",
            "pentagon",
        ] {
            let spec = builtin(name).unwrap();
            let text = spec.to_json_pretty();
            let back = ChannelSpec::from_json(&text).unwrap();
            assert_eq!(back, spec);
            back.validate(false).unwrap();
        }
        for bad in ["identity-d0", "identity-dx", "depolarizing-p2", "dephasing-p-0.1", "triangle"] {
            assert!(matches!(builtin(bad), Err(SpecError::UnknownBuiltin(_))), "{bad}");
        }
    }

    #[test]
    fn full_depolarizing_outputs_maximally_mixed() {
        let ch = builtin("depolarizing-p1").unwrap().validate(false).unwrap().channel;
        let out = ch.apply(&DensityMatrix::basis(2, 0)).unwrap();
        assert!((out.matrix() - DensityMatrix::maximally_mixed(2).matrix()).norm() < 1e-15);
    }

    #[test]
    fn builtin_classical_embedding_is_exact() {
        let problem = builtin("pentagon").unwrap().validate(false).unwrap();
        assert_eq!(problem.source, ChannelSource::Classical);
        let (s, p) = problem.fixed.unwrap();
        let table = probability_table(&problem.channel, &s, &p, &Tolerances::default()).unwrap();
        let w = pentagon_matrix();
        for (row, expected) in table.iter().zip(&w) {
            for (p, q) in row.as_slice().iter().zip(expected) {
                assert!((p - q).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn validation_errors() {
        let mut spec = builtin("identity-d2").unwrap();
        spec.classical_matrix = Some(vec![vec![1.0]]);
        assert_eq!(spec.validate(false).unwrap_err(), SpecError::Source);

        let mut spec = builtin("identity-d2").unwrap();
        spec.states = Some(vec![to_json_matrix(DensityMatrix::basis(2, 0).matrix())]);
        assert_eq!(spec.validate(false).unwrap_err(), SpecError::Incomplete);

        spec.povm = Some(povm_to_json(&Povm::computational(2)));
        let problem = spec.validate(false).unwrap();
        assert_eq!(problem.fixed.unwrap().0.len(), 1);

        let mut spec = builtin("identity-d2").unwrap();
        spec.kraus = Some(vec![to_json_matrix(&ComplexMatrix::identity(2, 2).scale(0.9))]);
        assert!(matches!(
            spec.validate(false),
            Err(SpecError::Quantum {
                source: QuantumError::NotTracePreserving(_),
                ..
            })
        ));

        let mut spec = builtin("pentagon").unwrap();
        spec.dim = Some(4);
        assert_eq!(spec.validate(false).unwrap_err(), SpecError::DimMismatch { declared: 4, actual: 5 });

        let mut spec = builtin("pentagon").unwrap();
        spec.povm = Some(povm_to_json(&Povm::computational(5)));
        assert_eq!(spec.validate(false).unwrap_err(), SpecError::ClassicalOverride);

        let mut spec = builtin("pentagon").unwrap();
        spec.classical_matrix = Some(vec![vec![0.5, 0.4]]);
        assert!(matches!(spec.validate(false), Err(SpecError::Classical(_))));

        assert!(matches!(
            ChannelSpec::from_json(r#"{"name":"x","dim":2,"krauss":[]}"#),
            Err(SpecError::Json(_))
        ));
    }

    #[test]
    fn non_psd_state_rejected() {
        let mut spec = builtin("identity-d2").unwrap();
        let mut bad = ComplexMatrix::zeros(2, 2);
        bad[(0, 0)] = Complex64::new(1.5, 0.0);
        bad[(1, 1)] = Complex64::new(-0.5, 0.0);
        spec.states = Some(vec![to_json_matrix(&bad)]);
        spec.povm = Some(povm_to_json(&Povm::computational(2)));
        assert!(matches!(
            spec.validate(false),
            Err(SpecError::Quantum {
                source: QuantumError::NotPsd(_),
                ..
            })
        ));
    }
}
