//! JSON instance files.
//!
//! ```json
//! {
//!   "name": "demo", "dim": 2, "q": 2, "rho": 0.35, "omega": [0, 0],
//!   "A": {"matrix": [[0.1, 0], [0, 0.1]]}, "B": ..., "C": ..., "D": ...,
//!   "f": {"matrix": [[1, 0], [0, 1]], "offset": [0, 1]}, "g": ...,
//!   "F": {"P": [[0.25, 0], [0, 0.25]], "Q": [[0.2, 0], [0, 0.2]]},
//!   "H": "additive", "M": "f-minus-g",
//!   "S": "identity", "T": {"kind": "explicit", "nodes": [{"at": [0, 0], "points": [[0, 0]]}]},
//!   "constants": {"tau": 2.9}
//! }
//! ```
//!
//! `M` may also be `{"mode": "first-slot", "scale": 2}`. `S` and `T` accept
//! `"identity"` or an object with `kind` of `affine`, `translates` (adds
//! `offsets`) or `explicit`.

use std::path::Path;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{
    AffineMap, BiSlotMapH, Constants, FiniteSetValuedMap, InclusionInstance, PairMapF, SetValuedMapM, SingleValuedMap,
};
use crate::space::{SpaceConfig, Vector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineSpec {
    pub matrix: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairSpec {
    #[serde(rename = "P")]
    pub p: Vec<Vec<f64>>,
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub offset: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MSpec {
    Mode(String),
    Scaled { mode: String, scale: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub at: Vec<f64>,
    pub points: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetMapSpec {
    Affine {
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<Vec<f64>>,
    },
    Translates {
        matrix: Vec<Vec<f64>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        offset: Option<Vec<f64>>,
        offsets: Vec<Vec<f64>>,
    },
    Explicit {
        nodes: Vec<NodeSpec>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SetSpec {
    Keyword(String),
    Map(SetMapSpec),
}

fn default_q() -> f64 {
    2.0
}

fn additive() -> String {
    "additive".into()
}

fn f_minus_g() -> MSpec {
    MSpec::Mode("f-minus-g".into())
}

fn identity() -> SetSpec {
    SetSpec::Keyword("identity".into())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: usize,
    #[serde(default = "default_q")]
    pub q: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_q: Option<f64>,
    pub rho: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<Vec<f64>>,
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<AffineSpec>,
    #[serde(rename = "B", default, skip_serializing_if = "Option::is_none")]
    pub b: Option<AffineSpec>,
    #[serde(rename = "C", default, skip_serializing_if = "Option::is_none")]
    pub c: Option<AffineSpec>,
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub d: Option<AffineSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<AffineSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<AffineSpec>,
    #[serde(rename = "F", default, skip_serializing_if = "Option::is_none")]
    pub pair_f: Option<PairSpec>,
    #[serde(rename = "H", default = "additive")]
    pub h: String,
    #[serde(rename = "M", default = "f_minus_g")]
    pub m: MSpec,
    #[serde(rename = "S", default = "identity")]
    pub s: SetSpec,
    #[serde(rename = "T", default = "identity")]
    pub t: SetSpec,
    #[serde(default)]
    pub constants: Constants,
}

fn field_error(field: &str, reason: impl std::fmt::Display) -> Error {
    Error::Format(format!("field `{field}`: {reason}"))
}

fn vector(field: &str, dim: usize, v: &[f64]) -> Result<Vector> {
    if v.len() != dim {
        return Err(field_error(field, format!("expected {dim} entries, got {}", v.len())));
    }
    Vector::new(v.to_vec()).map_err(|e| field_error(field, e))
}

fn matrix(field: &str, dim: usize, rows: &[Vec<f64>]) -> Result<DMatrix<f64>> {
    if rows.len() != dim {
        return Err(field_error(field, format!("expected {dim} rows, got {}", rows.len())));
    }
    for (i, r) in rows.iter().enumerate() {
        if r.len() != dim {
            return Err(field_error(&format!("{field}[{i}]"), format!("expected {dim} entries, got {}", r.len())));
        }
        if let Some(j) = r.iter().position(|x| !x.is_finite()) {
            return Err(field_error(&format!("{field}[{i}][{j}]"), "entries must be finite"));
        }
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| rows[i][j]))
}

fn affine(field: &str, dim: usize, m: &[Vec<f64>], offset: Option<&[f64]>) -> Result<AffineMap> {
    let linear = matrix(&format!("{field}.matrix"), dim, m)?;
    let offset = match offset {
        Some(o) => vector(&format!("{field}.offset"), dim, o)?,
        None => Vector::zeros(dim),
    };
    AffineMap::new(linear, offset).map_err(|e| field_error(field, e))
}

fn set_map(field: &str, dim: usize, spec: &SetSpec) -> Result<FiniteSetValuedMap> {
    Ok(match spec {
        SetSpec::Keyword(k) if k == "identity" => FiniteSetValuedMap::Identity,
        SetSpec::Keyword(k) => return Err(field_error(field, format!("unknown keyword {k:?}; expected \"identity\" or an object"))),
        SetSpec::Map(SetMapSpec::Affine { matrix, offset }) => FiniteSetValuedMap::Affine(affine(field, dim, matrix, offset.as_deref())?),
        SetSpec::Map(SetMapSpec::Translates { matrix, offset, offsets }) => {
            if offsets.is_empty() {
                return Err(field_error(&format!("{field}.offsets"), "must not be empty"));
            }
            FiniteSetValuedMap::Translates {
                base: affine(field, dim, matrix, offset.as_deref())?,
                offsets: offsets
                    .iter()
                    .enumerate()
                    .map(|(i, o)| vector(&format!("{field}.offsets[{i}]"), dim, o))
                    .collect::<Result<_>>()?,
            }
        }
        SetSpec::Map(SetMapSpec::Explicit { nodes }) => {
            if nodes.is_empty() {
                return Err(field_error(&format!("{field}.nodes"), "must not be empty"));
            }
            let mut out = Vec::with_capacity(nodes.len());
            for (i, n) in nodes.iter().enumerate() {
                let at = vector(&format!("{field}.nodes[{i}].at"), dim, &n.at)?;
                if n.points.is_empty() {
                    return Err(field_error(&format!("{field}.nodes[{i}].points"), "must not be empty"));
                }
                let pts = n
                    .points
                    .iter()
                    .enumerate()
                    .map(|(j, p)| vector(&format!("{field}.nodes[{i}].points[{j}]"), dim, p))
                    .collect::<Result<Vec<_>>>()?;
                out.push((at, pts));
            }
            FiniteSetValuedMap::Explicit { nodes: out }
        }
    })
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("instance JSON: {e}")))
    }

    pub fn into_instance(&self) -> Result<InclusionInstance> {
        let n = self.dim;
        if n == 0 {
            return Err(field_error("dim", "must be at least 1"));
        }
        let space = SpaceConfig::new(n, self.q, self.c_q).map_err(|e| field_error("q", e))?;
        let map = |field: &str, s: &Option<AffineSpec>| -> Result<SingleValuedMap> {
            Ok(match s {
                Some(s) => affine(field, n, &s.matrix, s.offset.as_deref())?,
                None => AffineMap::new(DMatrix::zeros(n, n), Vector::zeros(n))?,
            }
            .into())
        };
        if self.h != "additive" {
            return Err(field_error("H", format!("unknown mode {:?}; only \"additive\" is supported", self.h)));
        }
        let m = match &self.m {
            MSpec::Mode(mode) => m_mode("M", mode, 1.0)?,
            MSpec::Scaled { mode, scale } => {
                if !scale.is_finite() {
                    return Err(field_error("M.scale", "must be finite"));
                }
                m_mode("M.mode", mode, *scale)?
            }
        };
        let pair_f = match &self.pair_f {
            Some(pf) => PairMapF::affine(
                matrix("F.P", n, &pf.p)?,
                matrix("F.Q", n, &pf.q)?,
                match &pf.offset {
                    Some(o) => vector("F.offset", n, o)?,
                    None => Vector::zeros(n),
                },
            )?,
            None => PairMapF::affine(DMatrix::zeros(n, n), DMatrix::zeros(n, n), Vector::zeros(n))?,
        };
        let omega = match &self.omega {
            Some(o) => vector("omega", n, o)?,
            None => Vector::zeros(n),
        };
        let inst = InclusionInstance {
            space,
            a: map("A", &self.a)?,
            b: map("B", &self.b)?,
            c: map("C", &self.c)?,
            d: map("D", &self.d)?,
            f: map("f", &self.f)?,
            g: map("g", &self.g)?,
            h: BiSlotMapH::Additive,
            pair_f,
            m,
            s: set_map("S", n, &self.s)?,
            t: set_map("T", n, &self.t)?,
            omega,
            rho: self.rho,
            constants: self.constants.clone(),
        };
        inst.validate().map_err(|e| Error::Format(format!("instance: {e}")))?;
        Ok(inst)
    }

    /// Serializable form of an affine instance with built-in modes.
    pub fn from_instance(name: Option<&str>, inst: &InclusionInstance) -> Result<Self> {
        let rows = |m: &DMatrix<f64>| -> Vec<Vec<f64>> { (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect()).collect() };
        let offset = |v: &Vector| -> Option<Vec<f64>> { v.coords().iter().any(|&x| x != 0.0).then(|| v.coords().to_vec()) };
        let spec = |field: &str, m: &SingleValuedMap| -> Result<Option<AffineSpec>> {
            let a = m.as_affine().ok_or_else(|| Error::NotAffine(format!("map {field} is not affine")))?;
            Ok(Some(AffineSpec { matrix: rows(a.matrix()), offset: offset(a.offset()) }))
        };
        let set = |field: &str, s: &FiniteSetValuedMap| -> Result<SetSpec> {
            Ok(match s {
                FiniteSetValuedMap::Identity => identity(),
                FiniteSetValuedMap::Affine(a) => SetSpec::Map(SetMapSpec::Affine { matrix: rows(a.matrix()), offset: offset(a.offset()) }),
                FiniteSetValuedMap::Translates { base, offsets } => SetSpec::Map(SetMapSpec::Translates {
                    matrix: rows(base.matrix()),
                    offset: offset(base.offset()),
                    offsets: offsets.iter().map(|o| o.coords().to_vec()).collect(),
                }),
                FiniteSetValuedMap::Explicit { nodes } => SetSpec::Map(SetMapSpec::Explicit {
                    nodes: nodes
                        .iter()
                        .map(|(at, pts)| NodeSpec { at: at.coords().to_vec(), points: pts.iter().map(|p| p.coords().to_vec()).collect() })
                        .collect(),
                }),
                FiniteSetValuedMap::Custom { .. } => return Err(Error::NotAffine(format!("set-valued map {field} is a callback"))),
            })
        };
        if !matches!(inst.h, BiSlotMapH::Additive) {
            return Err(Error::NotAffine("H is a callback".into()));
        }
        let m = match inst.m {
            SetValuedMapM::Difference { scale } if scale == 1.0 => f_minus_g(),
            SetValuedMapM::Difference { scale } => MSpec::Scaled { mode: "f-minus-g".into(), scale },
            SetValuedMapM::FirstSlot { scale } => MSpec::Scaled { mode: "first-slot".into(), scale },
            SetValuedMapM::Custom(_) => return Err(Error::NotAffine("M is a callback".into())),
        };
        let pair_f = match &inst.pair_f {
            PairMapF::Affine { p, q, offset: o } => Some(PairSpec { p: rows(p), q: rows(q), offset: offset(o) }),
            PairMapF::Custom { .. } => return Err(Error::NotAffine("F is a callback".into())),
        };
        Ok(Self {
            name: name.map(str::to_string),
            dim: inst.dim(),
            q: inst.space.q,
            c_q: (inst.space.q != 2.0 || inst.space.c_q != 1.0).then_some(inst.space.c_q),
            rho: inst.rho,
            omega: Some(inst.omega.coords().to_vec()),
            a: spec("A", &inst.a)?,
            b: spec("B", &inst.b)?,
            c: spec("C", &inst.c)?,
            d: spec("D", &inst.d)?,
            f: spec("f", &inst.f)?,
            g: spec("g", &inst.g)?,
            pair_f,
            h: additive(),
            m,
            s: set("S", &inst.s)?,
            t: set("T", &inst.t)?,
            constants: inst.constants.clone(),
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

fn m_mode(field: &str, mode: &str, scale: f64) -> Result<SetValuedMapM> {
    match mode {
        "f-minus-g" => Ok(SetValuedMapM::Difference { scale }),
        "first-slot" => Ok(SetValuedMapM::FirstSlot { scale }),
        other => Err(field_error(field, format!("unknown mode {other:?}; expected \"f-minus-g\" or \"first-slot\""))),
    }
}

/// Reads and validates an instance file; returns the declared name (or the
/// file stem) with the instance.
pub fn load(path: &Path) -> Result<(String, InclusionInstance)> {
    let text = std::fs::read_to_string(path)?;
    let file = InstanceFile::parse(&text)?;
    let inst = file.into_instance()?;
    let name = file
        .name
        .clone()
        .or_else(|| path.file_stem().map(|s| s.to_string_lossy().into_owned()))
        .unwrap_or_else(|| "instance".into());
    Ok((name, inst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    #[test]
    fn builtins_round_trip() {
        for named in instances::all() {
            let file = InstanceFile::from_instance(Some(&named.name), &named.instance).unwrap();
            let text = file.to_json().unwrap();
            let back = InstanceFile::parse(&text).unwrap().into_instance().unwrap();
            let x = Vector::new((0..back.dim()).map(|i| 0.5 - i as f64).collect()).unwrap();
            let a = named.instance.forward(&x, named.instance.rho).unwrap();
            let b = back.forward(&x, back.rho).unwrap();
            assert_eq!(a, b, "{}", named.name);
            assert_eq!(back.constants, named.instance.constants);
            assert_eq!(back.omega, named.instance.omega);
        }
    }

    #[test]
    fn parse_errors_carry_location() {
        let err = InstanceFile::parse("{\n  \"dim\": 2,\n  \"rho\": oops\n}").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 3"), "{msg}");
    }

    #[test]
    fn field_diagnostics() {
        let named = instances::example_4_7();
        let mut file = InstanceFile::from_instance(None, &named.instance).unwrap();
        file.b.as_mut().unwrap().matrix.pop();
        let msg = file.into_instance().unwrap_err().to_string();
        assert!(msg.contains("`B.matrix`") && msg.contains("expected 2 rows"), "{msg}");

        let mut file = InstanceFile::from_instance(None, &named.instance).unwrap();
        file.m = MSpec::Mode("g-minus-f".into());
        assert!(file.into_instance().unwrap_err().to_string().contains("`M`"));

        let mut file = InstanceFile::from_instance(None, &named.instance).unwrap();
        file.rho = -1.0;
        assert!(file.into_instance().unwrap_err().to_string().contains("rho"));
    }

    #[test]
    fn unknown_fields_rejected() {
        let named = instances::example_4_7();
        let text = InstanceFile::from_instance(None, &named.instance).unwrap().to_json().unwrap();
        let bad = text.replacen("\"dim\"", "\"dims\": 1, \"dim\"", 1);
        assert!(InstanceFile::parse(&bad).is_err());
    }

    #[test]
    fn explicit_set_maps_parse() {
        let named = instances::example_4_7();
        let mut file = InstanceFile::from_instance(None, &named.instance).unwrap();
        let text = r#"{"kind": "explicit", "nodes": [{"at": [0, 0], "points": [[0, 0], [1, 0]]}, {"at": [5, 5], "points": [[5, 5]]}]}"#;
        file.s = serde_json::from_str(text).unwrap();
        let inst = file.into_instance().unwrap();
        assert_eq!(inst.s.eval(&Vector::new(vec![1.0, 0.0]).unwrap()).unwrap().len(), 2);
    }

    #[test]
    fn omitted_maps_are_zero() {
        let file = InstanceFile::parse(r#"{"dim": 2, "rho": 0.5, "A": {"matrix": [[1, 0], [0, 1]]}}"#).unwrap();
        let inst = file.into_instance().unwrap();
        let x = Vector::new(vec![3.0, -1.0]).unwrap();
        assert_eq!(inst.b.eval(&x).unwrap(), Vector::zeros(2));
        assert_eq!(inst.pair_f.eval(&x, &x).unwrap(), Vector::zeros(2));
        assert_eq!(inst.a.eval(&x).unwrap(), x);
    }
}
