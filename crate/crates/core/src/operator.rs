//! Operator algebra for the inclusion `ω ∈ F(v,w) + M(f(u),g(u))`.
//!
//! Every map has a black-box evaluation contract. Affine maps additionally
//! keep their matrix and offset so that certification and the resolvent can
//! work with the exact linear structure instead of samples.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::mat_vec;
use crate::space::{norm, SpaceConfig, Vector};

pub type VectorFn = Arc<dyn Fn(&Vector) -> Vector + Send + Sync>;
pub type PairFn = Arc<dyn Fn(&Vector, &Vector) -> Vector + Send + Sync>;
pub type SlotFn = Arc<dyn Fn(&Vector, &Vector, &Vector, &Vector) -> Vector + Send + Sync>;
pub type PairSetFn = Arc<dyn Fn(&Vector, &Vector) -> Vec<Vector> + Send + Sync>;
pub type SetFn = Arc<dyn Fn(&Vector) -> Vec<Vector> + Send + Sync>;

/// `x ↦ Lx + b` on ℝⁿ.
#[derive(Clone, Debug, PartialEq)]
pub struct AffineMap {
    linear: DMatrix<f64>,
    offset: Vector,
}

impl AffineMap {
    pub fn new(linear: DMatrix<f64>, offset: Vector) -> Result<Self> {
        if linear.nrows() != linear.ncols() {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: format!("must be square, got {}x{}", linear.nrows(), linear.ncols()),
            });
        }
        if linear.nrows() != offset.dim() {
            return Err(Error::DimensionMismatch {
                left: linear.nrows(),
                right: offset.dim(),
            });
        }
        if linear.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: "entries must be finite".into(),
            });
        }
        Ok(Self { linear, offset })
    }

    pub fn linear(linear: DMatrix<f64>) -> Result<Self> {
        let dim = linear.nrows();
        Self::new(linear, Vector::zeros(dim.max(1)))
    }

    /// Row-major linear map with zero offset.
    pub fn from_rows(dim: usize, rows: &[f64]) -> Result<Self> {
        if rows.len() != dim * dim {
            return Err(Error::InvalidParameter {
                name: "matrix",
                reason: format!("expected {} entries, got {}", dim * dim, rows.len()),
            });
        }
        Self::linear(DMatrix::from_row_slice(dim, dim, rows))
    }

    pub fn scalar(dim: usize, s: f64) -> Self {
        Self {
            linear: DMatrix::identity(dim, dim) * s,
            offset: Vector::zeros(dim),
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, 1.0)
    }

    pub fn zero(dim: usize) -> Self {
        Self::scalar(dim, 0.0)
    }

    pub fn with_offset(mut self, offset: Vector) -> Result<Self> {
        self.offset.check_dim(&offset)?;
        self.offset = offset;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.offset.dim()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.linear
    }

    pub fn offset(&self) -> &Vector {
        &self.offset
    }

    pub fn eval(&self, x: &Vector) -> Result<Vector> {
        self.offset.check_dim(x)?;
        Ok(&mat_vec(&self.linear, x) + &self.offset)
    }

    pub fn plus(&self, other: &AffineMap) -> AffineMap {
        AffineMap {
            linear: &self.linear + &other.linear,
            offset: &self.offset + &other.offset,
        }
    }

    pub fn scaled(&self, s: f64) -> AffineMap {
        AffineMap {
            linear: &self.linear * s,
            offset: self.offset.scale(s),
        }
    }
}

/// Single-valued map `X → X` (A, B, C, D, f, g).
#[derive(Clone)]
pub enum SingleValuedMap {
    Affine(AffineMap),
    Custom { dim: usize, name: String, eval: VectorFn },
}

impl SingleValuedMap {
    pub fn custom(dim: usize, name: impl Into<String>, eval: impl Fn(&Vector) -> Vector + Send + Sync + 'static) -> Self {
        Self::Custom {
            dim,
            name: name.into(),
            eval: Arc::new(eval),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Affine(a) => a.dim(),
            Self::Custom { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, x: &Vector) -> Result<Vector> {
        match self {
            Self::Affine(a) => a.eval(x),
            Self::Custom { dim, eval, .. } => {
                if x.dim() != *dim {
                    return Err(Error::DimensionMismatch { left: *dim, right: x.dim() });
                }
                Ok(eval(x))
            }
        }
    }

    pub fn as_affine(&self) -> Option<&AffineMap> {
        match self {
            Self::Affine(a) => Some(a),
            Self::Custom { .. } => None,
        }
    }
}

impl From<AffineMap> for SingleValuedMap {
    fn from(a: AffineMap) -> Self {
        Self::Affine(a)
    }
}

impl fmt::Debug for SingleValuedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Affine(a) => f.debug_tuple("Affine").field(a).finish(),
            Self::Custom { dim, name, .. } => write!(f, "Custom({name}, dim {dim})"),
        }
    }
}

/// Four-slot map `H((a,b),(c,d))`, fed with `(Ax, Bx, Cx, Dx)`.
#[derive(Clone)]
pub enum BiSlotMapH {
    /// `H((a,b),(c,d)) = a + b + c + d`.
    Additive,
    Custom(SlotFn),
}

impl BiSlotMapH {
    pub fn eval(&self, a: &Vector, b: &Vector, c: &Vector, d: &Vector) -> Vector {
        match self {
            Self::Additive => &(&(a + b) + c) + d,
            Self::Custom(h) => h(a, b, c, d),
        }
    }
}

impl fmt::Debug for BiSlotMapH {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Additive => write!(f, "Additive"),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// `F : X × X → X`.
#[derive(Clone)]
pub enum PairMapF {
    /// `F(x, y) = P x + Q y + offset`.
    Affine {
        p: DMatrix<f64>,
        q: DMatrix<f64>,
        offset: Vector,
    },
    Custom { dim: usize, eval: PairFn },
}

impl PairMapF {
    pub fn affine(p: DMatrix<f64>, q: DMatrix<f64>, offset: Vector) -> Result<Self> {
        let n = offset.dim();
        for (name, m) in [("F.P", &p), ("F.Q", &q)] {
            if m.nrows() != n || m.ncols() != n {
                return Err(Error::InvalidParameter {
                    name,
                    reason: format!("expected {n}x{n}, got {}x{}", m.nrows(), m.ncols()),
                });
            }
        }
        Ok(Self::Affine { p, q, offset })
    }

    /// `F(x, y) = a·x + b·y`.
    pub fn scalar(dim: usize, a: f64, b: f64) -> Self {
        Self::Affine {
            p: DMatrix::identity(dim, dim) * a,
            q: DMatrix::identity(dim, dim) * b,
            offset: Vector::zeros(dim),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Affine { offset, .. } => offset.dim(),
            Self::Custom { dim, .. } => *dim,
        }
    }

    pub fn eval(&self, x: &Vector, y: &Vector) -> Result<Vector> {
        let n = self.dim();
        for v in [x, y] {
            if v.dim() != n {
                return Err(Error::DimensionMismatch { left: n, right: v.dim() });
            }
        }
        Ok(match self {
            Self::Affine { p, q, offset } => &(&mat_vec(p, x) + &mat_vec(q, y)) + offset,
            Self::Custom { eval, .. } => eval(x, y),
        })
    }
}

impl fmt::Debug for PairMapF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Affine { p, q, offset } => f
                .debug_struct("Affine")
                .field("p", p)
                .field("q", q)
                .field("offset", offset)
                .finish(),
            Self::Custom { dim, .. } => write!(f, "Custom(dim {dim})"),
        }
    }
}

/// Two-slot set-valued `M(a, b)`, only ever queried at `(f(u), g(u))` or with
/// one slot frozen.
#[derive(Clone)]
pub enum SetValuedMapM {
    /// `M(a, b) = {scale·(a − b)}`; scale 1 is the "f-minus-g" mode.
    Difference { scale: f64 },
    /// `M(a, b) = {scale·a}`: the single-operator reduction `λN`.
    FirstSlot { scale: f64 },
    Custom(PairSetFn),
}

impl SetValuedMapM {
    pub fn f_minus_g() -> Self {
        Self::Difference { scale: 1.0 }
    }

    pub fn eval(&self, a: &Vector, b: &Vector) -> Result<Vec<Vector>> {
        a.check_dim(b)?;
        let out = match self {
            Self::Difference { scale } => vec![(a - b).scale(*scale)],
            Self::FirstSlot { scale } => vec![a.scale(*scale)],
            Self::Custom(m) => m(a, b),
        };
        if out.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(out)
    }
}

impl fmt::Debug for SetValuedMapM {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Difference { scale } => write!(f, "Difference({scale})"),
            Self::FirstSlot { scale } => write!(f, "FirstSlot({scale})"),
            Self::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// Set-valued `S, T : X ⊸ CB(X)` with finite nonempty values.
#[derive(Clone)]
pub enum FiniteSetValuedMap {
    Identity,
    /// Singleton `{Lx + b}`.
    Affine(AffineMap),
    /// `{Lx + b + d_i}` for each listed translate `d_i`.
    Translates { base: AffineMap, offsets: Vec<Vector> },
    /// Piecewise constant: the point set of the nearest listed node
    /// (ties go to the earlier node).
    Explicit { nodes: Vec<(Vector, Vec<Vector>)> },
    Custom { dim: usize, eval: SetFn },
}

impl FiniteSetValuedMap {
    pub fn eval(&self, x: &Vector) -> Result<Vec<Vector>> {
        let out = match self {
            Self::Identity => vec![x.clone()],
            Self::Affine(a) => vec![a.eval(x)?],
            Self::Translates { base, offsets } => {
                let center = base.eval(x)?;
                offsets.iter().map(|d| center.axpy(1.0, d)).collect::<Result<_>>()?
            }
            Self::Explicit { nodes } => {
                let mut best: Option<(f64, &Vec<Vector>)> = None;
                for (at, points) in nodes {
                    let d = at.distance(x)?;
                    if best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, points));
                    }
                }
                best.map(|(_, p)| p.clone()).unwrap_or_default()
            }
            Self::Custom { dim, eval } => {
                if x.dim() != *dim {
                    return Err(Error::DimensionMismatch { left: *dim, right: x.dim() });
                }
                eval(x)
            }
        };
        if out.is_empty() {
            return Err(Error::EmptySet);
        }
        Ok(out)
    }

    /// Linear part when the map is an affine singleton.
    pub fn singleton_linear(&self, dim: usize) -> Option<DMatrix<f64>> {
        match self {
            Self::Identity => Some(DMatrix::identity(dim, dim)),
            Self::Affine(a) => Some(a.matrix().clone()),
            Self::Translates { base, offsets } if offsets.len() == 1 => Some(base.matrix().clone()),
            _ => None,
        }
    }
}

impl fmt::Debug for FiniteSetValuedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Identity => write!(f, "Identity"),
            Self::Affine(a) => f.debug_tuple("Affine").field(a).finish(),
            Self::Translates { base, offsets } => f
                .debug_struct("Translates")
                .field("base", base)
                .field("offsets", offsets)
                .finish(),
            Self::Explicit { nodes } => write!(f, "Explicit({} nodes)", nodes.len()),
            Self::Custom { dim, .. } => write!(f, "Custom(dim {dim})"),
        }
    }
}

/// Declared operator-property constants. Unset slots are `None`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constants {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub beta1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon2: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l1: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub l2: Option<f64>,
}

impl Constants {
    fn named(&self) -> [(&'static str, Option<f64>); 15] {
        [
            ("mu1", self.mu1),
            ("gamma1", self.gamma1),
            ("mu2", self.mu2),
            ("gamma2", self.gamma2),
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("alpha1", self.alpha1),
            ("beta1", self.beta1),
            ("tau", self.tau),
            ("sigma", self.sigma),
            ("delta", self.delta),
            ("epsilon1", self.epsilon1),
            ("epsilon2", self.epsilon2),
            ("l1", self.l1),
            ("l2", self.l2),
        ]
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.named().into_iter().find(|(n, _)| *n == name).and_then(|(_, v)| v)
    }

    /// Fails with the list of names that are unset.
    pub fn require(&self, names: &[&'static str]) -> Result<Vec<f64>> {
        let missing: Vec<&'static str> = names.iter().copied().filter(|n| self.get(n).is_none()).collect();
        if !missing.is_empty() {
            return Err(Error::MissingConstants(missing));
        }
        Ok(names.iter().map(|n| self.get(n).unwrap()).collect())
    }

    /// `r = (μ₁α₁^q − μ₂β₁^q) + (γ₁ + γ₂)`.
    pub fn r(&self, q: f64) -> Result<f64> {
        let v = self.require(&["mu1", "alpha1", "mu2", "beta1", "gamma1", "gamma2"])?;
        Ok((v[0] * v[1].powf(q) - v[2] * v[3].powf(q)) + (v[4] + v[5]))
    }

    /// `m = α − β`.
    pub fn m(&self) -> Result<f64> {
        let v = self.require(&["alpha", "beta"])?;
        Ok(v[0] - v[1])
    }

    /// Constants that are declared but not strictly positive. `beta` and
    /// `mu2` may be zero (relaxation terms).
    pub fn positivity_violations(&self) -> Vec<String> {
        self.named()
            .into_iter()
            .filter_map(|(n, v)| {
                let v = v?;
                let ok = if matches!(n, "beta" | "mu2") { v >= 0.0 } else { v > 0.0 };
                (!ok || !v.is_finite()).then(|| format!("{n} = {v} must be positive"))
            })
            .collect()
    }

    /// The ordering hypotheses α>β, μ₁>μ₂, α₁>β₁, γ₁,γ₂>0 that fail (or
    /// cannot be checked). Violations are reported, never fatal.
    pub fn ordering_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut cmp = |a: &str, b: &str| match (self.get(a), self.get(b)) {
            (Some(x), Some(y)) if x > y => {}
            (Some(x), Some(y)) => out.push(format!("{a} > {b} fails ({x} <= {y})")),
            _ => out.push(format!("{a} > {b} unchecked (constant missing)")),
        };
        cmp("alpha", "beta");
        cmp("mu1", "mu2");
        cmp("alpha1", "beta1");
        for g in ["gamma1", "gamma2"] {
            match self.get(g) {
                Some(x) if x > 0.0 => {}
                Some(x) => out.push(format!("{g} > 0 fails ({x})")),
                None => out.push(format!("{g} > 0 unchecked (constant missing)")),
            }
        }
        out
    }
}

/// Which slot of `M` is varied while the other is frozen.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MSlot {
    /// `x ↦ M(f(x), w)`.
    F,
    /// `x ↦ M(w, g(x))`.
    G,
}

/// Full problem datum for `ω ∈ F(v,w) + M(f(u),g(u))`, `v ∈ S(u)`, `w ∈ T(u)`.
#[derive(Clone, Debug)]
pub struct InclusionInstance {
    pub space: SpaceConfig,
    pub a: SingleValuedMap,
    pub b: SingleValuedMap,
    pub c: SingleValuedMap,
    pub d: SingleValuedMap,
    pub f: SingleValuedMap,
    pub g: SingleValuedMap,
    pub h: BiSlotMapH,
    pub pair_f: PairMapF,
    pub m: SetValuedMapM,
    pub s: FiniteSetValuedMap,
    pub t: FiniteSetValuedMap,
    pub omega: Vector,
    pub rho: f64,
    pub constants: Constants,
}

impl InclusionInstance {
    /// Checks dimensions, `ρ > 0` and constant positivity.
    pub fn validate(&self) -> Result<()> {
        let n = self.space.dim;
        for (name, map) in [
            ("A", &self.a),
            ("B", &self.b),
            ("C", &self.c),
            ("D", &self.d),
            ("f", &self.f),
            ("g", &self.g),
        ] {
            if map.dim() != n {
                return Err(Error::InvalidParameter {
                    name: "map",
                    reason: format!("{name} has dim {}, space has dim {n}", map.dim()),
                });
            }
        }
        if self.pair_f.dim() != n {
            return Err(Error::DimensionMismatch { left: n, right: self.pair_f.dim() });
        }
        if self.omega.dim() != n {
            return Err(Error::DimensionMismatch { left: n, right: self.omega.dim() });
        }
        if !(self.rho > 0.0) || !self.rho.is_finite() {
            return Err(Error::InvalidParameter {
                name: "rho",
                reason: format!("must be positive, got {}", self.rho),
            });
        }
        let bad = self.constants.positivity_violations();
        if !bad.is_empty() {
            return Err(Error::InvalidParameter {
                name: "constants",
                reason: bad.join("; "),
            });
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.space.dim
    }

    pub fn eval_h(&self, x: &Vector) -> Result<Vector> {
        let (a, b, c, d) = (self.a.eval(x)?, self.b.eval(x)?, self.c.eval(x)?, self.d.eval(x)?);
        Ok(self.h.eval(&a, &b, &c, &d))
    }

    /// `M(f(x), g(x))`.
    pub fn eval_m(&self, x: &Vector) -> Result<Vec<Vector>> {
        self.m.eval(&self.f.eval(x)?, &self.g.eval(x)?)
    }

    /// One slot of `M` varied, the other frozen at `w`.
    pub fn eval_m_slot(&self, slot: MSlot, x: &Vector, w: &Vector) -> Result<Vec<Vector>> {
        match slot {
            MSlot::F => self.m.eval(&self.f.eval(x)?, w),
            MSlot::G => self.m.eval(w, &self.g.eval(x)?),
        }
    }

    /// Affine realization of `x ↦ H((Ax,Bx),(Cx,Dx))`.
    pub fn h_composite(&self) -> Option<AffineMap> {
        if !matches!(self.h, BiSlotMapH::Additive) {
            return None;
        }
        let a = self.a.as_affine()?;
        Some(
            a.plus(self.b.as_affine()?)
                .plus(self.c.as_affine()?)
                .plus(self.d.as_affine()?),
        )
    }

    /// Affine realization of `x ↦ M(f(x), g(x))`.
    pub fn m_composite(&self) -> Option<AffineMap> {
        match self.m {
            SetValuedMapM::Difference { scale } => {
                let f = self.f.as_affine()?;
                let g = self.g.as_affine()?;
                Some(f.plus(&g.scaled(-1.0)).scaled(scale))
            }
            SetValuedMapM::FirstSlot { scale } => Some(self.f.as_affine()?.scaled(scale)),
            SetValuedMapM::Custom(_) => None,
        }
    }

    /// Linear part of one `M` slot map, when affine.
    pub fn m_slot_linear(&self, slot: MSlot) -> Option<DMatrix<f64>> {
        match (&self.m, slot) {
            (SetValuedMapM::Difference { scale }, MSlot::F) => Some(self.f.as_affine()?.matrix() * *scale),
            (SetValuedMapM::Difference { scale }, MSlot::G) => Some(self.g.as_affine()?.matrix() * -*scale),
            (SetValuedMapM::FirstSlot { scale }, MSlot::F) => Some(self.f.as_affine()?.matrix() * *scale),
            (SetValuedMapM::FirstSlot { .. }, MSlot::G) => Some(DMatrix::zeros(self.dim(), self.dim())),
            (SetValuedMapM::Custom(_), _) => None,
        }
    }

    /// `x ↦ H-composite(x) + ρ·M(f(x),g(x))` when every piece is affine.
    pub fn forward_composite(&self, rho: f64) -> Option<AffineMap> {
        Some(self.h_composite()?.plus(&self.m_composite()?.scaled(rho)))
    }

    /// All points of `H-composite(x) + ρ·M(f(x),g(x))`.
    pub fn forward(&self, x: &Vector, rho: f64) -> Result<Vec<Vector>> {
        let hx = self.eval_h(x)?;
        Ok(self.eval_m(x)?.iter().map(|m| &hx + &m.scale(rho)).collect())
    }

    pub fn is_affine(&self) -> bool {
        self.forward_composite(self.rho).is_some()
    }
}

/// Largest point-to-set distance in either direction.
pub fn hausdorff_distance(set_a: &[Vector], set_b: &[Vector]) -> Result<f64> {
    if set_a.is_empty() || set_b.is_empty() {
        return Err(Error::EmptySet);
    }
    let directed = |from: &[Vector], to: &[Vector]| -> Result<f64> {
        let mut worst: f64 = 0.0;
        for a in from {
            let mut nearest = f64::INFINITY;
            for b in to {
                nearest = nearest.min(a.distance(b)?);
            }
            worst = worst.max(nearest);
        }
        Ok(worst)
    };
    Ok(directed(set_a, set_b)?.max(directed(set_b, set_a)?))
}

/// Distance from a point to a finite set.
pub fn point_set_distance(x: &Vector, set: &[Vector]) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySet);
    }
    let mut best = f64::INFINITY;
    for p in set {
        best = best.min(x.distance(p)?);
    }
    Ok(best)
}

#[allow(non_snake_case)]
pub fn eval_H_on_point(inst: &InclusionInstance, x: &Vector) -> Result<Vector> {
    if x.dim() != inst.dim() {
        return Err(Error::DimensionMismatch { left: inst.dim(), right: x.dim() });
    }
    inst.eval_h(x)
}

/// Residual of `ω ∈ F(v,w) + M(f(u),g(u))` with selection-membership flags.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub value: f64,
    /// Distance from `v` to `S(u)`.
    pub v_membership_gap: f64,
    /// Distance from `w` to `T(u)`.
    pub w_membership_gap: f64,
    /// Set when `v ∉ S(u)` or `w ∉ T(u)` beyond tolerance.
    pub flagged: bool,
}

pub fn inclusion_residual(inst: &InclusionInstance, u: &Vector, v: &Vector, w: &Vector) -> Result<Residual> {
    let fvw = inst.pair_f.eval(v, w)?;
    let target = inst.omega.axpy(-1.0, &fvw)?;
    let mut value = f64::INFINITY;
    for m in inst.eval_m(u)? {
        value = value.min(target.distance(&m)?);
    }
    let v_gap = point_set_distance(v, &inst.s.eval(u)?)?;
    let w_gap = point_set_distance(w, &inst.t.eval(u)?)?;
    let flagged = v_gap > 1e-9 * (1.0 + norm(v)) || w_gap > 1e-9 * (1.0 + norm(w));
    Ok(Residual {
        value,
        v_membership_gap: v_gap,
        w_membership_gap: w_gap,
        flagged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn hausdorff_examples() {
        assert_eq!(hausdorff_distance(&[v(&[0.0, 0.0])], &[v(&[3.0, 4.0])]).unwrap(), 5.0);
        let s = [v(&[0.0, 0.0]), v(&[1.0, 0.0])];
        assert_eq!(hausdorff_distance(&s, &s).unwrap(), 0.0);
        assert_eq!(
            hausdorff_distance(&[v(&[0.0, 0.0]), v(&[2.0, 0.0])], &[v(&[0.0, 0.0])]).unwrap(),
            2.0
        );
    }

    #[test]
    fn hausdorff_rejects_empty() {
        assert!(matches!(hausdorff_distance(&[], &[v(&[1.0])]), Err(Error::EmptySet)));
        assert!(matches!(hausdorff_distance(&[v(&[1.0])], &[]), Err(Error::EmptySet)));
    }

    #[test]
    fn h_on_point_examples() {
        let e32 = instances::example_3_2().instance;
        assert_eq!(eval_H_on_point(&e32, &v(&[1.0, 1.0])).unwrap(), v(&[4.0, 4.0]));
        let e47 = instances::example_4_7().instance;
        let h = eval_H_on_point(&e47, &v(&[1.0, 0.0])).unwrap();
        assert!((h[0] - 2.9).abs() < 1e-15 && h[1] == 0.0);
        assert_eq!(eval_H_on_point(&e47, &v(&[0.0, 0.0])).unwrap(), v(&[0.0, 0.0]));
        assert!(eval_H_on_point(&e47, &v(&[1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn residual_zero_at_constructed_solution() {
        let mut inst = instances::example_4_7().instance;
        let u_star = v(&[0.7, -1.3]);
        let fu = inst.pair_f.eval(&u_star, &u_star).unwrap();
        let mu = inst.eval_m(&u_star).unwrap().remove(0);
        inst.omega = &fu + &mu;
        let r = inclusion_residual(&inst, &u_star, &u_star, &u_star).unwrap();
        assert!(r.value <= 1e-15);
        assert!(!r.flagged);

        // u* + (1, 0): residual = ‖(F(e,e) + M(e))‖ with e = (1,0):
        // F = 0.45 e, M(f e, g e) = (0.25, 7/12); total (0.7, 7/12).
        let shifted = v(&[1.7, -1.3]);
        let r = inclusion_residual(&inst, &shifted, &shifted, &shifted).unwrap();
        let expected = (0.7f64.powi(2) + (7.0f64 / 12.0).powi(2)).sqrt();
        assert!((r.value - expected).abs() < 1e-12, "{} vs {}", r.value, expected);
    }

    #[test]
    fn residual_flags_membership_violation() {
        let inst = instances::example_3_2().instance;
        let z = v(&[0.0, 0.0]);
        let r = inclusion_residual(&inst, &z, &z, &z).unwrap();
        assert_eq!(r.value, 0.0);
        let r = inclusion_residual(&inst, &z, &v(&[1.0, 0.0]), &z).unwrap();
        assert!(r.flagged);
        assert_eq!(r.v_membership_gap, 1.0);
    }

    #[test]
    fn affine_maps_are_linear_plus_offset() {
        let a = AffineMap::from_rows(2, &[1.0, 2.0, -3.0, 0.5])
            .unwrap()
            .with_offset(v(&[0.25, -1.0]))
            .unwrap();
        let x = v(&[0.3, 0.7]);
        let y = v(&[-1.5, 2.0]);
        let lhs = &(&(&a.eval(&(&x + &y)).unwrap() - &a.eval(&x).unwrap()) - &a.eval(&y).unwrap())
            + &a.eval(&Vector::zeros(2)).unwrap();
        assert!(lhs.norm() < 1e-14);
    }

    #[test]
    fn explicit_set_map_uses_nearest_node() {
        let s = FiniteSetValuedMap::Explicit {
            nodes: vec![
                (v(&[0.0]), vec![v(&[0.0]), v(&[1.0])]),
                (v(&[10.0]), vec![v(&[5.0])]),
            ],
        };
        assert_eq!(s.eval(&v(&[2.0])).unwrap().len(), 2);
        assert_eq!(s.eval(&v(&[9.0])).unwrap(), vec![v(&[5.0])]);
    }

    #[test]
    fn constants_r_and_m() {
        let c = instances::example_4_7().instance.constants;
        assert!((c.r(2.0).unwrap() - 2.9).abs() < 1e-12);
        assert!((c.m().unwrap() - 0.25).abs() < 1e-15);
        let err = Constants::default().r(2.0).unwrap_err();
        assert!(matches!(err, Error::MissingConstants(ref v) if v.len() == 6));
    }

    #[test]
    fn ordering_flags() {
        let c = instances::example_4_7().instance.constants;
        // alpha1 = 0.1 < beta1 = 0.2 in the published constant block.
        let v = c.ordering_violations();
        assert_eq!(v.len(), 1, "{v:?}");
        assert!(v[0].starts_with("alpha1 > beta1"));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn set(dim: usize) -> impl Strategy<Value = Vec<Vector>> {
            prop::collection::vec(
                prop::collection::vec(-10.0f64..10.0, dim).prop_map(|c| Vector::new(c).unwrap()),
                1..6,
            )
        }

        proptest! {
            #[test]
            fn hausdorff_is_symmetric_and_triangular(a in set(3), b in set(3), c in set(3)) {
                let ab = hausdorff_distance(&a, &b).unwrap();
                let ba = hausdorff_distance(&b, &a).unwrap();
                let bc = hausdorff_distance(&b, &c).unwrap();
                let ac = hausdorff_distance(&a, &c).unwrap();
                prop_assert_eq!(ab, ba);
                prop_assert!(ac <= ab + bc + 1e-12);
            }

            #[test]
            fn residual_is_lipschitz_along_segments(t in 0.0f64..1.0, dt in 1e-4f64..0.5) {
                // Residual of example 4.7 with identity S, T has slope at most
                // ‖F‖ + ‖M∘(f,g)‖ ≤ (ε₁ + ε₂) + ‖f − g‖ ≤ 0.45 + 0.64.
                let inst = instances::example_4_7().instance;
                let p = |s: f64| v(&[1.0 - 2.0 * s, 0.5 + s]);
                let (x, y) = (p(t), p(t + dt));
                let rx = inclusion_residual(&inst, &x, &x, &x).unwrap().value;
                let ry = inclusion_residual(&inst, &y, &y, &y).unwrap().value;
                prop_assert!((rx - ry).abs() <= 1.09 * x.distance(&y).unwrap() + 1e-12);
            }
        }
    }
}
