//! Verification of operator-property constants.
//!
//! Every property is an inequality `value(x, y) ≥ c·weight(x, y)` (lower
//! bounds) or `value(x, y) ≤ c·weight(x, y)` (upper bounds). When the maps
//! involved are affine and `q = 2` the best constant is a spectral quantity
//! of a matrix and the certificate is exact. Otherwise the inequality is
//! checked over a [`SamplePlan`]; a sampled certificate can refute a claim
//! but never prove it, so its verdict is `estimated` at best.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{critical_rhos, min_eigen, operator_norm, singular_extremes, symmetric_part};
use crate::operator::{hausdorff_distance, FiniteSetValuedMap, InclusionInstance, MSlot, PairMapF, SingleValuedMap};
use crate::resolvent::{composite_defect, ResolventConfig, Resolvent, SolverKind};
use crate::sampling::{Sample, SamplePlan};
use crate::space::{duality_map, inner, norm, Vector};

/// Relative slack for inequality checks: violations below
/// `1e-9·(1 + |rhs|)` are treated as rounding.
pub const SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    StronglyAccretive,
    RelaxedAccretive,
    Cocoercive,
    RelaxedCocoercive,
    Lipschitz,
    Expansive,
    StronglyMixedCocoercive,
    RelaxedMixedCocoercive,
    MixedLipschitz,
    DLipschitz,
    #[serde(rename = "F_strongly_accretive_first")]
    FStronglyAccretiveFirst,
    #[serde(rename = "F_strongly_accretive_second")]
    FStronglyAccretiveSecond,
    #[serde(rename = "F_lipschitz_first")]
    FLipschitzFirst,
    #[serde(rename = "F_lipschitz_second")]
    FLipschitzSecond,
    SymmetricAccretive,
    #[serde(rename = "surjective_H_plus_rhoM")]
    SurjectiveHPlusRhoM,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ExactAffine,
    Sampled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Estimated,
}

impl Verdict {
    /// Combines verdicts: any fail wins, then any estimate.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Estimated, _) | (_, Verdict::Estimated) => Verdict::Estimated,
            _ => Verdict::Pass,
        }
    }

    pub fn is_fail(self) -> bool {
        self == Verdict::Fail
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    /// `value ≥ c·weight`; the best constant is the infimum ratio.
    Lower,
    /// `value ≤ c·weight`; the best constant is the supremum ratio.
    Upper,
}

/// Right-hand-side normalization of the strong-accretivity conditions on F.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `≥ c·‖u − v‖^q`.
    Domain,
    /// `≥ c·‖H(u) − H(v)‖^q`.
    HImage,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RhoProbe {
    pub rho: f64,
    pub determinant: f64,
    pub min_singular_value: f64,
    pub condition_number: f64,
    pub invertible: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurjectivityWitness {
    pub probes: Vec<RhoProbe>,
    /// Positive ρ where `det(H + ρM) = 0`; `None` when not analyzable.
    pub critical_rhos: Option<Vec<f64>>,
    /// The single image point when the composite linear part vanishes.
    pub constant_image: Option<Vector>,
    pub image_norm: Option<f64>,
    pub defect: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    /// A sample pair; on a fail it violates the claimed inequality.
    Pair { x: Vector, y: Vector, lhs: f64, rhs: f64 },
    /// Exact analysis summary with the extremal direction.
    Spectral { summary: String, value: f64, direction: Vector },
    Surjectivity(SurjectivityWitness),
    /// A target the range probe could not reach.
    Unreached { rho: f64, target: Vector, reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub property: Property,
    pub subject: String,
    pub bound: Bound,
    pub claimed: f64,
    /// Best constant found: exact, or the extreme ratio over samples.
    pub constant: f64,
    pub method: Method,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub form: Option<Normalization>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty", default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub samples: usize,
}

impl Certificate {
    fn with_param(mut self, name: &str, value: f64) -> Self {
        self.parameters.insert(name.to_string(), value);
        self
    }

    fn with_form(mut self, form: Normalization) -> Self {
        self.form = Some(form);
        self
    }
}

type Observe<'a> = Box<dyn Fn(&Sample) -> Result<Vec<(f64, f64)>> + 'a>;

/// One inequality to check.
struct Check<'a> {
    property: Property,
    subject: String,
    bound: Bound,
    claimed: f64,
    dim: usize,
    observe: Observe<'a>,
}

fn violation(bound: Bound, value: f64, rhs: f64) -> f64 {
    let slack = SLACK * (1.0 + rhs.abs());
    match bound {
        Bound::Lower => rhs - slack - value,
        Bound::Upper => value - rhs - slack,
    }
}

impl Check<'_> {
    fn certificate(&self, constant: f64, method: Method, verdict: Verdict, witness: Option<Witness>) -> Certificate {
        Certificate {
            property: self.property,
            subject: self.subject.clone(),
            bound: self.bound,
            claimed: self.claimed,
            constant,
            method,
            verdict,
            form: None,
            parameters: BTreeMap::new(),
            witness,
            seed: None,
            samples: 0,
        }
    }

    fn exact(self, constant: f64, direction: Vector, summary: impl Into<String>) -> Result<Certificate> {
        let ok = match self.bound {
            Bound::Lower => constant >= self.claimed - SLACK,
            Bound::Upper => constant <= self.claimed + SLACK,
        };
        let summary = summary.into();
        if ok {
            let w = Witness::Spectral { summary, value: constant, direction };
            return Ok(self.certificate(constant, Method::ExactAffine, Verdict::Pass, Some(w)));
        }
        // The extremal direction paired with the origin violates the claim.
        let zero = Vector::zeros(self.dim);
        let probe = Sample { x: direction.clone(), y: zero.clone(), aux: zero.clone() };
        let (value, weight) = (self.observe)(&probe)?
            .into_iter()
            .next()
            .unwrap_or((constant, 1.0));
        let w = Witness::Pair { x: direction, y: zero, lhs: value, rhs: self.claimed * weight };
        Ok(self.certificate(constant, Method::ExactAffine, Verdict::Fail, Some(w)))
    }

    fn sampled(self, plan: &SamplePlan) -> Result<Certificate> {
        if plan.is_empty() {
            return Err(Error::InsufficientEvidence(format!(
                "{} of {} needs samples: no affine realization for exact analysis",
                serde_json::to_string(&self.property).unwrap_or_default(),
                self.subject
            )));
        }
        let samples = plan.samples(self.dim);
        let mut best: Option<f64> = None;
        // (violation amount, sample, value, rhs) of the worst pair
        let mut worst: Option<(f64, &Sample, f64, f64)> = None;
        for s in &samples {
            for (value, weight) in (self.observe)(s)? {
                let rhs = self.claimed * weight;
                let v = violation(self.bound, value, rhs);
                if worst.as_ref().is_none_or(|w| v > w.0) {
                    worst = Some((v, s, value, rhs));
                }
                if weight > 1e-300 {
                    let ratio = value / weight;
                    best = Some(match (best, self.bound) {
                        (None, _) => ratio,
                        (Some(b), Bound::Lower) => b.min(ratio),
                        (Some(b), Bound::Upper) => b.max(ratio),
                    });
                }
            }
        }
        let constant = best.unwrap_or(match self.bound {
            Bound::Lower => f64::INFINITY,
            Bound::Upper => 0.0,
        });
        let (verdict, witness) = match worst {
            Some((v, s, value, rhs)) => {
                let w = Witness::Pair { x: s.x.clone(), y: s.y.clone(), lhs: value, rhs };
                (if v > 0.0 { Verdict::Fail } else { Verdict::Estimated }, Some(w))
            }
            None => (Verdict::Estimated, None),
        };
        let mut cert = self.certificate(constant, Method::Sampled, verdict, witness);
        cert.seed = Some(plan.seed);
        cert.samples = samples.len();
        Ok(cert)
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: format!("must be positive, got {v}") })
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, reason: format!("must be non-negative, got {v}") })
    }
}

fn diff(x: &Vector, y: &Vector) -> Vector {
    x - y
}

/// `⟨u − v, J_q(x − y)⟩` over all selections `u ∈ ux`, `v ∈ vy`.
fn pairing(ux: &[Vector], vy: &[Vector], jd: &Vector) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(ux.len() * vy.len());
    for u in ux {
        for v in vy {
            out.push(inner(&diff(u, v), jd)?);
        }
    }
    Ok(out)
}

/// Shared strong / relaxed accretivity check over set-valued images.
fn accretivity<'a>(
    property: Property,
    subject: String,
    claimed: f64,
    q: f64,
    dim: usize,
    linear: Option<DMatrix<f64>>,
    images: impl Fn(&Sample) -> Result<(Vec<Vector>, Vec<Vector>)> + 'a,
    plan: &SamplePlan,
) -> Result<Certificate> {
    let relaxed = property == Property::RelaxedAccretive;
    let bound = if relaxed { Bound::Upper } else { Bound::Lower };
    let check = Check {
        property,
        subject,
        bound,
        claimed,
        dim,
        observe: Box::new(move |s| {
            let d = diff(&s.x, &s.y);
            let jd = duality_map(&d, q)?;
            let weight = norm(&d).powf(q);
            let (ux, vy) = images(s)?;
            Ok(pairing(&ux, &vy, &jd)?
                .into_iter()
                .map(|p| (if relaxed { -p } else { p }, weight))
                .collect())
        }),
    };
    match linear {
        Some(l) if q == 2.0 => {
            let e = min_eigen(&symmetric_part(&l));
            if relaxed {
                check.exact(-e.value, e.vector, "negated smallest eigenvalue of sym(L)")
            } else {
                check.exact(e.value, e.vector, "smallest eigenvalue of sym(L)")
            }
        }
        _ => check.sampled(plan),
    }
}

fn map_images<'a>(map: &'a SingleValuedMap) -> impl Fn(&Sample) -> Result<(Vec<Vector>, Vec<Vector>)> + 'a {
    move |s| Ok((vec![map.eval(&s.x)?], vec![map.eval(&s.y)?]))
}

/// `⟨A x − A y, J_q(x − y)⟩ ≥ ξ‖x − y‖^q`.
pub fn certify_strong_accretive(map: &SingleValuedMap, claimed: f64, q: f64, plan: &SamplePlan) -> Result<Certificate> {
    positive("claimed", claimed)?;
    let linear = map.as_affine().map(|a| a.matrix().clone());
    accretivity(Property::StronglyAccretive, "map".into(), claimed, q, map.dim(), linear, map_images(map), plan)
}

/// `⟨A x − A y, J_q(x − y)⟩ ≥ −β‖x − y‖^q`.
pub fn certify_relaxed_accretive(map: &SingleValuedMap, claimed: f64, q: f64, plan: &SamplePlan) -> Result<Certificate> {
    non_negative("claimed", claimed)?;
    let linear = map.as_affine().map(|a| a.matrix().clone());
    accretivity(Property::RelaxedAccretive, "map".into(), claimed, q, map.dim(), linear, map_images(map), plan)
}

/// One slot of `M`: α-strong accretivity of `M(f(·), w)` or β-relaxed
/// accretivity of `M(w, g(·))`, for every frozen `w` and every selection.
pub fn certify_m_slot(inst: &InclusionInstance, slot: MSlot, claimed: f64, plan: &SamplePlan) -> Result<Certificate> {
    let (property, subject) = match slot {
        MSlot::F => {
            positive("alpha", claimed)?;
            (Property::StronglyAccretive, "M(f(.), w)")
        }
        MSlot::G => {
            non_negative("beta", claimed)?;
            (Property::RelaxedAccretive, "M(w, g(.))")
        }
    };
    let images = move |s: &Sample| Ok((inst.eval_m_slot(slot, &s.x, &s.aux)?, inst.eval_m_slot(slot, &s.y, &s.aux)?));
    accretivity(property, subject.into(), claimed, inst.space.q, inst.dim(), inst.m_slot_linear(slot), images, plan)
}

/// `⟨A x − A y, J_q(x − y)⟩ ≥ μ‖A x − A y‖^q`.
pub fn certify_cocoercive(map: &SingleValuedMap, claimed: f64, q: f64, plan: &SamplePlan) -> Result<Certificate> {
    positive("claimed", claimed)?;
    cocoercivity(map, claimed, q, plan, false)
}

/// `⟨A x − A y, J_q(x − y)⟩ ≥ −γ‖A x − A y‖^q`.
pub fn certify_relaxed_cocoercive(map: &SingleValuedMap, claimed: f64, q: f64, plan: &SamplePlan) -> Result<Certificate> {
    non_negative("claimed", claimed)?;
    cocoercivity(map, claimed, q, plan, true)
}

fn cocoercivity(map: &SingleValuedMap, claimed: f64, q: f64, plan: &SamplePlan, relaxed: bool) -> Result<Certificate> {
    let check = Check {
        property: if relaxed { Property::RelaxedCocoercive } else { Property::Cocoercive },
        subject: "map".into(),
        bound: if relaxed { Bound::Upper } else { Bound::Lower },
        claimed,
        dim: map.dim(),
        observe: Box::new(move |s| {
            let d = diff(&s.x, &s.y);
            let da = diff(&map.eval(&s.x)?, &map.eval(&s.y)?);
            let p = inner(&da, &duality_map(&d, q)?)?;
            Ok(vec![(if relaxed { -p } else { p }, norm(&da).powf(q))])
        }),
    };
    // With y = L d the ratio is ⟨y, L⁻¹y⟩ / ‖y‖².
    let inverse = map
        .as_affine()
        .filter(|_| q == 2.0)
        .and_then(|a| a.matrix().clone().try_inverse());
    match inverse {
        Some(inv) => {
            let e = min_eigen(&symmetric_part(&inv));
            let l = map.as_affine().unwrap().matrix();
            let direction = crate::linalg::from_dvector(&(inv.clone() * crate::linalg::to_dvector(&e.vector)));
            let _ = l;
            if relaxed {
                check.exact(-e.value, direction, "negated smallest eigenvalue of sym(L^-1)")
            } else {
                check.exact(e.value, direction, "smallest eigenvalue of sym(L^-1)")
            }
        }
        None => check.sampled(plan),
    }
}

/// `‖A x − A y‖ ≤ ζ‖x − y‖`.
pub fn certify_lipschitz(map: &SingleValuedMap, claimed: f64, plan: &SamplePlan) -> Result<Certificate> {
    positive("claimed", claimed)?;
    norm_ratio(map, claimed, plan, Property::Lipschitz)
}

/// `‖A x − A y‖ ≥ α‖x − y‖`.
pub fn certify_expansive(map: &SingleValuedMap, claimed: f64, plan: &SamplePlan) -> Result<Certificate> {
    positive("claimed", claimed)?;
    norm_ratio(map, claimed, plan, Property::Expansive)
}

fn norm_ratio(map: &SingleValuedMap, claimed: f64, plan: &SamplePlan, property: Property) -> Result<Certificate> {
    let upper = property == Property::Lipschitz;
    let check = Check {
        property,
        subject: "map".into(),
        bound: if upper { Bound::Upper } else { Bound::Lower },
        claimed,
        dim: map.dim(),
        observe: Box::new(move |s| {
            let d = map.eval(&s.x)?.distance(&map.eval(&s.y)?)?;
            Ok(vec![(d, s.x.distance(&s.y)?)])
        }),
    };
    match map.as_affine() {
        Some(a) => {
            let s = singular_extremes(a.matrix());
            if upper {
                check.exact(s.max, s.max_vector, "largest singular value of L")
            } else {
                check.exact(s.min, s.min_vector, "smallest singular value of L")
            }
        }
        None => check.sampled(plan),
    }
}

/// `(μ₁, γ₁)` strong mixed cocoercivity w.r.t. (A, C) and `(μ₂, γ₂)` relaxed
/// mixed cocoercivity w.r.t. (B, D), using the declared constants.
pub fn certify_symmetric_mixed_cocoercive(inst: &InclusionInstance, plan: &SamplePlan) -> Result<(Certificate, Certificate)> {
    let c = inst.constants.require(&["mu1", "gamma1", "mu2", "gamma2"])?;
    certify_mixed_cocoercive_with(inst, (c[0], c[1]), (c[2], c[3]), plan)
}

/// As [`certify_symmetric_mixed_cocoercive`] with explicit `(μ, γ)` claims.
/// The certified constant is the best γ for the given μ.
pub fn certify_mixed_cocoercive_with(
    inst: &InclusionInstance,
    (mu1, gamma1): (f64, f64),
    (mu2, gamma2): (f64, f64),
    plan: &SamplePlan,
) -> Result<(Certificate, Certificate)> {
    positive("mu1", mu1)?;
    positive("gamma1", gamma1)?;
    non_negative("mu2", mu2)?;
    positive("gamma2", gamma2)?;
    let q = inst.space.q;
    let dim = inst.dim();

    let strong = Check {
        property: Property::StronglyMixedCocoercive,
        subject: "H w.r.t. (A, C)".into(),
        bound: Bound::Lower,
        claimed: gamma1,
        dim,
        observe: Box::new(move |s| {
            let u = &s.aux;
            let (ax, ay) = (inst.a.eval(&s.x)?, inst.a.eval(&s.y)?);
            let hx = inst.h.eval(&ax, u, &inst.c.eval(&s.x)?, u);
            let hy = inst.h.eval(&ay, u, &inst.c.eval(&s.y)?, u);
            let d = diff(&s.x, &s.y);
            let lhs = inner(&diff(&hx, &hy), &duality_map(&d, q)?)?;
            Ok(vec![(lhs - mu1 * norm(&diff(&ax, &ay)).powf(q), norm(&d).powf(q))])
        }),
    };
    let relaxed = Check {
        property: Property::RelaxedMixedCocoercive,
        subject: "H w.r.t. (B, D)".into(),
        bound: Bound::Lower,
        claimed: gamma2,
        dim,
        observe: Box::new(move |s| {
            let u = &s.aux;
            let (bx, by) = (inst.b.eval(&s.x)?, inst.b.eval(&s.y)?);
            let hx = inst.h.eval(u, &bx, u, &inst.d.eval(&s.x)?);
            let hy = inst.h.eval(u, &by, u, &inst.d.eval(&s.y)?);
            let d = diff(&s.x, &s.y);
            let lhs = inner(&diff(&hx, &hy), &duality_map(&d, q)?)?;
            Ok(vec![(lhs + mu2 * norm(&diff(&bx, &by)).powf(q), norm(&d).powf(q))])
        }),
    };

    let additive = matches!(inst.h, crate::operator::BiSlotMapH::Additive) && q == 2.0;
    let lin = |m: &SingleValuedMap| m.as_affine().map(|a| a.matrix().clone());
    let first = match (additive, lin(&inst.a), lin(&inst.c)) {
        (true, Some(a), Some(c)) => {
            let form = symmetric_part(&(&a + &c)) - a.transpose() * &a * mu1;
            let e = min_eigen(&form);
            strong.exact(e.value, e.vector, "smallest eigenvalue of sym(A+C) - mu1 A^T A")?
        }
        _ => strong.sampled(plan)?,
    };
    let second = match (additive, lin(&inst.b), lin(&inst.d)) {
        (true, Some(b), Some(d)) => {
            let form = symmetric_part(&(&b + &d)) + b.transpose() * &b * mu2;
            let e = min_eigen(&form);
            relaxed.exact(e.value, e.vector, "smallest eigenvalue of sym(B+D) + mu2 B^T B")?
        }
        _ => relaxed.sampled(plan)?,
    };
    Ok((first.with_param("mu1", mu1), second.with_param("mu2", mu2)))
}

/// `‖H(x) − H(y)‖ ≤ τ‖x − y‖` for the composite `x ↦ H((Ax,Bx),(Cx,Dx))`.
pub fn certify_mixed_lipschitz(inst: &InclusionInstance, claimed: f64, plan: &SamplePlan) -> Result<Certificate> {
    positive("tau", claimed)?;
    let check = Check {
        property: Property::MixedLipschitz,
        subject: "H((A,B),(C,D))".into(),
        bound: Bound::Upper,
        claimed,
        dim: inst.dim(),
        observe: Box::new(move |s| Ok(vec![(inst.eval_h(&s.x)?.distance(&inst.eval_h(&s.y)?)?, s.x.distance(&s.y)?)])),
    };
    match inst.h_composite() {
        Some(h) => {
            if h.matrix().iter().all(|&v| v == 0.0) {
                return check.exact(0.0, Vector::basis(inst.dim(), 0), "composite linear part is zero");
            }
            let s = singular_extremes(h.matrix());
            check.exact(s.max, s.max_vector, "operator 2-norm of the composite")
        }
        None => check.sampled(plan),
    }
}

/// `D(G x, G y) ≤ l‖x − y‖`.
pub fn certify_d_lipschitz(map: &FiniteSetValuedMap, dim: usize, claimed: f64, plan: &SamplePlan) -> Result<Certificate> {
    positive("l", claimed)?;
    let check = Check {
        property: Property::DLipschitz,
        subject: "set-valued map".into(),
        bound: Bound::Upper,
        claimed,
        dim,
        observe: Box::new(move |s| Ok(vec![(hausdorff_distance(&map.eval(&s.x)?, &map.eval(&s.y)?)?, s.x.distance(&s.y)?)])),
    };
    match map.singleton_linear(dim) {
        Some(l) if l.iter().all(|&v| v == 0.0) => check.exact(0.0, Vector::basis(dim, 0), "constant singleton map"),
        Some(l) => {
            let s = singular_extremes(&l);
            check.exact(s.max, s.max_vector, "largest singular value of the singleton's linear part")
        }
        None => check.sampled(plan),
    }
}

/// σ, δ (both normalizations) and ε₁, ε₂ for F, using declared constants.
///
/// Order: σ domain, σ H-image, δ domain, δ H-image, ε₁, ε₂.
#[allow(non_snake_case)]
pub fn certify_F_properties(inst: &InclusionInstance, plan: &SamplePlan) -> Result<Vec<Certificate>> {
    let c = inst.constants.require(&["sigma", "delta", "epsilon1", "epsilon2"])?;
    let (sigma, delta, eps1, eps2) = (c[0], c[1], c[2], c[3]);
    let mut out = Vec::with_capacity(6);
    for (arg, claimed) in [(FArg::First, sigma), (FArg::Second, delta)] {
        for form in [Normalization::Domain, Normalization::HImage] {
            out.push(certify_f_strong_accretive(inst, arg, form, claimed, plan)?);
        }
    }
    out.push(certify_f_lipschitz(inst, FArg::First, eps1, plan)?);
    out.push(certify_f_lipschitz(inst, FArg::Second, eps2, plan)?);
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FArg {
    First,
    Second,
}

/// Strong accretivity of F in one argument w.r.t. S (or T) and H:
/// `⟨F(v₁,·) − F(v₂,·), J_q(H u − H v)⟩ ≥ c·N(u,v)` for `v₁ ∈ S(u)`,
/// `v₂ ∈ S(v)`, with `N = ‖u − v‖^q` or `‖H u − H v‖^q`.
pub fn certify_f_strong_accretive(
    inst: &InclusionInstance,
    arg: FArg,
    form: Normalization,
    claimed: f64,
    plan: &SamplePlan,
) -> Result<Certificate> {
    positive(if arg == FArg::First { "sigma" } else { "delta" }, claimed)?;
    let q = inst.space.q;
    let dim = inst.dim();
    let selector = if arg == FArg::First { &inst.s } else { &inst.t };
    let (property, subject) = match arg {
        FArg::First => (Property::FStronglyAccretiveFirst, "F first argument w.r.t. (S, H)"),
        FArg::Second => (Property::FStronglyAccretiveSecond, "F second argument w.r.t. (T, H)"),
    };
    let eval_f = move |sel: &Vector, frozen: &Vector| match arg {
        FArg::First => inst.pair_f.eval(sel, frozen),
        FArg::Second => inst.pair_f.eval(frozen, sel),
    };
    let check = Check {
        property,
        subject: subject.into(),
        bound: Bound::Lower,
        claimed,
        dim,
        observe: Box::new(move |s| {
            let dh = diff(&inst.eval_h(&s.x)?, &inst.eval_h(&s.y)?);
            let jdh = duality_map(&dh, q)?;
            let weight = match form {
                Normalization::Domain => norm(&diff(&s.x, &s.y)).powf(q),
                Normalization::HImage => norm(&dh).powf(q),
            };
            let (sx, sy) = (selector.eval(&s.x)?, selector.eval(&s.y)?);
            let mut out = Vec::with_capacity(sx.len() * sy.len());
            for v1 in &sx {
                for v2 in &sy {
                    let df = diff(&eval_f(v1, &s.aux)?, &eval_f(v2, &s.aux)?);
                    out.push((inner(&df, &jdh)?, weight));
                }
            }
            Ok(out)
        }),
    };
    let exact = (|| {
        if q != 2.0 {
            return None;
        }
        let (p, qm) = match &inst.pair_f {
            PairMapF::Affine { p, q, .. } => (p, q),
            PairMapF::Custom { .. } => return None,
        };
        let coupling = if arg == FArg::First { p } else { qm };
        let sel = selector.singleton_linear(dim)?;
        let lh = inst.h_composite()?.matrix().clone();
        Some((coupling * sel, lh))
    })();
    let cert = match exact {
        Some((fs, lh)) => match form {
            Normalization::Domain => {
                let e = min_eigen(&symmetric_part(&(lh.transpose() * &fs)));
                check.exact(e.value, e.vector, "smallest eigenvalue of sym(L_H^T P L_S)")?
            }
            Normalization::HImage => match lh.clone().try_inverse().filter(|_| !crate::linalg::is_numerically_singular(&lh)) {
                Some(inv) => {
                    let e = min_eigen(&symmetric_part(&(&fs * &inv)));
                    let direction = crate::linalg::from_dvector(&(inv * crate::linalg::to_dvector(&e.vector)));
                    check.exact(e.value, direction, "smallest eigenvalue of sym(P L_S L_H^-1)")?
                }
                None => check.sampled(plan)?,
            },
        },
        None => check.sampled(plan)?,
    };
    Ok(cert.with_form(form))
}

/// `‖F(u, ·) − F(v, ·)‖ ≤ ε‖u − v‖` in one argument.
pub fn certify_f_lipschitz(inst: &InclusionInstance, arg: FArg, claimed: f64, plan: &SamplePlan) -> Result<Certificate> {
    positive(if arg == FArg::First { "epsilon1" } else { "epsilon2" }, claimed)?;
    let (property, subject) = match arg {
        FArg::First => (Property::FLipschitzFirst, "F first argument"),
        FArg::Second => (Property::FLipschitzSecond, "F second argument"),
    };
    let check = Check {
        property,
        subject: subject.into(),
        bound: Bound::Upper,
        claimed,
        dim: inst.dim(),
        observe: Box::new(move |s| {
            let (fx, fy) = match arg {
                FArg::First => (inst.pair_f.eval(&s.x, &s.aux)?, inst.pair_f.eval(&s.y, &s.aux)?),
                FArg::Second => (inst.pair_f.eval(&s.aux, &s.x)?, inst.pair_f.eval(&s.aux, &s.y)?),
            };
            Ok(vec![(fx.distance(&fy)?, s.x.distance(&s.y)?)])
        }),
    };
    match &inst.pair_f {
        PairMapF::Affine { p, q, .. } => {
            let m = if arg == FArg::First { p } else { q };
            if m.iter().all(|&v| v == 0.0) {
                return check.exact(0.0, Vector::basis(inst.dim(), 0), "coupling matrix is zero");
            }
            let s = singular_extremes(m);
            check.exact(s.max, s.max_vector, "largest singular value of the coupling matrix")
        }
        PairMapF::Custom { .. } => check.sampled(plan),
    }
}

/// Result of deciding generalized αβ-H((.,.),(.,.))-mixed accretivity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneralizedAccretiveReport {
    pub f_slot: Certificate,
    pub g_slot: Certificate,
    /// Part (i): both slots hold and α ≥ β.
    pub symmetric: Certificate,
    /// Part (ii): `(H + ρM)(X) = X` over the ρ grid.
    pub surjectivity: Certificate,
    pub verdict: Verdict,
}

impl GeneralizedAccretiveReport {
    pub fn certificates(&self) -> [&Certificate; 4] {
        [&self.f_slot, &self.g_slot, &self.symmetric, &self.surjectivity]
    }
}

pub fn certify_symmetric_accretive(inst: &InclusionInstance, plan: &SamplePlan) -> Result<(Certificate, Certificate, Certificate)> {
    let c = inst.constants.require(&["alpha", "beta"])?;
    let (alpha, beta) = (c[0], c[1]);
    let f_slot = certify_m_slot(inst, MSlot::F, alpha, plan)?;
    let g_slot = certify_m_slot(inst, MSlot::G, beta, plan)?;
    let mut verdict = f_slot.verdict.and(g_slot.verdict);
    let mut witness = [&f_slot, &g_slot].iter().find(|c| c.verdict.is_fail()).and_then(|c| c.witness.clone());
    if alpha < beta {
        verdict = Verdict::Fail;
        witness.get_or_insert(Witness::Spectral {
            summary: format!("declared alpha = {alpha} < beta = {beta}"),
            value: alpha - beta,
            direction: Vector::basis(inst.dim(), 0),
        });
    }
    let method = if f_slot.method == Method::ExactAffine && g_slot.method == Method::ExactAffine {
        Method::ExactAffine
    } else {
        Method::Sampled
    };
    let symmetric = Certificate {
        property: Property::SymmetricAccretive,
        subject: "M w.r.t. (f, g)".into(),
        bound: Bound::Lower,
        claimed: alpha - beta,
        constant: f_slot.constant - g_slot.constant,
        method,
        verdict,
        form: None,
        parameters: BTreeMap::from([("alpha".to_string(), alpha), ("beta".to_string(), beta)]),
        witness,
        seed: f_slot.seed,
        samples: f_slot.samples.max(g_slot.samples),
    };
    Ok((f_slot, g_slot, symmetric))
}

/// Part (ii): surjectivity of `H + ρM(f, g)` on every ρ in the grid. For
/// affine instances the composite is checked for invertibility at each ρ and
/// every positive root of `det(H + ρM)` is reported; any such root fails the
/// certificate, since the condition must hold for all ρ > 0. Otherwise the
/// range is probed by solving for sampled targets (verdict at most
/// `estimated`).
pub fn certify_surjectivity(inst: &InclusionInstance, rho_grid: &[f64], plan: &SamplePlan) -> Result<Certificate> {
    if rho_grid.is_empty() {
        return Err(Error::InvalidParameter { name: "rho_grid", reason: "must not be empty".into() });
    }
    for &r in rho_grid {
        positive("rho_grid", r)?;
    }
    let base = Certificate {
        property: Property::SurjectiveHPlusRhoM,
        subject: "H((A,B),(C,D)) + rho M(f,g)".into(),
        bound: Bound::Lower,
        claimed: 0.0,
        constant: 0.0,
        method: Method::ExactAffine,
        verdict: Verdict::Pass,
        form: None,
        parameters: rho_grid.iter().enumerate().map(|(i, r)| (format!("rho[{i}]"), *r)).collect(),
        witness: None,
        seed: None,
        samples: 0,
    };

    if let (Some(h), Some(m)) = (inst.h_composite(), inst.m_composite()) {
        let mut probes = Vec::with_capacity(rho_grid.len());
        let mut defect = None;
        let mut constant_image = None;
        for &rho in rho_grid {
            let k = h.plus(&m.scaled(rho));
            let s = singular_extremes(k.matrix());
            let is_zero = operator_norm(k.matrix()) == 0.0;
            let d = composite_defect(&k);
            let cond = if s.min == 0.0 || is_zero { f64::INFINITY } else { s.max / s.min };
            probes.push(RhoProbe {
                rho,
                determinant: k.matrix().determinant(),
                min_singular_value: if is_zero { 0.0 } else { s.min },
                condition_number: cond,
                invertible: d.is_none(),
            });
            if let Some(d) = d {
                if is_zero && constant_image.is_none() {
                    constant_image = Some(k.offset().clone());
                }
                defect.get_or_insert(format!("rho = {rho}: {d}"));
            }
        }
        let critical = critical_rhos(h.matrix(), m.matrix());
        if let Some(roots) = critical.as_ref().filter(|r| !r.is_empty()) {
            defect.get_or_insert(format!("det(H + rho M) vanishes at rho = {roots:?}"));
        }
        let constant = probes.iter().map(|p| p.min_singular_value).fold(f64::INFINITY, f64::min);
        let verdict = if defect.is_some() { Verdict::Fail } else { Verdict::Pass };
        let image_norm = constant_image.as_ref().map(norm);
        let witness = SurjectivityWitness { probes, critical_rhos: critical, constant_image, image_norm, defect };
        return Ok(Certificate {
            constant,
            verdict,
            witness: Some(Witness::Surjectivity(witness)),
            ..base
        });
    }

    // Range probe for black-box instances.
    if plan.is_empty() {
        return Err(Error::InsufficientEvidence("surjectivity of a non-affine instance needs range probes".into()));
    }
    let targets = plan.points(inst.dim(), 16);
    for &rho in rho_grid {
        let cfg = ResolventConfig {
            rho,
            solver: SolverKind::DampedFixedPoint,
            ..ResolventConfig::new(rho)
        };
        let resolvent = Resolvent::new(inst, cfg)?;
        for z in &targets {
            if let Err(e) = resolvent.apply(z) {
                return Ok(Certificate {
                    method: Method::Sampled,
                    verdict: Verdict::Fail,
                    witness: Some(Witness::Unreached { rho, target: z.clone(), reason: e.to_string() }),
                    seed: Some(plan.seed),
                    samples: targets.len(),
                    ..base
                });
            }
        }
    }
    Ok(Certificate {
        method: Method::Sampled,
        verdict: Verdict::Estimated,
        seed: Some(plan.seed),
        samples: targets.len() * rho_grid.len(),
        constant: f64::NAN,
        ..base
    })
}

/// Decides generalized αβ-H((.,.),(.,.))-mixed accretivity: symmetric
/// accretivity of M (declared α, β) plus surjectivity over `rho_grid`.
pub fn certify_generalized_mixed_accretive(
    inst: &InclusionInstance,
    rho_grid: &[f64],
    plan: &SamplePlan,
) -> Result<GeneralizedAccretiveReport> {
    let (f_slot, g_slot, symmetric) = certify_symmetric_accretive(inst, plan)?;
    let surjectivity = certify_surjectivity(inst, rho_grid, plan)?;
    let verdict = symmetric.verdict.and(surjectivity.verdict);
    Ok(GeneralizedAccretiveReport { f_slot, g_slot, symmetric, surjectivity, verdict })
}

/// A certificate in a bundle. Informational entries are reported but do not
/// decide the bundle verdict.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BundleEntry {
    pub certificate: Certificate,
    pub informational: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bundle {
    pub entries: Vec<BundleEntry>,
    /// Properties not checked because their constants are not declared.
    pub skipped: Vec<String>,
    pub rho_grid: Vec<f64>,
    pub verdict: Verdict,
}

/// Default ρ grid: the instance's ρ together with 0.5, 1 and 2.
pub fn default_rho_grid(inst: &InclusionInstance) -> Vec<f64> {
    let mut grid = vec![inst.rho, 0.5, 1.0, 2.0];
    grid.sort_by(|a, b| a.total_cmp(b));
    grid.dedup();
    grid
}

/// Certifies every declared constant of the instance plus surjectivity of
/// `H + ρM` on `rho_grid`. The σ and δ claims are checked against the
/// domain normalization; the H-image normalization is reported alongside
/// as informational.
pub fn certificate_bundle(inst: &InclusionInstance, rho_grid: &[f64], plan: &SamplePlan) -> Result<Bundle> {
    let k = &inst.constants;
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    let mut push = |c: Certificate, informational: bool| entries.push(BundleEntry { certificate: c, informational });
    let has = |names: &[&str]| names.iter().all(|n| k.get(n).is_some());

    if has(&["mu1", "gamma1", "mu2", "gamma2"]) {
        let (a, b) = certify_symmetric_mixed_cocoercive(inst, plan)?;
        push(a, false);
        push(b, false);
    } else {
        skipped.push("mixed cocoercivity (needs mu1, gamma1, mu2, gamma2)".into());
    }
    match k.tau {
        Some(t) => push(certify_mixed_lipschitz(inst, t, plan)?, false),
        None => skipped.push("mixed Lipschitz (needs tau)".into()),
    }
    match k.alpha1 {
        Some(a) => push(certify_expansive(&inst.a, a, plan)?, false),
        None => skipped.push("expansiveness of A (needs alpha1)".into()),
    }
    match k.beta1 {
        Some(b) => push(certify_lipschitz(&inst.b, b, plan)?, false),
        None => skipped.push("Lipschitz continuity of B (needs beta1)".into()),
    }
    if has(&["alpha", "beta"]) {
        let (f, g, sym) = certify_symmetric_accretive(inst, plan)?;
        push(f, false);
        push(g, false);
        push(sym, false);
    } else {
        skipped.push("symmetric accretivity of M (needs alpha, beta)".into());
    }
    push(certify_surjectivity(inst, rho_grid, plan)?, false);
    for (arg, name) in [(FArg::First, "sigma"), (FArg::Second, "delta")] {
        match k.get(name) {
            Some(c) => {
                push(certify_f_strong_accretive(inst, arg, Normalization::Domain, c, plan)?, false);
                push(certify_f_strong_accretive(inst, arg, Normalization::HImage, c, plan)?, true);
            }
            None => skipped.push(format!("strong accretivity of F (needs {name})")),
        }
    }
    for (arg, name) in [(FArg::First, "epsilon1"), (FArg::Second, "epsilon2")] {
        match k.get(name) {
            Some(c) => push(certify_f_lipschitz(inst, arg, c, plan)?, false),
            None => skipped.push(format!("Lipschitz continuity of F (needs {name})")),
        }
    }
    for (map, name, subject) in [(&inst.s, "l1", "S"), (&inst.t, "l2", "T")] {
        match k.get(name) {
            Some(c) => {
                let mut cert = certify_d_lipschitz(map, inst.dim(), c, plan)?;
                cert.subject = subject.into();
                push(cert, false);
            }
            None => skipped.push(format!("D-Lipschitz continuity (needs {name})")),
        }
    }
    let verdict = entries
        .iter()
        .filter(|e| !e.informational)
        .fold(Verdict::Pass, |acc, e| acc.and(e.certificate.verdict));
    Ok(Bundle { entries, skipped, rho_grid: rho_grid.to_vec(), verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::{example_3_2, example_3_3, example_4_7};
    use crate::operator::AffineMap;

    fn plan() -> SamplePlan {
        SamplePlan::with_seed(7)
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-9
    }

    #[test]
    fn strong_accretive_examples() {
        let e32 = example_3_2().instance;
        let c = certify_strong_accretive(&e32.f, 5.0, 2.0, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(close(c.constant, 5.0));

        let e47 = example_4_7().instance;
        let c = certify_strong_accretive(&e47.f, 0.5, 2.0, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(close(c.constant, 0.5));

        let id = SingleValuedMap::from(AffineMap::identity(3));
        let c = certify_strong_accretive(&id, 1.0, 2.0, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(close(c.constant, 1.0));
    }

    #[test]
    fn strong_accretive_rejects_overclaim_with_pair() {
        let e32 = example_3_2().instance;
        let c = certify_strong_accretive(&e32.f, 5.5, 2.0, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        match c.witness {
            Some(Witness::Pair { lhs, rhs, .. }) => assert!(lhs < rhs),
            other => panic!("expected pair witness, got {other:?}"),
        }
    }

    #[test]
    fn relaxed_accretive_examples() {
        let e32 = example_3_2().instance;
        let c = certify_m_slot(&e32, MSlot::G, 7.0 / 4.0, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(close(c.constant, 1.75));

        let e47 = example_4_7().instance;
        let c = certify_m_slot(&e47, MSlot::G, 0.25, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(close(c.constant, 0.25));

        let zero = SingleValuedMap::from(AffineMap::zero(2));
        let c = certify_relaxed_accretive(&zero, 0.3, 2.0, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.constant, 0.0);
    }

    #[test]
    fn non_affine_without_samples_is_insufficient() {
        let m = SingleValuedMap::custom(2, "cubic", |x| Vector::new(x.coords().iter().map(|c| c + c * c * c).collect()).unwrap());
        let err = certify_strong_accretive(&m, 1.0, 2.0, &SamplePlan::empty()).unwrap_err();
        assert!(matches!(err, Error::InsufficientEvidence(_)));
    }

    #[test]
    fn sampled_never_passes() {
        let m = SingleValuedMap::custom(2, "cubic", |x| Vector::new(x.coords().iter().map(|c| c + c * c * c).collect()).unwrap());
        let c = certify_strong_accretive(&m, 1.0, 2.0, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Estimated);
        assert_eq!(c.method, Method::Sampled);
        assert!(c.constant >= 1.0 - 1e-9);
        let c = certify_strong_accretive(&m, 2.5, 2.0, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        assert!(matches!(c.witness, Some(Witness::Pair { .. })));
    }

    #[test]
    fn q_other_than_two_goes_through_samples() {
        let id = SingleValuedMap::from(AffineMap::identity(2));
        let c = certify_strong_accretive(&id, 1.0, 3.0, &plan()).unwrap();
        assert_eq!(c.method, Method::Sampled);
        assert_eq!(c.verdict, Verdict::Estimated);
        assert!((c.constant - 1.0).abs() < 1e-9);
    }

    #[test]
    fn mixed_cocoercive_examples() {
        let e32 = example_3_2().instance;
        let (a, b) = certify_mixed_cocoercive_with(&e32, (0.25, 2.0), (1.0 / 3.0, 1.0), &plan()).unwrap();
        assert_eq!((a.verdict, b.verdict), (Verdict::Pass, Verdict::Pass));
        assert!(close(a.constant, 2.0) && close(b.constant, 1.0));

        let e47 = example_4_7().instance;
        let (a, b) = certify_symmetric_mixed_cocoercive(&e47, &plan()).unwrap();
        assert_eq!((a.verdict, b.verdict), (Verdict::Pass, Verdict::Pass));
        assert!(close(a.constant, 2.0) && close(b.constant, 1.0));
    }

    #[test]
    fn mixed_lipschitz_examples() {
        let c = certify_mixed_lipschitz(&example_3_2().instance, 4.0, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(close(c.constant, 4.0));
        let c = certify_mixed_lipschitz(&example_4_7().instance, 2.9, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(close(c.constant, 2.9));

        let mut zero = example_4_7().instance;
        for m in [&mut zero.a, &mut zero.b, &mut zero.c, &mut zero.d] {
            *m = AffineMap::zero(2).into();
        }
        let c = certify_mixed_lipschitz(&zero, 0.01, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert_eq!(c.constant, 0.0);
    }

    #[test]
    fn expansive_and_lipschitz_examples() {
        let e47 = example_4_7().instance;
        let c = certify_expansive(&e47.a, 0.1, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(close(c.constant, 0.1));
        let c = certify_lipschitz(&e47.b, 0.2, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(close(c.constant, 0.2));
        let id = SingleValuedMap::from(AffineMap::identity(2));
        assert_eq!(certify_expansive(&id, 1.0, &plan()).unwrap().verdict, Verdict::Pass);
        assert_eq!(certify_lipschitz(&id, 1.0, &plan()).unwrap().verdict, Verdict::Pass);
    }

    #[test]
    fn f_property_examples() {
        let certs = certify_F_properties(&example_4_7().instance, &plan()).unwrap();
        let sigma = &certs[0];
        assert_eq!(sigma.form, Some(Normalization::Domain));
        assert_eq!(sigma.verdict, Verdict::Pass);
        assert!(close(sigma.constant, 0.725));
        // Normalized by ‖ΔH‖² = 8.41‖Δ‖², the same pairing gives 0.25/2.9.
        let sigma_h = &certs[1];
        assert_eq!(sigma_h.form, Some(Normalization::HImage));
        assert!(close(sigma_h.constant, 0.25 / 2.9));
        assert_eq!(sigma_h.verdict, Verdict::Fail);
        assert!(close(certs[2].constant, 0.58));
        assert!(close(certs[4].constant, 0.25));
        assert!(close(certs[5].constant, 0.2));
    }

    #[test]
    fn f_sigma_with_identity_slots() {
        // F(x, y) = x, H-composite = identity: both sides equal ‖x − y‖².
        let mut inst = example_4_7().instance;
        inst.a = AffineMap::identity(2).into();
        for m in [&mut inst.b, &mut inst.c, &mut inst.d] {
            *m = AffineMap::zero(2).into();
        }
        inst.pair_f = PairMapF::scalar(2, 1.0, 0.0);
        for form in [Normalization::Domain, Normalization::HImage] {
            let c = certify_f_strong_accretive(&inst, FArg::First, form, 1.0, &plan()).unwrap();
            assert_eq!(c.verdict, Verdict::Pass);
            assert!(close(c.constant, 1.0));
        }
    }

    #[test]
    fn d_lipschitz_examples() {
        let c = certify_d_lipschitz(&FiniteSetValuedMap::Identity, 2, 1.0, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        let constant = FiniteSetValuedMap::Affine(AffineMap::zero(2).with_offset(Vector::new(vec![1.0, 2.0]).unwrap()).unwrap());
        assert_eq!(certify_d_lipschitz(&constant, 2, 0.01, &plan()).unwrap().verdict, Verdict::Pass);
        let double = FiniteSetValuedMap::Affine(AffineMap::scalar(2, 2.0));
        let c = certify_d_lipschitz(&double, 2, 2.0, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        let c = certify_d_lipschitz(&double, 2, 1.9, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Fail);
        match c.witness {
            Some(Witness::Pair { lhs, rhs, .. }) => assert!(lhs > rhs),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn d_lipschitz_sampled_on_translates() {
        let g = FiniteSetValuedMap::Translates {
            base: AffineMap::scalar(2, 2.0),
            offsets: vec![Vector::new(vec![0.0, 0.0]).unwrap(), Vector::new(vec![1.0, 0.0]).unwrap()],
        };
        let c = certify_d_lipschitz(&g, 2, 2.0, &plan()).unwrap();
        assert_eq!(c.method, Method::Sampled);
        assert_eq!(c.verdict, Verdict::Estimated);
        assert_eq!(certify_d_lipschitz(&g, 2, 1.9, &plan()).unwrap().verdict, Verdict::Fail);
    }

    #[test]
    fn generalized_mixed_accretive_examples() {
        let r = certify_generalized_mixed_accretive(&example_3_2().instance, &[0.5, 1.0, 2.0], &plan()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);

        let r = certify_generalized_mixed_accretive(&example_4_7().instance, &[1.0], &plan()).unwrap();
        assert_eq!(r.verdict, Verdict::Pass);

        let r = certify_generalized_mixed_accretive(&example_3_3(8, 3).unwrap().instance, &[1.0], &plan()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert_eq!(r.symmetric.verdict, Verdict::Pass);
        assert_eq!(r.surjectivity.verdict, Verdict::Fail);
        match &r.surjectivity.witness {
            Some(Witness::Surjectivity(w)) => {
                assert!((w.image_norm.unwrap() - 2.0).abs() < 1e-12);
                let img = w.constant_image.as_ref().unwrap();
                assert_eq!(img[2], 2.0);
                assert_eq!(w.critical_rhos.as_deref(), Some(&[1.0][..]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn critical_rho_outside_grid_still_fails() {
        // example_3_3 is singular only at ρ = 1.
        let r = certify_surjectivity(&example_3_3(4, 1).unwrap().instance, &[0.5, 2.0], &plan()).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        match &r.witness {
            Some(Witness::Surjectivity(w)) => assert!(w.probes.iter().all(|p| p.invertible)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn surjectivity_probe_for_black_box() {
        let mut inst = example_4_7().instance;
        let f = inst.f.clone();
        inst.f = SingleValuedMap::custom(2, "f", move |x| f.eval(x).unwrap());
        let c = certify_surjectivity(&inst, &[0.35, 1.0], &plan()).unwrap();
        assert_eq!(c.method, Method::Sampled);
        assert_eq!(c.verdict, Verdict::Estimated);
    }

    #[test]
    fn cocoercive_of_scalar_map() {
        // ⟨2d, d⟩ = 2‖d‖² = 0.5‖2d‖².
        let m = SingleValuedMap::from(AffineMap::scalar(2, 2.0));
        let c = certify_cocoercive(&m, 0.5, 2.0, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(close(c.constant, 0.5));
        let neg = SingleValuedMap::from(AffineMap::scalar(2, -4.0));
        let c = certify_relaxed_cocoercive(&neg, 0.25, 2.0, &plan()).unwrap();
        assert_eq!(c.verdict, Verdict::Pass);
        assert!(close(c.constant, 0.25));
    }

    #[test]
    fn weaker_claims_keep_passing() {
        let e47 = example_4_7().instance;
        for claimed in [0.5, 0.4, 0.1, 1e-6] {
            assert_eq!(certify_strong_accretive(&e47.f, claimed, 2.0, &plan()).unwrap().verdict, Verdict::Pass);
        }
        for claimed in [0.2, 0.3, 1.0, 100.0] {
            assert_eq!(certify_lipschitz(&e47.b, claimed, &plan()).unwrap().verdict, Verdict::Pass);
        }
    }

    #[test]
    fn bundles_for_examples() {
        let b = certificate_bundle(&example_4_7().instance, &[0.35, 0.5, 1.0, 2.0], &plan()).unwrap();
        assert_eq!(b.verdict, Verdict::Pass);
        assert!(b.skipped.is_empty());
        assert!(b.entries.iter().any(|e| e.informational && e.certificate.verdict == Verdict::Fail));

        let inst = example_3_3(8, 3).unwrap().instance;
        let b = certificate_bundle(&inst, &default_rho_grid(&inst), &plan()).unwrap();
        assert_eq!(b.verdict, Verdict::Fail);
        let failed: Vec<_> = b.entries.iter().filter(|e| e.certificate.verdict == Verdict::Fail).collect();
        assert_eq!(failed.len(), 1);
        assert_eq!(failed[0].certificate.property, Property::SurjectiveHPlusRhoM);
    }

    #[test]
    fn certificate_json_names() {
        let certs = certify_F_properties(&example_4_7().instance, &plan()).unwrap();
        let json = serde_json::to_string(&certs[0]).unwrap();
        assert!(json.contains("\"property\":\"F_strongly_accretive_first\""));
        assert!(json.contains("\"method\":\"exact_affine\""));
        assert!(json.contains("\"verdict\":\"pass\""));
    }
}
