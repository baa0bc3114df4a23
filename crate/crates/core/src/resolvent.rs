//! The proximal-point mapping `R = (H((A,B),(C,D)) + ρM(f,g))⁻¹`.
//!
//! Affine instances are solved with one LU factorization of the composite
//! matrix. Black-box instances use the damped iteration
//! `x ← x − λ(forward(x) − z)`.

use nalgebra::{DMatrix, LU, Dyn};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{condition_number, from_dvector, is_numerically_singular, operator_norm, to_dvector};
use crate::operator::{hausdorff_distance, AffineMap, InclusionInstance};
use crate::sampling::SamplePlan;
use crate::space::{norm, Vector};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    ExactAffine,
    DampedFixedPoint,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResolventConfig {
    pub rho: f64,
    pub solver: SolverKind,
    pub max_inner_iters: usize,
    /// Residual target `‖forward(x) − z‖ ≤ inner_tol·(1 + ‖z‖)`.
    pub inner_tol: f64,
    /// Step size for the damped iteration; derived from constants if unset.
    pub damping: Option<f64>,
}

impl ResolventConfig {
    pub fn new(rho: f64) -> Self {
        Self {
            rho,
            solver: SolverKind::ExactAffine,
            max_inner_iters: 10_000,
            inner_tol: 1e-13,
            damping: None,
        }
    }

    /// Exact solve when every map is affine, damped iteration otherwise.
    pub fn auto(inst: &InclusionInstance, rho: f64) -> Self {
        let solver = if inst.forward_composite(rho).is_some() {
            SolverKind::ExactAffine
        } else {
            SolverKind::DampedFixedPoint
        };
        Self { solver, ..Self::new(rho) }
    }

    fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidParameter { name: "rho", reason: format!("must be positive, got {}", self.rho) });
        }
        if !(self.inner_tol > 0.0) {
            return Err(Error::InvalidParameter { name: "inner_tol", reason: "must be positive".into() });
        }
        if self.max_inner_iters == 0 {
            return Err(Error::InvalidParameter { name: "max_inner_iters", reason: "must be at least 1".into() });
        }
        if let Some(l) = self.damping {
            if !(l > 0.0 && l.is_finite()) {
                return Err(Error::InvalidParameter { name: "damping", reason: format!("must be positive, got {l}") });
            }
        }
        Ok(())
    }
}

/// Why an affine composite fails to be onto, or `None` if it is invertible.
pub fn composite_defect(k: &AffineMap) -> Option<String> {
    if operator_norm(k.matrix()) == 0.0 {
        return Some(format!(
            "composite linear part is zero; the image is the single point {} (norm {})",
            k.offset(),
            norm(k.offset())
        ));
    }
    if is_numerically_singular(k.matrix()) {
        return Some(format!(
            "composite matrix is singular (condition number {:e}, determinant {:e}); the image is a proper affine subspace",
            condition_number(k.matrix()),
            k.matrix().determinant()
        ));
    }
    None
}

enum Engine {
    Exact { lu: LU<f64, Dyn, Dyn>, offset: Vector },
    Damped { lambda: f64 },
}

/// A prepared resolvent for one instance and one ρ.
pub struct Resolvent<'a> {
    inst: &'a InclusionInstance,
    cfg: ResolventConfig,
    engine: Engine,
}

impl<'a> Resolvent<'a> {
    pub fn new(inst: &'a InclusionInstance, cfg: ResolventConfig) -> Result<Self> {
        cfg.validate()?;
        let engine = match cfg.solver {
            SolverKind::ExactAffine => {
                let k = inst.forward_composite(cfg.rho).ok_or_else(|| {
                    Error::NotAffine("exact resolvent requires affine A, B, C, D, f, g, additive H and built-in M".into())
                })?;
                if let Some(defect) = composite_defect(&k) {
                    return Err(Error::NonSurjective(format!("H + rho M at rho = {}: {defect}", cfg.rho)));
                }
                Engine::Exact { lu: k.matrix().clone().lu(), offset: k.offset().clone() }
            }
            SolverKind::DampedFixedPoint => {
                let lambda = match cfg.damping {
                    Some(l) => l,
                    None => default_damping(inst, cfg.rho)?,
                };
                Engine::Damped { lambda }
            }
        };
        Ok(Self { inst, cfg, engine })
    }

    pub fn config(&self) -> &ResolventConfig {
        &self.cfg
    }

    /// `x` with `z ∈ H-composite(x) + ρM(f(x), g(x))`.
    pub fn apply(&self, z: &Vector) -> Result<Vector> {
        if z.dim() != self.inst.dim() {
            return Err(Error::DimensionMismatch { left: self.inst.dim(), right: z.dim() });
        }
        match &self.engine {
            Engine::Exact { lu, offset } => {
                let rhs = to_dvector(&(z - offset));
                let x = lu
                    .solve(&rhs)
                    .ok_or_else(|| Error::NonSurjective("composite matrix is singular".into()))?;
                Ok(from_dvector(&x))
            }
            Engine::Damped { lambda } => self.damped(z, *lambda),
        }
    }

    fn nearest_forward(&self, x: &Vector, z: &Vector) -> Result<(Vector, f64)> {
        let mut best: Option<(Vector, f64)> = None;
        for p in self.inst.forward(x, self.cfg.rho)? {
            let r = &p - z;
            let n = norm(&r);
            if best.as_ref().is_none_or(|(_, bn)| n < *bn) {
                best = Some((r, n));
            }
        }
        best.ok_or(Error::EmptySet)
    }

    fn damped(&self, z: &Vector, lambda: f64) -> Result<Vector> {
        let target = self.cfg.inner_tol * (1.0 + norm(z));
        let mut x = z.clone();
        let mut last = f64::INFINITY;
        for _ in 0..self.cfg.max_inner_iters {
            let (r, n) = self.nearest_forward(&x, z)?;
            if !n.is_finite() {
                break;
            }
            last = n;
            if n <= target {
                return Ok(x);
            }
            x = x.axpy(-lambda, &r)?;
        }
        let (_, n) = self.nearest_forward(&x, z)?;
        if n <= target {
            return Ok(x);
        }
        Err(Error::ConvergenceFailure { iterations: self.cfg.max_inner_iters, residual: if n.is_finite() { n } else { last } })
    }
}

/// `λ = 1/(τ + ρ·Lip(M∘(f,g)))` with the Lipschitz constant estimated on a
/// fixed sample plan; `0.1` when τ is not declared.
fn default_damping(inst: &InclusionInstance, rho: f64) -> Result<f64> {
    let Some(tau) = inst.constants.tau else {
        return Ok(0.1);
    };
    let plan = SamplePlan { pairs: 64, ..SamplePlan::default() };
    let mut lip: f64 = 0.0;
    for s in plan.samples(inst.dim()) {
        let d = s.x.distance(&s.y)?;
        if d > 0.0 {
            lip = lip.max(hausdorff_distance(&inst.eval_m(&s.x)?, &inst.eval_m(&s.y)?)? / d);
        }
    }
    Ok(1.0 / (tau + rho * lip))
}

/// One-shot resolvent evaluation.
pub fn resolve(inst: &InclusionInstance, cfg: &ResolventConfig, z: &Vector) -> Result<Vector> {
    Resolvent::new(inst, *cfg)?.apply(z)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub rho: f64,
    pub r: f64,
    pub m: f64,
    /// `1/(r + ρm)`.
    pub bound: f64,
    pub worst_ratio: f64,
    pub worst_pair: Option<(Vector, Vector)>,
    pub pairs_checked: usize,
    /// Pairs with `u = v`, for which the ratio is undefined.
    pub skipped: usize,
    /// `None` when `q ≠ 2`: the bound is reported but not asserted.
    pub pass: Option<bool>,
    pub seed: u64,
}

/// Checks `‖R(u) − R(v)‖ ≤ ‖u − v‖/(r + ρm)` over sampled pairs.
pub fn audit_lipschitz(inst: &InclusionInstance, cfg: &ResolventConfig, plan: &SamplePlan) -> Result<AuditReport> {
    let q = inst.space.q;
    let r = inst.constants.r(q)?;
    let m = inst.constants.m()?;
    let denom = r + cfg.rho * m;
    if !(denom > 0.0) {
        return Err(Error::InvalidParameter { name: "r + rho m", reason: format!("must be positive, got {denom}") });
    }
    let bound = 1.0 / denom;
    let res = Resolvent::new(inst, *cfg)?;
    let mut worst = 0.0;
    let mut worst_pair = None;
    let (mut checked, mut skipped) = (0, 0);
    for s in plan.samples(inst.dim()) {
        let d = s.x.distance(&s.y)?;
        if d == 0.0 {
            skipped += 1;
            continue;
        }
        let ratio = res.apply(&s.x)?.distance(&res.apply(&s.y)?)? / d;
        checked += 1;
        if ratio > worst {
            worst = ratio;
            worst_pair = Some((s.x, s.y));
        }
    }
    let pass = (q == 2.0).then_some(worst <= bound + 1e-9);
    Ok(AuditReport { rho: cfg.rho, r, m, bound, worst_ratio: worst, worst_pair, pairs_checked: checked, skipped, pass, seed: plan.seed })
}

/// Composite matrix `H + ρM`, for diagnostics.
pub fn composite_matrix(inst: &InclusionInstance, rho: f64) -> Option<DMatrix<f64>> {
    inst.forward_composite(rho).map(|k| k.matrix().clone())
}
