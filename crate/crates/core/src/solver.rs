//! The proximal-point iteration with Nadler selections, an optional error
//! sequence, the contraction condition and θ-rate diagnostics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{inclusion_residual, InclusionInstance};
use crate::resolvent::{Resolvent, ResolventConfig};
use crate::space::{norm, Vector};

/// Additive perturbation `e_n` entering `z_{n+1}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ErrorSequence {
    Zero,
    /// `e_n = c0·factorⁿ·direction`.
    Geometric { c0: f64, factor: f64, direction: Vector },
}

impl ErrorSequence {
    /// Geometric sequence along the normalized all-ones direction.
    pub fn geometric(dim: usize, c0: f64, factor: f64) -> Self {
        let ones = Vector::new(vec![1.0; dim]).expect("finite");
        let n = ones.norm();
        Self::Geometric { c0, factor, direction: ones.scale(1.0 / n) }
    }

    pub fn term(&self, dim: usize, n: usize) -> Vector {
        match self {
            Self::Zero => Vector::zeros(dim),
            Self::Geometric { c0, factor, direction } => direction.scale(c0 * factor.powi(n as i32)),
        }
    }

    /// A rate `ϖ ∈ (factor, 1)` for which `Σ‖e_j − e_{j−1}‖ϖ^{−j}` converges.
    pub fn summability_rate(&self) -> Option<f64> {
        match self {
            Self::Zero => None,
            Self::Geometric { factor, .. } => Some((1.0 + factor) / 2.0),
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if let Self::Geometric { c0, factor, direction } = self {
            if !(0.0..1.0).contains(factor) {
                return Err(Error::InvalidParameter { name: "factor", reason: format!("must lie in [0, 1), got {factor}") });
            }
            if !c0.is_finite() {
                return Err(Error::InvalidParameter { name: "c0", reason: "must be finite".into() });
            }
            if direction.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: direction.dim() });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub rho: f64,
    pub max_iters: usize,
    /// Stop once `‖u_{n+1} − u_n‖ ≤ tol` and the residual confirms.
    pub tol: f64,
    pub error_sequence: ErrorSequence,
    pub z0: Vector,
    /// Starting point; `R(z0)` when unset.
    pub u0: Option<Vector>,
}

impl SolverConfig {
    /// `ρ` from the instance, `z0 = (1, …, 1)`, zero errors.
    pub fn for_instance(inst: &InclusionInstance) -> Self {
        Self {
            rho: inst.rho,
            max_iters: 10_000,
            tol: 1e-10,
            error_sequence: ErrorSequence::Zero,
            z0: Vector::new(vec![1.0; inst.dim()]).expect("finite"),
            u0: None,
        }
    }

    fn validate(&self, dim: usize) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::InvalidParameter { name: "rho", reason: format!("must be positive, got {}", self.rho) });
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter { name: "tol", reason: format!("must be positive, got {}", self.tol) });
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidParameter { name: "max_iters", reason: "must be at least 1".into() });
        }
        if self.z0.dim() != dim {
            return Err(Error::DimensionMismatch { left: dim, right: self.z0.dim() });
        }
        if let Some(u0) = &self.u0 {
            if u0.dim() != dim {
                return Err(Error::DimensionMismatch { left: dim, right: u0.dim() });
            }
        }
        self.error_sequence.validate(dim)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub n: usize,
    pub z: Vector,
    pub u: Vector,
    pub v: Vector,
    pub w: Vector,
    /// `‖u_n − u_{n−1}‖`.
    pub step: Option<f64>,
    /// `step_n / step_{n−1}`.
    pub ratio: Option<f64>,
    pub residual: f64,
    pub theta_n: Option<f64>,
    /// `‖e_{n−1}‖`, the perturbation that produced `z_n`.
    pub error_norm: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveSummary {
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
    pub final_step: Option<f64>,
    /// Geometric mean of the last step ratios above the rounding floor.
    pub observed_rate: Option<f64>,
    pub theta: Option<f64>,
    pub final_error_norm: f64,
    /// Gap in the fixed-point characterization `u = R(H(u) − ρF(v,w) + ρω)`.
    pub fixed_point_gap: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub summability_rate: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveTrace {
    pub rows: Vec<TraceRow>,
    pub summary: SolveSummary,
}

impl SolveTrace {
    pub fn last(&self) -> &TraceRow {
        self.rows.last().expect("trace has the initial row")
    }

    /// Trace as CSV; the first column carries the schema tag.
    pub fn to_csv(&self) -> Result<String> {
        let dim = self.rows.first().map_or(0, |r| r.u.dim());
        let mut w = csv::Writer::from_writer(Vec::new());
        let mut header: Vec<String> =
            ["schema", "n", "step", "ratio", "residual", "theta_n", "error_norm"].iter().map(|s| s.to_string()).collect();
        header.extend((1..=dim).map(|i| format!("u_{i}")));
        w.write_record(&header)?;
        let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
        for r in &self.rows {
            let mut rec = vec![
                CSV_SCHEMA.to_string(),
                r.n.to_string(),
                opt(r.step),
                opt(r.ratio),
                format!("{:e}", r.residual),
                opt(r.theta_n),
                format!("{:e}", r.error_norm),
            ];
            rec.extend(r.u.coords().iter().map(|c| format!("{c:e}")));
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Format(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Format(e.to_string()))
    }
}

pub const CSV_SCHEMA: &str = "proxvi-trace/1";

/// Nearest point of `set` to `current`; ties go to the earliest point.
pub fn nadler_select(current: &Vector, set: &[Vector]) -> Result<Vector> {
    let mut best: Option<(f64, &Vector)> = None;
    for p in set {
        let d = current.distance(p)?;
        if best.is_none_or(|(bd, _)| d < bd) {
            best = Some((d, p));
        }
    }
    best.map(|(_, p)| p.clone()).ok_or(Error::EmptySet)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionVerdict {
    Satisfied,
    ViolatedUpper,
    ViolatedRadicand,
    ViolatedLower,
}

/// The three terms under the q-th root.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadicandTerms {
    /// `τ^q`.
    pub tau_q: f64,
    /// `c_q ρ^q (ε₁l₁ + ε₂l₂)^q`.
    pub lipschitz: f64,
    /// `ρq(σ + δ)τ^q`, subtracted.
    pub accretive: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub rho: f64,
    pub q: f64,
    pub c_q: f64,
    pub terms: RadicandTerms,
    pub radicand: f64,
    pub root: Option<f64>,
    pub r: f64,
    pub m: f64,
    pub r_plus_rho_m: f64,
    pub theta: Option<f64>,
    pub verdict: ConditionVerdict,
    /// Ordering hypotheses (α>β, μ₁>μ₂, α₁>β₁, γ>0) that fail.
    pub hypothesis_warnings: Vec<String>,
}

struct RateConstants {
    q: f64,
    c_q: f64,
    tau: f64,
    sigma: f64,
    delta: f64,
    e1l1: f64,
    e2l2: f64,
    r: f64,
    m: f64,
}

fn rate_constants(inst: &InclusionInstance) -> Result<RateConstants> {
    let c = inst.constants.require(&[
        "tau", "sigma", "delta", "epsilon1", "epsilon2", "l1", "l2", "mu1", "gamma1", "mu2", "gamma2", "alpha", "beta", "alpha1",
        "beta1",
    ])?;
    let q = inst.space.q;
    Ok(RateConstants {
        q,
        c_q: inst.space.c_q,
        tau: c[0],
        sigma: c[1],
        delta: c[2],
        e1l1: c[3] * c[5],
        e2l2: c[4] * c[6],
        r: inst.constants.r(q)?,
        m: inst.constants.m()?,
    })
}

impl RateConstants {
    /// Radicand terms with the ε-terms scaled by `factor`.
    fn terms(&self, rho: f64, factor: f64) -> RadicandTerms {
        let q = self.q;
        RadicandTerms {
            tau_q: self.tau.powf(q),
            lipschitz: self.c_q * rho.powf(q) * (factor * (self.e1l1 + self.e2l2)).powf(q),
            accretive: rho * q * (self.sigma + self.delta) * self.tau.powf(q),
        }
    }
}

fn radicand(t: &RadicandTerms) -> f64 {
    t.tau_q + t.lipschitz - t.accretive
}

/// Evaluates `0 < (τ^q + c_qρ^q(ε₁l₁+ε₂l₂)^q − ρq(σ+δ)τ^q)^{1/q} < r + ρm`.
pub fn check_condition_vi(inst: &InclusionInstance, rho: f64) -> Result<ConditionReport> {
    let k = rate_constants(inst)?;
    let terms = k.terms(rho, 1.0);
    let rad = radicand(&terms);
    let denom = k.r + rho * k.m;
    let root = (rad >= 0.0).then(|| rad.powf(1.0 / k.q));
    let verdict = match root {
        None => ConditionVerdict::ViolatedRadicand,
        Some(x) if x <= 0.0 => ConditionVerdict::ViolatedLower,
        Some(x) if x >= denom => ConditionVerdict::ViolatedUpper,
        Some(_) => ConditionVerdict::Satisfied,
    };
    let theta = root.filter(|_| denom > 0.0).map(|x| x / denom);
    Ok(ConditionReport {
        rho,
        q: k.q,
        c_q: k.c_q,
        terms,
        radicand: rad,
        root,
        r: k.r,
        m: k.m,
        r_plus_rho_m: denom,
        theta,
        verdict,
        hypothesis_warnings: inst.constants.ordering_violations(),
    })
}

/// `θ` (when `n` is `None`) or `θ_n`, whose ε-terms carry the factor `1 + 1/n`.
pub fn theta(inst: &InclusionInstance, rho: f64, n: Option<u64>) -> Result<f64> {
    let k = rate_constants(inst)?;
    let factor = match n {
        None => 1.0,
        Some(0) => return Err(Error::InvalidParameter { name: "n", reason: "must be at least 1".into() }),
        Some(n) => 1.0 + 1.0 / n as f64,
    };
    let rad = radicand(&k.terms(rho, factor));
    if rad < 0.0 {
        return Err(Error::NegativeRadicand(rad));
    }
    let denom = k.r + rho * k.m;
    if !(denom > 0.0) {
        return Err(Error::InvalidParameter { name: "r + rho m", reason: format!("must be positive, got {denom}") });
    }
    Ok(rad.powf(1.0 / k.q) / denom)
}

/// `‖u − R(H(u) − ρF(v,w) + ρω)‖`.
pub fn fixed_point_gap(inst: &InclusionInstance, rho: f64, u: &Vector, v: &Vector, w: &Vector) -> Result<f64> {
    let res = Resolvent::new(inst, ResolventConfig::auto(inst, rho))?;
    let z = next_z(inst, rho, u, v, w, &Vector::zeros(inst.dim()))?;
    u.distance(&res.apply(&z)?)
}

fn next_z(inst: &InclusionInstance, rho: f64, u: &Vector, v: &Vector, w: &Vector, e: &Vector) -> Result<Vector> {
    let h = inst.eval_h(u)?;
    let f = inst.pair_f.eval(v, w)?;
    Ok(&(&(&h - &f.scale(rho)) + &inst.omega.scale(rho)) + e)
}

const DIVERGENCE_WINDOW: usize = 20;
const DIVERGENCE_GROWTH: f64 = 10.0;
const RATE_WINDOW: usize = 10;

/// Runs the iteration
/// `u_n = R(z_n)`, `v_n`, `w_n` Nadler selections from `S(u_n)`, `T(u_n)`,
/// `z_{n+1} = H(u_n) − ρF(v_n, w_n) + ρω + e_n`.
pub fn solve(inst: &InclusionInstance, cfg: &SolverConfig) -> Result<SolveTrace> {
    inst.validate()?;
    let dim = inst.dim();
    cfg.validate(dim)?;
    let rho = cfg.rho;
    let res = Resolvent::new(inst, ResolventConfig::auto(inst, rho))?;

    let mut warnings = Vec::new();
    let theta_limit = match check_condition_vi(inst, rho) {
        Ok(rep) => {
            if rep.verdict != ConditionVerdict::Satisfied {
                warnings.push(format!("contraction condition not satisfied at rho = {rho}: {:?}", rep.verdict));
            }
            rep.theta
        }
        Err(e) => {
            warnings.push(format!("contraction condition not checked: {e}"));
            None
        }
    };
    let theta_at = |n: usize| if n == 0 { None } else { theta(inst, rho, Some(n as u64)).ok() };

    let (z0, u0) = match &cfg.u0 {
        Some(u0) => (cfg.z0.clone(), u0.clone()),
        None => (cfg.z0.clone(), res.apply(&cfg.z0)?),
    };
    let v0 = nadler_select(&u0, &inst.s.eval(&u0)?)?;
    let w0 = nadler_select(&u0, &inst.t.eval(&u0)?)?;
    let residual0 = inclusion_residual(inst, &u0, &v0, &w0)?.value;
    let mut rows = vec![TraceRow { n: 0, z: z0, u: u0, v: v0, w: w0, step: None, ratio: None, residual: residual0, theta_n: None, error_norm: 0.0 }];

    let omega_scale = 1.0 + norm(&inst.omega);
    let mut converged = false;
    for n in 0..cfg.max_iters {
        let prev = rows.last().unwrap();
        let e = cfg.error_sequence.term(dim, n);
        let z = next_z(inst, rho, &prev.u, &prev.v, &prev.w, &e)?;
        let u = res.apply(&z)?;
        let v = nadler_select(&prev.v, &inst.s.eval(&u)?)?;
        let w = nadler_select(&prev.w, &inst.t.eval(&u)?)?;
        let step = u.distance(&prev.u)?;
        let ratio = prev.step.filter(|s| *s > 0.0).map(|s| step / s);
        let residual = inclusion_residual(inst, &u, &v, &w)?.value;
        let row = TraceRow { n: n + 1, z, u, v, w, step: Some(step), ratio, residual, theta_n: theta_at(n + 1), error_norm: norm(&e) };
        rows.push(row);

        if !step.is_finite() || !residual.is_finite() {
            return Err(divergence(n + 1, "non-finite iterate".into(), rows, warnings, theta_limit));
        }
        if n + 1 > DIVERGENCE_WINDOW {
            if let Some(old) = rows[n + 1 - DIVERGENCE_WINDOW].step {
                if old > 0.0 && step > cfg.tol && step > DIVERGENCE_GROWTH * old {
                    let reason = format!("step grew from {old:e} to {step:e} over {DIVERGENCE_WINDOW} iterations");
                    return Err(divergence(n + 1, reason, rows, warnings, theta_limit));
                }
            }
        }
        if step <= cfg.tol && residual <= 10.0 * cfg.tol * omega_scale {
            converged = true;
            break;
        }
    }

    let summary = summarize(inst, cfg, &rows, converged, warnings, theta_limit)?;
    Ok(SolveTrace { rows, summary })
}

fn divergence(iteration: usize, reason: String, rows: Vec<TraceRow>, warnings: Vec<String>, theta: Option<f64>) -> Error {
    let last = rows.last().unwrap();
    let summary = SolveSummary {
        converged: false,
        iterations: iteration,
        final_residual: last.residual,
        final_step: last.step,
        observed_rate: observed_rate(&rows),
        theta,
        final_error_norm: last.error_norm,
        fixed_point_gap: f64::NAN,
        summability_rate: None,
        warnings,
    };
    Error::Divergence { iteration, reason, trace: Box::new(SolveTrace { rows, summary }) }
}

/// Geometric mean of the trailing ratios whose steps sit above rounding noise.
fn observed_rate(rows: &[TraceRow]) -> Option<f64> {
    let floor = |r: &TraceRow| 1e-13 * (1.0 + norm(&r.u));
    let ratios: Vec<f64> = rows
        .windows(2)
        .filter_map(|w| {
            let (a, b) = (w[0].step?, w[1].step?);
            (a > floor(&w[0]) && b > floor(&w[1])).then(|| b / a)
        })
        .collect();
    if ratios.is_empty() {
        return None;
    }
    let tail = &ratios[ratios.len().saturating_sub(RATE_WINDOW)..];
    Some((tail.iter().map(|r| r.ln()).sum::<f64>() / tail.len() as f64).exp())
}

fn summarize(
    inst: &InclusionInstance,
    cfg: &SolverConfig,
    rows: &[TraceRow],
    converged: bool,
    mut warnings: Vec<String>,
    theta: Option<f64>,
) -> Result<SolveSummary> {
    let last = rows.last().unwrap();
    if !converged {
        warnings.push(format!("no convergence within {} iterations", cfg.max_iters));
    }
    Ok(SolveSummary {
        converged,
        iterations: rows.len() - 1,
        final_residual: last.residual,
        final_step: last.step,
        observed_rate: observed_rate(rows),
        theta,
        final_error_norm: last.error_norm,
        fixed_point_gap: fixed_point_gap(inst, cfg.rho, &last.u, &last.v, &last.w)?,
        summability_rate: cfg.error_sequence.summability_rate(),
        warnings,
    })
}
