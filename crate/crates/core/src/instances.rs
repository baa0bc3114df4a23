//! Built-in instances: the worked examples and the degenerate shapes that
//! reduce the inclusion to classical special cases. Each carries regression
//! expectations that the certificate and solver modules must reproduce.

use serde::{Deserialize, Serialize};

use crate::certify::{
    certify_d_lipschitz, certify_expansive, certify_f_lipschitz, certify_f_strong_accretive, certify_generalized_mixed_accretive,
    certify_lipschitz, certify_m_slot, certify_mixed_cocoercive_with, certify_mixed_lipschitz, certify_surjectivity, Certificate,
    FArg, Normalization, Verdict,
};
use crate::error::{Error, Result};
use crate::operator::{
    AffineMap, BiSlotMapH, Constants, FiniteSetValuedMap, InclusionInstance, MSlot, PairMapF, SetValuedMapM, SingleValuedMap,
};
use crate::sampling::SamplePlan;
use crate::solver::{check_condition_vi, solve, ConditionVerdict, SolverConfig};
use crate::space::{SpaceConfig, Vector};

/// Where an expected value comes from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Stated in the published example.
    Published,
    /// Computed independently from the instance data.
    Derived,
    /// Follows from the definitions at a glance.
    Elementary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MapName {
    A,
    B,
    C,
    D,
    #[serde(rename = "f")]
    F,
    #[serde(rename = "g")]
    G,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SetMapName {
    S,
    T,
}

/// One regression check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case")]
pub enum Check {
    StronglyMixedCocoercive { mu: f64, gamma: f64 },
    RelaxedMixedCocoercive { mu: f64, gamma: f64 },
    MixedLipschitz { tau: f64 },
    StrongSlot { alpha: f64 },
    RelaxedSlot { beta: f64 },
    Expansive { map: MapName, claimed: f64 },
    Lipschitz { map: MapName, claimed: f64 },
    FStrong { arg: FArg, form: Normalization, claimed: f64 },
    FLipschitz { arg: FArg, claimed: f64 },
    DLipschitz { map: SetMapName, claimed: f64 },
    Surjective { rho_grid: Vec<f64> },
    GeneralizedMixedAccretive { rho_grid: Vec<f64> },
    /// Constant is θ; pass means the condition holds.
    Condition { rho: f64 },
    /// Constant is the distance of the limit to `target`.
    Converges { z0: Vec<f64>, target: Vec<f64>, tol: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expect {
    Pass,
    Fail,
    /// Pass or estimated.
    NotFail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Expectation {
    #[serde(flatten)]
    pub check: Check,
    pub expect: Expect,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    pub tolerance: f64,
    pub source: Source,
}

impl Expectation {
    fn new(check: Check, expect: Expect, constant: Option<f64>, source: Source) -> Self {
        Self { check, expect, constant, tolerance: 1e-9, source }
    }

    fn tol(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance;
        self
    }
}

fn pass(check: Check, constant: f64, source: Source) -> Expectation {
    Expectation::new(check, Expect::Pass, Some(constant), source)
}

fn fail(check: Check, constant: Option<f64>, source: Source) -> Expectation {
    Expectation::new(check, Expect::Fail, constant, source)
}

#[derive(Clone, Debug)]
pub struct NamedInstance {
    pub name: String,
    pub description: String,
    pub instance: InclusionInstance,
    pub expectations: Vec<Expectation>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Outcome {
    pub expectation: Expectation,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<f64>,
    pub met: bool,
    pub evidence: serde_json::Value,
}

fn v(c: &[f64]) -> Vector {
    Vector::new(c.to_vec()).expect("finite literal")
}

fn mat(dim: usize, rows: &[f64]) -> SingleValuedMap {
    AffineMap::from_rows(dim, rows).expect("literal matrix").into()
}

fn scalar(dim: usize, s: f64) -> SingleValuedMap {
    AffineMap::scalar(dim, s).into()
}

/// `A = 4I, B = −3I, C = 2I, D = I` with `f`, `g` rotation-scalings and
/// `M = f − g` on ℝ².
pub fn example_3_2() -> NamedInstance {
    let instance = InclusionInstance {
        space: SpaceConfig::hilbert(2),
        a: scalar(2, 4.0),
        b: scalar(2, -3.0),
        c: scalar(2, 2.0),
        d: scalar(2, 1.0),
        f: mat(2, &[5.0, -2.0 / 3.0, 2.0 / 3.0, 5.0]),
        g: mat(2, &[7.0 / 4.0, 3.0 / 4.0, -3.0 / 4.0, 7.0 / 4.0]),
        h: BiSlotMapH::Additive,
        pair_f: PairMapF::scalar(2, 0.0, 0.0),
        m: SetValuedMapM::f_minus_g(),
        s: FiniteSetValuedMap::Identity,
        t: FiniteSetValuedMap::Identity,
        omega: Vector::zeros(2),
        rho: 1.0,
        constants: Constants {
            mu1: Some(0.25),
            gamma1: Some(2.0),
            mu2: Some(1.0 / 3.0),
            gamma2: Some(1.0),
            alpha: Some(5.0),
            beta: Some(7.0 / 4.0),
            alpha1: Some(4.0),
            beta1: Some(3.0),
            tau: Some(4.0),
            ..Constants::default()
        },
    };
    use Source::*;
    let expectations = vec![
        pass(Check::StronglyMixedCocoercive { mu: 0.25, gamma: 2.0 }, 2.0, Published),
        pass(Check::RelaxedMixedCocoercive { mu: 1.0 / 3.0, gamma: 1.0 }, 1.0, Published),
        pass(Check::MixedLipschitz { tau: 4.0 }, 4.0, Published),
        pass(Check::StrongSlot { alpha: 5.0 }, 5.0, Published),
        pass(Check::RelaxedSlot { beta: 1.75 }, 1.75, Published),
        pass(Check::Expansive { map: MapName::A, claimed: 4.0 }, 4.0, Derived),
        pass(Check::Lipschitz { map: MapName::B, claimed: 3.0 }, 3.0, Derived),
        Expectation::new(Check::Surjective { rho_grid: vec![0.5, 1.0, 2.0] }, Expect::Pass, None, Published),
        Expectation::new(Check::GeneralizedMixedAccretive { rho_grid: vec![0.5, 1.0, 2.0] }, Expect::Pass, None, Published),
        pass(Check::Converges { z0: vec![1.0, 1.0], target: vec![0.0, 0.0], tol: 1e-12 }, 0.0, Derived).tol(1e-9),
    ];
    NamedInstance {
        name: "example_3_2".into(),
        description: "planar instance with additive H and M = f - g; generalized mixed accretive".into(),
        instance,
        expectations,
    }
}

/// Finite truncation of the sequence-space counterexample: the composite
/// `H + ρM` at ρ = 1 has zero linear part and constant image `2eₙ`.
/// `n_index` is 1-based.
pub fn example_3_3(trunc_dim: usize, n_index: usize) -> Result<NamedInstance> {
    if n_index == 0 || n_index > trunc_dim {
        return Err(Error::IndexOutOfRange { index: n_index, dim: trunc_dim });
    }
    let k = trunc_dim;
    let e = Vector::basis(k, n_index - 1);
    let shifted = |s: f64, off: f64| -> SingleValuedMap { AffineMap::scalar(k, s).with_offset(e.scale(off)).expect("dim").into() };
    let instance = InclusionInstance {
        space: SpaceConfig::hilbert(k),
        a: shifted(-5.0, -7.0),
        b: shifted(5.0, 5.0),
        c: scalar(k, -3.0),
        d: shifted(2.0, 3.0),
        f: scalar(k, 2.0),
        g: shifted(1.0, -1.0),
        h: BiSlotMapH::Additive,
        pair_f: PairMapF::scalar(k, 0.0, 0.0),
        m: SetValuedMapM::f_minus_g(),
        s: FiniteSetValuedMap::Identity,
        t: FiniteSetValuedMap::Identity,
        omega: Vector::zeros(k),
        rho: 1.0,
        constants: Constants { alpha: Some(2.0), beta: Some(1.0), ..Constants::default() },
    };
    use Source::*;
    let expectations = vec![
        pass(Check::StrongSlot { alpha: 2.0 }, 2.0, Published),
        pass(Check::RelaxedSlot { beta: 1.0 }, 1.0, Derived),
        fail(Check::Surjective { rho_grid: vec![1.0] }, Some(0.0), Published),
        fail(Check::GeneralizedMixedAccretive { rho_grid: vec![1.0] }, None, Published),
    ];
    Ok(NamedInstance {
        name: "example_3_3".into(),
        description: format!("truncated counterexample in R^{k} with e_n = e_{n_index}; H + M has constant image"),
        instance,
        expectations,
    })
}

/// `A = I/10, B = −I/5, C = 2I, D = I`, `F(x, y) = x/4 + y/5`, identity
/// `S`, `T`, ρ = 0.35, with the published constant block.
pub fn example_4_7() -> NamedInstance {
    let instance = InclusionInstance {
        space: SpaceConfig::hilbert(2),
        a: scalar(2, 0.1),
        b: scalar(2, -0.2),
        c: scalar(2, 2.0),
        d: scalar(2, 1.0),
        f: mat(2, &[0.5, -4.0 / 3.0, 4.0 / 3.0, 0.5]),
        g: mat(2, &[0.25, -0.75, 0.75, 0.25]),
        h: BiSlotMapH::Additive,
        pair_f: PairMapF::scalar(2, 0.25, 0.2),
        m: SetValuedMapM::f_minus_g(),
        s: FiniteSetValuedMap::Identity,
        t: FiniteSetValuedMap::Identity,
        omega: Vector::zeros(2),
        rho: 0.35,
        constants: Constants {
            mu1: Some(10.0),
            gamma1: Some(2.0),
            mu2: Some(5.0),
            gamma2: Some(1.0),
            alpha: Some(0.5),
            beta: Some(0.25),
            alpha1: Some(0.1),
            beta1: Some(0.2),
            tau: Some(2.9),
            sigma: Some(0.725),
            delta: Some(0.58),
            epsilon1: Some(0.25),
            epsilon2: Some(0.2),
            l1: Some(1.0),
            l2: Some(1.0),
        },
    };
    use Source::*;
    let first = FArg::First;
    let second = FArg::Second;
    let expectations = vec![
        pass(Check::StronglyMixedCocoercive { mu: 10.0, gamma: 2.0 }, 2.0, Published),
        pass(Check::RelaxedMixedCocoercive { mu: 5.0, gamma: 1.0 }, 1.0, Published),
        pass(Check::MixedLipschitz { tau: 2.9 }, 2.9, Published),
        pass(Check::StrongSlot { alpha: 0.5 }, 0.5, Published),
        pass(Check::RelaxedSlot { beta: 0.25 }, 0.25, Published),
        pass(Check::Expansive { map: MapName::A, claimed: 0.1 }, 0.1, Published),
        pass(Check::Lipschitz { map: MapName::B, claimed: 0.2 }, 0.2, Derived),
        pass(Check::FStrong { arg: first, form: Normalization::Domain, claimed: 0.725 }, 0.725, Published),
        pass(Check::FStrong { arg: second, form: Normalization::Domain, claimed: 0.58 }, 0.58, Published),
        fail(Check::FStrong { arg: first, form: Normalization::HImage, claimed: 0.725 }, Some(0.25 / 2.9), Derived),
        fail(Check::FStrong { arg: second, form: Normalization::HImage, claimed: 0.58 }, Some(0.2 / 2.9), Derived),
        pass(Check::FLipschitz { arg: first, claimed: 0.25 }, 0.25, Published),
        pass(Check::FLipschitz { arg: second, claimed: 0.2 }, 0.2, Published),
        pass(Check::DLipschitz { map: SetMapName::S, claimed: 1.0 }, 1.0, Published),
        pass(Check::DLipschitz { map: SetMapName::T, claimed: 1.0 }, 1.0, Published),
        Expectation::new(Check::GeneralizedMixedAccretive { rho_grid: vec![0.35, 1.0] }, Expect::Pass, None, Published),
        pass(Check::Condition { rho: 0.35 }, 0.2904, Derived).tol(5e-4),
        fail(Check::Condition { rho: 3.8 }, None, Derived),
        pass(Check::Converges { z0: vec![1.0, 1.0], target: vec![0.0, 0.0], tol: 1e-12 }, 0.0, Derived).tol(1e-9),
    ];
    NamedInstance {
        name: "example_4_7".into(),
        description: "planar instance with coupling F(x, y) = x/4 + y/5 and identity selections; rho = 0.35".into(),
        instance,
        expectations,
    }
}

/// Sets `ω = F(u*, u*) + M(f(u*), g(u*))` so that `u*` solves the inclusion
/// when `S`, `T` are the identity.
pub fn with_constructed_solution(mut inst: InclusionInstance, u_star: &Vector) -> Result<InclusionInstance> {
    let v = crate::solver::nadler_select(u_star, &inst.s.eval(u_star)?)?;
    let w = crate::solver::nadler_select(u_star, &inst.t.eval(u_star)?)?;
    let m = inst.eval_m(u_star)?.remove(0);
    inst.omega = &inst.pair_f.eval(&v, &w)? + &m;
    Ok(inst)
}

fn reduction(name: &str, description: &str, instance: InclusionInstance, u_star: &[f64]) -> NamedInstance {
    let u_star_v = v(u_star);
    let instance = with_constructed_solution(instance, &u_star_v).expect("reduction instances are well formed");
    let expectations = vec![pass(
        Check::Converges { z0: vec![1.0; u_star.len()], target: u_star.to_vec(), tol: 1e-12 },
        0.0,
        Source::Elementary,
    )
    .tol(1e-9)];
    NamedInstance { name: name.into(), description: description.into(), instance, expectations }
}

/// Degenerate shapes: two-slot H (C = D = 0), single-slot H, the scaled
/// single-operator problem `ω ∈ F(S(u), T(u)) + λN(u)` and the sum
/// inclusion `0 ∈ T(u) + N(u)`. Each has `ω` set from a known solution.
pub fn reduction_constructors() -> Vec<NamedInstance> {
    let zero = || scalar(2, 0.0);
    let base = InclusionInstance {
        space: SpaceConfig::hilbert(2),
        a: scalar(2, 3.0),
        b: scalar(2, -1.0),
        c: zero(),
        d: zero(),
        f: scalar(2, 1.0),
        g: scalar(2, 0.1),
        h: BiSlotMapH::Additive,
        pair_f: PairMapF::scalar(2, 0.3, 0.2),
        m: SetValuedMapM::f_minus_g(),
        s: FiniteSetValuedMap::Identity,
        t: FiniteSetValuedMap::Identity,
        omega: Vector::zeros(2),
        rho: 0.5,
        constants: Constants { tau: Some(2.0), alpha: Some(1.0), beta: Some(0.1), ..Constants::default() },
    };
    let two_slot = base.clone();

    let single_slot = InclusionInstance {
        a: scalar(2, 2.0),
        b: zero(),
        g: zero(),
        pair_f: PairMapF::scalar(2, 0.5, 0.0),
        rho: 1.0,
        constants: Constants { tau: Some(2.0), alpha: Some(1.0), beta: Some(0.0), ..Constants::default() },
        ..base.clone()
    };

    let n_op = mat(2, &[1.0, 0.5, -0.5, 1.0]);
    let scaled = InclusionInstance {
        a: scalar(2, 2.0),
        b: zero(),
        f: n_op.clone(),
        g: scalar(2, 1.0),
        m: SetValuedMapM::FirstSlot { scale: 2.0 },
        pair_f: PairMapF::scalar(2, 0.25, 0.25),
        rho: 0.5,
        constants: Constants { tau: Some(2.0), alpha: Some(2.0), beta: Some(0.0), ..Constants::default() },
        ..base.clone()
    };

    let t_map = AffineMap::from_rows(2, &[1.0, 0.0, 0.0, 2.0]).unwrap().with_offset(v(&[1.0, -1.0])).unwrap();
    let sum = InclusionInstance {
        a: scalar(2, 1.0),
        b: zero(),
        f: n_op,
        g: scalar(2, 1.0),
        m: SetValuedMapM::FirstSlot { scale: 1.0 },
        pair_f: PairMapF::scalar(2, 0.0, 1.0),
        t: FiniteSetValuedMap::Affine(t_map),
        rho: 0.5,
        constants: Constants { tau: Some(1.0), alpha: Some(1.0), beta: Some(0.0), ..Constants::default() },
        ..base
    };
    // The sum inclusion keeps ω = 0; its solution solves (T + N)u = 0.
    let mut sum_named = NamedInstance {
        name: "reduction_sum_inclusion".into(),
        description: "0 in T(u) + N(u) via F(v, w) = w, M = N on the first slot, H = I".into(),
        instance: sum,
        expectations: Vec::new(),
    };
    let solution = sum_inclusion_solution(&sum_named.instance).expect("T + N is invertible");
    sum_named.expectations.push(
        pass(
            Check::Converges { z0: vec![1.0, 1.0], target: solution.into_coords(), tol: 1e-12 },
            0.0,
            Source::Derived,
        )
        .tol(1e-9),
    );

    vec![
        reduction("reduction_two_slot", "H((A,B),(C,D)) = H(A,B): C = D = 0", two_slot, &[0.5, -1.5]),
        reduction("reduction_single_slot", "H reduces to a single operator A: B = C = D = 0, g = 0", single_slot, &[2.0, 1.0]),
        reduction(
            "reduction_scaled_single_operator",
            "omega in F(S(u), T(u)) + lambda N(u) with lambda = 2",
            scaled,
            &[-1.0, 0.25],
        ),
        sum_named,
    ]
}

/// Solves `T_L u + t_0 + N u = 0` directly.
fn sum_inclusion_solution(inst: &InclusionInstance) -> Option<Vector> {
    let t = match &inst.t {
        FiniteSetValuedMap::Affine(a) => a,
        _ => return None,
    };
    let n = inst.f.as_affine()?;
    let k = t.matrix() + n.matrix();
    let rhs = nalgebra::DVector::from_column_slice((-(t.offset())).coords());
    let x = k.lu().solve(&rhs)?;
    Vector::new(x.iter().copied().collect()).ok()
}

/// Every built-in instance with its default parameters.
pub fn all() -> Vec<NamedInstance> {
    let mut out = vec![example_3_2(), example_3_3(8, 3).expect("valid index"), example_4_7()];
    out.extend(reduction_constructors());
    out
}

/// Looks up a built-in instance by name.
pub fn by_name(name: &str) -> Result<NamedInstance> {
    all()
        .into_iter()
        .find(|n| n.name == name)
        .ok_or_else(|| Error::UnknownInstance(format!("{name} (known: {})", names().join(", "))))
}

pub fn names() -> Vec<String> {
    all().into_iter().map(|n| n.name).collect()
}

fn map_of(inst: &InclusionInstance, name: MapName) -> &SingleValuedMap {
    match name {
        MapName::A => &inst.a,
        MapName::B => &inst.b,
        MapName::C => &inst.c,
        MapName::D => &inst.d,
        MapName::F => &inst.f,
        MapName::G => &inst.g,
    }
}

fn certificate_outcome(cert: Certificate) -> (Verdict, Option<f64>, serde_json::Value) {
    let value = serde_json::to_value(&cert).unwrap_or(serde_json::Value::Null);
    (cert.verdict, Some(cert.constant), value)
}

fn run_check(inst: &InclusionInstance, check: &Check, plan: &SamplePlan) -> Result<(Verdict, Option<f64>, serde_json::Value)> {
    use Check::*;
    Ok(match check {
        StronglyMixedCocoercive { mu, gamma } => certificate_outcome(certify_mixed_cocoercive_with(inst, (*mu, *gamma), (1.0, 1.0), plan)?.0),
        RelaxedMixedCocoercive { mu, gamma } => certificate_outcome(certify_mixed_cocoercive_with(inst, (1.0, 1.0), (*mu, *gamma), plan)?.1),
        MixedLipschitz { tau } => certificate_outcome(certify_mixed_lipschitz(inst, *tau, plan)?),
        StrongSlot { alpha } => certificate_outcome(certify_m_slot(inst, MSlot::F, *alpha, plan)?),
        RelaxedSlot { beta } => certificate_outcome(certify_m_slot(inst, MSlot::G, *beta, plan)?),
        Expansive { map, claimed } => certificate_outcome(certify_expansive(map_of(inst, *map), *claimed, plan)?),
        Lipschitz { map, claimed } => certificate_outcome(certify_lipschitz(map_of(inst, *map), *claimed, plan)?),
        FStrong { arg, form, claimed } => certificate_outcome(certify_f_strong_accretive(inst, *arg, *form, *claimed, plan)?),
        FLipschitz { arg, claimed } => certificate_outcome(certify_f_lipschitz(inst, *arg, *claimed, plan)?),
        DLipschitz { map, claimed } => {
            let m = if *map == SetMapName::S { &inst.s } else { &inst.t };
            certificate_outcome(certify_d_lipschitz(m, inst.dim(), *claimed, plan)?)
        }
        Surjective { rho_grid } => certificate_outcome(certify_surjectivity(inst, rho_grid, plan)?),
        GeneralizedMixedAccretive { rho_grid } => {
            let rep = certify_generalized_mixed_accretive(inst, rho_grid, plan)?;
            (rep.verdict, None, serde_json::to_value(&rep).unwrap_or(serde_json::Value::Null))
        }
        Condition { rho } => {
            let rep = check_condition_vi(inst, *rho)?;
            let verdict = if rep.verdict == ConditionVerdict::Satisfied { Verdict::Pass } else { Verdict::Fail };
            (verdict, rep.theta, serde_json::to_value(&rep).unwrap_or(serde_json::Value::Null))
        }
        Converges { z0, target, tol } => {
            let cfg = SolverConfig { z0: Vector::new(z0.clone())?, tol: *tol, ..SolverConfig::for_instance(inst) };
            let target = Vector::new(target.clone())?;
            match solve(inst, &cfg) {
                Ok(trace) => {
                    let dist = trace.last().u.distance(&target)?;
                    let verdict = if trace.summary.converged { Verdict::Pass } else { Verdict::Fail };
                    (verdict, Some(dist), serde_json::to_value(&trace.summary).unwrap_or(serde_json::Value::Null))
                }
                Err(e) => (Verdict::Fail, None, serde_json::Value::String(e.to_string())),
            }
        }
    })
}

/// Runs every expectation of a named instance.
pub fn evaluate_expectations(named: &NamedInstance, plan: &SamplePlan) -> Result<Vec<Outcome>> {
    named
        .expectations
        .iter()
        .map(|e| {
            let (verdict, constant, evidence) = run_check(&named.instance, &e.check, plan)?;
            let verdict_ok = match e.expect {
                Expect::Pass => verdict == Verdict::Pass,
                Expect::Fail => verdict == Verdict::Fail,
                Expect::NotFail => verdict != Verdict::Fail,
            };
            let constant_ok = match (e.constant, constant) {
                (Some(want), Some(got)) => (want - got).abs() <= e.tolerance,
                (Some(_), None) => false,
                (None, _) => true,
            };
            Ok(Outcome { expectation: e.clone(), verdict, constant, met: verdict_ok && constant_ok, evidence })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::inclusion_residual;
    use crate::resolvent::{resolve, ResolventConfig};

    #[test]
    fn every_builtin_expectation_is_met() {
        let plan = SamplePlan::with_seed(11);
        for named in all() {
            named.instance.validate().unwrap();
            for o in evaluate_expectations(&named, &plan).unwrap() {
                assert!(o.met, "{}: {:?} got {:?} / {:?}", named.name, o.expectation, o.verdict, o.constant);
            }
        }
    }

    #[test]
    fn example_3_3_fails_only_surjectivity_checks() {
        let named = example_3_3(8, 3).unwrap();
        let outcomes = evaluate_expectations(&named, &SamplePlan::default()).unwrap();
        for o in outcomes {
            let surj = matches!(o.expectation.check, Check::Surjective { .. } | Check::GeneralizedMixedAccretive { .. });
            assert_eq!(o.verdict == Verdict::Fail, surj, "{:?}", o.expectation.check);
        }
    }

    #[test]
    fn example_3_3_constant_image() {
        let inst = example_3_3(8, 3).unwrap().instance;
        for x in SamplePlan::with_seed(5).points(8, 50) {
            let img = inst.forward(&x, 1.0).unwrap().remove(0);
            assert!((img.norm() - 2.0).abs() < 1e-12);
            assert!((img[2] - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn example_3_3_index_range() {
        assert!(matches!(example_3_3(8, 0), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(example_3_3(8, 9), Err(Error::IndexOutOfRange { index: 9, dim: 8 })));
        assert!(example_3_3(3, 3).is_ok());
    }

    #[test]
    fn example_4_7_r_from_constants() {
        let c = example_4_7().instance.constants;
        assert!((c.r(2.0).unwrap() - (10.0 * 0.01 - 5.0 * 0.04 + 3.0)).abs() < 1e-12);
    }

    #[test]
    fn scaled_single_operator_absorbs_lambda_into_rho() {
        let named = reduction_constructors().into_iter().find(|n| n.name == "reduction_scaled_single_operator").unwrap();
        let inst = named.instance;
        let lambda = 2.0;
        let mut unit = inst.clone();
        unit.m = SetValuedMapM::FirstSlot { scale: 1.0 };
        let rho = 0.5;
        for x in SamplePlan::with_seed(9).points(2, 20) {
            let z = inst.forward(&x, rho).unwrap().remove(0);
            let z_unit = unit.forward(&x, rho * lambda).unwrap().remove(0);
            assert!(z.distance(&z_unit).unwrap() < 1e-12);
            let back = resolve(&unit, &ResolventConfig::new(rho * lambda), &z).unwrap();
            assert!(back.distance(&x).unwrap() < 1e-10);
        }
    }

    #[test]
    fn sum_inclusion_residual_matches_direct_check() {
        let named = reduction_constructors().into_iter().find(|n| n.name == "reduction_sum_inclusion").unwrap();
        let inst = named.instance;
        for u in SamplePlan::with_seed(2).points(2, 20) {
            let tu = inst.t.eval(&u).unwrap().remove(0);
            let nu = inst.f.eval(&u).unwrap();
            let direct = (&tu + &nu).norm();
            let r = inclusion_residual(&inst, &u, &u, &tu).unwrap();
            assert!((r.value - direct).abs() < 1e-12);
            assert!(!r.flagged);
        }
    }

    #[test]
    fn reductions_satisfy_residual_at_constructed_solution() {
        for named in reduction_constructors() {
            let Check::Converges { target, .. } = &named.expectations[0].check else { panic!() };
            let u = Vector::new(target.clone()).unwrap();
            let v = crate::solver::nadler_select(&u, &named.instance.s.eval(&u).unwrap()).unwrap();
            let w = crate::solver::nadler_select(&u, &named.instance.t.eval(&u).unwrap()).unwrap();
            assert!(inclusion_residual(&named.instance, &u, &v, &w).unwrap().value < 1e-12, "{}", named.name);
        }
    }

    #[test]
    fn lookup_by_name() {
        assert_eq!(by_name("example_4_7").unwrap().name, "example_4_7");
        assert!(matches!(by_name("nope"), Err(Error::UnknownInstance(_))));
    }
}
