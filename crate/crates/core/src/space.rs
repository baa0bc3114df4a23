//! Finite-dimensional inner-product space primitives.
//!
//! Every space here is ℝⁿ with the Euclidean inner product (truncated ℓ²
//! included), so the generalized duality mapping has the closed form
//! `J_q(x) = ‖x‖^{q-2} x`, which gives `⟨x, J_q x⟩ = ‖x‖^q` and
//! `‖J_q x‖ = ‖x‖^{q-1}` exactly.

use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of ℝⁿ with finite coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Vector {
    coords: Vec<f64>,
}

impl Vector {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyVector);
        }
        if let Some((index, &value)) = coords.iter().enumerate().find(|(_, c)| !c.is_finite()) {
            return Err(Error::NonFinite { index, value });
        }
        Ok(Self { coords })
    }

    /// Builds a vector without the finiteness check. Arithmetic on finite
    /// inputs can still overflow; callers that need the invariant use `new`.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self { coords }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_raw(vec![0.0; dim])
    }

    /// Unit basis vector `e_index` (0-based).
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut coords = vec![0.0; dim];
        coords[index] = 1.0;
        Self::from_raw(coords)
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.coords
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    pub fn scale(&self, t: f64) -> Self {
        Self::from_raw(self.coords.iter().map(|c| t * c).collect())
    }

    pub fn norm(&self) -> f64 {
        norm(self)
    }

    pub(crate) fn check_dim(&self, other: &Vector) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                left: self.dim(),
                right: other.dim(),
            });
        }
        Ok(())
    }

    /// `self + t * other`, dimension-checked.
    pub fn axpy(&self, t: f64, other: &Vector) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_raw(
            self.coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a + t * b)
                .collect(),
        ))
    }

    /// Euclidean distance, dimension-checked.
    pub fn distance(&self, other: &Vector) -> Result<f64> {
        self.check_dim(other)?;
        Ok(self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt())
    }
}

impl TryFrom<Vec<f64>> for Vector {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<Vector> for Vec<f64> {
    fn from(v: Vector) -> Self {
        v.coords
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.coords[i]
    }
}

impl fmt::Display for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

// The operator impls panic on a dimension mismatch, like slice indexing.
// Fallible call sites go through `axpy` / `inner`.
impl Add for &Vector {
    type Output = Vector;

    fn add(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Vector::from_raw(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;

    fn sub(self, rhs: &Vector) -> Vector {
        assert_eq!(self.dim(), rhs.dim(), "vector dimension mismatch");
        Vector::from_raw(self.coords.iter().zip(&rhs.coords).map(|(a, b)| a - b).collect())
    }
}

impl Mul<&Vector> for f64 {
    type Output = Vector;

    fn mul(self, rhs: &Vector) -> Vector {
        rhs.scale(self)
    }
}

impl Neg for &Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

/// Space parameters: dimension, smoothness exponent `q` and the
/// characteristic-inequality constant `c_q`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceConfig {
    pub dim: usize,
    pub q: f64,
    pub c_q: f64,
}

impl SpaceConfig {
    pub fn new(dim: usize, q: f64, c_q: Option<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidParameter {
                name: "dim",
                reason: "must be positive".into(),
            });
        }
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::InvalidExponent(q));
        }
        let c_q = match c_q {
            Some(c) => c,
            None if q == 2.0 => 1.0,
            None => {
                return Err(Error::InvalidParameter {
                    name: "c_q",
                    reason: format!("no default for q = {q}; supply it explicitly"),
                })
            }
        };
        if !(c_q > 0.0) || !c_q.is_finite() {
            return Err(Error::InvalidParameter {
                name: "c_q",
                reason: format!("must be positive, got {c_q}"),
            });
        }
        Ok(Self { dim, q, c_q })
    }

    /// Hilbert space ℝⁿ: q = 2, c_q = 1.
    pub fn hilbert(dim: usize) -> Self {
        Self { dim, q: 2.0, c_q: 1.0 }
    }
}

pub fn inner(x: &Vector, y: &Vector) -> Result<f64> {
    x.check_dim(y)?;
    Ok(x.coords.iter().zip(&y.coords).map(|(a, b)| a * b).sum())
}

pub fn norm(x: &Vector) -> f64 {
    x.coords.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// `J_q(x) = ‖x‖^{q-2} x`, extended by `J_q(0) = 0`.
pub fn duality_map(x: &Vector, q: f64) -> Result<Vector> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::InvalidExponent(q));
    }
    let n = norm(x);
    if n == 0.0 {
        return Ok(Vector::zeros(x.dim()));
    }
    if q == 2.0 {
        return Ok(x.clone());
    }
    Ok(x.scale(n.powf(q - 2.0)))
}

/// Whether `‖x+y‖^q ≤ ‖x‖^q + q⟨y, J_q x⟩ + c_q‖y‖^q` holds, with the
/// usual floating-point slack `1e-9·(1 + |rhs|)`.
pub fn characteristic_inequality_check(x: &Vector, y: &Vector, q: f64, c_q: f64) -> Result<bool> {
    let jx = duality_map(x, q)?;
    let sum = x.axpy(1.0, y)?;
    let lhs = norm(&sum).powf(q);
    let rhs = norm(x).powf(q) + q * inner(y, &jx)? + c_q * norm(y).powf(q);
    Ok(lhs <= rhs + 1e-9 * (1.0 + rhs.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn v(c: &[f64]) -> Vector {
        Vector::new(c.to_vec()).unwrap()
    }

    #[test]
    fn inner_examples() {
        assert_eq!(inner(&v(&[1.0, 2.0]), &v(&[3.0, 4.0])).unwrap(), 11.0);
        assert_eq!(inner(&v(&[0.0, 0.0]), &v(&[5.0, 7.0])).unwrap(), 0.0);
        let e = Vector::basis(6, 0);
        assert_eq!(inner(&e, &e).unwrap(), 1.0);
    }

    #[test]
    fn inner_dimension_mismatch_names_both() {
        let err = inner(&v(&[1.0, 2.0]), &v(&[1.0, 2.0, 3.0])).unwrap_err();
        match err {
            Error::DimensionMismatch { left, right } => assert_eq!((left, right), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn construction_rejects_nan_and_empty() {
        assert!(matches!(Vector::new(vec![1.0, f64::NAN]), Err(Error::NonFinite { index: 1, .. })));
        assert!(matches!(Vector::new(vec![f64::INFINITY]), Err(Error::NonFinite { .. })));
        assert!(matches!(Vector::new(vec![]), Err(Error::EmptyVector)));
    }

    #[test]
    fn duality_map_examples() {
        assert_eq!(duality_map(&v(&[3.0, 4.0]), 2.0).unwrap(), v(&[3.0, 4.0]));
        assert_eq!(duality_map(&v(&[0.0, 0.0]), 3.0).unwrap(), v(&[0.0, 0.0]));
        // ‖x‖ = 5, J_3 x = 5x, ⟨x, J_3 x⟩ = 125.
        let j = duality_map(&v(&[3.0, 4.0]), 3.0).unwrap();
        assert_eq!(j, v(&[15.0, 20.0]));
        assert_eq!(inner(&v(&[3.0, 4.0]), &j).unwrap(), 125.0);
    }

    #[test]
    fn duality_map_rejects_small_exponent() {
        assert!(matches!(duality_map(&v(&[1.0]), 1.0), Err(Error::InvalidExponent(_))));
        assert!(matches!(duality_map(&v(&[1.0]), 0.5), Err(Error::InvalidExponent(_))));
    }

    #[test]
    fn characteristic_inequality_examples() {
        assert!(characteristic_inequality_check(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), 2.0, 1.0).unwrap());
        assert!(characteristic_inequality_check(&v(&[1.0, 2.0]), &v(&[-1.0, -2.0]), 2.0, 1.0).unwrap());
    }

    #[test]
    fn characteristic_inequality_can_fail_for_tiny_constant() {
        // q = 2, c_q = 0.5: ‖x+y‖² = 2 but rhs = 1 + 0 + 0.5.
        assert!(!characteristic_inequality_check(&v(&[1.0, 0.0]), &v(&[0.0, 1.0]), 2.0, 0.5).unwrap());
    }

    #[test]
    fn space_config_defaults() {
        let c = SpaceConfig::new(2, 2.0, None).unwrap();
        assert_eq!(c.c_q, 1.0);
        assert!(SpaceConfig::new(2, 3.0, None).is_err());
        assert!(SpaceConfig::new(2, 1.0, Some(1.0)).is_err());
        assert!(SpaceConfig::new(2, 2.0, Some(0.0)).is_err());
        assert!(SpaceConfig::new(0, 2.0, None).is_err());
    }

    fn vec_strategy(dim: usize) -> impl Strategy<Value = Vector> {
        prop::collection::vec(-100.0f64..100.0, dim).prop_map(|c| Vector::new(c).unwrap())
    }

    proptest! {
        #[test]
        fn inner_is_symmetric(x in vec_strategy(5), y in vec_strategy(5)) {
            prop_assert_eq!(inner(&x, &y).unwrap(), inner(&y, &x).unwrap());
        }

        #[test]
        fn norm_squared_is_self_inner(x in vec_strategy(5)) {
            let n2 = norm(&x).powi(2);
            let ip = inner(&x, &x).unwrap();
            prop_assert!((n2 - ip).abs() <= 1e-12 * ip.max(1e-300));
        }

        #[test]
        fn j2_is_identity(x in vec_strategy(4)) {
            prop_assert_eq!(duality_map(&x, 2.0).unwrap(), x);
        }

        #[test]
        fn duality_map_is_homogeneous(x in vec_strategy(3), t in prop_oneof![-5.0f64..-0.1, 0.1f64..5.0], q in 1.2f64..4.0) {
            let lhs = duality_map(&x.scale(t), q).unwrap();
            let rhs = duality_map(&x, q).unwrap().scale(t * t.abs().powf(q - 2.0));
            let diff = lhs.distance(&rhs).unwrap();
            prop_assert!(diff <= 1e-10 * (1.0 + norm(&rhs)));
        }

        #[test]
        fn characteristic_inequality_holds_in_hilbert_space(x in vec_strategy(5), y in vec_strategy(5)) {
            prop_assert!(characteristic_inequality_check(&x, &y, 2.0, 1.0).unwrap());
        }
    }
}
