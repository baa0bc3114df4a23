//! Deterministic sample plans for sampled certification and audits.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::space::Vector;

/// One sample: a pair of points plus an auxiliary point used for frozen
/// arguments (the `u` in `H((Ax,u),(Cx,u))`, the `w` in `M(f(x), w)`).
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub x: Vector,
    pub y: Vector,
    pub aux: Vector,
}

/// Seeded pseudo-random pairs plus a fixed lattice (axis points, ±unit
/// vectors and scaled sums).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplePlan {
    pub seed: u64,
    /// Total number of samples, lattice included.
    pub pairs: usize,
    /// Random coordinates are drawn from `[-scale, scale]`.
    pub scale: f64,
}

impl Default for SamplePlan {
    fn default() -> Self {
        Self {
            seed: 0,
            pairs: 512,
            scale: 10.0,
        }
    }
}

impl SamplePlan {
    pub fn with_seed(seed: u64) -> Self {
        Self { seed, ..Self::default() }
    }

    pub fn empty() -> Self {
        Self { pairs: 0, ..Self::default() }
    }

    pub fn is_empty(&self) -> bool {
        self.pairs == 0
    }

    pub fn lattice(&self, dim: usize) -> Vec<Sample> {
        let zero = Vector::zeros(dim);
        let ones = Vector::from_raw(vec![1.0; dim]);
        let mut out = Vec::new();
        for i in 0..dim {
            let e = Vector::basis(dim, i);
            out.push(Sample { x: e.clone(), y: zero.clone(), aux: zero.clone() });
            out.push(Sample { x: -&e, y: e.clone(), aux: ones.clone() });
            out.push(Sample { x: e.scale(self.scale), y: e.scale(-0.5), aux: e.clone() });
            if i + 1 < dim {
                let next = Vector::basis(dim, i + 1);
                out.push(Sample { x: &e + &next, y: zero.clone(), aux: ones.clone() });
                out.push(Sample { x: &e - &next, y: next.scale(2.0), aux: e.scale(-1.0) });
            }
        }
        out.push(Sample { x: ones.clone(), y: zero.clone(), aux: zero.clone() });
        out.push(Sample { x: ones.scale(3.0), y: ones.scale(-2.0), aux: ones.clone() });
        out
    }

    pub fn samples(&self, dim: usize) -> Vec<Sample> {
        if self.pairs == 0 {
            return Vec::new();
        }
        let mut out = self.lattice(dim);
        out.truncate(self.pairs);
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let s = self.scale;
        let draw = |rng: &mut ChaCha8Rng| Vector::from_raw((0..dim).map(|_| rng.random_range(-s..=s)).collect());
        while out.len() < self.pairs {
            let x = draw(&mut rng);
            let y = draw(&mut rng);
            let aux = draw(&mut rng);
            out.push(Sample { x, y, aux });
        }
        out
    }

    /// Random points only (no lattice), for point-wise sweeps.
    pub fn points(&self, dim: usize, count: usize) -> Vec<Vector> {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed ^ 0x9e37_79b9_7f4a_7c15);
        let s = self.scale;
        (0..count)
            .map(|_| Vector::from_raw((0..dim).map(|_| rng.random_range(-s..=s)).collect()))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plan_is_deterministic_and_sized() {
        let p = SamplePlan::with_seed(42);
        let a = p.samples(3);
        let b = p.samples(3);
        assert_eq!(a.len(), 512);
        assert_eq!(a, b);
        assert_ne!(a, SamplePlan::with_seed(43).samples(3));
    }

    #[test]
    fn lattice_leads() {
        let p = SamplePlan::default();
        let s = p.samples(2);
        assert_eq!(s[0].x, Vector::basis(2, 0));
        assert!(s.iter().all(|s| s.x.is_finite() && s.y.dim() == 2));
    }

    #[test]
    fn empty_plan_has_no_samples() {
        assert!(SamplePlan::empty().samples(4).is_empty());
    }
}
