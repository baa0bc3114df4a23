//! Dense linear-algebra helpers over `nalgebra` used by exact affine analysis.

use nalgebra::{DMatrix, DVector};

use crate::space::Vector;

pub(crate) fn to_dvector(v: &Vector) -> DVector<f64> {
    DVector::from_column_slice(v.coords())
}

pub(crate) fn from_dvector(v: &DVector<f64>) -> Vector {
    Vector::from_raw(v.iter().copied().collect())
}

pub(crate) fn symmetric_part(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Extreme eigenpair of a symmetric matrix.
pub(crate) struct Eigenpair {
    pub value: f64,
    pub vector: Vector,
}

pub(crate) fn min_eigen(sym: &DMatrix<f64>) -> Eigenpair {
    extreme_eigen(sym, true)
}

fn extreme_eigen(sym: &DMatrix<f64>, smallest: bool) -> Eigenpair {
    let eig = sym.clone().symmetric_eigen();
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        let better = if smallest {
            eig.eigenvalues[i] < eig.eigenvalues[best]
        } else {
            eig.eigenvalues[i] > eig.eigenvalues[best]
        };
        if better {
            best = i;
        }
    }
    let col = eig.eigenvectors.column(best).into_owned();
    Eigenpair {
        value: eig.eigenvalues[best],
        vector: from_dvector(&col),
    }
}

/// Smallest and largest singular values with their right singular vectors.
pub(crate) struct SingularExtremes {
    pub min: f64,
    pub min_vector: Vector,
    pub max: f64,
    pub max_vector: Vector,
}

pub(crate) fn singular_extremes(m: &DMatrix<f64>) -> SingularExtremes {
    let n = m.ncols();
    // Square zero matrices make the SVD degenerate but still well-defined.
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested v_t");
    let (mut imin, mut imax) = (0, 0);
    for i in 1..svd.singular_values.len() {
        if svd.singular_values[i] < svd.singular_values[imin] {
            imin = i;
        }
        if svd.singular_values[i] > svd.singular_values[imax] {
            imax = i;
        }
    }
    let row = |i: usize| Vector::from_raw((0..n).map(|j| v_t[(i, j)]).collect());
    SingularExtremes {
        min: svd.singular_values[imin],
        min_vector: row(imin),
        max: svd.singular_values[imax],
        max_vector: row(imax),
    }
}

pub(crate) fn operator_norm(m: &DMatrix<f64>) -> f64 {
    if m.iter().all(|&x| x == 0.0) {
        return 0.0;
    }
    singular_extremes(m).max
}

/// `σ_max / σ_min`; infinite when `σ_min` is zero.
pub(crate) fn condition_number(m: &DMatrix<f64>) -> f64 {
    let s = singular_extremes(m);
    if s.min == 0.0 {
        f64::INFINITY
    } else {
        s.max / s.min
    }
}

/// Singularity test: condition number above 1e12, or
/// `|det| < 1e-12 · ‖K‖^dim`.
pub(crate) fn is_numerically_singular(m: &DMatrix<f64>) -> bool {
    let norm = operator_norm(m);
    if norm == 0.0 {
        return true;
    }
    let det = m.determinant();
    condition_number(m) > 1e12 || det.abs() < 1e-12 * norm.powi(m.nrows() as i32)
}

pub(crate) fn mat_vec(m: &DMatrix<f64>, x: &Vector) -> Vector {
    let n = m.nrows();
    let mut out = vec![0.0; n];
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, xj) in x.coords().iter().enumerate() {
            acc += m[(i, j)] * xj;
        }
        *o = acc;
    }
    Vector::from_raw(out)
}

/// Positive real `ρ` at which `det(h + ρ m) = 0`. Uses the eigenvalues of
/// `h⁻¹ m` (or `m⁻¹ h`) and returns `None` when both are singular.
pub(crate) fn critical_rhos(h: &DMatrix<f64>, m: &DMatrix<f64>) -> Option<Vec<f64>> {
    const IMAG_TOL: f64 = 1e-10;
    let mut out = Vec::new();
    if let Some(h_inv) = h.clone().try_inverse().filter(|_| !is_numerically_singular(h)) {
        // det(h)·det(I + ρ h⁻¹m) = 0  ⇔  h⁻¹m has eigenvalue −1/ρ.
        for ev in (h_inv * m).complex_eigenvalues().iter() {
            if ev.im.abs() <= IMAG_TOL * (1.0 + ev.re.abs()) && ev.re < 0.0 {
                out.push(-1.0 / ev.re);
            }
        }
    } else {
        let m_inv = m.clone().try_inverse().filter(|_| !is_numerically_singular(m))?;
        // det(m)·det(m⁻¹h + ρI) = 0  ⇔  m⁻¹h has eigenvalue −ρ.
        for ev in (m_inv * h).complex_eigenvalues().iter() {
            if ev.im.abs() <= IMAG_TOL * (1.0 + ev.re.abs()) && ev.re < 0.0 {
                out.push(-ev.re);
            }
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup_by(|a, b| (*a - *b).abs() <= 1e-12 * (1.0 + b.abs()));
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singular_extremes_of_diagonal() {
        let m = DMatrix::from_row_slice(2, 2, &[3.0, 0.0, 0.0, -0.5]);
        let s = singular_extremes(&m);
        assert!((s.max - 3.0).abs() < 1e-14);
        assert!((s.min - 0.5).abs() < 1e-14);
        assert!((condition_number(&m) - 6.0).abs() < 1e-12);
    }

    #[test]
    fn zero_matrix_is_singular() {
        let m = DMatrix::<f64>::zeros(3, 3);
        assert!(is_numerically_singular(&m));
        assert_eq!(operator_norm(&m), 0.0);
    }

    #[test]
    fn critical_rho_of_opposite_identities() {
        let h = -DMatrix::<f64>::identity(3, 3);
        let m = DMatrix::<f64>::identity(3, 3);
        assert_eq!(critical_rhos(&h, &m).unwrap(), vec![1.0]);
    }

    #[test]
    fn rotation_has_no_critical_rho() {
        let h = DMatrix::<f64>::identity(2, 2) * 2.9;
        let m = DMatrix::from_row_slice(2, 2, &[0.25, -7.0 / 12.0, 7.0 / 12.0, 0.25]);
        assert!(critical_rhos(&h, &m).unwrap().is_empty());
    }
}
