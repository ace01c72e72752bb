//! Small dense-matrix helpers shared by every module.
//!
//! Matrices here are at most a few dozen rows, so everything is a plain
//! heap-allocated `DMatrix`.

use alloc::vec::Vec;

use nalgebra::DMatrix;
use num_complex::Complex;
#[allow(unused_imports)] // shadowed by inherent methods whenever std is linked
use num_traits::Float;

use crate::error::{CrownError, Result};

pub type C64 = Complex<f64>;
pub type CMat = DMatrix<C64>;
pub type RMat = DMatrix<f64>;

pub const I: C64 = C64 { re: 0.0, im: 1.0 };

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn real_part(m: &CMat) -> RMat {
    m.map(|z| z.re)
}

pub fn imag_part(m: &CMat) -> RMat {
    m.map(|z| z.im)
}

pub fn fro(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub fn fro_real(m: &RMat) -> f64 {
    m.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Relative Frobenius residual ‖a − b‖ / max(‖b‖, 1).
pub fn rel_residual(a: &CMat, b: &CMat) -> f64 {
    fro(&(a - b)) / fro(b).max(1.0)
}

pub fn trace(m: &CMat) -> C64 {
    (0..m.nrows()).map(|i| m[(i, i)]).sum()
}

pub fn inverse(m: &CMat) -> Result<CMat> {
    let scale = fro(m).max(f64::MIN_POSITIVE);
    let lu = m.clone().lu();
    // reject numerically singular input before trusting the inverse
    let det = lu.determinant();
    let n = m.nrows() as i32;
    if det.norm() <= 1e-13 * scale.powi(n) {
        return Err(CrownError::SingularInput);
    }
    lu.try_inverse().ok_or(CrownError::SingularInput)
}

pub fn inverse_real(m: &RMat) -> Result<RMat> {
    inverse(&to_complex(m)).map(|c| real_part(&c))
}

/// exp(S) for real symmetric S.
pub fn sym_exp(s: &RMat) -> RMat {
    let sym = (s + s.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let d = RMat::from_diagonal(&eig.eigenvalues.map(|l| l.exp()));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// exp(T) for real skew-symmetric T, via the Hermitian matrix iT.
pub fn skew_exp(t: &RMat) -> RMat {
    let skew = (t - t.transpose()) * 0.5;
    let herm = to_complex(&skew) * I;
    let eig = herm.symmetric_eigen();
    // T = -i·U diag(λ) U*  ⇒  exp(T) = U diag(e^{-iλ}) U*
    let d = CMat::from_diagonal(&eig.eigenvalues.map(|l| C64::new(0.0, -l).exp()));
    let u = &eig.eigenvectors;
    real_part(&(u * d * u.adjoint()))
}

/// Unpivoted LDLᵀ of a complex symmetric matrix: `m = l · diag(pivots) · lᵀ`
/// with `l` unit lower-triangular. `pivots[j] = Δ_{j+1}/Δ_j` (leading minors).
#[derive(Debug, Clone)]
pub struct Ldl {
    pub l: CMat,
    pub pivots: Vec<C64>,
}

/// Fails with `PivotBreakdown` when a pivot drops below `floor · ‖m‖_F`.
pub fn ldl_symmetric(m: &CMat, floor: f64) -> Result<Ldl> {
    let n = m.nrows();
    let scale = fro(m);
    let mut l = CMat::identity(n, n);
    let mut d: Vec<C64> = Vec::with_capacity(n);
    for j in 0..n {
        let mut dj = m[(j, j)];
        for k in 0..j {
            dj -= l[(j, k)] * l[(j, k)] * d[k];
        }
        if !(dj.norm() >= floor * scale) {
            return Err(CrownError::PivotBreakdown {
                index: j + 1,
                magnitude: dj.norm(),
            });
        }
        d.push(dj);
        for i in (j + 1)..n {
            let mut v = m[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)] * d[k];
            }
            l[(i, j)] = v / dj;
        }
    }
    Ok(Ldl { l, pivots: d })
}

/// Solves `lower · x = rhs` for lower-triangular `lower`.
pub fn solve_lower(lower: &CMat, rhs: &CMat) -> Result<CMat> {
    lower
        .solve_lower_triangular(rhs)
        .ok_or(CrownError::SingularInput)
}

/// Symmetric residual ‖m − mᵀ‖ / max(‖m‖, 1).
pub fn symmetry_residual(m: &CMat) -> f64 {
    fro(&(m - m.transpose())) / fro(m).max(1.0)
}

/// Argument of a complex number in (−π, π].
pub fn arg(z: C64) -> f64 {
    z.im.atan2(z.re)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn skew_exp_is_rotation() {
        let theta = 0.7;
        let t = RMat::from_row_slice(2, 2, &[0.0, -theta, theta, 0.0]);
        let r = skew_exp(&t);
        assert!((r[(0, 0)] - theta.cos()).abs() < 1e-14);
        assert!((r[(1, 0)] - theta.sin()).abs() < 1e-14);
    }

    #[test]
    fn sym_exp_of_diagonal() {
        let s = RMat::from_diagonal(&nalgebra::DVector::from_vec(alloc::vec![0.5, -0.5]));
        let e = sym_exp(&s);
        assert!((e[(0, 0)] - 0.5f64.exp()).abs() < 1e-14);
        assert!(e[(0, 1)].abs() < 1e-15);
    }

    #[test]
    fn ldl_reproduces_minor_ratios() {
        let m = CMat::from_row_slice(2, 2, &[I, C64::new(0.5, 0.0), C64::new(0.5, 0.0), I]);
        let f = ldl_symmetric(&m, 1e-13).unwrap();
        assert!((f.pivots[0] - I).norm() < 1e-15);
        assert!((f.pivots[1] - C64::new(0.0, 1.25)).norm() < 1e-15);
        let d = CMat::from_diagonal(&nalgebra::DVector::from_vec(f.pivots.clone()));
        assert!(fro(&(&f.l * d * f.l.transpose() - &m)) < 1e-15);
    }

    #[test]
    fn ldl_reports_breakdown() {
        let m = CMat::from_row_slice(
            2,
            2,
            &[
                C64::new(0.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(1.0, 0.0),
                C64::new(0.0, 0.0),
            ],
        );
        assert!(matches!(
            ldl_symmetric(&m, 1e-13),
            Err(CrownError::PivotBreakdown { index: 1, .. })
        ));
    }

    #[test]
    fn singular_inverse_rejected() {
        let m = CMat::from_element(2, 2, C64::new(1.0, 0.0));
        assert_eq!(inverse(&m), Err(CrownError::SingularInput));
    }
}
