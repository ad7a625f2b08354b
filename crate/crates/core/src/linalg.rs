//! Thin wrappers around dense complex linear algebra: least squares with a
//! singular-value cutoff, numerical rank with a gap check, and condition
//! estimates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;

/// Minimum-norm least-squares solution of `a x = b` via SVD with relative
/// cutoff `rcond` on the singular values.
pub fn lstsq(a: &CMat, b: &CVec, rcond: f64) -> CVec {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0_f64, f64::max);
    let eps = if smax > 0.0 { rcond * smax } else { f64::MIN_POSITIVE };
    svd.solve(b, eps).expect("svd solve")
}

/// Singular values in descending order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    let svd = a.clone().svd(false, false);
    let mut sv: Vec<f64> = svd.singular_values.iter().cloned().collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap());
    sv
}

/// Numerical rank: number of singular values above `rel_tol · σ_max`.
pub fn rank(a: &CMat, rel_tol: f64) -> usize {
    let sv = singular_values(a);
    let smax = sv.first().cloned().unwrap_or(0.0);
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_tol * smax).count()
}

/// Rank with a spectral-gap guard: the singular values bracketing the
/// threshold must differ by at least `gap` (a ratio), otherwise the rank
/// decision is declared indeterminate.
pub fn rank_with_gap(a: &CMat, rel_tol: f64, gap: f64) -> Result<usize> {
    let sv = singular_values(a);
    let smax = sv.first().cloned().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    let thresh = rel_tol * smax;
    let r = sv.iter().filter(|&&s| s > thresh).count();
    if r > 0 && r < sv.len() {
        let above = sv[r - 1];
        let below = sv[r].max(f64::MIN_POSITIVE);
        if above / below < gap {
            return Err(Error::RankIndeterminate);
        }
    }
    Ok(r)
}

/// Ratio of extreme singular values; `f64::INFINITY` if singular.
pub fn cond(a: &CMat) -> f64 {
    let sv = singular_values(a);
    match (sv.first(), sv.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// LU solve for square systems. `None` when the matrix is singular.
pub fn solve_square(a: &CMat, b: &CVec) -> Option<CVec> {
    a.clone().lu().solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lstsq_recovers_exact_solution() {
        let a = CMat::from_row_slice(
            3,
            2,
            &[c(1.0, 0.0), c(0.0, 1.0), c(2.0, 0.0), c(1.0, -1.0), c(0.0, 0.0), c(3.0, 0.0)],
        );
        let x = CVec::from_vec(vec![c(1.0, 2.0), c(-0.5, 0.25)]);
        let b = &a * &x;
        let got = lstsq(&a, &b, 1e-12);
        assert!((got - x).norm() < 1e-10);
    }

    #[test]
    fn rank_detects_deficiency() {
        let a = CMat::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)],
        );
        assert_eq!(rank(&a, 1e-10), 1);
    }

    #[test]
    fn gap_guard_fires_on_smooth_spectrum() {
        // Values straddle the threshold with only a ~2x gap between them.
        let mut a = CMat::zeros(3, 3);
        a[(0, 0)] = c(1.0, 0.0);
        a[(1, 1)] = c(1.5e-8, 0.0);
        a[(2, 2)] = c(0.7e-8, 0.0);
        assert!(matches!(rank_with_gap(&a, 1e-8, 10.0), Err(Error::RankIndeterminate)));
        // A clean spectrum passes.
        a[(1, 1)] = c(0.5, 0.0);
        a[(2, 2)] = c(1e-12, 0.0);
        assert_eq!(rank_with_gap(&a, 1e-8, 10.0).unwrap(), 2);
    }
}
