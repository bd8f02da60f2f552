//! Moore-Penrose inverse, rank, Penrose certificates and {1}-inverses.

use faer::Mat;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};
use crate::tolerance::Tolerances;

/// Moore-Penrose inverse with default tolerances.
pub fn pinv<T: Scalar>(m: &Matrix<T>) -> Matrix<T> {
    T::pinv(m, &Tolerances::default())
}

pub fn pinv_with<T: Scalar>(m: &Matrix<T>, tol: &Tolerances) -> Matrix<T> {
    T::pinv(m, tol)
}

pub fn rank<T: Scalar>(m: &Matrix<T>) -> usize {
    T::rank(m, &Tolerances::default())
}

pub fn rank_with<T: Scalar>(m: &Matrix<T>, tol: &Tolerances) -> usize {
    T::rank(m, tol)
}

fn to_faer(m: &Matrix<f64>) -> Mat<f64> {
    Mat::from_fn(m.rows(), m.cols(), |i, j| *m.get(i, j))
}

/// Singular values in decreasing order.
pub fn singular_values(m: &Matrix<f64>) -> Vec<f64> {
    let mut s = to_faer(m)
        .singular_values()
        .expect("SVD of a finite matrix converges");
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub(crate) fn svd_rank(m: &Matrix<f64>, tol: &Tolerances) -> usize {
    let s = singular_values(m);
    let sigma_max = s.first().copied().unwrap_or(0.0);
    if sigma_max == 0.0 {
        return 0;
    }
    let cut = tol.rank_cutoff(m.rows(), m.cols(), sigma_max);
    s.iter().filter(|&&v| v > cut).count()
}

pub(crate) fn svd_pinv(m: &Matrix<f64>, tol: &Tolerances) -> Matrix<f64> {
    let svd = to_faer(m).thin_svd().expect("SVD of a finite matrix converges");
    let (u, v) = (svd.U(), svd.V());
    let sigma = svd.S().column_vector();
    let sigma_max = sigma.iter().copied().fold(0.0, f64::max);
    let mut out = Matrix::zeros(m.cols(), m.rows());
    if sigma_max == 0.0 {
        return out;
    }
    let cut = tol.rank_cutoff(m.rows(), m.cols(), sigma_max);
    // M^+ = V diag(1/s) U^T over the retained singular triplets
    for (k, &s) in sigma.iter().enumerate() {
        if s <= cut {
            continue;
        }
        for i in 0..m.cols() {
            let vik = v[(i, k)] / s;
            if vik == 0.0 {
                continue;
            }
            for j in 0..m.rows() {
                let cur = *out.get(i, j);
                out.set(i, j, cur + vik * u[(j, k)]);
            }
        }
    }
    out
}

/// Full-rank factorization `M = P Q` of a nonzero matrix: `P` holds the
/// pivot columns of `M` and `Q` the nonzero rows of its reduced row echelon
/// form. Returns `None` for the zero matrix.
pub fn full_rank_factorization(m: &Matrix<Rational>) -> Option<(Matrix<Rational>, Matrix<Rational>)> {
    let (reduced, pivots) = m.rref();
    let r = pivots.len();
    if r == 0 {
        return None;
    }
    let p = Matrix::from_fn(m.rows(), r, |i, k| m.get(i, pivots[k]).clone());
    let q = reduced.submatrix(0, 0, r, m.cols());
    Some((p, q))
}

/// `M^+ = Q^T (Q Q^T)^{-1} (P^T P)^{-1} P^T`, exact.
pub(crate) fn full_rank_pinv(m: &Matrix<Rational>) -> Matrix<Rational> {
    let Some((p, q)) = full_rank_factorization(m) else {
        return Matrix::zeros(m.cols(), m.rows());
    };
    let q_t = q.transpose();
    let p_t = p.transpose();
    let qqt_inv = (&q * &q_t)
        .inverse()
        .expect("Q has full row rank");
    let ptp_inv = (&p_t * &p)
        .inverse()
        .expect("P has full column rank");
    &(&(&q_t * &qqt_inv) * &ptp_inv) * &p_t
}

/// Frobenius residuals of the four Penrose equations for a candidate `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PinvCertificate {
    /// `|M - M X M|`
    pub r1: f64,
    /// `|X - X M X|`
    pub r2: f64,
    /// `|M X - (M X)^T|`
    pub r3: f64,
    /// `|X M - (X M)^T|`
    pub r4: f64,
    /// Bound each residual is compared against; zero for exact backends.
    pub bound: f64,
}

impl PinvCertificate {
    pub fn max_residual(&self) -> f64 {
        self.r1.max(self.r2).max(self.r3).max(self.r4)
    }

    pub fn holds(&self) -> bool {
        self.max_residual() <= self.bound
    }
}

pub fn certificate<T: Scalar>(m: &Matrix<T>, x: &Matrix<T>, tol: &Tolerances) -> Result<PinvCertificate> {
    if x.shape() != (m.cols(), m.rows()) {
        return Err(Error::ShapeMismatch {
            op: "penrose certificate",
            left: m.shape(),
            right: x.shape(),
        });
    }
    let mx = m * x;
    let xm = x * m;
    let r1 = (m - &(&mx * m)).frobenius_norm();
    let r2 = (x - &(&xm * x)).frobenius_norm();
    let r3 = (&mx - &mx.transpose()).frobenius_norm();
    let r4 = (&xm - &xm.transpose()).frobenius_norm();
    let bound = if T::EXACT {
        0.0
    } else {
        tol.cert_bound(m.frobenius_norm(), x.frobenius_norm())
    };
    Ok(PinvCertificate { r1, r2, r3, r4, bound })
}

/// `X = M^+ + W - M^+ M W M M^+`, a {1}-inverse of `M` for every `W` of the
/// shape of `M^T`.
pub fn one_inverse_sample<T: Scalar>(m: &Matrix<T>, w: &Matrix<T>, tol: &Tolerances) -> Result<Matrix<T>> {
    if w.shape() != (m.cols(), m.rows()) {
        return Err(Error::ShapeMismatch {
            op: "one_inverse_sample",
            left: m.shape(),
            right: w.shape(),
        });
    }
    let mp = T::pinv(m, tol);
    let correction = &(&(&(&mp * m) * w) * m) * &mp;
    Ok(&(&mp + w) - &correction)
}

/// `M M^+ = M^+ M`, i.e. `R(M) = R(M^T)`.
pub fn is_range_symmetric<T: Scalar>(m: &Matrix<T>, tol: &Tolerances) -> Result<bool> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            op: "is_range_symmetric",
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let mp = T::pinv(m, tol);
    Ok((m * &mp).approx_eq(&(&mp * m), tol.eq))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    fn example1_a<T: Scalar>() -> Matrix<T> {
        Matrix::from_i64(&[&[1, -1], &[2, -2]])
    }

    #[test]
    fn pinv_of_rank_one_block() {
        let expected = Matrix::from_rows(vec![
            vec![ratio(1, 10), ratio(2, 10)],
            vec![ratio(-1, 10), ratio(-2, 10)],
        ])
        .unwrap();
        assert_eq!(pinv(&example1_a::<Rational>()), expected);
        assert!(pinv(&example1_a::<f64>()).approx_eq(&expected.to_f64(), 1e-14));
    }

    #[test]
    fn pinv_of_zero_and_identity() {
        let z = Matrix::<Rational>::zeros(2, 4);
        assert_eq!(pinv(&z), Matrix::zeros(4, 2));
        assert_eq!(pinv(&Matrix::<f64>::zeros(3, 1)), Matrix::zeros(1, 3));
        assert_eq!(pinv(&Matrix::<Rational>::identity(3)), Matrix::identity(3));
        assert!(pinv(&Matrix::<f64>::identity(3)).approx_eq(&Matrix::identity(3), 1e-15));
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&example1_a::<f64>()), 1);
        assert_eq!(rank(&example1_a::<Rational>()), 1);
        assert_eq!(rank(&Matrix::<f64>::identity(4)), 4);
        let m = Matrix::<Rational>::from_i64(&[&[1, -1, 1], &[2, -2, 2], &[-1, 1, 0]]);
        assert_eq!(rank(&m), 2);
        assert_eq!(rank(&m.to_f64()), 2);
        assert_eq!(rank(&Matrix::<f64>::zeros(2, 2)), 0);
    }

    #[test]
    fn rank_tolerance_override() {
        let m = Matrix::new(2, 2, vec![1.0, 0.0, 0.0, 1e-9]).unwrap();
        assert_eq!(rank(&m), 2);
        let loose = Tolerances {
            rank: Some(1e-6),
            ..Tolerances::default()
        };
        assert_eq!(rank_with(&m, &loose), 1);
    }

    #[test]
    fn one_inverse_examples() {
        let tol = Tolerances::default();
        let m = Matrix::<Rational>::from_i64(&[&[1, 0], &[0, 0]]);
        let w = Matrix::from_i64(&[&[0, 1], &[1, 1]]);
        let x = one_inverse_sample(&m, &w, &tol).unwrap();
        assert_eq!(x, Matrix::from_i64(&[&[1, 1], &[1, 1]]));
        assert_eq!(&(&m * &x) * &m, m);

        let zero_w = Matrix::zeros(2, 2);
        assert_eq!(one_inverse_sample(&m, &zero_w, &tol).unwrap(), pinv(&m));

        let n = Matrix::<Rational>::from_i64(&[&[2, 1], &[1, 1]]);
        let x = one_inverse_sample(&n, &w, &tol).unwrap();
        assert_eq!(x, n.inverse().unwrap());

        assert!(one_inverse_sample(&m, &Matrix::zeros(3, 2), &tol).is_err());
    }

    #[test]
    fn range_symmetry() {
        let tol = Tolerances::default();
        let sym = Matrix::<f64>::from_i64(&[&[2, 1], &[1, 0]]);
        assert!(is_range_symmetric(&sym, &tol).unwrap());
        let nil = Matrix::<Rational>::from_i64(&[&[0, 1], &[0, 0]]);
        assert!(!is_range_symmetric(&nil, &tol).unwrap());
        assert!(matches!(
            is_range_symmetric(&Matrix::<f64>::zeros(2, 3), &tol),
            Err(Error::NotSquare { .. })
        ));
    }

    #[test]
    fn range_symmetry_matches_products() {
        // oracle: compare M M^+ and M^+ M directly
        let tol = Tolerances::default();
        let m = Matrix::<Rational>::from_i64(&[&[1, -1, 1], &[2, -2, 2], &[-1, 1, 0]]);
        let mp = pinv(&m);
        let direct = &m * &mp == &mp * &m;
        assert_eq!(is_range_symmetric(&m, &tol).unwrap(), direct);
        assert!(!direct);
    }

    #[test]
    fn certificate_rejects_wrong_shape() {
        let m = Matrix::<f64>::identity(2);
        assert!(certificate(&m, &Matrix::zeros(3, 2), &Tolerances::default()).is_err());
    }
}
