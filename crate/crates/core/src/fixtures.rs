//! The two worked block matrices and a small instance on which the
//! generalized Schur complement depends on the chosen {1}-inverse.

use crate::block::BlockMatrix;
use crate::matrix::Matrix;
use crate::scalar::{ratio, Rational, Scalar};

/// 3x3 matrix split after row 2 and column 2. `R(B) ⊆ R(A)` and
/// `R(Cᵀ) ⊆ R(Aᵀ)` hold, but `D = 0` so `R(C) ⊄ R(D)`, and the pseudo PPT
/// and its complement are not Moore-Penrose inverses of each other.
pub fn example1<T: Scalar>() -> BlockMatrix<T> {
    let m = Matrix::from_i64(&[&[1, -1, 1], &[2, -2, 2], &[-1, 1, 0]]);
    BlockMatrix::new(m, 2, 2).expect("valid split")
}

/// 4x4 matrix split at (2, 2) satisfying the four A-side inclusions.
pub fn example2<T: Scalar>() -> BlockMatrix<T> {
    let m = Matrix::from_i64(&[
        &[1, -1, 1, -2],
        &[2, -2, 2, -4],
        &[1, -1, 1, 1],
        &[-1, 1, 0, 0],
    ]);
    BlockMatrix::new(m, 2, 2).expect("valid split")
}

/// `A = [[1, 0], [0, 0]]`, `B = [0; 1]`, `C = [1, 0]`, `D = [0]`:
/// `R(B) ⊄ R(A)`, so `D - C X B = -X[0][1]` varies with the {1}-inverse `X`.
pub fn carlson_violator<T: Scalar>() -> BlockMatrix<T> {
    let m = Matrix::from_i64(&[&[1, 0, 0], &[0, 0, 1], &[1, 0, 0]]);
    BlockMatrix::new(m, 2, 2).expect("valid split")
}

/// `H = pppt(M, A)` of [`example1`].
pub fn example1_h() -> Matrix<Rational> {
    Matrix::from_i64(&[&[1, 2, -5], &[-1, -2, 5], &[-2, -4, 10]]).scale(&ratio(1, 10))
}

/// `J = cpppt(M, D)` of [`example1`].
pub fn example1_j() -> Matrix<Rational> {
    Matrix::from_i64(&[&[1, -1, 0], &[2, -2, 0], &[0, 0, 0]])
}

/// Moore-Penrose inverse of `H` for [`example1`]; differs from `J`.
/// `H` has rank one, so `pinv(H) = Hᵀ / ‖H‖²_F`.
pub fn example1_h_pinv() -> Matrix<Rational> {
    Matrix::from_i64(&[&[1, -1, -2], &[2, -2, -4], &[-5, 5, 10]]).scale(&ratio(1, 18))
}

/// Moore-Penrose inverse of [`example2`].
pub fn example2_pinv() -> Matrix<Rational> {
    let z = || Rational::from_i64(0);
    Matrix::from_rows(vec![
        vec![z(), z(), z(), ratio(-1, 2)],
        vec![z(), z(), z(), ratio(1, 2)],
        vec![ratio(1, 15), ratio(2, 15), ratio(2, 3), Rational::from_i64(1)],
        vec![ratio(-1, 15), ratio(-2, 15), ratio(1, 3), z()],
    ])
    .expect("4x4 literal")
}
