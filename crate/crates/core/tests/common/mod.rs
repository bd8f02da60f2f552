//! Test-only oracles, written independently of the library algorithms:
//! Greville's column recursion for the pseudoinverse and Gauss-Jordan
//! elimination for the ordinary inverse. Both run in exact arithmetic on
//! plain nested vectors.

#![allow(dead_code)]

use blockpinv_core::{Matrix, Rational, Scalar};
use num_traits::{One, Zero};

pub type Dense = Vec<Vec<Rational>>;

pub fn dense<T: Scalar>(m: &Matrix<T>) -> Vec<Vec<T>> {
    m.to_rows()
}

pub fn from_dense<T: Scalar>(d: &[Vec<T>]) -> Matrix<T> {
    Matrix::from_rows(d.to_vec()).expect("rectangular")
}

fn mul(a: &Dense, b: &Dense) -> Dense {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| (0..inner).fold(Rational::zero(), |acc, k| acc + &row[k] * &b[k][j]))
                .collect()
        })
        .collect()
}

fn transpose(a: &Dense, rows: usize, cols: usize) -> Dense {
    (0..cols).map(|j| (0..rows).map(|i| a[i][j].clone()).collect()).collect()
}

/// Moore-Penrose inverse by Greville's recursion: the pseudoinverse of
/// `[A_k a]` from that of `A_k`, one column at a time.
pub fn greville(m: &Matrix<Rational>) -> Matrix<Rational> {
    let (rows, cols) = m.shape();
    let a = dense(m);
    let col = |j: usize| -> Dense { (0..rows).map(|i| vec![a[i][j].clone()]).collect() };
    let dot = |u: &Dense, v: &Dense| u.iter().zip(v).fold(Rational::zero(), |acc, (x, y)| acc + &x[0] * &y[0]);

    // first column
    let a1 = col(0);
    let n1 = dot(&a1, &a1);
    let mut pinv: Dense = vec![if n1.is_zero() {
        vec![Rational::zero(); rows]
    } else {
        a1.iter().map(|x| &x[0] / &n1).collect()
    }];
    let mut ak: Dense = a1;
    for k in 1..cols {
        let ak_col = col(k);
        let d = mul(&pinv, &ak_col); // k x 1
        let ad = mul(&ak, &d); // rows x 1
        let c: Dense = ak_col.iter().zip(&ad).map(|(x, y)| vec![&x[0] - &y[0]]).collect();
        let cc = dot(&c, &c);
        let b: Vec<Rational> = if !cc.is_zero() {
            c.iter().map(|x| &x[0] / &cc).collect()
        } else {
            let dd = d.iter().fold(Rational::zero(), |acc, x| acc + &x[0] * &x[0]);
            let scale = Rational::one() + dd;
            let row = mul(&transpose(&d, k, 1), &pinv); // 1 x rows
            row[0].iter().map(|x| x / &scale).collect()
        };
        let bd: Dense = d.iter().map(|di| b.iter().map(|bj| &di[0] * bj).collect()).collect();
        let mut next: Dense = pinv.iter().zip(&bd).map(|(p, q)| p.iter().zip(q).map(|(x, y)| x - y).collect()).collect();
        next.push(b);
        pinv = next;
        for (row, x) in ak.iter_mut().zip(&ak_col) {
            row.push(x[0].clone());
        }
    }
    from_dense(&pinv)
}

/// Inverse by Gauss-Jordan elimination; `None` when singular.
pub fn gauss_jordan_inverse(m: &Matrix<Rational>) -> Option<Matrix<Rational>> {
    let (n, cols) = m.shape();
    assert_eq!(n, cols, "square input");
    let mut aug: Dense = dense(m)
        .into_iter()
        .enumerate()
        .map(|(i, mut row)| {
            row.extend((0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let pivot = (c..n).find(|&r| !aug[r][c].is_zero())?;
        aug.swap(c, pivot);
        let p = aug[c][c].clone();
        for x in aug[c].iter_mut() {
            *x = &*x / &p;
        }
        for r in 0..n {
            if r != c && !aug[r][c].is_zero() {
                let f = aug[r][c].clone();
                let pivot_row = aug[c].clone();
                for (x, y) in aug[r].iter_mut().zip(&pivot_row) {
                    *x = &*x - &f * y;
                }
            }
        }
    }
    Some(from_dense(&aug.into_iter().map(|row| row[n..].to_vec()).collect::<Vec<_>>()))
}

/// `max |x - y| / (1 + max |y|)`.
pub fn rel_max(x: &Matrix<f64>, y: &Matrix<f64>) -> f64 {
    assert_eq!(x.shape(), y.shape());
    (x - y).max_abs() / (1.0 + y.max_abs())
}

/// Relative Frobenius distance `|x - y| / (1 + |y|)`.
pub fn rel_frob(x: &Matrix<f64>, y: &Matrix<f64>) -> f64 {
    x.distance(y) / (1.0 + y.frobenius_norm())
}

pub fn ints(rows: &[&[i64]]) -> Matrix<Rational> {
    Matrix::from_i64(rows)
}
