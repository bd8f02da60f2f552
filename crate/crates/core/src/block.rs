//! Partitioned matrices, pseudo Schur complements and pseudo principal
//! pivot transforms.
//!
//! A [`BlockMatrix`] splits `M` into
//!
//! ```text
//!     | A  B |      A: m x n   B: m x p
//! M = |      |
//!     | C  D |      C: s x n   D: s x p
//! ```
//!
//! `F = D - C A† B` is the pseudo Schur complement of `A` and
//! `G = A - B D† C` the complementary one of `D`. The pseudo PPT relative
//! to `A` is `H = [[A†, -A† B], [C A†, F]]`, an `(n + s) x (m + p)` matrix
//! split at `(n, m)`; its complement relative to `D` is
//! `J = [[G, B D†], [-D† C, D†]]`, `(m + p) x (n + s)` split at `(m, n)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{vector_residual, vectors_close, Matrix};
use crate::range::{report_from_pivots, Inclusion, InclusionReport, Verdict};
use crate::scalar::Scalar;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, PartialEq)]
pub struct BlockMatrix<T: Scalar> {
    whole: Matrix<T>,
    row_split: usize,
    col_split: usize,
}

/// Owned copies of the four blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocks<T: Scalar> {
    pub a: Matrix<T>,
    pub b: Matrix<T>,
    pub c: Matrix<T>,
    pub d: Matrix<T>,
}

impl<T: Scalar> BlockMatrix<T> {
    pub fn new(whole: Matrix<T>, row_split: usize, col_split: usize) -> Result<Self> {
        let (rows, cols) = whole.shape();
        if row_split == 0 || row_split >= rows || col_split == 0 || col_split >= cols {
            return Err(Error::BadSplit {
                rows,
                cols,
                row_split,
                col_split,
            });
        }
        Ok(Self {
            whole,
            row_split,
            col_split,
        })
    }

    pub fn from_blocks(a: &Matrix<T>, b: &Matrix<T>, c: &Matrix<T>, d: &Matrix<T>) -> Result<Self> {
        let whole = Matrix::from_blocks(a, b, c, d)?;
        Self::new(whole, a.rows(), a.cols())
    }

    pub fn whole(&self) -> &Matrix<T> {
        &self.whole
    }

    pub fn into_whole(self) -> Matrix<T> {
        self.whole
    }

    pub fn row_split(&self) -> usize {
        self.row_split
    }

    pub fn col_split(&self) -> usize {
        self.col_split
    }

    /// `(m, n, s, p)`.
    pub fn dims(&self) -> (usize, usize, usize, usize) {
        let (rows, cols) = self.whole.shape();
        (
            self.row_split,
            self.col_split,
            rows - self.row_split,
            cols - self.col_split,
        )
    }

    pub fn a(&self) -> Matrix<T> {
        let (m, n, _, _) = self.dims();
        self.whole.submatrix(0, 0, m, n)
    }

    pub fn b(&self) -> Matrix<T> {
        let (m, n, _, p) = self.dims();
        self.whole.submatrix(0, n, m, p)
    }

    pub fn c(&self) -> Matrix<T> {
        let (m, n, s, _) = self.dims();
        self.whole.submatrix(m, 0, s, n)
    }

    pub fn d(&self) -> Matrix<T> {
        let (m, n, s, p) = self.dims();
        self.whole.submatrix(m, n, s, p)
    }

    pub fn blocks(&self) -> Blocks<T> {
        Blocks {
            a: self.a(),
            b: self.b(),
            c: self.c(),
            d: self.d(),
        }
    }
}

/// Which diagonal block a transform or complement pivots on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pivot {
    A,
    D,
}

/// Blocks together with `A†`, `D†`, `F` and `G`, computed once.
#[derive(Debug, Clone)]
pub(crate) struct Pivots<T: Scalar> {
    pub blocks: Blocks<T>,
    pub a_pinv: Matrix<T>,
    pub d_pinv: Matrix<T>,
    pub f: Matrix<T>,
    pub g: Matrix<T>,
}

impl<T: Scalar> Pivots<T> {
    pub fn new(mb: &BlockMatrix<T>, tol: &Tolerances) -> Self {
        let blocks = mb.blocks();
        let a_pinv = T::pinv(&blocks.a, tol);
        let d_pinv = T::pinv(&blocks.d, tol);
        let f = &blocks.d - &(&(&blocks.c * &a_pinv) * &blocks.b);
        let g = &blocks.a - &(&(&blocks.b * &d_pinv) * &blocks.c);
        Self {
            blocks,
            a_pinv,
            d_pinv,
            f,
            g,
        }
    }

    pub fn report(&self, tol: &Tolerances) -> InclusionReport {
        report_from_pivots(self, tol)
    }

    pub fn h(&self) -> BlockMatrix<T> {
        let b = &self.blocks;
        BlockMatrix::from_blocks(
            &self.a_pinv,
            &-&(&self.a_pinv * &b.b),
            &(&b.c * &self.a_pinv),
            &self.f,
        )
        .expect("pppt blocks conform")
    }

    pub fn j(&self) -> BlockMatrix<T> {
        let b = &self.blocks;
        BlockMatrix::from_blocks(
            &self.g,
            &(&b.b * &self.d_pinv),
            &-&(&self.d_pinv * &b.c),
            &self.d_pinv,
        )
        .expect("cpppt blocks conform")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct PseudoSchurResult<T: Scalar> {
    #[serde(skip)]
    pub value: Matrix<T>,
    pub relative_to: Pivot,
    /// The two inclusions that make the complement independent of the
    /// chosen {1}-inverse.
    pub hypotheses: Vec<(Inclusion, Verdict)>,
}

impl<T: Scalar> PseudoSchurResult<T> {
    pub fn hypotheses_hold(&self) -> bool {
        self.hypotheses.iter().all(|(_, v)| v.holds)
    }
}

/// `F = D - C A† B`, with the verdicts for `R(B) ⊆ R(A)` and
/// `R(Cᵀ) ⊆ R(Aᵀ)` attached.
pub fn pseudo_schur<T: Scalar>(mb: &BlockMatrix<T>, tol: &Tolerances) -> PseudoSchurResult<T> {
    let p = Pivots::new(mb, tol);
    let report = p.report(tol);
    PseudoSchurResult {
        value: p.f,
        relative_to: Pivot::A,
        hypotheses: report.subset(&Inclusion::A_RANGE),
    }
}

/// `G = A - B D† C`, with the verdicts for `R(C) ⊆ R(D)` and
/// `R(Bᵀ) ⊆ R(Dᵀ)` attached.
pub fn complementary_pseudo_schur<T: Scalar>(mb: &BlockMatrix<T>, tol: &Tolerances) -> PseudoSchurResult<T> {
    let p = Pivots::new(mb, tol);
    let report = p.report(tol);
    PseudoSchurResult {
        value: p.g,
        relative_to: Pivot::D,
        hypotheses: report.subset(&Inclusion::D_RANGE),
    }
}

/// `H = [[A†, -A† B], [C A†, F]]`, split at `(n, m)`.
pub fn pppt<T: Scalar>(mb: &BlockMatrix<T>, tol: &Tolerances) -> BlockMatrix<T> {
    Pivots::new(mb, tol).h()
}

/// `J = [[G, B D†], [-D† C, D†]]`, split at `(m, n)`.
pub fn cpppt<T: Scalar>(mb: &BlockMatrix<T>, tol: &Tolerances) -> BlockMatrix<T> {
    Pivots::new(mb, tol).j()
}

/// One instantiation of a domain-range exchange identity. All four vectors
/// are those the identity is stated in; `premise` and `conclusion` record
/// whether each side of the equivalence was observed to hold.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct Exchange<T: Scalar> {
    #[serde(skip)]
    pub x1: Vec<T>,
    #[serde(skip)]
    pub x2: Vec<T>,
    #[serde(skip)]
    pub y1: Vec<T>,
    #[serde(skip)]
    pub y2: Vec<T>,
    pub premise: bool,
    pub conclusion: bool,
    pub verified: bool,
    /// Largest relative ∞-norm discrepancy among the compared vectors.
    pub residual: f64,
}

impl<T: Scalar> Exchange<T> {
    fn new(x1: Vec<T>, x2: Vec<T>, y1: Vec<T>, y2: Vec<T>, premise: bool, conclusion: bool, residual: f64) -> Self {
        Self {
            x1,
            x2,
            y1,
            y2,
            premise,
            conclusion,
            verified: premise && conclusion,
            residual,
        }
    }
}

/// Vector comparisons that remember the worst residual seen.
struct Gauge {
    eq: f64,
    worst: f64,
}

impl Gauge {
    fn new(tol: &Tolerances) -> Self {
        Self { eq: tol.eq, worst: 0.0 }
    }

    fn close<T: Scalar>(&mut self, u: &[T], v: &[T]) -> bool {
        self.worst = self.worst.max(vector_residual(u, v));
        vectors_close(u, v, self.eq)
    }
}

fn require<T: Scalar>(p: &Pivots<T>, set: &[Inclusion], tol: &Tolerances) -> Result<()> {
    let failed = p.report(tol).failed(set);
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Error::HypothesisViolated { failed })
    }
}

fn check_len(op: &'static str, v: &[impl Sized], want: usize) -> Result<()> {
    if v.len() == want {
        Ok(())
    } else {
        Err(Error::ShapeMismatch {
            op,
            left: (want, 1),
            right: (v.len(), 1),
        })
    }
}

fn concat<T: Clone>(u: &[T], v: &[T]) -> Vec<T> {
    u.iter().chain(v).cloned().collect()
}

fn split<T: Clone>(w: &[T], at: usize) -> (Vec<T>, Vec<T>) {
    (w[..at].to_vec(), w[at..].to_vec())
}

/// Forward direction of the exchange identity for `H`. From `(x1, x2)`
/// sets `y1 = A x1 + B x2` and `y2 = C x1 + D x2`, so that
/// `M [x1; x2] = [A A† y1; y2]`, then checks `H [y1; x2] = [A† A x1; y2]`.
///
/// Requires `R(B) ⊆ R(A)` and `R(Cᵀ) ⊆ R(Aᵀ)`.
pub fn exchange_forward<T: Scalar>(mb: &BlockMatrix<T>, x1: &[T], x2: &[T], tol: &Tolerances) -> Result<Exchange<T>> {
    let (m, n, _, p) = mb.dims();
    check_len("exchange x1", x1, n)?;
    check_len("exchange x2", x2, p)?;
    let piv = Pivots::new(mb, tol);
    require(&piv, &Inclusion::A_RANGE, tol)?;
    let b = &piv.blocks;
    let mut g = Gauge::new(tol);

    let (y1, y2) = split(&mb.whole().mul_vec(&concat(x1, x2))?, m);
    let aad = &b.a * &piv.a_pinv;
    let premise = g.close(&aad.mul_vec(&y1)?, &y1);

    let lhs = piv.h().whole().mul_vec(&concat(&y1, x2))?;
    let rhs = concat(&(&piv.a_pinv * &b.a).mul_vec(x1)?, &y2);
    let conclusion = g.close(&lhs, &rhs);
    Ok(Exchange::new(x1.to_vec(), x2.to_vec(), y1, y2, premise, conclusion, g.worst))
}

/// Converse direction for `H`. Takes `x1` as the first block of
/// `H [y1; x2]` (it lies in `R(Aᵀ)`, so `A† A x1 = x1`), checks that the
/// second block equals `y2`, then checks `M [x1; x2] = [A A† y1; y2]`.
pub fn exchange_backward<T: Scalar>(
    mb: &BlockMatrix<T>,
    y1: &[T],
    x2: &[T],
    y2: &[T],
    tol: &Tolerances,
) -> Result<Exchange<T>> {
    let (m, n, s, p) = mb.dims();
    check_len("exchange y1", y1, m)?;
    check_len("exchange x2", x2, p)?;
    check_len("exchange y2", y2, s)?;
    let piv = Pivots::new(mb, tol);
    require(&piv, &Inclusion::A_RANGE, tol)?;
    let b = &piv.blocks;
    let mut g = Gauge::new(tol);

    let (x1, h_second) = split(&piv.h().whole().mul_vec(&concat(y1, x2))?, n);
    let ada_x1 = (&piv.a_pinv * &b.a).mul_vec(&x1)?;
    let premise = g.close(&ada_x1, &x1) && g.close(&h_second, y2);

    let lhs = mb.whole().mul_vec(&concat(&x1, x2))?;
    let rhs = concat(&(&b.a * &piv.a_pinv).mul_vec(y1)?, y2);
    let conclusion = g.close(&lhs, &rhs);
    Ok(Exchange::new(x1, x2.to_vec(), y1.to_vec(), y2.to_vec(), premise, conclusion, g.worst))
}

/// Forward direction of the exchange identity for `J`. From `(x1, x2)`
/// sets `y1 = A x1 + B x2` and `y2 = C x1 + D x2`, so that
/// `M [x1; x2] = [y1; D D† y2]`, then checks `J [x1; y2] = [y1; D† D x2]`.
///
/// Requires `R(C) ⊆ R(D)` and `R(Bᵀ) ⊆ R(Dᵀ)`.
pub fn exchange_forward_complementary<T: Scalar>(
    mb: &BlockMatrix<T>,
    x1: &[T],
    x2: &[T],
    tol: &Tolerances,
) -> Result<Exchange<T>> {
    let (m, n, _, p) = mb.dims();
    check_len("exchange x1", x1, n)?;
    check_len("exchange x2", x2, p)?;
    let piv = Pivots::new(mb, tol);
    require(&piv, &Inclusion::D_RANGE, tol)?;
    let b = &piv.blocks;
    let mut g = Gauge::new(tol);

    let (y1, y2) = split(&mb.whole().mul_vec(&concat(x1, x2))?, m);
    let ddd = &b.d * &piv.d_pinv;
    let premise = g.close(&ddd.mul_vec(&y2)?, &y2);

    let lhs = piv.j().whole().mul_vec(&concat(x1, &y2))?;
    let rhs = concat(&y1, &(&piv.d_pinv * &b.d).mul_vec(x2)?);
    let conclusion = g.close(&lhs, &rhs);
    Ok(Exchange::new(x1.to_vec(), x2.to_vec(), y1, y2, premise, conclusion, g.worst))
}

/// Converse direction for `J`. Takes `x2` as the second block of
/// `J [x1; y2]` (it lies in `R(Dᵀ)`), checks that the first block equals
/// `y1`, then checks `M [x1; x2] = [y1; D D† y2]`.
pub fn exchange_backward_complementary<T: Scalar>(
    mb: &BlockMatrix<T>,
    x1: &[T],
    y2: &[T],
    y1: &[T],
    tol: &Tolerances,
) -> Result<Exchange<T>> {
    let (m, n, s, _) = mb.dims();
    check_len("exchange x1", x1, n)?;
    check_len("exchange y2", y2, s)?;
    check_len("exchange y1", y1, m)?;
    let piv = Pivots::new(mb, tol);
    require(&piv, &Inclusion::D_RANGE, tol)?;
    let b = &piv.blocks;
    let mut g = Gauge::new(tol);

    let (j_first, x2) = split(&piv.j().whole().mul_vec(&concat(x1, y2))?, m);
    let ddx2 = (&piv.d_pinv * &b.d).mul_vec(&x2)?;
    let premise = g.close(&ddx2, &x2) && g.close(&j_first, y1);

    let lhs = mb.whole().mul_vec(&concat(x1, &x2))?;
    let rhs = concat(y1, &(&b.d * &piv.d_pinv).mul_vec(y2)?);
    let conclusion = g.close(&lhs, &rhs);
    Ok(Exchange::new(x1.to_vec(), x2, y1.to_vec(), y2.to_vec(), premise, conclusion, g.worst))
}
