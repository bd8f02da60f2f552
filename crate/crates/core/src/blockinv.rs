//! Moore-Penrose inverses of 2x2 block matrices assembled from the
//! pseudo Schur complements, and the identities relating them.

use serde::Serialize;

use crate::block::{BlockMatrix, Pivots};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pinv::{certificate, PinvCertificate};
use crate::range::{Inclusion, Verdict};
use crate::scalar::Scalar;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Formula {
    /// Built from `A†` and `F†`.
    #[serde(rename = "via-F")]
    ViaF,
    /// Built from `D†` and `G†`.
    #[serde(rename = "via-G")]
    ViaG,
    /// Diagonal blocks `G†`, `F†`; off-diagonal blocks from `A†` and `D†`.
    Mixed,
}

impl Formula {
    pub fn hypotheses(self) -> &'static [Inclusion] {
        match self {
            Formula::ViaF => &Inclusion::A_SIDE,
            Formula::ViaG => &Inclusion::D_SIDE,
            Formula::Mixed => &Inclusion::ALL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct BlockPinvResult<T: Scalar> {
    #[serde(skip)]
    pub value: Matrix<T>,
    pub formula: Formula,
    pub hypotheses_used: Vec<(Inclusion, Verdict)>,
    /// Penrose residuals of `value` against the whole matrix.
    pub certificate: PinvCertificate,
    /// All gating hypotheses hold. Results with `sound == false` are
    /// still returned for exploration.
    pub sound: bool,
}

impl<T: Scalar> BlockPinvResult<T> {
    pub fn failed(&self) -> Vec<Inclusion> {
        self.hypotheses_used
            .iter()
            .filter(|(_, v)| !v.holds)
            .map(|(i, _)| *i)
            .collect()
    }

    /// Turns an unsound result into [`Error::HypothesisViolated`].
    pub fn require_sound(self) -> Result<Self> {
        if self.sound {
            Ok(self)
        } else {
            Err(Error::HypothesisViolated {
                failed: self.failed(),
            })
        }
    }
}

fn diag<T: Scalar>(top: &Matrix<T>, bottom: &Matrix<T>) -> Matrix<T> {
    Matrix::from_blocks(
        top,
        &Matrix::zeros(top.rows(), bottom.cols()),
        &Matrix::zeros(bottom.rows(), top.cols()),
        bottom,
    )
    .expect("diagonal blocks conform")
}

fn assemble<T: Scalar>(
    mb: &BlockMatrix<T>,
    p: &Pivots<T>,
    formula: Formula,
    blocks: [Matrix<T>; 4],
    tol: &Tolerances,
) -> BlockPinvResult<T> {
    let [tl, tr, bl, br] = blocks;
    let value = Matrix::from_blocks(&tl, &tr, &bl, &br).expect("inverse blocks conform");
    let report = p.report(tol);
    let hypotheses_used = report.subset(formula.hypotheses());
    let sound = hypotheses_used.iter().all(|(_, v)| v.holds);
    let certificate = certificate(mb.whole(), &value, tol).expect("inverse has transposed shape");
    BlockPinvResult {
        value,
        formula,
        hypotheses_used,
        certificate,
        sound,
    }
}

/// Intermediate products shared by the formulas.
struct Parts<T: Scalar> {
    ad_b: Matrix<T>,
    c_ad: Matrix<T>,
    b_dd: Matrix<T>,
    dd_c: Matrix<T>,
    f_pinv: Matrix<T>,
    g_pinv: Matrix<T>,
}

impl<T: Scalar> Parts<T> {
    fn new(p: &Pivots<T>, tol: &Tolerances) -> Self {
        let b = &p.blocks;
        Self {
            ad_b: &p.a_pinv * &b.b,
            c_ad: &b.c * &p.a_pinv,
            b_dd: &b.b * &p.d_pinv,
            dd_c: &p.d_pinv * &b.c,
            f_pinv: T::pinv(&p.f, tol),
            g_pinv: T::pinv(&p.g, tol),
        }
    }

    /// `A† + A† B F† C A†`
    fn g_pinv_via_f(&self, p: &Pivots<T>) -> Matrix<T> {
        &p.a_pinv + &(&(&self.ad_b * &self.f_pinv) * &self.c_ad)
    }

    /// `D† + D† C G† B D†`
    fn f_pinv_via_g(&self, p: &Pivots<T>) -> Matrix<T> {
        &p.d_pinv + &(&(&self.dd_c * &self.g_pinv) * &self.b_dd)
    }
}

/// `[[A† + A†BF†CA†, -A†BF†], [-F†CA†, F†]]` with `F = D - CA†B`.
///
/// Gated by the four A-side inclusions.
pub fn block_pinv_via_f<T: Scalar>(mb: &BlockMatrix<T>, tol: &Tolerances) -> BlockPinvResult<T> {
    let p = Pivots::new(mb, tol);
    let q = Parts::new(&p, tol);
    let blocks = [
        q.g_pinv_via_f(&p),
        -&(&q.ad_b * &q.f_pinv),
        -&(&q.f_pinv * &q.c_ad),
        q.f_pinv.clone(),
    ];
    assemble(mb, &p, Formula::ViaF, blocks, tol)
}

/// `[[G†, -G†BD†], [-D†CG†, D† + D†CG†BD†]]` with `G = A - BD†C`.
///
/// Gated by the four D-side inclusions.
pub fn block_pinv_via_g<T: Scalar>(mb: &BlockMatrix<T>, tol: &Tolerances) -> BlockPinvResult<T> {
    let p = Pivots::new(mb, tol);
    let q = Parts::new(&p, tol);
    let blocks = [
        q.g_pinv.clone(),
        -&(&q.g_pinv * &q.b_dd),
        -&(&q.dd_c * &q.g_pinv),
        q.f_pinv_via_g(&p),
    ];
    assemble(mb, &p, Formula::ViaG, blocks, tol)
}

/// `[[G†, -A†BF†], [-D†CG†, F†]]`. Gated by all eight inclusions.
pub fn block_pinv_mixed<T: Scalar>(mb: &BlockMatrix<T>, tol: &Tolerances) -> BlockPinvResult<T> {
    let p = Pivots::new(mb, tol);
    let q = Parts::new(&p, tol);
    let blocks = [
        q.g_pinv.clone(),
        -&(&q.ad_b * &q.f_pinv),
        -&(&q.dd_c * &q.g_pinv),
        q.f_pinv.clone(),
    ];
    assemble(mb, &p, Formula::Mixed, blocks, tol)
}

pub fn block_pinv<T: Scalar>(mb: &BlockMatrix<T>, formula: Formula, tol: &Tolerances) -> BlockPinvResult<T> {
    match formula {
        Formula::ViaF => block_pinv_via_f(mb, tol),
        Formula::ViaG => block_pinv_via_g(mb, tol),
        Formula::Mixed => block_pinv_mixed(mb, tol),
    }
}

/// Residuals of `X M = diag(A†A, F†F)` and `M X = diag(AA†, FF†)` for the
/// via-F inverse `X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViaFProducts {
    pub xm_residual: f64,
    pub mx_residual: f64,
    pub holds: bool,
}

pub fn via_f_products<T: Scalar>(mb: &BlockMatrix<T>, tol: &Tolerances) -> ViaFProducts {
    let p = Pivots::new(mb, tol);
    let x = block_pinv_via_f(mb, tol).value;
    let f_pinv = T::pinv(&p.f, tol);
    let b = &p.blocks;
    let xm_expected = diag(&(&p.a_pinv * &b.a), &(&f_pinv * &p.f));
    let mx_expected = diag(&(&b.a * &p.a_pinv), &(&p.f * &f_pinv));
    let xm = &x * mb.whole();
    let mx = mb.whole() * &x;
    ViaFProducts {
        xm_residual: xm.distance(&xm_expected),
        mx_residual: mx.distance(&mx_expected),
        holds: xm.approx_eq(&xm_expected, tol.eq) && mx.approx_eq(&mx_expected, tol.eq),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientResiduals {
    /// `|G† - (A† + A†BF†CA†)|_F`
    pub g_identity_residual: f64,
    /// `|F† - (D† + D†CG†BD†)|_F`
    pub f_identity_residual: f64,
    /// Both identities hold: exactly for rationals, to `eq` otherwise.
    pub holds: bool,
    /// Inclusions (of all eight) that fail; the identities are only
    /// guaranteed when this is empty.
    pub violated: Vec<Inclusion>,
}

/// Compares `G†` and `F†` against their expressions through the other
/// pivot.
pub fn quotient_identities<T: Scalar>(mb: &BlockMatrix<T>, tol: &Tolerances) -> QuotientResiduals {
    let p = Pivots::new(mb, tol);
    let q = Parts::new(&p, tol);
    let g_rhs = q.g_pinv_via_f(&p);
    let f_rhs = q.f_pinv_via_g(&p);
    QuotientResiduals {
        g_identity_residual: q.g_pinv.distance(&g_rhs),
        f_identity_residual: q.f_pinv.distance(&f_rhs),
        holds: q.g_pinv.approx_eq(&g_rhs, tol.eq) && q.f_pinv.approx_eq(&f_rhs, tol.eq),
        violated: p.report(tol).failed(&Inclusion::ALL),
    }
}

/// `H†` against `J`, plus the products `JH` and `HJ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound(serialize = ""))]
pub struct PivotComparison<T: Scalar> {
    pub equal: bool,
    /// `|H† - J|_F`
    pub residual: f64,
    #[serde(skip)]
    pub h: Matrix<T>,
    #[serde(skip)]
    pub j: Matrix<T>,
    #[serde(skip)]
    pub h_pinv: Matrix<T>,
    #[serde(skip)]
    pub jh: Matrix<T>,
    #[serde(skip)]
    pub hj: Matrix<T>,
    /// `|JH - diag(AA†, D†D)|_F`
    pub jh_residual: f64,
    /// `|HJ - diag(A†A, DD†)|_F`
    pub hj_residual: f64,
    /// Both products have the block-diagonal form.
    pub diagonal_forms: bool,
    pub hypotheses: Vec<(Inclusion, Verdict)>,
    pub sound: bool,
}

impl<T: Scalar> PivotComparison<T> {
    /// `JHJ = J` and `HJH = H`.
    pub fn reflexive(&self, eq_tol: f64) -> bool {
        let jhj = &self.jh * &self.j;
        let hjh = &self.hj * &self.h;
        jhj.approx_eq(&self.j, eq_tol) && hjh.approx_eq(&self.h, eq_tol)
    }
}

pub fn pppt_pinv_vs_cpppt<T: Scalar>(mb: &BlockMatrix<T>, tol: &Tolerances) -> PivotComparison<T> {
    let p = Pivots::new(mb, tol);
    let h = p.h().into_whole();
    let j = p.j().into_whole();
    let h_pinv = T::pinv(&h, tol);
    let jh = &j * &h;
    let hj = &h * &j;
    let b = &p.blocks;
    let jh_expected = diag(&(&b.a * &p.a_pinv), &(&p.d_pinv * &b.d));
    let hj_expected = diag(&(&p.a_pinv * &b.a), &(&b.d * &p.d_pinv));
    let hypotheses = p.report(tol).subset(&Inclusion::PIVOT_PAIR);
    let sound = hypotheses.iter().all(|(_, v)| v.holds);
    PivotComparison {
        equal: h_pinv.approx_eq(&j, tol.eq),
        residual: h_pinv.distance(&j),
        jh_residual: jh.distance(&jh_expected),
        hj_residual: hj.distance(&hj_expected),
        diagonal_forms: jh.approx_eq(&jh_expected, tol.eq) && hj.approx_eq(&hj_expected, tol.eq),
        h,
        j,
        h_pinv,
        jh,
        hj,
        hypotheses,
        sound,
    }
}
