//! Range-inclusion tests and the eight-hypothesis report.

use std::fmt;

use serde::de::Error as _;
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::block::{BlockMatrix, Pivots};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::tolerance::Tolerances;

/// One of the eight range inclusions that gate the block theorems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Inclusion {
    /// R(B) ⊆ R(A)
    BInA,
    /// R(Cᵀ) ⊆ R(Aᵀ)
    CtInAt,
    /// R(CA†) ⊆ R(F)
    CAdInF,
    /// R((A†B)ᵀ) ⊆ R(Fᵀ)
    AdBtInFt,
    /// R(C) ⊆ R(D)
    CInD,
    /// R(Bᵀ) ⊆ R(Dᵀ)
    BtInDt,
    /// R(BD†) ⊆ R(G)
    BDdInG,
    /// R((D†C)ᵀ) ⊆ R(Gᵀ)
    DdCtInGt,
}

impl Inclusion {
    pub const ALL: [Inclusion; 8] = [
        Inclusion::BInA,
        Inclusion::CtInAt,
        Inclusion::CAdInF,
        Inclusion::AdBtInFt,
        Inclusion::CInD,
        Inclusion::BtInDt,
        Inclusion::BDdInG,
        Inclusion::DdCtInGt,
    ];

    /// Hypotheses of the formula built on `F = D - C A† B`.
    pub const A_SIDE: [Inclusion; 4] = [
        Inclusion::BInA,
        Inclusion::CtInAt,
        Inclusion::CAdInF,
        Inclusion::AdBtInFt,
    ];

    /// Hypotheses of the formula built on `G = A - B D† C`.
    pub const D_SIDE: [Inclusion; 4] = [
        Inclusion::CInD,
        Inclusion::BtInDt,
        Inclusion::BDdInG,
        Inclusion::DdCtInGt,
    ];

    /// Inclusions making `D - C X B` independent of the {1}-inverse `X` of `A`.
    pub const A_RANGE: [Inclusion; 2] = [Inclusion::BInA, Inclusion::CtInAt];

    pub const D_RANGE: [Inclusion; 2] = [Inclusion::CInD, Inclusion::BtInDt];

    /// Hypotheses under which the pseudo PPT and its complement are
    /// Moore-Penrose inverses of each other.
    pub const PIVOT_PAIR: [Inclusion; 4] = [
        Inclusion::BInA,
        Inclusion::CtInAt,
        Inclusion::CInD,
        Inclusion::BtInDt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Inclusion::BInA => "incl_B_A",
            Inclusion::CtInAt => "incl_Ct_At",
            Inclusion::CAdInF => "incl_CAd_F",
            Inclusion::AdBtInFt => "incl_AdBt_Ft",
            Inclusion::CInD => "incl_C_D",
            Inclusion::BtInDt => "incl_Bt_Dt",
            Inclusion::BDdInG => "incl_BDd_G",
            Inclusion::DdCtInGt => "incl_DdCt_Gt",
        }
    }

    pub fn statement(self) -> &'static str {
        match self {
            Inclusion::BInA => "R(B) ⊆ R(A)",
            Inclusion::CtInAt => "R(Cᵀ) ⊆ R(Aᵀ)",
            Inclusion::CAdInF => "R(CA†) ⊆ R(F)",
            Inclusion::AdBtInFt => "R((A†B)ᵀ) ⊆ R(Fᵀ)",
            Inclusion::CInD => "R(C) ⊆ R(D)",
            Inclusion::BtInDt => "R(Bᵀ) ⊆ R(Dᵀ)",
            Inclusion::BDdInG => "R(BD†) ⊆ R(G)",
            Inclusion::DdCtInGt => "R((D†C)ᵀ) ⊆ R(Gᵀ)",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|i| i.name() == name)
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Inclusion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Inclusion {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Inclusion {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Inclusion::from_name(&name).ok_or_else(|| D::Error::custom(format!("unknown inclusion `{name}`")))
    }
}

/// Outcome of one inclusion test.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Verdict {
    pub holds: bool,
    /// `|(I - X X†) Y|_F`
    pub residual: f64,
    /// Largest residual accepted; zero for exact backends.
    pub threshold: f64,
    /// Float residual within a factor of ten of the threshold.
    pub marginal: bool,
}

/// Tests `R(Y) ⊆ R(X)` through the projector residual `|(I - X X†) Y|_F`.
pub fn range_included<T: Scalar>(y: &Matrix<T>, x: &Matrix<T>, tol: &Tolerances) -> Result<Verdict> {
    if y.rows() != x.rows() {
        return Err(Error::ShapeMismatch {
            op: "range inclusion",
            left: y.shape(),
            right: x.shape(),
        });
    }
    let projected = &(x * &T::pinv(x, tol)) * y;
    let rest = y - &projected;
    if T::EXACT {
        return Ok(Verdict {
            holds: rest.is_zero(),
            residual: rest.frobenius_norm(),
            threshold: 0.0,
            marginal: false,
        });
    }
    let residual = rest.frobenius_norm();
    let threshold = tol.incl_bound(y.frobenius_norm());
    Ok(Verdict {
        holds: residual <= threshold,
        residual,
        threshold,
        marginal: residual > threshold / 10.0 && residual < threshold * 10.0,
    })
}

/// Rank form of the same question: `rank([X | Y]) == rank(X)`.
pub fn range_included_by_rank<T: Scalar>(y: &Matrix<T>, x: &Matrix<T>, tol: &Tolerances) -> Result<bool> {
    let joined = x.hstack(y)?;
    Ok(T::rank(&joined, tol) == T::rank(x, tol))
}

/// Verdicts for all eight inclusions of one block matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct InclusionReport {
    verdicts: [Verdict; 8],
}

impl InclusionReport {
    pub fn get(&self, which: Inclusion) -> &Verdict {
        &self.verdicts[which.index()]
    }

    pub fn holds(&self, which: Inclusion) -> bool {
        self.get(which).holds
    }

    pub fn holds_all(&self, set: &[Inclusion]) -> bool {
        set.iter().all(|&i| self.holds(i))
    }

    pub fn failed(&self, set: &[Inclusion]) -> Vec<Inclusion> {
        set.iter().copied().filter(|&i| !self.holds(i)).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Inclusion, &Verdict)> {
        Inclusion::ALL.into_iter().zip(self.verdicts.iter())
    }

    pub fn subset(&self, set: &[Inclusion]) -> Vec<(Inclusion, Verdict)> {
        set.iter().map(|&i| (i, *self.get(i))).collect()
    }
}

impl Serialize for InclusionReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(8))?;
        for (incl, verdict) in self.iter() {
            map.serialize_entry(incl.name(), verdict)?;
        }
        map.end()
    }
}

impl fmt::Display for InclusionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (incl, v)) in self.iter().enumerate() {
            if k > 0 {
                writeln!(f)?;
            }
            write!(
                f,
                "{:<13} {:<20} {:<5} residual={:.3e}{}",
                incl.name(),
                incl.statement(),
                v.holds,
                v.residual,
                if v.marginal { " (marginal)" } else { "" }
            )?;
        }
        Ok(())
    }
}

/// Evaluates all eight inclusions, forming `F` and `G` along the way.
pub fn condition_report<T: Scalar>(mb: &BlockMatrix<T>, tol: &Tolerances) -> InclusionReport {
    let p = Pivots::new(mb, tol);
    report_from_pivots(&p, tol)
}

pub(crate) fn report_from_pivots<T: Scalar>(p: &Pivots<T>, tol: &Tolerances) -> InclusionReport {
    let check = |y: &Matrix<T>, x: &Matrix<T>| {
        range_included(y, x, tol).expect("block shapes are conformable")
    };
    let b = &p.blocks;
    let c_ad = &b.c * &p.a_pinv;
    let ad_b = &p.a_pinv * &b.b;
    let b_dd = &b.b * &p.d_pinv;
    let dd_c = &p.d_pinv * &b.c;
    let verdicts = [
        check(&b.b, &b.a),
        check(&b.c.transpose(), &b.a.transpose()),
        check(&c_ad, &p.f),
        check(&ad_b.transpose(), &p.f.transpose()),
        check(&b.c, &b.d),
        check(&b.b.transpose(), &b.d.transpose()),
        check(&b_dd, &p.g),
        check(&dd_c.transpose(), &p.g.transpose()),
    ];
    InclusionReport { verdicts }
}
