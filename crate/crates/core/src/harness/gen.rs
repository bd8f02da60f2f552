//! Seeded random block matrices with prescribed range inclusions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::block::BlockMatrix;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::pinv::singular_values;
use crate::range::{condition_report, Inclusion};
use crate::scalar::Scalar;
use crate::tolerance::Tolerances;

/// Block sizes: `A` is `m x n`, `D` is `s x p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dims {
    pub m: usize,
    pub n: usize,
    pub s: usize,
    pub p: usize,
}

impl Dims {
    pub fn new(m: usize, n: usize, s: usize, p: usize) -> Self {
        Self { m, n, s, p }
    }
}

/// Target ranks. `None` lets the strategy pick. For `B` and `C` the rank
/// bounds the random factor multiplying `A` or `D`, so `Some(0)` forces a
/// zero block.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankBounds {
    pub a: Option<usize>,
    pub b: Option<usize>,
    pub c: Option<usize>,
    pub d: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// `B = 0`, `C = 0`, singular `A` and `D`: all eight inclusions.
    BlockDiagonal,
    /// `B = A R`, `C = S A`, free `D`: `R(B) ⊆ R(A)`, `R(Cᵀ) ⊆ R(Aᵀ)`.
    ARange,
    /// Mirror of `ARange` on `D`.
    DRange,
    /// `ARange` plus `D = F + C A† B` with `F` chosen so both F-inclusions
    /// hold: the four A-side inclusions.
    ASide,
    /// Mirror of `ASide`: the four D-side inclusions.
    DSide,
    /// `B = A R D`, `C = D S A`: the two A-range and two D-range inclusions.
    PivotPair,
    /// Invertible `A`, `D`, `F`, `G`: all eight inclusions.
    Nonsingular,
    /// Unstructured low-rank blocks, accepted only if the required
    /// inclusions happen to hold.
    Rejection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub dims: Dims,
    pub ranks: RankBounds,
    pub require: Vec<Inclusion>,
    /// Overrides the strategy picked from `require`.
    pub strategy: Option<Strategy>,
    /// Build a rectangular (possibly singular) `F` or `G` in the A-side and
    /// D-side strategies instead of a square invertible one.
    pub rectangular_schur: bool,
    pub seed: u64,
    pub max_rejects: usize,
    /// Float only: reject draws whose blocks have a nonzero singular value
    /// spread `σ_max / σ_r` above this.
    pub max_condition: f64,
}

pub const MAX_REJECTS: usize = 100;
pub const MAX_CONDITION: f64 = 1e3;

impl GenSpec {
    pub fn new(dims: Dims, require: &[Inclusion], seed: u64) -> Self {
        Self {
            dims,
            ranks: RankBounds::default(),
            require: require.to_vec(),
            strategy: None,
            rectangular_schur: false,
            seed,
            max_rejects: MAX_REJECTS,
            max_condition: MAX_CONDITION,
        }
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> Self {
        self.strategy = Some(strategy);
        self
    }

    pub fn with_ranks(mut self, ranks: RankBounds) -> Self {
        self.ranks = ranks;
        self
    }

    /// Strategy used for this spec: the override if any, otherwise the
    /// narrowest construction covering `require`.
    pub fn resolved_strategy(&self) -> Strategy {
        if let Some(s) = self.strategy {
            return s;
        }
        if self.ranks.b == Some(0) && self.ranks.c == Some(0) {
            return Strategy::BlockDiagonal;
        }
        let within = |set: &[Inclusion]| self.require.iter().all(|r| set.contains(r));
        let Dims { m, n, s, p } = self.dims;
        if within(&Inclusion::A_RANGE) {
            Strategy::ARange
        } else if within(&Inclusion::D_RANGE) {
            Strategy::DRange
        } else if within(&Inclusion::A_SIDE) {
            Strategy::ASide
        } else if within(&Inclusion::D_SIDE) {
            Strategy::DSide
        } else if within(&Inclusion::PIVOT_PAIR) {
            Strategy::PivotPair
        } else if m == n && s == p {
            Strategy::Nonsingular
        } else {
            Strategy::BlockDiagonal
        }
    }
}

/// A generated instance and how it was obtained.
#[derive(Debug, Clone)]
pub struct Generated<T: Scalar> {
    pub block: BlockMatrix<T>,
    pub strategy: Strategy,
    pub rejects: usize,
}

/// Deterministic in `spec.seed`; the result satisfies every inclusion in
/// `spec.require` according to [`condition_report`].
pub fn gen_block<T: Scalar>(spec: &GenSpec, tol: &Tolerances) -> Result<BlockMatrix<T>> {
    gen_block_detailed(spec, tol).map(|g| g.block)
}

pub fn gen_block_detailed<T: Scalar>(spec: &GenSpec, tol: &Tolerances) -> Result<Generated<T>> {
    let Dims { m, n, s, p } = spec.dims;
    if [m, n, s, p].contains(&0) {
        return Err(Error::Unsatisfiable("every block dimension must be positive".into()));
    }
    let strategy = spec.resolved_strategy();
    check_shape_constraints(spec, strategy)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut last_reason = String::new();
    for rejects in 0..spec.max_rejects {
        let draw = draw(&mut rng, spec, strategy, tol);
        let block = match draw {
            Ok(b) => b,
            Err(reason) => {
                last_reason = reason;
                continue;
            }
        };
        if !T::EXACT && !conditioned(&block, spec.max_condition, tol) {
            last_reason = "condition cap exceeded".into();
            continue;
        }
        let report = condition_report(&block, tol);
        let failed = report.failed(&spec.require);
        if failed.is_empty() {
            return Ok(Generated {
                block,
                strategy,
                rejects,
            });
        }
        last_reason = format!(
            "required inclusions failed: {}",
            failed.iter().map(|i| i.name()).collect::<Vec<_>>().join(", ")
        );
    }
    Err(Error::GenerationFailed {
        rejects: spec.max_rejects,
        reason: format!("{strategy:?}: {last_reason}"),
    })
}

fn check_shape_constraints(spec: &GenSpec, strategy: Strategy) -> Result<()> {
    let Dims { m, n, s, p } = spec.dims;
    let msg = match strategy {
        Strategy::ASide if !spec.rectangular_schur && s != p => {
            Some("a square invertible F needs s == p (or request a rectangular one)")
        }
        Strategy::DSide if !spec.rectangular_schur && m != n => {
            Some("a square invertible G needs m == n (or request a rectangular one)")
        }
        Strategy::Nonsingular if m != n || s != p => Some("invertible A and D need m == n and s == p"),
        _ => None,
    };
    if let Some(msg) = msg {
        return Err(Error::Unsatisfiable(msg.into()));
    }
    let needs_b_zero = strategy == Strategy::BlockDiagonal;
    if needs_b_zero && (spec.ranks.b.unwrap_or(0) > 0 || spec.ranks.c.unwrap_or(0) > 0) {
        return Err(Error::Unsatisfiable("block-diagonal strategy needs zero B and C".into()));
    }
    for (r, cap, name) in [
        (spec.ranks.a, m.min(n), "A"),
        (spec.ranks.d, s.min(p), "D"),
    ] {
        if r.is_some_and(|r| r > cap) {
            return Err(Error::Unsatisfiable(format!("rank of {name} exceeds its smaller dimension")));
        }
    }
    Ok(())
}

fn conditioned<T: Scalar>(mb: &BlockMatrix<T>, cap: f64, tol: &Tolerances) -> bool {
    let p = crate::block::Pivots::new(mb, tol);
    let ok = [&p.blocks.a, &p.blocks.d, &p.f, &p.g, mb.whole()]
        .into_iter()
        .all(|m| spread(&m.to_f64(), tol) <= cap);
    ok
}

/// `σ_max / σ_r` with `r` the numerical rank; 1 for a zero matrix.
fn spread(m: &Matrix<f64>, tol: &Tolerances) -> f64 {
    let s = singular_values(m);
    let cut = tol.rank_cutoff(m.rows(), m.cols(), s[0]);
    match s.iter().rposition(|&v| v > cut) {
        Some(last) if s[0] > 0.0 => s[0] / s[last],
        _ => 1.0,
    }
}

fn random<T: Scalar>(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix<T> {
    Matrix::from_fn(rows, cols, |_, _| T::sample(rng))
}

/// Product of random `rows x r` and `r x cols` factors; zero when `r == 0`.
fn low_rank<T: Scalar>(rng: &mut ChaCha8Rng, rows: usize, cols: usize, r: usize) -> Matrix<T> {
    if r == 0 {
        return Matrix::zeros(rows, cols);
    }
    let left = random::<T>(rng, rows, r);
    let right = random::<T>(rng, r, cols);
    &left * &right
}

fn pick(rng: &mut ChaCha8Rng, fixed: Option<usize>, lo: usize, hi: usize) -> usize {
    fixed.unwrap_or_else(|| if lo >= hi { hi } else { rng.random_range(lo..=hi) })
}

fn draw<T: Scalar>(
    rng: &mut ChaCha8Rng,
    spec: &GenSpec,
    strategy: Strategy,
    tol: &Tolerances,
) -> std::result::Result<BlockMatrix<T>, String> {
    let Dims { m, n, s, p } = spec.dims;
    let ranks = spec.ranks;
    let (a, b, c, d) = match strategy {
        Strategy::BlockDiagonal => {
            // singular unless a rank is forced
            let ra = pick(rng, ranks.a, 0, m.min(n) - 1);
            let rd = pick(rng, ranks.d, 0, s.min(p) - 1);
            (
                low_rank(rng, m, n, ra),
                Matrix::zeros(m, p),
                Matrix::zeros(s, n),
                low_rank(rng, s, p, rd),
            )
        }
        Strategy::ARange | Strategy::ASide => {
            let cap = if spec.rectangular_schur { m.min(n).min(s).min(p) } else { m.min(n) };
            let ra = pick(rng, ranks.a, 1, cap);
            let a = low_rank::<T>(rng, m, n, ra);
            let r1 = pick(rng, ranks.b, 1, n.min(p));
            let b = &a * &low_rank(rng, n, p, r1);
            let r2 = pick(rng, ranks.c, 1, s.min(m));
            let c = &low_rank(rng, s, m, r2) * &a;
            let d = if strategy == Strategy::ARange {
                let rd = pick(rng, ranks.d, 0, s.min(p));
                low_rank(rng, s, p, rd)
            } else {
                let a_pinv = T::pinv(&a, tol);
                let f = schur_target(rng, spec.rectangular_schur, &(&c * &a_pinv), &(&a_pinv * &b), tol)?;
                &f + &(&(&c * &a_pinv) * &b)
            };
            (a, b, c, d)
        }
        Strategy::DRange | Strategy::DSide => {
            let cap = if spec.rectangular_schur { m.min(n).min(s).min(p) } else { s.min(p) };
            let rd = pick(rng, ranks.d, 1, cap);
            let d = low_rank::<T>(rng, s, p, rd);
            let r3 = pick(rng, ranks.c, 1, p.min(n));
            let c = &d * &low_rank(rng, p, n, r3);
            let r4 = pick(rng, ranks.b, 1, m.min(s));
            let b = &low_rank(rng, m, s, r4) * &d;
            let a = if strategy == Strategy::DRange {
                let ra = pick(rng, ranks.a, 0, m.min(n));
                low_rank(rng, m, n, ra)
            } else {
                let d_pinv = T::pinv(&d, tol);
                let g = schur_target(rng, spec.rectangular_schur, &(&b * &d_pinv), &(&d_pinv * &c), tol)?;
                &g + &(&(&b * &d_pinv) * &c)
            };
            (a, b, c, d)
        }
        Strategy::PivotPair => {
            let ra = pick(rng, ranks.a, 1, m.min(n));
            let rd = pick(rng, ranks.d, 1, s.min(p));
            let a = low_rank::<T>(rng, m, n, ra);
            let d = low_rank::<T>(rng, s, p, rd);
            let r5 = pick(rng, ranks.b, 1, n.min(s));
            let b = &(&a * &low_rank(rng, n, s, r5)) * &d;
            let r6 = pick(rng, ranks.c, 1, p.min(m));
            let c = &(&d * &low_rank(rng, p, m, r6)) * &a;
            (a, b, c, d)
        }
        Strategy::Nonsingular => {
            let a = random::<T>(rng, m, n);
            let d = random::<T>(rng, s, p);
            let b = random::<T>(rng, m, p);
            let c = random::<T>(rng, s, n);
            (a, b, c, d)
        }
        Strategy::Rejection => {
            let ra = pick(rng, ranks.a, 0, m.min(n));
            let rd = pick(rng, ranks.d, 0, s.min(p));
            let rb = pick(rng, ranks.b, 0, m.min(p));
            let rc = pick(rng, ranks.c, 0, s.min(n));
            (
                low_rank(rng, m, n, ra),
                low_rank(rng, m, p, rb),
                low_rank(rng, s, n, rc),
                low_rank(rng, s, p, rd),
            )
        }
    };
    let block = BlockMatrix::from_blocks(&a, &b, &c, &d).map_err(|e| e.to_string())?;
    if strategy == Strategy::Nonsingular {
        let piv = crate::block::Pivots::new(&block, tol);
        for (name, mat) in [("A", &piv.blocks.a), ("D", &piv.blocks.d), ("F", &piv.f), ("G", &piv.g)] {
            if T::rank(mat, tol) < mat.rows() {
                return Err(format!("{name} singular"));
            }
        }
    }
    Ok(block)
}

/// Pseudo Schur complement to plant. Square case: an invertible random
/// matrix. Rectangular case: `F = X Y` with `R(X) ⊇ R(K)` and
/// `row(Y) ⊇ row(L)`, where `K = C A†` and `L = A† B` (or the D-side
/// analogues), so both F-inclusions hold.
fn schur_target<T: Scalar>(
    rng: &mut ChaCha8Rng,
    rectangular: bool,
    k: &Matrix<T>,
    l: &Matrix<T>,
    tol: &Tolerances,
) -> std::result::Result<Matrix<T>, String> {
    let rows = k.rows();
    let cols = l.cols();
    if !rectangular {
        let f = random::<T>(rng, rows, cols);
        if T::rank(&f, tol) < rows {
            return Err("planted Schur complement singular".into());
        }
        return Ok(f);
    }
    let rk = T::rank(k, tol);
    let rl = T::rank(l, tol);
    let lo = rk.max(rl);
    let hi = rows.min(cols);
    if lo > hi {
        return Err("Schur complement too small for the required ranges".into());
    }
    let inner = rng.random_range(lo..=hi);
    if inner == 0 {
        return Ok(Matrix::zeros(rows, cols));
    }
    // columns: K R1 (rk of them) then free columns
    let kr = if rk > 0 { Some(k * &random::<T>(rng, k.cols(), rk)) } else { None };
    let extra_cols = random::<T>(rng, rows, inner);
    let x = Matrix::from_fn(rows, inner, |i, j| match &kr {
        Some(kr) if j < rk => kr.get(i, j).clone(),
        _ => extra_cols.get(i, j).clone(),
    });
    let rl_mat = if rl > 0 { Some(&random::<T>(rng, rl, l.rows()) * l) } else { None };
    let extra_rows = random::<T>(rng, inner, cols);
    let y = Matrix::from_fn(inner, cols, |i, j| match &rl_mat {
        Some(r) if i < rl => r.get(i, j).clone(),
        _ => extra_rows.get(i, j).clone(),
    });
    Ok(&x * &y)
}

/// Random `rows x cols` matrix of rank `rank`, deterministic in `seed`.
/// Float draws are redrawn until `σ_max / σ_rank <= max_condition`.
pub fn gen_matrix<T: Scalar>(
    rows: usize,
    cols: usize,
    rank: usize,
    seed: u64,
    max_condition: f64,
    tol: &Tolerances,
) -> Result<Matrix<T>> {
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyShape { rows, cols });
    }
    if rank > rows.min(cols) {
        return Err(Error::Unsatisfiable(format!(
            "rank {rank} exceeds the smaller dimension of a {rows}x{cols} matrix"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REJECTS {
        let m = low_rank::<T>(&mut rng, rows, cols, rank);
        if T::rank(&m, tol) != rank {
            continue;
        }
        if T::EXACT || spread(&m.to_f64(), tol) <= max_condition {
            return Ok(m);
        }
    }
    Err(Error::GenerationFailed {
        rejects: MAX_REJECTS,
        reason: format!("no well-conditioned rank-{rank} draw"),
    })
}

/// Per-trial seed derived from a base seed, a stream tag and an index.
pub fn derive_seed(base: u64, stream: u64, index: u64) -> u64 {
    splitmix(splitmix(base ^ splitmix(stream)) ^ index)
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn a_side_instances_satisfy_a_side() {
        for seed in 0..20 {
            let spec = GenSpec::new(Dims::new(3, 2, 2, 2), &Inclusion::A_SIDE, seed);
            assert_eq!(spec.resolved_strategy(), Strategy::ASide);
            let mb = gen_block::<Rational>(&spec, &tol()).unwrap();
            assert!(condition_report(&mb, &tol()).holds_all(&Inclusion::A_SIDE));
            let mbf = gen_block::<f64>(&spec, &tol()).unwrap();
            assert!(condition_report(&mbf, &tol()).holds_all(&Inclusion::A_SIDE));
        }
    }

    #[test]
    fn zero_off_diagonal_ranks_give_block_diagonal() {
        let spec = GenSpec::new(Dims::new(2, 3, 3, 2), &[], 5).with_ranks(RankBounds {
            b: Some(0),
            c: Some(0),
            ..RankBounds::default()
        });
        assert_eq!(spec.resolved_strategy(), Strategy::BlockDiagonal);
        let mb = gen_block::<Rational>(&spec, &tol()).unwrap();
        assert!(mb.b().is_zero() && mb.c().is_zero());
        assert!(condition_report(&mb, &tol()).holds_all(&Inclusion::ALL));
    }

    #[test]
    fn same_seed_same_instance() {
        let spec = GenSpec::new(Dims::new(2, 2, 3, 3), &Inclusion::ALL, 99);
        let x = gen_block::<f64>(&spec, &tol()).unwrap();
        let y = gen_block::<f64>(&spec, &tol()).unwrap();
        assert_eq!(x, y);
        let other = GenSpec { seed: 100, ..spec };
        assert_ne!(gen_block::<f64>(&other, &tol()).unwrap(), x);
    }

    #[test]
    fn rectangular_schur_route() {
        for seed in 0..20 {
            let mut spec = GenSpec::new(Dims::new(3, 3, 2, 4), &Inclusion::A_SIDE, seed);
            spec.rectangular_schur = true;
            let mb = gen_block::<Rational>(&spec, &tol()).unwrap();
            assert!(condition_report(&mb, &tol()).holds_all(&Inclusion::A_SIDE));
            let mut dspec = GenSpec::new(Dims::new(2, 4, 3, 3), &Inclusion::D_SIDE, seed);
            dspec.rectangular_schur = true;
            let mb = gen_block::<f64>(&dspec, &tol()).unwrap();
            assert!(condition_report(&mb, &tol()).holds_all(&Inclusion::D_SIDE));
        }
    }

    #[test]
    fn unsatisfiable_requests_are_reported() {
        let spec = GenSpec::new(Dims::new(2, 2, 2, 3), &Inclusion::A_SIDE, 1);
        assert!(matches!(gen_block::<f64>(&spec, &tol()), Err(Error::Unsatisfiable(_))));
        let spec = GenSpec::new(Dims::new(2, 3, 2, 2), &[], 1).with_strategy(Strategy::Nonsingular);
        assert!(matches!(gen_block::<f64>(&spec, &tol()), Err(Error::Unsatisfiable(_))));
    }

    #[test]
    fn rejection_reports_scarcity() {
        // a generic rank-1 B is almost never inside a rank-1 A's range in 3 dims
        let mut spec = GenSpec::new(Dims::new(3, 3, 1, 1), &Inclusion::ALL, 3)
            .with_strategy(Strategy::Rejection)
            .with_ranks(RankBounds {
                a: Some(1),
                b: Some(1),
                c: Some(1),
                d: Some(1),
            });
        spec.max_rejects = 10;
        match gen_block::<f64>(&spec, &tol()) {
            Err(Error::GenerationFailed { rejects, .. }) => assert_eq!(rejects, 10),
            other => panic!("expected failure, got {other:?}"),
        }
    }

    #[test]
    fn seeds_are_spread() {
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 0, 1));
        assert_ne!(derive_seed(1, 0, 0), derive_seed(1, 1, 0));
        assert_eq!(derive_seed(7, 3, 11), derive_seed(7, 3, 11));
    }
}
