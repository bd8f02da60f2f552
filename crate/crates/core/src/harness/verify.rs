//! End-to-end verification of every block identity on generated instances
//! and on the fixed fixtures.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::gen::{derive_seed, gen_block, gen_matrix, Dims, GenSpec, Strategy, MAX_CONDITION};
use super::probe::invariance_probe;
use crate::block::{
    exchange_backward, exchange_backward_complementary, exchange_forward, exchange_forward_complementary,
    pppt, pseudo_schur, BlockMatrix,
};
use crate::blockinv::{
    block_pinv, pppt_pinv_vs_cpppt, quotient_identities, via_f_products, BlockPinvResult, Formula,
};
use crate::error::Result;
use crate::fixtures;
use crate::matrix::Matrix;
use crate::pinv::certificate;
use crate::range::{condition_report, Inclusion};
use crate::scalar::{Backend, Scalar};
use crate::tolerance::Tolerances;

/// Largest block dimension drawn per trial, so `M` is at most 8x8.
pub const MAX_BLOCK: usize = 4;
/// Largest side of the matrices in the Penrose certificate check.
pub const MAX_PLAIN: usize = 10;
/// {1}-inverses sampled per invariance trial.
pub const PROBE_SAMPLES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    /// Penrose residuals of `pinv` on a random rank-deficient matrix.
    PenroseCertificate,
    /// `D - C X B` does not depend on the {1}-inverse `X` of `A`.
    OneInverseInvariance,
    ExchangeForward,
    ExchangeBackward,
    ExchangeForwardComplementary,
    ExchangeBackwardComplementary,
    /// `pppt(pppt(M)) = M`.
    PpptInvolution,
    /// `pinv(H) = J` with the block-diagonal `JH`, `HJ`.
    PivotPairInverse,
    BlockPinvViaF,
    BlockPinvViaG,
    BlockPinvMixed,
    QuotientIdentities,
}

impl Check {
    pub const ALL: [Check; 12] = [
        Check::PenroseCertificate,
        Check::OneInverseInvariance,
        Check::ExchangeForward,
        Check::ExchangeBackward,
        Check::ExchangeForwardComplementary,
        Check::ExchangeBackwardComplementary,
        Check::PpptInvolution,
        Check::PivotPairInverse,
        Check::BlockPinvViaF,
        Check::BlockPinvViaG,
        Check::BlockPinvMixed,
        Check::QuotientIdentities,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::PenroseCertificate => "penrose_certificate",
            Check::OneInverseInvariance => "one_inverse_invariance",
            Check::ExchangeForward => "exchange_forward",
            Check::ExchangeBackward => "exchange_backward",
            Check::ExchangeForwardComplementary => "exchange_forward_complementary",
            Check::ExchangeBackwardComplementary => "exchange_backward_complementary",
            Check::PpptInvolution => "pppt_involution",
            Check::PivotPairInverse => "pivot_pair_inverse",
            Check::BlockPinvViaF => "block_pinv_via_f",
            Check::BlockPinvViaG => "block_pinv_via_g",
            Check::BlockPinvMixed => "block_pinv_mixed",
            Check::QuotientIdentities => "quotient_identities",
        }
    }

    fn stream(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub pass: bool,
    /// Largest discrepancy measured, relative where a reference exists.
    pub residual: f64,
    pub note: Option<String>,
}

impl CheckOutcome {
    fn new(pass: bool, residual: f64) -> Self {
        Self {
            pass,
            residual,
            note: None,
        }
    }

    fn failed(note: String) -> Self {
        Self {
            pass: false,
            residual: f64::NAN,
            note: Some(note),
        }
    }
}

fn rel<T: Scalar>(x: &Matrix<T>, reference: &Matrix<T>) -> f64 {
    x.distance(reference) / (1.0 + reference.frobenius_norm())
}

fn random_dims(rng: &mut ChaCha8Rng) -> Dims {
    let mut d = || rng.random_range(1..=MAX_BLOCK);
    Dims::new(d(), d(), d(), d())
}

fn random_vec<T: Scalar>(rng: &mut ChaCha8Rng, len: usize) -> Vec<T> {
    (0..len).map(|_| T::sample(rng)).collect()
}

/// Instance for `check` drawn from its hypothesis class.
fn instance<T: Scalar>(check: Check, rng: &mut ChaCha8Rng, seed: u64, tol: &Tolerances) -> Result<BlockMatrix<T>> {
    let mut dims = random_dims(rng);
    let (require, strategy): (&[Inclusion], Strategy) = match check {
        Check::OneInverseInvariance
        | Check::ExchangeForward
        | Check::ExchangeBackward
        | Check::PpptInvolution => (&Inclusion::A_RANGE, Strategy::ARange),
        Check::ExchangeForwardComplementary | Check::ExchangeBackwardComplementary => {
            (&Inclusion::D_RANGE, Strategy::DRange)
        }
        Check::PivotPairInverse => (&Inclusion::PIVOT_PAIR, Strategy::PivotPair),
        Check::BlockPinvViaF => {
            dims.p = dims.s;
            (&Inclusion::A_SIDE, Strategy::ASide)
        }
        Check::BlockPinvViaG => {
            dims.n = dims.m;
            (&Inclusion::D_SIDE, Strategy::DSide)
        }
        Check::BlockPinvMixed | Check::QuotientIdentities => {
            // alternate the invertible route and the singular block-diagonal one
            if rng.random_bool(0.5) {
                dims.n = dims.m;
                dims.p = dims.s;
                (&Inclusion::ALL, Strategy::Nonsingular)
            } else {
                (&Inclusion::ALL, Strategy::BlockDiagonal)
            }
        }
        Check::PenroseCertificate => unreachable!("plain matrix check"),
    };
    let spec = GenSpec::new(dims, require, seed).with_strategy(strategy);
    gen_block(&spec, tol)
}

/// Runs one trial of `check`, fully determined by `trial_seed`.
pub fn run_check<T: Scalar>(check: Check, trial_seed: u64, tol: &Tolerances) -> CheckOutcome {
    match run_check_inner::<T>(check, trial_seed, tol) {
        Ok(outcome) => outcome,
        Err(e) => CheckOutcome::failed(e.to_string()),
    }
}

fn run_check_inner<T: Scalar>(check: Check, trial_seed: u64, tol: &Tolerances) -> Result<CheckOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    if check == Check::PenroseCertificate {
        let rows = rng.random_range(1..=MAX_PLAIN);
        let cols = rng.random_range(1..=MAX_PLAIN);
        let rank = rng.random_range(1..=rows.min(cols));
        let m = gen_matrix::<T>(rows, cols, rank, rng.random(), MAX_CONDITION, tol)?;
        let cert = certificate(&m, &T::pinv(&m, tol), tol)?;
        return Ok(CheckOutcome::new(cert.holds(), cert.max_residual()));
    }
    let gen_seed = rng.random();
    let mb = instance::<T>(check, &mut rng, gen_seed, tol)?;
    let (m, n, s, p) = mb.dims();
    let outcome = match check {
        Check::PenroseCertificate => unreachable!(),
        Check::OneInverseInvariance => {
            let probe = invariance_probe(&mb, PROBE_SAMPLES, rng.random(), tol)?;
            let f = pseudo_schur(&mb, tol).value;
            let agrees = probe.values.iter().all(|v| v.approx_eq(&f, tol.eq));
            CheckOutcome::new(probe.invariant && agrees, probe.spread)
        }
        Check::ExchangeForward => {
            let x1 = random_vec::<T>(&mut rng, n);
            let x2 = random_vec::<T>(&mut rng, p);
            let ex = exchange_forward(&mb, &x1, &x2, tol)?;
            CheckOutcome::new(ex.verified, ex.residual)
        }
        Check::ExchangeBackward => {
            let y1 = random_vec::<T>(&mut rng, m);
            let x2 = random_vec::<T>(&mut rng, p);
            let h = pppt(&mb, tol);
            let y2 = h.whole().mul_vec(&[y1.clone(), x2.clone()].concat())?[n..].to_vec();
            debug_assert_eq!(y2.len(), s);
            let ex = exchange_backward(&mb, &y1, &x2, &y2, tol)?;
            CheckOutcome::new(ex.verified, ex.residual)
        }
        Check::ExchangeForwardComplementary => {
            let x1 = random_vec::<T>(&mut rng, n);
            let x2 = random_vec::<T>(&mut rng, p);
            let ex = exchange_forward_complementary(&mb, &x1, &x2, tol)?;
            CheckOutcome::new(ex.verified, ex.residual)
        }
        Check::ExchangeBackwardComplementary => {
            let x1 = random_vec::<T>(&mut rng, n);
            let y2 = random_vec::<T>(&mut rng, s);
            let j = crate::block::cpppt(&mb, tol);
            let y1 = j.whole().mul_vec(&[x1.clone(), y2.clone()].concat())?[..m].to_vec();
            let ex = exchange_backward_complementary(&mb, &x1, &y2, &y1, tol)?;
            CheckOutcome::new(ex.verified, ex.residual)
        }
        Check::PpptInvolution => {
            let twice = pppt(&pppt(&mb, tol), tol);
            CheckOutcome::new(
                twice.whole().approx_eq(mb.whole(), tol.eq),
                rel(twice.whole(), mb.whole()),
            )
        }
        Check::PivotPairInverse => {
            let cmp = pppt_pinv_vs_cpppt(&mb, tol);
            let residual = rel(&cmp.h_pinv, &cmp.j).max(cmp.jh_residual).max(cmp.hj_residual);
            CheckOutcome::new(
                cmp.sound && cmp.equal && cmp.diagonal_forms && cmp.reflexive(tol.eq),
                residual,
            )
        }
        Check::BlockPinvViaF => {
            let res = block_pinv(&mb, Formula::ViaF, tol);
            let products = via_f_products(&mb, tol);
            let (pass, residual) = against_oracle(&mb, &res, tol);
            CheckOutcome::new(pass && products.holds, residual)
        }
        Check::BlockPinvViaG => {
            let res = block_pinv(&mb, Formula::ViaG, tol);
            let (pass, residual) = against_oracle(&mb, &res, tol);
            CheckOutcome::new(pass, residual)
        }
        Check::BlockPinvMixed => {
            let mixed = block_pinv(&mb, Formula::Mixed, tol);
            let (pass, residual) = against_oracle(&mb, &mixed, tol);
            let via_f = block_pinv(&mb, Formula::ViaF, tol).value;
            let via_g = block_pinv(&mb, Formula::ViaG, tol).value;
            let agree = mixed.value.approx_eq(&via_f, tol.eq) && mixed.value.approx_eq(&via_g, tol.eq);
            CheckOutcome::new(pass && agree, residual)
        }
        Check::QuotientIdentities => {
            let q = quotient_identities(&mb, tol);
            CheckOutcome::new(
                q.holds && q.violated.is_empty(),
                q.g_identity_residual.max(q.f_identity_residual),
            )
        }
    };
    Ok(outcome)
}

/// Soundness, Penrose certificate and agreement with `pinv(M)`.
fn against_oracle<T: Scalar>(mb: &BlockMatrix<T>, res: &BlockPinvResult<T>, tol: &Tolerances) -> (bool, f64) {
    let oracle = T::pinv(mb.whole(), tol);
    let pass = res.sound && res.certificate.holds() && res.value.approx_eq(&oracle, tol.eq);
    (pass, rel(&res.value, &oracle))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckStats {
    pub check: Check,
    pub trials: usize,
    pub passes: usize,
    pub failures: usize,
    pub worst_residual: f64,
    /// Trial seeds of failures; `run_check` with the same seed reproduces
    /// each one.
    pub failing_seeds: Vec<u64>,
    /// First failure message, if any.
    pub first_note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixtureOutcome {
    pub name: &'static str,
    pub expectation: &'static str,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    pub backend: Backend,
    pub tolerances: Tolerances,
    pub seed: u64,
    pub trials: usize,
    pub checks: Vec<CheckStats>,
    pub fixtures: Vec<FixtureOutcome>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.failures == 0) && self.fixtures.iter().all(|f| f.pass)
    }

    pub fn check(&self, check: Check) -> Option<&CheckStats> {
        self.checks.iter().find(|c| c.check == check)
    }
}

impl fmt::Display for VerifyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "backend={} trials={} seed={} eq_tol={:e} incl_tol={:e} cert_tol={:e}",
            self.backend, self.trials, self.seed, self.tolerances.eq, self.tolerances.incl, self.tolerances.cert
        )?;
        for fx in &self.fixtures {
            writeln!(
                f,
                "[{}] fixture {:<18} {} ({})",
                if fx.pass { "PASS" } else { "FAIL" },
                fx.name,
                fx.expectation,
                fx.detail
            )?;
        }
        for c in &self.checks {
            write!(
                f,
                "[{}] {:<32} {}/{} worst={:.3e}",
                if c.failures == 0 { "PASS" } else { "FAIL" },
                c.check.name(),
                c.passes,
                c.trials,
                c.worst_residual
            )?;
            if !c.failing_seeds.is_empty() {
                let shown: Vec<String> = c.failing_seeds.iter().take(5).map(u64::to_string).collect();
                write!(f, " failing seeds: {}", shown.join(", "))?;
            }
            writeln!(f)?;
        }
        write!(f, "{}", if self.all_passed() { "all checks passed" } else { "FAILURES" })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub trials: usize,
    pub seed: u64,
    pub tol: Tolerances,
    pub checks: &'static [Check],
}

impl VerifyConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        Self {
            trials,
            seed,
            tol: Tolerances::default(),
            checks: &Check::ALL,
        }
    }
}

/// Runs `trials` rounds of every check plus the fixtures. Trials run in
/// parallel; results are merged in trial order, so the report depends only
/// on the configuration.
pub fn verify_all<T: Scalar>(cfg: &VerifyConfig) -> VerifyReport {
    let checks = cfg
        .checks
        .iter()
        .map(|&check| run_many::<T>(check, cfg.trials, cfg.seed, &cfg.tol))
        .collect();
    VerifyReport {
        backend: T::BACKEND,
        tolerances: cfg.tol,
        seed: cfg.seed,
        trials: cfg.trials,
        checks,
        fixtures: fixture_outcomes::<T>(&cfg.tol),
    }
}

pub fn trial_seed(base: u64, check: Check, index: usize) -> u64 {
    derive_seed(base, check.stream(), index as u64)
}

pub fn run_many<T: Scalar>(check: Check, trials: usize, seed: u64, tol: &Tolerances) -> CheckStats {
    let outcomes: Vec<(u64, CheckOutcome)> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let s = trial_seed(seed, check, i);
            (s, run_check::<T>(check, s, tol))
        })
        .collect();
    let mut stats = CheckStats {
        check,
        trials,
        passes: 0,
        failures: 0,
        worst_residual: 0.0,
        failing_seeds: Vec::new(),
        first_note: None,
    };
    for (s, o) in outcomes {
        if o.pass {
            stats.passes += 1;
        } else {
            stats.failures += 1;
            stats.failing_seeds.push(s);
            if stats.first_note.is_none() {
                stats.first_note = o.note.clone();
            }
        }
        if o.residual.is_nan() || o.residual > stats.worst_residual {
            stats.worst_residual = o.residual;
        }
    }
    stats
}

fn fixture_close<T: Scalar>(x: &Matrix<T>, expected: &Matrix<crate::scalar::Rational>) -> bool {
    let reference = expected.map(from_rational::<T>);
    if T::EXACT {
        *x == reference
    } else {
        x.shape() == reference.shape() && (x - &reference).max_abs() <= FIXTURE_TOL
    }
}

/// Entrywise agreement demanded of float fixtures.
pub const FIXTURE_TOL: f64 = 1e-12;

fn from_rational<T: Scalar>(v: &crate::scalar::Rational) -> T {
    use num_traits::ToPrimitive;
    let num = v.numer().to_i64().expect("fixture numerator fits i64");
    let den = v.denom().to_i64().expect("fixture denominator fits i64");
    T::from_i64(num) / T::from_i64(den)
}

pub fn fixture_outcomes<T: Scalar>(tol: &Tolerances) -> Vec<FixtureOutcome> {
    let mut out = Vec::new();

    let ex1 = fixtures::example1::<T>();
    let cmp = pppt_pinv_vs_cpppt(&ex1, tol);
    let report = condition_report(&ex1, tol);
    let h_ok = fixture_close(&cmp.h, &fixtures::example1_h());
    let j_ok = fixture_close(&cmp.j, &fixtures::example1_j());
    let hp_ok = fixture_close(&cmp.h_pinv, &fixtures::example1_h_pinv());
    out.push(FixtureOutcome {
        name: "example1",
        expectation: "H, J, pinv(H) reproduced and pinv(H) != J",
        pass: h_ok && j_ok && hp_ok && !cmp.equal && !report.holds(Inclusion::CInD),
        detail: format!(
            "H {} J {} pinv(H) {} |pinv(H)-J|={:.3e} incl_C_D={}",
            h_ok,
            j_ok,
            hp_ok,
            cmp.residual,
            report.holds(Inclusion::CInD)
        ),
    });

    let ex2 = fixtures::example2::<T>();
    let res = block_pinv(&ex2, Formula::ViaF, tol);
    let formula_ok = fixture_close(&res.value, &fixtures::example2_pinv());
    let oracle_ok = fixture_close(&T::pinv(ex2.whole(), tol), &fixtures::example2_pinv());
    out.push(FixtureOutcome {
        name: "example2",
        expectation: "via-F inverse equals the worked inverse and pinv(M)",
        pass: res.sound && res.certificate.holds() && formula_ok && oracle_ok,
        detail: format!(
            "sound {} formula {} oracle {} certificate {:.3e}",
            res.sound,
            formula_ok,
            oracle_ok,
            res.certificate.max_residual()
        ),
    });

    let invariant = invariance_probe(&ex1, 50, 0, tol).expect("50 samples");
    out.push(FixtureOutcome {
        name: "example1_invariance",
        expectation: "D - CXB identical over 50 {1}-inverses",
        pass: invariant.invariant && invariant.spread <= 1e-10,
        detail: format!("spread={:.3e}", invariant.spread),
    });

    let violator = invariance_probe(&fixtures::carlson_violator::<T>(), 50, 0, tol).expect("50 samples");
    out.push(FixtureOutcome {
        name: "carlson_violator",
        expectation: "D - CXB varies with the {1}-inverse",
        pass: !violator.invariant && violator.spread > 0.1,
        detail: format!("spread={:.3e}", violator.spread),
    });
    out
}

/// Searches A-range instances, whose `D` is unconstrained, for one with
/// `pinv(H) != J`. Returns the generator seed of the first hit.
pub fn find_pivot_counterexample<T: Scalar>(trials: usize, seed: u64, tol: &Tolerances) -> Option<u64> {
    (0..trials).find_map(|i| {
        let s = derive_seed(seed, 1000, i as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let spec = GenSpec::new(random_dims(&mut rng), &Inclusion::A_RANGE, s).with_strategy(Strategy::ARange);
        let mb = gen_block::<T>(&spec, tol).ok()?;
        (!pppt_pinv_vs_cpppt(&mb, tol).equal).then_some(s)
    })
}
