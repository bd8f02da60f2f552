mod common;

use blockpinv_core::fixtures::{carlson_violator, example1};
use blockpinv_core::harness::{
    find_pivot_counterexample, gen_block, gen_block_detailed, invariance_probe, verify_all, Dims, GenSpec, Strategy,
    VerifyConfig,
};
use blockpinv_core::{
    block_pinv, certificate, condition_report, cpppt, exchange_backward, exchange_backward_complementary,
    exchange_forward, exchange_forward_complementary, pinv, pppt, pppt_pinv_vs_cpppt, pseudo_schur,
    complementary_pseudo_schur, quotient_identities, via_f_products, BlockMatrix, Formula, Inclusion, Matrix,
    Rational, Scalar, Tolerances,
};
use common::{gauss_jordan_inverse, greville, rel_frob};
use proptest::prelude::*;
use proptest::strategy::Strategy as _;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn instance<T: Scalar>(dims: Dims, require: &[Inclusion], strategy: Strategy, seed: u64) -> BlockMatrix<T> {
    gen_block(&GenSpec::new(dims, require, seed).with_strategy(strategy), &tol()).unwrap()
}

fn dims() -> impl proptest::strategy::Strategy<Value = Dims> {
    (1usize..=4, 1usize..=4, 1usize..=4, 1usize..=4).prop_map(|(m, n, s, p)| Dims::new(m, n, s, p))
}

fn vector<T: Scalar>(len: usize, seed: u64) -> Vec<T> {
    (0..len as i64).map(|i| T::from_i64((seed as i64).wrapping_add(7 * i).rem_euclid(9) - 4)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_shapes(d in dims(), seed in any::<u64>()) {
        // unstructured blocks: shapes do not depend on any hypothesis
        let mb = instance::<f64>(d, &[], Strategy::BlockDiagonal, seed);
        let whole = &mb.whole().map(|x| x + 1.0);
        let mb = BlockMatrix::new(whole.clone(), d.m, d.n).unwrap();
        let h = pppt(&mb, &tol());
        prop_assert_eq!(h.whole().shape(), (d.n + d.s, d.m + d.p));
        prop_assert_eq!((h.row_split(), h.col_split()), (d.n, d.m));
        let j = cpppt(&mb, &tol());
        prop_assert_eq!(j.whole().shape(), (d.m + d.p, d.n + d.s));
        prop_assert_eq!((j.row_split(), j.col_split()), (d.m, d.n));
    }

    #[test]
    fn pppt_involution(d in dims(), seed in any::<u64>()) {
        let mb = instance::<Rational>(d, &Inclusion::A_RANGE, Strategy::ARange, seed);
        prop_assert_eq!(pppt(&pppt(&mb, &tol()), &tol()), mb);
        let mf = instance::<f64>(d, &Inclusion::A_RANGE, Strategy::ARange, seed);
        let twice = pppt(&pppt(&mf, &tol()), &tol());
        prop_assert!(twice.whole().approx_eq(mf.whole(), tol().eq));
    }

    #[test]
    fn schur_matches_classical_complement(n in 1usize..=4, s in 1usize..=4, seed in any::<u64>()) {
        let mb = instance::<Rational>(Dims::new(n, n, s, s), &Inclusion::ALL, Strategy::Nonsingular, seed);
        let b = mb.blocks();
        let a_inv = gauss_jordan_inverse(&b.a).unwrap();
        let d_inv = gauss_jordan_inverse(&b.d).unwrap();
        prop_assert_eq!(pseudo_schur(&mb, &tol()).value, &b.d - &(&(&b.c * &a_inv) * &b.b));
        prop_assert_eq!(complementary_pseudo_schur(&mb, &tol()).value, &b.a - &(&(&b.b * &d_inv) * &b.c));
        // the whole matrix is invertible too: every formula is its inverse
        let m_inv = gauss_jordan_inverse(mb.whole()).unwrap();
        for f in [Formula::ViaF, Formula::ViaG, Formula::Mixed] {
            prop_assert_eq!(&block_pinv(&mb, f, &tol()).value, &m_inv);
        }
        let mf = instance::<f64>(Dims::new(n, n, s, s), &Inclusion::ALL, Strategy::Nonsingular, seed);
        let fb = mf.blocks();
        let classical = &fb.d - &(&(&fb.c * &pinv(&fb.a)) * &fb.b);
        prop_assert!(pseudo_schur(&mf, &tol()).value.approx_eq(&classical, tol().eq));
    }

    #[test]
    fn schur_is_independent_of_one_inverse(d in dims(), seed in any::<u64>()) {
        let mb = instance::<Rational>(d, &Inclusion::A_RANGE, Strategy::ARange, seed);
        let probe = invariance_probe(&mb, 50, seed, &tol()).unwrap();
        prop_assert!(probe.invariant);
        prop_assert_eq!(probe.spread, 0.0);
        let f = pseudo_schur(&mb, &tol()).value;
        prop_assert!(probe.values.iter().all(|v| *v == f));
        let mf = instance::<f64>(d, &Inclusion::A_RANGE, Strategy::ARange, seed);
        let probe = invariance_probe(&mf, 50, seed, &tol()).unwrap();
        prop_assert!(probe.invariant, "spread {:e}", probe.spread);
    }

    #[test]
    fn via_f_is_the_pseudoinverse(d in dims(), seed in any::<u64>()) {
        let d = Dims { p: d.s, ..d };
        let mb = instance::<Rational>(d, &Inclusion::A_SIDE, Strategy::ASide, seed);
        let res = block_pinv(&mb, Formula::ViaF, &tol());
        prop_assert!(res.sound);
        prop_assert_eq!(&res.value, &greville(mb.whole()));
        prop_assert_eq!(res.certificate.max_residual(), 0.0);
        prop_assert!(via_f_products(&mb, &tol()).holds);

        let mf = instance::<f64>(d, &Inclusion::A_SIDE, Strategy::ASide, seed);
        let res = block_pinv(&mf, Formula::ViaF, &tol());
        prop_assert!(res.sound && res.certificate.holds());
        prop_assert!(rel_frob(&res.value, &pinv(mf.whole())) <= tol().eq);
        prop_assert!(via_f_products(&mf, &tol()).holds);
    }

    #[test]
    fn via_f_rectangular_schur(d in dims(), seed in any::<u64>()) {
        let mut spec = GenSpec::new(d, &Inclusion::A_SIDE, seed).with_strategy(Strategy::ASide);
        spec.rectangular_schur = true;
        let mb = gen_block::<Rational>(&spec, &tol()).unwrap();
        let res = block_pinv(&mb, Formula::ViaF, &tol());
        prop_assert!(res.sound);
        prop_assert_eq!(&res.value, &greville(mb.whole()));
    }

    #[test]
    fn via_g_is_the_pseudoinverse(d in dims(), seed in any::<u64>()) {
        let d = Dims { n: d.m, ..d };
        let mb = instance::<Rational>(d, &Inclusion::D_SIDE, Strategy::DSide, seed);
        let res = block_pinv(&mb, Formula::ViaG, &tol());
        prop_assert!(res.sound);
        prop_assert_eq!(&res.value, &greville(mb.whole()));
        let mf = instance::<f64>(d, &Inclusion::D_SIDE, Strategy::DSide, seed);
        let res = block_pinv(&mf, Formula::ViaG, &tol());
        prop_assert!(res.sound && res.certificate.holds());
        prop_assert!(rel_frob(&res.value, &pinv(mf.whole())) <= tol().eq);
    }

    #[test]
    fn mixed_and_quotients_on_all_eight(d in dims(), seed in any::<u64>()) {
        let mb = instance::<Rational>(d, &Inclusion::ALL, Strategy::BlockDiagonal, seed);
        let oracle = greville(mb.whole());
        for f in [Formula::ViaF, Formula::ViaG, Formula::Mixed] {
            let res = block_pinv(&mb, f, &tol());
            prop_assert!(res.sound);
            prop_assert_eq!(&res.value, &oracle);
        }
        let q = quotient_identities(&mb, &tol());
        prop_assert!(q.holds);
        prop_assert_eq!((q.g_identity_residual, q.f_identity_residual), (0.0, 0.0));
    }

    #[test]
    fn pivot_pair_inverse(d in dims(), seed in any::<u64>()) {
        let mb = instance::<Rational>(d, &Inclusion::PIVOT_PAIR, Strategy::PivotPair, seed);
        let cmp = pppt_pinv_vs_cpppt(&mb, &tol());
        prop_assert!(cmp.sound && cmp.equal && cmp.diagonal_forms && cmp.reflexive(0.0));
        prop_assert_eq!(&cmp.h_pinv, &greville(&cmp.h));
        prop_assert_eq!(&cmp.j, &cmp.h_pinv);
        let mf = instance::<f64>(d, &Inclusion::PIVOT_PAIR, Strategy::PivotPair, seed);
        let cmp = pppt_pinv_vs_cpppt(&mf, &tol());
        prop_assert!(cmp.equal && cmp.diagonal_forms && cmp.reflexive(tol().eq));
    }

    #[test]
    fn exchange_identities(d in dims(), seed in any::<u64>()) {
        let (m, n, s, p) = (d.m, d.n, d.s, d.p);
        let mb = instance::<Rational>(d, &Inclusion::A_RANGE, Strategy::ARange, seed);
        let fwd = exchange_forward(&mb, &vector(n, seed), &vector(p, seed ^ 1), &tol()).unwrap();
        prop_assert!(fwd.premise && fwd.conclusion && fwd.verified);
        let back = exchange_backward(&mb, &fwd.y1, &fwd.x2, &fwd.y2, &tol()).unwrap();
        prop_assert!(back.verified);
        // the recovered x1 differs from the original by a null vector of A
        let a = mb.blocks().a;
        let ax = a.mul_vec(&back.x1).unwrap();
        prop_assert_eq!(ax, a.mul_vec(&fwd.x1).unwrap());

        let mb = instance::<Rational>(d, &Inclusion::D_RANGE, Strategy::DRange, seed);
        let fwd = exchange_forward_complementary(&mb, &vector(n, seed), &vector(p, seed ^ 2), &tol()).unwrap();
        prop_assert!(fwd.verified);
        let back = exchange_backward_complementary(&mb, &fwd.x1, &fwd.y2, &fwd.y1, &tol()).unwrap();
        prop_assert!(back.verified);
        prop_assert_eq!((fwd.y1.len(), fwd.y2.len()), (m, s));
    }

    #[test]
    fn generated_instances_meet_their_requirements(d in dims(), seed in any::<u64>(), pick in 0usize..6) {
        let (set, strategy, dims): (&[Inclusion], Strategy, Dims) = match pick {
            0 => (&Inclusion::A_RANGE, Strategy::ARange, d),
            1 => (&Inclusion::D_RANGE, Strategy::DRange, d),
            2 => (&Inclusion::A_SIDE, Strategy::ASide, Dims { p: d.s, ..d }),
            3 => (&Inclusion::D_SIDE, Strategy::DSide, Dims { n: d.m, ..d }),
            4 => (&Inclusion::PIVOT_PAIR, Strategy::PivotPair, d),
            _ => (&Inclusion::ALL, Strategy::BlockDiagonal, d),
        };
        let mb = instance::<Rational>(dims, set, strategy, seed);
        prop_assert!(condition_report(&mb, &tol()).holds_all(set));
        prop_assert_eq!(mb.dims(), (dims.m, dims.n, dims.s, dims.p));
        let mf = instance::<f64>(dims, set, strategy, seed);
        prop_assert!(condition_report(&mf, &tol()).holds_all(set));
    }
}

#[test]
fn example_one_fixtures() {
    let mb = example1::<Rational>();
    assert_eq!(pppt(&pppt(&mb, &tol()), &tol()), mb);
    let probe = invariance_probe(&mb, 50, 3, &tol()).unwrap();
    assert!(probe.invariant);
    let cmp = pppt_pinv_vs_cpppt(&mb, &tol());
    assert!(!cmp.equal, "the D-side inclusions are needed");
    let report = condition_report(&mb, &tol());
    assert!(report.holds_all(&Inclusion::A_RANGE));
    assert!(!report.holds(Inclusion::CInD));
}

#[test]
fn one_inverse_dependence_without_range_inclusion() {
    let probe = invariance_probe(&carlson_violator::<Rational>(), 50, 0, &tol()).unwrap();
    assert!(!probe.invariant);
    assert!(probe.spread > 0.1);
    // D - C X B = -X[0][1] for this fixture
    for (w, v) in probe.weights.iter().zip(&probe.values) {
        let a_pinv = pinv(&carlson_violator::<Rational>().blocks().a);
        let a = carlson_violator::<Rational>().blocks().a;
        let x = &(&a_pinv + w) - &(&(&(&a_pinv * &a) * w) * &(&a * &a_pinv));
        assert_eq!(v.get(0, 0), &-x.get(0, 1).clone());
    }
    assert!(invariance_probe(&carlson_violator::<f64>(), 2, 0, &tol()).unwrap().spread > 0.1);
}

#[test]
fn dropping_d_side_inclusions_breaks_pivot_inverse() {
    assert!(find_pivot_counterexample::<f64>(200, 0, &tol()).is_some());
    assert!(find_pivot_counterexample::<Rational>(200, 0, &tol()).is_some());
}

#[test]
fn generation_is_deterministic() {
    for strategy in [Strategy::ASide, Strategy::BlockDiagonal, Strategy::PivotPair, Strategy::Nonsingular] {
        let spec = GenSpec::new(Dims::new(3, 3, 2, 2), &[], 99).with_strategy(strategy);
        let a = gen_block_detailed::<f64>(&spec, &tol()).unwrap();
        let b = gen_block_detailed::<f64>(&spec, &tol()).unwrap();
        assert_eq!(a.block, b.block);
        assert_eq!(a.rejects, b.rejects);
        let a = gen_block::<Rational>(&spec, &tol()).unwrap();
        assert_eq!(a, gen_block::<Rational>(&spec, &tol()).unwrap());
    }
    let cfg = VerifyConfig::new(3, 5);
    let a = serde_json::to_string(&verify_all::<Rational>(&cfg)).unwrap();
    let b = serde_json::to_string(&verify_all::<Rational>(&cfg)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn certificates_reject_wrong_inverses() {
    let m = Matrix::<Rational>::from_i64(&[&[1, 2], &[2, 4]]);
    let wrong = Matrix::from_i64(&[&[1, 0], &[0, 0]]);
    assert!(!certificate(&m, &wrong, &tol()).unwrap().holds());
    assert!(certificate(&m, &greville(&m), &tol()).unwrap().holds());
}
