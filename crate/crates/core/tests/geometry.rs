use num_bigint::BigInt;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;

use tansec::ffield::{rank_mod_p, rank_rational};
use tansec::geometry::{
    c, classify, expected_dim_secant, expected_dim_w, generic_chow_waring_rank_d_minus_1_1, known_exception, s1, s2, s_i, t,
    tangent_columns, w_first_term, w_formula, LinearForm, PointConstraint,
};
use tansec::monomials::{dim_sd, expand_product, monomials};
use tansec::{AbundanceClass, Error, FieldModulus, RationalMatrix, Statement, TangentPoint};

fn p() -> FieldModulus {
    FieldModulus::new(8191).unwrap()
}

fn random_point(n: usize, hole: std::ops::Range<usize>, constraint: PointConstraint, b: usize, rng: &mut Xoshiro256PlusPlus) -> TangentPoint {
    loop {
        let mut draw = || -> Vec<u32> { (0..=n).map(|i| if hole.contains(&i) { 0 } else { rng.gen_range(0..8191) }).collect() };
        let (l, m) = (draw(), draw());
        let built = TangentPoint::new(LinearForm::new(l, p()).unwrap(), LinearForm::new(m, p()).unwrap(), constraint, n, b, p());
        if let Ok(pt) = built {
            return pt;
        }
    }
}

#[test]
fn statement_validation() {
    assert!(Statement::cubic(7, 8, [0; 3]).is_ok());
    assert!(Statement::cubic(0, 1, [0; 3]).is_err());
    assert!(Statement::cubic(7, 0, [0; 3]).is_err());
    assert!(Statement::new(7, 1, 3, [0; 3], 24).is_err());
    assert!(Statement::new(7, 7, 3, [0; 3], 24).is_err());
    assert!(Statement::new(7, 4, 3, [1, 0, 0], 2).is_err());
    assert!(Statement::new(7, 3, 3, [1, 0, 0], 0).is_err());
    assert!(Statement::cubic(70, 0, [96, 96, 96]).is_err());
    assert!(Statement::cubic(71, 0, [96, 96, 96]).is_ok());
    assert!(Statement::cubic(46, 96, [1, 1, 0]).is_err());
    assert!(Statement::cubic(47, 96, [1, 1, 0]).is_ok());
    assert!(Statement::new(1, 3, 0, [1, 0, 0], 1).is_err());
    assert!(Statement::cubic(23, 0, [1, 0, 0]).is_err());
    assert!(Statement::cubic(25, 0, [1, 0, 0]).is_ok());
}

#[test]
fn statement_display_and_serde() {
    let st = Statement::cubic(79, 96, [183, 183, 0]).unwrap();
    assert_eq!(st.to_string(), "T(79, 96; 183, 183, 0)");
    assert_eq!(Statement::secant(5, 4, 3).unwrap().to_string(), "T(5, 3; 0, 0, 0) [d=4]");
    assert_eq!(Statement::new(10, 3, 1, [2, 0, 0], 3).unwrap().to_string(), "T(10, 1; 2, 0, 0) [b=3]");
    let json = serde_json::to_string(&st).unwrap();
    assert_eq!(serde_json::from_str::<Statement>(&json).unwrap(), st);
}

#[test]
fn expected_dimension_examples() {
    assert_eq!(expected_dim_secant(7, 3, 8), 120);
    assert_eq!(expected_dim_secant(7, 3, 100), 120);
    assert_eq!(expected_dim_secant(2, 3, 2), 10);
    let st = Statement::cubic(79, 96, [183, 183, 0]).unwrap();
    assert_eq!(st.base_dim(), 55728);
    assert_eq!(2 * 24 * 366, 17568);
    assert_eq!(96 * 159, 15264);
    assert_eq!(expected_dim_w(&st), 88560);
    assert_eq!(w_first_term(79, 3, 96, [183, 183, 0], 24), 88560);
    assert_eq!(classify(&st), AbundanceClass::Equiabundant);
    assert_eq!(classify(&Statement::cubic(7, 8, [0; 3]).unwrap()), AbundanceClass::Equiabundant);
    assert_eq!(classify(&Statement::cubic(71, 0, [96, 96, 96]).unwrap()), AbundanceClass::Equiabundant);
    assert_eq!(classify(&Statement::cubic(7, 7, [0; 3]).unwrap()), AbundanceClass::Subabundant);
    assert_eq!(classify(&Statement::cubic(7, 9, [0; 3]).unwrap()), AbundanceClass::Superabundant);
}

#[test]
fn thresholds_are_floor_and_ceiling() {
    for n in 8..=2000 {
        let big = dim_sd(n, 3);
        let q = 2 * n + 1;
        assert_ne!(big % q, 0, "N({n}) divisible by 2n+1");
        assert_eq!(s1(n).unwrap(), big / q, "n = {n}");
        assert_eq!(s2(n).unwrap(), big.div_ceil(q), "n = {n}");
        assert_eq!(classify(&Statement::cubic(n, s1(n).unwrap(), [0; 3]).unwrap()), AbundanceClass::Subabundant);
        assert_eq!(classify(&Statement::cubic(n, s2(n).unwrap(), [0; 3]).unwrap()), AbundanceClass::Superabundant);
    }
}

#[test]
fn sequence_domains() {
    assert!(matches!(s1(7), Err(Error::FormulaDomain { min: 8, .. })));
    assert!(matches!(s2(7), Err(Error::FormulaDomain { min: 8, .. })));
    assert!(matches!(t(31), Err(Error::FormulaDomain { min: 32, .. })));
    assert!(matches!(c(31), Err(Error::FormulaDomain { min: 32, .. })));
    assert!(s_i(3, 10).is_err());
    assert_eq!(t(79 - 24).unwrap(), 183);
    assert_eq!(t(32).unwrap(), 91);
}

#[test]
fn t_is_the_step_of_both_sequences() {
    for n in 32..=500 {
        for i in [1, 2] {
            assert_eq!(s_i(i, n).unwrap() - s_i(i, n - 24).unwrap(), t(n).unwrap());
        }
    }
}

#[test]
fn specialized_statements_are_equiabundant() {
    for n in 71..=500 {
        assert_eq!(classify(&Statement::cubic(n, 0, [96, 96, 96]).unwrap()), AbundanceClass::Equiabundant, "n = {n}");
    }
    // t(n - 24) is outside the domain of `t` for n < 56; use its closed form there.
    for n in 48..=500 {
        let tp = 4 * (n - 24) - 37;
        if n >= 56 {
            assert_eq!(t(n - 24).unwrap(), tp);
        }
        let st = Statement::cubic(n, 96, [tp, tp, 0]).unwrap();
        assert_eq!(classify(&st), AbundanceClass::Equiabundant, "n = {n}");
    }
}

#[test]
fn codimension_is_periodic() {
    for n in 32..=476 {
        assert_eq!(c(n + 24).unwrap(), c(n).unwrap(), "n = {n}");
    }
    for n in 32..=500 {
        let gap = dim_sd(n, 3) as i64 - w_first_term(n, 3, t(n).unwrap(), [s1(n - 24).unwrap(), 0, 0], 24);
        assert_eq!(gap, c(n).unwrap() as i64, "n = {n}");
    }
}

#[test]
fn exception_table() {
    for (n, d, s) in [(2, 3, 2), (3, 3, 3), (4, 3, 4), (5, 2, 2), (6, 2, 2), (7, 2, 3), (4, 2, 1)] {
        assert!(known_exception(n, d, s), "({n}, {d}, {s})");
    }
    for (n, d, s) in [(5, 3, 5), (7, 3, 8), (4, 2, 2), (5, 2, 3), (3, 2, 0), (4, 4, 4)] {
        assert!(!known_exception(n, d, s), "({n}, {d}, {s})");
    }
    assert_eq!(generic_chow_waring_rank_d_minus_1_1(7, 3), 8);
    assert_eq!(generic_chow_waring_rank_d_minus_1_1(2, 3), 3);
    assert_eq!(generic_chow_waring_rank_d_minus_1_1(10, 3), s2(10).unwrap());
}

#[test]
fn free_point_block_shape() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(1);
    let pt = random_point(7, 0..0, PointConstraint::Free, 24, &mut rng);
    let cols = tangent_columns(&pt, 7, 3, 24, p()).unwrap();
    assert_eq!(cols.shape(), (120, 16));
}

#[test]
fn constrained_point_block_shape() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(2);
    let pt = random_point(79, 24..48, PointConstraint::Block(2), 24, &mut rng);
    let cols = tangent_columns(&pt, 79, 3, 24, p()).unwrap();
    assert_eq!(cols.shape(), (88560, 48));
    assert_eq!(rank_mod_p(&cols), 48);
}

#[test]
fn degenerate_points() {
    let mut x0 = vec![0u32; 8];
    x0[0] = 1;
    let l = LinearForm::new(x0.clone(), p()).unwrap();
    let twice = LinearForm::new(x0.iter().map(|v| v * 2).collect(), p()).unwrap();
    assert_eq!(
        TangentPoint::new(l.clone(), l.clone(), PointConstraint::Free, 7, 24, p()),
        Err(Error::DegeneratePoint)
    );
    assert_eq!(TangentPoint::new(l, twice, PointConstraint::Free, 7, 24, p()), Err(Error::DegeneratePoint));
    assert!(LinearForm::new(vec![8191], p()).is_err());
}

#[test]
fn tangent_columns_are_products_of_forms() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(9);
    let n = 5;
    for d in 2..=6 {
        let pt = random_point(n, 0..0, PointConstraint::Free, 24, &mut rng);
        let cols = tangent_columns(&pt, n, d, 24, p()).unwrap();
        for tv in 0..=n {
            let mut x = vec![0u32; n + 1];
            x[tv] = 1;
            let (l, m) = (pt.l().coeffs(), pt.m().coeffs());
            let mut a: Vec<&[u32]> = vec![l; d - 1];
            a.push(&x);
            let mut b: Vec<&[u32]> = vec![l; d - 2];
            b.push(m);
            b.push(&x);
            assert_eq!(cols.column(tv), expand_product(&a, n, p()).unwrap());
            assert_eq!(cols.column(n + 1 + tv), expand_product(&b, n, p()).unwrap());
        }
    }
}

/// The span of `l^{d-1} U + l^{d-2} m U` has dimension `2n + 1`.
#[test]
fn tangent_space_dimension() {
    let mut rng = Xoshiro256PlusPlus::seed_from_u64(4);
    for n in 1..=10 {
        for d in 2..=4 {
            let pt = random_point(n, 0..0, PointConstraint::Free, 24, &mut rng);
            assert_eq!(rank_mod_p(&tangent_columns(&pt, n, d, 24, p()).unwrap()), 2 * n + 1, "n={n} d={d}");
        }
    }
}

/// An integer tangent block has the same rank over Q and over F_p.
#[test]
fn small_tangent_block_matches_rational_rank() {
    let n = 4;
    let l = [1u32, 2, 0, 3, 1];
    let m = [0u32, 1, 1, 1, 5];
    let pt = TangentPoint::new(
        LinearForm::new(l.to_vec(), p()).unwrap(),
        LinearForm::new(m.to_vec(), p()).unwrap(),
        PointConstraint::Free,
        n,
        24,
        p(),
    )
    .unwrap();
    let cols = tangent_columns(&pt, n, 3, 24, p()).unwrap();
    let q: RationalMatrix = tansec::ffield::IntegerMatrix::from_fn(cols.rows(), cols.cols(), |i, j| BigInt::from(cols.get(i, j)));
    assert_eq!(rank_rational(&q).unwrap(), 2 * n + 1);
    assert_eq!(rank_mod_p(&cols), 2 * n + 1);
    assert_eq!(monomials(n, 3).count(), cols.rows());
}

proptest! {
    #[test]
    fn w_is_symmetric_in_the_block_counts(n in 71usize..200, s in 0usize..400, a in prop::array::uniform3(0usize..150)) {
        let perms = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
        let base = w_formula(n, 3, s, a, 24);
        for perm in perms {
            let b = [a[perm[0]], a[perm[1]], a[perm[2]]];
            prop_assert_eq!(w_formula(n, 3, s, b, 24), base);
        }
        prop_assert!(base <= dim_sd(n, 3));
    }

    #[test]
    fn w_is_monotone_in_s(n in 2usize..60, s in 1usize..300) {
        prop_assert!(w_formula(n, 3, s, [0; 3], 24) <= w_formula(n, 3, s + 1, [0; 3], 24));
        prop_assert_eq!(w_formula(n, 3, s, [0; 3], 24), expected_dim_secant(n, 3, s));
    }
}
