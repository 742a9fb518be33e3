use proptest::prelude::*;

use orbifold_core::algebra::sort_sign;
use orbifold_core::catalog;
use orbifold_core::exactfield::{rat, Cyc, Field, IntMatrix, Matrix, RatMatrix, Rational};
use orbifold_core::fixedloci::FixedLoci;
use orbifold_core::htspace::{Convention, HTClass, HtSpace, Settings};
use orbifold_core::product::multiply;
use orbifold_core::torusaction::validate_scenario;

const N: u32 = 12;

fn cyc() -> impl Strategy<Value = Cyc> {
    prop::collection::vec((-3i64..=3, 1i64..=3), 4).prop_map(|cs| {
        cs.into_iter()
            .enumerate()
            .fold(Cyc::zero(N), |acc, (k, (num, den))| acc.plus(&Cyc::zeta_pow(N, k as i64).times(&Cyc::from_rational(N, &rat(num, den)))))
    })
}

fn rat_matrix(rows: usize, cols: usize) -> impl Strategy<Value = RatMatrix> {
    prop::collection::vec(-3i64..=3, rows * cols).prop_map(move |v| {
        let data = v.chunks(cols).map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect();
        Matrix::from_rows(&(), data).unwrap()
    })
}

fn loci(raw: orbifold_core::torusaction::RawScenario) -> FixedLoci {
    FixedLoci::new(validate_scenario(&raw).unwrap())
}

fn inversions(v: &[u8]) -> usize {
    (0..v.len()).flat_map(|i| (i + 1..v.len()).map(move |j| (i, j))).filter(|&(i, j)| v[i] > v[j]).count()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cyclotomic_field_axioms(a in cyc(), b in cyc(), c in cyc()) {
        prop_assert_eq!(a.plus(&b).plus(&c), a.plus(&b.plus(&c)));
        prop_assert_eq!(a.times(&b.plus(&c)), a.times(&b).plus(&a.times(&c)));
        prop_assert_eq!(a.times(&b), b.times(&a));
        prop_assert_eq!(a.times(&b).conj(), a.conj().times(&b.conj()));
        if !a.is_null() {
            prop_assert!(a.times(&a.inverse().unwrap()).is_one_in());
        }
    }

    #[test]
    fn cyclotomic_display_round_trips(a in cyc()) {
        prop_assert_eq!(Cyc::parse(&a.to_string()).unwrap().lift(N).unwrap(), a);
    }

    #[test]
    fn koszul_sign_is_permutation_parity(v in prop::collection::vec(0u8..12, 0..8)) {
        let mut sorted = v.clone();
        let s = sort_sign(&mut sorted);
        let mut distinct = v.clone();
        distinct.sort_unstable();
        distinct.dedup();
        if distinct.len() < v.len() {
            prop_assert_eq!(s, 0);
        } else {
            prop_assert_eq!(s, if inversions(&v).is_multiple_of(2) { 1 } else { -1 });
            prop_assert_eq!(sorted, distinct);
        }
    }

    #[test]
    fn rank_nullity(m in rat_matrix(3, 5)) {
        let kernel = m.kernel_basis();
        prop_assert_eq!(m.rank() + kernel.len(), 5);
        for v in kernel {
            prop_assert!(m.mul_vec(&v).iter().all(|x| x.is_null()));
        }
    }

    #[test]
    fn determinant_is_multiplicative(a in rat_matrix(3, 3), b in rat_matrix(3, 3)) {
        prop_assert_eq!(a.mul(&b).determinant(), a.determinant().times(&b.determinant()));
        match a.inverse() {
            Some(inv) => prop_assert!(inv.mul(&a).is_identity()),
            None => prop_assert!(a.determinant().is_null()),
        }
    }

    #[test]
    fn smith_form_is_equivalent(v in prop::collection::vec(-6i64..=6, 9)) {
        let rows: Vec<Vec<i64>> = v.chunks(3).map(<[i64]>::to_vec).collect();
        let a = IntMatrix::from_rows(&rows).unwrap();
        let snf = a.smith_normal_form();
        prop_assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.d.clone());
        let unit = |m: &IntMatrix| {
            let d = m.determinant();
            d == 1.into() || d == (-1).into()
        };
        prop_assert!(unit(&snf.u) && unit(&snf.v));
        let factors = snf.invariant_factors();
        for w in factors.windows(2) {
            prop_assert!((&w[1] % &w[0]) == 0.into());
        }
    }
}

fn class_from(space: &HtSpace<'_>, picks: &[(usize, i64)]) -> HTClass {
    let basis = space.basis();
    let mut x = HTClass::zero(space.conductor());
    for &(i, c) in picks {
        x.add_term(basis[i % basis.len()].clone(), Cyc::from_int(space.conductor(), c));
    }
    x
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn product_is_bilinear_and_unital(
        a in prop::collection::vec((0usize..64, -2i64..=2), 1..4),
        b in prop::collection::vec((0usize..64, -2i64..=2), 1..4),
        c in prop::collection::vec((0usize..64, -2i64..=2), 1..4),
    ) {
        let l = loci(catalog::e_i_z4());
        let space = HtSpace::new(&l, Settings::default());
        let (x, y, z) = (class_from(&space, &a), class_from(&space, &b), class_from(&space, &c));
        let lhs = multiply(&space, &x, &y.add(&z)).unwrap();
        let rhs = multiply(&space, &x, &y).unwrap().add(&multiply(&space, &x, &z).unwrap());
        prop_assert_eq!(lhs, rhs);
        prop_assert_eq!(multiply(&space, &space.unit(), &x).unwrap(), x.clone());
        prop_assert_eq!(multiply(&space, &x, &space.unit()).unwrap(), x);
    }

    #[test]
    fn action_commutes_with_product(
        a in prop::collection::vec((0usize..256, -2i64..=2), 1..3),
        b in prop::collection::vec((0usize..256, -2i64..=2), 1..3),
        h in 0usize..4,
    ) {
        let l = loci(catalog::ee_z2xz2());
        let space = HtSpace::new(&l, Settings::default());
        let (x, y) = (class_from(&space, &a), class_from(&space, &b));
        let lhs = space.act(h, &multiply(&space, &x, &y).unwrap());
        let rhs = multiply(&space, &space.act(h, &x), &space.act(h, &y)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn class_expressions_round_trip(a in prop::collection::vec((0usize..272, -3i64..=3), 0..5)) {
        let l = loci(catalog::kummer());
        let space = HtSpace::new(&l, Settings::default());
        let x = class_from(&space, &a);
        prop_assert_eq!(space.parse(&space.render(&x)).unwrap(), x);
    }
}

#[test]
fn bigraded_tables_sum_to_degree_totals() {
    for raw in catalog::all() {
        let l = loci(raw);
        let space = HtSpace::new(&l, Settings::default());
        let totals = space.degree_table();
        for conv in [Convention::New, Convention::Parenthesized] {
            let t = space.dimension_table(conv);
            for (d, n) in &totals {
                assert_eq!(t.degree(&Rational::from_integer((*d).into())), *n, "{}", l.scenario().name());
            }
            assert_eq!(t.total(), totals.values().sum::<usize>());
        }
        for x in space.invariant_basis() {
            assert!(space.is_invariant(&x));
        }
    }
}

#[test]
fn trivial_group_gives_binomial_table() {
    for raw in [catalog::torus_e(), catalog::abelian_surface()] {
        let l = loci(raw);
        let n = l.scenario().n() as u64;
        let space = HtSpace::new(&l, Settings::default());
        let t = space.dimension_table(Convention::New);
        let binom = |k: u64| (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1));
        for p in 0..=n {
            for q in 0..=n {
                assert_eq!(t.get(&rat(p as i64, 1), &rat(q as i64, 1)) as u64, binom(p) * binom(q));
            }
        }
    }
}
