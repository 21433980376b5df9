// SPDX-License-Identifier: Apache-2.0

use proptest::prelude::*;
use vertexion::lattice::{ordinary_state_vector, triangular_state_vector};
use vertexion::scalar::{interpolate_degree, UnivariateSample};
use vertexion::symfun::{f_triangular, lambda_to_x, x_to_lambda};
use vertexion::weights::{l_matrix, r_matrix, LSiteParams};
use vertexion::{KParams, OrdinaryModel, RParams, Scalar, Spin, SpinConfig, TriangularModel};

fn scalar() -> impl Strategy<Value = Scalar> {
    (-40i64..=40, 1i64..=12).prop_map(|(p, q)| Scalar::frac(p, q))
}

fn nonzero() -> impl Strategy<Value = Scalar> {
    scalar().prop_filter("nonzero", |v| !v.is_zero())
}

fn distinct(count: usize, avoid: Vec<Scalar>) -> impl Strategy<Value = Vec<Scalar>> {
    proptest::collection::vec(nonzero(), count).prop_filter("distinct, outside avoid", move |values| {
        values.iter().enumerate().all(|(i, v)| !avoid.contains(v) && !values[..i].contains(v))
    })
}

fn config(max_sites: usize) -> impl Strategy<Value = SpinConfig> {
    (1..=max_sites).prop_flat_map(|sites| {
        proptest::sample::subsequence((1..=sites).collect::<Vec<_>>(), 0..=sites)
            .prop_map(move |positions| SpinConfig::new(sites, positions).unwrap())
    })
}

const SPINS: [Spin; 2] = [Spin::Up, Spin::Down];

proptest! {
    #[test]
    fn field_axioms(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a - &a, Scalar::zero());
        if !a.is_zero() {
            prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
        } else {
            prop_assert!(a.inv().is_err());
        }
    }

    #[test]
    fn scalar_text_round_trip(a in scalar()) {
        prop_assert_eq!(a.to_string().parse::<Scalar>().unwrap(), a);
    }

    #[test]
    fn interpolation_recovers_degree(
        coeffs in proptest::collection::vec(scalar(), 0..6),
        xs in distinct(8, vec![]),
    ) {
        let eval = |x: &Scalar| coeffs.iter().rev().fold(Scalar::zero(), |acc, c| acc * x + c);
        let points = xs.iter().map(|x| (x.clone(), eval(x))).collect();
        let sample = UnivariateSample::new(points).unwrap();
        let expected = coeffs.iter().rposition(|c| !c.is_zero()).map_or(-1, |k| k as i64);
        prop_assert_eq!(interpolate_degree(&sample, 6).unwrap(), expected);
    }

    #[test]
    fn partition_round_trip(x in config(7)) {
        let lambda = x_to_lambda(&x);
        prop_assert_eq!(lambda.rows(), x.down_count());
        prop_assert!(lambda.parts().windows(2).all(|p| p[0] >= p[1]));
        prop_assert!(lambda.parts().iter().all(|&part| part <= x.sites() - x.down_count()));
        prop_assert_eq!(lambda_to_x(&lambda), x);
    }

    #[test]
    fn ice_rule_and_homogeneity(
        t in scalar(),
        u in scalar(),
        w in scalar(),
        lambda in nonzero(),
        (a, b, c, d) in (nonzero(), nonzero(), scalar(), scalar()),
    ) {
        let r = RParams::new(t);
        let site = LSiteParams::solve(a, b, c, d, &r).unwrap();
        let (ru, rw) = (&lambda * &u, &lambda * &w);
        let (r1, r2) = (r_matrix(&u, &w, &r), r_matrix(&ru, &rw, &r));
        let (l1, l2) = (l_matrix(&u, &w, &site, &r), l_matrix(&ru, &rw, &site, &r));
        for g in SPINS { for dl in SPINS { for al in SPINS { for be in SPINS {
            if g.bit() + dl.bit() != al.bit() + be.bit() {
                prop_assert!(r1.get(g, dl, al, be).is_zero());
                prop_assert!(l1.get(g, dl, al, be).is_zero());
            }
            prop_assert_eq!(r2.get(g, dl, al, be), &(&lambda * r1.get(g, dl, al, be)));
            prop_assert_eq!(l2.get(g, dl, al, be), &(&lambda * l1.get(g, dl, al, be)));
        }}}}
    }

    #[test]
    fn triangular_states_carry_at_most_n_down_spins(
        t in scalar(),
        (a, b) in (scalar(), scalar()),
        u in distinct(2, vec![]),
        w in proptest::collection::vec(scalar(), 1..=3),
    ) {
        let model = TriangularModel::new(RParams::new(t), KParams::new(a, b), u, w.clone()).unwrap();
        let v = triangular_state_vector(&model).unwrap();
        for index in v.support() {
            prop_assert!(SpinConfig::from_basis_index(w.len(), index).down_count() <= 2);
        }
    }

    #[test]
    fn b_operator_states_carry_exactly_n_down_spins(
        t in scalar(),
        (a, b, c, d) in (nonzero(), nonzero(), scalar(), scalar()),
        u in distinct(2, vec![]),
        w in proptest::collection::vec(scalar(), 2..=4),
    ) {
        let r = RParams::new(t);
        let site = LSiteParams::solve(a, b, c, d, &r).unwrap();
        let model = OrdinaryModel::new(r, vec![site; w.len()], u, w.clone()).unwrap();
        let v = ordinary_state_vector(&model).unwrap();
        for index in v.support() {
            prop_assert_eq!(SpinConfig::from_basis_index(w.len(), index).down_count(), 2);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn formula_is_symmetric_in_u(
        t in scalar(),
        (a, b) in (scalar(), scalar()),
        u in distinct(3, vec![Scalar::one(), Scalar::from_int(-1)]),
        w in proptest::collection::vec(scalar(), 3),
        x in config(3).prop_filter("three sites", |x| x.sites() == 3),
        shift in 1usize..3,
    ) {
        let r = RParams::new(t);
        let k = KParams::new(a, b);
        let mut rotated = u.clone();
        rotated.rotate_left(shift);
        match (f_triangular(&r, &k, &u, &w, &x), f_triangular(&r, &k, &rotated, &w, &x)) {
            (Ok(lhs), Ok(rhs)) => prop_assert_eq!(lhs, rhs),
            (lhs, rhs) => prop_assert_eq!(lhs.is_err(), rhs.is_err()),
        }
    }
}
