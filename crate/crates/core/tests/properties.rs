mod common;

use brstkit_core::{parse_polynomial, poisson_bracket, SuperPolynomial};
use common::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn br(f: &SuperPolynomial, g: &SuperPolynomial) -> SuperPolynomial {
    poisson_bracket(f, g).unwrap()
}

fn triple(seed: u64, parities: [bool; 3]) -> [SuperPolynomial; 3] {
    let t = super_table();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    parities.map(|odd| random_poly(&mut rng, &t, odd, 3, 2, 4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn graded_antisymmetry(seed in any::<u64>(), pf in any::<bool>(), pg in any::<bool>()) {
        let [f, g, _] = triple(seed, [pf, pg, false]);
        let lhs = br(&f, &g);
        let rhs = br(&g, &f).scale(&-sign(pf && pg));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn jacobi(seed in any::<u64>(), p in any::<[bool; 3]>()) {
        let [f, g, h] = triple(seed, p);
        let lhs = br(&f, &br(&g, &h));
        let rhs = &br(&br(&f, &g), &h) + &br(&g, &br(&f, &h)).scale(&sign(p[0] && p[1]));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn leibniz(seed in any::<u64>(), p in any::<[bool; 3]>()) {
        let [f, g, h] = triple(seed, p);
        let lhs = br(&f, &(&g * &h));
        let rhs = &(&br(&f, &g) * &h) + &(&g * &br(&f, &h)).scale(&sign(p[0] && p[1]));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn odd_self_bracket_is_nilpotent(seed in any::<u64>()) {
        let [x, _, _] = triple(seed, [true, false, false]);
        prop_assert!(br(&x, &br(&x, &x)).is_zero());
    }

    #[test]
    fn rendering_round_trips(seed in any::<u64>(), odd in any::<bool>()) {
        let [f, _, _] = triple(seed, [odd, false, false]);
        let again = parse_polynomial(f.table(), &f.to_string()).unwrap();
        prop_assert_eq!(&again, &f);
        prop_assert_eq!(again.to_string(), f.to_string());
    }

    #[test]
    fn bracket_matches_coordinate_formula(seed in any::<u64>()) {
        let t = table(2);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_base_poly(&mut rng, &t, 3, 4);
        let g = random_base_poly(&mut rng, &t, 3, 4);
        prop_assert_eq!(dense(&br(&f, &g), 2), naive_bracket(&dense(&f, 2), &dense(&g, 2), 2));
    }

    #[test]
    fn normal_form_is_a_projection(seed in any::<u64>(), which in 0usize..4) {
        let gens: &[&[&str]] = &[
            &["q1^2", "q1*p1"],
            &["q1*p2 - q2*p1"],
            &["q1*p1 + q2*p2", "p1"],
            &["q1^2 - q2*p1", "q1*q2"],
        ];
        let t = table(2);
        let gens: Vec<_> = gens[which].iter().map(|g| poly(&t, g)).collect();
        let i = brstkit_core::ideal::groebner_basis(&t, &gens).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_base_poly(&mut rng, &t, 4, 5);
        let nf = i.normal_form(&f).representative().clone();
        let again = i.normal_form(&nf);
        prop_assert_eq!(again.representative(), &nf);
        prop_assert!(i.is_member(&(&f - &nf)));
        prop_assert!(nf.terms().all(|(m, _)| i.is_standard(m)));
        let mut member = SuperPolynomial::zero(&t);
        for g in &gens {
            member = &member + &(&random_base_poly(&mut rng, &t, 2, 3) * g);
        }
        prop_assert!(i.normal_form(&member).is_zero());
        let coeffs = i.express(&member).unwrap();
        let mut back = SuperPolynomial::zero(&t);
        for (c, g) in coeffs.iter().zip(&gens) {
            back = &back + &(c * g);
        }
        prop_assert_eq!(back, member);
    }

    #[test]
    fn first_class_ideals_are_closed(seed in any::<u64>()) {
        let t = table(3);
        let i = ideal(&t, &["q2*p3 - q3*p2", "q3*p1 - q1*p3", "q1*p2 - q2*p1"]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pick = || {
            let mut a = SuperPolynomial::zero(&t);
            for g in i.generators() {
                a = &a + &(&random_base_poly(&mut rng, &t, 2, 2) * g);
            }
            a
        };
        let (a, b) = (pick(), pick());
        prop_assert!(i.is_member(&br(&a, &b)));
    }
}
