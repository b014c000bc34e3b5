use proptest::prelude::*;

use rholab::fibers::{fiber_point, fiber_spec};
use rholab::geometry::level_contains;
use rholab::periodic::{beta, beta_prime, EpWord};
use rholab::rational::{is_dyadic, rat, Rational};
use rholab::real_map::{check_functional, r_rational, s_section};
use rholab::substitution::{rho, sigma, vanishing_order, Parity};
use rholab::word::{NatSeq, Word};

fn word(max: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec(0u8..2, 0..=max).prop_map(|d| Word::from_digits(d).unwrap())
}

fn unit_rational() -> impl Strategy<Value = Rational> {
    (1i64..=500).prop_flat_map(|q| (0..=q).prop_map(move |p| rat(p, q)))
}

fn rho_oracle(d: &[u8], odd: bool) -> Vec<u8> {
    d.iter()
        .enumerate()
        .filter(|p| *p.1 == 1)
        .map(|(i, _)| ((i + odd as usize) & 1) as u8)
        .collect()
}

proptest! {
    #[test]
    fn rho_matches_oracle(w in word(64), odd in any::<bool>()) {
        let p = if odd { Parity::Odd } else { Parity::Even };
        prop_assert_eq!(rho(&w, p).into_digits(), rho_oracle(w.digits(), odd));
    }

    #[test]
    fn rho_splits_over_concatenation(v in word(24), w in word(24)) {
        let whole = rho(&v.concat(&w), Parity::Even);
        let split = rho(&v, Parity::Even).concat(&rho(&w, Parity::of(v.len())));
        prop_assert_eq!(whole, split);
    }

    #[test]
    fn sigma_is_a_section(b in word(128), a in prop::collection::vec(0u64..5, 0..6)) {
        let s = sigma(&b, 1);
        prop_assert!(s.is_simplest());
        prop_assert_eq!(&rho(&s, Parity::Even), &b);
        if s.ones() >= a.len() {
            let ins = s.insert_zero_pairs(&NatSeq::new(a)).unwrap();
            prop_assert_eq!(rho(&ins, Parity::Even), b);
        }
    }

    #[test]
    fn trailing_zero_keeps_vanishing_order(w in word(20)) {
        prop_assume!(!w.is_empty());
        let w0 = w.concat(&"0".parse().unwrap());
        prop_assert_eq!(vanishing_order(&w0).unwrap(), vanishing_order(&w).unwrap());
    }

    #[test]
    fn expansions_round_trip(x in unit_rational()) {
        if x > rat(0, 1) {
            prop_assert_eq!(beta(&x).unwrap().xi(), x.clone());
        }
        if x < rat(1, 1) {
            prop_assert_eq!(beta_prime(&x).unwrap().xi(), x.clone());
        }
        if x > rat(0, 1) && x < rat(1, 1) {
            prop_assert_eq!(beta(&x).unwrap() == beta_prime(&x).unwrap(), !is_dyadic(&x));
        }
    }

    #[test]
    fn canonical_form_is_stable(p in word(8), q in word(8)) {
        prop_assume!(!q.is_empty());
        let e = EpWord::new(p, q).unwrap();
        let c = e.canonicalize();
        prop_assert_eq!(c.xi(), e.xi());
        prop_assert_eq!(c.canonicalize(), c);
    }

    #[test]
    fn functional_identities_hold(x in unit_rational()) {
        prop_assume!(x > rat(0, 1));
        prop_assert!(check_functional(&x).unwrap().all_hold());
    }

    #[test]
    fn section_is_right_inverse(y in unit_rational()) {
        let s = s_section(&y).unwrap();
        prop_assert_eq!(r_rational(&s).unwrap(), y);
    }

    #[test]
    fn fiber_points_below_section(y in unit_rational(), a in prop::collection::vec(0u64..4, 1..4)) {
        let spec = fiber_spec(&y).unwrap();
        let s = s_section(&y).unwrap();
        for b in spec.branches() {
            let x = fiber_point(&y, &NatSeq::new(a.clone()), b).unwrap();
            prop_assert_eq!(r_rational(&x).unwrap(), y.clone());
            prop_assert!(x <= s);
        }
    }

    #[test]
    fn graph_points_inside_levels(x in unit_rational(), n in 0usize..12) {
        let y = r_rational(&x).unwrap();
        prop_assert!(level_contains(n, &x, &y).unwrap());
    }
}
