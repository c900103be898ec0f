mod common;

use proptest::prelude::*;
use superpoints::expr::parse_element;
use superpoints::grassmann::{GrassmannElement, GrassmannMorphism, Parity};
use superpoints::random;

fn homogeneous_parts(a: &GrassmannElement) -> [(GrassmannElement, bool); 2] {
    [(a.even_part(), false), (a.odd_part(), true)]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn product_matches_word_sorting(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = random::rng(seed);
        let a = random::element(&mut rng, n);
        let b = random::element(&mut rng, n);
        prop_assert_eq!(common::words(&(&a * &b)), common::naive_mul(&common::words(&a), &common::words(&b)));
    }

    #[test]
    fn ring_laws(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = random::rng(seed);
        let a = random::element(&mut rng, n);
        let b = random::element(&mut rng, n);
        let c = random::element(&mut rng, n);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        let one = GrassmannElement::one(n);
        prop_assert_eq!(&one * &a, a.clone());
    }

    #[test]
    fn supercommutativity(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = random::rng(seed);
        let a = random::element(&mut rng, n);
        let b = random::element(&mut rng, n);
        for (x, px) in homogeneous_parts(&a) {
            for (y, py) in homogeneous_parts(&b) {
                let swapped = &y * &x;
                let expected = if px && py { -&swapped } else { swapped };
                prop_assert_eq!(&x * &y, expected);
            }
        }
    }

    #[test]
    fn odd_elements_square_to_zero(seed in any::<u64>(), n in 1usize..=6) {
        let mut rng = random::rng(seed);
        let a = random::odd_element(&mut rng, n);
        prop_assert!((&a * &a).is_zero());
    }

    #[test]
    fn inverse_when_body_is_nonzero(seed in any::<u64>(), n in 0usize..=6) {
        let mut rng = random::rng(seed);
        let a = random::element(&mut rng, n);
        match a.inv() {
            Ok(inv) => {
                prop_assert!(!num_traits::Zero::is_zero(&a.body()));
                prop_assert_eq!(&a * &inv, GrassmannElement::one(n));
                prop_assert_eq!(&inv * &a, GrassmannElement::one(n));
            }
            Err(_) => prop_assert!(num_traits::Zero::is_zero(&a.body())),
        }
    }

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), n in 0usize..=6) {
        let mut rng = random::rng(seed);
        let a = random::element(&mut rng, n);
        prop_assert_eq!(parse_element(&a.to_string(), n).unwrap(), a);
    }

    #[test]
    fn morphisms_are_parity_preserving_homomorphisms(seed in any::<u64>(), n in 1usize..=4, m in 0usize..=4) {
        let mut rng = random::rng(seed);
        let phi = random::morphism(&mut rng, n, m);
        let a = random::element(&mut rng, n);
        let b = random::element(&mut rng, n);
        prop_assert_eq!(phi.apply(&(&a * &b)).unwrap(), &phi.apply(&a).unwrap() * &phi.apply(&b).unwrap());
        prop_assert_eq!(phi.apply(&(&a + &b)).unwrap(), &phi.apply(&a).unwrap() + &phi.apply(&b).unwrap());
        let even = phi.apply(&a.even_part()).unwrap();
        prop_assert!(matches!(even.parity(), Parity::Even | Parity::Zero));
        prop_assert_eq!(phi.apply(&a).unwrap().body(), a.body());
    }

    #[test]
    fn composition_agrees_with_sequential_application(seed in any::<u64>(), n in 1usize..=3, m in 1usize..=3, k in 0usize..=3) {
        let mut rng = random::rng(seed);
        let phi = random::morphism(&mut rng, n, m);
        let psi = random::morphism(&mut rng, m, k);
        let a = random::element(&mut rng, n);
        let composite = psi.compose(&phi).unwrap();
        prop_assert_eq!(composite.apply(&a).unwrap(), psi.apply(&phi.apply(&a).unwrap()).unwrap());
        prop_assert_eq!(GrassmannMorphism::terminal(k).compose(&psi).unwrap(), GrassmannMorphism::terminal(m));
    }
}
