//! Properties of pairs of circles: fission exponents, the slopes of
//! conjugate differences and numerical equivalence.

use std::collections::BTreeSet;

use fission_core::fission::{
    common_part, fission_datum, fission_exponent, fission_exponent_oracle, numerically_equivalent, numerically_equivalent_reduced,
};
use fission_core::gen::{random_compatible_type, random_factor, random_partner};
use fission_core::levels::{levels_of, levels_oracle};
use fission_core::puiseux::{ExpFactor, PointedIrregularType};
use fission_core::Rat;
use num_traits::Zero;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Distinct-orbit pairs drawn from one compatible type, so they usually
/// share a leading part.
fn related_pairs(q: &PointedIrregularType) -> Vec<(ExpFactor, ExpFactor)> {
    let e = q.entries();
    (0..e.len()).flat_map(|i| (i + 1..e.len()).map(move |j| (e[i].1.clone(), e[j].1.clone()))).collect()
}

fn cross_slopes(a: &ExpFactor, b: &ExpFactor) -> BTreeSet<Rat> {
    let cb = b.conjugates();
    a.conjugates().iter().flat_map(|x| cb.iter().map(move |y| x.slope_of_difference(y))).filter(|s| !s.is_zero()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fission_exponent_matches_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_compatible_type(&mut rng, 8, 3, 4);
        let mut pairs = related_pairs(&q);
        pairs.push((random_factor(&mut rng, 4, 3), random_factor(&mut rng, 4, 3)));
        for (a, b) in pairs {
            let f = fission_exponent(&a, &b);
            prop_assert_eq!(&f, &fission_exponent_oracle(&a, &b));
            prop_assert_eq!(&f, &fission_exponent(&b, &a));
            for k in 0..a.ram() as i64 {
                prop_assert_eq!(&f, &fission_exponent(&a.galois(k), &b));
            }
            prop_assert_eq!(f.is_zero(), a.same_orbit(&b));
        }
    }

    /// Across two distinct circles the nonzero slopes are exactly the levels
    /// of the common part together with the fission exponent, which is not
    /// itself one of those levels.
    #[test]
    fn slopes_of_two_circles(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = random_compatible_type(&mut rng, 8, 3, 4);
        for (a, b) in related_pairs(&q) {
            let (c, _) = common_part(&a, &b);
            let f = fission_exponent(&a, &b);
            let levels: BTreeSet<Rat> = levels_of(&c).levels().iter().cloned().collect();
            prop_assert!(!levels.contains(&f));
            let mut expected = levels;
            expected.insert(f);
            prop_assert_eq!(cross_slopes(&a, &b), expected);
        }
    }

    #[test]
    fn levels_two_ways(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_factor(&mut rng, 12, 3);
        prop_assert_eq!(levels_of(&a), levels_oracle(&a));
    }

    #[test]
    fn reduced_slope_test_agrees(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_compatible_type(&mut rng, 8, 3, 4);
        let b = random_partner(&mut rng, &a, 8, 3);
        let full = numerically_equivalent(&a, &b);
        prop_assert_eq!(full, numerically_equivalent_reduced(&a, &b));
        prop_assert_eq!(full, fission_datum(&a).unwrap() == fission_datum(&b).unwrap());
        prop_assert!(numerically_equivalent(&a, &a));
    }
}
