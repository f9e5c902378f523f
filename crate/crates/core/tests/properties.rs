use proptest::prelude::*;

use nodehilb::ideals::{canonical_ideal, classify, IdealType};
use nodehilb::parse::ideal_from_str;
use nodehilb::{ArtinScalar, CoeffRing, Field};

const PRIMES: [u64; 4] = [2, 3, 5, 7];

fn artin(p: u64, coeffs: &[i64]) -> ArtinScalar {
    let f = Field::prime(p).unwrap();
    ArtinScalar::new(coeffs.iter().map(|&c| f.from_i64(c)).collect()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn artin_ring_axioms(p in prop::sample::select(&PRIMES[..]), a in prop::collection::vec(-20i64..20, 3),
                         b in prop::collection::vec(-20i64..20, 3), c in prop::collection::vec(-20i64..20, 3)) {
        let (a, b, c) = (artin(p, &a), artin(p, &b), artin(p, &c));
        prop_assert_eq!(a.times(&b).times(&c), a.times(&b.times(&c)));
        prop_assert_eq!(a.times(&b.plus(&c)), a.times(&b).plus(&a.times(&c)));
        prop_assert_eq!(a.times(&b), b.times(&a));
        prop_assert!(a.minus(&a).is_zero());
        if a.is_unit() {
            prop_assert_eq!(a.inv().unwrap().times(&a), a.one_like());
        } else {
            prop_assert!(a.inv().is_err());
        }
    }

    #[test]
    fn canonical_ideals_classify_back(p in prop::sample::select(&PRIMES[..]), m in 2usize..7, i0 in 0usize..6, a in 1i64..7) {
        let f = Field::prime(p).unwrap();
        let i = 1 + i0 % (m - 1);
        let a = f.from_i64(1 + (a - 1) % (p as i64 - 1));
        for t in [IdealType::q(m, i).unwrap(), IdealType::c(m, i, a).unwrap()] {
            let ideal = canonical_ideal(&t, f, m + 2).unwrap();
            prop_assert_eq!(ideal.colength().unwrap(), m);
            prop_assert_eq!(classify(&ideal).unwrap(), t);
        }
    }

    #[test]
    fn unit_multiples_generate_the_same_ideal(k in 1usize..6, a in 1i64..7, u in 1i64..7) {
        let f = Field::prime(7).unwrap();
        let plain = ideal_from_str(&format!("y + {a} x^{k}"), f, Some(k + 3), 64).unwrap();
        // (1 + u x)(y + a x^k) = y + a x^k + u a x^{k+1}, since xy = 0
        let scaled = ideal_from_str(&format!("y + {a} x^{k} + {} x^{}", u * a, k + 1), f, Some(k + 3), 64).unwrap();
        prop_assert_eq!(classify(&plain).unwrap(), classify(&scaled).unwrap());
        prop_assert!(plain == scaled);
    }
}
