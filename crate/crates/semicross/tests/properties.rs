//! Randomized invariants at ranks beyond the exhaustive sweeps.

use std::sync::OnceLock;

use proptest::prelude::*;

use semicross::cross_section::theta_map;
use semicross::isn::PartialBijection;
use semicross::notation::{format_element, parse_element};
use semicross::semigroup::{ElementId, FiniteInverseSemigroup, DEFAULT_MAX_ELEMENTS};
use semicross::wreath::build_wreath;

const N: u8 = 7;

/// Any partial bijection of rank 7: a shuffled permutation restricted to a
/// random domain mask.
fn partial_bijection() -> impl Strategy<Value = PartialBijection> {
    (
        Just((1..=N).collect::<Vec<u8>>()).prop_shuffle(),
        0u32..(1 << N),
    )
        .prop_map(|(perm, mask)| {
            let pairs: Vec<(u8, u8)> = perm
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(i, &img)| (i as u8 + 1, img))
                .collect();
            PartialBijection::from_pairs(N, &pairs).expect("restriction of a permutation")
        })
}

fn wreath_2_2() -> &'static FiniteInverseSemigroup {
    static W: OnceLock<FiniteInverseSemigroup> = OnceLock::new();
    W.get_or_init(|| {
        let inner = FiniteInverseSemigroup::from_isn(2).unwrap();
        build_wreath(&inner, 2, DEFAULT_MAX_ELEMENTS).unwrap()
    })
}

proptest! {
    #[test]
    fn decomposition_round_trips(a in partial_bijection()) {
        let d = a.chain_decomposition();
        prop_assert_eq!(d.recompose(), a.clone());
        let mut seen = vec![false; N as usize + 1];
        for part in d.cycles.iter().chain(d.chains.iter()) {
            for &p in part {
                prop_assert!(!seen[p as usize]);
                seen[p as usize] = true;
            }
        }
    }

    #[test]
    fn notation_round_trips(a in partial_bijection()) {
        let text = format_element(&a);
        prop_assert_eq!(parse_element(&text, N).unwrap(), a);
    }

    #[test]
    fn product_domains_shrink(a in partial_bijection(), b in partial_bijection()) {
        let ab = a.compose(&b).unwrap();
        prop_assert_eq!(ab.domain_mask() & a.domain_mask(), ab.domain_mask());
        prop_assert_eq!(ab.range_mask() & b.range_mask(), ab.range_mask());
    }

    #[test]
    fn inverse_axioms(a in partial_bijection()) {
        let inv = a.inverse();
        prop_assert_eq!(a.compose(&inv).unwrap().compose(&a).unwrap(), a.clone());
        prop_assert_eq!(inv.inverse(), a);
    }

    #[test]
    fn composition_associates(
        a in partial_bijection(),
        b in partial_bijection(),
        c in partial_bijection(),
    ) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn wreath_inverse_axiom(x in 0u32..127) {
        let w = wreath_2_2();
        let xi = w.inverse(x as ElementId);
        prop_assert_eq!(w.product(w.product(x, xi), x), x);
        prop_assert_eq!(w.inverse(xi), x);
    }

    #[test]
    fn wreath_domain_invariant(x in 0u32..127, y in 0u32..127) {
        let w = wreath_2_2();
        let (_, elems) = w.wreath_parts().unwrap();
        let p = w.product(x, y);
        let e = &elems[p as usize];
        prop_assert_eq!(e.assignment().domain_mask(), e.top().domain_mask());
    }

    #[test]
    fn theta_preserves_products(x in 0u32..127, y in 0u32..127) {
        let w = wreath_2_2();
        static MAP: OnceLock<Vec<ElementId>> = OnceLock::new();
        let map = MAP.get_or_init(|| {
            let inner = w.wreath_parts().unwrap().0.inner();
            let swap = inner
                .isn_id_of(&parse_element("(1 2)", 2).unwrap())
                .unwrap();
            theta_map(w, &[swap, swap]).unwrap()
        });
        prop_assert_eq!(
            map[w.product(x, y) as usize],
            w.product(map[x as usize], map[y as usize])
        );
    }
}
