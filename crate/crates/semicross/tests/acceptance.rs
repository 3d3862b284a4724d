//! Acceptance suite: each test checks one structural claim end to end at
//! desk scale and prints a pass line with its runtime. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use semicross::cross_section::{
    apply_automorphism, build_isn_r_cross_section, conjugation_automorphism, invert_cross_section,
    project_first, project_second,
};
use semicross::green::{
    l_related_generic, l_related_isn, l_related_wreath, r_related_generic, r_related_isn,
    r_related_wreath, GreenRelation,
};
use semicross::isn::enumerate_isn;
use semicross::notation::{format_element, parse_element};
use semicross::search::{
    brute_force_cross_sections, enumerate_ordered_partitions, standard_wreath_sections,
    wreath_count_report, SearchConfig,
};
use semicross::semigroup::{ElementId, FiniteInverseSemigroup, DEFAULT_MAX_ELEMENTS};
use semicross::wreath::{build_wreath, idempotent_count_formula};

fn isn(n: u8) -> FiniteInverseSemigroup {
    FiniteInverseSemigroup::from_isn(n).unwrap()
}

fn wreath_2_2() -> FiniteInverseSemigroup {
    build_wreath(&isn(2), 2, DEFAULT_MAX_ELEMENTS).unwrap()
}

fn member_sets(sections: &[semicross::CrossSection]) -> BTreeSet<Vec<ElementId>> {
    sections.iter().map(|c| c.members().to_vec()).collect()
}

fn pass(criterion: u32, name: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed <= budget,
        "criterion {criterion} exceeded its {budget:?} budget: {elapsed:?}"
    );
    println!("acceptance criterion {criterion} ({name}): PASS in {elapsed:?}");
}

#[test]
fn criterion_1_inverse_semigroup_axioms() {
    let t0 = Instant::now();

    // IS_3: exhaustive, including all 34³ = 39304 associativity triples.
    let s3 = isn(3);
    assert_eq!(s3.size(), 34);
    s3.verify_inverse_semigroup(None, 0).unwrap();

    // IS_2 ≀ IS_2: axioms exhaustive, associativity on 2·10⁵ sampled triples.
    let w = wreath_2_2();
    assert_eq!(w.size(), 127);
    w.verify_inverse_semigroup(Some(200_000), 0x5eed).unwrap();

    pass(
        1,
        "inverse-semigroup axiom suite",
        t0,
        Duration::from_secs(10),
    );
}

#[test]
fn criterion_2_chain_decomposition_round_trip() {
    let t0 = Instant::now();

    for n in [3u8, 4] {
        let elems = enumerate_isn(n).unwrap();
        assert_eq!(elems.len(), if n == 3 { 34 } else { 209 });
        for a in &elems {
            let d = a.chain_decomposition();
            assert_eq!(d.recompose(), *a, "recomposition failed for {a:?}");

            let mut seen = vec![false; n as usize + 1];
            for part in d.cycles.iter().chain(d.chains.iter()) {
                for &p in part {
                    assert!(!seen[p as usize], "parts overlap at {p}");
                    seen[p as usize] = true;
                }
            }

            let text = format_element(a);
            assert_eq!(parse_element(&text, n).unwrap(), *a, "reparse of {text}");
        }
    }

    pass(
        2,
        "chain decompositions round-trip",
        t0,
        Duration::from_secs(5),
    );
}

#[test]
fn criterion_3_structural_vs_generic_green() {
    let t0 = Instant::now();

    let s3 = isn(3);
    let (_, elems) = s3.isn_parts().unwrap();
    let elems = elems.to_vec();
    for (i, a) in elems.iter().enumerate() {
        for (j, b) in elems.iter().enumerate() {
            let (x, y) = (i as ElementId, j as ElementId);
            assert_eq!(r_related_isn(a, b).unwrap(), r_related_generic(&s3, x, y));
            assert_eq!(l_related_isn(a, b).unwrap(), l_related_generic(&s3, x, y));
        }
    }

    let w = wreath_2_2();
    let n = w.size() as ElementId;
    for x in 0..n {
        for y in 0..n {
            assert_eq!(
                r_related_wreath(&w, x, y).unwrap(),
                r_related_generic(&w, x, y),
                "R disagrees at ({x}, {y})"
            );
            assert_eq!(
                l_related_wreath(&w, x, y).unwrap(),
                l_related_generic(&w, x, y),
                "L disagrees at ({x}, {y})"
            );
        }
    }

    pass(
        3,
        "structural and ideal-based Green's relations agree",
        t0,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_4_isn_cross_section_classification() {
    let t0 = Instant::now();

    // Constructive direction: every ordered partition yields a verified
    // cross-section with 2^n members, for n ≤ 4.
    for n in 1..=4u8 {
        let s = isn(n);
        for p in enumerate_ordered_partitions(n).unwrap() {
            let c = build_isn_r_cross_section(&s, &p).unwrap();
            assert_eq!(c.len(), 1 << n, "size at n={n}, partition {p}");
        }
    }

    // Converse at desk scale: brute force finds exactly the constructed
    // family, as member sets.
    let cfg = SearchConfig::default();
    for (n, expected) in [(2u8, 3usize), (3, 13)] {
        let s = isn(n);
        let found = brute_force_cross_sections(&s, GreenRelation::R, &cfg).unwrap();
        assert_eq!(found.len(), expected, "count at n={n}");
        let constructed: BTreeSet<Vec<ElementId>> = enumerate_ordered_partitions(n)
            .unwrap()
            .iter()
            .map(|p| build_isn_r_cross_section(&s, p).unwrap().members().to_vec())
            .collect();
        assert_eq!(member_sets(&found), constructed, "family equality at n={n}");
    }

    pass(
        4,
        "ordered partitions classify the IS_n R-cross-sections",
        t0,
        Duration::from_secs(300),
    );
}

#[test]
fn criterion_5_wreath_idempotent_count() {
    let t0 = Instant::now();

    let cases: Vec<(FiniteInverseSemigroup, u8)> = vec![
        (isn(2), 2),
        (isn(2), 3),
        (FiniteInverseSemigroup::trivial(), 3),
    ];
    for (inner, m) in cases {
        let expected = idempotent_count_formula(inner.idempotents().len() as u128, m as u32);
        let w = build_wreath(&inner, m, DEFAULT_MAX_ELEMENTS).unwrap();
        // Scan by squaring, cross-checked against the structural predicate.
        let scanned = w.idempotents().len() as u128;
        assert_eq!(scanned, expected, "inner {} at m={m}", inner.describe());
        let (ctx, elems) = w.wreath_parts().unwrap();
        let structural = elems.iter().filter(|e| ctx.is_idempotent(e)).count() as u128;
        assert_eq!(structural, expected);
        if inner.size() == 7 && m == 2 {
            assert_eq!(scanned, 25);
        }
    }

    pass(
        5,
        "wreath idempotent counts match (|E(S)|+1)^m",
        t0,
        Duration::from_secs(30),
    );
}

#[test]
fn criterion_6_standard_wreath_sections_verify() {
    let t0 = Instant::now();

    let w = wreath_2_2();
    let standards = standard_wreath_sections(&w, GreenRelation::R).unwrap();
    assert_eq!(standards.len(), 15);
    for c in &standards {
        // Construction already verifies; double-check the claimed size.
        assert_eq!(c.len(), 25);
    }
    assert_eq!(
        member_sets(&standards).len(),
        15,
        "member sets are distinct"
    );

    pass(
        6,
        "all 15 standard wreath constructions verify",
        t0,
        Duration::from_secs(60),
    );
}

#[test]
fn criterion_7_wreath_enumeration_and_count_arbitration() {
    let t0 = Instant::now();

    let report = wreath_count_report(2, GreenRelation::R, &SearchConfig::default()).unwrap();

    // The criterion requires exhaustiveness (no timeout — guaranteed by the
    // Ok above) and that every found section is isomorphic to a standard
    // construction. The numeric outcome is reported, not presupposed.
    assert!(report.all_isomorphic_to_standard);

    println!(
        "  brute force found {} R-cross-sections of IS_2 wr IS_2; closed form {} ({}integral) {}; standard constructions {} {}",
        report.count,
        report.formula_paper.value,
        if report.formula_paper.integral { "" } else { "non-" },
        if report.matches_formula { "MATCHES" } else { "DIFFERS" },
        report.structural,
        if report.matches_structural { "MATCHES" } else { "DIFFERS" },
    );

    pass(
        7,
        "wreath enumeration exhaustive, all sections standard up to isomorphism",
        t0,
        Duration::from_secs(600),
    );
}

#[test]
fn criterion_8_duality_and_automorphism_images() {
    let t0 = Instant::now();
    let cfg = SearchConfig::default();

    // Inversion bijects the R- and L-families, on IS_3 and on the wreath.
    let s3 = isn(3);
    let w = wreath_2_2();
    for s in [&s3, &w] {
        let r = brute_force_cross_sections(s, GreenRelation::R, &cfg).unwrap();
        let l = brute_force_cross_sections(s, GreenRelation::L, &cfg).unwrap();
        assert_eq!(r.len(), l.len());
        let inverted: BTreeSet<Vec<ElementId>> = r
            .iter()
            .map(|c| invert_cross_section(c).unwrap().members().to_vec())
            .collect();
        assert_eq!(inverted, member_sets(&l), "duality on {}", s.describe());
    }

    // Every permutation-induced automorphism of IS_3 maps every
    // R-cross-section to an R-cross-section.
    let r3 = brute_force_cross_sections(&s3, GreenRelation::R, &cfg).unwrap();
    let perms: Vec<_> = enumerate_isn(3)
        .unwrap()
        .into_iter()
        .filter(|a| a.domain_size() == 3)
        .collect();
    assert_eq!(perms.len(), 6);
    for g in &perms {
        let phi = conjugation_automorphism(&s3, g).unwrap();
        for c in &r3 {
            apply_automorphism(c, &phi).unwrap();
        }
    }

    pass(
        8,
        "inversion duality and automorphism images",
        t0,
        Duration::from_secs(120),
    );
}

#[test]
fn criterion_9_projections_of_brute_forced_sections() {
    let t0 = Instant::now();

    let w = wreath_2_2();
    let sections =
        brute_force_cross_sections(&w, GreenRelation::R, &SearchConfig::default()).unwrap();
    assert!(!sections.is_empty());
    for c in &sections {
        let first = project_first(c).unwrap();
        assert_eq!(first.len(), 4);
        let second = project_second(c).unwrap();
        assert_eq!(second.len(), 4);
    }

    pass(
        9,
        "first and second projections verify as cross-sections",
        t0,
        Duration::from_secs(120),
    );
}
