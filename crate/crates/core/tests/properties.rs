use proptest::prelude::*;

use ncspec_core::descent::{cobar, structure_presheaf};
use ncspec_core::exactlin::FieldSpec;
use ncspec_core::fixtures;
use ncspec_core::topos::{comparison_map, posite_fixture, verify_posite_axioms, CoverageMode, PositeFixture};

/// Random order on `0..n` with `0` at the bottom, edges only upward in index.
fn random_posite() -> impl Strategy<Value = PositeFixture> {
    (2usize..8)
        .prop_flat_map(|n| {
            let edges = proptest::collection::vec(any::<bool>(), n * n);
            let covers = proptest::collection::vec((0..n, any::<u8>()), 0..4);
            (Just(n), edges, covers, any::<bool>())
        })
        .prop_map(|(n, edges, covers, declared)| {
            let name = |i: usize| format!("u{i}");
            let mut order: Vec<(String, String)> = (1..n).map(|i| (name(0), name(i))).collect();
            let mut below = vec![vec![false; n]; n];
            for j in 0..n {
                below[j][j] = true;
                below[0][j] = true;
                for i in 1..j {
                    if edges[i * n + j] {
                        order.push((name(i), name(j)));
                        below[i][j] = true;
                    }
                }
            }
            for k in 0..n {
                for i in 0..n {
                    for j in 0..n {
                        if below[i][k] && below[k][j] {
                            below[i][j] = true;
                        }
                    }
                }
            }
            let mut fams = Vec::new();
            if declared {
                for (u, bits) in covers {
                    let fam: Vec<String> = (0..n)
                        .filter(|d| *d != u && below[*d][u] && bits & (1 << (d % 8)) != 0)
                        .map(name)
                        .collect();
                    if !fam.is_empty() {
                        fams.push((name(u), fam));
                    }
                }
            }
            PositeFixture {
                elements: (0..n).map(name).collect(),
                order,
                covers: fams,
                mode: if declared { CoverageMode::Declared } else { CoverageMode::Trivial },
            }
        })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, max_global_rejects: 4096, ..ProptestConfig::default() })]

    #[test]
    fn random_frames_are_distributive_with_matching_points(d in random_posite()) {
        let p = posite_fixture(&d).unwrap();
        let fr = p.ideals().unwrap();
        prop_assert!(fr.distributivity_failures().is_empty());
        prop_assert_eq!(fr.prime_filters_bruteforce(), fr.prime_elements());
        let s = fr.points();
        prop_assert!(s.is_topology());
        prop_assert!(s.is_t0());
        prop_assert!(s.is_sober());
        let axioms = verify_posite_axioms(&p);
        prop_assert!(axioms.iter().find(|a| a.axiom == "identity").unwrap().pass);
    }

    #[test]
    fn declared_to_trivial_comparison_is_continuous(d in random_posite()) {
        let mut coarse = d.clone();
        coarse.covers.clear();
        coarse.mode = CoverageMode::Trivial;
        let p = posite_fixture(&d).unwrap();
        prop_assume!(verify_posite_axioms(&p).iter().all(|a| a.pass));
        let fine = p.ideals().unwrap();
        let triv = posite_fixture(&coarse).unwrap().ideals().unwrap();
        prop_assert!(fine.len() <= triv.len());
        let c = comparison_map(&fine, &triv);
        prop_assert!(c.continuous);
    }
}

#[test]
fn ka2_results_do_not_depend_on_the_field() {
    for f in [FieldSpec::Rationals, FieldSpec::prime(5).unwrap(), FieldSpec::prime(7).unwrap()] {
        let l = fixtures::ka2_lattice_over(f).unwrap();
        assert_eq!(l.len(), 5);
        assert!(l.verify().is_empty());
        let ps = structure_presheaf(&l).unwrap();
        assert_eq!(ps.section_dims(), [0, 1, 4, 1, 3]);
        assert!(ps.functoriality_failures().is_empty());
        let a = l.base.clone();
        let cover: Vec<_> = (1..4).map(|i| l.nodes[i].map.clone()).collect();
        let c = cobar(&a, &cover, 2).unwrap();
        assert!(c.squares_vanish());
        assert_eq!(c.level_dims()[..2], [6, 10]);
    }
}

#[test]
fn presheaves_are_functorial_on_every_fixture_lattice() {
    let q = FieldSpec::Rationals;
    for l in [
        fixtures::field_lattice(q).unwrap(),
        fixtures::field_power_lattice(q, 2).unwrap(),
        fixtures::field_power_lattice(q, 3).unwrap(),
        fixtures::matrix_lattice(q, 2).unwrap(),
    ] {
        let ps = structure_presheaf(&l).unwrap();
        assert!(ps.functoriality_failures().is_empty());
    }
}
