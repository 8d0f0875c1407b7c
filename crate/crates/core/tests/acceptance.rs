//! One test per acceptance criterion. Each prints a PASS/FAIL line.

use std::collections::BTreeSet;

use ncspec_core::algcore::{AlgRef, AlgebraMorphism};
use ncspec_core::descent::{cobar, descendability_check, sheaf_check, structure_presheaf, DEFAULT_T_MAX};
use ncspec_core::epiloc::{check_homotopical_epi, induced_lattice_map, Meet, NodeImage};
use ncspec_core::exactlin::{FieldSpec, Matrix};
use ncspec_core::fixtures;
use ncspec_core::freeprod::{commutative_collapse_check, free_product, verify_zero_certificate, FreeProductStatus};
use ncspec_core::modhom::{
    indecomposable_projective, minimal_resolution, Module, Side, DEFAULT_MAX_DEG,
};
use ncspec_core::topos::{
    fine_coverage, induced_point_map, posite_fixture, refute_cover, trivial_coverage, Frame, SoberSpace,
};

const Q: FieldSpec = FieldSpec::Rationals;

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn run(n: usize, title: &str, body: impl FnOnce() -> Check) {
    match body() {
        Ok(()) => println!("criterion {n:2} PASS  {title}"),
        Err(e) => {
            println!("criterion {n:2} FAIL  {title}: {e}");
            panic!("criterion {n} failed: {e}");
        }
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

fn node_map(img: &[NodeImage]) -> Vec<Option<usize>> {
    img.iter()
        .map(|i| match i {
            NodeImage::Node(n) => Some(*n),
            _ => None,
        })
        .collect()
}

#[test]
fn criterion_01_epimorphism_certificates() {
    run(1, "kA2 candidates certified, dual numbers rejected", || {
        let a = fixtures::ka2(Q);
        for c in fixtures::ka2_candidates(&a) {
            let cert = check_homotopical_epi(&c.map, DEFAULT_MAX_DEG).map_err(err)?;
            ensure(cert.is_valid() && cert.complete, format!("{} certificate {cert:?}", c.id))?;
        }
        let cert = check_homotopical_epi(&fixtures::dual_projection(Q), DEFAULT_MAX_DEG).map_err(err)?;
        ensure(!cert.is_valid(), "dual numbers accepted")?;
        ensure(cert.tor_dims[1] == 1, format!("Tor_1 = {}", cert.tor_dims[1]))
    });
}

#[test]
fn criterion_02_ka2_lattice_is_a_diamond() {
    run(2, "kA2 lattice has five nodes and zero middle meets", || {
        let l = fixtures::ka2_lattice().map_err(err)?;
        ensure(l.len() == 5, format!("{} nodes", l.len()))?;
        ensure(l.verify().is_empty(), format!("{:?}", l.verify()))?;
        for i in 1..4 {
            for j in 1..4 {
                if i == j {
                    continue;
                }
                ensure(!l.leq[i][j], format!("{i} ≤ {j}"))?;
                ensure(l.meet(i, j) == Meet::Node(0), format!("meet {i},{j}"))?;
                if i < j {
                    let (f, g) = (&l.nodes[i].map, &l.nodes[j].map);
                    let r = free_product(f, g, 8).map_err(err)?;
                    ensure(matches!(r.status, FreeProductStatus::Zero), format!("free product {i},{j}"))?;
                    let cert = r.certificate.ok_or("no certificate")?;
                    ensure(cert.degree <= 4, format!("certificate degree {}", cert.degree))?;
                    ensure(verify_zero_certificate(f, g, &cert), "certificate does not verify")?;
                }
            }
        }
        Ok(())
    });
}

#[test]
fn criterion_03_ka2_ideals() {
    run(3, "kA2 has 9 trivial and 8 fine ideals", || {
        let l = fixtures::ka2_lattice().map_err(err)?;
        let triv = trivial_coverage(&l).and_then(|p| p.ideals()).map_err(err)?;
        let expected = ["0", "01", "02", "03", "012", "013", "023", "0123", "01234"];
        ensure(triv.names() == expected, format!("{:?}", triv.names()))?;
        let fine = fine_coverage(&l).and_then(|p| p.ideals()).map_err(err)?;
        let without: Vec<&str> = expected.iter().copied().filter(|n| *n != "0123").collect();
        ensure(fine.names() == without, format!("{:?}", fine.names()))
    });
}

#[test]
fn criterion_04_ka2_spectra() {
    run(4, "kA2 spaces: 3 generic over 1 closed, fine discrete on 3", || {
        let l = fixtures::ka2_lattice().map_err(err)?;
        let s = trivial_coverage(&l).and_then(|p| p.ideals()).map_err(err)?.points();
        ensure(s.len() == 4, format!("{} points", s.len()))?;
        ensure(s.generic_points().len() == 3, "generic points")?;
        let closed = s.closed_points();
        ensure(closed.len() == 1, "closed points")?;
        ensure((0..4).all(|x| s.specializes(x, closed[0])), "closed point not below all")?;
        ensure(s.is_sober() && s.is_t0(), "trivial space not sober T0")?;
        let f = fine_coverage(&l).and_then(|p| p.ideals()).map_err(err)?.points();
        ensure(f.len() == 3 && f.is_discrete(), format!("fine space {:?}", f.labels()))?;
        ensure(f.is_sober() && f.is_t0(), "fine space not sober T0")
    });
}

#[test]
fn criterion_05_kanda_collapse() {
    run(5, "k over kxk against M2 vanishes via both projections", || {
        let (p1, p2) = fixtures::kk_projections(Q);
        let diag = fixtures::diagonal(Q);
        for p in [p1, p2] {
            let r = free_product(&p, &diag, 8).map_err(err)?;
            ensure(r.is_zero(), format!("status {}", r.status.name()))?;
            let cert = r.certificate.ok_or("no certificate stored")?;
            ensure(!cert.terms.is_empty(), "empty certificate")?;
            ensure(verify_zero_certificate(&p, &diag, &cert), "certificate rejected")?;
        }
        Ok(())
    });
}

#[test]
fn criterion_06_field_power_point_counts() {
    run(6, "k^n point counts for n = 2, 3", || {
        for n in [2usize, 3] {
            let l = fixtures::field_power_lattice(Q, n).map_err(err)?;
            let s = trivial_coverage(&l).and_then(|p| p.ideals()).map_err(err)?.points();
            ensure(s.len() == (1 << n) - 1, format!("n={n}: {} points", s.len()))?;
            ensure(s.generic_points().len() == n, format!("n={n}: generic"))?;
            ensure(s.specialization_points().len() == (1 << n) - n - 1, format!("n={n}: special"))?;
            let f = fine_coverage(&l).and_then(|p| p.ideals()).map_err(err)?.points();
            ensure(f.len() == n && f.is_discrete(), format!("n={n}: fine space"))?;
        }
        Ok(())
    });
}

#[test]
fn criterion_07_valuation_fixture() {
    run(7, "valuation lattice gives a reducible 3-point space", || {
        let s = posite_fixture(&fixtures::valuation_posite())
            .and_then(|p| p.ideals())
            .map_err(err)?
            .points();
        ensure(s.len() == 3, format!("{} points", s.len()))?;
        let g = s.generic_points();
        let sp = s.specialization_points();
        ensure(g.len() == 2 && sp.len() == 1, "point types")?;
        let lab = |i: usize| s.points[i].label.clone();
        let (e1, e2, c) = (lab(g[0]), lab(g[1]), lab(sp[0]));
        let expected: BTreeSet<BTreeSet<String>> = [
            vec![],
            vec![e1.clone()],
            vec![e2.clone()],
            vec![e1.clone(), e2.clone()],
            vec![e1, e2, c],
        ]
        .into_iter()
        .map(|v| v.into_iter().collect())
        .collect();
        ensure(s.open_sets() == expected, format!("{:?}", s.open_sets()))?;
        ensure(!s.is_irreducible(), "space is irreducible")
    });
}

#[test]
fn criterion_08_presheaf_is_not_a_sheaf() {
    run(8, "kA2 triple cover: global sections 3, equalizer 6", || {
        let l = fixtures::ka2_lattice().map_err(err)?;
        let ps = structure_presheaf(&l).map_err(err)?;
        let r = sheaf_check(&ps, l.top(), &[1, 2, 3]).map_err(err)?;
        ensure(r.global_dim == 3 && r.equalizer_dim == 6, format!("{r:?}"))?;
        ensure(!r.pass, "sheaf check passed")
    });
}

#[test]
fn criterion_09_descent_on_ka2() {
    run(9, "kA2 triple cover descends with a split homotopy", || {
        let a = fixtures::ka2(Q);
        let cover = vec![fixtures::ka2_p1(&a), fixtures::ka2_inclusion(&a), fixtures::ka2_s2(&a)];
        let c = cobar(&a, &cover, DEFAULT_T_MAX).map_err(err)?;
        // level 0 is k_{e3} ⊕ M2 ⊕ k_{e1}; columns are the images of e1, e2, e3
        let one = |v: i64| Q.from_i64(v);
        let expected = Matrix::from_columns(
            Q,
            6,
            &[
                vec![one(0), one(1), one(0), one(0), one(0), one(1)],
                vec![one(0), one(0), one(0), one(1), one(0), one(0)],
                vec![one(1), one(0), one(0), one(0), one(1), one(0)],
            ],
        );
        ensure(c.augmentation == expected, format!("augmentation {:?}", c.augmentation))?;
        let kernel = c.differentials[0].kernel_basis();
        ensure(kernel == c.augmentation.image(), "difference kernel is not the image of A")?;
        let r = descendability_check(&a, &cover, DEFAULT_T_MAX).map_err(err)?;
        ensure(r.kernel_recovered, "kernel not recovered")?;
        ensure(r.split_exact, "no split homotopy")
    });
}

#[test]
fn criterion_10_commutative_collapse() {
    run(10, "free product dimension equals tensor dimension on commutative fixtures", || {
        let idem = fixtures::idempotent_algebra(Q);
        let x = idem.basis_element(1);
        let one_minus_x = idem.sub(idem.unit(), &x);
        let q_x = ncspec_core::algcore::quotient_algebra(&idem, &[x]).map_err(err)?.1;
        let q_1x = ncspec_core::algcore::quotient_algebra(&idem, &[one_minus_x]).map_err(err)?.1;

        let k3 = fixtures::field_power(Q, 3);
        let kill = |i: &[usize]| {
            let gens: Vec<_> = i.iter().map(|j| k3.basis_element(*j)).collect();
            ncspec_core::algcore::quotient_algebra(&k3, &gens).map(|r| r.1)
        };
        let pairs: Vec<(AlgebraMorphism, AlgebraMorphism, usize)> = vec![
            (q_x.clone(), q_1x, 0),
            (q_x.clone(), q_x, 1),
            (kill(&[2]).map_err(err)?, kill(&[0]).map_err(err)?, 1),
            (kill(&[0]).map_err(err)?, kill(&[1, 2]).map_err(err)?, 0),
            (kill(&[]).map_err(err)?, kill(&[0]).map_err(err)?, 2),
        ];
        let mut zero_zero = false;
        for (f, g, expect) in &pairs {
            let r = commutative_collapse_check(f, g, 8).map_err(err)?;
            ensure(r.pass, format!("{r:?}"))?;
            ensure(r.tensor_dim == *expect, format!("tensor dim {} != {expect}", r.tensor_dim))?;
            let fp = r.free_product_dim.ok_or("free product undetermined")?;
            ensure(fp == r.tensor_dim, format!("free product {fp} vs tensor {}", r.tensor_dim))?;
            zero_zero |= fp == 0 && r.tensor_dim == 0;
        }
        ensure(zero_zero, "no vanishing case")
    });
}

#[test]
fn criterion_11_morita_and_products() {
    run(11, "fine spectra of M2, k and kxk", || {
        let fine = |l: &ncspec_core::epiloc::LocalizationLattice| -> Result<SoberSpace, String> {
            Ok(fine_coverage(l).and_then(|p| p.ideals()).map_err(err)?.points())
        };
        let m2 = fine(&fixtures::matrix_lattice(Q, 2).map_err(err)?)?;
        let k = fine(&fixtures::field_lattice(Q).map_err(err)?)?;
        let kk = fine(&fixtures::field_power_lattice(Q, 2).map_err(err)?)?;
        ensure(m2.len() == 1 && m2.homeomorphic(&k), "M2 spectrum is not a point")?;
        ensure(kk.len() == 2 && kk.homeomorphic(&k.disjoint_union(&k)), "kxk is not a disjoint union")
    });
}

#[test]
fn criterion_12_induced_map_and_refuter() {
    run(12, "diagonal kxk -> M2 on points, and the coarse cover refuted", || {
        let lk = fixtures::field_power_lattice(Q, 2).map_err(err)?;
        let lm = fixtures::matrix_lattice(Q, 2).map_err(err)?;
        let diag = fixtures::diagonal(Q);
        let img = induced_lattice_map(&diag, &lk, &lm).map_err(err)?;
        let src = trivial_coverage(&lk).and_then(|p| p.ideals()).map_err(err)?;
        let dst = trivial_coverage(&lm).and_then(|p| p.ideals()).map_err(err)?;
        ensure(dst.points().len() == 1, "M2 has more than one point")?;
        let pm = induced_point_map(&src, &dst, &node_map(&img));
        ensure(pm.continuous, "map not continuous")?;
        let target = pm.images[0].ok_or("no image")?;
        let space = src.points();
        ensure(space.specialization_points() == vec![target], "image is not the specialization point")?;

        let (p1, p2) = fixtures::kk_projections(Q);
        let r = refute_cover(&[p1, p2], &[diag], 8).map_err(err)?;
        ensure(r.refuted_by == Some(0), "M2 does not refute the cover")
    });
}

fn all_algebras() -> Vec<AlgRef> {
    let mut out: Vec<AlgRef> = fixtures::CATALOG
        .iter()
        .filter_map(|(n, _)| fixtures::algebra(n, Q))
        .collect();
    out.push(fixtures::ka2(FieldSpec::prime(7).unwrap()));
    for l in [
        fixtures::ka2_lattice().unwrap(),
        fixtures::field_power_lattice(Q, 3).unwrap(),
        fixtures::matrix_lattice(Q, 2).unwrap(),
    ] {
        out.extend(l.nodes.iter().map(|n| n.target().clone()));
    }
    let m = fixtures::m2(Q);
    let a = fixtures::ka2(Q);
    let inc = fixtures::ka2_inclusion(&a);
    let r = free_product(&inc, &inc, 8).unwrap();
    if let FreeProductStatus::FiniteDim { algebra, .. } = r.status {
        out.push(algebra);
    }
    out.push(m);
    out
}

fn all_frames() -> Vec<Frame> {
    let mut lattices = vec![
        fixtures::ka2_lattice().unwrap(),
        fixtures::field_lattice(Q).unwrap(),
        fixtures::field_power_lattice(Q, 2).unwrap(),
        fixtures::field_power_lattice(Q, 3).unwrap(),
        fixtures::matrix_lattice(Q, 2).unwrap(),
    ];
    lattices.push(fixtures::ka2_lattice_over(FieldSpec::prime(5).unwrap()).unwrap());
    let mut frames = Vec::new();
    for l in &lattices {
        frames.push(trivial_coverage(l).unwrap().ideals().unwrap());
        frames.push(fine_coverage(l).unwrap().ideals().unwrap());
    }
    for f in [fixtures::valuation_posite(), fixtures::dvr_posite()] {
        frames.push(posite_fixture(&f).unwrap().ideals().unwrap());
    }
    frames
}

#[test]
fn criterion_13_property_suites() {
    run(13, "algebra scans, complexes, frames and free products", || {
        for a in all_algebras() {
            a.check_associativity().map_err(err)?;
            a.check_unit().map_err(err)?;
        }

        let a = fixtures::ka2(Q);
        let mut modules = vec![Module::regular(a.clone(), Side::Left), Module::regular(a.clone(), Side::Right)];
        for e in [0, 2] {
            let p = indecomposable_projective(&a, &a.basis_element(e), Side::Left);
            let rad = p.radical_submodule().map_err(err)?;
            modules.push(p.quotient(&rad).map_err(err)?.0);
            modules.push(p);
        }
        modules.push(Module::restriction_of(&fixtures::dual_projection(Q), Side::Left));
        for m in &modules {
            minimal_resolution(m, 6).map_err(err)?.verify().map_err(err)?;
        }

        let kk = fixtures::field_power(Q, 2);
        let (p1, p2) = fixtures::kk_projections(Q);
        let covers = vec![
            (a.clone(), vec![fixtures::ka2_p1(&a), fixtures::ka2_inclusion(&a), fixtures::ka2_s2(&a)]),
            (kk.clone(), vec![p1.clone(), p2.clone()]),
            (kk.clone(), vec![AlgebraMorphism::identity(kk.clone())]),
        ];
        for (base, cover) in &covers {
            let c = cobar(base, cover, DEFAULT_T_MAX).map_err(err)?;
            ensure(c.squares_vanish(), "cobar differential squares to a nonzero map")?;
            ensure(c.exact_positions() == (1..DEFAULT_T_MAX).collect::<Vec<_>>(), "cobar not exact")?;
        }

        for fr in all_frames() {
            ensure(fr.len() <= 1 << 12, "frame too large for the exhaustive scan")?;
            ensure(fr.distributivity_failures().is_empty(), format!("distributivity fails on {:?}", fr.names()))?;
            ensure(fr.prime_filters_bruteforce() == fr.prime_elements(), "prime filters disagree")?;
            let s = fr.points();
            ensure(s.is_t0() && s.is_sober(), "space not sober T0")?;
        }

        let a_lat = fixtures::ka2_lattice().map_err(err)?;
        let maps: Vec<&AlgebraMorphism> = a_lat.nodes.iter().map(|n| &n.map).collect();
        for f in &maps {
            for g in &maps {
                let mut last: Option<(String, Option<usize>)> = None;
                for cap in 2..=6 {
                    let fg = free_product(f, g, cap).map_err(err)?;
                    let gf = free_product(g, f, cap).map_err(err)?;
                    ensure(fg.status.name() == gf.status.name(), "free product not symmetric")?;
                    ensure(fg.status.dim() == gf.status.dim(), "free product dims not symmetric")?;
                    let now = (fg.status.name().to_string(), fg.status.dim());
                    if let Some(prev) = &last {
                        if prev.0 == "zero" || prev.0 == "finite-dim" {
                            ensure(*prev == now, "decided free product changed with the cap")?;
                        }
                    }
                    last = Some(now);
                }
            }
        }
        Ok(())
    });
}
