use proptest::prelude::*;

use lineconf::catalog::{
    fano, p1_power, projective_configuration, quadric_configuration, schlaefli_configuration,
};
use lineconf::config::is_morphism;
use lineconf::degree::{
    evaluate_intersection, expand_power, gamma00_degree_with, DivisorPolynomial, IntersectionRules,
};
use lineconf::gf2geom::{
    enumerate_projective_points, lines_in_point_set, minus_quadric, point_count_formula,
    variety_points, QuadraticForm,
};
use lineconf::iso::{are_isomorphic, automorphism_group_order, canonical_form};
use lineconf::vconfig::{
    check_numeric_relations, classify_v_configurations, edge_count_identity_checks, CheckStatus,
    SearchBudget,
};
use lineconf::LineConfiguration;

fn perm(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle()
}

fn small_catalog() -> Vec<LineConfiguration> {
    vec![
        fano(),
        projective_configuration(1).unwrap(),
        projective_configuration(3).unwrap(),
        p1_power(2).unwrap(),
        p1_power(3).unwrap(),
        quadric_configuration(2).unwrap(),
        quadric_configuration(3).unwrap(),
    ]
}

/// Random quadratic form on `dim + 1` variables from a monomial mask.
fn form_from_mask(dim: usize, mask: u32) -> QuadraticForm {
    let vars = dim + 1;
    let mut monos = Vec::new();
    let mut bit = 0;
    for i in 1..=vars {
        for j in i..=vars {
            if mask >> bit & 1 == 1 {
                monos.push((i, j));
            }
            bit += 1;
        }
    }
    QuadraticForm::new(dim, &monos).unwrap()
}

#[test]
fn quadric_counts_match_formula() {
    for n in 1..=4 {
        let pts = variety_points(&minus_quadric(n).unwrap()).unwrap();
        assert_eq!(pts.len() as u64, point_count_formula(n).unwrap(), "n = {n}");
    }
}

#[test]
fn enumeration_is_repeatable() {
    for n in 0..=6 {
        let a = enumerate_projective_points(n).unwrap();
        let b = enumerate_projective_points(n).unwrap();
        assert_eq!(a, b);
        assert!(a.windows(2).all(|w| w[0].bits() < w[1].bits()));
    }
}

#[test]
fn quadric_incidence_graphs_are_strongly_regular() {
    for n in [3, 4] {
        let c = quadric_configuration(n).unwrap();
        let g = c.incidence_graph();
        let mut on_edges = std::collections::BTreeSet::new();
        let mut off_edges = std::collections::BTreeSet::new();
        for p in 0..c.num_points() {
            for q in (p + 1)..c.num_points() {
                let common = g.neighbors(p).iter().filter(|x| g.has_edge(q, **x)).count();
                if g.has_edge(p, q) {
                    on_edges.insert(common);
                } else {
                    off_edges.insert(common);
                }
            }
        }
        assert_eq!(on_edges.len(), 1, "n = {n}");
        assert_eq!(off_edges.len(), 1, "n = {n}");
    }
}

#[test]
fn catalog_entries_are_self_isomorphic() {
    for c in small_catalog()
        .into_iter()
        .chain([schlaefli_configuration()])
    {
        let w = are_isomorphic(&c, &c).expect("reflexive");
        assert!(is_morphism(&w.map, &c, &c).unwrap());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn lines_are_closed_and_double_counted(dim in 1usize..=4, mask in any::<u32>()) {
        let form = form_from_mask(dim, mask);
        let set = variety_points(&form).unwrap();
        let lines = lines_in_point_set(&set);
        let pts = set.points();
        for l in &lines {
            prop_assert_eq!(pts[l[0]].bits() ^ pts[l[1]].bits(), pts[l[2]].bits());
        }
        let mut deg = vec![0usize; set.len()];
        for l in &lines {
            for &p in l {
                deg[p] += 1;
            }
        }
        prop_assert_eq!(deg.iter().sum::<usize>(), 3 * lines.len());
        // every closed triple in the set is listed
        let mut expected = 0;
        for a in 0..pts.len() {
            for b in (a + 1)..pts.len() {
                if let Some(c) = set.index_of(&lineconf::gf2geom::ProjectivePoint::new(
                    lineconf::gf2geom::GF2Vector::new(dim + 1, pts[a].bits() ^ pts[b].bits()).unwrap(),
                ).unwrap()) {
                    if c > b {
                        expected += 1;
                    }
                }
            }
        }
        prop_assert_eq!(lines.len(), expected);
    }

    #[test]
    fn profile_identities_hold_under_relabeling(
        (which, p) in (0usize..7).prop_flat_map(|w| (Just(w), perm(small_catalog()[w].num_points())))
    ) {
        let c = &small_catalog()[which];
        let r = c.relabel(&p).unwrap();
        let prof = r.profile();
        prop_assert_eq!(&prof, &c.profile());
        if prof.symmetric && prof.is_connected() {
            let report = check_numeric_relations(&r, None);
            prop_assert!(report.passed(), "{}", report.to_text());
            prop_assert!(edge_count_identity_checks(&prof).iter().all(|x| x.status == CheckStatus::Pass));
        }
    }

    #[test]
    fn automorphism_order_ignores_labels(p in perm(7), q in perm(15), r in perm(27)) {
        prop_assert_eq!(automorphism_group_order(&fano().relabel(&p).unwrap()), 168);
        prop_assert_eq!(automorphism_group_order(&projective_configuration(3).unwrap().relabel(&q).unwrap()), 20160);
        prop_assert_eq!(automorphism_group_order(&p1_power(3).unwrap().relabel(&r).unwrap()), 6 * 6 * 6 * 6); // S_3 wr S_3
    }

    #[test]
    fn witnesses_invert_and_compose(p in perm(27), q in perm(27)) {
        let a = quadric_configuration(3).unwrap();
        let b = a.relabel(&p).unwrap();
        let c = b.relabel(&q).unwrap();
        let ab = are_isomorphic(&a, &b).unwrap();
        let bc = are_isomorphic(&b, &c).unwrap();
        prop_assert!(is_morphism(&ab.map, &a, &b).unwrap());
        let ba = ab.inverse().unwrap();
        prop_assert!(is_morphism(&ba.map, &b, &a).unwrap());
        let ac = ab.then(&bc).unwrap();
        prop_assert!(is_morphism(&ac.map, &a, &c).unwrap());
        prop_assert_eq!(canonical_form(&a).certificate, canonical_form(&c).certificate);
    }

    #[test]
    fn expand_power_is_multiplicative(t in -5i64..=5, e in -5i64..=5, j in 0u32..=4, k in 0u32..=4) {
        let base = DivisorPolynomial::linear(t, e);
        let lhs = expand_power(&base, j + k).unwrap();
        let rhs = &expand_power(&base, j).unwrap() * &expand_power(&base, k).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn evaluation_is_linear(
        a in proptest::array::uniform5(-50i64..=50),
        b in proptest::array::uniform5(-50i64..=50),
        vals in proptest::array::uniform5(-30i64..=30),
        k in -7i64..=7,
    ) {
        let mut rules = IntersectionRules::default();
        for (i, v) in vals.iter().enumerate() {
            rules = rules.with_value(4 - i as u32, i as u32, *v).unwrap();
        }
        let poly = |c: &[i64; 5]| {
            c.iter().enumerate().fold(DivisorPolynomial::zero(), |acc, (i, &x)| {
                &acc + &DivisorPolynomial::monomial(4 - i as u32, i as u32, x)
            })
        };
        let (p, q) = (poly(&a), poly(&b));
        let sum = evaluate_intersection(&(&p + &q), &rules).unwrap();
        prop_assert_eq!(sum, evaluate_intersection(&p, &rules).unwrap() + evaluate_intersection(&q, &rules).unwrap());
        prop_assert_eq!(
            evaluate_intersection(&p.scale(k), &rules).unwrap(),
            k * evaluate_intersection(&p, &rules).unwrap()
        );
    }

    #[test]
    fn boundary_degree_halves_exactly(vals in proptest::array::uniform5(-1000i64..=1000)) {
        let mut rules = IntersectionRules::default();
        for (i, v) in vals.iter().enumerate() {
            rules = rules.with_value(4 - i as u32, i as u32, *v).unwrap();
        }
        let full = evaluate_intersection(
            &expand_power(&DivisorPolynomial::gamma00_class(), 4).unwrap(),
            &rules,
        ).unwrap();
        prop_assert_eq!(full % 2, 0);
        prop_assert_eq!(gamma00_degree_with(&rules).unwrap() * 2, full);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn classifier_ignores_labels_of_v(p in perm(3), q in perm(5)) {
        let budget = SearchBudget::nodes(10_000_000);
        for (v, perm) in [(projective_configuration(1).unwrap(), p), (quadric_configuration(2).unwrap(), q)] {
            let base = classify_v_configurations(&v, budget).unwrap();
            let moved = classify_v_configurations(&v.relabel(&perm).unwrap(), budget).unwrap();
            let certs = |c: &lineconf::vconfig::Classification| {
                let mut k: Vec<_> = c.classes.iter().map(|w| canonical_form(w).certificate).collect();
                k.sort();
                k
            };
            prop_assert_eq!(certs(&base), certs(&moved));
            prop_assert_eq!(base.stats.nodes, moved.stats.nodes);
        }
    }
}
