use gdag::{nodeset, Gdag};

fn hlp17() -> Gdag {
    Gdag::build(
        &[
            ("F", true),
            ("E", true),
            ("D", true),
            ("A", false),
            ("C", true),
            ("B", false),
        ],
        &[
            ("A", "F"),
            ("A", "C"),
            ("B", "C"),
            ("B", "E"),
            ("C", "E"),
            ("D", "E"),
            ("E", "F"),
        ],
    )
    .unwrap()
}

#[test]
fn one_sided_bell_dsep() {
    let g = Gdag::build(
        &[("A", true), ("X", true), ("Y", true), ("U", false)],
        &[("A", "X"), ("U", "X"), ("U", "Y")],
    )
    .unwrap();
    assert!(g
        .d_separated(&nodeset(["A"]), &nodeset(["Y"]), &nodeset::<[&str; 0], _>([]))
        .unwrap());
    assert!(!g
        .d_separated(&nodeset(["A"]), &nodeset(["Y"]), &nodeset(["X"]))
        .unwrap());
}

#[test]
fn hlp17_separations() {
    let g = hlp17();
    assert!(g
        .d_separated(&nodeset(["C"]), &nodeset(["D"]), &nodeset::<[&str; 0], _>([]))
        .unwrap());
    assert!(!g
        .d_separated(&nodeset(["C"]), &nodeset(["D"]), &nodeset(["E"]))
        .unwrap());
    assert!(!g
        .d_separated(&nodeset(["F"]), &nodeset(["D"]), &nodeset(["C"]))
        .unwrap());
    assert!(g
        .e_separated(
            &nodeset(["F"]),
            &nodeset(["D"]),
            &nodeset(["C"]),
            &nodeset(["E"])
        )
        .unwrap());
    assert_eq!(g.descendants(&nodeset(["C"])).unwrap(), nodeset(["E", "F"]));
}

#[test]
fn evans_projection() {
    let g = Gdag::build(
        &[
            ("C", true),
            ("D", true),
            ("E", true),
            ("G", true),
            ("A", false),
            ("B", false),
        ],
        &[
            ("A", "B"),
            ("A", "D"),
            ("A", "G"),
            ("B", "C"),
            ("B", "E"),
            ("D", "C"),
        ],
    )
    .unwrap();
    assert!(g.hidden_path_exists("A", "C").unwrap());
    assert!(g.hidden_path_exists("A", "E").unwrap());
    assert!(!g.hidden_path_exists("D", "C").unwrap());
    assert_eq!(
        g.maximal_connected_subsets(),
        vec![nodeset(["C", "D", "E", "G"])]
    );
    let p = g.canonical_projection();
    assert!(p.is_canonical());
    assert!(!g.is_canonical());
    assert_eq!(p.observed_labels(), vec!["C", "D", "E", "G"]);
    assert_eq!(p.latent_labels(), vec!["u_C_D_E_G"]);
    assert!(p.has_edge("D", "C"));
    assert_eq!(p.edges_labeled().count(), 5);
    assert_eq!(p.canonical_projection(), p);
    assert_eq!(g.skeleton().edges().len(), 6);
    assert_eq!(g.skeleton(), p.skeleton());
    assert!(g.observably_isomorphic(&g));
    assert!(!g.observably_isomorphic(&p));
}

#[test]
fn oracle_agrees_on_hlp17() {
    let g = hlp17();
    let oracle = gdag::naive::PathOracle::new(&g);
    let labels = ["F", "E", "D", "C"];
    for a in labels {
        for b in labels {
            if a >= b {
                continue;
            }
            let rest: Vec<&str> = labels.iter().copied().filter(|&v| v != a && v != b).collect();
            for bits in 0..(1 << rest.len()) {
                let z = nodeset(
                    rest.iter()
                        .enumerate()
                        .filter(|&(i, _)| bits & (1 << i) != 0)
                        .map(|(_, &v)| v),
                );
                let fast = g.d_separated(&nodeset([a]), &nodeset([b]), &z).unwrap();
                let slow = oracle.d_separated(&nodeset([a]), &nodeset([b]), &z).unwrap();
                assert_eq!(fast, slow, "disagree on ({a} _||_ {b} | {z:?})");
            }
        }
    }
}

use gdag::ci::{ci_consistent, ci_holds_in_distribution, observed_ci_relations_ordered, CiRelation};
use gdag::dist::{frac, DiscreteDistribution};

fn tp() -> DiscreteDistribution {
    DiscreteDistribution::from_support(
        &[("A", 2), ("D", 2), ("E", 2), ("F", 2)],
        &[
            (vec![0, 0, 0, 0], frac(1, 4)),
            (vec![0, 1, 1, 0], frac(1, 4)),
            (vec![1, 0, 0, 0], frac(1, 4)),
            (vec![1, 1, 0, 1], frac(1, 4)),
        ],
    )
    .unwrap()
}

fn hlp15() -> Gdag {
    Gdag::build(
        &[("A", true), ("D", true), ("E", true), ("F", true), ("B", false), ("C", false)],
        &[("A", "E"), ("A", "F"), ("B", "D"), ("B", "F"), ("C", "D"), ("C", "E")],
    )
    .unwrap()
}

fn hlp20() -> Gdag {
    Gdag::build(
        &[("A", true), ("D", true), ("E", true), ("F", true), ("B", false), ("C", false)],
        &[("A", "D"), ("A", "E"), ("E", "F"), ("C", "D"), ("C", "E"), ("B", "D"), ("B", "F")],
    )
    .unwrap()
}

#[test]
fn ci_sets_match_frozen_values() {
    let seventeen = hlp17();
    let rs = observed_ci_relations_ordered(&seventeen, None).unwrap();
    assert_eq!(rs.len(), 1);
    assert_eq!(rs[0].to_string(), "C _||_ D");

    let fifteen = hlp15();
    let rs: Vec<String> = observed_ci_relations_ordered(&fifteen, None)
        .unwrap()
        .iter()
        .map(|r| r.to_string())
        .collect();
    assert_eq!(rs, ["A _||_ D", "E _||_ F | A"]);

    let twenty = hlp20();
    let rs: Vec<String> = observed_ci_relations_ordered(&twenty, None)
        .unwrap()
        .iter()
        .map(|r| r.to_string())
        .collect();
    assert_eq!(rs, ["A _||_ F | E"]);
}

#[test]
fn tilde_p_pins() {
    let p = tp();
    let f = p.marginalize(&nodeset(["F"])).unwrap();
    assert_eq!(*f.mass_at(&[0]).unwrap(), frac(3, 4));
    assert_eq!(*f.mass_at(&[1]).unwrap(), frac(1, 4));

    let a0 = p.condition(&[("A", 0)]).unwrap();
    let r = CiRelation::new(nodeset(["E"]), nodeset(["D"]), nodeset::<[&str; 0], _>([])).unwrap();
    assert!(!ci_holds_in_distribution(&a0, &r).unwrap());
    assert!((a0.conditional_mutual_information(&nodeset(["E"]), &nodeset(["D"]), &nodeset::<[&str; 0], _>([])).unwrap() - 1.0).abs() < 1e-12);
    assert!(a0.conditional_mutual_information(&nodeset(["F"]), &nodeset(["D"]), &nodeset::<[&str; 0], _>([])).unwrap().abs() < 1e-12);

    let c15 = ci_consistent(&p, &hlp15(), None).unwrap();
    assert!(c15.consistent);
    let c20 = ci_consistent(&p, &hlp20(), None).unwrap();
    assert!(!c20.consistent);
    assert_eq!(c20.first_violation.unwrap().to_string(), "A _||_ F | E");
}

use gdag::catalog;
use gdag::interest::{
    chord_addition_report, chord_deletion_report, classify, fine_grained_lhs_eq1,
    skeleton_viability, tilde_p, tilde_p_prime, ClassifyOptions, Method, Status,
};

#[test]
fn catalog_verifies() {
    catalog::verify_all().unwrap();
}

#[test]
fn classify_details_pinned() {
    let options = ClassifyOptions::default();

    let triangle = catalog::get("triangle").unwrap();
    let v = classify(&triangle.graph, &options).unwrap();
    assert_eq!(v.status, Status::Inconclusive);
    assert_eq!(
        v.detail,
        "skeleton method: comparator exists but skeletons are equal; \
         e-separation: no certificate found; fine-grained: no registered witness"
    );

    let bell = catalog::get("bell").unwrap();
    let v = classify(&bell.graph, &options).unwrap();
    assert_eq!(v.status, Status::Inconclusive);
    assert_eq!(
        v.detail,
        "skeleton method: no comparator (graph has observed CI relations); \
         e-separation: no certificate found; fine-grained: no registered witness"
    );

    let seventeen = catalog::get("hlp-17").unwrap();
    let v = classify(&seventeen.graph, &options).unwrap();
    assert_eq!(v.status, Status::Interesting);
    assert_eq!(v.method, Method::ESeparation);
    assert_eq!(v.detail, "e-separation: X={F} Y={D} Z={C} W={E}");
    let w = v.witness.unwrap();
    assert!((w.lhs - 1.0).abs() < 1e-12);
    assert_eq!(w.rhs, 0.0);
    assert_eq!(w.violated_constraint, "e-separation constraint");

    let twentyone = catalog::get("hlp-21").unwrap();
    let v = classify(&twentyone.graph, &options).unwrap();
    assert_eq!(v.status, Status::Interesting);
    assert_eq!(v.method, Method::SkeletonMethod);
}

#[test]
fn eq1_pins() {
    let (lhs, rhs) = fine_grained_lhs_eq1(&tilde_p()).unwrap();
    assert!((lhs - 2.0).abs() < 1e-12);
    assert!((rhs - 1.0).abs() < 1e-12);
    let (lhs, rhs) = fine_grained_lhs_eq1(&tilde_p_prime()).unwrap();
    assert!((lhs - 2.0).abs() < 1e-12);
    assert!((rhs - 1.0).abs() < 1e-12);
}

#[test]
fn appendix8_chords() {
    let g = &catalog::get("appendix-8").unwrap().graph;

    let target = gdag::ci::observed_ci_relations(g, None).unwrap();
    let intact = skeleton_viability(&g.skeleton(), &target, None).unwrap();
    assert!(intact.viable);

    let deletions = chord_deletion_report(g, None).unwrap();
    assert_eq!(deletions.len(), 6);
    for report in &deletions {
        assert!(!report.viable, "deleting {:?} unexpectedly viable", report.chord);
    }
    let xz = deletions
        .iter()
        .find(|r| r.chord == ("X".to_string(), "Z".to_string()))
        .unwrap();
    assert_eq!(xz.first_conflict.as_ref().unwrap().to_string(), "X _||_ Z");

    let additions = chord_addition_report(g, None).unwrap();
    let outcomes: Vec<(&str, &str, bool)> = additions
        .iter()
        .map(|r| (r.chord.0.as_str(), r.chord.1.as_str(), r.addable))
        .collect();
    assert_eq!(
        outcomes,
        vec![
            ("A", "X", false),
            ("A", "Z", false),
            ("W", "X", false),
            ("X", "Y", false),
        ]
    );

    let verdict = classify(g, &ClassifyOptions::default()).unwrap();
    assert_eq!(verdict.status, Status::Interesting);
    assert_eq!(verdict.method, Method::ESeparation);
    assert!(verdict.witness.is_none());
    assert_eq!(
        verdict.detail,
        "e-separation: X={X} Y={Y} Z={W} W={Z} (no consistent correlated witness)"
    );
}

#[test]
fn format_smoke() {
    use gdag::format;

    let g = hlp17();
    let text = format::serialize_graph(&g);
    let back = format::parse_graph(&text).unwrap();
    assert_eq!(format::serialize_graph(&back), text);
    let json = format::serialize_graph_json(&g);
    let back = format::parse_graph(&json).unwrap();
    assert_eq!(format::serialize_graph(&back), text);

    let r = format::parse_ci_relation("A,B _||_ C | D,E").unwrap();
    assert_eq!(r.to_string(), "A,B _||_ C | D,E");
    let r = format::parse_ci_relation("A _||_ C").unwrap();
    assert_eq!(r.to_string(), "A _||_ C");

    let dist_text = "var X 2\nvar Y 2\np 0 0 1/2\np 1 1 1/2\n";
    let d = format::parse_distribution(dist_text).unwrap();
    assert_eq!(format::serialize_distribution(&d), dist_text);

    let model_text = "\
node U latent
node X observed
node Y observed
edge U X
edge X Y
cpt U | - : 1/3 2/3
cpt X | U=0 : 1/1 0/1
cpt X | U=1 : 0/1 1/1
cpt Y | X=0 : 1/2 1/2
cpt Y | X=1 : 1/4 3/4
";
    let m = format::parse_model(model_text).unwrap();
    assert_eq!(format::serialize_model(&m), model_text);

    let ineq_text = "\
inequality eq1
exogenous A
sections 0 1
term +1 D : C | - section 0
term -1 D : D | C section 1
rhs C
end
";
    let qs = format::parse_inequalities(ineq_text).unwrap();
    assert_eq!(qs.len(), 1);
    assert_eq!(format::serialize_inequality(&qs[0]), ineq_text);
}
