mod common;

use common::{empty, gdag_strategy, subset};
use gdag::{catalog, nodeset, Gdag};
use proptest::prelude::*;

fn all_labels(g: &Gdag) -> Vec<&str> {
    g.labels().iter().map(|s| s.as_str()).collect()
}

fn check_symmetry(g: &Gdag) {
    let labels = all_labels(g);
    for (i, &a) in labels.iter().enumerate() {
        for &b in &labels[i + 1..] {
            let rest: Vec<&str> = labels
                .iter()
                .copied()
                .filter(|&v| v != a && v != b)
                .collect();
            for mask in 0..(1usize << rest.len()) {
                let z = subset(&rest, mask);
                let xy = g.d_separated(&nodeset([a]), &nodeset([b]), &z).unwrap();
                let yx = g.d_separated(&nodeset([b]), &nodeset([a]), &z).unwrap();
                assert_eq!(xy, yx, "symmetry broke at ({a}, {b} | {z:?})");
            }
        }
    }
}

/// Deleting nodes outside x u y u z removes paths and opens no colliders, so
/// separation survives. Also pins e_separated to its delete-then-separate
/// definition.
fn check_deletion_monotonicity(g: &Gdag) {
    let labels = all_labels(g);
    for (i, &a) in labels.iter().enumerate() {
        for &b in &labels[i + 1..] {
            let rest: Vec<&str> = labels
                .iter()
                .copied()
                .filter(|&v| v != a && v != b)
                .collect();
            for zmask in 0..(1usize << rest.len()) {
                let z = subset(&rest, zmask);
                let sep = g.d_separated(&nodeset([a]), &nodeset([b]), &z).unwrap();
                let free: Vec<&str> = rest
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| zmask & (1 << k) == 0)
                    .map(|(_, &v)| v)
                    .collect();
                for wmask in 1..(1usize << free.len()) {
                    let w = subset(&free, wmask);
                    let esep = g
                        .e_separated(&nodeset([a]), &nodeset([b]), &z, &w)
                        .unwrap();
                    let deleted = g
                        .delete_nodes(&w)
                        .unwrap()
                        .d_separated(&nodeset([a]), &nodeset([b]), &z)
                        .unwrap();
                    assert_eq!(esep, deleted, "e_separated != delete + d_separated");
                    if sep {
                        assert!(esep, "deletion broke separation ({a}, {b} | {z:?} - {w:?})");
                    }
                }
            }
        }
    }
}

fn check_projection(g: &Gdag) {
    let p = g.canonical_projection();
    assert!(p.is_canonical());
    assert_eq!(p.canonical_projection(), p);
    assert_eq!(g.skeleton(), p.skeleton());
    assert_eq!(g.observed_labels(), p.observed_labels());
}

/// Facets are maximal (pairwise incomparable), have at least two members, and
/// every facet is a clique of the skeleton. Together with the arrows they
/// generate exactly the skeleton's adjacency.
fn check_facets(g: &Gdag) {
    let facets = g.maximal_connected_subsets();
    let skeleton = g.skeleton();
    for (i, f) in facets.iter().enumerate() {
        assert!(f.len() >= 2);
        for v in f.iter() {
            assert!(g.is_observed(v).unwrap());
        }
        for (j, other) in facets.iter().enumerate() {
            if i != j {
                assert!(!f.is_subset(other), "facet {f:?} inside {other:?}");
            }
        }
        let members: Vec<&String> = f.iter().collect();
        for (k, a) in members.iter().enumerate() {
            for b in &members[k + 1..] {
                assert!(skeleton.has_edge(a, b), "facet pair {a}, {b} not adjacent");
            }
        }
    }
    let observed = g.observed_labels();
    for (i, &a) in observed.iter().enumerate() {
        for &b in &observed[i + 1..] {
            let arrow = g.has_edge(a, b) || g.has_edge(b, a);
            let shared = facets.iter().any(|f| f.contains(a) && f.contains(b));
            assert_eq!(
                skeleton.has_edge(a, b),
                arrow || shared,
                "adjacency of ({a}, {b}) disagrees with arrows + facets"
            );
        }
    }
}

#[test]
fn catalog_graphs_satisfy_graph_invariants() {
    for entry in catalog::entries() {
        check_symmetry(&entry.graph);
        check_projection(&entry.graph);
        check_facets(&entry.graph);
    }
}

#[test]
fn catalog_graphs_deletion_monotonicity() {
    for entry in catalog::entries() {
        check_deletion_monotonicity(&entry.graph);
    }
}

#[test]
fn empty_conditioning_set_matches_marginal_independence() {
    let g = &catalog::get("hlp-17").unwrap().graph;
    assert!(g
        .d_separated(&nodeset(["C"]), &nodeset(["D"]), &empty())
        .unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn random_graphs_dsep_symmetry(g in gdag_strategy(7)) {
        check_symmetry(&g);
    }

    #[test]
    fn random_graphs_deletion_monotonicity(g in gdag_strategy(6)) {
        check_deletion_monotonicity(&g);
    }

    #[test]
    fn random_graphs_projection_idempotent(g in gdag_strategy(7)) {
        check_projection(&g);
    }

    #[test]
    fn random_graphs_facets(g in gdag_strategy(7)) {
        check_facets(&g);
    }

    #[test]
    fn set_valued_dsep_symmetry(g in gdag_strategy(6), xm in 1usize..64, ym in 1usize..64, zm in 0usize..64) {
        let labels: Vec<&str> = g.labels().iter().map(|s| s.as_str()).collect();
        let n = labels.len();
        let clip = (1usize << n) - 1;
        let xm = xm & clip;
        let ym = ym & clip & !xm;
        let zm = zm & clip & !xm & !ym;
        prop_assume!(xm != 0 && ym != 0);
        let x = subset(&labels, xm);
        let y = subset(&labels, ym);
        let z = subset(&labels, zm);
        prop_assert_eq!(
            g.d_separated(&x, &y, &z).unwrap(),
            g.d_separated(&y, &x, &z).unwrap()
        );
    }
}
