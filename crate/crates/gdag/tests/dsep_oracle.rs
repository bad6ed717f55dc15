mod common;

use common::{gdag_strategy, subset};
use gdag::naive::PathOracle;
use gdag::{catalog, nodeset, Gdag};
use proptest::prelude::*;

/// Every singleton query against the path-enumeration oracle.
fn check_against_oracle(g: &Gdag) {
    let oracle = PathOracle::new(g);
    let labels: Vec<&str> = g.labels().iter().map(|s| s.as_str()).collect();
    for (i, &a) in labels.iter().enumerate() {
        for &b in &labels[i + 1..] {
            let rest: Vec<&str> = labels
                .iter()
                .copied()
                .filter(|&v| v != a && v != b)
                .collect();
            for mask in 0..(1usize << rest.len()) {
                let z = subset(&rest, mask);
                let fast = g.d_separated(&nodeset([a]), &nodeset([b]), &z).unwrap();
                let slow = oracle
                    .d_separated(&nodeset([a]), &nodeset([b]), &z)
                    .unwrap();
                assert_eq!(fast, slow, "disagree on ({a} _||_ {b} | {z:?})");
            }
        }
    }
}

#[test]
fn catalog_graphs_match_oracle() {
    for entry in catalog::entries() {
        check_against_oracle(&entry.graph);
    }
}

#[test]
fn oracle_agrees_on_set_valued_queries() {
    let g = &catalog::get("appendix-8").unwrap().graph;
    let oracle = PathOracle::new(g);
    let labels: Vec<&str> = g.labels().iter().map(|s| s.as_str()).collect();
    let n = labels.len();
    for xm in 1usize..(1 << n) {
        for ym in 1usize..(1 << n) {
            if xm & ym != 0 || ym < xm {
                continue;
            }
            let zm = !(xm | ym) & ((1 << n) - 1);
            let x = subset(&labels, xm);
            let y = subset(&labels, ym);
            let z = subset(&labels, zm);
            assert_eq!(
                g.d_separated(&x, &y, &z).unwrap(),
                oracle.d_separated(&x, &y, &z).unwrap(),
                "disagree on ({x:?} _||_ {y:?} | {z:?})"
            );
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn random_graphs_match_oracle(g in gdag_strategy(7)) {
        check_against_oracle(&g);
    }

    #[test]
    fn esep_matches_oracle_on_deleted_graph(g in gdag_strategy(6), wm in 1usize..64) {
        let labels: Vec<&str> = g.labels().iter().map(|s| s.as_str()).collect();
        let n = labels.len();
        let wm = wm & ((1usize << n) - 1);
        prop_assume!(wm != 0 && wm.count_ones() as usize <= n - 2);
        let w = subset(&labels, wm);
        let kept: Vec<&str> = labels
            .iter()
            .enumerate()
            .filter(|&(i, _)| wm & (1 << i) == 0)
            .map(|(_, &l)| l)
            .collect();
        let deleted = g.delete_nodes(&w).unwrap();
        let oracle = PathOracle::new(&deleted);
        for (i, &a) in kept.iter().enumerate() {
            for &b in &kept[i + 1..] {
                let rest: Vec<&str> = kept
                    .iter()
                    .copied()
                    .filter(|&v| v != a && v != b)
                    .collect();
                for mask in 0..(1usize << rest.len()) {
                    let z = subset(&rest, mask);
                    let esep = g
                        .e_separated(&nodeset([a]), &nodeset([b]), &z, &w)
                        .unwrap();
                    let slow = oracle
                        .d_separated(&nodeset([a]), &nodeset([b]), &z)
                        .unwrap();
                    prop_assert_eq!(esep, slow, "disagree on ({} _||_ {} | {:?} - {:?})", a, b, z, w);
                }
            }
        }
    }
}
