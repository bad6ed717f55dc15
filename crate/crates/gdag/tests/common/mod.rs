#![allow(dead_code)]

use gdag::dist::{frac, DiscreteDistribution};
use gdag::{nodeset, Gdag, NodeSet};
use proptest::prelude::*;

pub fn empty() -> NodeSet {
    nodeset::<[&str; 0], _>([])
}

pub fn singleton(label: &str) -> NodeSet {
    nodeset([label])
}

/// Subset of `pool` selected by the low bits of `mask`.
pub fn subset(pool: &[&str], mask: usize) -> NodeSet {
    pool.iter()
        .enumerate()
        .filter(|&(i, _)| mask & (1 << i) != 0)
        .map(|(_, &l)| l)
        .collect()
}

/// Arbitrary labeled DAG with 3..=max_nodes nodes (edges only from lower to
/// higher index, so acyclicity holds by construction).
pub fn gdag_strategy(max_nodes: usize) -> impl Strategy<Value = Gdag> {
    (3..=max_nodes).prop_flat_map(|n| {
        let flags = prop::collection::vec(any::<bool>(), n);
        let edges = prop::collection::vec(any::<bool>(), n * (n - 1) / 2);
        (flags, edges).prop_map(move |(flags, edges)| {
            let mut g = Gdag::new();
            for (i, observed) in flags.iter().enumerate() {
                g.add_node(&format!("V{i}"), *observed).unwrap();
            }
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    if edges[k] {
                        g.add_edge(&format!("V{i}"), &format!("V{j}")).unwrap();
                    }
                    k += 1;
                }
            }
            g
        })
    })
}

/// Exact distribution over 2..=max_vars binary variables, built from small
/// integer counts so every cross-multiplication defect is at least 1/total^2.
/// Keeps dependent triples far from the identity tolerance.
pub fn dist_strategy(max_vars: usize) -> impl Strategy<Value = DiscreteDistribution> {
    (2..=max_vars).prop_flat_map(|n| {
        prop::collection::vec(0u32..=4, 1 << n).prop_filter_map("zero mass", move |counts| {
            let total: u32 = counts.iter().sum();
            if total == 0 {
                return None;
            }
            let vars: Vec<(String, usize)> =
                (0..n).map(|i| (format!("X{i}"), 2)).collect();
            let borrowed: Vec<(&str, usize)> =
                vars.iter().map(|(l, c)| (l.as_str(), *c)).collect();
            let mass = counts
                .iter()
                .map(|&c| frac(c as i64, total as i64))
                .collect();
            Some(DiscreteDistribution::new(&borrowed, mass).unwrap())
        })
    })
}

/// Entrywise equality of two distributions over identical variable lists.
pub fn same_table(a: &DiscreteDistribution, b: &DiscreteDistribution) -> bool {
    a.variables() == b.variables()
        && a.cardinalities() == b.cardinalities()
        && a.assignments().zip(b.assignments()).all(|(x, y)| x == y)
}
