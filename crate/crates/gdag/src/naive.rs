//! Literal path-blocking d-separation. Every simple undirected path between
//! the query endpoints is materialized and tested, so this is exponential and
//! only suitable for small graphs. The test suite and the reproduction
//! command use it as an independent oracle for the moralization-based
//! algorithm in [`crate::graph::Gdag::d_separated`].

use std::collections::BTreeMap;

use crate::graph::{Gdag, GraphError, NodeSet};

struct PathBlocking {
    noncolliders: u64,
    collider_closures: Vec<u64>,
}

impl PathBlocking {
    fn blocked_by(&self, z: u64) -> bool {
        self.noncolliders & z != 0 || self.collider_closures.iter().any(|&c| c & z == 0)
    }
}

/// Precomputed blocking data for every simple undirected path of a fixed
/// graph, reusable across conditioning sets.
pub struct PathOracle {
    n: usize,
    labels: Vec<String>,
    index: BTreeMap<String, usize>,
    paths: Vec<Vec<PathBlocking>>,
}

impl PathOracle {
    pub fn new(g: &Gdag) -> Self {
        let n = g.node_count();
        let mut undirected = vec![0u64; n];
        for &(t, h) in &g.edges {
            undirected[t] |= 1 << h;
            undirected[h] |= 1 << t;
        }
        let closure: Vec<u64> = (0..n)
            .map(|v| (1 << v) | g.descendants_mask(1 << v))
            .collect();
        let mut paths = Vec::with_capacity(n * n);
        paths.resize_with(n * n, Vec::new);
        let mut stack = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                stack.clear();
                stack.push(a);
                enumerate(
                    g,
                    &undirected,
                    &closure,
                    &mut stack,
                    1 << a,
                    b,
                    &mut paths[a * n + b],
                );
            }
        }
        PathOracle {
            n,
            labels: g.labels.clone(),
            index: g.index.clone(),
            paths,
        }
    }

    fn mask_of(&self, s: &NodeSet) -> Result<u64, GraphError> {
        let mut m = 0u64;
        for label in s {
            let i = self
                .index
                .get(label)
                .ok_or_else(|| GraphError::UnknownNode(label.clone()))?;
            m |= 1 << i;
        }
        Ok(m)
    }

    pub fn d_separated(&self, x: &NodeSet, y: &NodeSet, z: &NodeSet) -> Result<bool, GraphError> {
        if x.is_empty() || y.is_empty() {
            return Err(GraphError::EmptyQuerySet);
        }
        let (xm, ym, zm) = (self.mask_of(x)?, self.mask_of(y)?, self.mask_of(z)?);
        let clash = (xm & ym) | (xm & zm) | (ym & zm);
        if clash != 0 {
            let v = clash.trailing_zeros() as usize;
            return Err(GraphError::OverlappingSets(self.labels[v].clone()));
        }
        Ok(self.d_separated_masks(xm, ym, zm))
    }

    pub(crate) fn d_separated_masks(&self, x: u64, y: u64, z: u64) -> bool {
        let mut xs = x;
        while xs != 0 {
            let a = xs.trailing_zeros() as usize;
            xs &= xs - 1;
            let mut ys = y;
            while ys != 0 {
                let b = ys.trailing_zeros() as usize;
                ys &= ys - 1;
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                for p in &self.paths[lo * self.n + hi] {
                    if !p.blocked_by(z) {
                        return false;
                    }
                }
            }
        }
        true
    }
}

fn enumerate(
    g: &Gdag,
    undirected: &[u64],
    closure: &[u64],
    path: &mut Vec<usize>,
    visited: u64,
    target: usize,
    out: &mut Vec<PathBlocking>,
) {
    let v = *path.last().unwrap();
    if v == target {
        let mut noncolliders = 0u64;
        let mut collider_closures = Vec::new();
        for i in 1..path.len() - 1 {
            let (p, m, s) = (path[i - 1], path[i], path[i + 1]);
            if g.edge_set.contains(&(p, m)) && g.edge_set.contains(&(s, m)) {
                collider_closures.push(closure[m]);
            } else {
                noncolliders |= 1 << m;
            }
        }
        out.push(PathBlocking {
            noncolliders,
            collider_closures,
        });
        return;
    }
    let mut nb = undirected[v] & !visited;
    while nb != 0 {
        let w = nb.trailing_zeros() as usize;
        nb &= nb - 1;
        path.push(w);
        enumerate(g, undirected, closure, path, visited | (1 << w), target, out);
        path.pop();
    }
}

/// One-shot oracle query; builds the path table for a single use.
pub fn naive_d_separated(
    g: &Gdag,
    x: &NodeSet,
    y: &NodeSet,
    z: &NodeSet,
) -> Result<bool, GraphError> {
    PathOracle::new(g).d_separated(x, y, z)
}
