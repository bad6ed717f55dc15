//! Conditional-independence relations: a graph's observed CI set via
//! d-separation, subset-exclusion queries, and exact CI tests on rational
//! distributions.

use std::collections::BTreeSet;
use std::fmt;

use num::BigRational;
use thiserror::Error;

use crate::dist::{DiscreteDistribution, DistError};
use crate::graph::{Gdag, GraphError, NodeSet};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CiError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error("distribution variables do not match the graph's observed nodes")]
    VariableMismatch,
    #[error("{0:?} is not an observed node")]
    NotObserved(String),
}

/// A relation (X independent of Y given Z). Stored with x <= y in label
/// order so the symmetric statements compare equal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct CiRelation {
    x: NodeSet,
    y: NodeSet,
    z: NodeSet,
}

impl CiRelation {
    pub fn new(x: NodeSet, y: NodeSet, z: NodeSet) -> Result<Self, CiError> {
        if x.is_empty() || y.is_empty() {
            return Err(CiError::Graph(GraphError::EmptyQuerySet));
        }
        for (a, b) in [(&x, &y), (&x, &z), (&y, &z)] {
            if let Some(v) = a.intersection(b).next() {
                return Err(CiError::Graph(GraphError::OverlappingSets(v.clone())));
            }
        }
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        Ok(CiRelation { x, y, z })
    }

    pub fn x(&self) -> &NodeSet {
        &self.x
    }

    pub fn y(&self) -> &NodeSet {
        &self.y
    }

    pub fn z(&self) -> &NodeSet {
        &self.z
    }

    fn members(&self) -> impl Iterator<Item = &String> {
        self.x.iter().chain(&self.y).chain(&self.z)
    }
}

fn join(s: &NodeSet) -> String {
    s.iter().cloned().collect::<Vec<_>>().join(",")
}

impl fmt::Display for CiRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} _||_ {}", join(&self.x), join(&self.y))?;
        if !self.z.is_empty() {
            write!(f, " | {}", join(&self.z))?;
        }
        Ok(())
    }
}

/// A set of CI relations over a fixed scope of node labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiSet {
    relations: BTreeSet<CiRelation>,
    scope: NodeSet,
}

impl CiSet {
    pub fn new(scope: NodeSet) -> Self {
        CiSet {
            relations: BTreeSet::new(),
            scope,
        }
    }

    pub fn insert(&mut self, r: CiRelation) -> Result<(), CiError> {
        if let Some(v) = r.members().find(|m| !self.scope.contains(*m)) {
            return Err(CiError::Graph(GraphError::UnknownNode(v.clone())));
        }
        self.relations.insert(r);
        Ok(())
    }

    pub fn scope(&self) -> &NodeSet {
        &self.scope
    }

    pub fn relations(&self) -> &BTreeSet<CiRelation> {
        &self.relations
    }

    pub fn contains(&self, r: &CiRelation) -> bool {
        self.relations.contains(r)
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }
}

fn mask_tuple(mut m: u32) -> Vec<usize> {
    let mut t = Vec::new();
    while m != 0 {
        t.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    t
}

/// Every disjoint observed (x, y, z) query with x, y nonempty, in a fixed
/// deterministic order: total size ascending, then the three sets compared as
/// tuples of observed-node insertion indices, with x <= y. Unbounded
/// enumeration is refused above 6 observed nodes; pass a set-size cap there.
pub fn enumerate_ci_queries(
    g: &Gdag,
    max_set_size: Option<usize>,
) -> Result<Vec<(NodeSet, NodeSet, NodeSet)>, CiError> {
    let obs: Vec<&str> = g.observed_labels();
    let n = obs.len();
    if n > 6 && max_set_size.is_none() {
        return Err(CiError::Graph(GraphError::TooLarge(n)));
    }
    let cap = max_set_size.unwrap_or(n).min(n);
    let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut keyed: Vec<(usize, Vec<usize>, Vec<usize>, Vec<usize>)> = Vec::new();
    for xm in 1..=full {
        if xm.count_ones() as usize > cap {
            continue;
        }
        let xt = mask_tuple(xm);
        for ym in 1..=full {
            if ym & xm != 0 || ym.count_ones() as usize > cap {
                continue;
            }
            let yt = mask_tuple(ym);
            if yt < xt {
                continue;
            }
            let rest = full & !(xm | ym);
            let mut s = rest;
            loop {
                if s.count_ones() as usize <= cap {
                    keyed.push((
                        (xm.count_ones() + ym.count_ones() + s.count_ones()) as usize,
                        xt.clone(),
                        yt.clone(),
                        mask_tuple(s),
                    ));
                }
                if s == 0 {
                    break;
                }
                s = (s - 1) & rest;
            }
        }
    }
    keyed.sort();
    let to_set = |t: &[usize]| -> NodeSet { t.iter().map(|&i| obs[i].to_string()).collect() };
    Ok(keyed
        .into_iter()
        .map(|(_, xt, yt, zt)| (to_set(&xt), to_set(&yt), to_set(&zt)))
        .collect())
}

fn check_observed(g: &Gdag, sets: &[&NodeSet]) -> Result<(), CiError> {
    for s in sets {
        for label in *s {
            if !g.is_observed(label)? {
                return Err(CiError::NotObserved(label.clone()));
            }
        }
    }
    Ok(())
}

/// All observed CI relations of `g` as a set.
pub fn observed_ci_relations(g: &Gdag, max_set_size: Option<usize>) -> Result<CiSet, CiError> {
    let mut out = CiSet::new(g.observed_labels().into_iter().map(str::to_string).collect());
    for r in observed_ci_relations_ordered(g, max_set_size)? {
        out.insert(r)?;
    }
    Ok(out)
}

/// All observed CI relations of `g` in enumeration order.
pub fn observed_ci_relations_ordered(
    g: &Gdag,
    max_set_size: Option<usize>,
) -> Result<Vec<CiRelation>, CiError> {
    let mut out = Vec::new();
    for (x, y, z) in enumerate_ci_queries(g, max_set_size)? {
        if g.d_separated(&x, &y, &z)? {
            out.push(CiRelation::new(x, y, z)?);
        }
    }
    Ok(out)
}

/// Whether every relation (x indep y | z u S) with S a subset of `w` fails in
/// `g`; the exclusion premise for deletion certificates.
pub fn ci_excluded_for_all_subsets(
    g: &Gdag,
    x: &NodeSet,
    y: &NodeSet,
    z: &NodeSet,
    w: &NodeSet,
) -> Result<bool, CiError> {
    check_observed(g, &[x, y, z, w])?;
    for (a, b) in [(x, y), (x, z), (x, w), (y, z), (y, w), (z, w)] {
        if let Some(v) = a.intersection(b).next() {
            return Err(CiError::Graph(GraphError::OverlappingSets(v.clone())));
        }
    }
    let members: Vec<&String> = w.iter().collect();
    for bits in 0u32..1 << members.len() {
        let mut zs = z.clone();
        for (i, m) in members.iter().enumerate() {
            if bits & (1 << i) != 0 {
                zs.insert((*m).clone());
            }
        }
        if g.d_separated(x, y, &zs)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Exact CI test on a distribution via the cross-multiplied identity
/// P(x,y,z)P(z) = P(x,z)P(y,z) over every assignment.
pub fn ci_holds_in_distribution(
    p: &DiscreteDistribution,
    r: &CiRelation,
) -> Result<bool, CiError> {
    let xyz: NodeSet = r.members().cloned().collect();
    let m = p.marginalize(&xyz)?;
    let xz: NodeSet = r.x.union(&r.z).cloned().collect();
    let yz: NodeSet = r.y.union(&r.z).cloned().collect();
    let mz = m.marginalize(&r.z)?;
    let mxz = m.marginalize(&xz)?;
    let myz = m.marginalize(&yz)?;
    let pick = |target: &DiscreteDistribution| -> Vec<usize> {
        target
            .variables()
            .iter()
            .map(|v| m.variables().iter().position(|u| u == v).unwrap())
            .collect()
    };
    let (iz, ixz, iyz) = (pick(&mz), pick(&mxz), pick(&myz));
    let project = |a: &[usize], idxs: &[usize]| -> Vec<usize> {
        idxs.iter().map(|&i| a[i]).collect()
    };
    for (a, mass) in m.assignments() {
        let lhs: BigRational = mass * mz.mass_at(&project(&a, &iz))?;
        let rhs: BigRational =
            mxz.mass_at(&project(&a, &ixz))? * myz.mass_at(&project(&a, &iyz))?;
        if lhs != rhs {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Result of checking a distribution against a graph's full observed CI set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CiConsistency {
    pub consistent: bool,
    /// First relation (in enumeration order) that fails, when any does.
    pub first_violation: Option<CiRelation>,
}

/// Whether every observed CI relation of `g` holds in `p`.
pub fn ci_consistent(
    p: &DiscreteDistribution,
    g: &Gdag,
    max_set_size: Option<usize>,
) -> Result<CiConsistency, CiError> {
    let obs: NodeSet = g.observed_labels().into_iter().map(str::to_string).collect();
    let vars: NodeSet = p.variables().iter().cloned().collect();
    if obs != vars {
        return Err(CiError::VariableMismatch);
    }
    for r in observed_ci_relations_ordered(g, max_set_size)? {
        if !ci_holds_in_distribution(p, &r)? {
            return Ok(CiConsistency {
                consistent: false,
                first_violation: Some(r),
            });
        }
    }
    Ok(CiConsistency {
        consistent: true,
        first_violation: None,
    })
}
