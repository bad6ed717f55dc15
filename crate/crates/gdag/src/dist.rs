//! Exact discrete joint distributions with rational masses, causal models
//! with rational conditional probability tables, and Shannon-entropy
//! computations. Probabilities stay rational end-to-end; only entropies are
//! floating point.

use std::collections::BTreeMap;

use num::{BigInt, BigRational, One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::graph::{Gdag, NodeSet};
use crate::INEQ_TOL;

/// Upper bound on joint-table size; keeps exact arithmetic desk-scale.
const MAX_TABLE: usize = 1 << 22;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DistError {
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("conditioning event has probability zero")]
    ZeroProbabilityEvent,
    #[error("distributions have different variable domains")]
    DomainMismatch,
    #[error("too many variables: {0}")]
    TooManyVariables(usize),
    #[error("invalid table: {0}")]
    InvalidTable(String),
    #[error("entropy vector does not cover all subsets")]
    IncompleteVector,
    #[error("{0:?} is not an exogenous observed node")]
    NotExogenous(String),
    #[error("missing variable {0:?}")]
    MissingVariable(String),
    #[error("sets overlap at {0:?}")]
    OverlappingSets(String),
}

/// Shorthand for an exact rational.
pub fn frac(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// A joint distribution over named finite variables. The mass table is dense
/// and row-major with the last variable fastest; every mass is a nonnegative
/// rational and the table sums to exactly 1.
#[derive(Debug, Clone)]
pub struct DiscreteDistribution {
    vars: Vec<String>,
    cards: Vec<usize>,
    strides: Vec<usize>,
    index: BTreeMap<String, usize>,
    mass: Vec<BigRational>,
    interventions: Vec<(String, usize)>,
}

impl PartialEq for DiscreteDistribution {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars && self.cards == other.cards && self.mass == other.mass
    }
}

impl Eq for DiscreteDistribution {}

fn domain_size(vars: &[(&str, usize)]) -> Result<usize, DistError> {
    let mut size = 1usize;
    for &(name, card) in vars {
        if card == 0 {
            return Err(DistError::InvalidTable(format!(
                "variable {name} has cardinality 0"
            )));
        }
        size = size
            .checked_mul(card)
            .filter(|&s| s <= MAX_TABLE)
            .ok_or(DistError::TooManyVariables(vars.len()))?;
    }
    Ok(size)
}

impl DiscreteDistribution {
    /// Builds a distribution from a dense mass table.
    pub fn new(vars: &[(&str, usize)], mass: Vec<BigRational>) -> Result<Self, DistError> {
        let size = domain_size(vars)?;
        if mass.len() != size {
            return Err(DistError::InvalidTable(format!(
                "expected {size} entries, got {}",
                mass.len()
            )));
        }
        if mass.iter().any(|m| m < &BigRational::zero()) {
            return Err(DistError::InvalidTable("negative mass".into()));
        }
        let total: BigRational = mass.iter().sum();
        if !total.is_one() {
            return Err(DistError::InvalidTable(format!(
                "total mass {total}, expected 1"
            )));
        }
        let mut index = BTreeMap::new();
        for (i, &(name, _)) in vars.iter().enumerate() {
            if index.insert(name.to_string(), i).is_some() {
                return Err(DistError::InvalidTable(format!("duplicate variable {name}")));
            }
        }
        let cards: Vec<usize> = vars.iter().map(|&(_, c)| c).collect();
        let mut strides = vec![1usize; cards.len()];
        for i in (0..cards.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * cards[i + 1];
        }
        Ok(DiscreteDistribution {
            vars: vars.iter().map(|&(n, _)| n.to_string()).collect(),
            cards,
            strides,
            index,
            mass,
            interventions: Vec::new(),
        })
    }

    /// Builds a distribution from its support; omitted assignments get mass 0.
    pub fn from_support(
        vars: &[(&str, usize)],
        rows: &[(Vec<usize>, BigRational)],
    ) -> Result<Self, DistError> {
        let size = domain_size(vars)?;
        let mut mass = vec![BigRational::zero(); size];
        let cards: Vec<usize> = vars.iter().map(|&(_, c)| c).collect();
        for (assignment, m) in rows {
            if assignment.len() != vars.len() {
                return Err(DistError::InvalidTable(format!(
                    "assignment has {} values, expected {}",
                    assignment.len(),
                    vars.len()
                )));
            }
            let mut off = 0usize;
            for (i, &v) in assignment.iter().enumerate() {
                if v >= cards[i] {
                    return Err(DistError::InvalidTable(format!(
                        "value {v} out of range for {}",
                        vars[i].0
                    )));
                }
                off = off * cards[i] + v;
            }
            mass[off] += m;
        }
        Self::new(vars, mass)
    }

    pub fn variables(&self) -> &[String] {
        &self.vars
    }

    pub fn cardinalities(&self) -> &[usize] {
        &self.cards
    }

    pub fn cardinality(&self, name: &str) -> Result<usize, DistError> {
        self.var_index(name).map(|i| self.cards[i])
    }

    /// Interventions recorded by [`Self::intervene_exogenous`], oldest first.
    pub fn interventions(&self) -> &[(String, usize)] {
        &self.interventions
    }

    fn var_index(&self, name: &str) -> Result<usize, DistError> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| DistError::UnknownVariable(name.to_string()))
    }

    fn offset(&self, assignment: &[usize]) -> usize {
        assignment
            .iter()
            .zip(&self.strides)
            .map(|(&v, &s)| v * s)
            .sum()
    }

    fn decode(&self, mut off: usize) -> Vec<usize> {
        let mut a = vec![0usize; self.cards.len()];
        for i in (0..self.cards.len()).rev() {
            a[i] = off % self.cards[i];
            off /= self.cards[i];
        }
        a
    }

    /// Mass of one full assignment, given in variable order.
    pub fn mass_at(&self, assignment: &[usize]) -> Result<&BigRational, DistError> {
        if assignment.len() != self.cards.len() {
            return Err(DistError::InvalidTable(format!(
                "assignment has {} values, expected {}",
                assignment.len(),
                self.cards.len()
            )));
        }
        for (i, &v) in assignment.iter().enumerate() {
            if v >= self.cards[i] {
                return Err(DistError::InvalidTable(format!(
                    "value {v} out of range for {}",
                    self.vars[i]
                )));
            }
        }
        Ok(&self.mass[self.offset(assignment)])
    }

    /// Positive-mass assignments in table order.
    pub fn support(&self) -> impl Iterator<Item = (Vec<usize>, &BigRational)> {
        self.mass
            .iter()
            .enumerate()
            .filter(|(_, m)| !m.is_zero())
            .map(|(off, m)| (self.decode(off), m))
    }

    /// Every assignment with its mass, zeros included, in table order.
    pub fn assignments(&self) -> impl Iterator<Item = (Vec<usize>, &BigRational)> {
        self.mass
            .iter()
            .enumerate()
            .map(|(off, m)| (self.decode(off), m))
    }

    /// Restriction to `keep`, preserving this distribution's variable order.
    pub fn marginalize(&self, keep: &NodeSet) -> Result<Self, DistError> {
        for name in keep {
            self.var_index(name)?;
        }
        let kept: Vec<usize> = (0..self.vars.len())
            .filter(|&i| keep.contains(&self.vars[i]))
            .collect();
        let size: usize = kept.iter().map(|&i| self.cards[i]).product();
        let mut mass = vec![BigRational::zero(); size];
        for (off, m) in self.mass.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let a = self.decode(off);
            let mut proj = 0usize;
            for &i in &kept {
                proj = proj * self.cards[i] + a[i];
            }
            mass[proj] += m;
        }
        let vars: Vec<(&str, usize)> = kept
            .iter()
            .map(|&i| (self.vars[i].as_str(), self.cards[i]))
            .collect();
        let mut out = Self::new(&vars, mass)?;
        out.interventions = self.interventions.clone();
        Ok(out)
    }

    /// Conditional distribution given a partial assignment; the conditioned
    /// variables are removed from the domain.
    pub fn condition(&self, given: &[(&str, usize)]) -> Result<Self, DistError> {
        let mut fixed: Vec<Option<usize>> = vec![None; self.vars.len()];
        for &(name, value) in given {
            let i = self.var_index(name)?;
            if value >= self.cards[i] {
                return Err(DistError::InvalidTable(format!(
                    "value {value} out of range for {name}"
                )));
            }
            if fixed[i].replace(value).is_some() {
                return Err(DistError::OverlappingSets(name.to_string()));
            }
        }
        let kept: Vec<usize> = (0..self.vars.len()).filter(|&i| fixed[i].is_none()).collect();
        let size: usize = kept.iter().map(|&i| self.cards[i]).product();
        let mut mass = vec![BigRational::zero(); size];
        let mut total = BigRational::zero();
        for (off, m) in self.mass.iter().enumerate() {
            if m.is_zero() {
                continue;
            }
            let a = self.decode(off);
            if kept.len() < self.vars.len()
                && (0..self.vars.len()).any(|i| fixed[i].is_some_and(|v| a[i] != v))
            {
                continue;
            }
            total += m;
            let mut proj = 0usize;
            for &i in &kept {
                proj = proj * self.cards[i] + a[i];
            }
            mass[proj] += m;
        }
        if total.is_zero() {
            return Err(DistError::ZeroProbabilityEvent);
        }
        for m in &mut mass {
            *m /= &total;
        }
        let vars: Vec<(&str, usize)> = kept
            .iter()
            .map(|&i| (self.vars[i].as_str(), self.cards[i]))
            .collect();
        let mut out = Self::new(&vars, mass)?;
        out.interventions = self.interventions.clone();
        Ok(out)
    }

    /// Post-intervention distribution at `z = value` for an exogenous observed
    /// node `z` of `g`. Numerically identical to conditioning; the intervention
    /// is recorded so downstream reports can tell sections apart.
    pub fn intervene_exogenous(
        &self,
        g: &Gdag,
        z: &str,
        value: usize,
    ) -> Result<Self, DistError> {
        let exogenous_observed = g
            .idx(z)
            .ok()
            .is_some_and(|i| g.observed[i] && g.parents[i] == 0);
        if !exogenous_observed {
            return Err(DistError::NotExogenous(z.to_string()));
        }
        self.var_index(z)
            .map_err(|_| DistError::MissingVariable(z.to_string()))?;
        let mut out = self.condition(&[(z, value)])?;
        out.interventions.push((z.to_string(), value));
        Ok(out)
    }

    /// Whether `self` and `other` agree entrywise on the section where the
    /// variables in `section` take the given values.
    pub fn section_compatible(
        &self,
        other: &Self,
        section: &[(&str, usize)],
    ) -> Result<bool, DistError> {
        if self.vars.len() != other.vars.len() {
            return Err(DistError::DomainMismatch);
        }
        let mut perm = vec![0usize; self.vars.len()];
        for (i, name) in self.vars.iter().enumerate() {
            match other.index.get(name) {
                Some(&j) if other.cards[j] == self.cards[i] => perm[i] = j,
                _ => return Err(DistError::DomainMismatch),
            }
        }
        let mut fixed: Vec<Option<usize>> = vec![None; self.vars.len()];
        for &(name, value) in section {
            let i = self.var_index(name)?;
            if value >= self.cards[i] {
                return Err(DistError::InvalidTable(format!(
                    "value {value} out of range for {name}"
                )));
            }
            fixed[i] = Some(value);
        }
        let mut other_a = vec![0usize; self.vars.len()];
        for off in 0..self.mass.len() {
            let a = self.decode(off);
            if (0..a.len()).any(|i| fixed[i].is_some_and(|v| a[i] != v)) {
                continue;
            }
            for i in 0..a.len() {
                other_a[perm[i]] = a[i];
            }
            if self.mass[off] != other.mass[other.offset(&other_a)] {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Entropy of the marginal on `s`, in bits; H(emptyset) = 0.
    pub fn shannon_entropy(&self, s: &NodeSet) -> Result<f64, DistError> {
        Ok(table_entropy(&self.marginalize(s)?.mass))
    }

    /// I(X:Y|Z) = H(XZ) + H(YZ) - H(XYZ) - H(Z), in bits.
    pub fn conditional_mutual_information(
        &self,
        x: &NodeSet,
        y: &NodeSet,
        z: &NodeSet,
    ) -> Result<f64, DistError> {
        for (a, b) in [(x, y), (x, z), (y, z)] {
            if let Some(v) = a.intersection(b).next() {
                return Err(DistError::OverlappingSets(v.clone()));
            }
        }
        let xz: NodeSet = x.union(z).cloned().collect();
        let yz: NodeSet = y.union(z).cloned().collect();
        let xyz: NodeSet = xz.union(y).cloned().collect();
        Ok(self.shannon_entropy(&xz)? + self.shannon_entropy(&yz)?
            - self.shannon_entropy(&xyz)?
            - self.shannon_entropy(z)?)
    }

    /// Entropies of all variable subsets.
    pub fn entropy_vector(&self) -> Result<EntropyVector, DistError> {
        let n = self.vars.len();
        if n > 20 {
            return Err(DistError::TooManyVariables(n));
        }
        let mut entries = Vec::with_capacity(1 << n);
        for mask in 0usize..1 << n {
            let subset: NodeSet = (0..n)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| self.vars[i].clone())
                .collect();
            entries.push(self.shannon_entropy(&subset)?);
        }
        EntropyVector::new(self.vars.clone(), entries)
    }
}

fn table_entropy(mass: &[BigRational]) -> f64 {
    let mut h = 0.0;
    for m in mass {
        if m.is_zero() {
            continue;
        }
        let p = m.to_f64().expect("probability fits in f64");
        h -= p * p.log2();
    }
    h
}

/// Entropies of every subset of a ground set, in bits. Entry order follows
/// bitmasks over the ground list: bit i set means the i-th variable is in the
/// subset.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyVector {
    ground: Vec<String>,
    entries: Vec<f64>,
}

impl EntropyVector {
    pub fn new(ground: Vec<String>, entries: Vec<f64>) -> Result<Self, DistError> {
        if ground.len() > 20 {
            return Err(DistError::TooManyVariables(ground.len()));
        }
        if entries.len() != 1 << ground.len() {
            return Err(DistError::IncompleteVector);
        }
        Ok(EntropyVector { ground, entries })
    }

    pub fn ground(&self) -> &[String] {
        &self.ground
    }

    pub fn entry_mask(&self, mask: usize) -> f64 {
        self.entries[mask]
    }

    pub fn entry(&self, subset: &NodeSet) -> Result<f64, DistError> {
        let mut mask = 0usize;
        for name in subset {
            let i = self
                .ground
                .iter()
                .position(|g| g == name)
                .ok_or_else(|| DistError::UnknownVariable(name.clone()))?;
            mask |= 1 << i;
        }
        Ok(self.entries[mask])
    }

    fn label(&self, mask: usize) -> String {
        let names: Vec<&str> = (0..self.ground.len())
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| self.ground[i].as_str())
            .collect();
        format!("{{{}}}", names.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolymatroidViolation {
    pub inequality: String,
    /// Amount by which the inequality fails, always positive.
    pub slack: f64,
}

/// Checks the elementary entropy inequalities: H of the empty set is zero,
/// dropping one variable from the ground set cannot raise the entropy, and
/// every elemental conditional mutual information is nonnegative. Returns
/// every violation beyond the 1e-9 tolerance.
pub fn check_polymatroid(v: &EntropyVector) -> Vec<PolymatroidViolation> {
    let n = v.ground.len();
    let full = (1usize << n) - 1;
    let mut out = Vec::new();
    let h0 = v.entry_mask(0);
    if h0.abs() > INEQ_TOL {
        out.push(PolymatroidViolation {
            inequality: "H({}) = 0".to_string(),
            slack: h0.abs(),
        });
    }
    for i in 0..n {
        let rest = full & !(1 << i);
        let slack = v.entry_mask(rest) - v.entry_mask(full);
        if slack > INEQ_TOL {
            out.push(PolymatroidViolation {
                inequality: format!("H({}) <= H({})", v.label(rest), v.label(full)),
                slack,
            });
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            let others = full & !(1 << i) & !(1 << j);
            let mut k = others;
            loop {
                let slack = v.entry_mask(k | (1 << i) | (1 << j)) + v.entry_mask(k)
                    - v.entry_mask(k | (1 << i))
                    - v.entry_mask(k | (1 << j));
                if slack > INEQ_TOL {
                    out.push(PolymatroidViolation {
                        inequality: format!(
                            "I({};{}|{}) >= 0",
                            v.ground[i],
                            v.ground[j],
                            v.label(k)
                        ),
                        slack,
                    });
                }
                if k == 0 {
                    break;
                }
                k = (k - 1) & others;
            }
        }
    }
    out
}

/// A GDAG together with a conditional probability table per node. CPT rows
/// are indexed by the parent assignment read as a mixed-radix number with
/// parents in node insertion order, last parent fastest.
#[derive(Debug, Clone)]
pub struct CausalModel {
    graph: Gdag,
    cards: Vec<usize>,
    tables: Vec<Vec<Vec<BigRational>>>,
}

impl CausalModel {
    pub fn new(
        graph: Gdag,
        cards: &BTreeMap<String, usize>,
        tables: &BTreeMap<String, Vec<Vec<BigRational>>>,
    ) -> Result<Self, DistError> {
        for name in cards.keys().chain(tables.keys()) {
            if !graph.contains(name) {
                return Err(DistError::UnknownVariable(name.clone()));
            }
        }
        let mut card_vec = Vec::with_capacity(graph.node_count());
        for label in graph.labels() {
            let card = *cards
                .get(label)
                .ok_or_else(|| DistError::MissingVariable(label.clone()))?;
            if card == 0 {
                return Err(DistError::InvalidTable(format!(
                    "variable {label} has cardinality 0"
                )));
            }
            card_vec.push(card);
        }
        let mut table_vec = Vec::with_capacity(graph.node_count());
        for (i, label) in graph.labels().iter().enumerate() {
            let table = tables
                .get(label)
                .ok_or_else(|| DistError::MissingVariable(label.clone()))?;
            let rows: usize = parent_indices(&graph, i)
                .map(|p| card_vec[p])
                .product();
            if table.len() != rows {
                return Err(DistError::InvalidTable(format!(
                    "{label}: expected {rows} rows, got {}",
                    table.len()
                )));
            }
            for row in table {
                if row.len() != card_vec[i] {
                    return Err(DistError::InvalidTable(format!(
                        "{label}: row has {} entries, expected {}",
                        row.len(),
                        card_vec[i]
                    )));
                }
                if row.iter().any(|m| m < &BigRational::zero()) {
                    return Err(DistError::InvalidTable(format!("{label}: negative entry")));
                }
                let total: BigRational = row.iter().sum();
                if !total.is_one() {
                    return Err(DistError::InvalidTable(format!(
                        "{label}: row sums to {total}, expected 1"
                    )));
                }
            }
            table_vec.push(table.clone());
        }
        Ok(CausalModel {
            graph,
            cards: card_vec,
            tables: table_vec,
        })
    }

    pub fn graph(&self) -> &Gdag {
        &self.graph
    }

    pub fn cardinality(&self, label: &str) -> Result<usize, DistError> {
        match self.graph.idx(label) {
            Ok(i) => Ok(self.cards[i]),
            Err(_) => Err(DistError::UnknownVariable(label.to_string())),
        }
    }

    pub fn cpt(&self, label: &str) -> Result<&[Vec<BigRational>], DistError> {
        match self.graph.idx(label) {
            Ok(i) => Ok(&self.tables[i]),
            Err(_) => Err(DistError::UnknownVariable(label.to_string())),
        }
    }
}

fn parent_indices(g: &Gdag, node: usize) -> impl Iterator<Item = usize> + '_ {
    let mask = g.parents[node];
    (0..g.node_count()).filter(move |&p| mask & (1 << p) != 0)
}

/// Joint distribution over all nodes (latents included): the product of the
/// model's CPTs.
pub fn simulate_model(m: &CausalModel) -> Result<DiscreteDistribution, DistError> {
    let g = &m.graph;
    let n = g.node_count();
    let vars: Vec<(&str, usize)> = g
        .labels()
        .iter()
        .enumerate()
        .map(|(i, l)| (l.as_str(), m.cards[i]))
        .collect();
    let size = domain_size(&vars)?;
    let parents: Vec<Vec<usize>> = (0..n).map(|i| parent_indices(g, i).collect()).collect();
    let mut mass = Vec::with_capacity(size);
    let mut a = vec![0usize; n];
    for _ in 0..size {
        let mut p = BigRational::one();
        for i in 0..n {
            let row: usize = parents[i].iter().fold(0, |acc, &pi| acc * m.cards[pi] + a[pi]);
            p *= &m.tables[i][row][a[i]];
            if p.is_zero() {
                break;
            }
        }
        mass.push(p);
        for i in (0..n).rev() {
            a[i] += 1;
            if a[i] < m.cards[i] {
                break;
            }
            a[i] = 0;
        }
    }
    DiscreteDistribution::new(&vars, mass)
}

/// The simulated joint marginalized onto the observed nodes.
pub fn observed_marginal(m: &CausalModel) -> Result<DiscreteDistribution, DistError> {
    let keep: NodeSet = m.graph.observed_labels().iter().map(|s| s.to_string()).collect();
    simulate_model(m)?.marginalize(&keep)
}

/// Reproducible random model: every CPT entry is a rational with denominator
/// 4 * cardinality and numerator >= 1. The coarse grid keeps every edge's
/// dependence well away from the identity tolerance while post-selection
/// sections stay well-defined. Nodes missing from `cards` are binary.
pub fn random_model(
    g: &Gdag,
    cards: &BTreeMap<String, usize>,
    seed: u64,
) -> Result<CausalModel, DistError> {
    for name in cards.keys() {
        if !g.contains(name) {
            return Err(DistError::UnknownVariable(name.clone()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let card_of = |label: &String| cards.get(label).copied().unwrap_or(2);
    let mut card_map = BTreeMap::new();
    let mut tables = BTreeMap::new();
    for (i, label) in g.labels().iter().enumerate() {
        let card = card_of(label);
        if !(2..=64).contains(&card) {
            return Err(DistError::InvalidTable(format!(
                "variable {label} has cardinality {card}, need 2..=64"
            )));
        }
        card_map.insert(label.clone(), card);
        let rows: usize = parent_indices(g, i).map(|p| card_of(&g.labels()[p])).product();
        let mut table = Vec::with_capacity(rows);
        for _ in 0..rows {
            let mut counts = vec![1u32; card];
            for _ in 0..3 * card {
                counts[rng.gen_range(0..card)] += 1;
            }
            table.push(counts.into_iter().map(|c| frac(c as i64, 4 * card as i64)).collect());
        }
        tables.insert(label.clone(), table);
    }
    CausalModel::new(g.clone(), &card_map, &tables)
}
