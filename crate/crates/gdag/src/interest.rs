//! Decision procedures for showing that a graph's observed CI relations admit
//! distributions no classical model on the graph can produce: skeleton
//! comparison against a saturated comparator, e-separation certificates with
//! constructed witness distributions, and fine-grained entropic inequalities
//! evaluated on registered witnesses. Also the skeleton-viability search
//! behind the chord analyses.

use std::fmt;

use thiserror::Error;

use crate::catalog;
use crate::ci::{
    ci_consistent, ci_excluded_for_all_subsets, enumerate_ci_queries, observed_ci_relations,
    CiError, CiRelation, CiSet,
};
use crate::dist::{frac, DiscreteDistribution, DistError};
use crate::graph::{d_sep_raw, Gdag, GraphError, NodeSet, Skeleton};
use crate::INEQ_TOL;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterestError {
    #[error("graphs have different observed node sets")]
    NodeMismatch,
    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),
    #[error("search too large: {0} observed nodes")]
    TooLarge(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Dist(#[from] DistError),
}

impl From<CiError> for InterestError {
    fn from(e: CiError) -> Self {
        match e {
            CiError::Graph(g) => InterestError::Graph(g),
            CiError::Dist(d) => InterestError::Dist(d),
            CiError::VariableMismatch => InterestError::NodeMismatch,
            CiError::NotObserved(l) => {
                InterestError::InvalidCertificate(format!("{l} is not an observed node"))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Interesting,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Interesting => "Interesting",
            Status::Inconclusive => "Inconclusive",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    SkeletonMethod,
    ESeparation,
    FineGrainedInequality,
    None,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::SkeletonMethod => "skeleton-method",
            Method::ESeparation => "e-separation",
            Method::FineGrainedInequality => "fine-grained-inequality",
            Method::None => "none",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A distribution satisfying the graph's observed CI relations while
/// violating a constraint every classical model on the graph obeys.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub distribution: DiscreteDistribution,
    pub violated_constraint: String,
    pub lhs: f64,
    pub rhs: f64,
}

/// Certificate that deleting `w` separates `x` from `y` given `z` while no
/// relation (x indep y | z u S), S inside w, holds in the intact graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EsepCertificate {
    pub x: NodeSet,
    pub y: NodeSet,
    pub z: NodeSet,
    pub w: NodeSet,
}

impl EsepCertificate {
    /// Builds a certificate after checking every premise against `g`.
    pub fn new(
        g: &Gdag,
        x: NodeSet,
        y: NodeSet,
        z: NodeSet,
        w: NodeSet,
    ) -> Result<Self, InterestError> {
        let cert = EsepCertificate { x, y, z, w };
        cert.validate(g)?;
        Ok(cert)
    }

    pub fn validate(&self, g: &Gdag) -> Result<(), InterestError> {
        let desc = g.descendants(&self.w)?;
        if let Some(v) = self.z.iter().find(|v| desc.contains(*v)) {
            return Err(InterestError::InvalidCertificate(format!(
                "{v} is descended from the deleted set"
            )));
        }
        if !g.e_separated(&self.x, &self.y, &self.z, &self.w)? {
            return Err(InterestError::InvalidCertificate(
                "sets are not e-separated".into(),
            ));
        }
        if !ci_excluded_for_all_subsets(g, &self.x, &self.y, &self.z, &self.w)? {
            return Err(InterestError::InvalidCertificate(
                "some conditional independence over the deleted set already holds".into(),
            ));
        }
        Ok(())
    }
}

fn braced(s: &NodeSet) -> String {
    format!("{{{}}}", s.iter().cloned().collect::<Vec<_>>().join(","))
}

impl fmt::Display for EsepCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "X={} Y={} Z={} W={}",
            braced(&self.x),
            braced(&self.y),
            braced(&self.z),
            braced(&self.w)
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub status: Status,
    pub method: Method,
    pub witness: Option<Witness>,
    pub certificate: Option<EsepCertificate>,
    pub detail: String,
}

/// Outcome of the comparator test; only `Interesting` lets a conclusion be
/// drawn, the other variants say which premise failed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SkeletonMethodOutcome {
    Interesting,
    CiMismatch { first_difference: CiRelation },
    EqualSkeletons,
    SaturationNotAsserted,
}

/// Compares `g` against a comparator `k` whose observed distributions are
/// asserted by the caller to be exactly those satisfying its CI relations:
/// `g` is interesting if both graphs imply the same observed CI relations but
/// have different skeletons.
pub fn skeleton_method(
    g: &Gdag,
    k: &Gdag,
    k_is_saturated: bool,
) -> Result<SkeletonMethodOutcome, InterestError> {
    let go: NodeSet = g.observed_labels().into_iter().map(str::to_string).collect();
    let ko: NodeSet = k.observed_labels().into_iter().map(str::to_string).collect();
    if go != ko {
        return Err(InterestError::NodeMismatch);
    }
    if !k_is_saturated {
        return Ok(SkeletonMethodOutcome::SaturationNotAsserted);
    }
    for (x, y, z) in enumerate_ci_queries(g, None)? {
        if g.d_separated(&x, &y, &z)? != k.d_separated(&x, &y, &z)? {
            return Ok(SkeletonMethodOutcome::CiMismatch {
                first_difference: CiRelation::new(x, y, z)?,
            });
        }
    }
    if g.skeleton() != k.skeleton() {
        Ok(SkeletonMethodOutcome::Interesting)
    } else {
        Ok(SkeletonMethodOutcome::EqualSkeletons)
    }
}

/// The complete DAG on `g`'s observed nodes (edges oriented by label order),
/// available as a comparator exactly when `g` has no observed CI relations.
pub fn complete_dag_comparator(g: &Gdag) -> Result<Option<Gdag>, InterestError> {
    for (x, y, z) in enumerate_ci_queries(g, None)? {
        if g.d_separated(&x, &y, &z)? {
            return Ok(None);
        }
    }
    let mut labels: Vec<&str> = g.observed_labels();
    labels.sort_unstable();
    let mut k = Gdag::new();
    for l in &labels {
        k.add_node(l, true)?;
    }
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            k.add_edge(labels[i], labels[j])?;
        }
    }
    Ok(Some(k))
}

fn obs_mask_tuple(mut m: u32) -> Vec<usize> {
    let mut t = Vec::new();
    while m != 0 {
        t.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    t
}

/// Walks every valid certificate in the deterministic search order, stopping
/// when `visit` returns true.
fn walk_certificates(
    g: &Gdag,
    max_set_size: Option<usize>,
    visit: &mut dyn FnMut(EsepCertificate) -> Result<bool, InterestError>,
) -> Result<(), InterestError> {
    let obs: Vec<&str> = g.observed_labels();
    let n = obs.len();
    if n > 6 && max_set_size.is_none() {
        return Err(InterestError::TooLarge(n));
    }
    let cap = max_set_size.unwrap_or(n).min(n);
    let full: u32 = if n == 0 { 0 } else { (1u32 << n) - 1 };
    let mut triples: Vec<(usize, Vec<usize>, Vec<usize>, Vec<usize>, u32, u32, u32)> = Vec::new();
    for xm in 1..=full {
        if xm.count_ones() as usize > cap {
            continue;
        }
        let xt = obs_mask_tuple(xm);
        for ym in 1..=full {
            if ym & xm != 0 || ym.count_ones() as usize > cap {
                continue;
            }
            let yt = obs_mask_tuple(ym);
            if yt < xt {
                continue;
            }
            let mut wm = full & !(xm | ym);
            loop {
                if wm != 0 && wm.count_ones() as usize <= cap {
                    triples.push((
                        (xm.count_ones() + ym.count_ones() + wm.count_ones()) as usize,
                        xt.clone(),
                        yt.clone(),
                        obs_mask_tuple(wm),
                        xm,
                        ym,
                        wm,
                    ));
                }
                if wm == 0 {
                    break;
                }
                wm = (wm - 1) & (full & !(xm | ym));
            }
        }
    }
    triples.sort();
    let to_set = |m: u32| -> NodeSet {
        obs_mask_tuple(m).iter().map(|&i| obs[i].to_string()).collect()
    };
    for (_, _, _, _, xm, ym, wm) in triples {
        let (x, y, w) = (to_set(xm), to_set(ym), to_set(wm));
        let desc_w = g.descendants(&w)?;
        let deleted = g.delete_nodes(&w)?;
        let rest = full & !(xm | ym | wm);
        let mut zs: Vec<(usize, Vec<usize>, u32)> = Vec::new();
        let mut zm = rest;
        loop {
            if zm.count_ones() as usize <= cap {
                zs.push((
                    n - zm.count_ones() as usize,
                    obs_mask_tuple(zm),
                    zm,
                ));
            }
            if zm == 0 {
                break;
            }
            zm = (zm - 1) & rest;
        }
        zs.sort();
        for (_, _, zm) in zs {
            let z = to_set(zm);
            if z.iter().any(|v| desc_w.contains(v)) {
                continue;
            }
            if !deleted.d_separated(&x, &y, &z)? {
                continue;
            }
            if ci_excluded_for_all_subsets(g, &x, &y, &z, &w)? {
                let cert = EsepCertificate {
                    x: x.clone(),
                    y: y.clone(),
                    z,
                    w: w.clone(),
                };
                if visit(cert)? {
                    return Ok(());
                }
            }
        }
    }
    Ok(())
}

/// Deterministic search for the first e-separation certificate. Candidates
/// are ordered by |x|+|y|+|w| ascending, then x, y, w compared as tuples of
/// observed-node insertion indices; for each such triple the conditioning set
/// z runs from largest to smallest (ties in label-index order). Unbounded
/// search is refused above 6 observed nodes.
pub fn esep_search(
    g: &Gdag,
    max_set_size: Option<usize>,
) -> Result<Option<EsepCertificate>, InterestError> {
    let mut found = None;
    walk_certificates(g, max_set_size, &mut |cert| {
        found = Some(cert);
        Ok(true)
    })?;
    Ok(found)
}

/// The correlated-pair witness for a certificate: every variable in x u y
/// copies one uniform value over `cardinality` outcomes, every other observed
/// variable is fixed to 0.
pub fn esep_witness(
    g: &Gdag,
    cert: &EsepCertificate,
    cardinality: usize,
) -> Result<Witness, InterestError> {
    if cardinality < 2 {
        return Err(InterestError::InvalidCertificate(
            "witness cardinality must be at least 2".into(),
        ));
    }
    cert.validate(g)?;
    let obs: Vec<&str> = g.observed_labels();
    let correlated: Vec<bool> = obs
        .iter()
        .map(|l| cert.x.contains(*l) || cert.y.contains(*l))
        .collect();
    let vars: Vec<(&str, usize)> = obs.iter().map(|&l| (l, cardinality)).collect();
    let rows: Vec<(Vec<usize>, _)> = (0..cardinality)
        .map(|v| {
            (
                correlated.iter().map(|&c| if c { v } else { 0 }).collect(),
                frac(1, cardinality as i64),
            )
        })
        .collect();
    let distribution = DiscreteDistribution::from_support(&vars, &rows)?;
    let consistency = ci_consistent(&distribution, g, None)?;
    if let Some(r) = consistency.first_violation {
        return Err(InterestError::InvalidCertificate(format!(
            "witness violates the graph's relation {r}"
        )));
    }
    let lhs = distribution.conditional_mutual_information(&cert.x, &cert.y, &cert.z)?;
    Ok(Witness {
        distribution,
        violated_constraint: "e-separation constraint".into(),
        lhs,
        rhs: 0.0,
    })
}

/// One signed conditional mutual information evaluated on the section where
/// the inequality's exogenous variable is fixed to `section`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FineGrainedTerm {
    pub sign: i32,
    pub x: NodeSet,
    pub y: NodeSet,
    pub z: NodeSet,
    pub section: usize,
}

/// An inequality between a signed sum of section CMIs and the entropy of an
/// observed set. Registered as data so new instances need no code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FineGrainedInequality {
    pub name: String,
    pub exogenous: String,
    pub section_values: (usize, usize),
    pub terms: Vec<FineGrainedTerm>,
    pub rhs: NodeSet,
}

impl FineGrainedInequality {
    /// The shipped instance: I(E:D|A=0) - I(F:D|A=0) + I(F:D|A=1) - I(E:D|A=1)
    /// bounded by H(D) for every classical model whose graph implies the
    /// registered CI relations.
    pub fn eq1() -> Self {
        let term = |sign: i32, a: &str, section: usize| FineGrainedTerm {
            sign,
            x: crate::nodeset([a]),
            y: crate::nodeset(["D"]),
            z: NodeSet::new(),
            section,
        };
        FineGrainedInequality {
            name: "eq1".into(),
            exogenous: "A".into(),
            section_values: (0, 1),
            terms: vec![term(1, "E", 0), term(-1, "F", 0), term(1, "F", 1), term(-1, "E", 1)],
            rhs: crate::nodeset(["D"]),
        }
    }

    /// Evaluates (lhs, rhs) on `p`, treating the exogenous variable as
    /// intervenable (the caller guarantees that reading); sections are
    /// computed with [`DiscreteDistribution::intervene_exogenous`] against an
    /// edgeless all-observed context graph.
    pub fn evaluate(&self, p: &DiscreteDistribution) -> Result<(f64, f64), InterestError> {
        if !p.variables().iter().any(|v| v == &self.exogenous) {
            return Err(InterestError::Dist(DistError::MissingVariable(
                self.exogenous.clone(),
            )));
        }
        let mut ctx = Gdag::new();
        for v in p.variables() {
            ctx.add_node(v, true)?;
        }
        let low = p.intervene_exogenous(&ctx, &self.exogenous, self.section_values.0)?;
        let high = p.intervene_exogenous(&ctx, &self.exogenous, self.section_values.1)?;
        let mut lhs = 0.0;
        for t in &self.terms {
            let q = if t.section == self.section_values.0 {
                &low
            } else if t.section == self.section_values.1 {
                &high
            } else {
                return Err(InterestError::Dist(DistError::InvalidTable(format!(
                    "term references unknown section {}",
                    t.section
                ))));
            };
            lhs += t.sign as f64 * q.conditional_mutual_information(&t.x, &t.y, &t.z)?;
        }
        let rhs = p.shannon_entropy(&self.rhs)?;
        Ok((lhs, rhs))
    }

    pub fn violated(&self, lhs: f64, rhs: f64) -> bool {
        lhs > rhs + INEQ_TOL
    }
}

/// (lhs, rhs) of the shipped inequality on `p`.
pub fn fine_grained_lhs_eq1(p: &DiscreteDistribution) -> Result<(f64, f64), InterestError> {
    FineGrainedInequality::eq1().evaluate(p)
}

/// The four-outcome witness over (A, D, E, F): A, D uniform independent bits,
/// E = D when A = 0 else 0, F = D when A = 1 else 0.
pub fn tilde_p() -> DiscreteDistribution {
    DiscreteDistribution::from_support(
        &[("A", 2), ("D", 2), ("E", 2), ("F", 2)],
        &[
            (vec![0, 0, 0, 0], frac(1, 4)),
            (vec![0, 1, 1, 0], frac(1, 4)),
            (vec![1, 0, 0, 0], frac(1, 4)),
            (vec![1, 1, 0, 1], frac(1, 4)),
        ],
    )
    .expect("fixed table is a distribution")
}

/// Variant with ternary E: E additionally records A = 1 in its third value,
/// which restores (A indep F | E)-style consistency where the binary witness
/// fails.
pub fn tilde_p_prime() -> DiscreteDistribution {
    DiscreteDistribution::from_support(
        &[("A", 2), ("D", 2), ("E", 3), ("F", 2)],
        &[
            (vec![0, 0, 0, 0], frac(1, 4)),
            (vec![0, 1, 1, 0], frac(1, 4)),
            (vec![1, 0, 2, 0], frac(1, 4)),
            (vec![1, 1, 2, 1], frac(1, 4)),
        ],
    )
    .expect("fixed table is a distribution")
}

#[derive(Debug, Clone)]
pub struct ClassifyOptions {
    /// Comparator graph supplied by the caller, asserted saturated.
    pub comparator: Option<Gdag>,
    pub max_set_size: Option<usize>,
    pub witness_cardinality: usize,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            comparator: None,
            max_set_size: None,
            witness_cardinality: 2,
        }
    }
}

fn check_witness(g: &Gdag, w: &Witness) -> Result<(), InterestError> {
    let consistency = ci_consistent(&w.distribution, g, None)?;
    assert!(
        consistency.consistent,
        "witness distribution violates the graph's CI relations"
    );
    assert!(w.lhs > w.rhs + INEQ_TOL, "witness lhs does not exceed rhs");
    Ok(())
}

/// Runs the full pipeline: skeleton method with an automatic or supplied
/// comparator, then e-separation search with witness construction (the first
/// certificate whose correlated witness is consistent; the first certificate
/// without a witness when none is), then registered fine-grained witnesses.
/// Absence of a verdict is always reported as Inconclusive, never as a claim
/// of uninterestingness.
pub fn classify(g: &Gdag, options: &ClassifyOptions) -> Result<Verdict, InterestError> {
    let mut parts: Vec<String> = Vec::new();
    let comparator = match &options.comparator {
        Some(k) => Some(k.clone()),
        None => complete_dag_comparator(g)?,
    };
    match &comparator {
        None => parts.push("skeleton method: no comparator (graph has observed CI relations)".into()),
        Some(k) => match skeleton_method(g, k, true)? {
            SkeletonMethodOutcome::Interesting => {
                return Ok(Verdict {
                    status: Status::Interesting,
                    method: Method::SkeletonMethod,
                    witness: None,
                    certificate: None,
                    detail: "skeleton method: comparator with matching CI relations has a different skeleton".into(),
                });
            }
            SkeletonMethodOutcome::EqualSkeletons => {
                parts.push("skeleton method: comparator exists but skeletons are equal".into());
            }
            SkeletonMethodOutcome::CiMismatch { first_difference } => {
                parts.push(format!(
                    "skeleton method: comparator CI relations differ at {first_difference}"
                ));
            }
            SkeletonMethodOutcome::SaturationNotAsserted => {
                parts.push("skeleton method: comparator saturation not asserted".into());
            }
        },
    }
    if options.witness_cardinality < 2 {
        return Err(InterestError::InvalidCertificate(
            "witness cardinality must be at least 2".into(),
        ));
    }
    // The correlated witness can violate an observed CI relation that separates
    // parts of x u y under a conditioning set outside z u w, so take the first
    // certificate in search order that admits a consistent witness. A
    // certificate alone already proves interestingness, so when none admits a
    // witness the first certificate is reported without one, as the skeleton
    // method does.
    let mut chosen: Option<(EsepCertificate, Witness)> = None;
    let mut first_cert: Option<EsepCertificate> = None;
    walk_certificates(g, options.max_set_size, &mut |cert| {
        match esep_witness(g, &cert, options.witness_cardinality) {
            Ok(witness) => {
                chosen = Some((cert, witness));
                Ok(true)
            }
            Err(InterestError::InvalidCertificate(_)) => {
                if first_cert.is_none() {
                    first_cert = Some(cert);
                }
                Ok(false)
            }
            Err(e) => Err(e),
        }
    })?;
    if let Some((cert, witness)) = chosen {
        check_witness(g, &witness)?;
        let detail = format!("e-separation: {cert}");
        return Ok(Verdict {
            status: Status::Interesting,
            method: Method::ESeparation,
            witness: Some(witness),
            certificate: Some(cert),
            detail,
        });
    }
    if let Some(cert) = first_cert {
        let detail = format!("e-separation: {cert} (no consistent correlated witness)");
        return Ok(Verdict {
            status: Status::Interesting,
            method: Method::ESeparation,
            witness: None,
            certificate: Some(cert),
            detail,
        });
    }
    parts.push("e-separation: no certificate found".into());
    let mut fine_grained_part = "fine-grained: no registered witness".to_string();
    for entry in catalog::entries() {
        let Some(registered) = &entry.fine_grained_witness else {
            continue;
        };
        if !g.same_labeled_structure(&entry.graph) {
            continue;
        }
        let distribution = registered.distribution();
        let consistency = ci_consistent(&distribution, g, None)?;
        let inequality = FineGrainedInequality::eq1();
        let (lhs, rhs) = inequality.evaluate(&distribution)?;
        if consistency.consistent && inequality.violated(lhs, rhs) {
            let witness = Witness {
                distribution,
                violated_constraint: inequality.name.clone(),
                lhs,
                rhs,
            };
            check_witness(g, &witness)?;
            return Ok(Verdict {
                status: Status::Interesting,
                method: Method::FineGrainedInequality,
                witness: Some(witness),
                certificate: None,
                detail: format!("fine-grained inequality {}: lhs={lhs:.6} rhs={rhs:.6}", inequality.name),
            });
        }
        fine_grained_part = format!(
            "fine-grained: registered witness does not establish a violation of {}",
            inequality.name
        );
        break;
    }
    parts.push(fine_grained_part);
    Ok(Verdict {
        status: Status::Inconclusive,
        method: Method::None,
        witness: None,
        certificate: None,
        detail: parts.join("; "),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SkeletonViability {
    pub viable: bool,
    /// First canonical graph (in enumeration order) realizing the target CI
    /// set, when one exists.
    pub witness: Option<Gdag>,
}

struct CandidateSpace {
    nodes: Vec<String>,
    n: usize,
    /// Skeleton edges as (low, high) node-index pairs, sorted.
    edges: Vec<(usize, usize)>,
    /// Cliques of size >= 2 as node masks, sorted by size then members.
    cliques: Vec<u32>,
    /// Facet families (antichains of cliques) as ascending clique bitmasks,
    /// each with the mask of `edges` positions the family covers.
    families: Vec<(u32, u64)>,
}

impl CandidateSpace {
    fn new(sk: &Skeleton) -> Result<Self, InterestError> {
        let nodes: Vec<String> = sk.nodes().to_vec();
        let n = nodes.len();
        if n > 5 {
            return Err(InterestError::TooLarge(n));
        }
        let pos = |label: &str| nodes.iter().position(|l| l == label).unwrap();
        let mut edges: Vec<(usize, usize)> = sk
            .edges()
            .iter()
            .map(|(a, b)| {
                let (i, j) = (pos(a), pos(b));
                (i.min(j), i.max(j))
            })
            .collect();
        edges.sort_unstable();
        let adjacent = |i: usize, j: usize| edges.contains(&(i.min(j), i.max(j)));
        let mut cliques: Vec<u32> = Vec::new();
        for mask in 1u32..1 << n {
            let members = obs_mask_tuple(mask);
            if members.len() < 2 {
                continue;
            }
            let clique = members
                .iter()
                .enumerate()
                .all(|(a, &i)| members[a + 1..].iter().all(|&j| adjacent(i, j)));
            if clique {
                cliques.push(mask);
            }
        }
        cliques.sort_by_key(|&m| (m.count_ones(), obs_mask_tuple(m)));
        let clique_cover: Vec<u64> = cliques
            .iter()
            .map(|&c| {
                edges
                    .iter()
                    .enumerate()
                    .filter(|&(_, &(i, j))| c & (1 << i) != 0 && c & (1 << j) != 0)
                    .fold(0u64, |acc, (e, _)| acc | (1 << e))
            })
            .collect();
        // antichain families in ascending bitmask order: the block of families
        // whose top clique is h extends every earlier family compatible with h
        let mut families: Vec<(u32, u64)> = vec![(0, 0)];
        for h in 0..cliques.len() {
            let block_end = families.len();
            for fi in 0..block_end {
                let (family, covered) = families[fi];
                let mut bits = family;
                let mut antichain = true;
                while bits != 0 {
                    let i = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    let meet = cliques[i] & cliques[h];
                    if meet == cliques[i] || meet == cliques[h] {
                        antichain = false;
                        break;
                    }
                }
                if antichain {
                    families.push((family | (1 << h), covered | clique_cover[h]));
                }
            }
        }
        Ok(CandidateSpace {
            nodes,
            n,
            edges,
            cliques,
            families,
        })
    }

    /// Walks every canonical graph whose skeleton equals the space's skeleton,
    /// in a fixed order: base-3 orientation codes over the sorted edge list
    /// (first edge most significant; 0 latent-only, 1 low-to-high, 2
    /// high-to-low), then facet families as ascending clique bitmasks. The
    /// visitor returns true to stop the walk.
    fn walk(&self, mut visit: impl FnMut(&RawCandidate) -> bool) {
        let m = self.edges.len();
        let code_count = 3usize.pow(m as u32);
        let mut candidate = RawCandidate {
            n: self.n,
            orientation: vec![0u8; m],
            family: 0,
            edges: Vec::new(),
            parents: Vec::new(),
        };
        for code in 0..code_count {
            let mut c = code;
            for d in (0..m).rev() {
                candidate.orientation[d] = (c % 3) as u8;
                c /= 3;
            }
            if !self.acyclic(&candidate.orientation) {
                continue;
            }
            let uncovered = candidate
                .orientation
                .iter()
                .enumerate()
                .filter(|&(_, &d)| d == 0)
                .fold(0u64, |acc, (e, _)| acc | (1 << e));
            for &(family, covered) in &self.families {
                if covered & uncovered != uncovered {
                    continue;
                }
                candidate.family = family;
                self.fill(&mut candidate);
                if visit(&candidate) {
                    return;
                }
            }
        }
    }

    fn acyclic(&self, orientation: &[u8]) -> bool {
        let mut parents = vec![0u32; self.n];
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            match orientation[e] {
                1 => parents[j] |= 1 << i,
                2 => parents[i] |= 1 << j,
                _ => {}
            }
        }
        let mut remaining: u32 = if self.n == 0 { 0 } else { (1 << self.n) - 1 };
        loop {
            let start = remaining;
            let mut scan = remaining;
            while scan != 0 {
                let v = scan.trailing_zeros() as usize;
                scan &= scan - 1;
                if parents[v] & remaining == 0 {
                    remaining &= !(1 << v);
                }
            }
            if remaining == 0 {
                return true;
            }
            if remaining == start {
                return false;
            }
        }
    }

    fn fill(&self, candidate: &mut RawCandidate) {
        let latents = candidate.family.count_ones() as usize;
        let total = self.n + latents;
        candidate.edges.clear();
        candidate.parents.clear();
        candidate.parents.resize(total, 0);
        for (e, &(i, j)) in self.edges.iter().enumerate() {
            match candidate.orientation[e] {
                1 => {
                    candidate.edges.push((i, j));
                    candidate.parents[j] |= 1 << i;
                }
                2 => {
                    candidate.edges.push((j, i));
                    candidate.parents[i] |= 1 << j;
                }
                _ => {}
            }
        }
        for (li, &clique_index) in obs_mask_tuple(candidate.family).iter().enumerate() {
            let latent = self.n + li;
            for member in obs_mask_tuple(self.cliques[clique_index]) {
                candidate.edges.push((latent, member));
                candidate.parents[member] |= 1 << latent;
            }
        }
    }

    /// Materializes a candidate as a full graph value.
    fn realize(&self, candidate: &RawCandidate) -> Gdag {
        let mut g = Gdag::new();
        for l in &self.nodes {
            g.add_node(l, true).unwrap();
        }
        for &clique_index in &obs_mask_tuple(candidate.family) {
            let members: Vec<&str> = obs_mask_tuple(self.cliques[clique_index])
                .iter()
                .map(|&i| self.nodes[i].as_str())
                .collect();
            let mut name = format!("u_{}", {
                let mut sorted = members.clone();
                sorted.sort_unstable();
                sorted.join("_")
            });
            while g.contains(&name) {
                name.push('_');
            }
            g.add_node(&name, false).unwrap();
        }
        let total_labels: Vec<String> = g.labels().to_vec();
        for &(t, h) in &candidate.edges {
            g.add_edge(&total_labels[t], &total_labels[h]).unwrap();
        }
        g.validate().expect("candidate is acyclic");
        g
    }
}

struct RawCandidate {
    n: usize,
    orientation: Vec<u8>,
    family: u32,
    edges: Vec<(usize, usize)>,
    parents: Vec<u64>,
}

impl RawCandidate {
    fn node_count(&self) -> usize {
        self.n + self.family.count_ones() as usize
    }

    fn d_sep(&self, x: u64, y: u64, z: u64) -> bool {
        d_sep_raw(self.node_count(), &self.edges, &self.parents, x, y, z)
    }
}

fn query_masks(
    space: &CandidateSpace,
    target: &CiSet,
    max_set_size: Option<usize>,
) -> Result<Vec<(u64, u64, u64, bool, CiRelation)>, InterestError> {
    let mut dummy = Gdag::new();
    for l in &space.nodes {
        dummy.add_node(l, true)?;
    }
    let pos = |s: &NodeSet| -> u64 {
        s.iter()
            .map(|l| space.nodes.iter().position(|n| n == l).unwrap())
            .fold(0u64, |acc, i| acc | (1 << i))
    };
    let mut out = Vec::new();
    for (x, y, z) in enumerate_ci_queries(&dummy, max_set_size)? {
        let (xm, ym, zm) = (pos(&x), pos(&y), pos(&z));
        let relation = CiRelation::new(x, y, z)?;
        let expected = target.contains(&relation);
        out.push((xm, ym, zm, expected, relation));
    }
    Ok(out)
}

/// Searches the canonical graphs over `sk` for one whose observed CI set is
/// exactly `target`.
pub fn skeleton_viability(
    sk: &Skeleton,
    target: &CiSet,
    max_set_size: Option<usize>,
) -> Result<SkeletonViability, InterestError> {
    let (viability, _) = viability_scan(sk, target, max_set_size)?;
    Ok(viability)
}

fn viability_scan(
    sk: &Skeleton,
    target: &CiSet,
    max_set_size: Option<usize>,
) -> Result<(SkeletonViability, Option<CiRelation>), InterestError> {
    let space = CandidateSpace::new(sk)?;
    let scope: NodeSet = space.nodes.iter().cloned().collect();
    if &scope != target.scope() {
        return Err(InterestError::NodeMismatch);
    }
    let queries = query_masks(&space, target, max_set_size)?;
    let mut witness: Option<Gdag> = None;
    let mut first_conflict: Option<CiRelation> = None;
    let mut seen_candidate = false;
    space.walk(|candidate| {
        let mismatch = queries
            .iter()
            .find(|(x, y, z, expected, _)| candidate.d_sep(*x, *y, *z) != *expected);
        if !seen_candidate {
            seen_candidate = true;
            first_conflict = mismatch.map(|(_, _, _, _, r)| r.clone());
        }
        if mismatch.is_none() {
            witness = Some(space.realize(candidate));
            return true;
        }
        false
    });
    let viable = witness.is_some();
    Ok((
        SkeletonViability { viable, witness },
        if viable { None } else { first_conflict },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChordDeletionReport {
    pub chord: (String, String),
    pub viable: bool,
    pub witness: Option<Gdag>,
    /// For a non-viable chord: the first query (in enumeration order) where
    /// the first structurally valid candidate disagrees with the target.
    pub first_conflict: Option<CiRelation>,
}

/// Removes each skeleton edge in turn and reports whether any canonical graph
/// on the reduced skeleton still realizes `g`'s observed CI set.
pub fn chord_deletion_report(
    g: &Gdag,
    max_set_size: Option<usize>,
) -> Result<Vec<ChordDeletionReport>, InterestError> {
    let sk = g.skeleton();
    let target = observed_ci_relations(g, max_set_size)?;
    let mut out = Vec::new();
    for (a, b) in sk.edges() {
        let reduced = sk.without_edge(a, b)?;
        let (viability, first_conflict) = viability_scan(&reduced, &target, max_set_size)?;
        out.push(ChordDeletionReport {
            chord: (a.clone(), b.clone()),
            viable: viability.viable,
            witness: viability.witness,
            first_conflict,
        });
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChordAdditionReport {
    pub chord: (String, String),
    pub addable: bool,
    /// A canonical graph on the augmented skeleton preserving every target
    /// relation, when one exists.
    pub witness: Option<Gdag>,
}

/// Adds each missing observed edge in turn and reports whether some canonical
/// graph on the augmented skeleton still satisfies every relation in `g`'s
/// observed CI set (its CI set may be larger).
pub fn chord_addition_report(
    g: &Gdag,
    max_set_size: Option<usize>,
) -> Result<Vec<ChordAdditionReport>, InterestError> {
    let sk = g.skeleton();
    let target = observed_ci_relations(g, max_set_size)?;
    let mut labels: Vec<&str> = g.observed_labels();
    labels.sort_unstable();
    let mut out = Vec::new();
    for i in 0..labels.len() {
        for j in i + 1..labels.len() {
            let (a, b) = (labels[i], labels[j]);
            if sk.has_edge(a, b) {
                continue;
            }
            let augmented = sk.with_edge(a, b)?;
            let space = CandidateSpace::new(&augmented)?;
            let pos = |s: &NodeSet| -> u64 {
                s.iter()
                    .map(|l| space.nodes.iter().position(|n| n == l).unwrap())
                    .fold(0u64, |acc, k| acc | (1 << k))
            };
            let required: Vec<(u64, u64, u64)> = target
                .relations()
                .iter()
                .map(|r| (pos(r.x()), pos(r.y()), pos(r.z())))
                .collect();
            let mut witness: Option<Gdag> = None;
            space.walk(|candidate| {
                if required.iter().all(|&(x, y, z)| candidate.d_sep(x, y, z)) {
                    witness = Some(space.realize(candidate));
                    return true;
                }
                false
            });
            out.push(ChordAdditionReport {
                chord: (a.to_string(), b.to_string()),
                addable: witness.is_some(),
                witness,
            });
        }
    }
    Ok(out)
}
