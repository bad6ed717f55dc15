//! GDAG representation and purely graphical algorithms: d-separation, node
//! deletion, e-separation, hidden paths, maximal connected subsets, canonical
//! projection, and skeletons.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use thiserror::Error;

/// A set of node labels.
pub type NodeSet = BTreeSet<String>;

/// Builds a [`NodeSet`] from anything yielding string-likes.
pub fn nodeset<I, S>(labels: I) -> NodeSet
where
    I: IntoIterator<Item = S>,
    S: Into<String>,
{
    labels.into_iter().map(Into::into).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("cycle detected: {}", .0.join(" -> "))]
    CycleDetected(Vec<String>),
    #[error("dangling edge {tail} -> {head}")]
    DanglingEdge { tail: String, head: String },
    #[error("duplicate node label {0:?}")]
    DuplicateLabel(String),
    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),
    #[error("unknown node {0:?}")]
    UnknownNode(String),
    #[error("sets overlap at {0:?}")]
    OverlappingSets(String),
    #[error("query set must not be empty")]
    EmptyQuerySet,
    #[error("graph too large: {0} nodes (limit 64)")]
    TooLarge(usize),
}

/// A labeled directed acyclic graph whose nodes carry an observed/latent flag.
///
/// Node and edge insertion orders are preserved; they fix the deterministic
/// enumeration orders used elsewhere in the crate. Equality ignores edge
/// insertion order but not node insertion order.
#[derive(Debug, Clone)]
pub struct Gdag {
    pub(crate) labels: Vec<String>,
    pub(crate) observed: Vec<bool>,
    pub(crate) index: BTreeMap<String, usize>,
    pub(crate) edges: Vec<(usize, usize)>,
    pub(crate) edge_set: BTreeSet<(usize, usize)>,
    pub(crate) parents: Vec<u64>,
    pub(crate) children: Vec<u64>,
}

impl PartialEq for Gdag {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
            && self.observed == other.observed
            && self.edge_set == other.edge_set
    }
}

impl Eq for Gdag {}

impl Default for Gdag {
    fn default() -> Self {
        Self::new()
    }
}

impl Gdag {
    pub fn new() -> Self {
        Gdag {
            labels: Vec::new(),
            observed: Vec::new(),
            index: BTreeMap::new(),
            edges: Vec::new(),
            edge_set: BTreeSet::new(),
            parents: Vec::new(),
            children: Vec::new(),
        }
    }

    /// Builds a graph from node and edge lists and validates it.
    pub fn build(nodes: &[(&str, bool)], edges: &[(&str, &str)]) -> Result<Self, GraphError> {
        let mut g = Gdag::new();
        for &(label, observed) in nodes {
            g.add_node(label, observed)?;
        }
        for &(tail, head) in edges {
            g.add_edge(tail, head)?;
        }
        g.validate()?;
        Ok(g)
    }

    pub fn add_node(&mut self, label: &str, observed: bool) -> Result<(), GraphError> {
        if label.is_empty() {
            return Err(GraphError::UnknownNode(String::new()));
        }
        if self.index.contains_key(label) {
            return Err(GraphError::DuplicateLabel(label.to_string()));
        }
        if self.labels.len() >= 64 {
            return Err(GraphError::TooLarge(self.labels.len() + 1));
        }
        self.index.insert(label.to_string(), self.labels.len());
        self.labels.push(label.to_string());
        self.observed.push(observed);
        self.parents.push(0);
        self.children.push(0);
        Ok(())
    }

    pub fn add_edge(&mut self, tail: &str, head: &str) -> Result<(), GraphError> {
        let (t, h) = match (self.index.get(tail), self.index.get(head)) {
            (Some(&t), Some(&h)) => (t, h),
            _ => {
                return Err(GraphError::DanglingEdge {
                    tail: tail.to_string(),
                    head: head.to_string(),
                })
            }
        };
        if t == h {
            return Err(GraphError::CycleDetected(vec![
                tail.to_string(),
                head.to_string(),
            ]));
        }
        if !self.edge_set.insert((t, h)) {
            return Err(GraphError::DuplicateEdge(
                tail.to_string(),
                head.to_string(),
            ));
        }
        self.edges.push((t, h));
        self.parents[h] |= 1 << t;
        self.children[t] |= 1 << h;
        Ok(())
    }

    /// Checks every structural invariant: endpoints exist, no self-loops or
    /// duplicate edges (both enforced at construction), and acyclicity.
    pub fn validate(&self) -> Result<(), GraphError> {
        let n = self.labels.len();
        let mut indegree = vec![0usize; n];
        for &(_, h) in &self.edges {
            indegree[h] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indegree[v] == 0).collect();
        let mut seen = 0;
        while let Some(v) = queue.pop() {
            seen += 1;
            let mut cs = self.children[v];
            while cs != 0 {
                let c = cs.trailing_zeros() as usize;
                cs &= cs - 1;
                indegree[c] -= 1;
                if indegree[c] == 0 {
                    queue.push(c);
                }
            }
        }
        if seen == n {
            return Ok(());
        }
        Err(GraphError::CycleDetected(self.find_cycle(&indegree)))
    }

    // every node Kahn's algorithm leaves behind keeps a leftover parent, so
    // walking parents must revisit a node, closing a directed cycle (walking
    // children instead can strand on a node that is merely downstream of one)
    fn find_cycle(&self, indegree: &[usize]) -> Vec<String> {
        let start = (0..self.labels.len())
            .find(|&v| indegree[v] > 0)
            .expect("cycle exists");
        let mut path = vec![start];
        let mut on_path = 1u64 << start;
        let mut v = start;
        loop {
            let next = (0..self.labels.len())
                .find(|&p| self.edge_set.contains(&(p, v)) && indegree[p] > 0)
                .expect("leftover node has a leftover parent");
            if on_path & (1 << next) != 0 {
                let pos = path.iter().position(|&p| p == next).unwrap();
                let mut cycle: Vec<String> = path[pos..]
                    .iter()
                    .rev()
                    .map(|&p| self.labels[p].clone())
                    .collect();
                cycle.push(self.labels[*path.last().unwrap()].clone());
                return cycle;
            }
            on_path |= 1 << next;
            path.push(next);
            v = next;
        }
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn contains(&self, label: &str) -> bool {
        self.index.contains_key(label)
    }

    pub fn is_observed(&self, label: &str) -> Result<bool, GraphError> {
        self.idx(label).map(|i| self.observed[i])
    }

    /// Observed node labels in insertion order.
    pub fn observed_labels(&self) -> Vec<&str> {
        (0..self.labels.len())
            .filter(|&i| self.observed[i])
            .map(|i| self.labels[i].as_str())
            .collect()
    }

    pub fn latent_labels(&self) -> Vec<&str> {
        (0..self.labels.len())
            .filter(|&i| !self.observed[i])
            .map(|i| self.labels[i].as_str())
            .collect()
    }

    pub fn edges_labeled(&self) -> impl Iterator<Item = (&str, &str)> {
        self.edges
            .iter()
            .map(|&(t, h)| (self.labels[t].as_str(), self.labels[h].as_str()))
    }

    pub fn has_edge(&self, tail: &str, head: &str) -> bool {
        match (self.index.get(tail), self.index.get(head)) {
            (Some(&t), Some(&h)) => self.edge_set.contains(&(t, h)),
            _ => false,
        }
    }

    /// Same labels with the same flags and the same labeled edges, ignoring
    /// insertion order entirely.
    pub fn same_labeled_structure(&self, other: &Gdag) -> bool {
        if self.labels.len() != other.labels.len() || self.edges.len() != other.edges.len() {
            return false;
        }
        for (i, label) in self.labels.iter().enumerate() {
            match other.idx(label) {
                Ok(j) if other.observed[j] == self.observed[i] => {}
                _ => return false,
            }
        }
        self.edges_labeled()
            .all(|(t, h)| other.has_edge(t, h))
    }

    pub(crate) fn idx(&self, label: &str) -> Result<usize, GraphError> {
        self.index
            .get(label)
            .copied()
            .ok_or_else(|| GraphError::UnknownNode(label.to_string()))
    }

    pub(crate) fn mask_of(&self, s: &NodeSet) -> Result<u64, GraphError> {
        let mut m = 0u64;
        for label in s {
            m |= 1 << self.idx(label)?;
        }
        Ok(m)
    }

    pub(crate) fn set_of_mask(&self, mut m: u64) -> NodeSet {
        let mut s = NodeSet::new();
        while m != 0 {
            let v = m.trailing_zeros() as usize;
            m &= m - 1;
            s.insert(self.labels[v].clone());
        }
        s
    }

    pub(crate) fn observed_mask(&self) -> u64 {
        let mut m = 0u64;
        for (i, &o) in self.observed.iter().enumerate() {
            if o {
                m |= 1 << i;
            }
        }
        m
    }

    /// Strict transitive closure along reversed edges; a member of `s` appears
    /// only if another member (or a path of length >= 1) reaches it.
    pub(crate) fn ancestors_mask(&self, s: u64) -> u64 {
        let mut acc = 0u64;
        let mut frontier = s;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = self.parents[v] & !acc;
            acc |= new;
            frontier |= new;
        }
        acc
    }

    pub(crate) fn descendants_mask(&self, s: u64) -> u64 {
        let mut acc = 0u64;
        let mut frontier = s;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let new = self.children[v] & !acc;
            acc |= new;
            frontier |= new;
        }
        acc
    }

    pub fn ancestors(&self, s: &NodeSet) -> Result<NodeSet, GraphError> {
        Ok(self.set_of_mask(self.ancestors_mask(self.mask_of(s)?)))
    }

    pub fn descendants(&self, s: &NodeSet) -> Result<NodeSet, GraphError> {
        Ok(self.set_of_mask(self.descendants_mask(self.mask_of(s)?)))
    }

    /// Parents of one node, in insertion order.
    pub fn parent_labels(&self, label: &str) -> Result<Vec<&str>, GraphError> {
        let i = self.idx(label)?;
        Ok((0..self.labels.len())
            .filter(|&p| self.parents[i] & (1 << p) != 0)
            .map(|p| self.labels[p].as_str())
            .collect())
    }

    fn disjoint_masks(&self, sets: &[&NodeSet]) -> Result<Vec<u64>, GraphError> {
        let mut masks = Vec::with_capacity(sets.len());
        let mut union = 0u64;
        for s in sets {
            let m = self.mask_of(s)?;
            if m & union != 0 {
                let clash = (m & union).trailing_zeros() as usize;
                return Err(GraphError::OverlappingSets(self.labels[clash].clone()));
            }
            union |= m;
            masks.push(m);
        }
        Ok(masks)
    }

    /// d-separation: every undirected path from `x` to `y` is blocked by `z`.
    /// A non-collider blocks when it is in `z`; a collider blocks unless it or
    /// one of its descendants is in `z`. Disconnected pairs are trivially
    /// separated. Latent nodes are permitted in all three sets.
    pub fn d_separated(&self, x: &NodeSet, y: &NodeSet, z: &NodeSet) -> Result<bool, GraphError> {
        if x.is_empty() || y.is_empty() {
            return Err(GraphError::EmptyQuerySet);
        }
        let masks = self.disjoint_masks(&[x, y, z])?;
        Ok(self.d_sep_mask(masks[0], masks[1], masks[2]))
    }

    /// Separation in the moralized ancestral graph, equivalent to the
    /// path-blocking definition (the naive oracle in the test suite checks
    /// the equivalence on random graphs).
    pub(crate) fn d_sep_mask(&self, x: u64, y: u64, z: u64) -> bool {
        d_sep_raw(self.labels.len(), &self.edges, &self.parents, x, y, z)
    }

    /// Induced subgraph on the complement of `w`, preserving insertion order.
    pub fn delete_nodes(&self, w: &NodeSet) -> Result<Gdag, GraphError> {
        let wm = self.mask_of(w)?;
        let mut g = Gdag::new();
        for i in 0..self.labels.len() {
            if wm & (1 << i) == 0 {
                g.add_node(&self.labels[i], self.observed[i]).unwrap();
            }
        }
        for &(t, h) in &self.edges {
            if wm & (1 << t) == 0 && wm & (1 << h) == 0 {
                g.add_edge(&self.labels[t], &self.labels[h]).unwrap();
            }
        }
        Ok(g)
    }

    /// e-separation: d-separation of `x` and `y` by `z` after deleting `w`.
    pub fn e_separated(
        &self,
        x: &NodeSet,
        y: &NodeSet,
        z: &NodeSet,
        w: &NodeSet,
    ) -> Result<bool, GraphError> {
        if x.is_empty() || y.is_empty() {
            return Err(GraphError::EmptyQuerySet);
        }
        self.disjoint_masks(&[x, y, z, w])?;
        self.delete_nodes(w)?.d_separated(x, y, z)
    }

    /// A directed path from `x` to `y` with at least two arrows whose interior
    /// nodes are all latent. A single direct arrow does not count.
    pub fn hidden_path_exists(&self, x: &str, y: &str) -> Result<bool, GraphError> {
        let xi = self.idx(x)?;
        let yi = self.idx(y)?;
        if xi == yi {
            return Err(GraphError::OverlappingSets(x.to_string()));
        }
        Ok(self.hidden_path_idx(xi, yi))
    }

    fn latent_mask(&self) -> u64 {
        let mut m = 0u64;
        for (i, &o) in self.observed.iter().enumerate() {
            if !o {
                m |= 1 << i;
            }
        }
        m
    }

    fn hidden_path_idx(&self, xi: usize, yi: usize) -> bool {
        let latent = self.latent_mask();
        let mut reach = self.children[xi] & latent;
        let mut frontier = reach;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            if self.children[v] & (1 << yi) != 0 {
                return true;
            }
            let new = self.children[v] & latent & !reach;
            reach |= new;
            frontier |= new;
        }
        false
    }

    /// Observed nodes reachable from the latent node `u` by a directed path
    /// whose interior is latent. These are the nodes for which `u` is a
    /// hidden common cause.
    fn latent_reach(&self, u: usize) -> u64 {
        let latent = self.latent_mask();
        let obs = self.observed_mask();
        let mut out = self.children[u] & obs;
        let mut seen = self.children[u] & latent;
        let mut frontier = seen;
        while frontier != 0 {
            let v = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            out |= self.children[v] & obs;
            let new = self.children[v] & latent & !seen;
            seen |= new;
            frontier |= new;
        }
        out
    }

    /// All maximal observed subsets of size >= 2 sharing a hidden common
    /// cause, sorted by their label lists.
    pub fn maximal_connected_subsets(&self) -> Vec<NodeSet> {
        let mut reaches: Vec<u64> = (0..self.labels.len())
            .filter(|&u| !self.observed[u])
            .map(|u| self.latent_reach(u))
            .filter(|m| m.count_ones() >= 2)
            .collect();
        reaches.sort_unstable();
        reaches.dedup();
        let maximal: Vec<u64> = reaches
            .iter()
            .copied()
            .filter(|&m| !reaches.iter().any(|&o| o != m && o & m == m))
            .collect();
        let mut sets: Vec<NodeSet> = maximal.into_iter().map(|m| self.set_of_mask(m)).collect();
        sets.sort();
        sets
    }

    /// The canonical form: observed nodes kept, an arrow between an observed
    /// pair iff the pair is connected by an arrow or a hidden path, and one
    /// fresh latent node per maximal connected subset, parenting exactly it.
    pub fn canonical_projection(&self) -> Gdag {
        let mut g = Gdag::new();
        let obs: Vec<usize> = (0..self.labels.len()).filter(|&i| self.observed[i]).collect();
        for &i in &obs {
            g.add_node(&self.labels[i], true).unwrap();
        }
        for &t in &obs {
            for &h in &obs {
                if t == h {
                    continue;
                }
                if self.edge_set.contains(&(t, h)) || self.hidden_path_idx(t, h) {
                    g.add_edge(&self.labels[t], &self.labels[h]).unwrap();
                }
            }
        }
        for facet in self.maximal_connected_subsets() {
            let mut name = format!(
                "u_{}",
                facet.iter().cloned().collect::<Vec<_>>().join("_")
            );
            while g.contains(&name) {
                name.push('_');
            }
            g.add_node(&name, false).unwrap();
            for member in &facet {
                g.add_edge(&name, member).unwrap();
            }
        }
        g
    }

    /// Whether the graph equals its own canonical projection up to latent
    /// relabeling: every latent is a root whose children are observed, and the
    /// family of latent child sets is exactly the maximal connected subsets,
    /// one latent per subset.
    pub fn is_canonical(&self) -> bool {
        let obs = self.observed_mask();
        let mut family: Vec<u64> = Vec::new();
        for u in 0..self.labels.len() {
            if self.observed[u] {
                continue;
            }
            if self.parents[u] != 0 || self.children[u] & !obs != 0 {
                return false;
            }
            if (self.children[u]).count_ones() < 2 {
                return false;
            }
            family.push(self.children[u]);
        }
        let mut dedup = family.clone();
        dedup.sort_unstable();
        dedup.dedup();
        if dedup.len() != family.len() {
            return false;
        }
        let facets: Vec<u64> = self
            .maximal_connected_subsets()
            .iter()
            .map(|s| self.mask_of(s).unwrap())
            .collect();
        let facet_set: BTreeSet<u64> = facets.into_iter().collect();
        let family_set: BTreeSet<u64> = dedup.into_iter().collect();
        facet_set == family_set
    }

    /// Undirected graph over the observed nodes of the canonical projection:
    /// adjacency by arrow or by shared maximal connected subset.
    pub fn skeleton(&self) -> Skeleton {
        let proj = if self.is_canonical() {
            self.clone()
        } else {
            self.canonical_projection()
        };
        let mut edges: BTreeSet<(String, String)> = BTreeSet::new();
        let mut add = |a: &str, b: &str| {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            edges.insert((a.to_string(), b.to_string()));
        };
        for (t, h) in proj.edges_labeled() {
            if proj.is_observed(t).unwrap() && proj.is_observed(h).unwrap() {
                add(t, h);
            }
        }
        for facet in proj.maximal_connected_subsets() {
            let members: Vec<&String> = facet.iter().collect();
            for i in 0..members.len() {
                for j in i + 1..members.len() {
                    add(members[i], members[j]);
                }
            }
        }
        let nodes = self
            .observed_labels()
            .into_iter()
            .map(str::to_string)
            .collect();
        Skeleton::new(nodes, edges).expect("projection endpoints are observed")
    }

    /// Isomorphism that fixes observed labels and allows latent relabeling.
    pub fn observably_isomorphic(&self, other: &Gdag) -> bool {
        let my_obs: BTreeSet<&str> = self.observed_labels().into_iter().collect();
        let their_obs: BTreeSet<&str> = other.observed_labels().into_iter().collect();
        if my_obs != their_obs {
            return false;
        }
        let my_oo: BTreeSet<(&str, &str)> = self
            .edges_labeled()
            .filter(|&(t, h)| my_obs.contains(t) && my_obs.contains(h))
            .collect();
        let their_oo: BTreeSet<(&str, &str)> = other
            .edges_labeled()
            .filter(|&(t, h)| their_obs.contains(t) && their_obs.contains(h))
            .collect();
        if my_oo != their_oo {
            return false;
        }
        let mine: Vec<usize> = (0..self.labels.len()).filter(|&i| !self.observed[i]).collect();
        let theirs: Vec<usize> = (0..other.labels.len())
            .filter(|&i| !other.observed[i])
            .collect();
        if mine.len() != theirs.len() {
            return false;
        }
        let sig = |g: &Gdag, u: usize| -> (Vec<String>, Vec<String>, u32, u32) {
            let obs = g.observed_mask();
            (
                g.set_of_mask(g.parents[u] & obs).into_iter().collect(),
                g.set_of_mask(g.children[u] & obs).into_iter().collect(),
                (g.parents[u] & !obs).count_ones(),
                (g.children[u] & !obs).count_ones(),
            )
        };
        let my_sigs: Vec<_> = mine.iter().map(|&u| sig(self, u)).collect();
        let their_sigs: Vec<_> = theirs.iter().map(|&u| sig(other, u)).collect();

        fn assign(
            pos: usize,
            mine: &[usize],
            theirs: &[usize],
            my_sigs: &[(Vec<String>, Vec<String>, u32, u32)],
            their_sigs: &[(Vec<String>, Vec<String>, u32, u32)],
            used: &mut Vec<Option<usize>>,
            a: &Gdag,
            b: &Gdag,
            map: &mut Vec<usize>,
        ) -> bool {
            if pos == mine.len() {
                return true;
            }
            for cand in 0..theirs.len() {
                if used[cand].is_some() || my_sigs[pos] != their_sigs[cand] {
                    continue;
                }
                // latent-latent edges must agree with the partial map
                let mut ok = true;
                for prev in 0..pos {
                    let (u, v) = (mine[prev], mine[pos]);
                    let (pu, pv) = (theirs[map[prev]], theirs[cand]);
                    if a.edge_set.contains(&(u, v)) != b.edge_set.contains(&(pu, pv))
                        || a.edge_set.contains(&(v, u)) != b.edge_set.contains(&(pv, pu))
                    {
                        ok = false;
                        break;
                    }
                }
                if !ok {
                    continue;
                }
                used[cand] = Some(pos);
                map.push(cand);
                if assign(pos + 1, mine, theirs, my_sigs, their_sigs, used, a, b, map) {
                    return true;
                }
                map.pop();
                used[cand] = None;
            }
            false
        }

        let mut used = vec![None; theirs.len()];
        let mut map = Vec::new();
        assign(
            0, &mine, &theirs, &my_sigs, &their_sigs, &mut used, self, other, &mut map,
        )
    }
}

/// d-separation on raw index masks: separation of `x` and `y` given `z` in
/// the moralized subgraph induced on the union of the query sets and their
/// ancestors.
pub(crate) fn d_sep_raw(
    n: usize,
    edges: &[(usize, usize)],
    parents: &[u64],
    x: u64,
    y: u64,
    z: u64,
) -> bool {
    let seed = x | y | z;
    let mut relevant = seed;
    let mut frontier = seed;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = parents[v] & !relevant;
        relevant |= new;
        frontier |= new;
    }
    let mut adj = vec![0u64; n];
    for &(t, h) in edges {
        if relevant & (1 << t) != 0 && relevant & (1 << h) != 0 {
            adj[t] |= 1 << h;
            adj[h] |= 1 << t;
        }
    }
    // moralize: marry co-parents of every relevant node
    let mut rel = relevant;
    while rel != 0 {
        let v = rel.trailing_zeros() as usize;
        rel &= rel - 1;
        let mut ps = parents[v] & relevant;
        while ps != 0 {
            let a = ps.trailing_zeros() as usize;
            ps &= ps - 1;
            adj[a] |= ps;
            let mut rest = ps;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                adj[b] |= 1 << a;
            }
        }
    }
    let allowed = relevant & !z;
    let mut reach = x & allowed;
    let mut frontier = reach;
    while frontier != 0 {
        let v = frontier.trailing_zeros() as usize;
        frontier &= frontier - 1;
        let new = adj[v] & allowed & !reach;
        reach |= new;
        frontier |= new;
    }
    reach & y == 0
}

/// Undirected graph over observed nodes. Edges are stored with endpoints in
/// label order; node order records the owning graph's insertion order.
#[derive(Debug, Clone)]
pub struct Skeleton {
    nodes: Vec<String>,
    edges: BTreeSet<(String, String)>,
}

impl Skeleton {
    pub fn new(
        nodes: Vec<String>,
        edges: BTreeSet<(String, String)>,
    ) -> Result<Self, GraphError> {
        let known: BTreeSet<&String> = nodes.iter().collect();
        for (a, b) in &edges {
            if a == b {
                return Err(GraphError::CycleDetected(vec![a.clone(), b.clone()]));
            }
            for end in [a, b] {
                if !known.contains(end) {
                    return Err(GraphError::UnknownNode(end.clone()));
                }
            }
        }
        let edges = edges
            .into_iter()
            .map(|(a, b)| if a <= b { (a, b) } else { (b, a) })
            .collect();
        Ok(Skeleton { nodes, edges })
    }

    pub fn nodes(&self) -> &[String] {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<(String, String)> {
        &self.edges
    }

    pub fn has_edge(&self, a: &str, b: &str) -> bool {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.edges.contains(&(a.to_string(), b.to_string()))
    }

    pub fn without_edge(&self, a: &str, b: &str) -> Result<Skeleton, GraphError> {
        if !self.has_edge(a, b) {
            return Err(GraphError::UnknownNode(format!("{a} -- {b}")));
        }
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let mut edges = self.edges.clone();
        edges.remove(&(a.to_string(), b.to_string()));
        Skeleton::new(self.nodes.clone(), edges)
    }

    pub fn with_edge(&self, a: &str, b: &str) -> Result<Skeleton, GraphError> {
        let mut edges = self.edges.clone();
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        edges.insert((a.to_string(), b.to_string()));
        Skeleton::new(self.nodes.clone(), edges)
    }
}

impl PartialEq for Skeleton {
    fn eq(&self, other: &Self) -> bool {
        let mine: BTreeSet<&String> = self.nodes.iter().collect();
        let theirs: BTreeSet<&String> = other.nodes.iter().collect();
        mine == theirs && self.edges == other.edges
    }
}

impl Eq for Skeleton {}

impl fmt::Display for Skeleton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "nodes: {}", self.nodes.join(" "))?;
        for (a, b) in &self.edges {
            writeln!(f, "{a} -- {b}")?;
        }
        Ok(())
    }
}
