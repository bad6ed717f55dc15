//! Text formats for graphs, CI relations, distributions, causal models and
//! fine-grained inequalities. Line formats treat `#` as a comment marker;
//! parse errors cite line numbers; every serializer round-trips losslessly
//! through its parser.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num::{BigInt, BigRational, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ci::CiRelation;
use crate::dist::{CausalModel, DiscreteDistribution};
use crate::graph::{Gdag, NodeSet};
use crate::interest::{FineGrainedInequality, FineGrainedTerm};

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Line { line: usize, message: String },
    #[error("{0}")]
    Structure(String),
}

fn err(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Line {
        line,
        message: message.into(),
    }
}

fn structure(message: impl std::fmt::Display) -> FormatError {
    FormatError::Structure(message.to_string())
}

/// Non-blank lines with comments stripped, paired with 1-based line numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let body = match raw.find('#') {
            Some(p) => &raw[..p],
            None => raw,
        };
        let body = body.trim();
        if body.is_empty() {
            None
        } else {
            Some((i + 1, body))
        }
    })
}

fn parse_usize(line: usize, token: &str, what: &str) -> Result<usize, FormatError> {
    token
        .parse()
        .map_err(|_| err(line, format!("{what} must be a non-negative integer, got {token}")))
}

/// `n/d` or a bare integer `n`.
fn parse_rational(line: usize, token: &str) -> Result<BigRational, FormatError> {
    let (n, d) = match token.split_once('/') {
        Some((n, d)) => (n, d),
        None => (token, "1"),
    };
    let n: BigInt = n
        .parse()
        .map_err(|_| err(line, format!("invalid numerator in {token}")))?;
    let d: BigInt = d
        .parse()
        .map_err(|_| err(line, format!("invalid denominator in {token}")))?;
    if d.is_zero() {
        return Err(err(line, format!("zero denominator in {token}")));
    }
    Ok(BigRational::new(n, d))
}

fn rational_text(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Comma-separated labels; `-` (or nothing) is the empty set.
fn parse_set(line: usize, text: &str) -> Result<NodeSet, FormatError> {
    let text = text.trim();
    if text.is_empty() || text == "-" {
        return Ok(NodeSet::new());
    }
    let mut set = NodeSet::new();
    for part in text.split(',') {
        let part = part.trim();
        if part.is_empty() {
            return Err(err(line, "empty member in set"));
        }
        set.insert(part.to_string());
    }
    Ok(set)
}

fn set_text(s: &NodeSet) -> String {
    if s.is_empty() {
        "-".to_string()
    } else {
        s.iter().cloned().collect::<Vec<_>>().join(",")
    }
}

#[derive(Serialize, Deserialize)]
struct GraphNodeDoc {
    label: String,
    observed: bool,
}

#[derive(Serialize, Deserialize)]
struct GraphDoc {
    nodes: Vec<GraphNodeDoc>,
    edges: Vec<(String, String)>,
}

/// Parses either format: the line format (`node <label> observed|latent`,
/// `edge <tail> <head>`) or, when the text starts with `{`, the structured
/// JSON object with the same fields.
pub fn parse_graph(text: &str) -> Result<Gdag, FormatError> {
    if text.trim_start().starts_with('{') {
        let doc: GraphDoc = serde_json::from_str(text).map_err(structure)?;
        let mut g = Gdag::new();
        for node in &doc.nodes {
            g.add_node(&node.label, node.observed).map_err(structure)?;
        }
        for (tail, head) in &doc.edges {
            g.add_edge(tail, head).map_err(structure)?;
        }
        g.validate().map_err(structure)?;
        return Ok(g);
    }
    let mut g = Gdag::new();
    for (no, line) in lines(text) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["node", label, kind] => {
                let observed = match *kind {
                    "observed" => true,
                    "latent" => false,
                    other => return Err(err(no, format!("node kind must be observed or latent, got {other}"))),
                };
                g.add_node(label, observed).map_err(|e| err(no, e.to_string()))?;
            }
            ["edge", tail, head] => {
                g.add_edge(tail, head).map_err(|e| err(no, e.to_string()))?;
            }
            ["node", ..] => return Err(err(no, "expected: node <label> observed|latent")),
            ["edge", ..] => return Err(err(no, "expected: edge <tail> <head>")),
            [other, ..] => return Err(err(no, format!("unknown directive {other}"))),
            [] => unreachable!("blank lines are filtered"),
        }
    }
    g.validate().map_err(structure)?;
    Ok(g)
}

pub fn serialize_graph(g: &Gdag) -> String {
    let mut out = String::new();
    for label in g.labels() {
        let kind = if g.is_observed(label).expect("label came from the graph") {
            "observed"
        } else {
            "latent"
        };
        writeln!(out, "node {label} {kind}").unwrap();
    }
    for (tail, head) in g.edges_labeled() {
        writeln!(out, "edge {tail} {head}").unwrap();
    }
    out
}

pub fn serialize_graph_json(g: &Gdag) -> String {
    let doc = GraphDoc {
        nodes: g
            .labels()
            .iter()
            .map(|label| GraphNodeDoc {
                label: label.clone(),
                observed: g.is_observed(label).expect("label came from the graph"),
            })
            .collect(),
        edges: g
            .edges_labeled()
            .map(|(t, h)| (t.to_string(), h.to_string()))
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("graph document serializes")
}

fn parse_ci_at(line: usize, text: &str) -> Result<CiRelation, FormatError> {
    let (x, rest) = text
        .split_once("_||_")
        .ok_or_else(|| err(line, "expected X _||_ Y [| Z]"))?;
    let (y, z) = match rest.split_once('|') {
        Some((y, z)) => (y, parse_set(line, z)?),
        None => (rest, NodeSet::new()),
    };
    let x = parse_set(line, x)?;
    let y = parse_set(line, y)?;
    CiRelation::new(x, y, z).map_err(|e| err(line, e.to_string()))
}

/// One relation in the syntax `X,Y _||_ U,V | Z` (the `| Z` part optional).
pub fn parse_ci_relation(text: &str) -> Result<CiRelation, FormatError> {
    parse_ci_at(1, text)
}

/// A file of CI relations, one per line.
pub fn parse_ci_relations(text: &str) -> Result<Vec<CiRelation>, FormatError> {
    lines(text).map(|(no, line)| parse_ci_at(no, line)).collect()
}

pub fn serialize_ci_relations<'a>(relations: impl IntoIterator<Item = &'a CiRelation>) -> String {
    let mut out = String::new();
    for r in relations {
        writeln!(out, "{r}").unwrap();
    }
    out
}

/// `var <name> <cardinality>` lines followed by `p <v1> … <vk> <n>/<d>` rows;
/// omitted rows carry zero mass and the total must be 1.
pub fn parse_distribution(text: &str) -> Result<DiscreteDistribution, FormatError> {
    let mut vars: Vec<(String, usize)> = Vec::new();
    let mut rows: Vec<(Vec<usize>, BigRational)> = Vec::new();
    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    for (no, line) in lines(text) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.first().copied() {
            Some("var") => {
                if !rows.is_empty() {
                    return Err(err(no, "var lines must precede p lines"));
                }
                let [_, name, card] = tokens.as_slice() else {
                    return Err(err(no, "expected: var <name> <cardinality>"));
                };
                let card = parse_usize(no, card, "cardinality")?;
                if card == 0 {
                    return Err(err(no, format!("variable {name} has cardinality 0")));
                }
                vars.push((name.to_string(), card));
            }
            Some("p") => {
                if tokens.len() != vars.len() + 2 {
                    return Err(err(
                        no,
                        format!("expected {} values and a probability", vars.len()),
                    ));
                }
                let mut assignment = Vec::with_capacity(vars.len());
                for (token, (name, card)) in tokens[1..=vars.len()].iter().zip(&vars) {
                    let v = parse_usize(no, token, "value")?;
                    if v >= *card {
                        return Err(err(no, format!("value {v} out of range for {name}")));
                    }
                    assignment.push(v);
                }
                if !seen.insert(assignment.clone()) {
                    return Err(err(no, "duplicate assignment"));
                }
                let mass = parse_rational(no, tokens[vars.len() + 1])?;
                rows.push((assignment, mass));
            }
            Some(other) => return Err(err(no, format!("unknown directive {other}"))),
            None => unreachable!("blank lines are filtered"),
        }
    }
    let vars: Vec<(&str, usize)> = vars.iter().map(|(n, c)| (n.as_str(), *c)).collect();
    DiscreteDistribution::from_support(&vars, &rows).map_err(structure)
}

pub fn serialize_distribution(d: &DiscreteDistribution) -> String {
    let mut out = String::new();
    for (name, card) in d.variables().iter().zip(d.cardinalities()) {
        writeln!(out, "var {name} {card}").unwrap();
    }
    for (assignment, mass) in d.support() {
        out.push('p');
        for v in assignment {
            write!(out, " {v}").unwrap();
        }
        writeln!(out, " {}", rational_text(mass)).unwrap();
    }
    out
}

struct RawCpt {
    line: usize,
    node: String,
    assignment: Vec<(String, usize)>,
    row: Vec<BigRational>,
}

/// Graph directives plus one `cpt <node> | <parents> : <rationals>` row per
/// parent assignment, `-` standing for no parents. Node cardinalities are the
/// rational-list lengths.
pub fn parse_model(text: &str) -> Result<CausalModel, FormatError> {
    let mut g = Gdag::new();
    let mut raw: Vec<RawCpt> = Vec::new();
    for (no, line) in lines(text) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        match tokens.as_slice() {
            ["node", label, kind] => {
                let observed = match *kind {
                    "observed" => true,
                    "latent" => false,
                    other => return Err(err(no, format!("node kind must be observed or latent, got {other}"))),
                };
                g.add_node(label, observed).map_err(|e| err(no, e.to_string()))?;
            }
            ["edge", tail, head] => {
                g.add_edge(tail, head).map_err(|e| err(no, e.to_string()))?;
            }
            ["cpt", rest @ ..] => {
                let [node, "|", rest @ ..] = rest else {
                    return Err(err(no, "expected: cpt <node> | <assignment> : <rationals>"));
                };
                let colon = rest
                    .iter()
                    .position(|&t| t == ":")
                    .ok_or_else(|| err(no, "cpt row needs a : before the rationals"))?;
                let assignment_text = rest[..colon].concat();
                let mut assignment = Vec::new();
                if assignment_text != "-" {
                    if assignment_text.is_empty() {
                        return Err(err(no, "empty assignment; use - for no parents"));
                    }
                    for pair in assignment_text.split(',') {
                        let (name, value) = pair
                            .split_once('=')
                            .ok_or_else(|| err(no, format!("expected <parent>=<value>, got {pair}")))?;
                        let value = parse_usize(no, value, "parent value")?;
                        assignment.push((name.to_string(), value));
                    }
                }
                let row = rest[colon + 1..]
                    .iter()
                    .map(|t| parse_rational(no, t))
                    .collect::<Result<Vec<_>, _>>()?;
                if row.is_empty() {
                    return Err(err(no, "cpt row has no entries"));
                }
                raw.push(RawCpt {
                    line: no,
                    node: node.to_string(),
                    assignment,
                    row,
                });
            }
            [other, ..] => return Err(err(no, format!("unknown directive {other}"))),
            [] => unreachable!("blank lines are filtered"),
        }
    }
    g.validate().map_err(structure)?;
    let mut cards: BTreeMap<String, usize> = BTreeMap::new();
    for r in &raw {
        if !g.contains(&r.node) {
            return Err(err(r.line, format!("cpt for unknown node {}", r.node)));
        }
        let card = cards.entry(r.node.clone()).or_insert(r.row.len());
        if *card != r.row.len() {
            return Err(err(
                r.line,
                format!("cpt rows for {} disagree on cardinality", r.node),
            ));
        }
    }
    let mut tables: BTreeMap<String, Vec<Option<Vec<BigRational>>>> = BTreeMap::new();
    for r in raw {
        let parents = g.parent_labels(&r.node).map_err(structure)?;
        let mut values: BTreeMap<&str, usize> = BTreeMap::new();
        for (name, value) in &r.assignment {
            if values.insert(name.as_str(), *value).is_some() {
                return Err(err(r.line, format!("parent {name} assigned twice")));
            }
        }
        if values.len() != parents.len() || parents.iter().any(|p| !values.contains_key(p)) {
            return Err(err(
                r.line,
                format!(
                    "assignment must name exactly the parents of {}: {}",
                    r.node,
                    if parents.is_empty() { "-".to_string() } else { parents.join(",") },
                ),
            ));
        }
        let mut index = 0usize;
        let mut rows = 1usize;
        for parent in &parents {
            let card = *cards
                .get(*parent)
                .ok_or_else(|| err(r.line, format!("no cpt row fixes the cardinality of {parent}")))?;
            let value = values[*parent];
            if value >= card {
                return Err(err(r.line, format!("value {value} out of range for {parent}")));
            }
            index = index * card + value;
            rows *= card;
        }
        let table = tables
            .entry(r.node.clone())
            .or_insert_with(|| vec![None; rows]);
        if table[index].replace(r.row).is_some() {
            return Err(err(r.line, "duplicate cpt row"));
        }
    }
    let mut complete: BTreeMap<String, Vec<Vec<BigRational>>> = BTreeMap::new();
    for (node, table) in tables {
        let rows = table
            .into_iter()
            .collect::<Option<Vec<_>>>()
            .ok_or_else(|| FormatError::Structure(format!("{node}: missing cpt rows")))?;
        complete.insert(node, rows);
    }
    CausalModel::new(g, &cards, &complete).map_err(structure)
}

pub fn serialize_model(m: &CausalModel) -> String {
    let mut out = serialize_graph(m.graph());
    for label in m.graph().labels() {
        let parents = m.graph().parent_labels(label).expect("label came from the graph");
        let parent_cards: Vec<usize> = parents
            .iter()
            .map(|p| m.cardinality(p).expect("parent came from the graph"))
            .collect();
        let cpt = m.cpt(label).expect("label came from the graph");
        for (index, row) in cpt.iter().enumerate() {
            let assignment = if parents.is_empty() {
                "-".to_string()
            } else {
                let mut rem = index;
                let mut values = vec![0usize; parents.len()];
                for i in (0..parents.len()).rev() {
                    values[i] = rem % parent_cards[i];
                    rem /= parent_cards[i];
                }
                parents
                    .iter()
                    .zip(&values)
                    .map(|(p, v)| format!("{p}={v}"))
                    .collect::<Vec<_>>()
                    .join(",")
            };
            let entries = row.iter().map(rational_text).collect::<Vec<_>>().join(" ");
            writeln!(out, "cpt {label} | {assignment} : {entries}").unwrap();
        }
    }
    out
}

/// Records of the form `inequality <name>` / `exogenous <var>` /
/// `sections <v0> <v1>` / `term <sign> <X> : <Y> | <Z> section <v>` /
/// `rhs <set>` / `end`. Several records per file are allowed.
pub fn parse_inequalities(text: &str) -> Result<Vec<FineGrainedInequality>, FormatError> {
    struct Partial {
        line: usize,
        name: String,
        exogenous: Option<String>,
        sections: Option<(usize, usize)>,
        terms: Vec<FineGrainedTerm>,
        rhs: Option<NodeSet>,
    }
    let mut done = Vec::new();
    let mut current: Option<Partial> = None;
    for (no, line) in lines(text) {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let directive = tokens[0];
        if directive == "inequality" {
            if current.is_some() {
                return Err(err(no, "previous inequality record is missing its end"));
            }
            let [_, name] = tokens.as_slice() else {
                return Err(err(no, "expected: inequality <name>"));
            };
            current = Some(Partial {
                line: no,
                name: name.to_string(),
                exogenous: None,
                sections: None,
                terms: Vec::new(),
                rhs: None,
            });
            continue;
        }
        let record = current
            .as_mut()
            .ok_or_else(|| err(no, "directive outside an inequality record"))?;
        match tokens.as_slice() {
            ["exogenous", var] => record.exogenous = Some(var.to_string()),
            ["sections", a, b] => {
                record.sections = Some((
                    parse_usize(no, a, "section value")?,
                    parse_usize(no, b, "section value")?,
                ));
            }
            ["term", sign, x, ":", y, "|", z, "section", v] => {
                let sign: i32 = sign
                    .parse()
                    .map_err(|_| err(no, format!("invalid sign {sign}")))?;
                if sign == 0 {
                    return Err(err(no, "sign must be non-zero"));
                }
                let x = parse_set(no, x)?;
                let y = parse_set(no, y)?;
                if x.is_empty() || y.is_empty() {
                    return Err(err(no, "term sets X and Y must be non-empty"));
                }
                record.terms.push(FineGrainedTerm {
                    sign,
                    x,
                    y,
                    z: parse_set(no, z)?,
                    section: parse_usize(no, v, "section value")?,
                });
            }
            ["rhs", set] => record.rhs = Some(parse_set(no, set)?),
            ["end"] => {
                let record = current.take().expect("record is current");
                let missing = |what: &str| {
                    err(record.line, format!("inequality {} is missing {what}", record.name))
                };
                done.push(FineGrainedInequality {
                    exogenous: record.exogenous.ok_or_else(|| missing("exogenous"))?,
                    section_values: record.sections.ok_or_else(|| missing("sections"))?,
                    rhs: record.rhs.ok_or_else(|| missing("rhs"))?,
                    terms: if record.terms.is_empty() {
                        return Err(missing("terms"));
                    } else {
                        record.terms
                    },
                    name: record.name,
                });
            }
            [other, ..] => return Err(err(no, format!("unknown directive {other}"))),
            [] => unreachable!("blank lines are filtered"),
        }
    }
    if let Some(record) = current {
        return Err(FormatError::Structure(format!(
            "inequality {} is missing its end",
            record.name
        )));
    }
    Ok(done)
}

pub fn serialize_inequality(q: &FineGrainedInequality) -> String {
    let mut out = String::new();
    writeln!(out, "inequality {}", q.name).unwrap();
    writeln!(out, "exogenous {}", q.exogenous).unwrap();
    writeln!(out, "sections {} {}", q.section_values.0, q.section_values.1).unwrap();
    for t in &q.terms {
        writeln!(
            out,
            "term {:+} {} : {} | {} section {}",
            t.sign,
            set_text(&t.x),
            set_text(&t.y),
            set_text(&t.z),
            t.section
        )
        .unwrap();
    }
    writeln!(out, "rhs {}", set_text(&q.rhs)).unwrap();
    writeln!(out, "end").unwrap();
    out
}
