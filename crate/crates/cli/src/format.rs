//! The network file: a TOML document describing a graph, its intervenable
//! nodes, the desired target values and, optionally, CPDs and policies.
//!
//! ```toml
//! version = 1
//! intervenable = ["y"]
//! edges = [["x", "y"], ["x", "o"], ["y", "o"]]
//!
//! [[nodes]]
//! name = "x"
//! card = 2
//! # ... one entry per node, in index order
//!
//! [[targets]]
//! name = "o"
//! value = 1
//!
//! [cpds.x]
//! parents = []
//! table = [["0.3", "0.7"]]
//!
//! [policies.y]
//! scope = ["x"]
//! table = [["0", "1"], ["1", "0"]]
//! ```
//!
//! Probabilities are decimal strings. Tables list one row per parent (or
//! scope) configuration, first parent most significant.

use std::collections::BTreeMap;

use causal_control::cbn::{Assignment, Cbn, Cpd, ROW_TOLERANCE};
use causal_control::graph::{Dag, NodeId, NodeSet};
use causal_control::intervention::{InterventionPair, InterventionPolicy};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub version: u32,
    #[serde(default)]
    pub intervenable: Vec<String>,
    #[serde(default)]
    pub edges: Vec<(String, String)>,
    pub nodes: Vec<NodeSpec>,
    #[serde(default)]
    pub targets: Vec<TargetSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub cpds: BTreeMap<String, CpdSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub policies: BTreeMap<String, PolicySpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NodeSpec {
    pub name: String,
    pub card: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub name: String,
    pub value: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CpdSpec {
    #[serde(default)]
    pub parents: Vec<String>,
    pub table: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicySpec {
    #[serde(default)]
    pub scope: Vec<String>,
    pub table: Vec<Vec<String>>,
}

/// A validated network file.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    pub dag: Dag,
    pub cards: Vec<usize>,
    pub intervenable: NodeSet,
    pub desired: Assignment,
    pub cbn: Option<Cbn>,
    pub policies: InterventionPair,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Invalid(msg.into())
}

/// Parses a non-negative decimal such as `0.25` or `1` into an exact
/// mantissa and number of fractional digits.
pub fn parse_decimal(s: &str) -> Option<(u128, u32)> {
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    let digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    if int.is_empty() || !digits(int) || !digits(frac) || (s.contains('.') && frac.is_empty()) {
        return None;
    }
    if frac.len() > 30 {
        return None;
    }
    let mut m: u128 = 0;
    for b in int.bytes().chain(frac.bytes()) {
        m = m.checked_mul(10)?.checked_add(u128::from(b - b'0'))?;
    }
    Some((m, frac.len() as u32))
}

/// Parses rows of decimal strings, checking each row sums to one within
/// the row tolerance using exact decimal arithmetic.
fn parse_rows(rows: &[Vec<String>], card: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let mut out = Vec::with_capacity(rows.len() * card);
    for (r, row) in rows.iter().enumerate() {
        if row.len() != card {
            return Err(invalid(format!(
                "{what}: row {r} has {} entries, expected {card}",
                row.len()
            )));
        }
        let mut parsed = Vec::with_capacity(card);
        for (i, cell) in row.iter().enumerate() {
            let exact = parse_decimal(cell).ok_or_else(|| {
                invalid(format!(
                    "{what}: row {r} entry {i}: `{cell}` is not a decimal probability"
                ))
            })?;
            parsed.push(exact);
        }
        let scale = parsed.iter().map(|&(_, s)| s).max().unwrap_or(0);
        let sum: u128 = parsed.iter().map(|&(m, s)| m * 10u128.pow(scale - s)).sum();
        let one = 10u128.pow(scale);
        let gap = sum.abs_diff(one) as f64 / one as f64;
        if gap > ROW_TOLERANCE {
            return Err(invalid(format!(
                "{what}: row {r} sums to {}, not 1",
                sum as f64 / one as f64
            )));
        }
        for (i, cell) in row.iter().enumerate() {
            let p: f64 = cell.parse().expect("validated decimal");
            if p > 1.0 {
                return Err(invalid(format!("{what}: row {r} entry {i} exceeds 1")));
            }
            out.push(p);
        }
    }
    Ok(out)
}

fn format_rows(table: &[f64], card: usize) -> Vec<Vec<String>> {
    table
        .chunks(card)
        .map(|row| row.iter().map(|p| format!("{p}")).collect())
        .collect()
}

impl NetworkFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let file: NetworkFile =
            toml::from_str(text).map_err(|e| invalid(e.to_string().trim_end()))?;
        if file.version != SCHEMA_VERSION {
            return Err(invalid(format!(
                "version: unsupported schema version {} (expected {SCHEMA_VERSION})",
                file.version
            )));
        }
        Ok(file)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("network files always serialize")
    }

    /// Validates the document and builds the in-memory network.
    pub fn to_network(&self) -> Result<Network, CliError> {
        let names: Vec<&str> = self.nodes.iter().map(|n| n.name.as_str()).collect();
        for (i, n) in self.nodes.iter().enumerate() {
            if n.card < 2 {
                return Err(invalid(format!(
                    "nodes[{i}]: `{}` has cardinality {}, need at least 2",
                    n.name, n.card
                )));
            }
        }
        for (i, (p, c)) in self.edges.iter().enumerate() {
            for end in [p, c] {
                if !names.contains(&end.as_str()) {
                    return Err(invalid(format!("edges[{i}]: unknown node `{end}`")));
                }
            }
        }
        let dag = Dag::new(
            names.iter().copied(),
            self.edges.iter().map(|(p, c)| (p.as_str(), c.as_str())),
        )
        .map_err(|e| invalid(format!("graph: {e}")))?;
        let cards: Vec<usize> = self.nodes.iter().map(|n| n.card).collect();
        let lookup = |field: String, name: &str| -> Result<NodeId, CliError> {
            dag.node(name)
                .map_err(|_| invalid(format!("{field}: unknown node `{name}`")))
        };

        let mut intervenable = NodeSet::new();
        for (i, name) in self.intervenable.iter().enumerate() {
            let v = lookup(format!("intervenable[{i}]"), name)?;
            if !intervenable.insert(v) {
                return Err(invalid(format!("intervenable[{i}]: `{name}` listed twice")));
            }
        }

        let mut desired = Assignment::new();
        for (i, t) in self.targets.iter().enumerate() {
            let v = lookup(format!("targets[{i}]"), &t.name)?;
            if t.value >= cards[v.index()] {
                return Err(invalid(format!(
                    "targets[{i}]: value {} out of range for `{}` (cardinality {})",
                    t.value,
                    t.name,
                    cards[v.index()]
                )));
            }
            if desired.insert(v, t.value).is_some() {
                return Err(invalid(format!("targets[{i}]: `{}` listed twice", t.name)));
            }
        }

        let cbn = if self.cpds.is_empty() {
            None
        } else {
            for name in self.cpds.keys() {
                lookup("cpds".into(), name)?;
            }
            let mut cpds = Vec::with_capacity(dag.len());
            for v in dag.nodes() {
                let name = dag.name(v);
                let spec = self
                    .cpds
                    .get(name)
                    .ok_or_else(|| invalid(format!("cpds: missing table for node `{name}`")))?;
                let field = format!("cpds.{name}");
                let parents = spec
                    .parents
                    .iter()
                    .map(|p| lookup(format!("{field}.parents"), p))
                    .collect::<Result<Vec<_>, _>>()?;
                let want: NodeSet = dag.parents(v).iter().copied().collect();
                let got: NodeSet = parents.iter().copied().collect();
                if want != got || parents.len() != got.len() {
                    return Err(invalid(format!(
                        "{field}.parents: expected the graph parents {}",
                        dag.fmt_set(&want)
                    )));
                }
                let rows: usize = parents.iter().map(|p| cards[p.index()]).product();
                if spec.table.len() != rows {
                    return Err(invalid(format!(
                        "{field}.table: {} rows, expected {rows}",
                        spec.table.len()
                    )));
                }
                let table = parse_rows(&spec.table, cards[v.index()], &format!("{field}.table"))?;
                cpds.push(
                    Cpd::new(&dag, &cards, v, parents, table)
                        .map_err(|e| invalid(format!("{field}: {e}")))?,
                );
            }
            Some(
                Cbn::new(dag.clone(), cards.clone(), cpds)
                    .map_err(|e| invalid(format!("cpds: {e}")))?,
            )
        };

        let mut policies = InterventionPair::empty();
        for (name, spec) in &self.policies {
            let field = format!("policies.{name}");
            let v = lookup(field.clone(), name)?;
            let scope = spec
                .scope
                .iter()
                .map(|s| lookup(format!("{field}.scope"), s))
                .collect::<Result<Vec<_>, _>>()?;
            let rows: usize = scope.iter().map(|s| cards[s.index()]).product();
            if spec.table.len() != rows {
                return Err(invalid(format!(
                    "{field}.table: {} rows, expected {rows}",
                    spec.table.len()
                )));
            }
            let table = parse_rows(&spec.table, cards[v.index()], &format!("{field}.table"))?;
            policies.insert(
                InterventionPolicy::new(&dag, &cards, v, scope, table)
                    .map_err(|e| invalid(format!("{field}: {e}")))?,
            );
        }

        Ok(Network {
            dag,
            cards,
            intervenable,
            desired,
            cbn,
            policies,
        })
    }
}

impl Network {
    /// The canonical document for this network.
    pub fn to_file(&self) -> NetworkFile {
        let dag = &self.dag;
        let names = |vs: &[NodeId]| vs.iter().map(|&v| dag.name(v).to_string()).collect();
        NetworkFile {
            version: SCHEMA_VERSION,
            intervenable: self
                .intervenable
                .iter()
                .map(|&v| dag.name(v).to_string())
                .collect(),
            edges: dag
                .edges()
                .iter()
                .map(|&(p, c)| (dag.name(p).to_string(), dag.name(c).to_string()))
                .collect(),
            nodes: dag
                .nodes()
                .map(|v| NodeSpec {
                    name: dag.name(v).to_string(),
                    card: self.cards[v.index()],
                })
                .collect(),
            targets: self
                .desired
                .iter()
                .map(|(v, x)| TargetSpec {
                    name: dag.name(v).to_string(),
                    value: x,
                })
                .collect(),
            cpds: self
                .cbn
                .iter()
                .flat_map(|cbn| cbn.cpds())
                .map(|cpd| {
                    (
                        dag.name(cpd.owner()).to_string(),
                        CpdSpec {
                            parents: names(cpd.parents()),
                            table: format_rows(cpd.table(), cpd.card()),
                        },
                    )
                })
                .collect(),
            policies: self
                .policies
                .policies()
                .map(|p| {
                    (
                        dag.name(p.target()).to_string(),
                        PolicySpec {
                            scope: names(p.scope()),
                            table: format_rows(p.table().table(), p.table().card()),
                        },
                    )
                })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        self.to_file().to_toml()
    }
}

/// Parses and validates a network document.
pub fn parse_network(text: &str) -> Result<Network, CliError> {
    NetworkFile::parse(text)?.to_network()
}

#[cfg(test)]
mod tests {
    use super::*;

    const XOR: &str = r#"
version = 1
intervenable = ["y"]
edges = [["x", "y"], ["x", "o"], ["y", "o"]]

[[nodes]]
name = "x"
card = 2

[[nodes]]
name = "y"
card = 2

[[nodes]]
name = "o"
card = 2

[[targets]]
name = "o"
value = 1

[cpds.x]
table = [["0.3", "0.7"]]

[cpds.y]
parents = ["x"]
table = [["0", "1"], ["1", "0"]]

[cpds.o]
parents = ["x", "y"]
table = [["1", "0"], ["0", "1"], ["0", "1"], ["1", "0"]]
"#;

    #[test]
    fn decimals() {
        assert_eq!(parse_decimal("0.25"), Some((25, 2)));
        assert_eq!(parse_decimal("1"), Some((1, 0)));
        for bad in ["", ".5", "1.", "-0.1", "1e-3", "0x1", " 1"] {
            assert_eq!(parse_decimal(bad), None, "{bad}");
        }
    }

    #[test]
    fn parses_xor() {
        let net = parse_network(XOR).unwrap();
        assert_eq!(net.dag.len(), 3);
        let cbn = net.cbn.unwrap();
        assert!((cbn.marginal_prob(&net.desired).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn round_trip_is_canonical() {
        let net = parse_network(XOR).unwrap();
        let text = net.to_toml();
        let again = parse_network(&text).unwrap();
        assert_eq!(again, net);
        assert_eq!(again.to_toml(), text);
    }

    #[test]
    fn rejects_unknown_keys() {
        let text = XOR.replace("version = 1", "version = 1\ncolour = \"red\"");
        assert!(matches!(parse_network(&text), Err(CliError::Invalid(_))));
        let text = XOR.replace(
            "card = 2\n\n[[nodes]]\nname = \"y\"",
            "card = 2\nweight = 3\n\n[[nodes]]\nname = \"y\"",
        );
        assert!(parse_network(&text).is_err());
    }

    #[test]
    fn rejects_bad_rows() {
        let text = XOR.replace(r#"[["0.3", "0.7"]]"#, r#"[["0.3", "0.8"]]"#);
        let err = parse_network(&text).unwrap_err().to_string();
        assert!(err.contains("cpds.x.table: row 0 sums to"), "{err}");
        let text = XOR.replace(r#"[["0.3", "0.7"]]"#, r#"[["0.3", "0.7000000001"]]"#);
        assert!(parse_network(&text).is_ok());
    }

    #[test]
    fn rejects_unknown_edge_node() {
        let text = XOR.replace(r#"["y", "o"]]"#, r#"["z", "o"]]"#);
        let err = parse_network(&text).unwrap_err().to_string();
        assert!(err.contains("edges[2]: unknown node `z`"), "{err}");
    }

    #[test]
    fn rejects_other_versions() {
        let text = XOR.replace("version = 1", "version = 2");
        assert!(parse_network(&text).is_err());
    }
}
