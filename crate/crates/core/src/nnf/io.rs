//! c2d NNF text format.
//!
//! ```text
//! nnf <nodes> <edges> <vars>
//! L <signed literal>
//! A <child count> <child ids...>
//! O <decision var or 0> <child count> <child ids...>
//! ```
//!
//! Ids are 0-based line positions and the last node is the root. TRUE is
//! written as `A 0` and FALSE as `O 0 0`.

use std::fmt::Write as _;

use super::{NnfDag, NnfError, NnfNode};
use crate::cnf::{Lit, Var};

pub fn parse_nnf(text: &str) -> Result<NnfDag, NnfError> {
    let mut header: Option<(usize, usize, u32)> = None;
    let mut nodes: Vec<NnfNode> = Vec::new();
    let mut edges = 0usize;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line == "c" || line.starts_with("c ") {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if header.is_none() {
            let parsed = match fields.as_slice() {
                ["nnf", v, e, n] => match (v.parse(), e.parse(), n.parse()) {
                    (Ok(v), Ok(e), Ok(n)) => Some((v, e, n)),
                    _ => None,
                },
                _ => None,
            };
            header = Some(parsed.ok_or_else(|| {
                if fields[0] == "nnf" {
                    NnfError::MalformedHeader {
                        line: line_no,
                        text: line.to_string(),
                    }
                } else {
                    NnfError::MissingHeader
                }
            })?);
            continue;
        }
        let malformed = || NnfError::MalformedNode {
            line: line_no,
            text: line.to_string(),
        };
        let nums = |s: &[&str]| -> Result<Vec<i64>, NnfError> {
            s.iter()
                .map(|t| t.parse::<i64>().map_err(|_| malformed()))
                .collect()
        };
        let id = nodes.len();
        let children = |counted: &[i64]| -> Result<Vec<usize>, NnfError> {
            let (&count, ids) = counted.split_first().ok_or_else(malformed)?;
            if count < 0 || ids.len() != count as usize {
                return Err(malformed());
            }
            ids.iter()
                .map(|&c| {
                    let c = usize::try_from(c).map_err(|_| malformed())?;
                    if c >= id {
                        Err(NnfError::ForwardReference { node: id, child: c })
                    } else {
                        Ok(c)
                    }
                })
                .collect()
        };
        let node = match fields[0] {
            "L" => match nums(&fields[1..])?.as_slice() {
                [l] if *l != 0 => NnfNode::Lit(Lit::from_dimacs(*l)),
                _ => return Err(malformed()),
            },
            "A" => {
                let ch = children(&nums(&fields[1..])?)?;
                edges += ch.len();
                if ch.is_empty() {
                    NnfNode::True
                } else {
                    NnfNode::And(ch)
                }
            }
            "O" => {
                let n = nums(&fields[1..])?;
                let (&decision, rest) = n.split_first().ok_or_else(malformed)?;
                if decision < 0 {
                    return Err(malformed());
                }
                let ch = children(rest)?;
                edges += ch.len();
                if ch.is_empty() {
                    NnfNode::False
                } else {
                    let decision = u32::try_from(decision).map_err(|_| malformed())?;
                    NnfNode::Or {
                        children: ch,
                        decision: (decision != 0).then(|| Var::new(decision)),
                    }
                }
            }
            tag => {
                return Err(NnfError::UnknownTag {
                    line: line_no,
                    tag: tag.to_string(),
                })
            }
        };
        nodes.push(node);
    }

    let (v, e, n) = header.ok_or(NnfError::MissingHeader)?;
    if v != nodes.len() {
        return Err(NnfError::HeaderMismatch {
            what: "nodes",
            declared: v,
            found: nodes.len(),
        });
    }
    if e != edges {
        return Err(NnfError::HeaderMismatch {
            what: "edges",
            declared: e,
            found: edges,
        });
    }
    if nodes.is_empty() {
        return Err(NnfError::Empty);
    }
    let root = nodes.len() - 1;
    NnfDag::new(nodes, root, n)
}

/// Writes the DAG; if the root is not the last node the arena is compacted
/// first.
pub fn write_nnf(dag: &NnfDag) -> String {
    if dag.root() + 1 != dag.len() {
        return write_nnf(&dag.compact());
    }
    let edges: usize = dag.nodes().iter().map(|n| n.children().len()).sum();
    let mut out = String::with_capacity(dag.len() * 8);
    let _ = writeln!(out, "nnf {} {} {}", dag.len(), edges, dag.num_vars());
    for node in dag.nodes() {
        match node {
            NnfNode::Lit(l) => {
                let _ = writeln!(out, "L {l}");
            }
            NnfNode::True => out.push_str("A 0\n"),
            NnfNode::False => out.push_str("O 0 0\n"),
            NnfNode::And(ch) => {
                let _ = write!(out, "A {}", ch.len());
                for c in ch {
                    let _ = write!(out, " {c}");
                }
                out.push('\n');
            }
            NnfNode::Or { children, decision } => {
                let d = decision.map_or(0, Var::index);
                let _ = write!(out, "O {d} {}", children.len());
                for c in children {
                    let _ = write!(out, " {c}");
                }
                out.push('\n');
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_minimal_and() {
        let dag = parse_nnf("nnf 3 2 2\nL 1\nL 2\nA 2 0 1\n").unwrap();
        assert_eq!(dag.root(), 2);
        assert_eq!(dag.node(2), &NnfNode::And(vec![0, 1]));
        assert_eq!(write_nnf(&dag), "nnf 3 2 2\nL 1\nL 2\nA 2 0 1\n");
    }

    #[test]
    fn single_literal() {
        let dag = parse_nnf("nnf 1 0 1\nL -1\n").unwrap();
        assert_eq!(dag.node(0), &NnfNode::Lit(Lit::from_dimacs(-1)));
    }

    #[test]
    fn forward_reference_rejected() {
        assert_eq!(
            parse_nnf("nnf 1 1 1\nA 1 5\n"),
            Err(NnfError::ForwardReference { node: 0, child: 5 })
        );
    }

    #[test]
    fn header_mismatch_and_unknown_tag() {
        assert!(matches!(
            parse_nnf("nnf 2 0 1\nL 1\n"),
            Err(NnfError::HeaderMismatch { what: "nodes", .. })
        ));
        assert!(matches!(
            parse_nnf("nnf 1 0 1\nX 1\n"),
            Err(NnfError::UnknownTag { .. })
        ));
        assert!(matches!(parse_nnf("L 1\n"), Err(NnfError::MissingHeader)));
    }

    #[test]
    fn constants() {
        let t = NnfDag::constant(true, 0);
        assert_eq!(write_nnf(&t), "nnf 1 0 0\nA 0\n");
        assert_eq!(parse_nnf("nnf 1 0 0\nA 0\n").unwrap(), t);
        let f = NnfDag::constant(false, 0);
        assert_eq!(write_nnf(&f), "nnf 1 0 0\nO 0 0\n");
    }

    #[test]
    fn decision_variable_round_trips() {
        let text = "nnf 5 4 1\nL 1\nL -1\nA 1 0\nA 1 1\nO 1 2 2 3\n";
        assert_eq!(write_nnf(&parse_nnf(text).unwrap()), text);
    }
}
