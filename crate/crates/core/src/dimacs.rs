//! DIMACS CNF reader and writer.
//!
//! Auxiliary variables round-trip through `c aux <index> <provenance>`
//! comment lines, which the writer emits ahead of the problem line.

use std::fmt::Write as _;

use thiserror::Error;

use crate::cnf::{AuxKind, Clause, Cnf, CnfError, Lit, Var};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DimacsError {
    #[error("line {line}: malformed problem line `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("missing `p cnf` problem line")]
    MissingHeader,
    #[error("line {line}: duplicate problem line")]
    DuplicateHeader { line: usize },
    #[error("line {line}: invalid literal `{token}`")]
    InvalidLiteral { line: usize, token: String },
    #[error("line {line}: literal {lit} exceeds declared variable count {vars}")]
    LiteralOutOfRange { line: usize, lit: i64, vars: u32 },
    #[error("header declares {declared} clauses but {found} were found")]
    ClauseCountMismatch { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    UnterminatedClause,
    #[error("line {line}: malformed aux annotation `{text}`")]
    MalformedAux { line: usize, text: String },
    #[error("line {line}: {source}")]
    Clause { line: usize, source: CnfError },
}

pub fn parse_dimacs(text: &str) -> Result<Cnf, DimacsError> {
    let mut header: Option<(u32, usize)> = None;
    let mut aux: Vec<(usize, Var, AuxKind)> = Vec::new();
    let mut cnf = Cnf::new(0);
    let mut pending: Vec<Lit> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('%') {
            break;
        }
        if let Some(rest) = line.strip_prefix('c') {
            if !(rest.is_empty() || rest.starts_with(char::is_whitespace)) {
                return Err(DimacsError::InvalidLiteral {
                    line: line_no,
                    token: line.split_whitespace().next().unwrap_or("").to_string(),
                });
            }
            let mut it = rest.split_whitespace();
            if it.next() == Some("aux") {
                let bad = || DimacsError::MalformedAux {
                    line: line_no,
                    text: line.to_string(),
                };
                let var: u32 = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                let kind: AuxKind = it.next().and_then(|t| t.parse().ok()).ok_or_else(bad)?;
                if var == 0 || it.next().is_some() {
                    return Err(bad());
                }
                aux.push((line_no, Var::new(var), kind));
            }
            continue;
        }
        if line.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line: line_no });
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let parsed = match fields.as_slice() {
                ["p", "cnf", v, c] => v.parse::<u32>().ok().zip(c.parse::<usize>().ok()),
                _ => None,
            };
            let (vars, clauses) = parsed.ok_or_else(|| DimacsError::MalformedHeader {
                line: line_no,
                text: line.to_string(),
            })?;
            header = Some((vars, clauses));
            cnf = Cnf::new(vars);
            continue;
        }
        let Some((vars, _)) = header else {
            return Err(DimacsError::MissingHeader);
        };
        for token in line.split_whitespace() {
            let value: i64 = token.parse().map_err(|_| DimacsError::InvalidLiteral {
                line: line_no,
                token: token.to_string(),
            })?;
            if value == 0 {
                let clause =
                    Clause::new(pending.drain(..)).map_err(|source| DimacsError::Clause {
                        line: line_no,
                        source,
                    })?;
                cnf.push(clause).map_err(|source| DimacsError::Clause {
                    line: line_no,
                    source,
                })?;
            } else {
                if value.unsigned_abs() > u64::from(vars) {
                    return Err(DimacsError::LiteralOutOfRange {
                        line: line_no,
                        lit: value,
                        vars,
                    });
                }
                pending.push(Lit::from_dimacs(value));
            }
        }
    }

    let (_, declared) = header.ok_or(DimacsError::MissingHeader)?;
    if !pending.is_empty() {
        return Err(DimacsError::UnterminatedClause);
    }
    if cnf.num_clauses() != declared {
        return Err(DimacsError::ClauseCountMismatch {
            declared,
            found: cnf.num_clauses(),
        });
    }
    for (line, var, kind) in aux {
        cnf.mark_aux(var, kind)
            .map_err(|source| DimacsError::Clause { line, source })?;
    }
    Ok(cnf)
}

pub fn write_dimacs(cnf: &Cnf) -> String {
    let mut out = String::with_capacity(16 + cnf.size() * 4);
    for (var, kind) in cnf.aux() {
        let _ = writeln!(out, "c aux {var} {kind}");
    }
    let _ = writeln!(out, "p cnf {} {}", cnf.universe(), cnf.num_clauses());
    for c in cnf.clauses() {
        for l in c.lits() {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
    out
}
