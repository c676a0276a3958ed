//! Boolean formulas in prefix notation.
//!
//! ```text
//! (and f g ...) (or f g ...) (not f) (xor f g) (iff f g) (var i) true false
//! ```

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::cnf::{Cnf, Lit, Var};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Formula {
    Const(bool),
    Var(Var),
    Not(Box<Formula>),
    And(Vec<Formula>),
    Or(Vec<Formula>),
    Xor(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormulaError {
    #[error("unexpected end of input")]
    UnexpectedEnd,
    #[error("unexpected token `{token}` at byte {pos}")]
    UnexpectedToken { token: String, pos: usize },
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("`{op}` expects {expected} operand(s), got {found}")]
    Arity {
        op: &'static str,
        expected: &'static str,
        found: usize,
    },
    #[error("invalid variable index `{0}`")]
    BadVariable(String),
    #[error("trailing input at byte {0}")]
    Trailing(usize),
}

impl Formula {
    pub fn var(index: u32) -> Formula {
        Formula::Var(Var::new(index))
    }

    pub fn lit(lit: Lit) -> Formula {
        let v = Formula::Var(lit.var());
        if lit.is_positive() {
            v
        } else {
            Formula::not(v)
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: Vec<Formula>) -> Formula {
        Formula::And(fs)
    }

    pub fn or(fs: Vec<Formula>) -> Formula {
        Formula::Or(fs)
    }

    pub fn xor(a: Formula, b: Formula) -> Formula {
        Formula::Xor(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// The conjunction of the clauses of `cnf`.
    pub fn from_cnf(cnf: &Cnf) -> Formula {
        Formula::And(
            cnf.clauses()
                .iter()
                .map(|c| {
                    if c.is_empty() {
                        Formula::Const(false)
                    } else {
                        Formula::Or(c.lits().iter().map(|&l| Formula::lit(l)).collect())
                    }
                })
                .collect(),
        )
    }

    /// Returns the literal this formula denotes, if it is a (possibly
    /// negated) variable.
    pub fn as_lit(&self) -> Option<Lit> {
        match self {
            Formula::Var(v) => Some(v.pos()),
            Formula::Not(inner) => inner.as_lit().map(|l| !l),
            _ => None,
        }
    }

    pub fn operands(&self) -> Vec<&Formula> {
        match self {
            Formula::Const(_) | Formula::Var(_) => Vec::new(),
            Formula::Not(a) => vec![a],
            Formula::And(xs) | Formula::Or(xs) => xs.iter().collect(),
            Formula::Xor(a, b) | Formula::Iff(a, b) => vec![a, b],
        }
    }

    pub fn vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(f) = stack.pop() {
            if let Formula::Var(v) = f {
                out.insert(*v);
            }
            stack.extend(f.operands());
        }
        out
    }

    pub fn max_var(&self) -> u32 {
        self.vars().last().map_or(0, |v| v.index())
    }

    /// Number of nodes in the expression tree.
    pub fn size(&self) -> usize {
        1 + self
            .operands()
            .into_iter()
            .map(Formula::size)
            .sum::<usize>()
    }

    pub fn eval(&self, value: &dyn Fn(Var) -> bool) -> bool {
        match self {
            Formula::Const(b) => *b,
            Formula::Var(v) => value(*v),
            Formula::Not(a) => !a.eval(value),
            Formula::And(xs) => xs.iter().all(|x| x.eval(value)),
            Formula::Or(xs) => xs.iter().any(|x| x.eval(value)),
            Formula::Xor(a, b) => a.eval(value) != b.eval(value),
            Formula::Iff(a, b) => a.eval(value) == b.eval(value),
        }
    }

    pub fn parse(text: &str) -> Result<Formula, FormulaError> {
        let mut p = Parser { text, pos: 0 };
        let f = p.formula()?;
        p.skip_ws();
        if p.pos < text.len() {
            return Err(FormulaError::Trailing(p.pos));
        }
        Ok(f)
    }
}

impl std::str::FromStr for Formula {
    type Err = FormulaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Formula::parse(s)
    }
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.text[self.pos..].chars().next()
    }

    fn atom(&mut self) -> Result<(usize, &str), FormulaError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .find(|c: char| c.is_whitespace() || c == '(' || c == ')')
            .unwrap_or(rest.len());
        if len == 0 {
            return match rest.chars().next() {
                None => Err(FormulaError::UnexpectedEnd),
                Some(c) => Err(FormulaError::UnexpectedToken {
                    token: c.to_string(),
                    pos: start,
                }),
            };
        }
        self.pos += len;
        Ok((start, &rest[..len]))
    }

    fn formula(&mut self) -> Result<Formula, FormulaError> {
        match self.peek() {
            None => Err(FormulaError::UnexpectedEnd),
            Some('(') => {
                self.pos += 1;
                let (_, op) = self.atom()?;
                let op = op.to_string();
                if op == "var" {
                    let (_, idx) = self.atom()?;
                    let v = idx
                        .parse::<u32>()
                        .ok()
                        .filter(|&i| i > 0)
                        .ok_or_else(|| FormulaError::BadVariable(idx.to_string()))?;
                    self.close()?;
                    return Ok(Formula::var(v));
                }
                let mut args = Vec::new();
                while self.peek() != Some(')') {
                    if self.peek().is_none() {
                        return Err(FormulaError::UnexpectedEnd);
                    }
                    args.push(self.formula()?);
                }
                self.pos += 1;
                build(&op, args)
            }
            Some(_) => {
                let (pos, tok) = self.atom()?;
                match tok {
                    "true" => Ok(Formula::Const(true)),
                    "false" => Ok(Formula::Const(false)),
                    _ => Err(FormulaError::UnexpectedToken {
                        token: tok.to_string(),
                        pos,
                    }),
                }
            }
        }
    }

    fn close(&mut self) -> Result<(), FormulaError> {
        match self.peek() {
            Some(')') => {
                self.pos += 1;
                Ok(())
            }
            None => Err(FormulaError::UnexpectedEnd),
            Some(c) => Err(FormulaError::UnexpectedToken {
                token: c.to_string(),
                pos: self.pos,
            }),
        }
    }
}

fn build(op: &str, mut args: Vec<Formula>) -> Result<Formula, FormulaError> {
    let arity = |op: &'static str, expected: &'static str, found: usize| FormulaError::Arity {
        op,
        expected,
        found,
    };
    match op {
        "and" | "or" if args.is_empty() => Err(arity(
            if op == "and" { "and" } else { "or" },
            "at least 1",
            0,
        )),
        "and" => Ok(Formula::And(args)),
        "or" => Ok(Formula::Or(args)),
        "not" if args.len() == 1 => Ok(Formula::not(args.pop().unwrap())),
        "not" => Err(arity("not", "1", args.len())),
        "xor" | "iff" if args.len() == 2 => {
            let b = args.pop().unwrap();
            let a = args.pop().unwrap();
            Ok(if op == "xor" {
                Formula::xor(a, b)
            } else {
                Formula::iff(a, b)
            })
        }
        "xor" => Err(arity("xor", "2", args.len())),
        "iff" => Err(arity("iff", "2", args.len())),
        other => Err(FormulaError::UnknownOperator(other.to_string())),
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::Const(true) => f.write_str("true"),
            Formula::Const(false) => f.write_str("false"),
            Formula::Var(v) => write!(f, "(var {v})"),
            Formula::Not(a) => write!(f, "(not {a})"),
            Formula::And(xs) | Formula::Or(xs) => {
                f.write_str(if matches!(self, Formula::And(_)) {
                    "(and"
                } else {
                    "(or"
                })?;
                for x in xs {
                    write!(f, " {x}")?;
                }
                f.write_str(")")
            }
            Formula::Xor(a, b) => write!(f, "(xor {a} {b})"),
            Formula::Iff(a, b) => write!(f, "(iff {a} {b})"),
        }
    }
}
