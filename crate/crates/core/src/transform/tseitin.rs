//! Formula to CNF with one definitional variable per gate.
//!
//! Every gate is encoded by the full biconditional between its variable and
//! its operands. n-ary AND/OR are split into a left-leaning chain of binary
//! gates and negation is folded into literals, so each gate costs at most
//! four clauses.

use crate::cnf::{AuxKind, Cnf, Lit};
use crate::formula::Formula;

use super::TransformError;

/// Number of gates [`tseitin`] introduces for `f`.
pub fn gate_count(f: &Formula) -> usize {
    if let Formula::Const(_) = f {
        return 0;
    }
    count_gates(f)
}

fn count_gates(f: &Formula) -> usize {
    match f {
        Formula::Const(_) => 1,
        Formula::Var(_) => 0,
        Formula::Not(a) => count_gates(a),
        Formula::And(xs) | Formula::Or(xs) => {
            xs.len() - 1 + xs.iter().map(count_gates).sum::<usize>()
        }
        Formula::Xor(a, b) | Formula::Iff(a, b) => 1 + count_gates(a) + count_gates(b),
    }
}

/// Encodes `f` over a universe of its largest variable and asserts the root.
pub fn tseitin(f: &Formula) -> Cnf {
    let mut cnf = Cnf::new(f.max_var());
    match f {
        Formula::Const(true) => {}
        Formula::Const(false) => {
            cnf.push(crate::cnf::Clause::empty()).expect("empty clause");
        }
        _ => {
            let root = tseitin_into(&mut cnf, f, None).expect("universe covers the formula");
            cnf.push_simplified([root]).expect("root literal in range");
        }
    }
    cnf
}

/// Adds the definitional clauses of `f` to `cnf` and returns the literal
/// standing for `f`. Gate variables are fresh and registered as
/// [`AuxKind::Tseitin`]. When `top` is given and `f`'s outermost operator is a
/// gate, that variable is used for it instead of a fresh one.
pub fn tseitin_into(cnf: &mut Cnf, f: &Formula, top: Option<Lit>) -> Result<Lit, TransformError> {
    if let Some(&v) = f.vars().iter().find(|v| v.index() > cnf.universe()) {
        return Err(TransformError::LiteralOutOfRange {
            lit: v.pos(),
            universe: cnf.universe(),
        });
    }
    Ok(Encoder { cnf }.encode(f, top))
}

struct Encoder<'a> {
    cnf: &'a mut Cnf,
}

impl Encoder<'_> {
    fn gate(&mut self, top: Option<Lit>) -> Lit {
        top.unwrap_or_else(|| self.cnf.fresh_aux(AuxKind::Tseitin).pos())
    }

    fn clause<const N: usize>(&mut self, lits: [Lit; N]) {
        self.cnf
            .push_simplified(lits)
            .expect("gate literals are in range");
    }

    fn encode(&mut self, f: &Formula, top: Option<Lit>) -> Lit {
        match f {
            Formula::Var(v) => v.pos(),
            Formula::Not(a) => !self.encode(a, top.map(|t| !t)),
            Formula::Const(b) => {
                let g = self.gate(top);
                self.clause([if *b { g } else { !g }]);
                g
            }
            Formula::And(xs) | Formula::Or(xs) => {
                let is_and = matches!(f, Formula::And(_));
                let mut acc = self.encode(&xs[0], if xs.len() == 1 { top } else { None });
                for (i, x) in xs.iter().enumerate().skip(1) {
                    let b = self.encode(x, None);
                    let g = self.gate(if i + 1 == xs.len() { top } else { None });
                    let a = acc;
                    if is_and {
                        self.clause([!g, a]);
                        self.clause([!g, b]);
                        self.clause([g, !a, !b]);
                    } else {
                        self.clause([!g, a, b]);
                        self.clause([g, !a]);
                        self.clause([g, !b]);
                    }
                    acc = g;
                }
                acc
            }
            Formula::Xor(x, y) | Formula::Iff(x, y) => {
                let a = self.encode(x, None);
                let b = self.encode(y, None);
                let g = self.gate(top);
                // g ⇔ (a ⊕ b); an IFF gate is the same with g negated
                let g = if matches!(f, Formula::Xor(..)) { g } else { !g };
                self.clause([!g, a, b]);
                self.clause([!g, !a, !b]);
                self.clause([g, !a, b]);
                self.clause([g, a, !b]);
                if matches!(f, Formula::Xor(..)) {
                    g
                } else {
                    !g
                }
            }
        }
    }
}
