//! The extension rule and its generalisation to arbitrary definitions.

use crate::cnf::{AuxKind, Cnf, Lit};
use crate::formula::Formula;

use super::{check_lit, tseitin_into, TransformError};

/// Adds a fresh `X` defined by `X ⇔ l1 ∨ l2` as the clauses
/// `(¬X ∨ l1 ∨ l2)`, `(X ∨ ¬l1)`, `(X ∨ ¬l2)`.
pub fn extend(cnf: &Cnf, l1: Lit, l2: Lit) -> Result<Cnf, TransformError> {
    check_lit(cnf, l1)?;
    check_lit(cnf, l2)?;
    let mut out = cnf.clone();
    let x = out.fresh_aux(AuxKind::Extension).pos();
    out.push_simplified([!x, l1, l2])?;
    out.push_simplified([x, !l1])?;
    out.push_simplified([x, !l2])?;
    Ok(out)
}

/// Adds a fresh `Y` with `Y ⇔ alpha`. The definition is clausified gate by
/// gate with `Y` standing for the outermost gate; intermediate gate variables
/// are registered as Tseitin auxiliaries.
pub fn extend_general(cnf: &Cnf, alpha: &Formula) -> Result<Cnf, TransformError> {
    let mut out = cnf.clone();
    if let Some(&v) = alpha.vars().iter().find(|v| v.index() > cnf.universe()) {
        return Err(TransformError::LiteralOutOfRange {
            lit: v.pos(),
            universe: cnf.universe(),
        });
    }
    let y = out.fresh_aux(AuxKind::Extension).pos();
    let l = tseitin_into(&mut out, alpha, Some(y))?;
    if l != y {
        out.push_simplified([!y, l])?;
        out.push_simplified([y, !l])?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::{Clause, Var};
    use crate::oracle::{emf_check, TruthOracle};

    fn lit(x: i64) -> Lit {
        Lit::from_dimacs(x)
    }

    fn is_emf(f: &Cnf, g: &Cnf) -> bool {
        let of = TruthOracle::over(f, &f.free_vars()).unwrap();
        emf_check(&of, &TruthOracle::of(g).unwrap()).unwrap()
    }

    #[test]
    fn extension_clauses() {
        let cnf = Cnf::from_dimacs_clauses(2, &[&[1, 2]]).unwrap();
        let out = extend(&cnf, lit(1), lit(-2)).unwrap();
        let expected: Vec<Clause> = [&[1i64, 2][..], &[-3, 1, -2], &[3, -1], &[3, 2]]
            .iter()
            .map(|c| Clause::from_dimacs(c).unwrap())
            .collect();
        assert_eq!(out.clauses(), &expected[..]);
        assert_eq!(out.aux().get(&Var::new(3)), Some(&AuxKind::Extension));
        assert!(is_emf(&cnf, &out));
    }

    #[test]
    fn extension_of_empty_cnf_projects_to_top() {
        let cnf = Cnf::new(2);
        let out = extend(&cnf, lit(1), lit(2)).unwrap();
        let proj = TruthOracle::of(&out)
            .unwrap()
            .forget(&[Var::new(3)])
            .unwrap();
        assert_eq!(proj.count(), 4);
    }

    #[test]
    fn repeated_extension() {
        let cnf = Cnf::from_dimacs_clauses(3, &[&[1, 2], &[-2, 3]]).unwrap();
        let once = extend(&cnf, lit(1), lit(3)).unwrap();
        let twice = extend(&once, lit(4), lit(-2)).unwrap();
        assert_eq!(twice.aux_vars().len(), 2);
        assert!(is_emf(&cnf, &twice));
    }

    #[test]
    fn out_of_range_literal() {
        assert!(extend(&Cnf::new(1), lit(1), lit(2)).is_err());
    }

    #[test]
    fn general_literal_definition() {
        let cnf = Cnf::from_dimacs_clauses(2, &[&[1, 2]]).unwrap();
        let out = extend_general(&cnf, &Formula::lit(lit(-2))).unwrap();
        assert_eq!(
            &out.clauses()[1..],
            &[
                Clause::from_dimacs(&[-3, -2]).unwrap(),
                Clause::from_dimacs(&[3, 2]).unwrap()
            ]
        );
    }

    #[test]
    fn general_disjunction_matches_extend() {
        let cnf = Cnf::from_dimacs_clauses(2, &[&[1, 2]]).unwrap();
        let alpha = Formula::or(vec![Formula::lit(lit(1)), Formula::lit(lit(-2))]);
        assert_eq!(
            extend_general(&cnf, &alpha).unwrap(),
            extend(&cnf, lit(1), lit(-2)).unwrap()
        );
    }

    #[test]
    fn general_nested_definition() {
        let cnf = Cnf::from_dimacs_clauses(3, &[&[1, -3], &[2, 3]]).unwrap();
        let alpha = Formula::parse("(or (and (var 1) (var 2)) (var 3))").unwrap();
        let out = extend_general(&cnf, &alpha).unwrap();
        assert_eq!(out.aux_vars().len(), 2);
        assert!(is_emf(&cnf, &out));
        let negated = extend_general(&cnf, &Formula::not(alpha)).unwrap();
        assert!(is_emf(&cnf, &negated));
    }
}
