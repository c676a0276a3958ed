//! Benchmark families.
//!
//! `delta_a(n)` is `⋀ X_i ∨ Y_j ∨ Z_k` over all `i, j, k ≤ n`; `delta_b(n)`
//! is its linear-size rewrite with two auxiliary variables. Variables are
//! numbered `X_1..X_n = 1..n`, `Y = n+1..2n`, `Z = 2n+1..3n`, then `A`, `B`.
//!
//! `sauerhoff_f`/`sauerhoff_g` are the matrix functions built from
//! `h(bits) = popcount mod 3 == 0`, delivered as truth tables.

use crate::cnf::{AuxKind, Clause, Cnf, Lit, Var};
use crate::oracle::{OracleError, TruthOracle};

pub fn x(n: u32, i: u32) -> Var {
    debug_assert!((1..=n).contains(&i));
    Var::new(i)
}

pub fn y(n: u32, j: u32) -> Var {
    Var::new(n + j)
}

pub fn z(n: u32, k: u32) -> Var {
    Var::new(2 * n + k)
}

pub fn a(n: u32) -> Var {
    Var::new(3 * n + 1)
}

pub fn b(n: u32) -> Var {
    Var::new(3 * n + 2)
}

fn clause<const N: usize>(lits: [Lit; N]) -> Clause {
    Clause::new(lits).expect("distinct variables")
}

/// `n³` ternary clauses in lexicographic `(i, j, k)` order.
///
/// # Panics
/// If `n` is zero.
pub fn delta_a(n: u32) -> Cnf {
    assert!(n >= 1, "n must be at least 1");
    let mut cnf = Cnf::new(3 * n);
    for i in 1..=n {
        for j in 1..=n {
            for k in 1..=n {
                cnf.push(clause([x(n, i).pos(), y(n, j).pos(), z(n, k).pos()]))
                    .expect("in range");
            }
        }
    }
    cnf
}

/// `(A ∨ X_i)`, then `(¬A ∨ B ∨ Y_j)`, then `(¬B ∨ Z_k)`; `A` and `B` are
/// registered auxiliaries.
///
/// # Panics
/// If `n` is zero.
pub fn delta_b(n: u32) -> Cnf {
    assert!(n >= 1, "n must be at least 1");
    let mut cnf = Cnf::new(3 * n + 2);
    let (va, vb) = (a(n), b(n));
    for i in 1..=n {
        cnf.push(clause([va.pos(), x(n, i).pos()]))
            .expect("in range");
    }
    for j in 1..=n {
        cnf.push(clause([va.neg(), vb.pos(), y(n, j).pos()]))
            .expect("in range");
    }
    for k in 1..=n {
        cnf.push(clause([vb.neg(), z(n, k).pos()]))
            .expect("in range");
    }
    cnf.mark_aux(va, AuxKind::Bva).expect("in range");
    cnf.mark_aux(vb, AuxKind::Bva).expect("in range");
    cnf
}

pub fn h(bits: &[bool]) -> bool {
    bits.iter().filter(|&&b| b).count() % 3 == 0
}

pub const SAUERHOFF_MAX: u32 = 4;

/// An `n × n` variable matrix `M` (row-major, `1..=n²`) and optionally `Z`
/// (`n² + 1`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatrixVars {
    pub n: u32,
    pub grid: Vec<Var>,
    pub extra: Option<Var>,
}

impl MatrixVars {
    pub fn new(n: u32, with_extra: bool) -> Self {
        MatrixVars {
            n,
            grid: (1..=n * n).map(Var::new).collect(),
            extra: with_extra.then(|| Var::new(n * n + 1)),
        }
    }

    pub fn row(&self, i: usize) -> &[Var] {
        let n = self.n as usize;
        &self.grid[i * n..(i + 1) * n]
    }

    pub fn column(&self, j: usize) -> Vec<Var> {
        let n = self.n as usize;
        (0..n).map(|i| self.grid[i * n + j]).collect()
    }

    pub fn all(&self) -> Vec<Var> {
        self.grid.iter().copied().chain(self.extra).collect()
    }
}

fn row_fn(n: usize, m: &[bool]) -> bool {
    (0..n).fold(false, |acc, i| acc ^ h(&m[i * n..(i + 1) * n]))
}

fn col_fn(n: usize, m: &[bool]) -> bool {
    (0..n).fold(false, |acc, j| {
        let col: Vec<bool> = (0..n).map(|i| m[i * n + j]).collect();
        acc ^ h(&col)
    })
}

fn check_size(n: u32) -> Result<(), OracleError> {
    if n > SAUERHOFF_MAX {
        return Err(OracleError::TooManyVariables((n * n + 1) as usize));
    }
    Ok(())
}

/// `row_n(M)`: XOR of `h` over the rows.
pub fn sauerhoff_row(n: u32) -> Result<TruthOracle, OracleError> {
    check_size(n)?;
    let vars = MatrixVars::new(n, false);
    TruthOracle::from_fn(&vars.all(), |m| row_fn(n as usize, m))
}

/// `f_n(M) = row_n(M) ∨ col_n(M)`.
pub fn sauerhoff_f(n: u32) -> Result<TruthOracle, OracleError> {
    check_size(n)?;
    let vars = MatrixVars::new(n, false);
    let n = n as usize;
    TruthOracle::from_fn(&vars.all(), |m| row_fn(n, m) || col_fn(n, m))
}

/// `g_n(M, Z) = (Z ∧ row_n(M)) ∨ (¬Z ∧ col_n(M))`.
pub fn sauerhoff_g(n: u32) -> Result<TruthOracle, OracleError> {
    check_size(n)?;
    let vars = MatrixVars::new(n, true);
    let n = n as usize;
    TruthOracle::from_fn(&vars.all(), |m| {
        let (grid, zv) = (&m[..n * n], m[n * n]);
        if zv {
            row_fn(n, grid)
        } else {
            col_fn(n, grid)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dimacs::write_dimacs;
    use crate::oracle::emf_check;

    #[test]
    fn sizes() {
        let d = delta_a(1);
        assert_eq!(d.clauses(), &[Clause::from_dimacs(&[1, 2, 3]).unwrap()]);
        let d = delta_a(10);
        assert_eq!((d.universe(), d.num_clauses()), (30, 1000));
        assert_eq!(delta_b(1).num_clauses(), 3);
        let d = delta_b(100);
        assert_eq!((d.universe(), d.num_clauses()), (302, 300));
        assert_eq!(d.aux_vars().len(), 2);
        assert_eq!(write_dimacs(&delta_b(5)), write_dimacs(&delta_b(5)));
    }

    #[test]
    fn delta_a_two_count() {
        // ∧_{i,j,k} (X_i ∨ Y_j ∨ Z_k) ≡ (∧X) ∨ (∧Y) ∨ (∧Z): 3·2⁴ − 3·2² + 1
        let o = TruthOracle::of(&delta_a(2)).unwrap();
        let brute = (0..64u32)
            .filter(|m| {
                let bit = |v: u32| m >> (6 - v) & 1 == 1;
                (1..=2).all(|i| (3..=4).all(|j| (5..=6).all(|k| bit(i) || bit(j) || bit(k))))
            })
            .count() as u64;
        assert_eq!(o.count(), brute);
        assert_eq!(brute, 37);
    }

    #[test]
    fn delta_b_projects_onto_delta_a() {
        for n in 1..=3 {
            let fa = TruthOracle::of(&delta_a(n)).unwrap();
            let gb = TruthOracle::of(&delta_b(n)).unwrap();
            assert!(emf_check(&fa, &gb).unwrap(), "n = {n}");
        }
    }

    #[test]
    fn h_values() {
        assert!(h(&[false, false]));
        assert!(h(&[true, true, true]));
        assert!(!h(&[true]));
        assert!(!h(&[true, false, true]));
    }

    #[test]
    fn sauerhoff_one() {
        let f = sauerhoff_f(1).unwrap();
        assert_eq!(f.count(), 1);
        assert!(f.get(0));
    }

    #[test]
    fn sauerhoff_relations() {
        for n in 1..=3 {
            let f = sauerhoff_f(n).unwrap();
            let g = sauerhoff_g(n).unwrap();
            assert!(emf_check(&f, &g).unwrap(), "n = {n}");
            let zv = Var::new(n * n + 1);
            assert!(g
                .condition(zv.pos())
                .unwrap()
                .equiv(&sauerhoff_row(n).unwrap())
                .unwrap());
        }
        assert!(sauerhoff_g(5).is_err());
    }

    #[test]
    fn matrix_slices() {
        let m = MatrixVars::new(3, true);
        assert_eq!(m.row(1), &[Var::new(4), Var::new(5), Var::new(6)]);
        assert_eq!(m.column(2), vec![Var::new(3), Var::new(6), Var::new(9)]);
        assert_eq!(m.all().len(), 10);
    }
}
