//! Brute-force ground truth: explicit truth tables over at most
//! [`MAX_VARS`] variables.
//!
//! Assignments are enumerated lexicographically with the first listed
//! variable as the most significant position, so index `i` assigns variable
//! `vars[p]` the bit `(i >> (k - 1 - p)) & 1`. Tables are stored 64
//! assignments per word.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::cnf::{Cnf, Lit, Var};
use crate::formula::Formula;
use crate::nnf::{NnfDag, NnfNode};

pub const MAX_VARS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{0} variables exceed the truth-table limit of {MAX_VARS}")]
    TooManyVariables(usize),
    #[error("variable {0} is mentioned but not in the oracle's variable list")]
    UnlistedVariable(Var),
    #[error("variable {0} is listed twice")]
    DuplicateVariable(Var),
    #[error("variable {0} is not among the oracle's variables")]
    UnknownVariable(Var),
    #[error("variable lists differ")]
    VariableMismatch,
}

const LOW_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

/// Word-parallel view of the assignment space for a fixed variable list.
#[derive(Debug)]
pub struct WordCtx {
    k: usize,
    position: Vec<Option<usize>>,
}

impl WordCtx {
    pub(crate) fn new(vars: &[Var]) -> Self {
        let max = vars.iter().map(|v| v.index() as usize).max().unwrap_or(0);
        let mut position = vec![None; max + 1];
        for (p, v) in vars.iter().enumerate() {
            position[v.index() as usize] = Some(p);
        }
        WordCtx {
            k: vars.len(),
            position,
        }
    }

    pub fn num_words(&self) -> usize {
        word_count(self.k)
    }

    /// Mask of the assignment bits that exist (all ones unless fewer than 64
    /// assignments).
    pub fn valid_mask(&self) -> u64 {
        valid_mask(self.k)
    }

    /// Truth values of `lit` over the 64 assignments of word `w`.
    pub fn lit_word(&self, lit: Lit, w: usize) -> u64 {
        let p = self
            .position
            .get(lit.var().index() as usize)
            .copied()
            .flatten()
            .expect("literal variable is listed");
        let shift = self.k - 1 - p;
        let word = if shift < 6 {
            LOW_MASKS[shift]
        } else if (w >> (shift - 6)) & 1 == 1 {
            u64::MAX
        } else {
            0
        };
        if lit.is_positive() {
            word
        } else {
            !word
        }
    }
}

fn word_count(k: usize) -> usize {
    if k <= 6 {
        1
    } else {
        1 << (k - 6)
    }
}

fn valid_mask(k: usize) -> u64 {
    if k >= 6 {
        u64::MAX
    } else {
        (1u64 << (1u32 << k)) - 1
    }
}

/// Anything that can be tabulated as a Boolean function.
pub trait Evaluate {
    /// The variable list used by [`TruthOracle::of`].
    fn default_vars(&self) -> Vec<Var>;
    fn mentioned_vars(&self) -> BTreeSet<Var>;
    /// Writes the truth values for every word of the assignment space.
    fn fill_words(&self, ctx: &WordCtx, out: &mut [u64]);
}

impl Evaluate for Cnf {
    fn default_vars(&self) -> Vec<Var> {
        self.free_vars()
    }

    fn mentioned_vars(&self) -> BTreeSet<Var> {
        Cnf::mentioned_vars(self)
    }

    fn fill_words(&self, ctx: &WordCtx, out: &mut [u64]) {
        for (w, slot) in out.iter_mut().enumerate() {
            let mut acc = u64::MAX;
            for c in self.clauses() {
                let mut cw = 0u64;
                for &l in c.lits() {
                    cw |= ctx.lit_word(l, w);
                }
                acc &= cw;
                if acc == 0 {
                    break;
                }
            }
            *slot = acc;
        }
    }
}

impl Evaluate for NnfDag {
    fn default_vars(&self) -> Vec<Var> {
        (1..=self.num_vars()).map(Var::new).collect()
    }

    fn mentioned_vars(&self) -> BTreeSet<Var> {
        NnfDag::mentioned_vars(self)
    }

    fn fill_words(&self, ctx: &WordCtx, out: &mut [u64]) {
        let mut scratch = vec![0u64; self.root() + 1];
        for (w, slot) in out.iter_mut().enumerate() {
            eval_nnf_word(self, ctx, w, &mut scratch);
            *slot = scratch[self.root()];
        }
    }
}

/// Evaluates every node up to the root on word `w` of the assignment space.
pub(crate) fn eval_nnf_word(dag: &NnfDag, ctx: &WordCtx, w: usize, scratch: &mut [u64]) {
    for id in 0..=dag.root() {
        scratch[id] = match dag.node(id) {
            NnfNode::Lit(l) => ctx.lit_word(*l, w),
            NnfNode::True => u64::MAX,
            NnfNode::False => 0,
            NnfNode::And(ch) => ch.iter().fold(u64::MAX, |a, &c| a & scratch[c]),
            NnfNode::Or { children, .. } => children.iter().fold(0, |a, &c| a | scratch[c]),
        };
    }
}

impl Evaluate for Formula {
    fn default_vars(&self) -> Vec<Var> {
        (1..=self.max_var()).map(Var::new).collect()
    }

    fn mentioned_vars(&self) -> BTreeSet<Var> {
        Formula::vars(self)
    }

    fn fill_words(&self, ctx: &WordCtx, out: &mut [u64]) {
        fn eval(f: &Formula, ctx: &WordCtx, w: usize) -> u64 {
            match f {
                Formula::Const(b) => {
                    if *b {
                        u64::MAX
                    } else {
                        0
                    }
                }
                Formula::Var(v) => ctx.lit_word(v.pos(), w),
                Formula::Not(a) => !eval(a, ctx, w),
                Formula::And(xs) => xs.iter().fold(u64::MAX, |a, x| a & eval(x, ctx, w)),
                Formula::Or(xs) => xs.iter().fold(0, |a, x| a | eval(x, ctx, w)),
                Formula::Xor(a, b) => eval(a, ctx, w) ^ eval(b, ctx, w),
                Formula::Iff(a, b) => !(eval(a, ctx, w) ^ eval(b, ctx, w)),
            }
        }
        for (w, slot) in out.iter_mut().enumerate() {
            *slot = eval(self, ctx, w);
        }
    }
}

/// An explicit truth table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruthOracle {
    vars: Vec<Var>,
    words: Vec<u64>,
}

fn check_vars(vars: &[Var]) -> Result<(), OracleError> {
    if vars.len() > MAX_VARS {
        return Err(OracleError::TooManyVariables(vars.len()));
    }
    let mut seen = BTreeSet::new();
    for &v in vars {
        if !seen.insert(v) {
            return Err(OracleError::DuplicateVariable(v));
        }
    }
    Ok(())
}

impl TruthOracle {
    /// Tabulates `source` over its default variable list.
    pub fn of<S: Evaluate + ?Sized>(source: &S) -> Result<Self, OracleError> {
        TruthOracle::over(source, &source.default_vars())
    }

    /// Tabulates `source` over `vars`, which must cover every mentioned
    /// variable. Listed variables the source does not mention are don't-cares.
    pub fn over<S: Evaluate + ?Sized>(source: &S, vars: &[Var]) -> Result<Self, OracleError> {
        check_vars(vars)?;
        let listed: BTreeSet<Var> = vars.iter().copied().collect();
        if let Some(&v) = source.mentioned_vars().iter().find(|v| !listed.contains(v)) {
            return Err(OracleError::UnlistedVariable(v));
        }
        let ctx = WordCtx::new(vars);
        let mut words = vec![0u64; ctx.num_words()];
        source.fill_words(&ctx, &mut words);
        let mask = ctx.valid_mask();
        for w in &mut words {
            *w &= mask;
        }
        Ok(TruthOracle {
            vars: vars.to_vec(),
            words,
        })
    }

    /// Tabulates a callback taking the assignment as one bool per variable.
    pub fn from_fn<F: Fn(&[bool]) -> bool>(vars: &[Var], f: F) -> Result<Self, OracleError> {
        check_vars(vars)?;
        let k = vars.len();
        let mut words = vec![0u64; word_count(k)];
        let mut assignment = vec![false; k];
        for i in 0..(1usize << k) {
            for (p, a) in assignment.iter_mut().enumerate() {
                *a = (i >> (k - 1 - p)) & 1 == 1;
            }
            if f(&assignment) {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Ok(TruthOracle {
            vars: vars.to_vec(),
            words,
        })
    }

    pub fn constant(vars: &[Var], value: bool) -> Result<Self, OracleError> {
        TruthOracle::from_fn(vars, |_| value)
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn num_assignments(&self) -> usize {
        1 << self.vars.len()
    }

    /// Value under the `index`-th assignment.
    pub fn get(&self, index: usize) -> bool {
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    pub fn is_satisfiable(&self) -> bool {
        self.words.iter().any(|&w| w != 0)
    }

    pub fn equiv(&self, other: &TruthOracle) -> Result<bool, OracleError> {
        if self.vars != other.vars {
            return Err(OracleError::VariableMismatch);
        }
        Ok(self.words == other.words)
    }

    fn position(&self, var: Var) -> Result<usize, OracleError> {
        self.vars
            .iter()
            .position(|&v| v == var)
            .ok_or(OracleError::UnknownVariable(var))
    }

    /// Removes the variable at `pos`, combining the two cofactors with `op`
    /// (or picking one of them when `pick` is set).
    fn eliminate(&self, pos: usize, pick: Option<bool>) -> TruthOracle {
        let k = self.vars.len();
        let shift = k - 1 - pos;
        let mut vars = self.vars.clone();
        vars.remove(pos);
        let mut words = vec![0u64; word_count(k - 1)];
        let low = (1usize << shift) - 1;
        for j in 0..(1usize << (k - 1)) {
            let base = ((j & !low) << 1) | (j & low);
            let v = match pick {
                Some(b) => self.get(base | (usize::from(b) << shift)),
                None => self.get(base) || self.get(base | (1 << shift)),
            };
            if v {
                words[j / 64] |= 1 << (j % 64);
            }
        }
        TruthOracle { vars, words }
    }

    /// Existential quantification of `vars`.
    pub fn forget(&self, vars: &[Var]) -> Result<TruthOracle, OracleError> {
        let mut out = self.clone();
        for &v in vars {
            if !self.vars.contains(&v) {
                return Err(OracleError::UnknownVariable(v));
            }
            if let Ok(pos) = out.position(v) {
                out = out.eliminate(pos, None);
            }
        }
        Ok(out)
    }

    /// The cofactor `f|lit`, over the remaining variables.
    pub fn condition(&self, lit: Lit) -> Result<TruthOracle, OracleError> {
        let pos = self.position(lit.var())?;
        Ok(self.eliminate(pos, Some(lit.is_positive())))
    }
}

/// Whether `f` is equivalent modulo forgetting to `g`: `f ≡ ∃Y. g` with `Y`
/// the variables of `g` not listed in `f`.
pub fn emf_check(f: &TruthOracle, g: &TruthOracle) -> Result<bool, OracleError> {
    if let Some(&v) = f.vars.iter().find(|v| !g.vars.contains(v)) {
        return Err(OracleError::UnknownVariable(v));
    }
    let extra: Vec<Var> = g
        .vars
        .iter()
        .copied()
        .filter(|v| !f.vars.contains(v))
        .collect();
    let projected = g.forget(&extra)?;
    // align variable order with f
    if projected.vars == f.vars {
        return Ok(projected.words == f.words);
    }
    let positions: Vec<usize> = f
        .vars
        .iter()
        .map(|v| projected.position(*v))
        .collect::<Result<_, _>>()?;
    let k = f.vars.len();
    Ok((0..f.num_assignments()).all(|i| {
        let mut j = 0usize;
        for (p, &q) in positions.iter().enumerate() {
            if (i >> (k - 1 - p)) & 1 == 1 {
                j |= 1 << (k - 1 - q);
            }
        }
        f.get(i) == projected.get(j)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(ix: &[u32]) -> Vec<Var> {
        ix.iter().map(|&i| Var::new(i)).collect()
    }

    fn small() -> Cnf {
        Cnf::from_dimacs_clauses(4, &[&[1, -4], &[1, 3], &[2, -4], &[2, 3]]).unwrap()
    }

    #[test]
    fn contradiction_is_all_false() {
        let c = Cnf::from_dimacs_clauses(1, &[&[1], &[-1]]).unwrap();
        let o = TruthOracle::of(&c).unwrap();
        assert_eq!(o.count(), 0);
        assert_eq!(o.num_assignments(), 2);
    }

    #[test]
    fn small_cnf_has_seven_models() {
        let o = TruthOracle::of(&small()).unwrap();
        assert_eq!(o.count(), 7);
    }

    #[test]
    fn lexicographic_order_first_var_most_significant() {
        // f = X1 ∧ ¬X2 over [X1, X2] is true only at index 0b10
        let c = Cnf::from_dimacs_clauses(2, &[&[1], &[-2]]).unwrap();
        let o = TruthOracle::of(&c).unwrap();
        assert!((0..4).all(|i| o.get(i) == (i == 2)));
    }

    #[test]
    fn top_over_three_vars() {
        assert_eq!(
            TruthOracle::constant(&vars(&[1, 2, 3]), true)
                .unwrap()
                .count(),
            8
        );
    }

    #[test]
    fn forget_examples() {
        let xy = Cnf::from_dimacs_clauses(2, &[&[1], &[2]]).unwrap();
        let o = TruthOracle::of(&xy).unwrap();
        assert_eq!(o.forget(&[]).unwrap(), o);
        let y = o.forget(&vars(&[1])).unwrap();
        assert_eq!(y.vars(), &vars(&[2])[..]);
        assert!(!y.get(0) && y.get(1));
    }

    #[test]
    fn forget_is_order_independent() {
        let o = TruthOracle::of(&small()).unwrap();
        let a = o.forget(&vars(&[1, 3])).unwrap();
        let b = o.forget(&vars(&[3, 1])).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn emf_examples() {
        let x = TruthOracle::from_fn(&vars(&[1]), |a| a[0]).unwrap();
        let x_and_y = TruthOracle::from_fn(&vars(&[1, 2]), |a| a[0] && a[1]).unwrap();
        let y_only = TruthOracle::from_fn(&vars(&[1, 2]), |a| a[1]).unwrap();
        assert!(emf_check(&x, &x).unwrap());
        assert!(emf_check(&x, &x_and_y).unwrap());
        assert!(!emf_check(&x, &y_only).unwrap());
        let z = TruthOracle::from_fn(&vars(&[3]), |a| a[0]).unwrap();
        assert_eq!(
            emf_check(&z, &x_and_y),
            Err(OracleError::UnknownVariable(Var::new(3)))
        );
    }

    #[test]
    fn emf_does_not_preserve_model_count() {
        // f = X; g = X ∧ (Y ∨ ¬Y) keeps both extensions of the model X
        let f = TruthOracle::from_fn(&vars(&[1]), |a| a[0]).unwrap();
        let g = TruthOracle::from_fn(&vars(&[1, 2]), |a| a[0] && (a[1] || !a[1])).unwrap();
        assert!(emf_check(&f, &g).unwrap());
        assert_eq!((f.count(), g.count()), (1, 2));
    }

    #[test]
    fn conditioning_matches_definition() {
        let o = TruthOracle::of(&small()).unwrap();
        let c = o.condition(Lit::from_dimacs(-1)).unwrap();
        // X false forces Q false and Z true, Y free: 2 models
        assert_eq!(c.count(), 2);
    }

    #[test]
    fn too_many_variables() {
        let vs: Vec<Var> = (1..=25).map(Var::new).collect();
        assert_eq!(
            TruthOracle::from_fn(&vs, |_| true),
            Err(OracleError::TooManyVariables(25))
        );
    }

    #[test]
    fn unlisted_variable_rejected() {
        assert_eq!(
            TruthOracle::over(&small(), &vars(&[1, 2, 3])),
            Err(OracleError::UnlistedVariable(Var::new(4)))
        );
    }
}
