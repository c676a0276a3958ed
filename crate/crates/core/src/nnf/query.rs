//! Structural checks, transformations and tractable queries on NNF DAGs.

use std::collections::BTreeSet;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use thiserror::Error;

use super::{NnfBuilder, NnfDag, NnfNode, NodeId};
use crate::cnf::{Clause, CnfError, Lit, Var};
use crate::oracle::{eval_nnf_word, OracleError, TruthOracle, WordCtx, MAX_VARS};

/// First AND node found whose children share a variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecomposabilityViolation {
    pub node: NodeId,
    pub var: Var,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeterminismMode {
    /// Every OR must be a decision node. Sound but incomplete.
    Structural,
    /// Pairwise inconsistency of disjuncts by truth-table enumeration. Exact.
    Oracle,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("AND node {} is not decomposable (variable {} shared)", .0.node, .0.var)]
    NotDecomposable(DecomposabilityViolation),
    #[error("the DAG is not deterministic")]
    NotDeterministic,
    #[error("OR node {0} is not smooth")]
    NotSmooth(NodeId),
    #[error("variable {0} is mentioned but not in the counting scope")]
    OutOfScope(Var),
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

fn disjoint_union_violation(sets: &[&[Var]]) -> Option<Var> {
    let mut seen = BTreeSet::new();
    for set in sets {
        for &v in *set {
            if !seen.insert(v) {
                return Some(v);
            }
        }
    }
    None
}

/// The literal over `var` that `node` asserts directly: the node itself or one
/// of its AND children.
fn asserted_literal(dag: &NnfDag, node: NodeId, var: Var) -> Option<Lit> {
    match dag.node(node) {
        NnfNode::Lit(l) if l.var() == var => Some(*l),
        NnfNode::And(ch) => ch.iter().find_map(|&c| match dag.node(c) {
            NnfNode::Lit(l) if l.var() == var => Some(*l),
            _ => None,
        }),
        _ => None,
    }
}

fn is_decision_on(dag: &NnfDag, children: &[NodeId], var: Var) -> bool {
    match (
        asserted_literal(dag, children[0], var),
        asserted_literal(dag, children[1], var),
    ) {
        (Some(a), Some(b)) => a == !b,
        _ => false,
    }
}

fn candidate_vars(dag: &NnfDag, node: NodeId) -> Vec<Var> {
    match dag.node(node) {
        NnfNode::Lit(l) => vec![l.var()],
        NnfNode::And(ch) => ch
            .iter()
            .filter_map(|&c| match dag.node(c) {
                NnfNode::Lit(l) => Some(l.var()),
                _ => None,
            })
            .collect(),
        _ => Vec::new(),
    }
}

impl NnfDag {
    /// Checks that the children of every reachable AND node mention pairwise
    /// disjoint variables.
    pub fn check_decomposable(&self) -> Result<(), DecomposabilityViolation> {
        let reach = self.reachable();
        for (id, node) in self.nodes().iter().enumerate() {
            if !reach[id] {
                continue;
            }
            if let NnfNode::And(ch) = node {
                let sets: Vec<&[Var]> = ch.iter().map(|&c| self.var_set(c)).collect();
                if let Some(var) = disjoint_union_violation(&sets) {
                    return Err(DecomposabilityViolation { node: id, var });
                }
            }
        }
        Ok(())
    }

    pub fn is_decomposable(&self) -> bool {
        self.check_decomposable().is_ok()
    }

    pub fn check_deterministic(&self, mode: DeterminismMode) -> Result<bool, OracleError> {
        match mode {
            DeterminismMode::Structural => Ok(self.structurally_deterministic()),
            DeterminismMode::Oracle => self.oracle_deterministic(),
        }
    }

    fn structurally_deterministic(&self) -> bool {
        let reach = self.reachable();
        self.nodes().iter().enumerate().all(|(id, node)| {
            let NnfNode::Or { children, decision } = node else {
                return true;
            };
            if !reach[id] || children.len() <= 1 {
                return true;
            }
            if children.len() != 2 {
                return false;
            }
            match decision {
                Some(v) => is_decision_on(self, children, *v),
                None => candidate_vars(self, children[0])
                    .into_iter()
                    .any(|v| is_decision_on(self, children, v)),
            }
        })
    }

    fn oracle_deterministic(&self) -> Result<bool, OracleError> {
        let vars: Vec<Var> = self.mentioned_vars().into_iter().collect();
        if vars.len() > MAX_VARS {
            return Err(OracleError::TooManyVariables(vars.len()));
        }
        let reach = self.reachable();
        let ors: Vec<&[NodeId]> = self
            .nodes()
            .iter()
            .enumerate()
            .filter(|(id, _)| reach[*id])
            .filter_map(|(_, n)| match n {
                NnfNode::Or { children, .. } if children.len() > 1 => Some(children.as_slice()),
                _ => None,
            })
            .collect();
        if ors.is_empty() {
            return Ok(true);
        }
        let ctx = WordCtx::new(&vars);
        let mask = ctx.valid_mask();
        let mut scratch = vec![0u64; self.root() + 1];
        for w in 0..ctx.num_words() {
            eval_nnf_word(self, &ctx, w, &mut scratch);
            for children in &ors {
                let mut acc = 0u64;
                for &c in *children {
                    let v = scratch[c] & mask;
                    if acc & v != 0 {
                        return Ok(false);
                    }
                    acc |= v;
                }
            }
        }
        Ok(true)
    }

    /// Existential quantification by replacing every literal over `vars` with
    /// TRUE. Exact on decomposable input.
    pub fn forget(&self, vars: &BTreeSet<Var>) -> NnfDag {
        self.forget_counted(vars).0
    }

    /// [`NnfDag::forget`] plus the number of nodes visited.
    pub fn forget_counted(&self, vars: &BTreeSet<Var>) -> (NnfDag, usize) {
        let mut visits = 0usize;
        let nodes: Vec<NnfNode> = self
            .nodes()
            .iter()
            .map(|n| {
                visits += 1;
                match n {
                    NnfNode::Lit(l) if vars.contains(&l.var()) => NnfNode::True,
                    other => other.clone(),
                }
            })
            .collect();
        let dag = NnfDag::new(nodes, self.root(), self.num_vars())
            .expect("literal replacement keeps the arena well formed");
        (dag, visits)
    }

    /// Conditions on a consistent literal set: agreeing leaves become TRUE,
    /// contradicting ones FALSE.
    pub fn condition(&self, lits: &[Lit]) -> Result<NnfDag, CnfError> {
        let mut value: Vec<Option<bool>> = vec![None; self.num_vars() as usize + 1];
        for &l in lits {
            let idx = l.var().index() as usize;
            if idx >= value.len() {
                value.resize(idx + 1, None);
            }
            match value[idx] {
                Some(b) if b != l.is_positive() => return Err(CnfError::Contradictory(l.var())),
                _ => value[idx] = Some(l.is_positive()),
            }
        }
        let nodes: Vec<NnfNode> = self
            .nodes()
            .iter()
            .map(|n| match n {
                NnfNode::Lit(l) => match value[l.var().index() as usize] {
                    Some(b) if b == l.is_positive() => NnfNode::True,
                    Some(_) => NnfNode::False,
                    None => n.clone(),
                },
                other => other.clone(),
            })
            .collect();
        Ok(NnfDag::new(nodes, self.root(), self.num_vars()).expect("well formed"))
    }

    /// Satisfiability by one bottom-up pass. Exact on decomposable input.
    pub fn is_consistent(&self) -> bool {
        let mut sat = vec![false; self.root() + 1];
        for id in 0..=self.root() {
            sat[id] = match self.node(id) {
                NnfNode::Lit(_) | NnfNode::True => true,
                NnfNode::False => false,
                NnfNode::And(ch) => ch.iter().all(|&c| sat[c]),
                NnfNode::Or { children, .. } => children.iter().any(|&c| sat[c]),
            };
        }
        sat[self.root()]
    }

    /// Whether every model satisfies `clause`.
    pub fn entails_clause(&self, clause: &Clause) -> bool {
        let negated: Vec<Lit> = clause.lits().iter().map(|&l| !l).collect();
        !self
            .condition(&negated)
            .expect("a clause never contains both polarities")
            .is_consistent()
    }

    /// Makes the children of every OR mention the same variables by
    /// conjoining `(v ∨ ¬v)` for each missing `v`. AND children are flattened
    /// so that decision literals stay direct children.
    pub fn smooth(&self) -> NnfDag {
        let mut b = NnfBuilder::shared();
        let mut map: Vec<NodeId> = Vec::with_capacity(self.len());
        for node in self.nodes() {
            let id = match node {
                NnfNode::Lit(l) => b.push(NnfNode::Lit(*l)),
                NnfNode::True => b.push(NnfNode::True),
                NnfNode::False => b.push(NnfNode::False),
                NnfNode::And(ch) => b.push(NnfNode::And(ch.iter().map(|&c| map[c]).collect())),
                NnfNode::Or { children, decision } => {
                    let union: BTreeSet<Var> = children
                        .iter()
                        .flat_map(|&c| self.var_set(c).iter().copied())
                        .collect();
                    let mut new_children = Vec::with_capacity(children.len());
                    for &c in children {
                        let have: BTreeSet<Var> = self.var_set(c).iter().copied().collect();
                        let missing: Vec<Var> = union.difference(&have).copied().collect();
                        if missing.is_empty() {
                            new_children.push(map[c]);
                            continue;
                        }
                        let mut parts = match b.node(map[c]) {
                            NnfNode::And(inner) => inner.clone(),
                            NnfNode::True => Vec::new(),
                            _ => vec![map[c]],
                        };
                        for v in missing {
                            let p = b.push(NnfNode::Lit(v.pos()));
                            let n = b.push(NnfNode::Lit(v.neg()));
                            parts.push(b.push(NnfNode::Or {
                                children: vec![p, n],
                                decision: Some(v),
                            }));
                        }
                        let conj = if parts.len() == 1 {
                            parts[0]
                        } else {
                            b.push(NnfNode::And(parts))
                        };
                        new_children.push(conj);
                    }
                    b.push(NnfNode::Or {
                        children: new_children,
                        decision: *decision,
                    })
                }
            };
            map.push(id);
        }
        let root = map[self.root()];
        b.finish(root, self.num_vars())
            .expect("smoothing keeps the arena well formed")
            .compact()
    }

    /// First OR node whose children mention different variables.
    pub fn smoothness_violation(&self) -> Option<NodeId> {
        let reach = self.reachable();
        self.nodes().iter().enumerate().find_map(|(id, n)| match n {
            NnfNode::Or { children, .. } if reach[id] => {
                let first = self.var_set(children[0]);
                children
                    .iter()
                    .any(|&c| self.var_set(c) != first)
                    .then_some(id)
            }
            _ => None,
        })
    }

    /// Determinism check used by counting: structural first, exact oracle as
    /// a fallback.
    pub fn verify_deterministic(&self) -> Result<bool, OracleError> {
        if self.structurally_deterministic() {
            return Ok(true);
        }
        self.oracle_deterministic()
    }

    /// Number of models over `over`.
    ///
    /// Requires a decomposable, deterministic and smooth DAG whose variables
    /// lie in `over`; each requirement is verified and reported as an error.
    pub fn model_count(&self, over: &[Var]) -> Result<BigUint, QueryError> {
        self.check_decomposable()
            .map_err(QueryError::NotDecomposable)?;
        let scope: BTreeSet<Var> = over.iter().copied().collect();
        let mentioned = self.mentioned_vars();
        if let Some(&v) = mentioned.iter().find(|v| !scope.contains(v)) {
            return Err(QueryError::OutOfScope(v));
        }
        if let Some(node) = self.smoothness_violation() {
            return Err(QueryError::NotSmooth(node));
        }
        if !self.verify_deterministic()? {
            return Err(QueryError::NotDeterministic);
        }
        let mut count: Vec<BigUint> = Vec::with_capacity(self.root() + 1);
        for id in 0..=self.root() {
            let c = match self.node(id) {
                NnfNode::Lit(_) | NnfNode::True => BigUint::one(),
                NnfNode::False => BigUint::zero(),
                NnfNode::And(ch) => ch.iter().fold(BigUint::one(), |a, &c| a * &count[c]),
                NnfNode::Or { children, .. } => {
                    children.iter().fold(BigUint::zero(), |a, &c| a + &count[c])
                }
            };
            count.push(c);
        }
        let free = scope.len() - mentioned.len();
        Ok(count.swap_remove(self.root()) << free)
    }

    /// Minimum number of positive literals over all models, `None` if
    /// inconsistent. Exact on decomposable input; unmentioned variables count
    /// as false.
    pub fn min_cardinality(&self) -> Option<u64> {
        let mut best: Vec<Option<u64>> = Vec::with_capacity(self.root() + 1);
        for id in 0..=self.root() {
            let v = match self.node(id) {
                NnfNode::Lit(l) => Some(u64::from(l.is_positive())),
                NnfNode::True => Some(0),
                NnfNode::False => None,
                NnfNode::And(ch) => ch.iter().try_fold(0u64, |a, &c| best[c].map(|b| a + b)),
                NnfNode::Or { children, .. } => children.iter().filter_map(|&c| best[c]).min(),
            };
            best.push(v);
        }
        best[self.root()]
    }

    /// Oracle-backed semantic equality against any tabulable source over the
    /// given variables.
    pub fn oracle(&self, vars: &[Var]) -> Result<TruthOracle, OracleError> {
        TruthOracle::over(self, vars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cnf::Cnf;
    use crate::nnf::parse_nnf;

    // X=1, Y=2, Z=3, Q=4
    pub(crate) const DNNF_SMALL: &str =
        "nnf 7 6 4\nL 1\nL 2\nA 2 0 1\nL 3\nL -4\nA 2 3 4\nO 0 2 2 5\n";
    pub(crate) const DDNNF_SMALL: &str = "nnf 12 13 4\nL 1\nL 2\nL -2\nL 3\nL -4\nA 3 2 3 4\nO 2 2 1 5\nA 2 0 6\nL -1\nA 2 3 4\nA 2 8 9\nO 1 2 7 10\n";

    fn small_cnf() -> Cnf {
        Cnf::from_dimacs_clauses(4, &[&[1, -4], &[1, 3], &[2, -4], &[2, 3]]).unwrap()
    }

    fn all4() -> Vec<Var> {
        (1..=4).map(Var::new).collect()
    }

    fn lits(v: &[i64]) -> Vec<Lit> {
        v.iter().map(|&x| Lit::from_dimacs(x)).collect()
    }

    #[test]
    fn reference_dags_are_equivalent_to_the_cnf() {
        let cnf = TruthOracle::of(&small_cnf()).unwrap();
        for text in [DNNF_SMALL, DDNNF_SMALL] {
            let dag = parse_nnf(text).unwrap();
            assert!(dag.oracle(&all4()).unwrap().equiv(&cnf).unwrap());
        }
    }

    #[test]
    fn decomposability() {
        assert!(parse_nnf(DNNF_SMALL).unwrap().is_decomposable());
        assert!(parse_nnf(DDNNF_SMALL).unwrap().is_decomposable());
        // AND(X, X ∨ Y)
        let bad = parse_nnf("nnf 4 4 2\nL 1\nL 2\nO 0 2 0 1\nA 2 0 2\n").unwrap();
        assert_eq!(
            bad.check_decomposable(),
            Err(DecomposabilityViolation {
                node: 3,
                var: Var::new(1)
            })
        );
        assert!(NnfDag::literal(Lit::from_dimacs(1), 1).is_decomposable());
    }

    #[test]
    fn determinism_modes() {
        let a = parse_nnf(DNNF_SMALL).unwrap();
        let b = parse_nnf(DDNNF_SMALL).unwrap();
        assert!(b.check_deterministic(DeterminismMode::Structural).unwrap());
        assert!(b.check_deterministic(DeterminismMode::Oracle).unwrap());
        assert!(!a.check_deterministic(DeterminismMode::Oracle).unwrap());
        assert!(!a.check_deterministic(DeterminismMode::Structural).unwrap());
        let single = parse_nnf("nnf 2 1 1\nL 1\nO 0 1 0\n").unwrap();
        assert!(single
            .check_deterministic(DeterminismMode::Structural)
            .unwrap());
        assert!(single.check_deterministic(DeterminismMode::Oracle).unwrap());
    }

    #[test]
    fn forgetting_a_decision_dag() {
        let b = parse_nnf(DDNNF_SMALL).unwrap();
        let forget: BTreeSet<Var> = [Var::new(1), Var::new(3)].into_iter().collect();
        let (g, visits) = b.forget_counted(&forget);
        assert_eq!(visits, b.len());
        for id in [0, 3, 8] {
            assert_eq!(g.node(id), &NnfNode::True);
        }
        assert!(g.is_decomposable());
        assert!(!g.check_deterministic(DeterminismMode::Oracle).unwrap());
        let expected = TruthOracle::of(&b)
            .unwrap()
            .forget(&[Var::new(1), Var::new(3)])
            .unwrap();
        let got = g.oracle(&[Var::new(2), Var::new(4)]).unwrap();
        assert!(got.equiv(&expected).unwrap());
        assert_eq!(b.forget(&BTreeSet::new()), b);
    }

    #[test]
    fn forgetting_everything_gives_top() {
        let b = parse_nnf(DDNNF_SMALL).unwrap();
        let g = b.forget(&all4().into_iter().collect());
        assert_eq!(g.oracle(&all4()).unwrap().count(), 16);
    }

    #[test]
    fn conditioning() {
        let a = parse_nnf(DNNF_SMALL).unwrap();
        let c = a.condition(&lits(&[-1])).unwrap();
        // Z ∧ ¬Q over X..Q: 4 models (X, Y free)
        let expected = TruthOracle::from_fn(&all4(), |m| m[2] && !m[3]).unwrap();
        assert!(c.oracle(&all4()).unwrap().equiv(&expected).unwrap());
        assert_eq!(a.condition(&[]).unwrap(), a);
        assert!(!a.condition(&lits(&[-1, -3])).unwrap().is_consistent());
        assert!(a.condition(&lits(&[1, -1])).is_err());
    }

    #[test]
    fn consistency() {
        assert!(parse_nnf(DNNF_SMALL).unwrap().is_consistent());
        assert!(!NnfDag::constant(false, 0).is_consistent());
        let and_false = parse_nnf("nnf 3 2 1\nL 1\nO 0 0\nA 2 0 1\n").unwrap();
        assert!(!and_false.is_consistent());
    }

    #[test]
    fn entailment() {
        let a = parse_nnf(DNNF_SMALL).unwrap();
        assert!(a.entails_clause(&Clause::from_dimacs(&[1, 3]).unwrap()));
        assert!(!a.entails_clause(&Clause::from_dimacs(&[4]).unwrap()));
    }

    #[test]
    fn smoothing() {
        // OR(X, X ∧ Y)
        let d = parse_nnf("nnf 4 4 2\nL 1\nL 2\nA 2 0 1\nO 0 2 0 2\n").unwrap();
        let s = d.smooth();
        assert_eq!(s.smoothness_violation(), None);
        assert!(s.is_decomposable());
        let vs = [Var::new(1), Var::new(2)];
        assert!(s
            .oracle(&vs)
            .unwrap()
            .equiv(&d.oracle(&vs).unwrap())
            .unwrap());

        let a = parse_nnf(DNNF_SMALL).unwrap();
        let sa = a.smooth();
        assert_eq!(sa.smoothness_violation(), None);
        assert_eq!(sa.oracle(&all4()).unwrap().count(), 7);

        let b = parse_nnf(DDNNF_SMALL).unwrap();
        assert!(b
            .smooth()
            .check_deterministic(DeterminismMode::Structural)
            .unwrap());
    }

    #[test]
    fn counting() {
        let b = parse_nnf(DDNNF_SMALL).unwrap().smooth();
        assert_eq!(b.model_count(&all4()).unwrap(), BigUint::from(7u32));
        let t = NnfDag::constant(true, 2);
        assert_eq!(
            t.model_count(&[Var::new(1), Var::new(2)]).unwrap(),
            BigUint::from(4u32)
        );
        let f = NnfDag::constant(false, 2);
        assert_eq!(f.model_count(&all4()).unwrap(), BigUint::zero());
        let a = parse_nnf(DNNF_SMALL).unwrap().smooth();
        assert_eq!(a.model_count(&all4()), Err(QueryError::NotDeterministic));
        assert!(matches!(
            parse_nnf(DDNNF_SMALL).unwrap().model_count(&all4()),
            Err(QueryError::NotSmooth(_))
        ));
        assert_eq!(
            parse_nnf(DDNNF_SMALL)
                .unwrap()
                .smooth()
                .model_count(&all4()[..3]),
            Err(QueryError::OutOfScope(Var::new(4)))
        );
    }

    #[test]
    fn min_card() {
        assert_eq!(parse_nnf(DNNF_SMALL).unwrap().min_cardinality(), Some(1));
        assert_eq!(
            NnfDag::literal(Lit::from_dimacs(-1), 1).min_cardinality(),
            Some(0)
        );
        assert_eq!(NnfDag::constant(false, 0).min_cardinality(), None);
    }

    #[test]
    fn stats() {
        let d = parse_nnf("nnf 3 2 2\nL 1\nL 2\nA 2 0 1\n").unwrap();
        assert_eq!(
            d.stats(),
            super::super::NnfStats {
                node_count: 3,
                edge_count: 2
            }
        );
        assert_eq!(
            NnfDag::literal(Lit::from_dimacs(1), 1).stats().edge_count,
            0
        );
        let a = parse_nnf(DNNF_SMALL).unwrap().stats();
        assert_eq!((a.node_count, a.edge_count), (7, 6));
    }
}
