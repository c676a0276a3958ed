//! CNF data model: variables, literals, clauses, conditioning, unit
//! propagation, connected components and the primal graph.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::Not;
use std::str::FromStr;

use thiserror::Error;

/// A propositional variable, 1-based as in DIMACS.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u32);

impl Var {
    /// # Panics
    /// If `index` is zero.
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "variables are 1-based");
        Var(index)
    }

    pub fn index(self) -> u32 {
        self.0
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, true)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, false)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A literal, packed as `(var << 1) | negated`.
///
/// The derived ordering sorts by variable first and puts the positive
/// literal before the negative one.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(u32);

impl Lit {
    pub fn new(var: Var, positive: bool) -> Self {
        Lit((var.0 << 1) | u32::from(!positive))
    }

    /// Builds a literal from a signed DIMACS integer.
    ///
    /// # Panics
    /// If `value` is zero.
    pub fn from_dimacs(value: i64) -> Self {
        assert!(value != 0, "0 is not a literal");
        let var = Var::new(u32::try_from(value.unsigned_abs()).expect("variable index overflow"));
        Lit::new(var, value > 0)
    }

    pub fn to_dimacs(self) -> i64 {
        let v = i64::from(self.var().0);
        if self.is_positive() {
            v
        } else {
            -v
        }
    }

    pub fn var(self) -> Var {
        Var(self.0 >> 1)
    }

    pub fn is_positive(self) -> bool {
        self.0 & 1 == 0
    }

    /// Dense code, usable as an array index.
    pub fn code(self) -> usize {
        self.0 as usize
    }

    pub fn from_code(code: usize) -> Self {
        Lit(u32::try_from(code).expect("literal code overflow"))
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(self.0 ^ 1)
    }
}

impl fmt::Debug for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_dimacs())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("clause is tautologous: variable {0} occurs in both polarities")]
    Tautology(Var),
    #[error("variable {var} exceeds the universe of {universe} variables")]
    VariableOutOfRange { var: Var, universe: u32 },
    #[error("contradictory literal set: variable {0} occurs in both polarities")]
    Contradictory(Var),
}

/// A disjunction of literals. Duplicate-free and never tautologous.
///
/// Literals keep their insertion order so that DIMACS output reproduces the
/// input. Equality is order-sensitive; use [`Clause::sorted_lits`] for a
/// canonical form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Clause {
    lits: Vec<Lit>,
}

impl Clause {
    pub fn new<I: IntoIterator<Item = Lit>>(lits: I) -> Result<Self, CnfError> {
        let mut out: Vec<Lit> = Vec::new();
        for lit in lits {
            if out.contains(&!lit) {
                return Err(CnfError::Tautology(lit.var()));
            }
            if !out.contains(&lit) {
                out.push(lit);
            }
        }
        Ok(Clause { lits: out })
    }

    /// Like [`Clause::new`] but maps a tautology to `None` instead of an error.
    pub fn simplified<I: IntoIterator<Item = Lit>>(lits: I) -> Option<Self> {
        Clause::new(lits).ok()
    }

    pub fn from_dimacs(values: &[i64]) -> Result<Self, CnfError> {
        Clause::new(values.iter().map(|&v| Lit::from_dimacs(v)))
    }

    pub fn empty() -> Self {
        Clause { lits: Vec::new() }
    }

    pub fn lits(&self) -> &[Lit] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, lit: Lit) -> bool {
        self.lits.contains(&lit)
    }

    pub fn sorted_lits(&self) -> Vec<Lit> {
        let mut lits = self.lits.clone();
        lits.sort_unstable();
        lits
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.lits.iter().map(|l| l.var())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, l) in self.lits.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ")")
    }
}

/// Which transformation introduced an auxiliary variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AuxKind {
    Tseitin,
    Extension,
    Bva,
}

impl fmt::Display for AuxKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AuxKind::Tseitin => "tseitin",
            AuxKind::Extension => "extension",
            AuxKind::Bva => "bva",
        })
    }
}

impl FromStr for AuxKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "tseitin" => Ok(AuxKind::Tseitin),
            "extension" => Ok(AuxKind::Extension),
            "bva" => Ok(AuxKind::Bva),
            other => Err(format!("unknown auxiliary provenance `{other}`")),
        }
    }
}

/// Result of [`Cnf::unit_propagate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Propagation {
    Conflict,
    Propagated { residual: Cnf, implied: Vec<Lit> },
}

/// A conjunction of clauses over variables `1..=universe`.
///
/// Variables fixed by conditioning stay in the universe but are recorded as
/// assigned; they are excluded from [`Cnf::free_vars`].
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Cnf {
    universe: u32,
    clauses: Vec<Clause>,
    aux: BTreeMap<Var, AuxKind>,
    assigned: BTreeSet<Var>,
}

impl Cnf {
    pub fn new(universe: u32) -> Self {
        Cnf {
            universe,
            ..Cnf::default()
        }
    }

    pub fn from_clauses<I>(universe: u32, clauses: I) -> Result<Self, CnfError>
    where
        I: IntoIterator<Item = Clause>,
    {
        let mut cnf = Cnf::new(universe);
        for c in clauses {
            cnf.push(c)?;
        }
        Ok(cnf)
    }

    /// Convenience constructor from DIMACS-style integer lists.
    pub fn from_dimacs_clauses(universe: u32, clauses: &[&[i64]]) -> Result<Self, CnfError> {
        let clauses = clauses
            .iter()
            .map(|c| Clause::from_dimacs(c))
            .collect::<Result<Vec<_>, _>>()?;
        Cnf::from_clauses(universe, clauses)
    }

    pub fn universe(&self) -> u32 {
        self.universe
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn num_clauses(&self) -> usize {
        self.clauses.len()
    }

    pub fn push(&mut self, clause: Clause) -> Result<(), CnfError> {
        if let Some(var) = clause.vars().find(|v| v.0 > self.universe) {
            return Err(CnfError::VariableOutOfRange {
                var,
                universe: self.universe,
            });
        }
        self.clauses.push(clause);
        Ok(())
    }

    /// Adds the clause unless it is tautologous. Returns whether it was added.
    pub fn push_simplified<I: IntoIterator<Item = Lit>>(
        &mut self,
        lits: I,
    ) -> Result<bool, CnfError> {
        match Clause::simplified(lits) {
            Some(c) => self.push(c).map(|()| true),
            None => Ok(false),
        }
    }

    /// Extends the universe by one variable and registers it as auxiliary.
    pub fn fresh_aux(&mut self, kind: AuxKind) -> Var {
        let v = self.fresh_var();
        self.aux.insert(v, kind);
        v
    }

    pub fn fresh_var(&mut self) -> Var {
        self.universe += 1;
        Var(self.universe)
    }

    pub fn set_universe(&mut self, universe: u32) -> Result<(), CnfError> {
        let max = self
            .max_mentioned()
            .max(self.aux.keys().next_back().map_or(0, |v| v.0));
        if universe < max {
            return Err(CnfError::VariableOutOfRange {
                var: Var(max),
                universe,
            });
        }
        self.universe = universe;
        Ok(())
    }

    pub fn mark_aux(&mut self, var: Var, kind: AuxKind) -> Result<(), CnfError> {
        if var.0 > self.universe {
            return Err(CnfError::VariableOutOfRange {
                var,
                universe: self.universe,
            });
        }
        self.aux.insert(var, kind);
        Ok(())
    }

    pub fn aux(&self) -> &BTreeMap<Var, AuxKind> {
        &self.aux
    }

    pub fn aux_vars(&self) -> BTreeSet<Var> {
        self.aux.keys().copied().collect()
    }

    pub fn is_aux(&self, var: Var) -> bool {
        self.aux.contains_key(&var)
    }

    pub fn assigned(&self) -> &BTreeSet<Var> {
        &self.assigned
    }

    /// Variables of the universe not fixed by conditioning, ascending.
    pub fn free_vars(&self) -> Vec<Var> {
        (1..=self.universe)
            .map(Var)
            .filter(|v| !self.assigned.contains(v))
            .collect()
    }

    /// Non-auxiliary free variables, ascending.
    pub fn original_vars(&self) -> Vec<Var> {
        self.free_vars()
            .into_iter()
            .filter(|v| !self.aux.contains_key(v))
            .collect()
    }

    pub fn mentioned_vars(&self) -> BTreeSet<Var> {
        self.clauses.iter().flat_map(|c| c.vars()).collect()
    }

    fn max_mentioned(&self) -> u32 {
        self.clauses
            .iter()
            .flat_map(|c| c.vars())
            .map(|v| v.0)
            .max()
            .unwrap_or(0)
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    /// Total number of literal occurrences.
    pub fn size(&self) -> usize {
        self.clauses.iter().map(Clause::len).sum()
    }

    /// Keeps only the clauses for which `keep` returns true.
    pub fn retain_clauses<F: FnMut(usize, &Clause) -> bool>(&mut self, mut keep: F) {
        let mut i = 0;
        self.clauses.retain(|c| {
            let k = keep(i, c);
            i += 1;
            k
        });
    }

    /// Conditions on a consistent set of literals: clauses satisfied by a
    /// literal are dropped and falsified literals are removed.
    pub fn condition(&self, lits: &[Lit]) -> Result<Cnf, CnfError> {
        let mut value: BTreeMap<Var, bool> = BTreeMap::new();
        for &l in lits {
            if let Some(&prev) = value.get(&l.var()) {
                if prev != l.is_positive() {
                    return Err(CnfError::Contradictory(l.var()));
                }
            }
            value.insert(l.var(), l.is_positive());
        }
        let mut out = Cnf {
            universe: self.universe,
            clauses: Vec::with_capacity(self.clauses.len()),
            aux: self.aux.clone(),
            assigned: self.assigned.clone(),
        };
        out.assigned.extend(value.keys().copied());
        'clauses: for c in &self.clauses {
            let mut kept = Vec::with_capacity(c.len());
            for &l in c.lits() {
                match value.get(&l.var()) {
                    Some(&v) if v == l.is_positive() => continue 'clauses,
                    Some(_) => {}
                    None => kept.push(l),
                }
            }
            out.clauses.push(Clause { lits: kept });
        }
        Ok(out)
    }

    /// Conditions on unit clauses until none remain.
    pub fn unit_propagate(&self) -> Propagation {
        let mut current = self.clone();
        let mut implied: Vec<Lit> = Vec::new();
        loop {
            if current.has_empty_clause() {
                return Propagation::Conflict;
            }
            let mut units: Vec<Lit> = Vec::new();
            for c in &current.clauses {
                if let [l] = c.lits() {
                    if units.contains(&!*l) {
                        return Propagation::Conflict;
                    }
                    if !units.contains(l) {
                        units.push(*l);
                    }
                }
            }
            if units.is_empty() {
                return Propagation::Propagated {
                    residual: current,
                    implied,
                };
            }
            current = current
                .condition(&units)
                .expect("unit set checked for contradictions");
            implied.extend(units);
        }
    }

    /// Partitions the clauses into variable-disjoint groups, ordered by the
    /// smallest variable of each group. Empty clauses form singleton groups
    /// placed first.
    pub fn connected_components(&self) -> Vec<Cnf> {
        let n = self.universe as usize + 1;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for c in &self.clauses {
            let mut vars = c.vars();
            if let Some(first) = vars.next() {
                let a = find(&mut parent, first.0 as usize);
                for v in vars {
                    let b = find(&mut parent, v.0 as usize);
                    if a != b {
                        parent[b] = a;
                    }
                }
            }
        }
        // group key: smallest variable in the component
        let mut min_of_root: Vec<u32> = vec![u32::MAX; n];
        for v in 1..n {
            let r = find(&mut parent, v);
            min_of_root[r] = min_of_root[r].min(v as u32);
        }
        let mut groups: BTreeMap<u32, Vec<Clause>> = BTreeMap::new();
        let mut empties = Vec::new();
        for c in &self.clauses {
            match c.lits().first() {
                Some(l) => {
                    let r = find(&mut parent, l.var().0 as usize);
                    groups.entry(min_of_root[r]).or_default().push(c.clone());
                }
                None => empties.push(c.clone()),
            }
        }
        let make = |clauses: Vec<Clause>| Cnf {
            universe: self.universe,
            clauses,
            aux: self.aux.clone(),
            assigned: self.assigned.clone(),
        };
        empties
            .into_iter()
            .map(|c| make(vec![c]))
            .chain(groups.into_values().map(make))
            .collect()
    }

    pub fn primal_graph(&self) -> PrimalGraph {
        let mut g = PrimalGraph::default();
        for c in &self.clauses {
            let vars: Vec<Var> = c.vars().collect();
            for (i, &u) in vars.iter().enumerate() {
                g.adj.entry(u).or_default();
                for &v in &vars[i + 1..] {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return write!(f, "T");
        }
        for (i, c) in self.clauses.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

/// Variables as vertices, an edge between every two variables that share a
/// clause.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PrimalGraph {
    adj: BTreeMap<Var, BTreeSet<Var>>,
}

impl PrimalGraph {
    pub fn new() -> Self {
        PrimalGraph::default()
    }

    pub fn add_vertex(&mut self, v: Var) {
        self.adj.entry(v).or_default();
    }

    /// Self-loops are ignored.
    pub fn add_edge(&mut self, u: Var, v: Var) {
        if u == v {
            self.add_vertex(u);
            return;
        }
        self.adj.entry(u).or_default().insert(v);
        self.adj.entry(v).or_default().insert(u);
    }

    pub fn vertices(&self) -> impl Iterator<Item = Var> + '_ {
        self.adj.keys().copied()
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn num_edges(&self) -> usize {
        self.adj.values().map(BTreeSet::len).sum::<usize>() / 2
    }

    pub fn has_edge(&self, u: Var, v: Var) -> bool {
        self.adj.get(&u).is_some_and(|n| n.contains(&v))
    }

    pub fn neighbors(&self, v: Var) -> impl Iterator<Item = Var> + '_ {
        self.adj.get(&v).into_iter().flatten().copied()
    }

    pub fn degree(&self, v: Var) -> usize {
        self.adj.get(&v).map_or(0, BTreeSet::len)
    }

    pub fn edges(&self) -> impl Iterator<Item = (Var, Var)> + '_ {
        self.adj
            .iter()
            .flat_map(|(&u, ns)| ns.iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
    }
}
