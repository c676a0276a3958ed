//! Top-down compilation of CNF into decision-DNNF.
//!
//! Each call unit-propagates, splits the residual clauses into
//! variable-disjoint components (conjoined by a decomposable AND) and
//! branches on one variable per component, producing decision nodes
//! `(v ∧ hi) ∨ (¬v ∧ lo)`. Components are cached by their exact sorted
//! clause list.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::cnf::{Cnf, Lit, Var};
use crate::nnf::{NnfBuilder, NnfDag, NnfNode, NodeId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CompileError {
    #[error("compilation exceeded the time budget of {0:?}")]
    Timeout(Duration),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CompileOptions {
    pub cache: bool,
    pub timeout: Option<Duration>,
}

impl Default for CompileOptions {
    fn default() -> Self {
        CompileOptions {
            cache: true,
            timeout: None,
        }
    }
}

type Clauses = Vec<Vec<Lit>>;

/// Component cache keyed by the sorted, deduplicated clause list.
#[derive(Debug, Default)]
pub struct CompileCache {
    map: HashMap<Clauses, NodeId>,
    pub hits: u64,
    pub misses: u64,
}

impl CompileCache {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

#[derive(Debug)]
pub struct Compiler {
    options: CompileOptions,
    builder: NnfBuilder,
    cache: CompileCache,
    deadline: Option<Instant>,
    calls: u64,
}

/// Compiles without a time limit.
pub fn compile(cnf: &Cnf) -> NnfDag {
    Compiler::new(CompileOptions::default())
        .compile(cnf)
        .expect("no deadline")
}

/// The variable with the most clause occurrences, ties to the smallest index.
pub fn branch_heuristic(cnf: &Cnf) -> Option<Var> {
    let clauses: Clauses = cnf.clauses().iter().map(|c| c.lits().to_vec()).collect();
    pick_branch(&clauses)
}

fn pick_branch(clauses: &Clauses) -> Option<Var> {
    let mut occ: HashMap<Var, usize> = HashMap::new();
    for l in clauses.iter().flatten() {
        *occ.entry(l.var()).or_default() += 1;
    }
    occ.into_iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(b.0.cmp(&a.0)))
        .map(|(v, _)| v)
}

fn condition(clauses: &Clauses, lit: Lit) -> Clauses {
    clauses
        .iter()
        .filter(|c| !c.contains(&lit))
        .map(|c| c.iter().copied().filter(|&l| l != !lit).collect())
        .collect()
}

/// Unit propagation; `None` on conflict.
fn propagate(mut clauses: Clauses) -> Option<(Vec<Lit>, Clauses)> {
    let mut implied: Vec<Lit> = Vec::new();
    let mut value: HashMap<Var, bool> = HashMap::new();
    loop {
        let mut fresh = false;
        for c in &clauses {
            match c.as_slice() {
                [] => return None,
                [l] => match value.get(&l.var()) {
                    Some(&b) if b != l.is_positive() => return None,
                    Some(_) => {}
                    None => {
                        value.insert(l.var(), l.is_positive());
                        implied.push(*l);
                        fresh = true;
                    }
                },
                _ => {}
            }
        }
        if !fresh {
            return Some((implied, clauses));
        }
        let mut next = Vec::with_capacity(clauses.len());
        for c in clauses {
            let mut sat = false;
            let mut kept = Vec::with_capacity(c.len());
            for l in c {
                match value.get(&l.var()) {
                    Some(&b) if b == l.is_positive() => {
                        sat = true;
                        break;
                    }
                    Some(_) => {}
                    None => kept.push(l),
                }
            }
            if !sat {
                if kept.is_empty() {
                    return None;
                }
                next.push(kept);
            }
        }
        clauses = next;
    }
}

/// Variable-disjoint groups ordered by their smallest variable.
fn components(clauses: Clauses) -> Vec<Clauses> {
    let mut ids: HashMap<Var, usize> = HashMap::new();
    let mut parent: Vec<usize> = Vec::new();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for c in &clauses {
        let mut root = None;
        for l in c {
            let id = *ids.entry(l.var()).or_insert_with(|| {
                parent.push(parent.len());
                parent.len() - 1
            });
            let r = find(&mut parent, id);
            match root {
                None => root = Some(r),
                Some(r0) if r0 != r => parent[r] = r0,
                _ => {}
            }
        }
    }
    let mut groups: HashMap<usize, (Var, Clauses)> = HashMap::new();
    for c in clauses {
        let r = find(&mut parent, ids[&c[0].var()]);
        let min = c.iter().map(|l| l.var()).min().expect("nonempty");
        let entry = groups.entry(r).or_insert((min, Vec::new()));
        entry.0 = entry.0.min(min);
        entry.1.push(c);
    }
    let mut out: Vec<(Var, Clauses)> = groups.into_values().collect();
    out.sort_by_key(|g| g.0);
    out.into_iter().map(|g| g.1).collect()
}

fn canonical(mut clauses: Clauses) -> Clauses {
    for c in &mut clauses {
        c.sort_unstable();
    }
    clauses.sort_unstable();
    clauses.dedup();
    clauses
}

impl Compiler {
    pub fn new(options: CompileOptions) -> Self {
        Compiler {
            options,
            builder: NnfBuilder::shared(),
            cache: CompileCache::default(),
            deadline: None,
            calls: 0,
        }
    }

    pub fn cache(&self) -> &CompileCache {
        &self.cache
    }

    pub fn compile(&mut self, cnf: &Cnf) -> Result<NnfDag, CompileError> {
        self.builder = NnfBuilder::shared();
        self.cache = CompileCache::default();
        self.deadline = self.options.timeout.map(|t| Instant::now() + t);
        let clauses: Clauses = cnf.clauses().iter().map(|c| c.lits().to_vec()).collect();
        let root = self.node(clauses)?;
        let builder = std::mem::replace(&mut self.builder, NnfBuilder::shared());
        Ok(builder
            .finish(root, cnf.universe())
            .expect("builder output is well formed")
            .compact())
    }

    fn tick(&mut self) -> Result<(), CompileError> {
        self.calls += 1;
        if self.calls.is_multiple_of(64) {
            if let Some(d) = self.deadline {
                if Instant::now() > d {
                    return Err(CompileError::Timeout(
                        self.options.timeout.unwrap_or_default(),
                    ));
                }
            }
        }
        Ok(())
    }

    fn node(&mut self, clauses: Clauses) -> Result<NodeId, CompileError> {
        self.tick()?;
        let Some((implied, residual)) = propagate(clauses) else {
            return Ok(self.builder.constant(false));
        };
        let mut parts: Vec<NodeId> = implied.into_iter().map(|l| self.builder.lit(l)).collect();
        for comp in components(residual) {
            let id = self.component(comp)?;
            if let NnfNode::False = self.builder.node(id) {
                return Ok(id);
            }
            parts.push(id);
        }
        Ok(self.builder.and(parts))
    }

    fn component(&mut self, clauses: Clauses) -> Result<NodeId, CompileError> {
        let key = if self.options.cache {
            let key = canonical(clauses.clone());
            if let Some(&id) = self.cache.map.get(&key) {
                self.cache.hits += 1;
                return Ok(id);
            }
            self.cache.misses += 1;
            Some(key)
        } else {
            None
        };
        let v = pick_branch(&clauses).expect("component mentions a variable");
        let mut children = Vec::with_capacity(2);
        for lit in [v.pos(), v.neg()] {
            let sub = self.node(condition(&clauses, lit))?;
            if let NnfNode::False = self.builder.node(sub) {
                continue;
            }
            let l = self.builder.lit(lit);
            children.push(self.builder.and(vec![l, sub]));
        }
        let id = self.builder.or(children, Some(v));
        if let Some(key) = key {
            self.cache.map.insert(key, id);
        }
        Ok(id)
    }
}
