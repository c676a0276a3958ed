//! Jointrees, their width, and treewidth of primal graphs.
//!
//! Text format: one vertex per line as `v <id> : <vars...>`, then one edge
//! per line as `e <id> <id>`. Ids are 0-based and dense.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use crate::cnf::{Cnf, PrimalGraph, Var};

pub const EXACT_LIMIT: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WidthError {
    #[error("the jointree has no vertices")]
    Empty,
    #[error("edge ({0}, {1}) refers to a missing vertex")]
    BadEdge(usize, usize),
    #[error("the edges do not form a tree")]
    NotATree,
    #[error("variable {0} already occurs in a cluster")]
    AlreadyPresent(Var),
    #[error("{0} vertices exceed the exact treewidth limit of {EXACT_LIMIT}")]
    TooManyVertices(usize),
    #[error("n must be at least 1")]
    ZeroSize,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JointreeViolation {
    /// No cluster contains all variables of the clause at this index.
    UncoveredClause(usize),
    /// The clusters containing the variable do not form a connected subtree.
    Disconnected(Var),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Jointree {
    clusters: Vec<BTreeSet<Var>>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Jointree {
    pub fn new(
        clusters: Vec<BTreeSet<Var>>,
        edges: Vec<(usize, usize)>,
    ) -> Result<Self, WidthError> {
        let n = clusters.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            if a >= n || b >= n {
                return Err(WidthError::BadEdge(a, b));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        if n > 0 && (edges.len() != n - 1 || reach(&adj, 0, |_| true).len() != n) {
            return Err(WidthError::NotATree);
        }
        if n == 0 && !edges.is_empty() {
            return Err(WidthError::NotATree);
        }
        Ok(Jointree {
            clusters,
            edges,
            adj,
        })
    }

    /// A single vertex holding every variable of the universe.
    pub fn trivial(cnf: &Cnf) -> Jointree {
        let all = (1..=cnf.universe()).map(Var::new).collect();
        Jointree::new(vec![all], Vec::new()).expect("one vertex")
    }

    pub fn clusters(&self) -> &[BTreeSet<Var>] {
        &self.clusters
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn num_vertices(&self) -> usize {
        self.clusters.len()
    }

    /// Largest cluster size minus one.
    pub fn width(&self) -> Result<usize, WidthError> {
        self.clusters
            .iter()
            .map(|c| c.len().saturating_sub(1))
            .max()
            .ok_or(WidthError::Empty)
    }

    /// Checks clause coverage, then that every variable's clusters are
    /// connected. Reports the first failure.
    pub fn validate(&self, cnf: &Cnf) -> Result<(), JointreeViolation> {
        for (i, c) in cnf.clauses().iter().enumerate() {
            let covered = self
                .clusters
                .iter()
                .any(|cl| c.vars().all(|v| cl.contains(&v)));
            if !covered {
                return Err(JointreeViolation::UncoveredClause(i));
            }
        }
        let mut holders: BTreeMap<Var, Vec<usize>> = BTreeMap::new();
        for (id, cl) in self.clusters.iter().enumerate() {
            for &v in cl {
                holders.entry(v).or_default().push(id);
            }
        }
        for (v, ids) in holders {
            let inside = |id: usize| self.clusters[id].contains(&v);
            if reach(&self.adj, ids[0], inside).len() != ids.len() {
                return Err(JointreeViolation::Disconnected(v));
            }
        }
        Ok(())
    }

    pub fn is_valid(&self, cnf: &Cnf) -> bool {
        self.validate(cnf).is_ok()
    }

    /// Adds `v` to every cluster.
    pub fn extend(&self, v: Var) -> Result<Jointree, WidthError> {
        if self.clusters.iter().any(|c| c.contains(&v)) {
            return Err(WidthError::AlreadyPresent(v));
        }
        let mut out = self.clone();
        for c in &mut out.clusters {
            c.insert(v);
        }
        Ok(out)
    }

    /// Width-2 jointree for the family `(A ∨ X_i) ∧ (¬A ∨ B ∨ Y_j) ∧ (¬B ∨ Z_k)`
    /// with the numbering of [`crate::families::delta_b`]: root `{A, B}` and
    /// leaves `{X_i, A}`, `{Y_i, A, B}`, `{Z_i, B}`.
    pub fn for_delta_b(n: u32) -> Result<Jointree, WidthError> {
        if n == 0 {
            return Err(WidthError::ZeroSize);
        }
        let v = Var::new;
        let (a, b) = (v(3 * n + 1), v(3 * n + 2));
        let mut clusters = vec![BTreeSet::from([a, b])];
        let mut edges = Vec::new();
        for i in 1..=n {
            for cl in [
                BTreeSet::from([v(i), a]),
                BTreeSet::from([v(n + i), a, b]),
                BTreeSet::from([v(2 * n + i), b]),
            ] {
                edges.push((0, clusters.len()));
                clusters.push(cl);
            }
        }
        Jointree::new(clusters, edges)
    }

    /// Jointree induced by eliminating the vertices of `g` in `order`.
    /// Vertices of `g` missing from `order` are eliminated last, ascending.
    pub fn from_elimination_order(g: &PrimalGraph, order: &[Var]) -> Jointree {
        let mut order: Vec<Var> = order.to_vec();
        let listed: BTreeSet<Var> = order.iter().copied().collect();
        order.extend(g.vertices().filter(|v| !listed.contains(v)));
        let pos: BTreeMap<Var, usize> = order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut adj: BTreeMap<Var, BTreeSet<Var>> = order
            .iter()
            .map(|&v| (v, g.neighbors(v).collect()))
            .collect();
        let mut clusters = Vec::with_capacity(order.len());
        let mut parent: Vec<Option<usize>> = Vec::with_capacity(order.len());
        for &v in &order {
            let nb = adj.remove(&v).unwrap_or_default();
            for &a in &nb {
                let set = adj.get_mut(&a).expect("neighbour not yet eliminated");
                set.remove(&v);
                set.extend(nb.iter().copied().filter(|&b| b != a));
            }
            parent.push(nb.iter().map(|u| pos[u]).min());
            let mut cl = nb;
            cl.insert(v);
            clusters.push(cl);
        }
        let last = clusters.len().saturating_sub(1);
        let edges = parent
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != last)
            .map(|(i, p)| (i, p.unwrap_or(last)))
            .collect();
        Jointree::new(clusters, edges).expect("elimination yields a tree")
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (id, cl) in self.clusters.iter().enumerate() {
            let _ = write!(out, "v {id} :");
            for v in cl {
                let _ = write!(out, " {v}");
            }
            out.push('\n');
        }
        for (a, b) in &self.edges {
            let _ = writeln!(out, "e {a} {b}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Jointree, WidthError> {
        let mut clusters = Vec::new();
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let err = |msg: &str| WidthError::Parse {
                line,
                msg: msg.to_string(),
            };
            let fields: Vec<&str> = raw.split_whitespace().collect();
            let num = |s: &str| s.parse::<usize>().map_err(|_| err("expected a number"));
            match fields.as_slice() {
                [] => {}
                ["v", id, ":", vars @ ..] => {
                    if num(id)? != clusters.len() {
                        return Err(err("vertex ids must be dense and in order"));
                    }
                    let cl = vars
                        .iter()
                        .map(|s| match num(s)? {
                            0 => Err(err("variables are 1-based")),
                            v => Ok(Var::new(v as u32)),
                        })
                        .collect::<Result<BTreeSet<_>, _>>()?;
                    clusters.push(cl);
                }
                ["e", a, b] => edges.push((num(a)?, num(b)?)),
                _ => return Err(err("expected `v <id> : <vars>` or `e <id> <id>`")),
            }
        }
        Jointree::new(clusters, edges)
    }
}

/// Vertices reachable from `start` through vertices satisfying `keep`.
fn reach<F: Fn(usize) -> bool>(adj: &[Vec<usize>], start: usize, keep: F) -> Vec<usize> {
    let mut seen = vec![false; adj.len()];
    let mut out = vec![start];
    let mut queue = VecDeque::from([start]);
    seen[start] = true;
    while let Some(u) = queue.pop_front() {
        for &w in &adj[u] {
            if !seen[w] && keep(w) {
                seen[w] = true;
                out.push(w);
                queue.push_back(w);
            }
        }
    }
    out
}

/// Min-fill elimination: repeatedly eliminate the vertex whose neighbourhood
/// needs the fewest fill edges, ties to the smallest index. Returns the
/// induced width and the order.
pub fn treewidth_upper(g: &PrimalGraph) -> (usize, Vec<Var>) {
    let mut adj: BTreeMap<Var, BTreeSet<Var>> = g
        .vertices()
        .map(|v| (v, g.neighbors(v).collect()))
        .collect();
    let mut order = Vec::with_capacity(adj.len());
    let mut width = 0;
    while !adj.is_empty() {
        let fill = |v: &Var| {
            let nb: Vec<Var> = adj[v].iter().copied().collect();
            let mut missing = 0;
            for (i, a) in nb.iter().enumerate() {
                missing += nb[i + 1..].iter().filter(|b| !adj[a].contains(b)).count();
            }
            missing
        };
        let v = *adj.keys().min_by_key(|v| (fill(v), **v)).expect("nonempty");
        let nb = adj.remove(&v).expect("present");
        width = width.max(nb.len());
        for &a in &nb {
            let set = adj.get_mut(&a).expect("present");
            set.remove(&v);
            set.extend(nb.iter().copied().filter(|&b| b != a));
        }
        order.push(v);
    }
    (width, order)
}

/// Exact treewidth by dynamic programming over vertex subsets.
pub fn treewidth_exact_small(g: &PrimalGraph) -> Result<usize, WidthError> {
    let vs: Vec<Var> = g.vertices().collect();
    let n = vs.len();
    if n > EXACT_LIMIT {
        return Err(WidthError::TooManyVertices(n));
    }
    if n == 0 {
        return Ok(0);
    }
    let nb: Vec<u32> = vs
        .iter()
        .map(|&v| {
            vs.iter()
                .enumerate()
                .filter(|(_, &u)| g.has_edge(u, v))
                .fold(0u32, |m, (j, _)| m | 1 << j)
        })
        .collect();
    // |Q(S, v)|: vertices outside S ∪ {v} reachable from v through S
    let q = |s: u32, v: usize| -> u32 {
        let mut inside = 1u32 << v;
        let mut frontier = 1u32 << v;
        let mut out = 0u32;
        while frontier != 0 {
            let mut next = 0u32;
            let mut f = frontier;
            while f != 0 {
                let u = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= nb[u];
            }
            out |= next & !s & !(1 << v);
            let grow = next & s & !inside;
            inside |= grow;
            frontier = grow;
        }
        out.count_ones()
    };
    let full = (1u32 << n) - 1;
    let mut tw = vec![i64::MAX; 1 << n];
    tw[0] = -1;
    for s in 1..=full {
        let mut best = i64::MAX;
        let mut bits = s;
        while bits != 0 {
            let v = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let rest = s & !(1 << v);
            best = best.min(tw[rest as usize].max(i64::from(q(rest, v))));
        }
        tw[s as usize] = best;
    }
    Ok(tw[full as usize].max(0) as usize)
}
