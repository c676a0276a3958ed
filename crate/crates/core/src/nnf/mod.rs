//! Negation normal form DAGs stored in a topologically ordered arena.
//!
//! Children always have smaller ids than their parents, so every bottom-up
//! pass is a single forward sweep over the arena.

use std::collections::{BTreeSet, HashMap};

use thiserror::Error;

use crate::cnf::{Lit, Var};

mod io;
mod query;

pub use io::{parse_nnf, write_nnf};
pub use query::{DecomposabilityViolation, DeterminismMode, QueryError};

pub type NodeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum NnfNode {
    Lit(Lit),
    True,
    False,
    And(Vec<NodeId>),
    /// `decision` names the variable the disjuncts branch on, when known.
    Or {
        children: Vec<NodeId>,
        decision: Option<Var>,
    },
}

impl NnfNode {
    pub fn children(&self) -> &[NodeId] {
        match self {
            NnfNode::And(c) | NnfNode::Or { children: c, .. } => c,
            _ => &[],
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NnfError {
    #[error("node {node} refers to child {child}, which is not an earlier node")]
    ForwardReference { node: NodeId, child: NodeId },
    #[error("node {0} is an AND/OR node without children")]
    EmptyGate(NodeId),
    #[error("root {root} is outside an arena of {len} nodes")]
    BadRoot { root: NodeId, len: usize },
    #[error("node {node} mentions variable {var} beyond the declared {num_vars}")]
    VariableOutOfRange {
        node: NodeId,
        var: Var,
        num_vars: u32,
    },
    #[error("empty arena")]
    Empty,
    #[error("line {line}: malformed header `{text}`")]
    MalformedHeader { line: usize, text: String },
    #[error("missing `nnf` header")]
    MissingHeader,
    #[error("line {line}: unknown line tag `{tag}`")]
    UnknownTag { line: usize, tag: String },
    #[error("line {line}: malformed node line `{text}`")]
    MalformedNode { line: usize, text: String },
    #[error("header declares {declared} {what} but the file has {found}")]
    HeaderMismatch {
        what: &'static str,
        declared: usize,
        found: usize,
    },
}

/// Size of a DAG as reported in compilation tables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct NnfStats {
    pub node_count: usize,
    pub edge_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NnfDag {
    nodes: Vec<NnfNode>,
    root: NodeId,
    num_vars: u32,
    var_sets: Vec<Box<[Var]>>,
}

fn merge_sorted(sets: &[&[Var]]) -> Box<[Var]> {
    let mut out: Vec<Var> = sets.iter().flat_map(|s| s.iter().copied()).collect();
    out.sort_unstable();
    out.dedup();
    out.into_boxed_slice()
}

impl NnfDag {
    pub fn new(nodes: Vec<NnfNode>, root: NodeId, num_vars: u32) -> Result<Self, NnfError> {
        if nodes.is_empty() {
            return Err(NnfError::Empty);
        }
        if root >= nodes.len() {
            return Err(NnfError::BadRoot {
                root,
                len: nodes.len(),
            });
        }
        let mut var_sets: Vec<Box<[Var]>> = Vec::with_capacity(nodes.len());
        for (id, node) in nodes.iter().enumerate() {
            let set = match node {
                NnfNode::Lit(l) => {
                    if l.var().index() > num_vars {
                        return Err(NnfError::VariableOutOfRange {
                            node: id,
                            var: l.var(),
                            num_vars,
                        });
                    }
                    Box::new([l.var()]) as Box<[Var]>
                }
                NnfNode::True | NnfNode::False => Box::new([]) as Box<[Var]>,
                NnfNode::And(ch) | NnfNode::Or { children: ch, .. } => {
                    if ch.is_empty() {
                        return Err(NnfError::EmptyGate(id));
                    }
                    if let Some(&child) = ch.iter().find(|&&c| c >= id) {
                        return Err(NnfError::ForwardReference { node: id, child });
                    }
                    let parts: Vec<&[Var]> = ch.iter().map(|&c| &*var_sets[c]).collect();
                    merge_sorted(&parts)
                }
            };
            var_sets.push(set);
        }
        Ok(NnfDag {
            nodes,
            root,
            num_vars,
            var_sets,
        })
    }

    /// The DAG consisting of a single literal.
    pub fn literal(lit: Lit, num_vars: u32) -> Self {
        NnfDag::new(vec![NnfNode::Lit(lit)], 0, num_vars.max(lit.var().index()))
            .expect("single literal is well formed")
    }

    pub fn constant(value: bool, num_vars: u32) -> Self {
        let node = if value { NnfNode::True } else { NnfNode::False };
        NnfDag::new(vec![node], 0, num_vars).expect("constant is well formed")
    }

    pub fn nodes(&self) -> &[NnfNode] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &NnfNode {
        &self.nodes[id]
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn num_vars(&self) -> u32 {
        self.num_vars
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Variables mentioned below `id`, ascending.
    pub fn var_set(&self, id: NodeId) -> &[Var] {
        &self.var_sets[id]
    }

    pub fn mentioned_vars(&self) -> BTreeSet<Var> {
        self.var_sets[self.root].iter().copied().collect()
    }

    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        seen[self.root] = true;
        for id in (0..=self.root).rev() {
            if seen[id] {
                for &c in self.nodes[id].children() {
                    seen[c] = true;
                }
            }
        }
        seen
    }

    /// Node and edge counts over the part of the arena reachable from the root.
    pub fn stats(&self) -> NnfStats {
        let reach = self.reachable();
        let mut stats = NnfStats::default();
        for (node, _) in self.nodes.iter().zip(&reach).filter(|(_, &r)| r) {
            stats.node_count += 1;
            stats.edge_count += node.children().len();
        }
        stats
    }

    /// Drops unreachable nodes and renumbers so that the root is last.
    pub fn compact(&self) -> NnfDag {
        let reach = self.reachable();
        let mut remap = vec![usize::MAX; self.nodes.len()];
        let mut nodes = Vec::new();
        for (id, node) in self.nodes.iter().enumerate() {
            if !reach[id] {
                continue;
            }
            remap[id] = nodes.len();
            nodes.push(match node {
                NnfNode::And(ch) => NnfNode::And(ch.iter().map(|&c| remap[c]).collect()),
                NnfNode::Or { children, decision } => NnfNode::Or {
                    children: children.iter().map(|&c| remap[c]).collect(),
                    decision: *decision,
                },
                other => other.clone(),
            });
        }
        let root = remap[self.root];
        NnfDag::new(nodes, root, self.num_vars).expect("compaction preserves well-formedness")
    }
}

/// Incremental arena construction with optional structural sharing.
#[derive(Debug, Default)]
pub struct NnfBuilder {
    nodes: Vec<NnfNode>,
    index: HashMap<NnfNode, NodeId>,
    share: bool,
}

impl NnfBuilder {
    /// A builder that reuses an existing node whenever an identical one is
    /// requested.
    pub fn shared() -> Self {
        NnfBuilder {
            share: true,
            ..NnfBuilder::default()
        }
    }

    pub fn unshared() -> Self {
        NnfBuilder::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &NnfNode {
        &self.nodes[id]
    }

    pub fn push(&mut self, node: NnfNode) -> NodeId {
        debug_assert!(node.children().iter().all(|&c| c < self.nodes.len()));
        if self.share {
            if let Some(&id) = self.index.get(&node) {
                return id;
            }
            self.index.insert(node.clone(), self.nodes.len());
        }
        self.nodes.push(node);
        self.nodes.len() - 1
    }

    pub fn lit(&mut self, lit: Lit) -> NodeId {
        self.push(NnfNode::Lit(lit))
    }

    pub fn constant(&mut self, value: bool) -> NodeId {
        self.push(if value { NnfNode::True } else { NnfNode::False })
    }

    /// Conjunction with constant folding: TRUE children vanish, a FALSE child
    /// absorbs, and a single remaining child is returned as is.
    pub fn and(&mut self, children: Vec<NodeId>) -> NodeId {
        let mut kept = Vec::with_capacity(children.len());
        for c in children {
            match self.nodes[c] {
                NnfNode::True => {}
                NnfNode::False => return self.constant(false),
                _ => kept.push(c),
            }
        }
        match kept.len() {
            0 => self.constant(true),
            1 => kept[0],
            _ => self.push(NnfNode::And(kept)),
        }
    }

    /// Disjunction with constant folding, mirroring [`NnfBuilder::and`].
    pub fn or(&mut self, children: Vec<NodeId>, decision: Option<Var>) -> NodeId {
        let mut kept = Vec::with_capacity(children.len());
        for c in children {
            match self.nodes[c] {
                NnfNode::False => {}
                NnfNode::True => return self.constant(true),
                _ => kept.push(c),
            }
        }
        match kept.len() {
            0 => self.constant(false),
            1 => kept[0],
            _ => self.push(NnfNode::Or {
                children: kept,
                decision,
            }),
        }
    }

    pub fn finish(self, root: NodeId, num_vars: u32) -> Result<NnfDag, NnfError> {
        NnfDag::new(self.nodes, root, num_vars)
    }
}
